use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::args::{Command, RerunArgs};
use crate::{execute, set_out_dir, sha256_hex, Output};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub invocation: Command,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    /// Input name (path or `bundled:<name>`) to SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output files, relative to the output directory.
    pub outputs: Vec<String>,
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Bounds(a) => Some(a.seed),
        Command::Simulate(a) => Some(a.seed),
        Command::Pinsker(a) => Some(a.seed),
        _ => None,
    }
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name))
        .with_context(|| format!("writing {}", dir.join(name).display()))?;
    Ok(())
}

/// Writes the command outputs and their manifest into `dir`.
pub fn emit(cmd: &Command, output: &Output, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, bytes) in &output.files {
        write_atomic(dir, name, bytes)?;
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        invocation: cmd.clone(),
        seed: seed_of(cmd),
        config: output.config.clone(),
        inputs: output.inputs.clone(),
        outputs: output.files.iter().map(|(n, _)| n.clone()).collect(),
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    write_atomic(dir, MANIFEST_NAME, text.as_bytes())
}

fn verify_inputs(inputs: &BTreeMap<String, String>) -> Result<()> {
    for (name, expected) in inputs {
        let actual = match name.strip_prefix("bundled:") {
            Some(stem) => match covertlat::placement::bundled_device(stem) {
                Some(text) => sha256_hex(text.as_bytes()),
                None => bail!("manifest input {name} is not a bundled device of this build"),
            },
            None => {
                sha256_hex(&std::fs::read(name).with_context(|| format!("reading input {name}"))?)
            }
        };
        if &actual != expected {
            bail!("input {name} changed since the recorded run (sha256 {actual}, expected {expected})");
        }
    }
    Ok(())
}

/// Replays a manifest. With `check`, regenerates into a scratch directory and
/// compares every recorded output byte for byte.
pub fn rerun(args: &RerunArgs) -> Result<Option<String>> {
    let text = std::fs::read_to_string(&args.manifest)
        .with_context(|| format!("reading {}", args.manifest.display()))?;
    let manifest: RunManifest = serde_json::from_str(&text).context("parsing manifest")?;
    if manifest.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, replaying with {}",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    verify_inputs(&manifest.inputs)?;
    let recorded_dir = args
        .manifest
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let mut cmd = manifest.invocation;
    if args.check {
        let scratch = tempfile::tempdir()?;
        set_out_dir(&mut cmd, scratch.path().to_path_buf());
        let output = execute(&mut cmd)?;
        let mut mismatched = Vec::new();
        for name in &manifest.outputs {
            let recorded = std::fs::read(recorded_dir.join(name))
                .with_context(|| format!("reading recorded {name}"))?;
            match output.files.iter().find(|(n, _)| n == name) {
                Some((_, fresh)) if *fresh == recorded => {}
                _ => mismatched.push(name.clone()),
            }
        }
        if !mismatched.is_empty() {
            bail!(
                "outputs differ from the recorded run: {}",
                mismatched.join(", ")
            );
        }
        println!("identical={}", manifest.outputs.len());
        return Ok(output.failure);
    }
    let dir = args.out.clone().unwrap_or(recorded_dir);
    set_out_dir(&mut cmd, dir.clone());
    let output = execute(&mut cmd)?;
    print!("{}", output.stdout);
    emit(&cmd, &output, &dir)?;
    Ok(output.failure)
}
