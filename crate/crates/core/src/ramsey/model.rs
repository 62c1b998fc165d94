use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RamseyError;

/// Sweep settings of one Ramsey experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyConfig {
    /// Delays in seconds.
    pub tau_points: Vec<f64>,
    /// Frame-rotation frequency in Hz.
    pub f_osc: f64,
    pub shots: u32,
    pub seed: u64,
}

impl Default for RamseyConfig {
    fn default() -> Self {
        RamseyConfig {
            tau_points: (0..39).map(|k| 11e-6 * k as f64 / 38.0).collect(),
            f_osc: 3.0e5,
            shots: 1024,
            seed: 0,
        }
    }
}

impl RamseyConfig {
    pub fn validate(&self) -> Result<(), RamseyError> {
        if self.shots == 0 {
            return Err(RamseyError::InvalidConfig(
                "shots must be at least 1".into(),
            ));
        }
        if self
            .tau_points
            .first()
            .is_some_and(|t| t.is_nan() || *t < 0.0)
        {
            return Err(RamseyError::InvalidConfig(
                "delays must be nonnegative".into(),
            ));
        }
        if self
            .tau_points
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(RamseyError::InvalidConfig(
                "delays must be strictly increasing".into(),
            ));
        }
        if !(self.f_osc.is_finite() && self.f_osc > 0.0) {
            return Err(RamseyError::InvalidConfig("f_osc must be positive".into()));
        }
        Ok(())
    }

    /// Largest frequency resolvable by the (assumed uniform) delay grid.
    pub fn nyquist_hz(&self) -> f64 {
        let n = self.tau_points.len();
        if n < 2 {
            return f64::INFINITY;
        }
        let span = self.tau_points[n - 1] - self.tau_points[0];
        0.5 * (n - 1) as f64 / span
    }
}

/// Decaying-cosine signal. `delta` is the oscillation frequency in Hz and
/// `gamma` the dephasing rate `1/T2*` in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalParams {
    pub delta: f64,
    pub gamma: f64,
    pub amplitude: f64,
    pub offset: f64,
}

impl SignalParams {
    pub fn new(delta: f64, gamma: f64) -> SignalParams {
        SignalParams {
            delta,
            gamma,
            amplitude: 0.5,
            offset: 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), RamseyError> {
        let ok = self.gamma >= 0.0
            && self.offset - self.amplitude >= -1e-12
            && self.offset + self.amplitude <= 1.0 + 1e-12
            && self.delta.is_finite();
        if ok {
            Ok(())
        } else {
            Err(RamseyError::InvalidConfig(format!(
                "signal parameters out of range: {self:?}"
            )))
        }
    }
}

/// `offset + amplitude e^{-gamma tau} cos(2 pi delta tau)`, clamped to `[0, 1]`.
pub fn model_probability(params: &SignalParams, tau: f64) -> f64 {
    let p = params.offset
        + params.amplitude * (-params.gamma * tau).exp() * (2.0 * PI * params.delta * tau).cos();
    p.clamp(0.0, 1.0)
}

/// Mixes the identifiers of a simulated run into a ChaCha stream number.
pub fn stream_id(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x243f_6a88_85a3_08d3;
    for &p in parts {
        h ^= p;
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Shot-by-shot sampling: a shot reads `|0>` when its uniform falls below the
/// model probability, so runs sharing a stream share their uniforms.
pub fn simulate_with<R: Rng + ?Sized>(
    params: &SignalParams,
    cfg: &RamseyConfig,
    rng: &mut R,
) -> Vec<(f64, u32)> {
    cfg.tau_points
        .iter()
        .map(|&tau| {
            let p = model_probability(params, tau);
            let count = (0..cfg.shots).filter(|_| rng.random::<f64>() < p).count() as u32;
            (tau, count)
        })
        .collect()
}

pub fn simulate(params: &SignalParams, cfg: &RamseyConfig) -> Vec<(f64, u32)> {
    simulate_with(params, cfg, &mut stream_rng(cfg.seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_examples() {
        let p = SignalParams::new(123e3, 5e4);
        assert_eq!(model_probability(&p, 0.0), 1.0);
        let p = SignalParams::new(123e3, 1e12);
        assert!((model_probability(&p, 1e-6) - 0.5).abs() < 1e-15);
        let p = SignalParams::new(250e3, 0.0);
        assert!(model_probability(&p, 2e-6) < 1e-15);
    }

    #[test]
    fn default_sweep() {
        let cfg = RamseyConfig::default();
        assert_eq!(cfg.tau_points.len(), 39);
        assert_eq!(cfg.tau_points[0], 0.0);
        assert!((cfg.tau_points[38] - 11e-6).abs() < 1e-18);
        assert!((cfg.nyquist_hz() - 19.0 / 11e-6).abs() < 1e-6);
        cfg.validate().unwrap();
    }

    #[test]
    fn config_validation() {
        let cfg = RamseyConfig {
            shots: 0,
            ..RamseyConfig::default()
        };
        assert!(cfg.validate().is_err());
        let mut cfg = RamseyConfig::default();
        cfg.tau_points.swap(3, 4);
        assert!(cfg.validate().is_err());
        let mut cfg = RamseyConfig::default();
        cfg.tau_points[0] = -1e-9;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_shot_certain() {
        let cfg = RamseyConfig {
            tau_points: vec![0.0],
            shots: 1,
            ..RamseyConfig::default()
        };
        assert_eq!(simulate(&SignalParams::new(3e5, 5e4), &cfg), vec![(0.0, 1)]);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = RamseyConfig {
            seed: 11,
            ..RamseyConfig::default()
        };
        let p = SignalParams::new(3e5, 5e4);
        assert_eq!(simulate(&p, &cfg), simulate(&p, &cfg));
        let other = RamseyConfig { seed: 12, ..cfg };
        assert_ne!(
            simulate(&p, &other),
            simulate(
                &p,
                &RamseyConfig {
                    seed: 11,
                    ..other.clone()
                }
            )
        );
    }

    #[test]
    fn streams_differ() {
        assert_ne!(stream_id(&[1, 2, 3]), stream_id(&[1, 3, 2]));
        assert_ne!(stream_id(&[0]), stream_id(&[0, 0]));
    }
}
