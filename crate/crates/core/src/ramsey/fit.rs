use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::model::{RamseyConfig, SignalParams};
use super::RamseyError;

/// Parameter order inside the solver: offset, amplitude, gamma (1/us), delta (MHz).
type Theta = [f64; 4];

const GAMMA_MAX_PER_US: f64 = 50.0;
const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Weight points by the inverse binomial standard error.
    pub weighted: bool,
    pub delta_starts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            weighted: false,
            delta_starts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: SignalParams,
    pub converged: bool,
    /// Sum of squared (weighted) residuals on the probability scale.
    pub residual: f64,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FitResult {
    /// Fitted curve at each delay.
    pub fn curve(&self, taus: &[f64]) -> Vec<f64> {
        taus.iter()
            .map(|&t| super::model::model_probability(&self.params, t))
            .collect()
    }
}

struct Problem<'a> {
    t: &'a [f64],
    y: &'a [f64],
    w: Vec<f64>,
    lower: Theta,
    upper: Theta,
}

impl Problem<'_> {
    fn residuals(&self, th: &Theta) -> Vec<f64> {
        self.t
            .iter()
            .zip(self.y)
            .zip(&self.w)
            .map(|((&t, &y), &w)| {
                let m = th[0] + th[1] * (-th[2] * t).exp() * (2.0 * PI * th[3] * t).cos();
                w * (m - y)
            })
            .collect()
    }

    fn cost(&self, th: &Theta) -> f64 {
        self.residuals(th).iter().map(|r| r * r).sum()
    }

    fn jacobian(&self, th: &Theta) -> Vec<[f64; 4]> {
        self.t
            .iter()
            .zip(&self.w)
            .map(|(&t, &w)| {
                let e = (-th[2] * t).exp();
                let (s, c) = (2.0 * PI * th[3] * t).sin_cos();
                [
                    w,
                    w * e * c,
                    -w * t * th[1] * e * c,
                    -w * th[1] * e * 2.0 * PI * t * s,
                ]
            })
            .collect()
    }

    fn project(&self, th: &mut Theta) {
        for (k, v) in th.iter_mut().enumerate() {
            *v = v.clamp(self.lower[k], self.upper[k]);
        }
    }

    /// True when a parameter sits on a bound other than `gamma = 0`.
    fn at_bound(&self, th: &Theta) -> bool {
        (0..4).any(|k| {
            let low = (th[k] - self.lower[k]).abs() <= BOUND_TOL && k != 2;
            let high = (self.upper[k] - th[k]).abs() <= BOUND_TOL;
            low || high
        })
    }
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

struct Outcome {
    theta: Theta,
    cost: f64,
    iterations: usize,
    converged: bool,
}

/// Levenberg-Marquardt with box projection.
fn levenberg_marquardt(p: &Problem, start: Theta, max_iterations: usize) -> Outcome {
    let mut th = start;
    p.project(&mut th);
    let mut cost = p.cost(&th);
    let mut lambda = 1e-3;
    for iter in 1..=max_iterations {
        let r = p.residuals(&th);
        let jac = p.jacobian(&th);
        let mut jtj = [[0.0; 4]; 4];
        let mut g = [0.0; 4];
        for (row, ri) in jac.iter().zip(&r) {
            for a in 0..4 {
                g[a] += row[a] * ri;
                for b in 0..4 {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut accepted = None;
        while lambda < 1e14 {
            let mut m = jtj;
            for k in 0..4 {
                m[k][k] += lambda * jtj[k][k].max(1e-12);
            }
            let neg_g = [-g[0], -g[1], -g[2], -g[3]];
            if let Some(step) = solve4(m, neg_g) {
                let mut cand = [
                    th[0] + step[0],
                    th[1] + step[1],
                    th[2] + step[2],
                    th[3] + step[3],
                ];
                p.project(&mut cand);
                let c = p.cost(&cand);
                if c < cost {
                    accepted = Some((cand, c));
                    break;
                }
            }
            lambda *= 4.0;
        }
        let Some((cand, c)) = accepted else {
            // No descent direction left at working precision: a stationary point.
            return Outcome {
                theta: th,
                cost,
                iterations: iter,
                converged: true,
            };
        };
        let small_step = (0..4).all(|k| (cand[k] - th[k]).abs() <= 1e-10 * (th[k].abs() + 1e-6));
        let small_gain = cost - c <= 1e-15 * cost.max(1e-300);
        th = cand;
        cost = c;
        lambda = (lambda / 3.0).max(1e-12);
        if small_step || small_gain || cost < 1e-28 {
            return Outcome {
                theta: th,
                cost,
                iterations: iter,
                converged: true,
            };
        }
    }
    Outcome {
        theta: th,
        cost,
        iterations: max_iterations,
        converged: false,
    }
}

/// Frequency (MHz) maximizing the undamped periodogram of the centered data.
fn periodogram_peak(t: &[f64], y: &[f64], f_max: f64) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let steps = 256;
    (1..steps)
        .map(|k| f_max * k as f64 / steps as f64)
        .map(|f| {
            let (mut re, mut im) = (0.0, 0.0);
            for (&ti, &yi) in t.iter().zip(y) {
                let (s, c) = (2.0 * PI * f * ti).sin_cos();
                re += (yi - mean) * c;
                im += (yi - mean) * s;
            }
            (f, re * re + im * im)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(f, _)| f)
        .unwrap_or(0.0)
}

pub fn fit(data: &[(f64, u32)], cfg: &RamseyConfig) -> Result<FitResult, RamseyError> {
    fit_with(data, cfg, &FitOptions::default())
}

/// Nonlinear least squares of `count / shots` against the decaying cosine.
/// Starts: `delta_starts` points spread over `(0, 2 f_osc)` plus the
/// periodogram peak; the lowest-cost run wins.
pub fn fit_with(
    data: &[(f64, u32)],
    cfg: &RamseyConfig,
    opts: &FitOptions,
) -> Result<FitResult, RamseyError> {
    let shots = cfg.shots.max(1) as f64;
    let taus: Vec<f64> = data.iter().map(|(tau, _)| *tau).collect();
    let probs: Vec<f64> = data.iter().map(|(_, c)| *c as f64 / shots).collect();
    fit_probabilities(&taus, &probs, cfg, opts)
}

/// Same fit on empirical probabilities (delays in seconds).
pub fn fit_probabilities(
    taus: &[f64],
    probs: &[f64],
    cfg: &RamseyConfig,
    opts: &FitOptions,
) -> Result<FitResult, RamseyError> {
    if taus.len() < 5 || taus.len() != probs.len() {
        return Err(RamseyError::TooFewPoints(taus.len().min(probs.len())));
    }
    let shots = cfg.shots.max(1) as f64;
    let t: Vec<f64> = taus.iter().map(|tau| tau * 1e6).collect();
    let y = probs;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    if y.iter().all(|v| (v - y[0]).abs() < 1e-15) {
        return Ok(FitResult {
            params: SignalParams {
                delta: 0.0,
                gamma: f64::INFINITY,
                amplitude: 0.0,
                offset: mean,
            },
            converged: false,
            residual: 0.0,
            iterations: 0,
            note: Some("constant data: pure decoherence".into()),
        });
    }
    let w = if opts.weighted {
        y.iter()
            .map(|&p| {
                let var = (p * (1.0 - p)).max(1.0 / shots) / shots;
                1.0 / var.sqrt()
            })
            .collect()
    } else {
        vec![1.0; y.len()]
    };
    let span = t[t.len() - 1] - t[0];
    let nyquist = if span > 0.0 {
        0.5 * (t.len() - 1) as f64 / span
    } else {
        1.0
    };
    let problem = Problem {
        t: &t,
        y,
        w,
        lower: [0.0, 0.0, 0.0, 0.0],
        upper: [1.0, 1.0, GAMMA_MAX_PER_US, nyquist],
    };
    let f_osc = cfg.f_osc * 1e-6;
    let amp0 = (y.iter().cloned().fold(f64::MIN, f64::max)
        - y.iter().cloned().fold(f64::MAX, f64::min))
        / 2.0;
    let amp0 = amp0.clamp(0.05, 0.5);
    let gamma0 = if span > 0.0 { 1.0 / span } else { 0.1 };
    let mut starts: Vec<f64> = (0..opts.delta_starts)
        .map(|k| 2.0 * f_osc * (k as f64 + 0.5) / opts.delta_starts as f64)
        .collect();
    starts.push(periodogram_peak(&t, y, nyquist));

    let best = starts
        .iter()
        .map(|&d0| levenberg_marquardt(&problem, [mean, amp0, gamma0, d0], opts.max_iterations))
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .expect("at least one start");
    let hit = problem.at_bound(&best.theta);
    let note = match (best.converged, hit) {
        (false, _) => Some("iteration budget exhausted".to_string()),
        (true, true) => Some("parameter at bound".to_string()),
        _ => None,
    };
    Ok(FitResult {
        params: SignalParams {
            offset: best.theta[0],
            amplitude: best.theta[1],
            gamma: best.theta[2] * 1e6,
            delta: best.theta[3] * 1e6,
        },
        converged: best.converged && !hit,
        residual: best.cost,
        iterations: best.iterations,
        note,
    })
}
