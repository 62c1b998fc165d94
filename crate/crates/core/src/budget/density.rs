use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::linalg::{hermitian_eigen, CMatrix};
use super::BudgetError;

pub const MAX_DIM: usize = 8;
const TOL: f64 = 1e-12;
/// Eigenvalues below this are treated as outside the support.
pub const SUPPORT_EPS: f64 = 1e-10;

/// A validated density matrix of dimension at most 8.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct DensityMatrix {
    m: CMatrix,
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for DensityMatrix {
    type Error = BudgetError;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self, Self::Error> {
        DensityMatrix::new(
            rows.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|[re, im]| Complex64::new(re, im))
                        .collect()
                })
                .collect(),
        )
    }
}

impl From<DensityMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(d: DensityMatrix) -> Self {
        let n = d.m.n;
        (0..n)
            .map(|i| (0..n).map(|j| [d.m.at(i, j).re, d.m.at(i, j).im]).collect())
            .collect()
    }
}

impl DensityMatrix {
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<DensityMatrix, BudgetError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(BudgetError::NotSquare);
        }
        if n > MAX_DIM {
            return Err(BudgetError::TooLarge(n));
        }
        let m = CMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        };
        DensityMatrix::from_matrix(m)
    }

    pub(crate) fn from_matrix(m: CMatrix) -> Result<DensityMatrix, BudgetError> {
        if m.data
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(BudgetError::NotHermitian(f64::NAN));
        }
        let defect = m.max_hermitian_defect();
        if defect > TOL {
            return Err(BudgetError::NotHermitian(defect));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TOL {
            return Err(BudgetError::BadTrace(tr));
        }
        let (vals, _) = hermitian_eigen(&m);
        if vals[0] < -TOL {
            return Err(BudgetError::NotPositive(vals[0]));
        }
        Ok(DensityMatrix { m })
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<DensityMatrix, BudgetError> {
        let n = probs.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Complex64::new(if i == j { probs[i] } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        DensityMatrix::new(rows)
    }

    /// `|psi><psi|` for a normalized copy of `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<DensityMatrix, BudgetError> {
        let norm_sq = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if norm_sq == 0.0 {
            return Err(BudgetError::BadTrace(0.0));
        }
        let rows = psi
            .iter()
            .map(|a| psi.iter().map(|b| a * b.conj() / norm_sq).collect())
            .collect();
        DensityMatrix::new(rows)
    }

    pub fn maximally_mixed(d: usize) -> Result<DensityMatrix, BudgetError> {
        DensityMatrix::diagonal(&vec![1.0 / d as f64; d])
    }

    /// `A A^dagger / tr` with complex Gaussian `A`.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix, BudgetError> {
        if d == 0 {
            return Err(BudgetError::NotSquare);
        }
        if d > MAX_DIM {
            return Err(BudgetError::TooLarge(d));
        }
        let mut a = CMatrix::zeros(d);
        for z in a.data.iter_mut() {
            *z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let mut m = a.mul(&a.adjoint());
        let tr = m.trace().re;
        m = m.scale(1.0 / tr);
        // Symmetrize away rounding so validation sees an exactly Hermitian matrix.
        for i in 0..d {
            for j in i..d {
                let z = 0.5 * (m.at(i, j) + m.at(j, i).conj());
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
            let re = m.at(i, i).re;
            m.set(i, i, Complex64::new(re, 0.0));
        }
        DensityMatrix::from_matrix(m)
    }

    pub fn dim(&self) -> usize {
        self.m.n
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m.at(i, j)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).0
    }

    /// `self ⊗ other`, when the product still fits the size limit.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix, BudgetError> {
        let n = self.dim() * other.dim();
        if n > MAX_DIM {
            return Err(BudgetError::TooLarge(n));
        }
        Ok(DensityMatrix {
            m: self.m.kron(&other.m),
        })
    }

    pub(crate) fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    fn ln_factor(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::E => 1.0,
        }
    }
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<(), BudgetError> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(BudgetError::DimensionMismatch(a.dim(), b.dim()))
    }
}

pub(crate) fn trace_norm_half(a: &CMatrix, b: &CMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(&a.sub(b));
    0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
}

/// `½ Σ |eig(ρ − σ)|`, clamped to `[0, 1]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, BudgetError> {
    same_dim(rho, sigma)?;
    Ok(trace_norm_half(&rho.m, &sigma.m).clamp(0.0, 1.0))
}

pub(crate) fn relative_entropy_matrix(rho: &CMatrix, sigma: &CMatrix, base: LogBase) -> f64 {
    let (lr, vr) = hermitian_eigen(rho);
    let (ls, vs) = hermitian_eigen(sigma);
    let n = rho.n;
    // overlap[i][j] = |<r_i|s_j>|^2
    let overlap = vr.adjoint().mul(&vs);
    let mut d = 0.0;
    for &l in lr.iter().filter(|&&l| l > SUPPORT_EPS) {
        d += l * l.ln();
    }
    for (j, &lsj) in ls.iter().enumerate() {
        let weight: f64 = (0..n)
            .filter(|&i| lr[i] > 0.0)
            .map(|i| lr[i] * overlap.at(i, j).norm_sqr())
            .sum();
        if lsj <= SUPPORT_EPS {
            if weight > SUPPORT_EPS {
                return f64::INFINITY;
            }
            continue;
        }
        d -= weight * lsj.ln();
    }
    (d / base.ln_factor()).max(0.0)
}

/// `Tr ρ (log ρ − log σ)`; `+∞` when the support of ρ leaves that of σ.
pub fn quantum_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    base: LogBase,
) -> Result<f64, BudgetError> {
    same_dim(rho, sigma)?;
    Ok(relative_entropy_matrix(&rho.m, &sigma.m, base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket0() -> DensityMatrix {
        DensityMatrix::diagonal(&[1.0, 0.0]).unwrap()
    }

    fn ket1() -> DensityMatrix {
        DensityMatrix::diagonal(&[0.0, 1.0]).unwrap()
    }

    #[test]
    fn trace_distance_examples() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(trace_distance(&ket0(), &ket0()).unwrap(), 0.0);
        assert!((trace_distance(&ket0(), &ket1()).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&mixed, &ket0()).unwrap() - 0.5).abs() < 1e-15);
        let three = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(
            trace_distance(&mixed, &three),
            Err(BudgetError::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn relative_entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let q = quantum_relative_entropy(&ket0(), &mixed, LogBase::Two).unwrap();
        assert!((q - 1.0).abs() < 1e-12);
        let q = quantum_relative_entropy(&ket0(), &mixed, LogBase::E).unwrap();
        assert!((q - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(
            quantum_relative_entropy(&mixed, &mixed, LogBase::Two).unwrap(),
            0.0
        );
        assert_eq!(
            quantum_relative_entropy(&ket0(), &ket1(), LogBase::Two).unwrap(),
            f64::INFINITY
        );
        assert!(quantum_relative_entropy(&mixed, &ket0(), LogBase::Two)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn validation() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let not_herm = vec![
            vec![c(0.5, 0.0), c(0.1, 0.1)],
            vec![c(0.1, 0.1), c(0.5, 0.0)],
        ];
        assert!(matches!(
            DensityMatrix::new(not_herm),
            Err(BudgetError::NotHermitian(_))
        ));
        assert!(matches!(
            DensityMatrix::diagonal(&[0.5, 0.6]),
            Err(BudgetError::BadTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::diagonal(&[1.5, -0.5]),
            Err(BudgetError::NotPositive(_))
        ));
        assert!(matches!(
            DensityMatrix::maximally_mixed(9),
            Err(BudgetError::TooLarge(9))
        ));
        assert!(matches!(
            DensityMatrix::new(vec![vec![c(1.0, 0.0)], vec![]]),
            Err(BudgetError::NotSquare)
        ));
    }

    #[test]
    fn pure_states_and_json() {
        let plus =
            DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        assert!((plus.entry(0, 1).im + 0.5).abs() < 1e-15);
        let text = serde_json::to_string(&plus).unwrap();
        assert_eq!(text, "[[[0.5,0.0],[0.0,-0.5]],[[0.0,0.5],[0.5,0.0]]]");
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, plus);
        assert!(serde_json::from_str::<DensityMatrix>("[[[0.5,0.0]]]").is_err());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..=MAX_DIM {
            let r = DensityMatrix::random(d, &mut rng).unwrap();
            assert!(r.eigenvalues().iter().all(|&l| l > 0.0));
        }
        let a = DensityMatrix::random(2, &mut rng).unwrap();
        let b = DensityMatrix::random(4, &mut rng).unwrap();
        assert_eq!(a.tensor(&b).unwrap().dim(), 8);
        assert!(b.tensor(&b).is_err());
    }
}
