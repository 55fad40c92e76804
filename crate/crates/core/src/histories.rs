//! Finite-dimensional quantum probability: density matrices, projective
//! measurements, von Neumann entropy and time-ordered histories.
//!
//! Preparation completes at `t0 = 0`. Registrations happen at absolute times
//! after it, so every operation that takes a time rejects negative values
//! except [`unitary_evolve`], which is the reversible group evolution.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_forward_time, Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for Hermiticity, trace, idempotency and completeness checks.
pub const MATRIX_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted in a density matrix.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;
/// Eigenvalues below this are dropped from `-sum l ln l`.
pub const ENTROPY_CLIP: f64 = 1e-14;
/// Branch probabilities at or below this are treated as zero.
pub const ZERO_PROBABILITY: f64 = 1e-14;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()).scale(0.5)
}

fn require_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::Input(format!(
            "{what} must be a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn require_dimension(n: usize, m: usize, what: &str) -> Result<()> {
    if n != m {
        return Err(Error::Input(format!("{what} has dimension {m}, expected {n}")));
    }
    Ok(())
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct DensityMatrix {
    rho: CMatrix,
}

/// Wire form shared by density matrices and projectors.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct MatrixRepr(#[serde(with = "crate::serde_complex::matrix")] CMatrix);

impl TryFrom<MatrixRepr> for DensityMatrix {
    type Error = Error;
    fn try_from(m: MatrixRepr) -> Result<Self> {
        DensityMatrix::new(m.0)
    }
}

impl From<DensityMatrix> for MatrixRepr {
    fn from(d: DensityMatrix) -> Self {
        MatrixRepr(d.rho)
    }
}

impl DensityMatrix {
    pub fn new(rho: CMatrix) -> Result<Self> {
        require_square(&rho, "density matrix")?;
        let defect = hermiticity_defect(&rho);
        if defect > MATRIX_TOLERANCE {
            return Err(Error::Input(format!("density matrix not Hermitian (defect {defect:.3e})")));
        }
        let trace = rho.trace();
        if (trace - 1.0).norm() > MATRIX_TOLERANCE {
            return Err(Error::Input(format!("density matrix trace {trace} differs from 1")));
        }
        let rho = hermitize(rho);
        let min = SymmetricEigen::new(rho.clone()).eigenvalues.min();
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::Input(format!("density matrix has negative eigenvalue {min:.3e}")));
        }
        Ok(Self { rho })
    }

    /// Results of exact algebra on a valid state; only roundoff is removed.
    fn from_trusted(rho: CMatrix) -> Self {
        Self { rho: hermitize(rho) }
    }

    /// `|psi><psi|` for a nonzero vector, normalized.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::Input("pure state needs a nonzero finite vector".into()));
        }
        let v = v.unscale(norm);
        Ok(Self::from_trusted(&v * v.adjoint()))
    }

    /// Diagonal state from non-negative weights summing to 1.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(weights.len(), weights.iter().map(|&w| Complex64::new(w, 0.0)));
        Self::new(CMatrix::from_diagonal(&d))
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("dimension must be positive".into()));
        }
        Ok(Self::from_trusted(CMatrix::identity(n, n).unscale(n as f64)))
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.rho.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `Tr(P rho)`.
    pub fn expectation(&self, p: &Projector) -> f64 {
        (&p.p * &self.rho).trace().re
    }
}

/// Orthogonal projector `P = P^2 = P^dagger`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Projector {
    p: CMatrix,
}

impl TryFrom<MatrixRepr> for Projector {
    type Error = Error;
    fn try_from(m: MatrixRepr) -> Result<Self> {
        Projector::new(m.0)
    }
}

impl From<Projector> for MatrixRepr {
    fn from(p: Projector) -> Self {
        MatrixRepr(p.p)
    }
}

impl Projector {
    pub fn new(p: CMatrix) -> Result<Self> {
        require_square(&p, "projector")?;
        let defect = hermiticity_defect(&p);
        if defect > MATRIX_TOLERANCE {
            return Err(Error::Input(format!("projector not Hermitian (defect {defect:.3e})")));
        }
        let idem = max_abs(&(&p * &p - &p));
        if idem > MATRIX_TOLERANCE {
            return Err(Error::Input(format!("projector not idempotent (defect {idem:.3e})")));
        }
        Ok(Self { p: hermitize(p) })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            p: CMatrix::identity(n, n),
        }
    }

    /// Projector onto the span of basis vectors `indices` of `C^n`.
    pub fn basis(n: usize, indices: &[usize]) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::Input(format!("basis index {i} out of range for dimension {n}")));
        }
        let mut p = CMatrix::zeros(n, n);
        for &i in indices {
            p[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { p })
    }

    /// Projector onto the span of the given vectors (Gram-Schmidt).
    pub fn span(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let n = vectors.first().map_or(0, Vec::len);
        if n == 0 || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::Input("span needs nonempty vectors of equal length".into()));
        }
        let mut basis: Vec<DVector<Complex64>> = Vec::new();
        for v in vectors {
            let mut w = DVector::from_column_slice(v);
            for e in &basis {
                let overlap = e.dotc(&w);
                w -= e * overlap;
            }
            let norm = w.norm();
            if norm > 1e-10 * DVector::from_column_slice(v).norm() {
                basis.push(w.unscale(norm));
            }
        }
        if basis.is_empty() {
            return Err(Error::Input("span of zero vectors".into()));
        }
        let p = basis.iter().fold(CMatrix::zeros(n, n), |acc, e| acc + e * e.adjoint());
        Ok(Self { p: hermitize(p) })
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self {
            p: CMatrix::identity(n, n) - &self.p,
        }
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.p
    }

    pub fn rank(&self) -> usize {
        self.p.trace().re.round() as usize
    }
}

/// Hermitian generator with a cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    eigen: SymmetricEigen<Complex64, nalgebra::Dyn>,
}

impl Hamiltonian {
    pub fn new(h: CMatrix) -> Result<Self> {
        require_square(&h, "Hamiltonian")?;
        let defect = hermiticity_defect(&h);
        if defect > MATRIX_TOLERANCE * max_abs(&h).max(1.0) {
            return Err(Error::Input(format!("Hamiltonian not Hermitian (defect {defect:.3e})")));
        }
        Ok(Self {
            eigen: SymmetricEigen::new(hermitize(h)),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigen.eigenvalues.len()
    }

    /// `exp(-iHt)`, defined for every real `t`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let phases = self.eigen.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * t));
        let v = &self.eigen.eigenvectors;
        v * CMatrix::from_diagonal(&phases) * v.adjoint()
    }
}

/// `e^{-iHt} rho e^{iHt}` for any real `t`.
pub fn unitary_evolve(rho: &DensityMatrix, h: &Hamiltonian, t: f64) -> Result<DensityMatrix> {
    require_dimension(rho.dim(), h.dim(), "Hamiltonian")?;
    if !t.is_finite() {
        return Err(Error::Input(format!("time must be finite, got {t}")));
    }
    let u = h.propagator(t);
    Ok(DensityMatrix::from_trusted(&u * &rho.rho * u.adjoint()))
}

fn check_family(n: usize, family: &[Projector]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::Input("empty projector family".into()));
    }
    for p in family {
        require_dimension(n, p.dim(), "projector")?;
    }
    let sum = family.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + &p.p);
    let gap = max_abs(&(sum - CMatrix::identity(n, n)));
    if gap > MATRIX_TOLERANCE {
        return Err(Error::Input(format!("projector family incomplete (defect {gap:.3e})")));
    }
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let overlap = max_abs(&(&a.p * &b.p));
            if overlap > MATRIX_TOLERANCE {
                return Err(Error::Input(format!("projectors not orthogonal (overlap {overlap:.3e})")));
            }
        }
    }
    Ok(())
}

/// `sum_i P_i rho P_i` over a complete orthogonal family.
pub fn collapse_nonselective(rho: &DensityMatrix, family: &[Projector]) -> Result<DensityMatrix> {
    check_family(rho.dim(), family)?;
    let n = rho.dim();
    let out = family
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, p| acc + &p.p * &rho.rho * &p.p);
    Ok(DensityMatrix::from_trusted(out))
}

/// `(P rho P / p, p)` with `p = Tr(P rho)`.
pub fn collapse_selective(rho: &DensityMatrix, p: &Projector) -> Result<(DensityMatrix, f64)> {
    require_dimension(rho.dim(), p.dim(), "projector")?;
    let branch = &p.p * &rho.rho * &p.p;
    let prob = branch.trace().re;
    if prob <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbability);
    }
    Ok((DensityMatrix::from_trusted(branch.unscale(prob)), prob))
}

/// `-Tr(rho ln rho)` with eigenvalues below [`ENTROPY_CLIP`] dropped.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > ENTROPY_CLIP)
        .map(|l| -l * l.ln())
        .sum()
}

/// One registration: projector and absolute time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub projector: Projector,
    pub time: f64,
}

/// Sequence of registrations. Ordering is enforced when probabilities are
/// computed, so that the policy for violations stays with the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub steps: Vec<Step>,
}

impl History {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Projector, f64)>) -> Self {
        Self::new(
            pairs
                .into_iter()
                .map(|(projector, time)| Step { projector, time })
                .collect(),
        )
    }

    /// Ok when `0 < t_a < t_b < ...`.
    pub fn check_order(&self) -> Result<()> {
        let mut last = 0.0;
        for (k, step) in self.steps.iter().enumerate() {
            if step.time.is_nan() || step.time <= last {
                let what = if k == 0 { "preparation t0 = 0".to_string() } else { format!("t = {last}") };
                return Err(Error::ArrowOfTime(format!(
                    "step {k} at t = {} does not follow {what}",
                    step.time
                )));
            }
            last = step.time;
        }
        Ok(())
    }
}

/// What to do with histories that violate time ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrowPolicy {
    /// Return an arrow-of-time error.
    #[default]
    Reject,
    /// Assign probability zero.
    ZeroProbability,
}

/// `Tr(P_c(t_c)...P_a(t_a) rho P_a(t_a)...P_c(t_c))` with Heisenberg
/// projectors `P(t) = e^{iHt} P e^{-iHt}`.
pub fn history_probability(rho: &DensityMatrix, h: &Hamiltonian, history: &History) -> Result<f64> {
    history_probability_with(rho, h, history, ArrowPolicy::Reject)
}

pub fn history_probability_with(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    history: &History,
    policy: ArrowPolicy,
) -> Result<f64> {
    require_dimension(rho.dim(), h.dim(), "Hamiltonian")?;
    for step in &history.steps {
        require_dimension(rho.dim(), step.projector.dim(), "projector")?;
    }
    if let Err(e) = history.check_order() {
        return match policy {
            ArrowPolicy::Reject => Err(e),
            ArrowPolicy::ZeroProbability => Ok(0.0),
        };
    }
    let mut w = rho.rho.clone();
    for step in &history.steps {
        let u = h.propagator(step.time);
        let p = u.adjoint() * &step.projector.p * &u;
        w = &p * w * &p;
    }
    Ok(w.trace().re)
}

/// `Tr(P w(t))` for the truncated two-level state with components
/// `b_i e^{-i z_i t}`.
pub fn effective_two_level_probability(
    b: [Complex64; 2],
    z: [Complex64; 2],
    p: &Projector,
    t: f64,
) -> Result<f64> {
    require_forward_time(t)?;
    require_dimension(2, p.dim(), "projector")?;
    if let Some(bad) = z.iter().find(|z| !(z.im <= 0.0) || !z.re.is_finite()) {
        return Err(Error::Configuration(format!("eigenvalue {bad} must lie in the closed lower half-plane")));
    }
    let psi = DVector::from_iterator(2, b.iter().zip(&z).map(|(b, z)| b * (Complex64::new(0.0, -1.0) * z * t).exp()));
    Ok((psi.adjoint() * &p.p * &psi)[(0, 0)].re)
}
