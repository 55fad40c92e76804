//! Complex basis-vector expansion of the S-matrix pairing.
//!
//! For an out-state `psi` (upper-half-plane class) and a prepared in-state
//! `phi` (lower-half-plane class) the physical pairing is
//!
//! ```text
//! D(t) = int_0^inf conj(psi(E)) S(E) e^{-iEt} phi(E) dE
//!      = int_0^inf G(k) dk,   G(k) = psi'(k^2) S(k) e^{-ik^2 t} phi(k^2) 2k,
//! ```
//!
//! with `psi'(z) = conj(psi(conj z))`. Deforming the positive real k-axis onto
//! the negative imaginary axis crosses only the resonance poles k_i, so
//!
//! ```text
//! D(t) = sum_i b_i e^{-i z_i t} + bg(t),   b_i = -2 pi i Res_{k_i} G|_{t=0},
//! bg(t) = -2 int_0^inf u psi'(-u^2) S(-iu) phi(-u^2) e^{iu^2 t} du.
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy_surface::{ResonancePole, SMatrixModel};
use crate::error::{require_forward_time, Error, Result};
use crate::gamow::{GamowKet, PairingMethod};
use crate::hardy::{paley_wiener_check, HardyClass, PaleyWienerGrid, WaveFunction, PW_PASS_THRESHOLD};
use crate::quadrature::contour::{Circle, DEFAULT_CIRCLE_NODES};
use crate::quadrature::{gauss_kronrod, oscillatory, tanh_sinh, Estimate, Tolerance};

/// Tolerance used for the direct and background integrals.
pub const EXPANSION_TOLERANCE: Tolerance = Tolerance::new(1e-14, 1e-11);

// Beyond this many oscillations of e^{iu^2 t} across the finite part of the
// ray, the background switches to the rotated variable.
const RAY_MAX_PHASE: f64 = 200.0 * PI;

/// An admissible prepared in-state: a lower-half-plane wave function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedState {
    phi_plus: WaveFunction,
}

impl PreparedState {
    pub fn new(phi_plus: WaveFunction) -> Result<Self> {
        if phi_plus.class() != HardyClass::LowerHalfPlane {
            return Err(Error::HardyClass(format!(
                "prepared states must be {} functions, got {}",
                HardyClass::LowerHalfPlane.symbol(),
                phi_plus.class().symbol()
            )));
        }
        Ok(Self { phi_plus })
    }

    /// Constructs the state and confirms its Fourier support numerically.
    pub fn verified(phi_plus: WaveFunction, grid: PaleyWienerGrid) -> Result<Self> {
        let state = Self::new(phi_plus)?;
        let leakage = paley_wiener_check(&state.phi_plus, grid)?;
        if leakage >= PW_PASS_THRESHOLD {
            return Err(Error::HardyClass(format!(
                "prepared state leaks {leakage:e} of its Fourier mass to tau > 0"
            )));
        }
        Ok(state)
    }

    pub fn wave_function(&self) -> &WaveFunction {
        &self.phi_plus
    }
}

/// Riemann integral `int_0^inf conj(psi(E)) phi(E) dE`.
pub fn dirac_pairing(psi_minus: &WaveFunction, phi: &WaveFunction) -> Result<Complex64> {
    let (Some(a), Some(b)) = (psi_minus.decay_order(), phi.decay_order()) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    if a + b < 2 {
        return Err(Error::Integrability(format!(
            "pairing integrand decays like E^-{}",
            a + b
        )));
    }
    let mut cuts = psi_minus.breakpoints();
    cuts.extend(phi.breakpoints());
    let cut = 4.0
        * psi_minus
            .poles()
            .iter()
            .chain(phi.poles().iter())
            .map(|p| p.norm())
            .fold(1.0, f64::max);
    let f = |e: f64| psi_minus.at(e).conj() * phi.at(e);
    let finite = gauss_kronrod::integrate(f, 0.0, cut, &cuts, EXPANSION_TOLERANCE)?;
    let tail = gauss_kronrod::integrate_to_infinity(f, cut, EXPANSION_TOLERANCE)?;
    Ok((finite + tail).value)
}

/// `psi'(E) S(k) phi(E)` with `E = k^2`, shared by the direct, residue and
/// background integrals.
#[derive(Debug, Clone, PartialEq)]
struct Integrand {
    psi_dagger: WaveFunction,
    phi: WaveFunction,
    model: SMatrixModel,
}

impl Integrand {
    fn new(psi_minus: &WaveFunction, state: &PreparedState, model: &SMatrixModel) -> Result<Self> {
        if psi_minus.class() != HardyClass::UpperHalfPlane {
            return Err(Error::HardyClass(format!(
                "out-states must be {} functions, got {}",
                HardyClass::UpperHalfPlane.symbol(),
                psi_minus.class().symbol()
            )));
        }
        let degree = psi_minus.decay_order().unwrap_or(u32::MAX / 2)
            + state.phi_plus.decay_order().unwrap_or(u32::MAX / 2);
        if degree < 2 {
            return Err(Error::Integrability(format!(
                "pairing integrand decays like E^-{degree}"
            )));
        }
        Ok(Self {
            psi_dagger: psi_minus.conjugate_continuation(),
            phi: state.phi_plus.clone(),
            model: model.clone(),
        })
    }

    fn at(&self, k: Complex64) -> Complex64 {
        let e = k * k;
        self.psi_dagger.eval_unchecked(e) * self.model.eval_unchecked(k) * self.phi.eval_unchecked(e)
    }

    /// k-plane singularities of the wave-function factors: both roots of each pole.
    fn wave_singularities(&self) -> Vec<Complex64> {
        self.psi_dagger
            .poles()
            .into_iter()
            .chain(self.phi.poles())
            .flat_map(|p| {
                let r = p.sqrt();
                [r, -r]
            })
            .collect()
    }

    /// Momentum scale beyond which the integrand is a smooth power-law tail.
    fn scale(&self) -> f64 {
        let model = self
            .model
            .singularities()
            .into_iter()
            .map(|s| s.position.norm());
        self.wave_singularities()
            .into_iter()
            .map(|k| k.norm())
            .chain(model)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE)
    }

    /// Real momenta where the integrand along the physical axis has structure.
    fn real_breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut push = |k: Complex64| {
            for x in [k.re - k.im.abs(), k.re, k.re + k.im.abs()] {
                if x > 0.0 {
                    out.push(x);
                }
            }
        };
        for &k in self.model.pole_momenta() {
            push(k);
        }
        for k in self.wave_singularities() {
            push(k);
        }
        out
    }

    /// Radii on the imaginary axis where the background integrand has structure.
    fn ray_breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .model
            .singularities()
            .into_iter()
            .map(|s| s.position.norm())
            .collect();
        out.extend(self.wave_singularities().into_iter().map(|k| k.norm()));
        out
    }

    /// `D(t)` along the physical axis.
    fn direct(&self, t: f64, tol: Tolerance) -> Result<Estimate> {
        let cut = 2.0 * self.scale();
        let cuts = self.real_breakpoints();
        let g = |k: f64| {
            let kc = Complex64::new(k, 0.0);
            self.at(kc) * (2.0 * k) * Complex64::from_polar(1.0, -k * k * t)
        };
        let finite = gauss_kronrod::integrate(g, 0.0, cut, &cuts, tol)?;
        let tail = if t == 0.0 {
            gauss_kronrod::integrate_to_infinity(g, cut, tol)?
        } else {
            let h = |e: f64| self.at(Complex64::new(e.sqrt(), 0.0));
            oscillatory::fourier_tail(h, cut * cut, -t, tol)?
        };
        Ok(finite + tail)
    }

    /// `bg(t)` along the negative imaginary k-axis, oscillatory quadrature.
    fn background_on_ray(&self, t: f64, tol: Tolerance) -> Result<Estimate> {
        let cut = 2.0 * self.scale();
        let cuts = self.ray_breakpoints();
        let g = |u: f64| {
            let k = Complex64::new(0.0, -u);
            self.at(k) * (-2.0 * u) * Complex64::from_polar(1.0, u * u * t)
        };
        let finite = gauss_kronrod::integrate(g, 0.0, cut, &cuts, tol)?;
        let tail = if t == 0.0 {
            gauss_kronrod::integrate_to_infinity(g, cut, tol)?
        } else {
            let h = |v: f64| -self.at(Complex64::new(0.0, -v.sqrt()));
            oscillatory::fourier_tail(h, cut * cut, t, tol)?
        };
        Ok(finite + tail)
    }

    /// `bg(t)` with the energy variable `v = u^2` rotated to `v = i s`, which
    /// turns `e^{ivt}` into `e^{-st}`. The rotation sweeps the k-sector
    /// between arg k = -pi/2 and -pi/4, which holds no singularity.
    fn background_rotated(&self, t: f64, tol: Tolerance) -> Result<Estimate> {
        let rotation = Complex64::from_polar(1.0, -PI / 4.0);
        let h = |s: f64| {
            let k = rotation * s.sqrt();
            self.at(k) * (-(-s * t).exp())
        };
        let scale = self.scale();
        let est = tanh_sinh::integrate_half_line(h, 0.0, scale * scale, tol)?;
        Ok(est.scale(Complex64::new(0.0, 1.0)))
    }

    fn background(&self, t: f64, method: BackgroundMethod, tol: Tolerance) -> Result<Estimate> {
        match method {
            BackgroundMethod::Ray => self.background_on_ray(t, tol),
            BackgroundMethod::Rotated => self.background_rotated(t, tol),
            BackgroundMethod::Auto => {
                let cut = 2.0 * self.scale();
                if t * cut * cut <= RAY_MAX_PHASE {
                    self.background_on_ray(t, tol)
                } else {
                    self.background_rotated(t, tol)
                }
            }
        }
    }
}

/// How the background integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundMethod {
    /// Along the negative imaginary k-axis with oscillatory tail extrapolation.
    Ray,
    /// After rotating the energy variable so the time factor decays.
    Rotated,
    /// Ray at moderate phase, rotated once the ray integrand oscillates heavily.
    #[default]
    Auto,
}

/// `-2 pi i` times the residue of the pairing integrand at one resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleContribution {
    pub pole: ResonancePole,
    #[serde(with = "crate::serde_complex")]
    pub momentum: Complex64,
    /// Radius of the residue circle in the k-plane.
    pub radius: f64,
    /// Residue of `psi' S phi` at `z_R` in the energy plane.
    #[serde(with = "crate::serde_complex")]
    pub residue: Complex64,
    /// `b_i`, the coefficient of `e^{-i z_R t}` in the pairing.
    #[serde(with = "crate::serde_complex")]
    pub b: Complex64,
    /// `b_i` divided by the Gamow pairing `<psi|psi^G_i>`: the component of
    /// the state along the Gamow ket, independent of `psi`. Absent when that
    /// pairing vanishes.
    #[serde(skip_serializing_if = "Option::is_none", with = "optional_complex")]
    pub gamow_coefficient: Option<Complex64>,
}

mod optional_complex {
    use num_complex::Complex64;
    use serde::{Serialize, Serializer};

    use crate::serde_complex::ComplexRepr;

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(ComplexRepr::from).serialize(s)
    }
}

/// Quadrature descriptor of the background contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BackgroundContour {
    /// Momentum radius splitting the finite part of the ray from its tail.
    pub cut: f64,
    pub method: BackgroundMethod,
    pub abs_tolerance: f64,
    pub rel_tolerance: f64,
}

/// Pole terms plus the background integral of one (psi, phi, S) triple.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexExpansion {
    pole_terms: Vec<PoleContribution>,
    background: BackgroundContour,
    integrand: Integrand,
}

/// Expansion with residue circles of default radius.
pub fn expand(state: &PreparedState, model: &SMatrixModel, psi_minus: &WaveFunction) -> Result<ComplexExpansion> {
    expand_with(state, model, psi_minus, None, BackgroundMethod::Auto)
}

/// Expansion with an explicit residue-circle radius (the same for every pole)
/// and background method.
pub fn expand_with(
    state: &PreparedState,
    model: &SMatrixModel,
    psi_minus: &WaveFunction,
    radius: Option<f64>,
    method: BackgroundMethod,
) -> Result<ComplexExpansion> {
    let integrand = Integrand::new(psi_minus, state, model)?;
    let mut others: Vec<Complex64> = model.singularities().iter().map(|s| s.position).collect();
    others.extend(integrand.wave_singularities());

    let mut pole_terms = Vec::with_capacity(model.poles().len());
    for (pole, &k) in model.poles().iter().zip(model.pole_momenta()) {
        let nearest = others
            .iter()
            .filter(|&&q| q != k)
            .map(|q| (q - k).norm())
            .fold(f64::INFINITY, f64::min);
        let r = match radius {
            None => 0.25 * nearest,
            Some(r) if !(r > 0.0 && r.is_finite()) => {
                return Err(Error::Input(format!("residue radius must be positive, got {r}")))
            }
            Some(r) if r >= nearest => {
                return Err(Error::Geometry(format!(
                    "residue circle of radius {r} around {k} reaches a singularity at distance {nearest}"
                )))
            }
            Some(r) => r,
        };
        let circle = Circle::new(k, r);
        let residue = circle.residue_sum(|q| integrand.at(q) * (2.0 * q), DEFAULT_CIRCLE_NODES);
        let b = Complex64::new(0.0, -2.0 * PI) * residue;
        let gamow = GamowKet::new(*pole)?.pairing(psi_minus, PairingMethod::Cauchy)?;
        let gamow_coefficient = (gamow.norm() > 0.0).then(|| b / gamow);
        pole_terms.push(PoleContribution {
            pole: *pole,
            momentum: k,
            radius: r,
            residue,
            b,
            gamow_coefficient,
        });
    }

    let background = BackgroundContour {
        cut: 2.0 * integrand.scale(),
        method,
        abs_tolerance: EXPANSION_TOLERANCE.abs,
        rel_tolerance: EXPANSION_TOLERANCE.rel,
    };
    Ok(ComplexExpansion {
        pole_terms,
        background,
        integrand,
    })
}

/// Pre-deformation integral `D(t)` along physical energies.
pub fn smatrix_pairing_direct(
    psi_minus: &WaveFunction,
    state: &PreparedState,
    model: &SMatrixModel,
    t: f64,
) -> Result<Estimate> {
    require_forward_time(t)?;
    Integrand::new(psi_minus, state, model)?.direct(t, EXPANSION_TOLERANCE)
}

/// Outcome of comparing the full expansion with its pole part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationError {
    pub value: f64,
    /// False when the full pairing vanishes and `value` is an absolute error.
    pub relative: bool,
    /// True when the model has no poles, so the truncation discards everything.
    pub pure_background: bool,
}

impl ComplexExpansion {
    pub fn pole_terms(&self) -> &[PoleContribution] {
        &self.pole_terms
    }

    pub fn background_contour(&self) -> BackgroundContour {
        self.background
    }

    pub fn model(&self) -> &SMatrixModel {
        &self.integrand.model
    }

    /// `sum_i b_i e^{-i z_i t}`.
    pub fn pole_sum(&self, t: f64) -> Result<Complex64> {
        require_forward_time(t)?;
        Ok(self
            .pole_terms
            .iter()
            .map(|p| p.b * (Complex64::new(0.0, -1.0) * p.pole.complex_energy() * t).exp())
            .sum())
    }

    pub fn background_integral(&self, t: f64) -> Result<Estimate> {
        require_forward_time(t)?;
        self.integrand.background(t, self.background.method, EXPANSION_TOLERANCE)
    }

    /// Background evaluated by a specific method, for cross-checks.
    pub fn background_integral_with(&self, t: f64, method: BackgroundMethod) -> Result<Estimate> {
        require_forward_time(t)?;
        self.integrand.background(t, method, EXPANSION_TOLERANCE)
    }

    /// Pole sum plus background at time `t`.
    pub fn reconstruct(&self, t: f64) -> Result<Complex64> {
        Ok(self.pole_sum(t)? + self.background_integral(t)?.value)
    }

    /// Direct quadrature of the same pairing, for comparison.
    pub fn direct(&self, t: f64) -> Result<Estimate> {
        require_forward_time(t)?;
        self.integrand.direct(t, EXPANSION_TOLERANCE)
    }

    /// Background values at ascending non-negative times.
    pub fn background_samples(&self, times: &[f64]) -> Result<Vec<(f64, Complex64)>> {
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Input("sample times must be ascending".into()));
        }
        times
            .iter()
            .map(|&t| Ok((t, self.background_integral(t)?.value)))
            .collect()
    }

    /// `(t, |bg(t)|)` at ascending non-negative times.
    pub fn background_decay_profile(&self, times: &[f64]) -> Result<Vec<(f64, f64)>> {
        Ok(self
            .background_samples(times)?
            .into_iter()
            .map(|(t, v)| (t, v.norm()))
            .collect())
    }

    /// Relative size of the background in the full pairing at time `t`.
    pub fn truncation_error(&self, t: f64) -> Result<TruncationError> {
        let poles = self.pole_sum(t)?;
        let full = poles + self.background_integral(t)?.value;
        let diff = (full - poles).norm();
        let pure_background = self.pole_terms.is_empty();
        if full.norm() <= f64::EPSILON * (poles.norm() + diff) || full.norm() == 0.0 {
            return Ok(TruncationError {
                value: diff,
                relative: false,
                pure_background,
            });
        }
        Ok(TruncationError {
            value: diff / full.norm(),
            relative: true,
            pure_background,
        })
    }

    /// Serializable summary with background samples at `times`.
    pub fn report(&self, times: &[f64]) -> Result<ExpansionReport> {
        let samples = self
            .background_samples(times)?
            .into_iter()
            .map(|(t, v)| BackgroundSample { t, re: v.re, im: v.im })
            .collect();
        Ok(ExpansionReport {
            pole_terms: self.pole_terms.clone(),
            background: self.background,
            background_samples: samples,
        })
    }
}

/// One-shot truncation error for a (state, model, psi) triple.
pub fn truncation_error(
    state: &PreparedState,
    model: &SMatrixModel,
    psi_minus: &WaveFunction,
    t: f64,
) -> Result<TruncationError> {
    require_forward_time(t)?;
    expand(state, model, psi_minus)?.truncation_error(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BackgroundSample {
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub pole_terms: Vec<PoleContribution>,
    pub background: BackgroundContour,
    pub background_samples: Vec<BackgroundSample>,
}

/// CSV with columns `t,re,im,abs`.
pub fn profile_csv(samples: &[(f64, Complex64)]) -> String {
    let mut out = String::from("t,re,im,abs\n");
    for (t, v) in samples {
        let _ = writeln!(out, "{t},{},{},{}", v.re, v.im, v.norm());
    }
    out
}

/// Diagonal truncation of the Hamiltonian to the resonance subspace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveHamiltonianMatrix {
    #[serde(with = "crate::serde_complex::vec")]
    diagonal: Vec<Complex64>,
    /// The block discarded by the truncation.
    continuum: String,
}

impl EffectiveHamiltonianMatrix {
    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    pub fn continuum(&self) -> &str {
        &self.continuum
    }

    /// Dense row-major form; off-diagonal entries are exactly zero.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.diagonal.len();
        (0..n)
            .map(|i| {
                let mut row = vec![Complex64::new(0.0, 0.0); n];
                row[i] = self.diagonal[i];
                row
            })
            .collect()
    }
}

pub fn effective_matrix(model: &SMatrixModel) -> Result<EffectiveHamiltonianMatrix> {
    if model.poles().is_empty() {
        return Err(Error::Configuration(
            "model has no resonance poles; the effective matrix would be empty".into(),
        ));
    }
    Ok(EffectiveHamiltonianMatrix {
        diagonal: model.poles_of(),
        continuum: "background integral along the negative imaginary k-axis (omitted)".into(),
    })
}

/// Component-wise `c_i e^{-i z_i t}`; components never mix.
pub fn truncated_evolve(
    coeffs: &[Complex64],
    matrix: &EffectiveHamiltonianMatrix,
    t: f64,
) -> Result<Vec<Complex64>> {
    require_forward_time(t)?;
    if coeffs.len() != matrix.dimension() {
        return Err(Error::Input(format!(
            "{} coefficients for a {}-dimensional matrix",
            coeffs.len(),
            matrix.dimension()
        )));
    }
    Ok(coeffs
        .iter()
        .zip(&matrix.diagonal)
        .map(|(&c, &z)| {
            if c == Complex64::new(0.0, 0.0) {
                c
            } else {
                c * Complex64::from_polar((z.im * t).exp(), -z.re * t)
            }
        })
        .collect())
}
