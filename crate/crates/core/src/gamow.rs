//! Gamow kets: the Breit-Wigner amplitude of a resonance, its pairing with
//! admissible out-states, and forward-only semigroup evolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy_surface::ResonancePole;
use crate::error::{require_forward_time, Error, Result};
use crate::hardy::{HardyClass, WaveFunction};
use crate::quadrature::{gauss_kronrod, Tolerance};

/// Default tolerance for full-line pairings.
pub const PAIRING_TOLERANCE: Tolerance = Tolerance::new(1e-14, 1e-12);

/// Decaying Gamow ket of eigenvalue `z_R = E_R - i Gamma/2`, normalized by
/// `sqrt(2 pi Gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GamowKet {
    pole: ResonancePole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingMethod {
    /// Adaptive quadrature over the whole real line.
    Quadrature,
    /// Residue at the mirror pole `z_R*` after closing in the lower half-plane.
    Cauchy,
}

/// Outcome of testing `<psi|H|z_R> = z_R <psi|z_R>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPairing {
    pub residual: f64,
    /// `<psi|H|z_R> / <psi|z_R>`.
    pub eigenvalue: Complex64,
}

impl GamowKet {
    pub fn new(pole: ResonancePole) -> Result<Self> {
        pole.validate()?;
        Ok(Self { pole })
    }

    pub fn from_parameters(energy: f64, width: f64) -> Result<Self> {
        Self::new(ResonancePole::new(energy, width)?)
    }

    pub fn pole(&self) -> ResonancePole {
        self.pole
    }

    pub fn eigenvalue(&self) -> Complex64 {
        self.pole.complex_energy()
    }

    pub fn normalization(&self) -> f64 {
        (2.0 * PI * self.pole.width).sqrt()
    }

    fn prefactor(&self) -> Complex64 {
        Complex64::new(0.0, (self.pole.width / (2.0 * PI)).sqrt())
    }

    /// `i sqrt(Gamma / 2 pi) / (E - z_R)`, defined on the whole real line.
    pub fn bw_amplitude(&self, energy: f64) -> Complex64 {
        self.prefactor() / (Complex64::new(energy, 0.0) - self.eigenvalue())
    }

    /// `|bw_amplitude|^2`, the Breit-Wigner energy distribution.
    pub fn bw_density(&self, energy: f64) -> f64 {
        let g = self.pole.width;
        let d = energy - self.pole.energy;
        g / (2.0 * PI) / (d * d + 0.25 * g * g)
    }

    /// Evolution coefficient `e^{-i z_R t}` for `t >= 0`.
    pub fn evolve(&self, t: f64) -> Result<Complex64> {
        require_forward_time(t)?;
        Ok(decay_factor(self.eigenvalue(), t))
    }

    /// The exponentially growing partner of eigenvalue `z_R*`.
    pub fn growing_mirror(&self) -> GrowingGamowKet {
        GrowingGamowKet { pole: self.pole }
    }

    /// `int conj(psi(E)) bw(E) dE` over the real line; `psi` must be an
    /// upper-half-plane function.
    pub fn pairing(&self, psi_minus: &WaveFunction, method: PairingMethod) -> Result<Complex64> {
        require_upper(psi_minus)?;
        match method {
            PairingMethod::Cauchy => {
                let at_mirror = psi_minus.evaluate(self.pole.mirror_energy())?;
                Ok(at_mirror.conj() * (2.0 * PI * (self.pole.width / (2.0 * PI)).sqrt()))
            }
            PairingMethod::Quadrature => {
                if psi_minus.terms().is_empty() {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let est = gauss_kronrod::integrate_real_line(
                    |e| psi_minus.at(e).conj() * self.bw_amplitude(e),
                    &self.breakpoints(psi_minus),
                    PAIRING_TOLERANCE,
                )?;
                Ok(est.value)
            }
        }
    }

    /// Generalized eigenvalue test of `H` against one out-state.
    ///
    /// With `E / (E - z_R) = 1 + z_R / (E - z_R)` the energy-weighted pairing
    /// is `i sqrt(Gamma/2 pi) int conj(psi) dE + z_R <psi|z_R>`; the residual
    /// is the relative size of the first term.
    pub fn eigen_pairing_check(&self, psi_minus: &WaveFunction) -> Result<EigenPairing> {
        require_upper(psi_minus)?;
        match psi_minus.decay_order() {
            None => return Err(Error::Input("eigenvalue test needs a nonzero out-state".into())),
            Some(1) => {
                return Err(Error::Integrability(
                    "out-state decays like 1/E; its moment does not converge".into(),
                ))
            }
            Some(_) => {}
        }
        let pairing = self.pairing(psi_minus, PairingMethod::Quadrature)?;
        let moment = gauss_kronrod::integrate_real_line(
            |e| psi_minus.at(e).conj(),
            &psi_minus.breakpoints(),
            PAIRING_TOLERANCE,
        )?
        .value;
        let z = self.eigenvalue();
        let extra = self.prefactor() * moment;
        let weighted = extra + z * pairing;
        Ok(EigenPairing {
            residual: extra.norm() / (z * pairing).norm(),
            eigenvalue: weighted / pairing,
        })
    }

    fn breakpoints(&self, psi: &WaveFunction) -> Vec<f64> {
        let mut cuts = psi.breakpoints();
        let (e, g) = (self.pole.energy, self.pole.width);
        cuts.extend([e - g, e, e + g]);
        cuts
    }
}

/// Growing Gamow ket of eigenvalue `z_R*`, evolving only for `t <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GrowingGamowKet {
    pole: ResonancePole,
}

impl GrowingGamowKet {
    pub fn eigenvalue(&self) -> Complex64 {
        self.pole.mirror_energy()
    }

    /// `-i sqrt(Gamma / 2 pi) / (E - z_R*)`, the conjugate of the decaying amplitude.
    pub fn bw_amplitude(&self, energy: f64) -> Complex64 {
        GamowKet { pole: self.pole }.bw_amplitude(energy).conj()
    }

    /// Evolution coefficient `e^{-i z_R* t}` for `t <= 0`.
    pub fn evolve(&self, t: f64) -> Result<Complex64> {
        if t.is_nan() || t > 0.0 {
            return Err(Error::SemigroupDomain(t));
        }
        Ok(decay_factor(self.eigenvalue(), t))
    }
}

fn decay_factor(z: Complex64, t: f64) -> Complex64 {
    // e^{-i z t} = e^{Im z t} e^{-i Re z t}
    Complex64::from_polar((z.im * t).exp(), -z.re * t)
}

fn require_upper(psi: &WaveFunction) -> Result<()> {
    if psi.class() != HardyClass::UpperHalfPlane {
        return Err(Error::HardyClass(format!(
            "out-states must be {} functions, got {}",
            HardyClass::UpperHalfPlane.symbol(),
            psi.class().symbol()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::PoleTerm;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket() -> GamowKet {
        GamowKet::from_parameters(1.0, 0.2).unwrap()
    }

    #[test]
    fn peak_and_half_width() {
        let k = ket();
        let peak = k.bw_amplitude(1.0).norm_sqr();
        assert_relative_eq!(peak, 2.0 / (PI * 0.2), max_relative = 1e-14);
        assert_relative_eq!(peak, 3.18310, epsilon = 1e-5);
        assert_relative_eq!(k.bw_amplitude(1.1).norm_sqr(), 0.5 * peak, max_relative = 1e-13);
        assert_relative_eq!(k.bw_amplitude(0.9).norm_sqr(), 0.5 * peak, max_relative = 1e-13);
        assert_relative_eq!(k.bw_density(1.3), k.bw_amplitude(1.3).norm_sqr(), max_relative = 1e-14);
    }

    #[test]
    fn amplitude_is_normalized() {
        let k = ket();
        let est = gauss_kronrod::integrate(
            |e| c(k.bw_amplitude(e).norm_sqr(), 0.0),
            -50.0,
            50.0,
            &[0.8, 1.0, 1.2],
            Tolerance::new(1e-12, 1e-12),
        )
        .unwrap();
        // Exact mass outside [-50, 50] is (1/pi)(atan(0.1/51) + atan(0.1/49)).
        let outside = ((0.1f64 / 51.0).atan() + (0.1f64 / 49.0).atan()) / PI;
        assert_relative_eq!(est.value.re + outside, 1.0, epsilon = 1e-11);
        let full = gauss_kronrod::integrate_real_line(
            |e| c(k.bw_amplitude(e).norm_sqr(), 0.0),
            &[0.8, 1.0, 1.2],
            Tolerance::new(1e-12, 1e-12),
        )
        .unwrap();
        assert_relative_eq!(full.value.re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn evolution_values() {
        let k = ket();
        assert_eq!(k.evolve(0.0).unwrap(), c(1.0, 0.0));
        assert_relative_eq!(k.evolve(5.0).unwrap().norm_sqr(), (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(k.evolve(5.0).unwrap().norm_sqr(), 0.367879, epsilon = 1e-6);
        assert!(matches!(k.evolve(-1.0), Err(Error::SemigroupDomain(_))));
        assert!(k.evolve(f64::NAN).is_err());
    }

    #[test]
    fn growing_mirror_lives_on_negative_times() {
        let g = ket().growing_mirror();
        assert_eq!(g.eigenvalue(), c(1.0, 0.1));
        assert_relative_eq!(g.evolve(-5.0).unwrap().norm_sqr(), (-1.0f64).exp(), max_relative = 1e-14);
        assert!(matches!(g.evolve(1.0), Err(Error::SemigroupDomain(_))));
        assert_eq!(g.bw_amplitude(0.7), ket().bw_amplitude(0.7).conj());
    }

    #[test]
    fn pairing_methods_agree() {
        let psi = WaveFunction::single(c(1.0, 0.0), c(2.0, -1.0), 1).unwrap();
        let k = ket();
        let q = k.pairing(&psi, PairingMethod::Quadrature).unwrap();
        let r = k.pairing(&psi, PairingMethod::Cauchy).unwrap();
        assert!((q - r).norm() < 1e-8 * r.norm(), "{q} vs {r}");
    }

    #[test]
    fn pairing_is_antilinear_in_the_bra() {
        let psi = WaveFunction::single(c(0.3, 0.4), c(2.0, -1.0), 2).unwrap();
        let k = ket();
        let base = k.pairing(&psi, PairingMethod::Cauchy).unwrap();
        let scaled = k.pairing(&psi.scale(c(3.0, 0.0)), PairingMethod::Cauchy).unwrap();
        assert!((scaled - 3.0 * base).norm() < 1e-14);
        let rotated = k.pairing(&psi.scale(c(0.0, 1.0)), PairingMethod::Cauchy).unwrap();
        assert!((rotated - c(0.0, -1.0) * base).norm() < 1e-14);
        let zero = WaveFunction::zero(HardyClass::UpperHalfPlane);
        assert_eq!(k.pairing(&zero, PairingMethod::Quadrature).unwrap(), c(0.0, 0.0));
        assert_eq!(k.pairing(&zero, PairingMethod::Cauchy).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn pairing_rejects_wrong_class() {
        let phi = WaveFunction::single(c(1.0, 0.0), c(2.0, 1.0), 1).unwrap();
        assert!(matches!(
            ket().pairing(&phi, PairingMethod::Cauchy),
            Err(Error::HardyClass(_))
        ));
    }

    #[test]
    fn eigenvalue_recovered_from_independent_states() {
        let k = ket();
        let a = WaveFunction::single(c(1.0, 0.0), c(2.0, -1.0), 2).unwrap();
        let b = WaveFunction::new(
            vec![
                PoleTerm::new(c(1.0, 0.0), c(0.5, -0.3), 1),
                PoleTerm::new(c(-1.0, 0.0), c(3.0, -2.0), 1),
            ],
            HardyClass::UpperHalfPlane,
        )
        .unwrap();
        let ea = k.eigen_pairing_check(&a).unwrap();
        let eb = k.eigen_pairing_check(&b).unwrap();
        assert!(ea.residual < 1e-7, "{}", ea.residual);
        assert!(eb.residual < 1e-7, "{}", eb.residual);
        assert!((ea.eigenvalue - eb.eigenvalue).norm() < 1e-7);
        assert!((ea.eigenvalue.im + 0.1).abs() < 1e-7);
    }

    #[test]
    fn eigen_check_needs_integrable_moment() {
        let psi = WaveFunction::single(c(1.0, 0.0), c(2.0, -1.0), 1).unwrap();
        assert!(matches!(ket().eigen_pairing_check(&psi), Err(Error::Integrability(_))));
    }

    #[test]
    fn serializes_as_pole_parameters() {
        let text = serde_json::to_string(&ket()).unwrap();
        assert_eq!(text, r#"{"E_R":1.0,"Gamma":0.2}"#);
    }
}
