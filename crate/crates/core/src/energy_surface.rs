//! Two-sheeted energy surface and unitary pole-product S-matrices.
//!
//! The energy surface is uniformised by the momentum plane, E = k^2: the
//! upper half k-plane is the physical sheet I, the lower half is sheet II.
//! The fourth quadrant of the k-plane is the lower half of sheet II, where
//! resonance poles live; the negative imaginary k-axis is the negative real
//! energy axis of sheet II.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::contour::Circle;

pub const DEFAULT_PROXIMITY_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    #[serde(rename = "I")]
    Physical,
    #[serde(rename = "II")]
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPoint {
    pub k: Complex64,
}

impl MomentumPoint {
    pub fn new(k: Complex64) -> Self {
        Self { k }
    }

    pub fn energy(&self) -> Complex64 {
        self.k * self.k
    }

    /// Closed upper half-plane (including the real axis, where the physical
    /// scattering energies sit) is sheet I.
    pub fn sheet(&self) -> Sheet {
        if self.k.im >= 0.0 {
            Sheet::Physical
        } else {
            Sheet::Second
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySheetPoint {
    #[serde(with = "crate::serde_complex")]
    pub energy: Complex64,
    pub sheet: Sheet,
}

impl EnergySheetPoint {
    pub fn to_momentum(&self) -> Result<MomentumPoint> {
        energy_to_momentum(self.energy, self.sheet)
    }
}

/// Square root of `energy` on the requested sheet: Im k > 0 on sheet I,
/// Im k < 0 on sheet II. Real positive energies (the cut) map to k > 0.
pub fn energy_to_momentum(energy: Complex64, sheet: Sheet) -> Result<MomentumPoint> {
    if energy == Complex64::new(0.0, 0.0) && sheet == Sheet::Second {
        return Err(Error::Domain(
            "E = 0 is the branch point; sheet II is undefined there".into(),
        ));
    }
    let root = energy.sqrt();
    let k = match sheet {
        Sheet::Physical if root.im < 0.0 || (root.im == 0.0 && root.re < 0.0) => -root,
        Sheet::Second if root.im > 0.0 || (root.im == 0.0 && root.re < 0.0) => -root,
        _ => root,
    };
    Ok(MomentumPoint::new(k))
}

/// A resonance: the pole pair z_R = E_R - i Gamma/2 (sheet II, lower half)
/// and its mirror z_R*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonancePole {
    #[serde(rename = "E_R")]
    pub energy: f64,
    #[serde(rename = "Gamma")]
    pub width: f64,
}

impl ResonancePole {
    pub fn new(energy: f64, width: f64) -> Result<Self> {
        let pole = Self { energy, width };
        pole.validate()?;
        Ok(pole)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return Err(Error::Configuration(format!(
                "resonance energy must be positive, got {}",
                self.energy
            )));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::Configuration(format!(
                "resonance width must be positive, got {}",
                self.width
            )));
        }
        if self.width / (2.0 * self.energy) >= 1.0 {
            return Err(Error::Configuration(format!(
                "Gamma/(2 E_R) = {} must be below 1",
                self.width / (2.0 * self.energy)
            )));
        }
        Ok(())
    }

    /// z_R = E_R - i Gamma / 2.
    pub fn complex_energy(&self) -> Complex64 {
        Complex64::new(self.energy, -0.5 * self.width)
    }

    pub fn mirror_energy(&self) -> Complex64 {
        self.complex_energy().conj()
    }

    /// Fourth-quadrant momentum with k^2 = z_R.
    pub fn momentum(&self) -> Complex64 {
        // The principal root of a lower-half-plane number is in quadrant IV.
        self.complex_energy().sqrt()
    }
}

/// Smooth background phase factor exp(2 i delta_bg(k)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Background {
    #[default]
    None,
    /// Product of Blaschke factors (k - q*) / (k - q) with every q in the
    /// open third quadrant, so the factor is unimodular on real k and has no
    /// singularity in the fourth quadrant or on the negative imaginary axis.
    Rational {
        #[serde(with = "crate::serde_complex::vec")]
        poles: Vec<Complex64>,
    },
}

impl Background {
    fn validate(&self) -> Result<()> {
        if let Background::Rational { poles } = self {
            for q in poles {
                if !(q.re < 0.0 && q.im < 0.0) {
                    return Err(Error::Configuration(format!(
                        "background pole {q} must lie in the open third quadrant of the k-plane"
                    )));
                }
            }
        }
        Ok(())
    }

    fn factor(&self, k: Complex64) -> Complex64 {
        match self {
            Background::None => Complex64::new(1.0, 0.0),
            Background::Rational { poles } => {
                poles.iter().map(|q| (k - q.conj()) / (k - q)).product()
            }
        }
    }

    fn poles(&self) -> &[Complex64] {
        match self {
            Background::None => &[],
            Background::Rational { poles } => poles,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    /// k_i in the fourth quadrant (energy z_R on sheet II).
    Resonance(usize),
    /// -k_i* in the third quadrant (energy z_R* on sheet II).
    Mirror(usize),
    Background(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub position: Complex64,
    pub kind: SingularityKind,
}

/// Serializable model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub poles: Vec<ResonancePole>,
    #[serde(default)]
    pub background: Background,
}

/// S(k) = prod_i (k + k_i)(k - k_i*) / ((k - k_i)(k + k_i*)) * exp(2 i delta_bg(k)).
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrixModel {
    poles: Vec<ResonancePole>,
    momenta: Vec<Complex64>,
    background: Background,
    proximity_radius: f64,
}

impl SMatrixModel {
    pub fn identity() -> Self {
        Self {
            poles: Vec::new(),
            momenta: Vec::new(),
            background: Background::None,
            proximity_radius: DEFAULT_PROXIMITY_RADIUS,
        }
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        make_resonance_model(&spec.poles, spec.background.clone())
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            poles: self.poles.clone(),
            background: self.background.clone(),
        }
    }

    pub fn with_proximity_radius(mut self, radius: f64) -> Self {
        self.proximity_radius = radius;
        self
    }

    pub fn poles(&self) -> &[ResonancePole] {
        &self.poles
    }

    /// Fourth-quadrant pole momenta k_i, in constructor order.
    pub fn pole_momenta(&self) -> &[Complex64] {
        &self.momenta
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    pub fn proximity_radius(&self) -> f64 {
        self.proximity_radius
    }

    pub fn poles_of(&self) -> Vec<Complex64> {
        self.poles.iter().map(ResonancePole::complex_energy).collect()
    }

    /// Every k-plane singularity of S.
    pub fn singularities(&self) -> Vec<Singularity> {
        let mut out = Vec::with_capacity(2 * self.momenta.len() + self.background.poles().len());
        for (i, &k) in self.momenta.iter().enumerate() {
            out.push(Singularity {
                position: k,
                kind: SingularityKind::Resonance(i),
            });
        }
        for (i, &k) in self.momenta.iter().enumerate() {
            out.push(Singularity {
                position: -k.conj(),
                kind: SingularityKind::Mirror(i),
            });
        }
        for (j, &q) in self.background.poles().iter().enumerate() {
            out.push(Singularity {
                position: q,
                kind: SingularityKind::Background(j),
            });
        }
        out
    }

    /// S without the proximity guard; callers that evaluate on contours kept
    /// away from poles by construction use this directly.
    pub(crate) fn eval_unchecked(&self, k: Complex64) -> Complex64 {
        let mut s = self.background.factor(k);
        for &ki in &self.momenta {
            s *= (k + ki) * (k - ki.conj()) / ((k - ki) * (k + ki.conj()));
        }
        s
    }

    pub fn s_eval(&self, k: Complex64) -> Result<Complex64> {
        for (index, sing) in self.singularities().iter().enumerate() {
            if (k - sing.position).norm() <= self.proximity_radius {
                return Err(Error::PoleProximity {
                    index,
                    pole: sing.position,
                    k,
                    radius: self.proximity_radius,
                });
            }
        }
        Ok(self.eval_unchecked(k))
    }

    /// S on the physical energy axis, E >= 0 approached from above.
    pub fn s_at_energy(&self, energy: f64) -> Result<Complex64> {
        if energy < 0.0 {
            return Err(Error::Domain(format!(
                "physical energies are non-negative, got {energy}"
            )));
        }
        self.s_eval(Complex64::new(energy.sqrt(), 0.0))
    }

    /// Largest | |S(k)| - 1 | over the given real momenta.
    pub fn unitarity_check(&self, momenta: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &k in momenta {
            let s = self.s_eval(Complex64::new(k, 0.0))?;
            worst = worst.max((s.norm() - 1.0).abs());
        }
        Ok(worst)
    }

    /// Locates the single pole inside `circle` from contour integrals of S
    /// alone: k = (integral of k S) / (integral of S). Fails unless the
    /// winding number of S around the circle is -1 (one pole, no zero).
    pub fn locate_pole(&self, circle: Circle, nodes: usize) -> Result<Complex64> {
        let winding = circle.winding_number(|k| self.eval_unchecked(k), nodes);
        if winding != -1 {
            return Err(Error::Geometry(format!(
                "circle around {} encloses zeros minus poles = {winding}, expected -1",
                circle.center
            )));
        }
        let moment0 = circle.residue_sum(|k| self.eval_unchecked(k), nodes);
        let moment1 = circle.residue_sum(|k| k * self.eval_unchecked(k), nodes);
        Ok(moment1 / moment0)
    }
}

/// Builds a pole-product model with the requested (E_R, Gamma) resonances.
pub fn make_resonance_model(specs: &[ResonancePole], background: Background) -> Result<SMatrixModel> {
    for p in specs {
        p.validate()?;
    }
    background.validate()?;
    for (i, a) in specs.iter().enumerate() {
        for b in &specs[i + 1..] {
            let za = a.complex_energy();
            let zb = b.complex_energy();
            if (za - zb).norm() <= 1e-12 * za.norm() {
                return Err(Error::Configuration(format!("duplicate resonance pole at {za}")));
            }
        }
    }
    Ok(SMatrixModel {
        momenta: specs.iter().map(ResonancePole::momentum).collect(),
        poles: specs.to_vec(),
        background,
        proximity_radius: DEFAULT_PROXIMITY_RADIUS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn positive_energy_on_sheet_one() {
        let k = energy_to_momentum(c(4.0, 0.0), Sheet::Physical).unwrap();
        assert_eq!(k.k, c(2.0, 0.0));
    }

    #[test]
    fn negative_energy_on_sheet_two() {
        let k = energy_to_momentum(c(-1.0, 0.0), Sheet::Second).unwrap();
        assert!((k.k - c(0.0, -1.0)).norm() < 1e-15);
        let k1 = energy_to_momentum(c(-1.0, 0.0), Sheet::Physical).unwrap();
        assert!((k1.k - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn lower_half_energy_on_sheet_two_is_fourth_quadrant() {
        let e = c(1.0, -0.1);
        let k = energy_to_momentum(e, Sheet::Second).unwrap();
        assert!(k.k.im < 0.0 && k.k.re > 0.0);
        assert!((k.energy() - e).norm() < 1e-15);
        assert_eq!(k.sheet(), Sheet::Second);
    }

    #[test]
    fn branch_point_on_sheet_two_is_rejected() {
        assert!(matches!(
            energy_to_momentum(c(0.0, 0.0), Sheet::Second),
            Err(Error::Domain(_))
        ));
        assert_eq!(energy_to_momentum(c(0.0, 0.0), Sheet::Physical).unwrap().k, c(0.0, 0.0));
    }

    #[test]
    fn identity_model_is_one() {
        let m = make_resonance_model(&[], Background::None).unwrap();
        assert_eq!(m.s_eval(c(0.7, -3.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(m, SMatrixModel::identity());
    }

    #[test]
    fn single_pole_construction() {
        let m = make_resonance_model(&[ResonancePole::new(1.0, 0.2).unwrap()], Background::None)
            .unwrap();
        assert_eq!(m.poles_of(), vec![c(1.0, -0.1)]);
        let k = m.pole_momenta()[0];
        assert!(k.re > 0.0 && k.im < 0.0);
        assert!((k * k - c(1.0, -0.1)).norm() < 1e-15);
        let s = m.s_eval(c(1.3, 0.0)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pole_proximity_reports_pole() {
        let m = make_resonance_model(&[ResonancePole::new(1.0, 0.2).unwrap()], Background::None)
            .unwrap();
        let k = m.pole_momenta()[0];
        match m.s_eval(k + 1e-12) {
            Err(Error::PoleProximity { index, pole, .. }) => {
                assert_eq!(index, 0);
                assert_eq!(pole, k);
            }
            other => panic!("unexpected {other:?}"),
        }
        // Mirror pole -k* is index 1.
        match m.s_eval(-k.conj()) {
            Err(Error::PoleProximity { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ResonancePole::new(-1.0, 0.1).is_err());
        assert!(ResonancePole::new(1.0, 0.0).is_err());
        assert!(ResonancePole::new(1.0, 2.0).is_err());
        let p = ResonancePole::new(1.0, 0.2).unwrap();
        assert!(matches!(
            make_resonance_model(&[p, p], Background::None),
            Err(Error::Configuration(_))
        ));
        let bad_bg = Background::Rational {
            poles: vec![c(-1.0, 1.0)],
        };
        assert!(make_resonance_model(&[p], bad_bg).is_err());
    }

    #[test]
    fn model_spec_json_round_trip() {
        let json = r#"{"poles":[{"E_R":1.0,"Gamma":0.02},{"E_R":1.5,"Gamma":0.05}],
                       "background":{"type":"rational","poles":[{"re":-2.0,"im":-3.0}]}}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        let model = SMatrixModel::from_spec(&spec).unwrap();
        assert_eq!(model.poles().len(), 2);
        let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&model.spec()).unwrap())
            .unwrap();
        assert_eq!(back, spec);
        let none: ModelSpec = serde_json::from_str(r#"{"poles":[],"background":{"type":"none"}}"#)
            .unwrap();
        assert_eq!(none.background, Background::None);
    }

    #[test]
    fn background_is_unimodular_on_real_axis() {
        let m = make_resonance_model(
            &[ResonancePole::new(1.0, 0.2).unwrap()],
            Background::Rational {
                poles: vec![c(-1.0, -2.0), c(-0.5, -4.0)],
            },
        )
        .unwrap();
        let ks: Vec<f64> = (0..200).map(|i| 0.05 * i as f64 - 5.0).collect();
        assert!(m.unitarity_check(&ks).unwrap() < 1e-12);
    }
}
