use approx::assert_relative_eq;
use resonance_core::energy_surface::{
    energy_to_momentum, make_resonance_model, Background, ResonancePole, SMatrixModel, Sheet,
};
use resonance_core::expansion::{
    dirac_pairing, effective_matrix, expand, smatrix_pairing_direct, truncated_evolve, PreparedState,
};
use resonance_core::hardy::{paley_wiener_check, HardyClass, PaleyWienerGrid, PoleTerm, WaveFunction};
use resonance_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn psi() -> WaveFunction {
    WaveFunction::single(c(1.0, 0.0), c(1.5, -0.8), 2).unwrap()
}

fn phi() -> PreparedState {
    PreparedState::new(WaveFunction::single(c(0.7, 0.2), c(0.8, 0.6), 1).unwrap()).unwrap()
}

fn model(poles: &[(f64, f64)]) -> SMatrixModel {
    let poles: Vec<ResonancePole> = poles.iter().map(|&(e, g)| ResonancePole::new(e, g).unwrap()).collect();
    make_resonance_model(&poles, Background::None).unwrap()
}

/// `sqrt(int |f|^2 dE)` by a fine trapezoid on a wide window.
fn l2_norm(f: &WaveFunction) -> f64 {
    let (a, n) = (2000.0, 400_000);
    let h = 2.0 * a / n as f64;
    ((0..=n).map(|j| f.at(-a + j as f64 * h).norm_sqr()).sum::<f64>() * h).sqrt()
}

#[test]
fn momentum_branches() {
    assert_relative_eq!(energy_to_momentum(c(4.0, 0.0), Sheet::Physical).unwrap().k.re, 2.0);
    let k = energy_to_momentum(c(-1.0, 0.0), Sheet::Second).unwrap().k;
    assert!((k - c(0.0, -1.0)).norm() < 1e-15);
    let e = c(1.0, -0.1);
    let k = energy_to_momentum(e, Sheet::Second).unwrap().k;
    assert!(k.im < 0.0 && k.re > 0.0);
    assert!((k * k - e).norm() < 1e-15);
}

#[test]
fn modulus_grows_tenfold_per_decade_near_the_pole() {
    let m = model(&[(1.0, 0.2)]);
    let k = m.pole_momenta()[0];
    let near = m.s_eval(k + 1e-4).unwrap().norm();
    let far = m.s_eval(k + 1e-3).unwrap().norm();
    assert_relative_eq!(near / far, 10.0, max_relative = 2e-3);
}

#[test]
fn two_pole_model_is_unitary_on_a_grid() {
    let m = model(&[(1.0, 0.02), (1.5, 0.05)]);
    let grid: Vec<f64> = (1..=400).map(|j| j as f64 * 0.025).collect();
    assert!(m.unitarity_check(&grid).unwrap() < 1e-12);
}

#[test]
fn conjugate_continuation_pointwise() {
    let wf = WaveFunction::new(
        vec![
            PoleTerm::new(c(0.4, -1.1), c(0.3, -0.7), 1),
            PoleTerm::new(c(-2.0, 0.5), c(-1.4, -0.2), 2),
            PoleTerm::new(c(0.1, 0.9), c(2.5, -1.6), 3),
        ],
        HardyClass::UpperHalfPlane,
    )
    .unwrap();
    let g = wf.conjugate_continuation();
    assert_eq!(g.class(), HardyClass::LowerHalfPlane);
    for j in 0..100 {
        let e = -5.0 + 0.1 * j as f64;
        assert!((g.at(e) - wf.at(e).conj()).norm() < 1e-14);
    }
}

#[test]
fn mirrored_pair_has_equal_leakage_under_swapped_declarations() {
    let grid = PaleyWienerGrid::default();
    let f = WaveFunction::single(c(1.0, 0.5), c(0.4, -0.9), 2).unwrap();
    let g = f.conjugate_continuation();
    let lf = paley_wiener_check(&f, grid).unwrap();
    let lg = paley_wiener_check(&g, grid).unwrap();
    assert_relative_eq!(lf, lg, epsilon = 1e-12);
}

#[test]
fn smatrix_pairing_respects_cauchy_schwarz_and_decays() {
    let m = model(&[(1.0, 0.2)]);
    let v0 = smatrix_pairing_direct(&psi(), &phi(), &m, 0.0).unwrap().value;
    let v3 = smatrix_pairing_direct(&psi(), &phi(), &m, 3.0).unwrap().value;
    assert!(v0.norm() <= l2_norm(&psi()) * l2_norm(phi().wave_function()));
    assert!(v3.norm() < v0.norm());
    let identity = smatrix_pairing_direct(&psi(), &phi(), &SMatrixModel::identity(), 0.0).unwrap().value;
    let pairing = dirac_pairing(&psi(), phi().wave_function()).unwrap();
    assert!((identity - pairing).norm() < 1e-11 * pairing.norm());
}

#[test]
fn background_at_zero_is_direct_minus_pole_sum() {
    let exp = expand(&phi(), &model(&[(1.0, 0.2)]), &psi()).unwrap();
    let direct = exp.direct(0.0).unwrap().value;
    let poles: Complex64 = exp.pole_terms().iter().map(|p| p.b).sum();
    let bg = exp.background_integral(0.0).unwrap().value;
    assert!(((direct - poles).norm() - bg.norm()).abs() < 1e-10 * direct.norm());
    let err = exp.truncation_error(0.0).unwrap();
    assert!(err.relative);
    assert_relative_eq!(err.value, bg.norm() / direct.norm(), max_relative = 1e-9);
}

#[test]
fn background_overtakes_the_pole_term() {
    let gamma = 0.6;
    let exp = expand(&phi(), &model(&[(1.0, gamma)]), &psi()).unwrap();
    for (gt, factor) in [(10.0, 1.0), (20.0, 10.0)] {
        let t = gt / gamma;
        let pole = exp.pole_sum(t).unwrap().norm();
        let bg = exp.background_integral(t).unwrap().value.norm();
        assert!(bg > factor * pole, "Gamma t = {gt}: pole {pole:e}, background {bg:e}");
    }
    let early_pole = exp.pole_sum(0.0).unwrap().norm();
    let early_bg = exp.background_integral(0.0).unwrap().value.norm();
    assert!(early_bg < early_pole);
}

#[test]
fn background_decays_as_a_power_law() {
    let exp = expand(&phi(), &model(&[(1.0, 0.2)]), &psi()).unwrap();
    let times: Vec<f64> = (0..=20).map(|k| 50.0 * 10f64.powf(k as f64 / 10.0)).collect();
    let profile = exp.background_decay_profile(&times).unwrap();
    assert!(profile.windows(2).all(|w| w[1].1 < w[0].1));
    let xs: Vec<f64> = profile.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = profile.iter().map(|p| p.1).collect();
    let fit = resonance_core::survival::fit_power_law(&xs, &ys).unwrap();
    assert!(fit.exponent < -0.5 && fit.residual < 1e-2, "{fit:?}");
}

#[test]
fn narrow_resonance_truncation_is_small() {
    // States centred on the resonance energy.
    let gamma = 0.02;
    let psi = WaveFunction::single(c(1.0, 0.0), c(1.0, -0.3), 2).unwrap();
    let phi = PreparedState::new(WaveFunction::single(c(1.0, 0.0), c(1.0, 0.3), 1).unwrap()).unwrap();
    let exp = expand(&phi, &model(&[(1.0, gamma)]), &psi).unwrap();
    let err = exp.truncation_error(1.0 / gamma).unwrap();
    assert!(err.value < 0.05, "{err:?}");
    let pure = expand(&phi, &SMatrixModel::identity(), &psi).unwrap();
    let flag = pure.truncation_error(0.0).unwrap();
    assert!(flag.pure_background);
    assert_relative_eq!(flag.value, 1.0, epsilon = 1e-12);
}

#[test]
fn effective_matrix_and_components() {
    let m = model(&[(1.0, 0.2), (1.5, 0.05)]);
    let h = effective_matrix(&m).unwrap();
    assert_eq!(h.diagonal(), &[c(1.0, -0.1), c(1.5, -0.025)]);
    assert!(h.diagonal().iter().all(|z| z.im < 0.0));
    assert_eq!(truncated_evolve(&[c(1.0, 0.0), c(2.0, 1.0)], &h, 0.0).unwrap(), vec![c(1.0, 0.0), c(2.0, 1.0)]);
    // Long-lived L = (1.5, 0.05) against short-lived S = (1.0, 0.2).
    let t = 80.0;
    let v = truncated_evolve(&[c(1.0, 0.0), c(1.0, 0.0)], &h, t).unwrap();
    assert_relative_eq!(v[0].norm() / v[1].norm(), (-(0.2 - 0.05) * t / 2.0).exp(), max_relative = 1e-12);
}
