use std::f64::consts::FRAC_1_SQRT_2;

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance_core::histories::{
    collapse_nonselective, collapse_selective, effective_two_level_probability, entropy, history_probability,
    unitary_evolve, CMatrix, DensityMatrix, Hamiltonian, History, Projector,
};
use resonance_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = random_matrix(rng, n);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.unscale(tr)).unwrap()
}

fn random_hamiltonian(rng: &mut ChaCha8Rng, n: usize) -> Hamiltonian {
    let a = random_matrix(rng, n);
    Hamiltonian::new((&a + a.adjoint()).scale(0.5)).unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[test]
fn unitary_evolution_preserves_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = random_state(&mut rng, 5);
    let h = random_hamiltonian(&mut rng, 5);
    let before = rho.eigenvalues();
    for t in [-4.0, 0.3, 17.0] {
        let after = unitary_evolve(&rho, &h, t).unwrap().eigenvalues();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-10);
        }
    }
    let diag = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
    let hd = Hamiltonian::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0, 0.0),
        c(-2.0, 0.0),
        c(0.5, 0.0),
    ])))
    .unwrap();
    let moved = unitary_evolve(&diag, &hd, 2.7).unwrap();
    assert!(max_abs(&(moved.matrix() - diag.matrix())) < 1e-15);
}

#[test]
fn nonselective_collapse_is_block_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = random_state(&mut rng, 4);
    let family = [Projector::basis(4, &[0, 1]).unwrap(), Projector::basis(4, &[2, 3]).unwrap()];
    let out = collapse_nonselective(&rho, &family).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let same_block = (i < 2) == (j < 2);
            let expected = if same_block { rho.matrix()[(i, j)] } else { c(0.0, 0.0) };
            assert!((out.matrix()[(i, j)] - expected).norm() < 1e-15);
        }
    }
    let again = collapse_nonselective(&out, &family).unwrap();
    assert!(max_abs(&(again.matrix() - out.matrix())) < 1e-15);
    assert!(entropy(&out) >= entropy(&rho));
}

#[test]
fn selective_probability_is_born_rule() {
    let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
    let rho = DensityMatrix::pure(&[a, b]).unwrap();
    let v = [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)];
    let p = Projector::span(&[v.to_vec()]).unwrap();
    let amplitude = v[0].conj() * a + v[1].conj() * b;
    let (_, prob) = collapse_selective(&rho, &p).unwrap();
    assert_relative_eq!(prob, amplitude.norm_sqr(), epsilon = 1e-15);
}

#[test]
fn two_step_history_matches_sequential_collapse() {
    let rho = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    let h = Hamiltonian::new(CMatrix::from_row_slice(
        2,
        2,
        &[c(0.5, 0.0), c(0.2, 0.3), c(0.2, -0.3), c(-0.5, 0.0)],
    ))
    .unwrap();
    let pa = Projector::basis(2, &[0]).unwrap();
    let pb = Projector::span(&[vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]]).unwrap();
    let (ta, tb) = (0.4, 1.3);
    let history = History::from_pairs([(pa.clone(), ta), (pb.clone(), tb)]);
    let prob = history_probability(&rho, &h, &history).unwrap();
    let (rho_a, p1) = collapse_selective(&unitary_evolve(&rho, &h, ta).unwrap(), &pa).unwrap();
    let (_, p2) = collapse_selective(&unitary_evolve(&rho_a, &h, tb - ta).unwrap(), &pb).unwrap();
    assert!((prob - p1 * p2).abs() < 1e-12);
}

#[test]
fn refinement_of_the_last_step_recovers_the_shorter_history() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rho = random_state(&mut rng, 3);
    let h = random_hamiltonian(&mut rng, 3);
    let first = Projector::basis(3, &[0, 2]).unwrap();
    let short = history_probability(&rho, &h, &History::from_pairs([(first.clone(), 0.8)])).unwrap();
    let family = [
        Projector::basis(3, &[0]).unwrap(),
        Projector::basis(3, &[1]).unwrap(),
        Projector::basis(3, &[2]).unwrap(),
    ];
    let refined: f64 = family
        .iter()
        .map(|p| history_probability(&rho, &h, &History::from_pairs([(first.clone(), 0.8), (p.clone(), 2.1)])).unwrap())
        .sum();
    assert!((refined - short).abs() < 1e-12);
}

#[test]
fn interference_projector_oscillates_at_the_level_spacing() {
    let (zl, zs) = (c(1.0, -0.025), c(1.4, -0.3));
    let b = [c(0.8, 0.1), c(0.5, -0.2)];
    let plus = Projector::span(&[vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
    let t0 = effective_two_level_probability(b, [zl, zs], &plus, 0.0).unwrap();
    assert_relative_eq!(t0, 0.5 * (b[0] + b[1]).norm_sqr(), epsilon = 1e-15);
    for t in [0.5, 3.0, 11.0] {
        let (gl, gs) = (-2.0 * zl.im, -2.0 * zs.im);
        let cross = (b[0] * b[1].conj() * Complex64::from_polar(1.0, -(zl.re - zs.re) * t)).re;
        let expected = 0.5
            * (b[0].norm_sqr() * (-gl * t).exp() + b[1].norm_sqr() * (-gs * t).exp()
                + 2.0 * cross * (-(gl + gs) * t / 2.0).exp());
        let got = effective_two_level_probability(b, [zl, zs], &plus, t).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-13);
    }
}
