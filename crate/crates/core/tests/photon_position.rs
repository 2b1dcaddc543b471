//! Cross-validation of the closed-form position elements of the photon
//! kernel against a Fock-basis resummation with Hermite functions. Away from
//! the s = 0 branch point the two routes agree to machine precision.

use num_complex::Complex64;
use tomokit::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hermite_functions(x: f64, nmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    out.push(psi0);
    if nmax == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * psi0);
    for m in 1..nmax {
        let next = (2.0 / (m as f64 + 1.0)).sqrt() * x * out[m]
            - ((m as f64) / (m as f64 + 1.0)).sqrt() * out[m - 1];
        out.push(next);
    }
    out
}

fn resummation(x: f64, y: f64, n: usize, alpha: Complex64, s: f64, nmax: usize) -> Complex64 {
    let space = FockSpace::new(nmax).unwrap();
    let kernel = photon_kernel(n, alpha, s, space).unwrap();
    let px = hermite_functions(x, nmax);
    let py = hermite_functions(y, nmax);
    let mut acc = c(0.0, 0.0);
    for (m, &pxm) in px.iter().enumerate() {
        for (np, &pyn) in py.iter().enumerate() {
            acc += pxm * kernel.get(m, np) * pyn;
        }
    }
    acc
}

#[test]
fn closed_form_matches_resummation_at_origin() {
    for s in [0.25, 0.5, 0.7] {
        let mut worst = 0.0_f64;
        for k in 0..25 {
            let t = k as f64 / 24.0;
            let (x, y) = (-1.2 + 2.4 * t, 1.1 - 2.2 * t * t);
            let closed = kernel_position_element(x, y, 0, c(0.0, 0.0), s).unwrap();
            let series = resummation(x, y, 0, c(0.0, 0.0), s, 40);
            worst = worst.max((closed - series).norm());
        }
        assert!(worst < 1e-4, "s = {s}: worst {worst:.3e}");
    }
}

#[test]
fn closed_form_matches_resummation_displaced() {
    let (n, alpha, s) = (2usize, c(0.4, -0.3), 0.5);
    let mut worst = 0.0_f64;
    for (x, y) in [(0.3, -0.2), (0.9, 0.1), (-0.5, -0.8), (0.0, 0.6)] {
        let closed = kernel_position_element(x, y, n, alpha, s).unwrap();
        let series = resummation(x, y, n, alpha, s, 40);
        worst = worst.max((closed - series).norm());
    }
    assert!(worst < 1e-8, "worst {worst:.3e}");
}

#[test]
fn tau_branch_is_positive_at_s0_and_continuous() {
    let tau0 = tomokit::fock::tau_parameter(0.0);
    assert!((tau0.re - std::f64::consts::PI).abs() < 1e-15);
    assert!(tau0.im.abs() < 1e-15);
    // continuity across the interval
    let mut prev = tomokit::fock::tau_parameter(-0.9);
    for k in 1..=18 {
        let s = -0.9 + 0.1 * k as f64;
        let cur = tomokit::fock::tau_parameter(s.min(0.9));
        assert!((cur - prev).norm() < 1.0, "jump at s = {s}");
        prev = cur;
    }
}

#[test]
fn reconstruction_insensitive_to_s_on_resolved_block() {
    // the s label picks an equivalent kernel; reconstructions agree where
    // the tomogram resolves the state
    let kernel_space = FockSpace::new(24).unwrap();
    let grid = PolarGrid::new(20, 20, 3.5).unwrap();
    let dim = kernel_space.dim();
    let coh = kernel_space.coherent_state(c(0.7, 0.2));
    let rho = OperatorMatrix::from_matrix(nalgebra::DMatrix::from_fn(dim, dim, |i, j| {
        coh[i] * coh[j].conj()
    }))
    .unwrap();
    let tom = photon_tomogram_grid(&rho, kernel_space.nmax, &grid, kernel_space).unwrap();
    let rec0 = photon_reconstruct(&tom, 0.0).unwrap().matrix;
    let rec_m = photon_reconstruct(&tom, -0.3).unwrap().matrix;
    let mut gap = 0.0_f64;
    for i in 0..7 {
        for j in 0..7 {
            gap = gap.max((rec0.get(i, j) - rec_m.get(i, j)).norm());
        }
    }
    assert!(gap < 0.02, "s-family gap {gap:.3e}");
}
