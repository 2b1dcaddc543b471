//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured figures (run with --nocapture to see them all).

use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use tomokit::io::SetJson;
use tomokit::operator::random_unit_vector;
use tomokit::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fixture_set_n3() -> Arc<TomographicSet> {
    let text = include_str!("fixtures/set_n3.json");
    let json: SetJson = serde_json::from_str(text).expect("fixture parses");
    Arc::new(json.to_set().expect("fixture is a valid set"))
}

#[test]
fn acceptance_01_finite_round_trip() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    for n in 2..=5usize {
        let set = random_minimal_set(n, 100 + n as u64, 1e6).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        for k in 0..50u64 {
            let rho = random_density_matrix(n, 1000 * n as u64 + k).unwrap();
            let tom = tomogram(&rho, &set).unwrap();
            let rec = reconstruct(&tom, &kernel).unwrap();
            worst = worst.max(rec.sub(&rho).unwrap().frobenius_norm());
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 1: {} - finite round trip n in 2..=5, 50 states each: worst {:.3e} (< 1e-8), {:.2}s (< 10s)",
        if worst < 1e-8 && elapsed < 10.0 { "PASS" } else { "FAIL" },
        worst,
        elapsed
    );
    assert!(worst < 1e-8, "worst Frobenius error {worst}");
    assert!(elapsed < 10.0, "runtime {elapsed}s");
}

#[test]
fn acceptance_02_biorthogonality_fixture() {
    let set = fixture_set_n3();
    let kernel = gram_schmidt(&set).unwrap();
    let mut worst = 0.0_f64;
    for (l, kl) in kernel.duals().iter().enumerate() {
        for (k, p) in set.projectors().iter().enumerate() {
            let got = hs_inner(kl, p.matrix()).unwrap();
            let want = if l == k { 1.0 } else { 0.0 };
            worst = worst.max((got - c(want, 0.0)).norm());
        }
    }
    println!(
        "criterion 2: {} - biorthogonality on the n=3 fixture: worst |Tr(K_l P_k) - delta| = {:.3e} (< 1e-8)",
        if worst < 1e-8 { "PASS" } else { "FAIL" },
        worst
    );
    assert!(worst < 1e-8, "worst deviation {worst}");
}

#[test]
fn acceptance_03_skewness_vs_rank() {
    // direct oracle: numerical rank of the 4x6 matrix of flattened projectors
    fn rank_of_six(u1: &OperatorMatrix, u2: &OperatorMatrix) -> usize {
        let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(6);
        for k in 0..2 {
            let mut e = DVector::from_element(2, c(0.0, 0.0));
            e[k] = c(1.0, 0.0);
            cols.push(mat_to_vec(projector_from_vector(&e).unwrap().matrix()));
        }
        for u in [u1, u2] {
            for k in 0..2 {
                let v = DVector::from_vec(vec![u.get(0, k), u.get(1, k)]);
                cols.push(mat_to_vec(projector_from_vector(&v).unwrap().matrix()));
            }
        }
        let m = DMatrix::<Complex64>::from_fn(4, 6, |i, j| cols[j][i]);
        let svd = m.svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
        svd.singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * smax)
            .count()
    }

    let mut rng = ChaCha12Rng::seed_from_u64(303);
    let mut agreements = 0usize;
    for _ in 0..200 {
        let mut su2 = || {
            let v = random_unit_vector(2, &mut rng);
            OperatorMatrix::from_rows(&[vec![v[0], v[1]], vec![-v[1].conj(), v[0].conj()]]).unwrap()
        };
        let (u1, u2) = (su2(), su2());
        let report = skew_pair_check(&u1, &u2).unwrap();
        let full_rank = rank_of_six(&u1, &u2) == 4;
        if report.skew == full_rank {
            agreements += 1;
        }
    }
    println!(
        "criterion 3: {} - skewness test vs direct rank-4 oracle: {}/200 agreements",
        if agreements == 200 { "PASS" } else { "FAIL" },
        agreements
    );
    assert_eq!(agreements, 200);
}

#[test]
fn acceptance_04_spin_half_strong_identity() {
    let started = Instant::now();
    let quad = SphereQuadrature::gauss_product(16, 16).unwrap();

    // kernel outside: A = sum w K Tr(P A)
    let mut worst_kernel = 0.0_f64;
    for k in 0..20u64 {
        let a = random_density_matrix(2, 4000 + k).unwrap();
        let rec = spin_half_reconstruct_fn(
            |dir| hs_inner(spin_half_projector(dir).matrix(), &a).unwrap().re,
            &quad,
        );
        worst_kernel = worst_kernel.max(rec.sub(&a).unwrap().frobenius_norm());
    }

    // projector outside: A = sum w P Tr(K A), checked per operator
    let mut worst_proj = 0.0_f64;
    for k in 0..20u64 {
        let a = random_density_matrix(2, 4100 + k).unwrap();
        let mut acc = DMatrix::<Complex64>::zeros(2, 2);
        for node in quad.nodes() {
            let weight = hs_inner(&spin_half_kernel(&node.dir), &a).unwrap();
            acc += spin_half_projector(&node.dir).matrix().entries() * (weight * node.weight());
        }
        let rec = OperatorMatrix::from_matrix(acc).unwrap();
        worst_proj = worst_proj.max(rec.sub(&a).unwrap().frobenius_norm());
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = worst_kernel < 1e-8 && worst_proj < 1e-8 && elapsed < 5.0;
    println!(
        "criterion 4: {} - both U(2) identity decompositions at 16x16 nodes: kernel-outside {:.3e}, projector-outside {:.3e} (< 1e-8), {:.2}s (< 5s)",
        if pass { "PASS" } else { "FAIL" },
        worst_kernel,
        worst_proj,
        elapsed
    );
    assert!(worst_kernel < 1e-8, "kernel-outside {worst_kernel}");
    assert!(worst_proj < 1e-8, "projector-outside {worst_proj}");
    assert!(elapsed < 5.0, "runtime {elapsed}s");
}

#[test]
fn acceptance_05_spin_j_round_trips() {
    let mut worst = 0.0_f64;
    for (tj, base_seed) in [(1i32, 500u64), (2, 600), (3, 700)] {
        let j = HalfInteger::from_twice(tj);
        let n = 8 * j.dimension();
        let quad = SphereQuadrature::gauss_product(n, n).unwrap();
        for k in 0..10u64 {
            let rho = random_density_matrix(j.dimension(), base_seed + k).unwrap();
            let grid = spin_j_tomogram(&rho, j, &quad).unwrap();
            let rec = spin_j_reconstruct(&grid).unwrap();
            worst = worst.max(rec.matrix.sub(&rho).unwrap().frobenius_norm());
        }
    }

    // j = 1/2 cross-scheme agreement on the same tomogram
    let j = HalfInteger::from_twice(1);
    let quad = SphereQuadrature::gauss_product(16, 16).unwrap();
    let rho = random_density_matrix(2, 808).unwrap();
    let grid = spin_j_tomogram(&rho, j, &quad).unwrap();
    let rec_j = spin_j_reconstruct(&grid).unwrap().matrix;
    let plus_row: Vec<f64> = grid.values.iter().map(|row| row[0]).collect();
    let rec_half = spin_half_reconstruct(&plus_row, &quad).unwrap();
    let cross = rec_j.sub(&rec_half).unwrap().frobenius_norm();

    let pass = worst < 1e-6 && cross < 1e-6;
    println!(
        "criterion 5: {} - spin-j round trips j in {{1/2,1,3/2}}: worst {:.3e} (< 1e-6); j=1/2 cross-scheme gap {:.3e} (< 1e-6)",
        if pass { "PASS" } else { "FAIL" },
        worst,
        cross
    );
    assert!(worst < 1e-6, "worst round trip {worst}");
    assert!(cross < 1e-6, "cross-scheme {cross}");
}

#[test]
fn acceptance_06_photon_inversion() {
    let started = Instant::now();
    let kernel_space = FockSpace::new(32).unwrap();
    let dim = kernel_space.dim();
    let grid = PolarGrid::new(24, 24, 4.0).unwrap();
    let state_block = 9; // states live in the nmax = 8 subspace

    let mut vac = DVector::<Complex64>::zeros(dim);
    vac[0] = c(1.0, 0.0);
    let mut one = DVector::<Complex64>::zeros(dim);
    one[1] = c(1.0, 0.0);
    let coh = kernel_space.coherent_state(c(1.0, 0.0));

    let embed = |v: &DVector<Complex64>| {
        OperatorMatrix::from_matrix(DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj())).unwrap()
    };

    let mut all_pass = true;
    let mut summary = String::new();
    let mut coherent_tomogram = None;
    for (name, state) in [("|0>", &vac), ("|1>", &one), ("coherent(1)", &coh)] {
        let rho = embed(state);
        let tom = photon_tomogram_grid(&rho, kernel_space.nmax, &grid, kernel_space).unwrap();
        let rec = photon_reconstruct(&tom, 0.0).unwrap();
        let mut fid = c(0.0, 0.0);
        for a in 0..rec.matrix.dim() {
            for b in 0..rec.matrix.dim() {
                fid += state[a].conj() * rec.matrix.get(a, b) * state[b];
            }
        }
        let trace: f64 = (0..state_block).map(|i| rec.matrix.get(i, i).re).sum();
        let ok = fid.re > 0.99 && (0.98..=1.02).contains(&trace);
        all_pass &= ok;
        summary.push_str(&format!("{name}: fid {:.5} trace {:.5}; ", fid.re, trace));
        if name == "coherent(1)" {
            coherent_tomogram = Some(tom);
        }
    }

    // equivalence of the kernel family: s = 0 vs s = -0.3 on the state block
    let tom = coherent_tomogram.unwrap();
    let rec0 = photon_reconstruct(&tom, 0.0).unwrap().matrix;
    let rec3 = photon_reconstruct(&tom, -0.3).unwrap().matrix;
    let mut gap = 0.0_f64;
    for i in 0..state_block {
        for j in 0..state_block {
            gap = gap.max((rec0.get(i, j) - rec3.get(i, j)).norm());
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    all_pass &= gap <= 0.02 && elapsed < 60.0;
    println!(
        "criterion 6: {} - photon inversion (s=0, R=4, 24x24, kernel nmax=32): {summary}s-family gap {:.3e} (<= 0.02), {:.1}s (< 60s)",
        if all_pass { "PASS" } else { "FAIL" },
        gap,
        elapsed
    );
    assert!(all_pass, "{summary} gap {gap} elapsed {elapsed}");
}

/// The closed-form position element of K^(0) is evaluated exactly at its
/// branch point: tau(-s) = pi at s = 0 makes sin(tau) vanish, the
/// closed-form prefactor 1/sqrt(2 pi i sin tau) divergent, and the kernel a
/// delta distribution; the Fock-basis resummation at any finite cutoff is an
/// oscillating partial sum of that distribution. The pointwise comparison
/// this criterion asks for cannot converge; the same cross-check passes at
/// machine precision for s away from 0 (see the photon_position test file).
#[test]
fn acceptance_07_position_kernel_cross_check() {
    let nmax = 40;
    let points: Vec<(f64, f64)> = (0..25)
        .map(|k| {
            let t = k as f64 / 24.0;
            (-1.2 + 2.4 * t, 1.1 - 2.2 * t * t)
        })
        .collect();
    let mut worst = 0.0_f64;
    let mut failure: Option<String> = None;
    for &(x, y) in &points {
        match kernel_position_element(x, y, 0, c(0.0, 0.0), 0.0) {
            Ok(closed) => {
                let series = hermite_resummation(x, y, 0, c(0.0, 0.0), 0.0, nmax);
                worst = worst.max((closed - series).norm());
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }
    match failure {
        None => {
            println!(
                "criterion 7: {} - position-kernel cross-check at s=0: worst {:.3e} (< 1e-4)",
                if worst < 1e-4 { "PASS" } else { "FAIL" },
                worst
            );
            assert!(worst < 1e-4, "worst {worst}");
        }
        Some(msg) => {
            println!(
                "criterion 7: FAIL - the s = 0 closed form sits on the branch point ({msg}); \
                 the comparison is well-posed only for s != 0, where it passes at 1e-15 \
                 (photon_position tests)"
            );
            panic!(
                "s = 0 position-kernel comparison is not evaluable: {msg}; \
                 sin(tau(0)) = 0 makes the closed form distributional while the \
                 nmax = 40 resummation oscillates without converging"
            );
        }
    }
}

fn hermite_resummation(
    x: f64,
    y: f64,
    n: usize,
    alpha: Complex64,
    s: f64,
    nmax: usize,
) -> Complex64 {
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

#[test]
fn acceptance_08_symplectic_ground_state() {
    let started = Instant::now();
    let grids = default_grids();
    let nus = difference_lattice(&grids.qgrid);
    let tom =
        SymplecticTomogram::from_fn(grids.xgrid, &grids.mu_rule, &nus, gaussian_ground_tomogram);
    let rec = symplectic_reconstruct(&tom, &grids.qgrid).unwrap();
    let mut worst = 0.0_f64;
    for (i, y) in grids.qgrid.nodes().enumerate() {
        for (j, yp) in grids.qgrid.nodes().enumerate() {
            let want = (-(y * y + yp * yp) / 2.0).exp() / std::f64::consts::PI.sqrt();
            worst = worst.max((rec.density[(i, j)] - c(want, 0.0)).norm());
        }
    }
    let trace_gap = (rec.trace() - 1.0).abs();
    let elapsed = started.elapsed().as_secs_f64();
    let pass = worst < 1e-2 && trace_gap < 1e-2 && elapsed < 30.0;
    println!(
        "criterion 8: {} - symplectic ground state on default grids: max-abs {:.3e} (< 1e-2), |trace-1| {:.3e} (< 1e-2), {:.1}s (< 30s)",
        if pass { "PASS" } else { "FAIL" },
        worst,
        trace_gap,
        elapsed
    );
    assert!(worst < 1e-2, "max-abs {worst}");
    assert!(trace_gap < 1e-2, "trace gap {trace_gap}");
    assert!(elapsed < 30.0, "runtime {elapsed}s");
}

#[test]
fn acceptance_09_pauli_counterexample() {
    let grid = GridSpec::new(-8.0, 8.0, 128).unwrap();
    let report = pauli_counterexample(c(1.0, 1.0), 0.0, grid).unwrap();

    // independent overlap oracle: Simpson rule on a finer grid, straight from
    // the wavefunction formulas
    let alpha = c(1.0, 1.0);
    let m = 1024usize;
    let (a, b) = (-10.0, 10.0);
    let h = (b - a) / m as f64;
    let psi1 = |x: f64| (-alpha * x * x).exp();
    let psi2 = |x: f64| (-alpha.conj() * x * x).exp();
    let simpson = |f: &dyn Fn(f64) -> Complex64| {
        let mut acc = f(a) + f(b);
        for k in 1..m {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(a + k as f64 * h) * w;
        }
        acc * (h / 3.0)
    };
    let overlap = simpson(&|x| psi1(x).conj() * psi2(x));
    let n1 = simpson(&|x| c(psi1(x).norm_sqr(), 0.0));
    let n2 = simpson(&|x| c(psi2(x).norm_sqr(), 0.0));
    let oracle = overlap.norm_sqr() / (n1.re * n2.re);

    let target = std::f64::consts::FRAC_1_SQRT_2;
    let pass = report.marginal_gap_q < 1e-12
        && report.marginal_gap_p < 1e-12
        && (report.fidelity - target).abs() <= 1e-4
        && (report.fidelity - oracle).abs() <= 1e-6;
    println!(
        "criterion 9: {} - marginal gaps {:.2e}/{:.2e} (< 1e-12), fidelity {:.6} vs 0.70711 (+-1e-4), oracle gap {:.2e}",
        if pass { "PASS" } else { "FAIL" },
        report.marginal_gap_q,
        report.marginal_gap_p,
        report.fidelity,
        (report.fidelity - oracle).abs()
    );
    assert!(report.marginal_gap_q < 1e-12);
    assert!(report.marginal_gap_p < 1e-12);
    assert!((report.fidelity - target).abs() <= 1e-4);
    assert!((report.fidelity - oracle).abs() <= 1e-6);
}

#[test]
fn acceptance_10_squeeze_commutant() {
    let space = FockSpace::new(40).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(777);
    let mut worst = 0.0_f64;
    for _ in 0..5 {
        let lambda = 0.6 * (rand::Rng::random::<f64>(&mut rng) - 0.5);
        let theta = 0.1 + 1.35 * rand::Rng::random::<f64>(&mut rng);
        let mu = lambda.exp() * theta.cos();
        let nu = (-lambda).exp() * theta.sin();
        let report = squeeze_commutant_check(mu, nu, space).unwrap();
        worst = worst.max(report.parity_commutator_norm);
    }
    println!(
        "criterion 10: {} - parity commutant of the squeezed number family: worst interior norm {:.3e} (< 1e-8)",
        if worst < 1e-8 { "PASS" } else { "FAIL" },
        worst
    );
    assert!(worst < 1e-8, "worst commutator {worst}");
}

#[test]
fn acceptance_11_povm_measure() {
    let quad = SphereQuadrature::gauss_product(32, 32).unwrap();
    let projectors: Vec<RankOneProjector> = quad
        .nodes()
        .iter()
        .map(|node| spin_half_projector(&node.dir))
        .collect();
    let weights: Vec<f64> = quad
        .nodes()
        .iter()
        .map(|node| 2.0 * node.weight() / (4.0 * std::f64::consts::PI))
        .collect();
    let set = TomographicSet::from_projectors(2, projectors).unwrap();
    let residual = povm_check(&set, &weights).unwrap();
    println!(
        "criterion 11: {} - sphere projectors with weight 2 dOmega / 4pi: ||sum w P - I|| = {:.3e} (< 1e-6)",
        if residual < 1e-6 { "PASS" } else { "FAIL" },
        residual
    );
    assert!(residual < 1e-6, "residual {residual}");
}
