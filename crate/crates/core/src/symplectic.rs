//! Grid-discretized symplectic tomography: chirped plane-wave eigenfunctions,
//! tomograms of wavefunctions, the inversion back to the density kernel, a
//! numerical probe of the underlying delta identity, the two-Gaussian
//! counterexample for marginal-only reconstruction, and the parity-commutant
//! obstruction of the squeeze family.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::fock::FockSpace;
use crate::operator::OperatorMatrix;
use crate::special::{gauss_legendre, QuadratureRule};

const TAU: f64 = std::f64::consts::TAU;

/// Uniform real grid [qmin, qmax] with npoints inclusive nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub qmin: f64,
    pub qmax: f64,
    pub npoints: usize,
}

impl GridSpec {
    pub fn new(qmin: f64, qmax: f64, npoints: usize) -> Result<Self> {
        if qmin >= qmax || npoints < 2 {
            return Err(TomoError::DegenerateInterval { a: qmin, b: qmax });
        }
        Ok(Self {
            qmin,
            qmax,
            npoints,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.qmax - self.qmin) / (self.npoints - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.qmin + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.npoints).map(|i| self.node(i))
    }

    /// Trapezoid weight of node i.
    pub fn weight(&self, i: usize) -> f64 {
        let dq = self.spacing();
        if i == 0 || i + 1 == self.npoints {
            dq / 2.0
        } else {
            dq
        }
    }
}

/// Complex wavefunction sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct GridWavefunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.npoints {
            return Err(TomoError::LengthMismatch {
                expected: grid.npoints,
                got: values.len(),
                detail: " (wavefunction samples)".into(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Builds from a closure and normalizes on the grid.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        let mut psi = Self::new(grid, values)?;
        psi.normalize()?;
        Ok(psi)
    }

    pub fn norm_squared(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, z)| z.norm_sqr() * self.grid.weight(i))
            .sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_squared();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(TomoError::ZeroVector);
        }
        let inv = Complex64::new(1.0 / n2.sqrt(), 0.0);
        for z in &mut self.values {
            *z *= inv;
        }
        Ok(())
    }

    pub fn inner(&self, other: &GridWavefunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(TomoError::DimensionMismatch {
                left: self.grid.npoints,
                right: other.grid.npoints,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| a.conj() * b * self.grid.weight(i))
            .sum())
    }

    /// Fourier transform psi~(p) = int e^{-ipq} psi(q) dq / sqrt(2 pi) at
    /// arbitrary p, by direct quadrature.
    pub fn fourier_at(&self, p: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, q) in self.grid.nodes().enumerate() {
            acc += self.values[i] * Complex64::from_polar(self.grid.weight(i), -p * q);
        }
        acc / Complex64::new(TAU.sqrt(), 0.0)
    }
}

/// <q|X mu nu> = exp[-i(mu q^2/(2 nu) - X q/nu)] / sqrt(2 pi |nu|), nu != 0.
pub fn symplectic_eigenfunction(q: f64, x: f64, mu: f64, nu: f64) -> Result<Complex64> {
    if nu == 0.0 {
        return Err(TomoError::NuZero);
    }
    let norm = 1.0 / (TAU * nu.abs()).sqrt();
    let phase = -(mu * q * q / (2.0 * nu) - x * q / nu);
    Ok(Complex64::from_polar(norm, phase))
}

/// Tomogram of a wavefunction: |int <X mu nu|q> psi(q) dq|^2 by trapezoid.
pub fn symplectic_tomogram_psi(psi: &GridWavefunction, x: f64, mu: f64, nu: f64) -> Result<f64> {
    if nu == 0.0 {
        return Err(TomoError::NuZero);
    }
    let grid = psi.grid;
    let qmax_abs = grid.qmin.abs().max(grid.qmax.abs());
    let chirp = mu.abs() * qmax_abs * grid.spacing() / (2.0 * nu.abs());
    if chirp >= std::f64::consts::FRAC_PI_4 {
        let dq_needed = std::f64::consts::FRAC_PI_4 * 2.0 * nu.abs() / (mu.abs() * qmax_abs);
        let needed = ((grid.qmax - grid.qmin) / dq_needed).ceil() as usize + 1;
        return Err(TomoError::ChirpUnderResolved {
            needed,
            have: grid.npoints,
        });
    }
    let norm = 1.0 / (TAU * nu.abs()).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, q) in grid.nodes().enumerate() {
        // conj(<q|X mu nu>) carries the positive chirp phase
        let phase = mu * q * q / (2.0 * nu) - x * q / nu;
        acc += psi.values[i] * Complex64::from_polar(grid.weight(i) * norm, phase);
    }
    Ok(acc.norm_sqr())
}

/// Tomogram data on an X grid and a list of (mu, nu) rows; `weight` is the
/// mu-integration weight of the row (the nu integral is consumed by the
/// delta in the inversion formula).
#[derive(Debug, Clone)]
pub struct SymplecticTomogram {
    pub xgrid: GridSpec,
    /// (mu, nu, mu-weight) per row.
    pub munu_nodes: Vec<(f64, f64, f64)>,
    /// values[row][x_index]
    pub values: Vec<Vec<f64>>,
}

impl SymplecticTomogram {
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.munu_nodes.len() {
            return Err(TomoError::LengthMismatch {
                expected: self.munu_nodes.len(),
                got: self.values.len(),
                detail: " (tomogram rows)".into(),
            });
        }
        for (k, row) in self.values.iter().enumerate() {
            if row.len() != self.xgrid.npoints {
                return Err(TomoError::LengthMismatch {
                    expected: self.xgrid.npoints,
                    got: row.len(),
                    detail: format!(" (row {k})"),
                });
            }
        }
        Ok(())
    }

    /// Builds a tomogram table from a closure W(X, mu, nu) over the product
    /// of the mu rule and the nu lattice.
    pub fn from_fn(
        xgrid: GridSpec,
        mu_rule: &QuadratureRule,
        nu_values: &[f64],
        w: impl Fn(f64, f64, f64) -> f64 + Sync,
    ) -> Self {
        let mut munu_nodes = Vec::with_capacity(mu_rule.len() * nu_values.len());
        for &nu in nu_values {
            for (&mu, &wm) in mu_rule.nodes.iter().zip(&mu_rule.weights) {
                munu_nodes.push((mu, nu, wm));
            }
        }
        let xs: Vec<f64> = xgrid.nodes().collect();
        let values = map_rows(&munu_nodes, |&(mu, nu, _)| {
            xs.iter().map(|&x| w(x, mu, nu)).collect::<Vec<f64>>()
        });
        Self {
            xgrid,
            munu_nodes,
            values,
        }
    }
}

#[cfg(feature = "parallel")]
fn map_rows<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_rows<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Default reconstruction grids: the output grid resolves low-energy states,
/// the X window covers the widest (mu, nu) shell at three standard
/// deviations, and mu is integrated by Gauss-Legendre.
pub struct DefaultGrids {
    pub qgrid: GridSpec,
    pub xgrid: GridSpec,
    pub mu_rule: QuadratureRule,
}

pub fn default_grids() -> DefaultGrids {
    DefaultGrids {
        qgrid: GridSpec::new(-8.0, 8.0, 128).unwrap(),
        xgrid: GridSpec::new(-36.0, 36.0, 577).unwrap(),
        mu_rule: gauss_legendre(64, -6.0, 6.0).unwrap(),
    }
}

/// The nu values needed to reconstruct on `qgrid`: every grid difference
/// y - y', including zero.
pub fn difference_lattice(qgrid: &GridSpec) -> Vec<f64> {
    let n = qgrid.npoints as i64;
    let dq = qgrid.spacing();
    (-(n - 1)..n).map(|k| k as f64 * dq).collect()
}

/// Result of a symplectic inversion.
#[derive(Debug, Clone)]
pub struct SymplecticReconstruction {
    pub qgrid: GridSpec,
    /// rho(y, y') on the grid, Hermitized.
    pub density: DMatrix<Complex64>,
    pub warnings: Vec<String>,
}

impl SymplecticReconstruction {
    pub fn trace(&self) -> f64 {
        let dq = self.qgrid.spacing();
        (0..self.qgrid.npoints)
            .map(|i| self.density[(i, i)].re * dq)
            .sum()
    }
}

/// Inversion rho(y, y') = (1/2pi) int W(X, mu, nu) e^{i(X - mu y' - mu nu/2)}
/// dX dmu, with nu pinned to y - y' by the delta; nu rows must align with
/// the grid difference lattice.
pub fn symplectic_reconstruct(
    tom: &SymplecticTomogram,
    qgrid: &GridSpec,
) -> Result<SymplecticReconstruction> {
    tom.validate()?;
    let dq = qgrid.spacing();
    let tol = 1e-9 * dq.max(1.0);

    // characteristic slice G(row) = int W(X) e^{iX} dX
    let xs: Vec<f64> = tom.xgrid.nodes().collect();
    let xw: Vec<f64> = (0..tom.xgrid.npoints)
        .map(|i| tom.xgrid.weight(i))
        .collect();
    let g: Vec<Complex64> = map_rows(
        &(0..tom.munu_nodes.len()).collect::<Vec<_>>(),
        |&row| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &x) in xs.iter().enumerate() {
                acc += Complex64::from_polar(tom.values[row][k] * xw[k], x);
            }
            acc
        },
    );

    // group rows by nu
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (row, &(_, nu, _)) in tom.munu_nodes.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|(g_nu, _)| (*g_nu - nu).abs() <= tol)
        {
            Some((_, rows)) => rows.push(row),
            None => groups.push((nu, vec![row])),
        }
    }

    let n = qgrid.npoints;
    let mut density = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let y = qgrid.node(i);
        for j in 0..n {
            let yp = qgrid.node(j);
            let nu = y - yp;
            let group = groups
                .iter()
                .find(|(g_nu, _)| (g_nu - nu).abs() <= tol)
                .ok_or(TomoError::NuMisaligned {
                    offset: groups
                        .iter()
                        .map(|(g_nu, _)| (g_nu - nu).abs())
                        .fold(f64::INFINITY, f64::min),
                })?;
            let mut acc = Complex64::new(0.0, 0.0);
            for &row in &group.1 {
                let (mu, _, wm) = tom.munu_nodes[row];
                acc += g[row] * Complex64::from_polar(wm, -mu * (yp + nu / 2.0));
            }
            density[(i, j)] = acc / TAU;
        }
    }
    let density = (&density + density.adjoint()).scale(0.5);

    let mut warnings = Vec::new();
    let rec = SymplecticReconstruction {
        qgrid: *qgrid,
        density,
        warnings: Vec::new(),
    };
    let trace = rec.trace();
    if (trace - 1.0).abs() > 0.05 {
        warnings.push(format!("trace {trace:.4} deviates from 1"));
    }
    Ok(SymplecticReconstruction { warnings, ..rec })
}

/// Grids for the delta-identity probe; the X and mu extents set the
/// bandwidths of the two nascent deltas.
#[derive(Debug, Clone)]
pub struct ProbeGrids {
    pub x_rule: QuadratureRule,
    pub mu_rule: QuadratureRule,
}

impl ProbeGrids {
    pub fn default_probe() -> Self {
        Self {
            x_rule: trapezoid_rule(-6.0, 6.0, 96),
            mu_rule: gauss_legendre(64, -6.0, 6.0).unwrap(),
        }
    }
}

pub fn trapezoid_rule(a: f64, b: f64, npoints: usize) -> QuadratureRule {
    let h = (b - a) / (npoints - 1) as f64;
    QuadratureRule {
        nodes: (0..npoints).map(|i| a + i as f64 * h).collect(),
        weights: (0..npoints)
            .map(|i| {
                if i == 0 || i + 1 == npoints {
                    h / 2.0
                } else {
                    h
                }
            })
            .collect(),
        a,
        b,
    }
}

/// Numerically evaluates the band-limited identity integrand
/// I(y, y'; q, q') = (1/4pi^2|nu|) [int e^{iXa} dX][int e^{i mu b} dmu]
/// with nu = y - y'. The exact object is delta(q - y) delta(q' - y');
/// truncated integrals broaden the deltas into sinc peaks.
pub fn delta_identity_probe(
    y: f64,
    yp: f64,
    q: f64,
    qp: f64,
    grids: &ProbeGrids,
) -> Result<Complex64> {
    let nu = y - yp;
    if nu == 0.0 {
        return Err(TomoError::NuZero);
    }
    let a = 1.0 - (q - qp) / nu;
    let b = (q * q - qp * qp) / (2.0 * nu) - yp - nu / 2.0;
    let ix: Complex64 = grids
        .x_rule
        .nodes
        .iter()
        .zip(&grids.x_rule.weights)
        .map(|(&x, &w)| Complex64::from_polar(w, x * a))
        .sum();
    let imu: Complex64 = grids
        .mu_rule
        .nodes
        .iter()
        .zip(&grids.mu_rule.weights)
        .map(|(&m, &w)| Complex64::from_polar(w, m * b))
        .sum();
    Ok(ix * imu / Complex64::new(4.0 * std::f64::consts::PI.powi(2) * nu.abs(), 0.0))
}

/// Outcome of the two-Gaussian marginal comparison.
#[derive(Debug, Clone, Copy)]
pub struct PauliReport {
    pub marginal_gap_q: f64,
    pub marginal_gap_p: f64,
    pub fidelity: f64,
}

/// Builds psi_1 ~ exp(-alpha x^2 + i beta x) and psi_2 with alpha conjugated,
/// and compares their position and momentum densities and mutual fidelity.
pub fn pauli_counterexample(alpha: Complex64, beta: f64, grid: GridSpec) -> Result<PauliReport> {
    if alpha.re <= 0.0 {
        return Err(TomoError::OutOfRange {
            what: "Re(alpha)",
            value: alpha.re,
            expected: "> 0",
        });
    }
    let psi1 = GridWavefunction::from_fn(grid, |x| {
        (-alpha * x * x + Complex64::new(0.0, beta * x)).exp()
    })?;
    let psi2 = GridWavefunction::from_fn(grid, |x| {
        (-alpha.conj() * x * x + Complex64::new(0.0, beta * x)).exp()
    })?;

    let marginal_gap_q = psi1
        .values
        .iter()
        .zip(&psi2.values)
        .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
        .fold(0.0_f64, f64::max);

    // momentum densities on the Nyquist-limited frequency grid
    let n = grid.npoints;
    let dp = TAU / (grid.qmax - grid.qmin);
    let half = n as i64 / 2;
    let mut marginal_gap_p = 0.0_f64;
    for k in -half..half {
        let p = k as f64 * dp;
        let f1 = psi1.fourier_at(p).norm_sqr();
        let f2 = psi2.fourier_at(p).norm_sqr();
        marginal_gap_p = marginal_gap_p.max((f1 - f2).abs());
    }

    let fidelity = psi1.inner(&psi2)?.norm_sqr();
    Ok(PauliReport {
        marginal_gap_q,
        marginal_gap_p,
        fidelity,
    })
}

/// Squeeze-family parameters recovered from (mu, nu) via
/// mu = e^lambda cos(theta), nu = e^{-lambda} sin(theta).
#[derive(Debug, Clone, Copy)]
pub struct SqueezeParameters {
    pub lambda: f64,
    pub theta: f64,
}

/// Solves for (lambda, theta) on the principal branch 2 theta = asin(2 mu nu),
/// quadrant-adjusted by the signs of mu and nu.
pub fn squeeze_parameters(mu: f64, nu: f64) -> Result<SqueezeParameters> {
    if mu == 0.0 && nu == 0.0 {
        return Err(TomoError::SqueezeUnreachable {
            mu,
            nu,
            why: "mu = nu = 0 has no preimage".into(),
        });
    }
    let prod = 2.0 * mu * nu;
    if prod.abs() > 1.0 + 1e-12 {
        return Err(TomoError::SqueezeUnreachable {
            mu,
            nu,
            why: format!("|2 mu nu| = {:.6} exceeds 1", prod.abs()),
        });
    }
    let t = prod.clamp(-1.0, 1.0).asin();
    let candidates = [
        t / 2.0,
        std::f64::consts::FRAC_PI_2 - t / 2.0,
        t / 2.0 + std::f64::consts::PI,
        3.0 * std::f64::consts::FRAC_PI_2 - t / 2.0,
        t / 2.0 - std::f64::consts::PI,
    ];
    for &theta in &candidates {
        let (st, ct) = theta.sin_cos();
        let lambda = if ct.abs() >= st.abs() {
            if ct == 0.0 || mu / ct <= 0.0 {
                continue;
            }
            (mu / ct).ln()
        } else {
            if st == 0.0 || nu / st <= 0.0 {
                continue;
            }
            -(nu / st).ln()
        };
        let err = (lambda.exp() * ct - mu).abs() + ((-lambda).exp() * st - nu).abs();
        if err < 1e-9 * (1.0 + mu.abs() + nu.abs()) {
            return Ok(SqueezeParameters { lambda, theta });
        }
    }
    Err(TomoError::SqueezeUnreachable {
        mu,
        nu,
        why: "no branch solves both equations".into(),
    })
}

/// Truncated-Fock representation of S(mu, nu) =
/// exp(i lambda/2 (QP + PQ)) exp(i theta/2 (Q^2 + P^2)).
pub fn squeeze_operator(mu: f64, nu: f64, space: FockSpace) -> Result<OperatorMatrix> {
    let params = squeeze_parameters(mu, nu)?;
    let q = space.position();
    let p = space.momentum();
    let qp_pq = q.mul(&p).unwrap().add(&p.mul(&q).unwrap()).unwrap();
    let q2_p2 = q.mul(&q).unwrap().add(&p.mul(&p).unwrap()).unwrap();
    let s1 = qp_pq.hermitized().unitary_exp_i(params.lambda / 2.0);
    let s2 = q2_p2.hermitized().unitary_exp_i(params.theta / 2.0);
    s1.mul(&s2)
}

/// Norm of the commutator of the squeezed number operator with parity, on
/// the interior truncated block.
#[derive(Debug, Clone, Copy)]
pub struct SqueezeCommutantReport {
    pub parity_commutator_norm: f64,
}

pub fn squeeze_commutant_check(
    mu: f64,
    nu: f64,
    space: FockSpace,
) -> Result<SqueezeCommutantReport> {
    let s = squeeze_operator(mu, nu, space)?;
    let a_sq = s.mul(&space.number()).unwrap().mul(&s.adjoint()).unwrap();
    let parity = space.parity();
    let comm = a_sq
        .mul(&parity)
        .unwrap()
        .sub(&parity.mul(&a_sq).unwrap())
        .unwrap();
    let block = space.nmax / 2 + 1;
    let mut norm2 = 0.0;
    for i in 0..block {
        for j in 0..block {
            norm2 += comm.get(i, j).norm_sqr();
        }
    }
    Ok(SqueezeCommutantReport {
        parity_commutator_norm: norm2.sqrt(),
    })
}

/// Rank probe for informational completeness of the squeezed-number family,
/// with and without restriction to the even-photon subspace.
///
/// The family is real in the number basis (the rotation factor contributes
/// only a global phase per state), so the probe works over the real span of
/// symmetric operators, dimension d(d+1)/2. On the full space the family
/// misses the even-odd cross blocks entirely: that rank deficit is the
/// parity-commutant obstruction, and it disappears after restriction to the
/// even subspace.
#[derive(Debug, Clone, Copy)]
pub struct RankProbeReport {
    pub full_rank: usize,
    /// d(d+1)/2 for the full space.
    pub full_target: usize,
    pub even_rank: usize,
    /// d_e(d_e+1)/2 for the even subspace.
    pub even_target: usize,
    /// True when the even-subspace family spans its symmetric operator space.
    pub even_complete: bool,
}

pub fn even_subspace_rank_probe(pairs: &[(f64, f64)], space: FockSpace) -> Result<RankProbeReport> {
    let dim = space.dim();
    let even: Vec<usize> = (0..dim).filter(|k| k % 2 == 0).collect();
    let de = even.len();
    let mut full_rows: Vec<Vec<f64>> = Vec::new();
    let mut even_rows: Vec<Vec<f64>> = Vec::new();
    for &(mu, nu) in pairs {
        let s = squeeze_operator(mu, nu, space)?;
        for n in 0..dim {
            let col = s.entries().column(n).clone_owned();
            full_rows.push(symmetric_coordinates(&col, &(0..dim).collect::<Vec<_>>()));
            if n % 2 == 0 {
                even_rows.push(symmetric_coordinates(&col, &even));
            }
        }
    }
    let full_target = dim * (dim + 1) / 2;
    let even_target = de * (de + 1) / 2;
    let full_rank = real_rank(&full_rows);
    let even_rank = real_rank(&even_rows);
    Ok(RankProbeReport {
        full_rank,
        full_target,
        even_rank,
        even_target,
        even_complete: even_rank == even_target,
    })
}

/// Coordinates of |col><col| in the orthonormal basis of real symmetric
/// matrices restricted to the given indices.
fn symmetric_coordinates(col: &DVector<Complex64>, indices: &[usize]) -> Vec<f64> {
    let d = indices.len();
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for (ia, &a) in indices.iter().enumerate() {
        for &b in indices.iter().skip(ia) {
            let elem = col[a] * col[b].conj();
            if a == b {
                out.push(elem.re);
            } else {
                out.push(std::f64::consts::SQRT_2 * elem.re);
            }
        }
    }
    out
}

fn real_rank(rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let m = DMatrix::<f64>::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let svd = m.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    svd.singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * smax)
        .count()
}

/// Ground-state tomogram of the harmonic oscillator, valid for all (mu, nu)
/// with mu^2 + nu^2 > 0.
pub fn gaussian_ground_tomogram(x: f64, mu: f64, nu: f64) -> f64 {
    let c2 = mu * mu + nu * nu;
    (-x * x / c2).exp() / (std::f64::consts::PI * c2).sqrt()
}
