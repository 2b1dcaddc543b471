//! Photon-number tomography on a truncated Fock space: displacement
//! operators, the displaced number-weight operator T, the kernel family
//! K^(s), tomograms and quadrature inversion.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::operator::OperatorMatrix;
use crate::special::{gauss_legendre, laguerre_assoc, QuadratureRule};

/// Number states |0> .. |nmax>; dimension nmax + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    pub nmax: usize,
}

impl FockSpace {
    pub fn new(nmax: usize) -> Result<Self> {
        if nmax < 1 {
            return Err(TomoError::OutOfRange {
                what: "nmax",
                value: nmax as f64,
                expected: "nmax >= 1",
            });
        }
        Ok(Self { nmax })
    }

    pub fn dim(&self) -> usize {
        self.nmax + 1
    }

    /// Annihilation operator: a|n> = sqrt(n)|n-1>.
    pub fn annihilation(&self) -> OperatorMatrix {
        let n = self.dim();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for k in 1..n {
            m[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
        }
        OperatorMatrix::from_matrix(m).expect("square")
    }

    /// Number operator a†a.
    pub fn number(&self) -> OperatorMatrix {
        let n = self.dim();
        OperatorMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(i as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
        .expect("square")
    }

    /// Parity (-1)^n.
    pub fn parity(&self) -> OperatorMatrix {
        let n = self.dim();
        OperatorMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
        .expect("square")
    }

    /// Position quadrature Q = (a + a†)/sqrt(2).
    pub fn position(&self) -> OperatorMatrix {
        let a = self.annihilation();
        a.add(&a.adjoint())
            .unwrap()
            .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    /// Momentum quadrature P = (a - a†)/(i sqrt(2)).
    pub fn momentum(&self) -> OperatorMatrix {
        let a = self.annihilation();
        a.sub(&a.adjoint())
            .unwrap()
            .scale(Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2))
    }

    /// Coherent state |alpha> truncated to the space, not re-normalized.
    pub fn coherent_state(&self, alpha: Complex64) -> nalgebra::DVector<Complex64> {
        let n = self.dim();
        let mut v = nalgebra::DVector::<Complex64>::zeros(n);
        let mut amp = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        v[0] = amp;
        for k in 1..n {
            amp *= alpha / Complex64::new((k as f64).sqrt(), 0.0);
            v[k] = amp;
        }
        v
    }
}

/// Displacement matrix plus its truncation-quality metric.
#[derive(Debug, Clone)]
pub struct Displacement {
    pub matrix: OperatorMatrix,
    /// Frobenius norm of D†D - I; vanishes as nmax grows past |alpha|^2.
    pub unitarity_defect: f64,
}

/// Closed-form matrix elements of D(alpha) = exp(alpha a† - alpha* a) on the
/// truncated basis.
pub fn displacement_matrix(alpha: Complex64, space: FockSpace) -> Displacement {
    let dim = space.dim();
    let x = alpha.norm_sqr();
    let gauss = (-x / 2.0).exp();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for row in 0..dim {
        for colidx in 0..dim {
            let (mhi, nlo, z) = if row >= colidx {
                (row, colidx, alpha)
            } else {
                (colidx, row, -alpha.conj())
            };
            // sqrt(nlo!/mhi!) = 1/sqrt((nlo+1)(nlo+2)..mhi)
            let mut ratio = 1.0_f64;
            for k in (nlo + 1)..=mhi {
                ratio /= k as f64;
            }
            let lag = laguerre_assoc(nlo as i64, (mhi - nlo) as i64, x).expect("valid orders");
            m[(row, colidx)] = z.powu((mhi - nlo) as u32) * (ratio.sqrt() * gauss * lag);
        }
    }
    let matrix = OperatorMatrix::from_matrix(m).expect("square");
    let prod = matrix.entries().adjoint() * matrix.entries();
    let id = DMatrix::<Complex64>::identity(dim, dim);
    Displacement {
        unitarity_defect: (prod - id).norm(),
        matrix,
    }
}

/// Tomogram value W(n, alpha) = <n| D†(alpha) rho D(alpha) |n>.
pub fn photon_tomogram(
    rho: &OperatorMatrix,
    n: usize,
    alpha: Complex64,
    space: FockSpace,
) -> Result<f64> {
    if rho.dim() != space.dim() {
        return Err(TomoError::DimensionMismatch {
            left: rho.dim(),
            right: space.dim(),
        });
    }
    if n > space.nmax {
        return Err(TomoError::OutOfRange {
            what: "photon number",
            value: n as f64,
            expected: "0 <= n <= nmax",
        });
    }
    let d = displacement_matrix(alpha, space).matrix;
    let col = d.entries().column(n);
    let mut val = Complex64::new(0.0, 0.0);
    for a in 0..space.dim() {
        for b in 0..space.dim() {
            val += col[a].conj() * rho.get(a, b) * col[b];
        }
    }
    Ok(val.re)
}

fn xi_of(s: f64) -> f64 {
    (s + 1.0) / (s - 1.0)
}

fn check_s(s: f64) -> Result<()> {
    if !(-1.0 < s && s < 1.0) {
        return Err(TomoError::OutOfRange {
            what: "ordering parameter s",
            value: s,
            expected: "open interval (-1, 1)",
        });
    }
    Ok(())
}

/// T(alpha, s) = D(alpha) xi^{a†a} D†(alpha) with xi = (s+1)/(s-1), evaluated
/// through its exact matrix elements so that truncation only limits the index
/// range, never the internal sums.
pub fn t_operator(alpha: Complex64, s: f64, space: FockSpace) -> Result<OperatorMatrix> {
    check_s(s)?;
    let xi = xi_of(s);
    let dim = space.dim();
    let one_minus_xi = 1.0 - xi;
    let b = alpha * one_minus_xi;
    let prefactor = (-one_minus_xi * alpha.norm_sqr()).exp();
    if !prefactor.is_finite() {
        return Err(TomoError::PrefactorOverflow {
            nmax: space.nmax,
            s,
            safe: "smaller |alpha| or |s|".into(),
        });
    }
    let ln_xi = xi.abs().ln();
    let ln_b = b.norm().max(f64::MIN_POSITIVE).ln();
    let mut ln_fact = vec![0.0_f64; dim];
    for k in 1..dim {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let phase_b = if b.norm() > 0.0 {
        b / Complex64::new(b.norm(), 0.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for row in 0..dim {
        for col in row..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=row.min(col) {
                let powers = (row - j) + (col - j);
                let ln_mag = 0.5 * (ln_fact[row] + ln_fact[col])
                    + (j as f64) * ln_xi
                    + (powers as f64) * ln_b
                    - ln_fact[j]
                    - ln_fact[row - j]
                    - ln_fact[col - j];
                if ln_mag > 700.0 {
                    return Err(TomoError::PrefactorOverflow {
                        nmax: space.nmax,
                        s,
                        safe: format!("|ln xi| * nmax <= {:.0}", 700.0),
                    });
                }
                let sign = if xi < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
                let phase = phase_b.powu((row - j) as u32) * phase_b.conj().powu((col - j) as u32);
                acc += phase * (sign * ln_mag.exp());
            }
            let val = acc * prefactor;
            m[(row, col)] = val;
            if row != col {
                m[(col, row)] = val.conj();
            }
        }
    }
    OperatorMatrix::from_matrix(m)
}

/// Safe lower bound on s for the kernel prefactor at a given truncation.
fn safe_s_range(nmax: usize) -> String {
    // |(s+1)/(s-1)|^nmax < 1e300
    let k = (300.0 * std::f64::consts::LN_10 / nmax as f64).exp();
    let s_hi = (k - 1.0) / (k + 1.0);
    format!("({:.6}, {:.6})", -s_hi, s_hi)
}

/// Kernel K^(s)(n, alpha) = 4/(1-s^2) * xi^n * T(alpha, -s).
///
/// The normalization and the sign of the displacement argument come from the
/// operator-basis completeness relation
/// A = 4/(1-s^2) int d^2(alpha)/pi Tr[A T(alpha, s)] T(alpha, -s),
/// which the reconstruction round trip verifies directly.
pub fn photon_kernel(
    n: usize,
    alpha: Complex64,
    s: f64,
    space: FockSpace,
) -> Result<OperatorMatrix> {
    check_s(s)?;
    if n > space.nmax {
        return Err(TomoError::OutOfRange {
            what: "photon number",
            value: n as f64,
            expected: "0 <= n <= nmax",
        });
    }
    let xi = xi_of(s);
    let ln_pref = (n as f64) * xi.abs().ln();
    if ln_pref > 300.0 * std::f64::consts::LN_10 {
        return Err(TomoError::PrefactorOverflow {
            nmax: space.nmax,
            s,
            safe: safe_s_range(space.nmax),
        });
    }
    let sign = if xi < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let pref = 4.0 / (1.0 - s * s) * sign * ln_pref.exp();
    let t = t_operator(alpha, -s, space)?;
    Ok(t.scale(Complex64::new(pref, 0.0)))
}

/// Polar quadrature grid over the complex alpha plane, measure d^2(alpha)/pi.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    pub radial: QuadratureRule,
    pub angular_count: usize,
    pub radius: f64,
}

impl PolarGrid {
    pub fn new(n_radial: usize, n_angular: usize, radius: f64) -> Result<Self> {
        if n_angular == 0 {
            return Err(TomoError::OutOfRange {
                what: "angular node count",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(Self {
            radial: gauss_legendre(n_radial, 0.0, radius)?,
            angular_count: n_angular,
            radius,
        })
    }

    /// Nodes alpha_k with effective weights w_k so that
    /// sum_k w_k f(alpha_k) ~ int f d^2(alpha)/pi.
    pub fn nodes(&self) -> Vec<(Complex64, f64)> {
        let dtheta = std::f64::consts::TAU / self.angular_count as f64;
        let mut out = Vec::with_capacity(self.radial.len() * self.angular_count);
        for (&r, &wr) in self.radial.nodes.iter().zip(&self.radial.weights) {
            for k in 0..self.angular_count {
                let theta = k as f64 * dtheta;
                let alpha = Complex64::from_polar(r, theta);
                out.push((alpha, wr * r * dtheta / std::f64::consts::PI));
            }
        }
        out
    }
}

/// Photon-number tomogram sampled on a polar grid: values[n][node].
#[derive(Debug, Clone)]
pub struct PhotonTomogram {
    pub space: FockSpace,
    pub ncut: usize,
    pub grid: PolarGrid,
    pub values: Vec<Vec<f64>>,
}

/// Samples W(n, alpha) for n <= ncut over the grid.
pub fn photon_tomogram_grid(
    rho: &OperatorMatrix,
    ncut: usize,
    grid: &PolarGrid,
    space: FockSpace,
) -> Result<PhotonTomogram> {
    if ncut > space.nmax {
        return Err(TomoError::OutOfRange {
            what: "ncut",
            value: ncut as f64,
            expected: "ncut <= nmax",
        });
    }
    if rho.dim() != space.dim() {
        return Err(TomoError::DimensionMismatch {
            left: rho.dim(),
            right: space.dim(),
        });
    }
    let nodes = grid.nodes();
    let mut values = vec![vec![0.0; nodes.len()]; ncut + 1];
    let dim = space.dim();
    for (idx, (alpha, _)) in nodes.iter().enumerate() {
        let d = displacement_matrix(*alpha, space).matrix;
        for (n, row) in values.iter_mut().enumerate() {
            let col = d.entries().column(n);
            let mut val = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                for b in 0..dim {
                    val += col[a].conj() * rho.get(a, b) * col[b];
                }
            }
            row[idx] = val.re;
        }
    }
    Ok(PhotonTomogram {
        space,
        ncut,
        grid: grid.clone(),
        values,
    })
}

/// Result of the photon-number inversion.
#[derive(Debug, Clone)]
pub struct PhotonReconstruction {
    pub matrix: OperatorMatrix,
    pub warnings: Vec<String>,
}

/// Inversion rho ~ sum_n int d^2(alpha)/pi W(n, alpha) K^(s)(n, alpha),
/// Hermitized. The n-sum collapses onto a single T evaluation per node.
///
/// The returned matrix lives on the (ncut + 1)-dimensional subspace the
/// tomogram actually resolves; elements beyond it are dominated by grid and
/// photon-number truncation and are not reported.
pub fn photon_reconstruct(tom: &PhotonTomogram, s: f64) -> Result<PhotonReconstruction> {
    check_s(s)?;
    let space = tom.space;
    let xi = xi_of(s);
    if (tom.ncut as f64) * xi.abs().ln() > 300.0 * std::f64::consts::LN_10 {
        return Err(TomoError::PrefactorOverflow {
            nmax: space.nmax,
            s,
            safe: safe_s_range(space.nmax),
        });
    }
    let nodes = tom.grid.nodes();
    for (n, row) in tom.values.iter().enumerate() {
        if row.len() != nodes.len() {
            return Err(TomoError::LengthMismatch {
                expected: nodes.len(),
                got: row.len(),
                detail: format!(" (tomogram row n = {n})"),
            });
        }
    }
    let out_dim = tom.ncut + 1;
    let mut acc = DMatrix::<Complex64>::zeros(out_dim, out_dim);
    let scale = 4.0 / (1.0 - s * s);
    for (idx, (alpha, w)) in nodes.iter().enumerate() {
        let mut bracket = 0.0;
        let mut xi_pow = 1.0;
        for n in 0..=tom.ncut {
            bracket += tom.values[n][idx] * xi_pow;
            xi_pow *= xi;
        }
        let t = t_operator(*alpha, -s, space)?;
        let factor = Complex64::new(w * scale * bracket, 0.0);
        for i in 0..out_dim {
            for j in 0..out_dim {
                acc[(i, j)] += t.get(i, j) * factor;
            }
        }
    }
    let matrix = OperatorMatrix::from_matrix(acc)?.hermitized();
    let mut warnings = Vec::new();
    let trace = matrix.trace().re;
    if (trace - 1.0).abs() > 0.05 {
        warnings.push(format!(
            "reconstructed trace {trace:.4} deviates from 1; the grid radius {} or the photon cutoff {} may truncate the state (estimated loss {:.3})",
            tom.grid.radius,
            tom.ncut,
            (trace - 1.0).abs()
        ));
    }
    Ok(PhotonReconstruction { matrix, warnings })
}

/// tau_s = i ln((s+1)/(s-1)) on the branch with ln(-x) = ln x - i pi, which
/// makes tau_0 = pi and stays continuous over s in (-1, 1).
pub fn tau_parameter(s: f64) -> Complex64 {
    let xi = xi_of(s);
    // xi < 0 on the whole interval
    Complex64::new(std::f64::consts::PI, xi.abs().ln())
}

/// Position matrix element <x| K^(s)(n, alpha) |y> of the kernel, by the
/// closed-form Gaussian propagator expression for <x| T(alpha, -s) |y>.
pub fn kernel_position_element(
    x: f64,
    y: f64,
    n: usize,
    alpha: Complex64,
    s: f64,
) -> Result<Complex64> {
    check_s(s)?;
    // alpha = (nu - i mu) / sqrt(2)
    let nu = std::f64::consts::SQRT_2 * alpha.re;
    let mu = -std::f64::consts::SQRT_2 * alpha.im;
    let tau = tau_parameter(-s);
    let sin_tau = tau.sin();
    if sin_tau.norm() < 1e-12 {
        return Err(TomoError::BranchAmbiguity {
            s,
            sin_tau: sin_tau.norm(),
        });
    }
    let cot_tau = tau.cos() / sin_tau;
    let xi = xi_of(s);
    let pref_n = {
        let sign = if xi < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        4.0 / (1.0 - s * s) * sign * ((n as f64) * xi.abs().ln()).exp()
    };
    let i = Complex64::new(0.0, 1.0);
    let root = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * sin_tau).sqrt();
    let xs = x - nu;
    let ys = y - nu;
    let exponent = i
        * ((xs * xs + ys * ys) * cot_tau / 2.0 - (xs * ys) / sin_tau
            + Complex64::new(-mu * (x - y), 0.0)
            + tau / 2.0);
    Ok(exponent.exp() / root * pref_n)
}
