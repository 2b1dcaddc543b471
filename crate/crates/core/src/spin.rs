//! Spin tomography: the U(2) family and its explicit kernel, and the general
//! spin-j kernel built from 3j symbols and rotation functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::operator::{projector_from_vector, OperatorMatrix, RankOneProjector};
use crate::special::{
    descending_projections, gauss_legendre, uniform_periodic, wigner_3j, wigner_d_matrix,
    wigner_small_d, HalfInteger,
};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Point on the unit sphere; phi is fixed to 0 at the poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereDirection {
    pub theta: f64,
    pub phi: f64,
}

impl SphereDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(TomoError::OutOfRange {
                what: "theta",
                value: theta,
                expected: "[0, pi]",
            });
        }
        let tau = std::f64::consts::TAU;
        let mut phi = phi.rem_euclid(tau);
        if phi >= tau {
            phi = 0.0;
        }
        if theta == 0.0 || theta == std::f64::consts::PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Direction of the orthogonal-complement projector.
    pub fn antipode(&self) -> SphereDirection {
        SphereDirection::new(
            std::f64::consts::PI - self.theta,
            self.phi + std::f64::consts::PI,
        )
        .expect("antipode stays in range")
    }
}

/// Sphere quadrature node carrying its theta- and phi-weight factors; the
/// theta weight already contains the sin(theta) measure.
#[derive(Debug, Clone, Copy)]
pub struct SphereNode {
    pub dir: SphereDirection,
    pub w_theta: f64,
    pub w_phi: f64,
}

impl SphereNode {
    pub fn weight(&self) -> f64 {
        self.w_theta * self.w_phi
    }
}

/// Product quadrature over the sphere with the solid-angle measure folded
/// into the node weights.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    nodes: Vec<SphereNode>,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SphereQuadrature {
    /// Gauss-Legendre in cos(theta) times a uniform rule in phi; integrates
    /// spherical harmonics up to high degree exactly.
    pub fn gauss_product(n_theta: usize, n_phi: usize) -> Result<Self> {
        let u_rule = gauss_legendre(n_theta, -1.0, 1.0)?;
        let phi_rule = uniform_periodic(n_phi, std::f64::consts::TAU)?;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for (&u, &wu) in u_rule.nodes.iter().zip(&u_rule.weights) {
            let theta = u.clamp(-1.0, 1.0).acos();
            for (&phi, &wp) in phi_rule.nodes.iter().zip(&phi_rule.weights) {
                nodes.push(SphereNode {
                    dir: SphereDirection::new(theta, phi)?,
                    w_theta: wu,
                    w_phi: wp,
                });
            }
        }
        Ok(Self {
            nodes,
            n_theta,
            n_phi,
        })
    }

    /// Midpoint rule in theta times uniform phi; node weights are the patch
    /// solid angles sin(theta) dtheta dphi.
    pub fn uniform_grid(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(TomoError::OutOfRange {
                what: "sphere grid size",
                value: 0.0,
                expected: "counts >= 1",
            });
        }
        let dtheta = std::f64::consts::PI / n_theta as f64;
        let phi_rule = uniform_periodic(n_phi, std::f64::consts::TAU)?;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let theta = (i as f64 + 0.5) * dtheta;
            for (&phi, &wp) in phi_rule.nodes.iter().zip(&phi_rule.weights) {
                nodes.push(SphereNode {
                    dir: SphereDirection::new(theta, phi)?,
                    w_theta: theta.sin() * dtheta,
                    w_phi: wp,
                });
            }
        }
        Ok(Self {
            nodes,
            n_theta,
            n_phi,
        })
    }

    /// Rebuilds a quadrature from explicit nodes (for deserialized grids).
    pub fn from_nodes(nodes: Vec<SphereNode>, n_theta: usize, n_phi: usize) -> Self {
        Self {
            nodes,
            n_theta,
            n_phi,
        }
    }

    pub fn nodes(&self) -> &[SphereNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// n.sigma: the traceless Hermitian operator measured along `dir`.
pub fn spin_half_family(dir: &SphereDirection) -> OperatorMatrix {
    let (st, ct) = dir.theta.sin_cos();
    let phase = Complex64::from_polar(1.0, -dir.phi);
    OperatorMatrix::from_rows(&[
        vec![Complex64::new(ct, 0.0), phase * st],
        vec![phase.conj() * st, Complex64::new(-ct, 0.0)],
    ])
    .expect("2x2 by construction")
}

/// Rank-one projector (I + n.sigma)/2 onto the +1 eigenvector.
pub fn spin_half_projector(dir: &SphereDirection) -> RankOneProjector {
    let half = dir.theta / 2.0;
    let v = DVector::from_vec(vec![
        Complex64::from_polar(half.cos(), -dir.phi / 2.0),
        Complex64::from_polar(half.sin(), dir.phi / 2.0),
    ]);
    projector_from_vector(&v).expect("unit vector")
}

/// The explicit U(2) reconstruction kernel
/// (1/4pi) [[1 + 3cos(theta), 3 e^{-i phi} sin(theta)], [..., 1 - 3cos(theta)]].
pub fn spin_half_kernel(dir: &SphereDirection) -> OperatorMatrix {
    let (st, ct) = dir.theta.sin_cos();
    let phase = Complex64::from_polar(1.0, -dir.phi);
    OperatorMatrix::from_rows(&[
        vec![
            Complex64::new((1.0 + 3.0 * ct) / FOUR_PI, 0.0),
            phase * (3.0 * st / FOUR_PI),
        ],
        vec![
            phase.conj() * (3.0 * st / FOUR_PI),
            Complex64::new((1.0 - 3.0 * ct) / FOUR_PI, 0.0),
        ],
    ])
    .expect("2x2 by construction")
}

/// Quadrature reconstruction A = sum_nodes w K(node) values(node) from the
/// tomogram table aligned with `quad.nodes()`.
pub fn spin_half_reconstruct(values: &[f64], quad: &SphereQuadrature) -> Result<OperatorMatrix> {
    if values.len() != quad.len() {
        let missing = (values.len().min(quad.len())..quad.len()).collect();
        return Err(TomoError::MissingNodes { missing });
    }
    let mut acc = DMatrix::<Complex64>::zeros(2, 2);
    for (node, &v) in quad.nodes().iter().zip(values) {
        acc += spin_half_kernel(&node.dir).entries() * Complex64::new(node.weight() * v, 0.0);
    }
    OperatorMatrix::from_matrix(acc)
}

/// Convenience wrapper evaluating the tomogram function at every node.
pub fn spin_half_reconstruct_fn(
    f: impl Fn(&SphereDirection) -> f64,
    quad: &SphereQuadrature,
) -> OperatorMatrix {
    let values: Vec<f64> = quad.nodes().iter().map(|n| f(&n.dir)).collect();
    spin_half_reconstruct(&values, quad).expect("lengths match by construction")
}

/// Max deviation from the identity of the swapped decomposition
/// I = int P(theta, phi) Tr(K(theta, phi) . ) dOmega, probed on the
/// elementary-matrix basis.
pub fn dual_identity_check(quad: &SphereQuadrature) -> f64 {
    let mut worst = 0.0_f64;
    for a in 0..2 {
        for b in 0..2 {
            let mut basis = DMatrix::<Complex64>::zeros(2, 2);
            basis[(a, b)] = Complex64::new(1.0, 0.0);
            let target = basis.clone();
            let mut acc = DMatrix::<Complex64>::zeros(2, 2);
            for node in quad.nodes() {
                let k = spin_half_kernel(&node.dir);
                // K is Hermitian so Tr(K B) needs no adjoint
                let weight: Complex64 = (k.entries() * &basis).diagonal().sum();
                acc += spin_half_projector(&node.dir).matrix().entries() * (weight * node.weight());
            }
            let dev = (acc - target).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            worst = worst.max(dev);
        }
    }
    worst
}

/// Reconstruction kernel for spin j at outcome m and direction (theta, phi).
///
/// Built from the double sum over j3 <= 2j and m3 with weight (2 j3 + 1)^2,
/// the two 3j symbols pairing (m, -m, 0) and the matrix indices, and the
/// rotation functions d^{j3}_{m3,0}; the gamma average contributes the
/// 1/(4 pi) normalization. Phases follow the active z-y-z convention used by
/// `wigner_d_matrix`, fixed so that the reconstruction identity holds.
pub fn spin_j_kernel(
    j: HalfInteger,
    m: HalfInteger,
    dir: &SphereDirection,
) -> Result<OperatorMatrix> {
    if !m.is_projection_of(j) {
        return Err(TomoError::BadAngularMomentum(format!(
            "outcome {m} out of range for j = {j}"
        )));
    }
    let dim = j.dimension();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for (r, sp) in descending_projections(j).enumerate() {
        for (col, spp) in descending_projections(j).enumerate() {
            // the second 3j selects the single surviving m3 = spp - sp
            let m3 = HalfInteger::from_twice(spp.twice() - sp.twice());
            let mut acc = 0.0_f64;
            for tj3 in (0..=j.twice() * 2).step_by(2) {
                let j3 = HalfInteger::from_twice(tj3);
                if m3.twice().abs() > tj3 {
                    continue;
                }
                let w1 = wigner_3j(
                    j,
                    j,
                    j3,
                    m,
                    HalfInteger::from_twice(-m.twice()),
                    HalfInteger::ZERO,
                )?;
                if w1 == 0.0 {
                    continue;
                }
                let w2 = wigner_3j(
                    j,
                    j,
                    j3,
                    spp,
                    HalfInteger::from_twice(-sp.twice()),
                    HalfInteger::from_twice(-m3.twice()),
                )?;
                if w2 == 0.0 {
                    continue;
                }
                let weight = ((tj3 + 1) as f64).powi(2);
                let d = wigner_small_d(j3, m3, HalfInteger::ZERO, dir.theta)?;
                acc += weight * w1 * w2 * d;
            }
            // phase (-1)^(spp - m), an integer power
            let sign_exp = (spp.twice() - m.twice()) / 2;
            let sign = if sign_exp.rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            };
            let phase = Complex64::from_polar(1.0, m3.value() * dir.phi);
            out[(r, col)] = phase * (acc * sign / FOUR_PI);
        }
    }
    OperatorMatrix::from_matrix(out)
}

/// Tomogram values over a sphere quadrature: rows are nodes, columns are the
/// outcomes m = +j .. -j.
#[derive(Debug, Clone)]
pub struct SpinTomogramGrid {
    pub j: HalfInteger,
    pub quad: SphereQuadrature,
    /// values[node][m_index] with m ordered +j .. -j.
    pub values: Vec<Vec<f64>>,
}

/// Probabilities Tr(R |m><m| R† rho) for every node and outcome; the residual
/// Euler angle is fixed to gamma = 0, which leaves the projectors unchanged.
pub fn spin_j_tomogram(
    rho: &OperatorMatrix,
    j: HalfInteger,
    quad: &SphereQuadrature,
) -> Result<SpinTomogramGrid> {
    let dim = j.dimension();
    if rho.dim() != dim {
        return Err(TomoError::DimensionMismatch {
            left: rho.dim(),
            right: dim,
        });
    }
    let values = quad
        .nodes()
        .iter()
        .map(|node| spin_j_tomogram_at(rho, j, &node.dir))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpinTomogramGrid {
        j,
        quad: quad.clone(),
        values,
    })
}

/// Outcome distribution at a single direction, ordered m = +j .. -j.
pub fn spin_j_tomogram_at(
    rho: &OperatorMatrix,
    j: HalfInteger,
    dir: &SphereDirection,
) -> Result<Vec<f64>> {
    let dim = j.dimension();
    if rho.dim() != dim {
        return Err(TomoError::DimensionMismatch {
            left: rho.dim(),
            right: dim,
        });
    }
    let rot = wigner_d_matrix(j, dir.phi, dir.theta, 0.0)?;
    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        let col = rot.column(k);
        let mut val = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            for b in 0..dim {
                val += col[a].conj() * rho.get(a, b) * col[b];
            }
        }
        out.push(val.re);
    }
    Ok(out)
}

/// Result of a spin-j inversion together with any quadrature warnings.
#[derive(Debug, Clone)]
pub struct SpinReconstruction {
    pub matrix: OperatorMatrix,
    pub warnings: Vec<String>,
}

/// Inverts a spin-j tomogram grid: rho = sum_m int dOmega W(m, n) K(m, n).
pub fn spin_j_reconstruct(grid: &SpinTomogramGrid) -> Result<SpinReconstruction> {
    let j = grid.j;
    let dim = j.dimension();
    let mut warnings = Vec::new();
    let needed = 2 * dim;
    if grid.quad.n_theta < needed || grid.quad.n_phi < needed {
        warnings.push(format!(
            "quadrature {}x{} may under-resolve spin {} (recommend at least {}x{})",
            grid.quad.n_theta, grid.quad.n_phi, j, needed, needed
        ));
    }
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for (node, row) in grid.quad.nodes().iter().zip(&grid.values) {
        if row.len() != dim {
            return Err(TomoError::LengthMismatch {
                expected: dim,
                got: row.len(),
                detail: " (outcomes per node)".into(),
            });
        }
        for (mi, m) in descending_projections(j).enumerate() {
            let kernel = spin_j_kernel(j, m, &node.dir)?;
            acc += kernel.entries() * Complex64::new(node.weight() * row[mi], 0.0);
        }
    }
    Ok(SpinReconstruction {
        matrix: OperatorMatrix::from_matrix(acc)?,
        warnings,
    })
}
