//! Tomographic sets of rank-one projectors, their Gram-Schmidt dual kernels,
//! and reconstruction from measured tomograms.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::operator::{
    hs_inner, mat_to_vec, projector_from_vector, vec_to_mat, OperatorMatrix, RankOneProjector,
};

/// Dense n^2 x n^2 solves get slow and ill-conditioned past this point.
pub const DENSE_DIM_CAP: usize = 32;

/// Relative singular-value threshold that counts toward numerical rank.
pub const RANK_RTOL: f64 = 1e-10;

/// Skewness tolerance for unitary pairs.
pub const SKEW_TOL: f64 = 1e-10;

/// Labeled family of rank-one projectors on a common space.
#[derive(Debug, Clone)]
pub struct TomographicSet {
    dim: usize,
    projectors: Vec<RankOneProjector>,
    labels: Vec<String>,
}

impl TomographicSet {
    pub fn new(dim: usize, projectors: Vec<RankOneProjector>, labels: Vec<String>) -> Result<Self> {
        for p in &projectors {
            if p.dim() != dim {
                return Err(TomoError::DimensionMismatch {
                    left: p.dim(),
                    right: dim,
                });
            }
        }
        if labels.len() != projectors.len() {
            return Err(TomoError::LengthMismatch {
                expected: projectors.len(),
                got: labels.len(),
                detail: " (labels)".into(),
            });
        }
        Ok(Self {
            dim,
            projectors,
            labels,
        })
    }

    /// Projectors labeled with their indices.
    pub fn from_projectors(dim: usize, projectors: Vec<RankOneProjector>) -> Result<Self> {
        let labels = (0..projectors.len()).map(|k| k.to_string()).collect();
        Self::new(dim, projectors, labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[RankOneProjector] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Matrix whose k-th row is the flattened k-th projector.
    fn vector_matrix(&self) -> DMatrix<Complex64> {
        let m = self.len();
        let n2 = self.dim * self.dim;
        let mut out = DMatrix::zeros(m, n2);
        for (k, p) in self.projectors.iter().enumerate() {
            let v = mat_to_vec(p.matrix());
            for j in 0..n2 {
                out[(k, j)] = v[j];
            }
        }
        out
    }
}

/// Diagnostics from the minimality test.
#[derive(Debug, Clone, Copy)]
pub struct MinimalityReport {
    pub minimal: bool,
    pub rank: usize,
    pub condition_number: f64,
}

/// Gram-Schmidt coefficients together with the dual operators they define.
#[derive(Debug, Clone)]
pub struct GramKernel {
    gamma: DMatrix<Complex64>,
    duals: Vec<OperatorMatrix>,
}

impl GramKernel {
    pub fn gamma(&self) -> &DMatrix<Complex64> {
        &self.gamma
    }

    pub fn duals(&self) -> &[OperatorMatrix] {
        &self.duals
    }

    pub fn dim(&self) -> usize {
        self.duals.first().map_or(0, |k| k.dim())
    }
}

/// Probabilities of a state against a tomographic set, aligned with its labels.
#[derive(Debug, Clone)]
pub struct Tomogram {
    set: Arc<TomographicSet>,
    values: Vec<f64>,
}

impl Tomogram {
    pub fn new(set: Arc<TomographicSet>, values: Vec<f64>) -> Result<Self> {
        if values.len() != set.len() {
            return Err(TomoError::LengthMismatch {
                expected: set.len(),
                got: values.len(),
                detail: " (tomogram values)".into(),
            });
        }
        Ok(Self { set, values })
    }

    pub fn set(&self) -> &Arc<TomographicSet> {
        &self.set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Tomogram of a Hermitian operator: values[k] = Re Tr(P_k rho).
pub fn tomogram(rho: &OperatorMatrix, set: &Arc<TomographicSet>) -> Result<Tomogram> {
    if rho.dim() != set.dim() {
        return Err(TomoError::DimensionMismatch {
            left: rho.dim(),
            right: set.dim(),
        });
    }
    let values = set
        .projectors()
        .iter()
        .map(|p| hs_inner(p.matrix(), rho).map(|z| z.re))
        .collect::<Result<Vec<_>>>()?;
    Tomogram::new(Arc::clone(set), values)
}

/// Tests whether exactly n^2 projectors span the full operator space.
pub fn is_minimal_tomographic_set(set: &TomographicSet) -> Result<MinimalityReport> {
    let n = set.dim();
    check_dim_cap(n)?;
    let expected = n * n;
    if set.len() != expected {
        let hint = if set.len() < expected {
            "too few"
        } else {
            "too many"
        };
        return Err(TomoError::WrongProjectorCount {
            dim: n,
            expected,
            got: set.len(),
            hint,
        });
    }
    let m = set.vector_matrix();
    let svd = m.svd(false, false);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let rank = sv.iter().filter(|&&s| s > RANK_RTOL * smax).count();
    let condition_number = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    Ok(MinimalityReport {
        minimal: rank == expected,
        rank,
        condition_number,
    })
}

/// Orthonormalizes the projector family and builds the dual operators
/// K_l = sum_j conj(gamma_jl) V_j satisfying sum_l K_l Tr(P_l A) = A.
pub fn gram_schmidt(set: &TomographicSet) -> Result<GramKernel> {
    let n = set.dim();
    check_dim_cap(n)?;
    let m = set.len();
    let n2 = n * n;
    if m != n2 {
        let hint = if m < n2 { "too few" } else { "too many" };
        return Err(TomoError::WrongProjectorCount {
            dim: n,
            expected: n2,
            got: m,
            hint,
        });
    }

    let p_vecs: Vec<DVector<Complex64>> = set
        .projectors()
        .iter()
        .map(|p| mat_to_vec(p.matrix()))
        .collect();

    let mut v_vecs: Vec<DVector<Complex64>> = Vec::with_capacity(m);
    let mut gamma_rows: Vec<DVector<Complex64>> = Vec::with_capacity(m);
    for (j, p) in p_vecs.iter().enumerate() {
        let mut v = p.clone();
        let mut coeff = DVector::<Complex64>::zeros(m);
        coeff[j] = Complex64::new(1.0, 0.0);
        // modified Gram-Schmidt, one refinement pass
        for _ in 0..2 {
            for (i, vi) in v_vecs.iter().enumerate() {
                let mu: Complex64 = vi.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v -= vi * mu;
                coeff -= &gamma_rows[i] * mu;
            }
        }
        let norm = v.norm();
        if norm <= RANK_RTOL * p.norm() {
            return Err(TomoError::RankDeficient {
                rank: j,
                expected: m,
            });
        }
        let inv = Complex64::new(1.0 / norm, 0.0);
        v_vecs.push(v * inv);
        gamma_rows.push(coeff * inv);
    }

    let gamma = DMatrix::from_fn(m, m, |j, k| gamma_rows[j][k]);
    let mut duals = Vec::with_capacity(m);
    for l in 0..m {
        let mut kv = DVector::<Complex64>::zeros(n2);
        for (j, vj) in v_vecs.iter().enumerate() {
            kv += vj * gamma[(j, l)].conj();
        }
        duals.push(vec_to_mat(&kv)?);
    }
    Ok(GramKernel { gamma, duals })
}

/// Frobenius distance of sum_l |K_l><P_l| from the identity on operator space.
pub fn identity_check(kernel: &GramKernel, set: &TomographicSet) -> Result<f64> {
    let n = set.dim();
    let n2 = n * n;
    if kernel.duals.len() != set.len() {
        return Err(TomoError::LengthMismatch {
            expected: set.len(),
            got: kernel.duals.len(),
            detail: " (dual operators)".into(),
        });
    }
    let mut s = DMatrix::<Complex64>::zeros(n2, n2);
    for (kl, pl) in kernel.duals.iter().zip(set.projectors()) {
        if kl.dim() != n {
            return Err(TomoError::DimensionMismatch {
                left: kl.dim(),
                right: n,
            });
        }
        let kv = mat_to_vec(kl);
        let pv = mat_to_vec(pl.matrix());
        for i in 0..n2 {
            for j in 0..n2 {
                s[(i, j)] += kv[i] * pv[j].conj();
            }
        }
    }
    for i in 0..n2 {
        s[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    Ok(s.norm())
}

/// Linear inversion: sum_l values[l] K_l.
pub fn reconstruct(tom: &Tomogram, kernel: &GramKernel) -> Result<OperatorMatrix> {
    if tom.values().len() != kernel.duals.len() {
        return Err(TomoError::LengthMismatch {
            expected: kernel.duals.len(),
            got: tom.values().len(),
            detail: " (tomogram vs duals)".into(),
        });
    }
    let n = kernel.dim();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for (kl, &w) in kernel.duals.iter().zip(tom.values()) {
        acc += kl.entries() * Complex64::new(w, 0.0);
    }
    OperatorMatrix::from_matrix(acc)
}

/// Conjugates a fiducial projector by a family of unitaries.
pub fn set_from_unitary_family(
    p0: &RankOneProjector,
    unitaries: &[OperatorMatrix],
) -> Result<TomographicSet> {
    let n = p0.dim();
    let mut projectors = Vec::with_capacity(unitaries.len());
    for (index, u) in unitaries.iter().enumerate() {
        if u.dim() != n {
            return Err(TomoError::DimensionMismatch {
                left: u.dim(),
                right: n,
            });
        }
        let residual = unitarity_defect(u);
        if residual > 1e-10 {
            return Err(TomoError::NotUnitary { index, residual });
        }
        let v = u.entries() * p0.vector();
        projectors.push(projector_from_vector(&v)?);
    }
    TomographicSet::from_projectors(n, projectors)
}

fn unitarity_defect(u: &OperatorMatrix) -> f64 {
    let n = u.dim();
    let prod = u.entries().adjoint() * u.entries();
    let id = DMatrix::<Complex64>::identity(n, n);
    (prod - id).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Outcome of the skewness test on a pair of 2x2 unitaries.
#[derive(Debug, Clone, Copy)]
pub struct SkewReport {
    pub skew: bool,
    pub determinant_value: f64,
}

/// Extracts (a, b) from a matrix of the form [[a, b], [-b*, a*]].
fn su2_components(u: &OperatorMatrix) -> Result<(Complex64, Complex64)> {
    if u.dim() != 2 {
        return Err(TomoError::BadUnitaryForm {
            residual: f64::INFINITY,
        });
    }
    let a = u.get(0, 0);
    let b = u.get(0, 1);
    let residual = (u.get(1, 0) + b.conj())
        .norm()
        .max((u.get(1, 1) - a.conj()).norm())
        .max((a.norm_sqr() + b.norm_sqr() - 1.0).abs());
    if residual > 1e-10 {
        return Err(TomoError::BadUnitaryForm { residual });
    }
    Ok((a, b))
}

/// Im(a1 b1 a2* b2*) decides whether two rotated bases, together with the
/// standard basis, contain a minimal tomographic subset.
pub fn skew_pair_check(u1: &OperatorMatrix, u2: &OperatorMatrix) -> Result<SkewReport> {
    let (a1, b1) = su2_components(u1)?;
    let (a2, b2) = su2_components(u2)?;
    let value = (a1 * b1 * a2.conj() * b2.conj()).im;
    Ok(SkewReport {
        skew: value.abs() > SKEW_TOL,
        determinant_value: value,
    })
}

/// Frobenius norm of sum_k w_k P_k - I.
pub fn povm_check(set: &TomographicSet, weights: &[f64]) -> Result<f64> {
    if weights.len() != set.len() {
        return Err(TomoError::LengthMismatch {
            expected: set.len(),
            got: weights.len(),
            detail: " (weights)".into(),
        });
    }
    let n = set.dim();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for (p, &w) in set.projectors().iter().zip(weights) {
        acc += p.matrix().entries() * Complex64::new(w, 0.0);
    }
    let id = DMatrix::<Complex64>::identity(n, n);
    Ok((acc - id).norm())
}

/// Greedy pivoted selection of n^2 projectors spanning the operator space,
/// for supersets with more than n^2 members.
pub fn select_minimal_subset(set: &TomographicSet) -> Result<TomographicSet> {
    let n = set.dim();
    check_dim_cap(n)?;
    let n2 = n * n;
    if set.len() < n2 {
        return Err(TomoError::WrongProjectorCount {
            dim: n,
            expected: n2,
            got: set.len(),
            hint: "too few",
        });
    }
    let vecs: Vec<DVector<Complex64>> = set
        .projectors()
        .iter()
        .map(|p| mat_to_vec(p.matrix()))
        .collect();
    let mut residuals = vecs.clone();
    let mut chosen: Vec<usize> = Vec::with_capacity(n2);
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(n2);
    for _ in 0..n2 {
        let (best, norm) = residuals
            .iter()
            .enumerate()
            .filter(|(k, _)| !chosen.contains(k))
            .map(|(k, r)| (k, r.norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if norm <= RANK_RTOL * vecs[best].norm().max(1.0) {
            return Err(TomoError::RankDeficient {
                rank: chosen.len(),
                expected: n2,
            });
        }
        let q = residuals[best].clone() / Complex64::new(norm, 0.0);
        for (k, r) in residuals.iter_mut().enumerate() {
            if chosen.contains(&k) || k == best {
                continue;
            }
            let mu: Complex64 = q.iter().zip(r.iter()).map(|(a, b)| a.conj() * b).sum();
            *r -= &q * mu;
        }
        chosen.push(best);
        basis.push(q);
    }
    chosen.sort_unstable();
    let projectors = chosen
        .iter()
        .map(|&k| set.projectors()[k].clone())
        .collect();
    let labels = chosen.iter().map(|&k| set.labels()[k].clone()).collect();
    TomographicSet::new(n, projectors, labels)
}

fn check_dim_cap(n: usize) -> Result<()> {
    if n > DENSE_DIM_CAP {
        return Err(TomoError::DimensionTooLarge {
            dim: n,
            cap: DENSE_DIM_CAP,
        });
    }
    Ok(())
}

/// Seeded random minimal set, rejection-sampled to the given condition cap.
pub fn random_minimal_set(n: usize, seed: u64, condition_cap: f64) -> Result<Arc<TomographicSet>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let projectors: Vec<RankOneProjector> = (0..n * n)
            .map(|_| {
                let v = crate::operator::random_unit_vector(n, &mut rng);
                projector_from_vector(&v)
            })
            .collect::<Result<_>>()?;
        let set = TomographicSet::from_projectors(n, projectors)?;
        let report = is_minimal_tomographic_set(&set)?;
        if report.minimal && report.condition_number < condition_cap {
            return Ok(Arc::new(set));
        }
    }
    Err(TomoError::RankDeficient {
        rank: 0,
        expected: n * n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::random_density_matrix;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis_projector(n: usize, k: usize) -> RankOneProjector {
        let mut v = DVector::from_element(n, c(0.0, 0.0));
        v[k] = c(1.0, 0.0);
        projector_from_vector(&v).unwrap()
    }

    fn su2(a: Complex64, b: Complex64) -> OperatorMatrix {
        OperatorMatrix::from_rows(&[vec![a, b], vec![-b.conj(), a.conj()]]).unwrap()
    }

    /// Standard basis plus both columns of two unitaries: the six-projector
    /// family whose rank decides skewness.
    fn six_projector_set(u1: &OperatorMatrix, u2: &OperatorMatrix) -> TomographicSet {
        let mut projectors = vec![basis_projector(2, 0), basis_projector(2, 1)];
        for u in [u1, u2] {
            for col in 0..2 {
                let v = DVector::from_vec(vec![u.get(0, col), u.get(1, col)]);
                projectors.push(projector_from_vector(&v).unwrap());
            }
        }
        TomographicSet::from_projectors(2, projectors).unwrap()
    }

    #[test]
    fn tomogram_projector_and_maximally_mixed() {
        let set = random_minimal_set(2, 5, 1e6).unwrap();
        let p0 = set.projectors()[0].matrix().clone();
        let tom = tomogram(&p0, &set).unwrap();
        assert_abs_diff_eq!(tom.values()[0], 1.0, epsilon = 1e-12);

        let mixed = OperatorMatrix::identity(2).scale(c(0.5, 0.0));
        let tom = tomogram(&mixed, &set).unwrap();
        for v in tom.values() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn tomogram_matches_trace_oracle() {
        let set = random_minimal_set(3, 6, 1e6).unwrap();
        let rho = random_density_matrix(3, 17).unwrap();
        let tom = tomogram(&rho, &set).unwrap();
        for (p, &v) in set.projectors().iter().zip(tom.values()) {
            let direct = p.matrix().mul(&rho).unwrap().trace().re;
            assert_abs_diff_eq!(v, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn tomogram_dimension_mismatch() {
        let set = random_minimal_set(2, 5, 1e6).unwrap();
        let rho = random_density_matrix(3, 1).unwrap();
        assert!(tomogram(&rho, &set).is_err());
    }

    #[test]
    fn minimality_repeated_projector_fails() {
        let p = basis_projector(2, 0);
        let set =
            TomographicSet::from_projectors(2, vec![p.clone(), p.clone(), p.clone(), p]).unwrap();
        let report = is_minimal_tomographic_set(&set).unwrap();
        assert!(!report.minimal);
        assert_eq!(report.rank, 1);
        assert!(report.condition_number.is_infinite() || report.condition_number > 1e12);
    }

    #[test]
    fn minimality_wrong_count_errors() {
        let set = TomographicSet::from_projectors(2, vec![basis_projector(2, 0)]).unwrap();
        match is_minimal_tomographic_set(&set) {
            Err(TomoError::WrongProjectorCount { hint, .. }) => assert_eq!(hint, "too few"),
            other => panic!("unexpected: {other:?}"),
        }
        let set =
            TomographicSet::from_projectors(2, (0..5).map(|k| basis_projector(2, k % 2)).collect())
                .unwrap();
        match is_minimal_tomographic_set(&set) {
            Err(TomoError::WrongProjectorCount { hint, .. }) => assert_eq!(hint, "too many"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn six_vector_family_from_skew_pair_contains_minimal_subset() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u1 = su2(c(s, 0.0), c(s, 0.0));
        let u2 = su2(c(s, 0.0), c(0.0, s));
        let report = skew_pair_check(&u1, &u2).unwrap();
        assert!(report.skew);
        assert_abs_diff_eq!(report.determinant_value, -0.25, epsilon = 1e-12);

        let six = six_projector_set(&u1, &u2);
        let subset = select_minimal_subset(&six).unwrap();
        let report = is_minimal_tomographic_set(&subset).unwrap();
        assert!(report.minimal);
        assert_eq!(report.rank, 4);
    }

    #[test]
    fn skew_check_degenerate_pairs() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u1 = su2(c(s, 0.0), c(s, 0.0));
        let report = skew_pair_check(&u1, &u1).unwrap();
        assert!(!report.skew);
        assert_abs_diff_eq!(report.determinant_value, 0.0, epsilon = 1e-15);

        let diag = su2(c(0.8, 0.6), c(0.0, 0.0));
        let report = skew_pair_check(&diag, &u1).unwrap();
        assert!(!report.skew);
    }

    #[test]
    fn skew_check_rejects_bad_form() {
        let not_su2 = OperatorMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(skew_pair_check(&not_su2, &not_su2).is_err());
    }

    #[test]
    fn gram_schmidt_n1() {
        let set = TomographicSet::from_projectors(1, vec![basis_projector(1, 0)]).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        assert!((kernel.gamma()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((kernel.duals()[0].get(0, 0) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gram_kernel_orthonormality_and_biorthogonality() {
        let set = random_minimal_set(2, 11, 1e6).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        // <V_i|V_j> = delta_ij
        let m = set.len();
        let p_vecs: Vec<_> = set
            .projectors()
            .iter()
            .map(|p| mat_to_vec(p.matrix()))
            .collect();
        for i in 0..m {
            for j in 0..m {
                let vi: DVector<Complex64> = (0..m)
                    .map(|k| (kernel.gamma()[(i, k)], k))
                    .fold(DVector::zeros(4), |acc, (g, k)| acc + &p_vecs[k] * g);
                let vj: DVector<Complex64> = (0..m)
                    .map(|k| (kernel.gamma()[(j, k)], k))
                    .fold(DVector::zeros(4), |acc, (g, k)| acc + &p_vecs[k] * g);
                let inner: Complex64 = vi.iter().zip(vj.iter()).map(|(a, b)| a.conj() * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((inner - c(want, 0.0)).norm() < 1e-10);
            }
        }
        // Tr(K_l P_k) = delta_lk
        for (l, kl) in kernel.duals().iter().enumerate() {
            assert!(kl.hermiticity_defect() < 1e-8);
            for (k, p) in set.projectors().iter().enumerate() {
                let v = hs_inner(kl, p.matrix()).unwrap();
                let want = if l == k { 1.0 } else { 0.0 };
                assert!((v - c(want, 0.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn gram_kernel_reconstructs_arbitrary_operators() {
        let set = random_minimal_set(2, 23, 1e6).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        for seed in 0..20 {
            let a = random_density_matrix(2, 1000 + seed).unwrap();
            let tom = tomogram(&a, &set).unwrap();
            let rec = reconstruct(&tom, &kernel).unwrap();
            assert!((rec.entries() - a.entries()).norm() < 1e-8);
        }
    }

    #[test]
    fn gram_schmidt_rejects_rank_deficient() {
        let p = basis_projector(2, 0);
        let set =
            TomographicSet::from_projectors(2, vec![p.clone(), p.clone(), p.clone(), p]).unwrap();
        match gram_schmidt(&set) {
            Err(TomoError::RankDeficient { rank, expected }) => {
                assert!(rank < expected);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn identity_check_valid_and_zeroed() {
        let set = random_minimal_set(2, 31, 1e6).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        let residual = identity_check(&kernel, &set).unwrap();
        assert!(residual < 1e-8, "residual {residual}");

        let zeroed = GramKernel {
            gamma: kernel.gamma().clone(),
            duals: vec![OperatorMatrix::zeros(2); 4],
        };
        let residual = identity_check(&zeroed, &set).unwrap();
        assert_abs_diff_eq!(residual, 2.0, epsilon = 1e-12); // sqrt(n^2) = n
    }

    #[test]
    fn identity_check_perturbation_grows() {
        let set = random_minimal_set(2, 37, 1e6).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        let mut last = identity_check(&kernel, &set).unwrap();
        for eps in [1e-3, 1e-2, 1e-1] {
            let mut duals = kernel.duals().to_vec();
            duals[0] = duals[0]
                .add(&OperatorMatrix::identity(2).scale(c(eps, 0.0)))
                .unwrap();
            let perturbed = GramKernel {
                gamma: kernel.gamma().clone(),
                duals,
            };
            let r = identity_check(&perturbed, &set).unwrap();
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn reconstruct_mixed_state_and_identity() {
        let set = random_minimal_set(4, 3, 1e6).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        let mixed = OperatorMatrix::identity(4).scale(c(0.25, 0.0));
        let tom = tomogram(&mixed, &set).unwrap();
        let rec = reconstruct(&tom, &kernel).unwrap();
        assert!((rec.entries() - mixed.entries()).norm() < 1e-8);

        let rho = random_density_matrix(4, 55).unwrap();
        let rec = reconstruct(&tomogram(&rho, &set).unwrap(), &kernel).unwrap();
        assert!((rec.entries() - rho.entries()).norm() < 1e-8);
    }

    #[test]
    fn reconstruct_pure_state_n2() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(8);
        let v = crate::operator::random_unit_vector(2, &mut rng);
        let pure = projector_from_vector(&v).unwrap();
        let set = random_minimal_set(2, 77, 1e6).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        let tom = tomogram(pure.matrix(), &set).unwrap();
        let rec = reconstruct(&tom, &kernel).unwrap();
        assert!((rec.entries() - pure.matrix().entries()).norm() < 1e-8);
    }

    #[test]
    fn reconstruct_length_mismatch() {
        let set = random_minimal_set(2, 13, 1e6).unwrap();
        let kernel = gram_schmidt(&set).unwrap();
        let short = Tomogram {
            set: Arc::clone(&set),
            values: vec![0.5; 3],
        };
        assert!(reconstruct(&short, &kernel).is_err());
    }

    #[test]
    fn unitary_family_identity_and_spectrum() {
        let p0 = basis_projector(2, 0);
        let set = set_from_unitary_family(&p0, &[OperatorMatrix::identity(2)]).unwrap();
        assert_eq!(set.len(), 1);
        assert!((set.projectors()[0].matrix().entries() - p0.matrix().entries()).norm() < 1e-14);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = su2(c(s, 0.1), c(s, -0.1));
        // normalize to unit determinant row norm
        let norm = (u.get(0, 0).norm_sqr() + u.get(0, 1).norm_sqr()).sqrt();
        let u = su2(u.get(0, 0) / norm, u.get(0, 1) / norm);
        let set = set_from_unitary_family(&p0, &[u]).unwrap();
        let eigs = set.projectors()[0].matrix().hermitian_eigenvalues();
        assert_abs_diff_eq!(eigs[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eigs[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn unitary_family_rejects_non_unitary() {
        let p0 = basis_projector(2, 0);
        let bad = OperatorMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        match set_from_unitary_family(&p0, &[OperatorMatrix::identity(2), bad]) {
            Err(TomoError::NotUnitary { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn povm_basis_and_empty() {
        let set =
            TomographicSet::from_projectors(2, vec![basis_projector(2, 0), basis_projector(2, 1)])
                .unwrap();
        let r = povm_check(&set, &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-14);

        let empty = TomographicSet::from_projectors(3, vec![]).unwrap();
        let r = povm_check(&empty, &[]).unwrap();
        assert_abs_diff_eq!(r, 3.0f64.sqrt(), epsilon = 1e-14);

        assert!(povm_check(&set, &[1.0]).is_err());
    }

    #[test]
    fn minimality_invariant_under_relabeling() {
        let set = random_minimal_set(3, 41, 1e6).unwrap();
        let base = is_minimal_tomographic_set(&set).unwrap();
        let mut projectors = set.projectors().to_vec();
        projectors.rotate_left(3);
        projectors.swap(0, 7);
        let permuted = TomographicSet::from_projectors(3, projectors).unwrap();
        let perm = is_minimal_tomographic_set(&permuted).unwrap();
        assert_eq!(base.minimal, perm.minimal);
        assert_eq!(base.rank, perm.rank);
    }

    #[test]
    fn matrix_element_identity_entrywise() {
        // sum_k conj(vec P_k)_{mu nu} vec(K_k)_{mu' nu'} = delta delta
        for n in [2usize, 3] {
            let set = random_minimal_set(n, 19 + n as u64, 1e6).unwrap();
            let kernel = gram_schmidt(&set).unwrap();
            let n2 = n * n;
            let mut s = DMatrix::<Complex64>::zeros(n2, n2);
            for (kl, pl) in kernel.duals().iter().zip(set.projectors()) {
                let kv = mat_to_vec(kl);
                let pv = mat_to_vec(pl.matrix());
                for i in 0..n2 {
                    for j in 0..n2 {
                        s[(i, j)] += pv[j].conj() * kv[i];
                    }
                }
            }
            for i in 0..n2 {
                for j in 0..n2 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((s[(i, j)] - c(want, 0.0)).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn dim_cap_enforced() {
        let set = TomographicSet::from_projectors(33, vec![]).unwrap();
        assert!(matches!(
            is_minimal_tomographic_set(&set),
            Err(TomoError::DimensionTooLarge { .. })
        ));
    }
}
