//! Operators on a finite-dimensional Hilbert space, treated as vectors of the
//! Hilbert space of operators with the trace scalar product.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Result, TomoError};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const PROJECTOR_TOL: f64 = 1e-10;

/// Dense complex square matrix with a cached Hermiticity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: DMatrix<Complex64>,
    hermitian_hint: bool,
}

impl OperatorMatrix {
    /// Wraps a square matrix, computing the Hermiticity hint.
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(TomoError::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let dim = entries.nrows();
        let hermitian_hint = hermiticity_defect(&entries) <= HERMITICITY_TOL;
        Ok(Self {
            dim,
            entries,
            hermitian_hint,
        })
    }

    /// Builds from nested rows, rejecting ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(TomoError::RaggedRows {
                    row: i,
                    expected: n,
                    got: row.len(),
                });
            }
        }
        let entries = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_matrix(entries)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            dim: n,
            entries: DMatrix::identity(n, n),
            hermitian_hint: true,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            dim: n,
            entries: DMatrix::zeros(n, n),
            hermitian_hint: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    /// Max-abs deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.adjoint(),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: &self.entries * c,
            hermitian_hint: false,
        }
        .rehint()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::from_matrix(&self.entries + &other.entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::from_matrix(&self.entries - &other.entries)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::from_matrix(&self.entries * &other.entries)
    }

    /// (A + A†)/2.
    pub fn hermitized(&self) -> Self {
        let h = (&self.entries + self.entries.adjoint()).scale(0.5);
        Self {
            dim: self.dim,
            entries: h,
            hermitian_hint: true,
        }
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Eigendecomposition of a Hermitian matrix: (eigenvalues, unitary of columns).
    pub fn hermitian_eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let eig = self.entries.clone().symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    }

    /// exp(i t H) for Hermitian self, via eigendecomposition.
    pub fn unitary_exp_i(&self, t: f64) -> Self {
        let (vals, vecs) = self.hermitian_eigen();
        let phases = DVector::from_iterator(
            self.dim,
            vals.iter().map(|&l| Complex64::from_polar(1.0, t * l)),
        );
        let mut scaled = vecs.clone();
        for (j, col) in scaled.column_iter_mut().enumerate() {
            let mut col = col;
            col *= phases[j];
        }
        Self::from_matrix(&scaled * vecs.adjoint()).expect("square by construction")
    }

    fn rehint(mut self) -> Self {
        self.hermitian_hint = self.hermiticity_defect() <= HERMITICITY_TOL;
        self
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(TomoError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Unit vector together with its cached outer product.
#[derive(Debug, Clone)]
pub struct RankOneProjector {
    vector: DVector<Complex64>,
    matrix: OperatorMatrix,
}

impl RankOneProjector {
    pub fn vector(&self) -> &DVector<Complex64> {
        &self.vector
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// Real coordinates of an operator in the Hermitian generator basis.
#[derive(Debug, Clone)]
pub struct BlochPoint {
    coeffs: Vec<f64>,
}

impl BlochPoint {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of the identity generator.
    pub fn identity_coefficient(&self) -> f64 {
        self.coeffs[0]
    }

    /// Squared Euclidean length of the traceless part.
    pub fn traceless_norm_squared(&self) -> f64 {
        self.coeffs[1..].iter().map(|c| c * c).sum()
    }
}

/// Tr(A† B), the scalar product making operators a Hilbert space.
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(TomoError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.entries().iter().zip(b.entries().iter()) {
        acc += x.conj() * y;
    }
    Ok(acc)
}

/// Row-major flattening of a matrix into a vector of length n².
pub fn mat_to_vec(a: &OperatorMatrix) -> DVector<Complex64> {
    let n = a.dim();
    DVector::from_fn(n * n, |k, _| a.get(k / n, k % n))
}

/// Inverse of [`mat_to_vec`]; the length must be a perfect square.
pub fn vec_to_mat(v: &DVector<Complex64>) -> Result<OperatorMatrix> {
    let len = v.len();
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len {
        return Err(TomoError::NotPerfectSquare { len });
    }
    OperatorMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| v[i * n + j]))
}

/// Orthogonal Hermitian generator basis: the identity plus the generalized
/// Gell-Mann family (symmetric, antisymmetric, diagonal traceless). For n = 2
/// this is exactly {I, sigma_1, sigma_2, sigma_3}.
pub struct GeneratorBasis {
    dim: usize,
    generators: Vec<OperatorMatrix>,
    norms: Vec<f64>,
}

impl GeneratorBasis {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "generator basis needs n >= 1");
        let mut generators = Vec::with_capacity(n * n);
        generators.push(OperatorMatrix::identity(n));
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        for j in 0..n {
            for k in (j + 1)..n {
                let mut m = DMatrix::zeros(n, n);
                m[(j, k)] = one;
                m[(k, j)] = one;
                generators.push(OperatorMatrix::from_matrix(m).unwrap());
            }
        }
        for j in 0..n {
            for k in (j + 1)..n {
                let mut m = DMatrix::zeros(n, n);
                m[(j, k)] = -i;
                m[(k, j)] = i;
                generators.push(OperatorMatrix::from_matrix(m).unwrap());
            }
        }
        for l in 1..n {
            let mut m = DMatrix::zeros(n, n);
            let scale = (2.0 / (l as f64 * (l + 1) as f64)).sqrt();
            for j in 0..l {
                m[(j, j)] = Complex64::new(scale, 0.0);
            }
            m[(l, l)] = Complex64::new(-(l as f64) * scale, 0.0);
            generators.push(OperatorMatrix::from_matrix(m).unwrap());
        }
        let norms = generators
            .iter()
            .map(|g| hs_inner(g, g).unwrap().re)
            .collect();
        Self {
            dim: n,
            generators,
            norms,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[OperatorMatrix] {
        &self.generators
    }

    /// Coefficients alpha_k with A = sum_k alpha_k tau_k; real iff A is Hermitian.
    pub fn decompose(&self, a: &OperatorMatrix) -> Result<Vec<Complex64>> {
        if a.dim() != self.dim {
            return Err(TomoError::DimensionMismatch {
                left: a.dim(),
                right: self.dim,
            });
        }
        Ok(self
            .generators
            .iter()
            .zip(&self.norms)
            .map(|(g, &norm)| hs_inner(g, a).unwrap() / norm)
            .collect())
    }

    pub fn recompose(&self, coeffs: &[Complex64]) -> Result<OperatorMatrix> {
        if coeffs.len() != self.generators.len() {
            return Err(TomoError::LengthMismatch {
                expected: self.generators.len(),
                got: coeffs.len(),
                detail: String::new(),
            });
        }
        let n = self.dim;
        let mut acc = DMatrix::<Complex64>::zeros(n, n);
        for (g, &c) in self.generators.iter().zip(coeffs) {
            acc += g.entries() * c;
        }
        OperatorMatrix::from_matrix(acc)
    }
}

/// Coefficients of A in the generator basis for its dimension.
pub fn hermitian_basis_decompose(a: &OperatorMatrix) -> Vec<Complex64> {
    GeneratorBasis::new(a.dim()).decompose(a).unwrap()
}

/// Normalizes v and forms |v><v|.
pub fn projector_from_vector(v: &DVector<Complex64>) -> Result<RankOneProjector> {
    let norm = v.norm();
    if norm <= 0.0 || !norm.is_finite() {
        return Err(TomoError::ZeroVector);
    }
    let unit = v / Complex64::new(norm, 0.0);
    let n = unit.len();
    let matrix =
        OperatorMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| unit[i] * unit[j].conj()))?;
    Ok(RankOneProjector {
        vector: unit,
        matrix,
    })
}

/// Generator-basis coordinates of a rank-one projector.
pub fn bloch_coordinates(p: &RankOneProjector) -> BlochPoint {
    let coeffs = hermitian_basis_decompose(p.matrix())
        .into_iter()
        .map(|c| c.re)
        .collect();
    BlochPoint { coeffs }
}

/// Seeded full-rank random density matrix: G G† / Tr(G G†) for a complex
/// Ginibre matrix G.
pub fn random_density_matrix(n: usize, seed: u64) -> Result<OperatorMatrix> {
    if n == 0 {
        return Err(TomoError::OutOfRange {
            what: "dimension",
            value: 0.0,
            expected: "n >= 1",
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, n, |_, _| standard_complex_normal(&mut rng));
    let gg = &g * g.adjoint();
    let trace: Complex64 = gg.diagonal().sum();
    let rho = gg / Complex64::new(trace.re, 0.0);
    let mut op = OperatorMatrix::from_matrix(rho)?;
    // symmetrize away last-ulp asymmetry so the hint is dependable
    op = op.hermitized();
    Ok(op)
}

/// Seeded Haar-like random pure state via a normalized Ginibre column.
pub fn random_unit_vector(n: usize, rng: &mut ChaCha12Rng) -> DVector<Complex64> {
    loop {
        let v = DVector::from_fn(n, |_, _| standard_complex_normal(rng));
        if v.norm() > 1e-6 {
            return v.normalize();
        }
    }
}

fn standard_complex_normal(rng: &mut ChaCha12Rng) -> Complex64 {
    // Box-Muller; two uniforms per component pair
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    Complex64::new(r * c, r * s) / Complex64::new(std::f64::consts::SQRT_2, 0.0)
}
