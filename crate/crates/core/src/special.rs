//! Angular-momentum coefficients and quadrature rules used by the spin and
//! photon-number kernels.

use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Result, TomoError};

/// Half-integer stored exactly as its doubled value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfInteger {
    twice: i32,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };

    pub fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    pub fn from_int(v: i32) -> Self {
        Self { twice: 2 * v }
    }

    pub fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_nonnegative(self) -> bool {
        self.twice >= 0
    }

    /// True when `self` is a valid projection for magnitude `j`:
    /// |m| <= j with matching integer/half-integer character.
    pub fn is_projection_of(self, j: HalfInteger) -> bool {
        self.twice.abs() <= j.twice && (self.twice - j.twice).rem_euclid(2) == 0
    }

    /// Projections m = -j..=j for this magnitude.
    pub fn projections(self) -> impl Iterator<Item = HalfInteger> {
        let j2 = self.twice;
        (-j2..=j2).step_by(2).map(HalfInteger::from_twice)
    }

    /// Dimension 2j + 1 of the spin-j representation.
    pub fn dimension(self) -> usize {
        (self.twice + 1) as usize
    }
}

impl std::fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

const LN_FACT_LEN: usize = 260;

fn ln_factorials() -> &'static [f64; LN_FACT_LEN] {
    static TABLE: OnceLock<[f64; LN_FACT_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; LN_FACT_LEN];
        for k in 1..LN_FACT_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

fn ln_fact(k: i32) -> f64 {
    debug_assert!(k >= 0 && (k as usize) < LN_FACT_LEN);
    ln_factorials()[k as usize]
}

/// Wigner 3j symbol via the Racah sum, evaluated with log-factorials.
///
/// Violated selection rules (triangle, projection bounds, m-sum) give 0;
/// inconsistent (j, m) pairs are an error.
pub fn wigner_3j(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    m1: HalfInteger,
    m2: HalfInteger,
    m3: HalfInteger,
) -> Result<f64> {
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if !j.is_nonnegative() {
            return Err(TomoError::BadAngularMomentum(format!(
                "negative magnitude j = {j}"
            )));
        }
        if (j.twice() - m.twice()).rem_euclid(2) != 0 {
            return Err(TomoError::BadAngularMomentum(format!(
                "projection {m} does not match magnitude {j}"
            )));
        }
    }
    if m1.twice() + m2.twice() + m3.twice() != 0 {
        return Ok(0.0);
    }
    if m1.twice().abs() > j1.twice()
        || m2.twice().abs() > j2.twice()
        || m3.twice().abs() > j3.twice()
    {
        return Ok(0.0);
    }
    // triangle rule on doubled values
    let (tj1, tj2, tj3) = (j1.twice(), j2.twice(), j3.twice());
    if tj3 > tj1 + tj2 || tj3 < (tj1 - tj2).abs() || (tj1 + tj2 + tj3) % 2 != 0 {
        return Ok(0.0);
    }

    // all of these are genuine integers (doubled values are even)
    let a = (tj1 + tj2 - tj3) / 2;
    let b = (tj1 - tj2 + tj3) / 2;
    let cc = (-tj1 + tj2 + tj3) / 2;
    let jm = [
        (tj1 + m1.twice()) / 2,
        (tj1 - m1.twice()) / 2,
        (tj2 + m2.twice()) / 2,
        (tj2 - m2.twice()) / 2,
        (tj3 + m3.twice()) / 2,
        (tj3 - m3.twice()) / 2,
    ];
    let ln_pref = 0.5
        * (ln_fact(a) + ln_fact(b) + ln_fact(cc) - ln_fact((tj1 + tj2 + tj3) / 2 + 1)
            + jm.iter().map(|&x| ln_fact(x)).sum::<f64>());

    let t_min = 0
        .max((tj2 - tj3 - m1.twice()) / 2)
        .max((tj1 - tj3 + m2.twice()) / 2);
    let t_max = a.min(jm[1]).min(jm[2]);
    let mut sum = 0.0_f64;
    for t in t_min..=t_max {
        let d1 = t;
        let d2 = (tj3 - tj2 + m1.twice()) / 2 + t;
        let d3 = (tj3 - tj1 - m2.twice()) / 2 + t;
        let d4 = a - t;
        let d5 = jm[1] - t;
        let d6 = jm[2] - t;
        let ln_term = ln_pref
            - ln_fact(d1)
            - ln_fact(d2)
            - ln_fact(d3)
            - ln_fact(d4)
            - ln_fact(d5)
            - ln_fact(d6);
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * ln_term.exp();
    }
    let phase_exp = (tj1 - tj2 - m3.twice()) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    Ok(phase * sum)
}

/// Wigner small-d matrix element d^j_{mp,m}(theta).
pub fn wigner_small_d(j: HalfInteger, mp: HalfInteger, m: HalfInteger, theta: f64) -> Result<f64> {
    if !j.is_nonnegative() {
        return Err(TomoError::BadAngularMomentum(format!(
            "negative magnitude j = {j}"
        )));
    }
    for proj in [mp, m] {
        if !proj.is_projection_of(j) {
            return Err(TomoError::BadAngularMomentum(format!(
                "projection {proj} out of range for j = {j}"
            )));
        }
    }
    let jpm = (j.twice() + m.twice()) / 2;
    let jmm = (j.twice() - m.twice()) / 2;
    let jpmp = (j.twice() + mp.twice()) / 2;
    let jmmp = (j.twice() - mp.twice()) / 2;
    let ln_pref = 0.5 * (ln_fact(jpm) + ln_fact(jmm) + ln_fact(jpmp) + ln_fact(jmmp));
    let (sin_h, cos_h) = (theta / 2.0).sin_cos();
    let mp_minus_m = (mp.twice() - m.twice()) / 2;

    let s_lo = 0.max(-mp_minus_m);
    let s_hi = jpm.min(jmmp);
    let mut sum = 0.0_f64;
    for s in s_lo..=s_hi {
        let c_pow = jpm - s + jmmp - s; // 2j + m - mp - 2s in integer form
        let s_pow = mp_minus_m + 2 * s;
        if c_pow < 0 || s_pow < 0 {
            continue;
        }
        let ln_den = ln_fact(jpm - s) + ln_fact(s) + ln_fact(mp_minus_m + s) + ln_fact(jmmp - s);
        let mag = (ln_pref - ln_den).exp() * cos_h.powi(c_pow) * sin_h.powi(s_pow);
        let sign = if (mp_minus_m + s).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        sum += sign * mag;
    }
    Ok(sum)
}

/// Wigner D matrix element in the active z-y-z convention:
/// D^j_{mp,m}(phi, theta, gamma) = exp(-i mp phi) d^j_{mp,m}(theta) exp(-i m gamma).
pub fn wigner_d_matrix_element(
    j: HalfInteger,
    mp: HalfInteger,
    m: HalfInteger,
    phi: f64,
    theta: f64,
    gamma: f64,
) -> Result<Complex64> {
    let d = wigner_small_d(j, mp, m, theta)?;
    let phase = Complex64::from_polar(1.0, -mp.value() * phi - m.value() * gamma);
    Ok(phase * d)
}

/// Full (2j+1)x(2j+1) rotation matrix; rows and columns are ordered by
/// descending projection (m = +j first).
pub fn wigner_d_matrix(
    j: HalfInteger,
    phi: f64,
    theta: f64,
    gamma: f64,
) -> Result<nalgebra::DMatrix<Complex64>> {
    let dim = j.dimension();
    let mut out = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    for (r, mp) in descending_projections(j).enumerate() {
        for (c, m) in descending_projections(j).enumerate() {
            out[(r, c)] = wigner_d_matrix_element(j, mp, m, phi, theta, gamma)?;
        }
    }
    Ok(out)
}

/// Projections +j, +j-1, ..., -j.
pub fn descending_projections(j: HalfInteger) -> impl Iterator<Item = HalfInteger> {
    let j2 = j.twice();
    (0..j.dimension()).map(move |k| HalfInteger::from_twice(j2 - 2 * k as i32))
}

/// Associated Laguerre polynomial L_n^k(x) for integer k >= 0, by the stable
/// three-term recurrence.
pub fn laguerre_assoc(n: i64, k: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(TomoError::OutOfRange {
            what: "laguerre degree",
            value: n as f64,
            expected: "n >= 0",
        });
    }
    if k < 0 {
        return Err(TomoError::OutOfRange {
            what: "laguerre order",
            value: k as f64,
            expected: "k >= 0",
        });
    }
    let kf = k as f64;
    let mut prev = 1.0; // L_0
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + kf - x; // L_1
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + kf - x) * cur - (mf + kf) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Nodes and weights of a one-dimensional quadrature rule on [a, b].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Legendre rule on [a, b], exact for polynomials of degree 2n - 1.
pub fn gauss_legendre(npoints: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if npoints == 0 {
        return Err(TomoError::OutOfRange {
            what: "quadrature size",
            value: 0.0,
            expected: "npoints >= 1",
        });
    }
    if a >= b {
        return Err(TomoError::DegenerateInterval { a, b });
    }
    let n = npoints;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Newton iteration from the Chebyshev-like initial guess
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for i in 0..n {
        nodes[i] = mid + half * nodes[i];
        weights[i] *= half;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        a,
        b,
    })
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equally spaced rule on [0, period), exact for trigonometric polynomials of
/// degree below npoints.
pub fn uniform_periodic(npoints: usize, period: f64) -> Result<QuadratureRule> {
    if npoints == 0 {
        return Err(TomoError::OutOfRange {
            what: "quadrature size",
            value: 0.0,
            expected: "npoints >= 1",
        });
    }
    let h = period / npoints as f64;
    Ok(QuadratureRule {
        nodes: (0..npoints).map(|k| k as f64 * h).collect(),
        weights: vec![h; npoints],
        a: 0.0,
        b: period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h(t: i32) -> HalfInteger {
        HalfInteger::from_twice(t)
    }

    #[test]
    fn threej_selection_rule_m_sum() {
        // m1 + m2 + m3 = 1 != 0
        let v = wigner_3j(h(2), h(2), h(2), h(2), h(0), h(0)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn threej_j_j_zero_closed_form() {
        for tj in 0..=8 {
            let j = h(tj);
            for m in j.projections() {
                let got = wigner_3j(j, j, h(0), m, h(-m.twice()), h(0)).unwrap();
                let jm = (tj - m.twice()) / 2;
                let sign = if jm.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let want = sign / ((tj as f64) + 1.0).sqrt();
                assert_abs_diff_eq!(got, want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn threej_1_1_2_000() {
        let got = wigner_3j(h(2), h(2), h(4), h(0), h(0), h(0)).unwrap();
        assert_abs_diff_eq!(got, (2.0f64 / 15.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn threej_rejects_bad_projection_parity() {
        assert!(wigner_3j(h(2), h(2), h(2), h(1), h(-1), h(0)).is_err());
    }

    #[test]
    fn threej_symmetries_up_to_j2() {
        for tj1 in 0i32..=4 {
            for tj2 in 0i32..=4 {
                for tj3 in (tj1 - tj2).abs()..=(tj1 + tj2).min(4) {
                    if (tj1 + tj2 + tj3) % 2 != 0 {
                        continue;
                    }
                    let (j1, j2, j3) = (h(tj1), h(tj2), h(tj3));
                    for m1 in j1.projections() {
                        for m2 in j2.projections() {
                            let m3 = h(-(m1.twice() + m2.twice()));
                            if m3.twice().abs() > tj3 {
                                continue;
                            }
                            let base = wigner_3j(j1, j2, j3, m1, m2, m3).unwrap();
                            let even = wigner_3j(j2, j3, j1, m2, m3, m1).unwrap();
                            assert_abs_diff_eq!(base, even, epsilon = 1e-12);
                            let odd = wigner_3j(j2, j1, j3, m2, m1, m3).unwrap();
                            let sign = if ((tj1 + tj2 + tj3) / 2).rem_euclid(2) == 0 {
                                1.0
                            } else {
                                -1.0
                            };
                            assert_abs_diff_eq!(odd, sign * base, epsilon = 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn threej_orthogonality_up_to_j2() {
        for tj1 in 0..=4 {
            for tj2 in 0..=4 {
                let (j1, j2) = (h(tj1), h(tj2));
                for tj3 in (tj1 - tj2).abs()..=(tj1 + tj2) {
                    for tj3p in (tj1 - tj2).abs()..=(tj1 + tj2) {
                        if (tj1 + tj2 + tj3) % 2 != 0 || (tj1 + tj2 + tj3p) % 2 != 0 {
                            continue;
                        }
                        for m3 in h(tj3).projections() {
                            for m3p in h(tj3p).projections() {
                                let mut acc = 0.0;
                                for m1 in j1.projections() {
                                    for m2 in j2.projections() {
                                        let a = wigner_3j(j1, j2, h(tj3), m1, m2, m3).unwrap();
                                        let b = wigner_3j(j1, j2, h(tj3p), m1, m2, m3p).unwrap();
                                        acc += (tj3 as f64 + 1.0) * a * b;
                                    }
                                }
                                let want = if tj3 == tj3p && m3 == m3p { 1.0 } else { 0.0 };
                                assert_abs_diff_eq!(acc, want, epsilon = 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn small_d_identity_and_half_spin() {
        let j = h(1);
        let d = wigner_small_d(j, h(1), h(1), 0.0).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-15);
        let d = wigner_small_d(j, h(1), h(-1), 0.0).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-15);
        let theta = 0.7;
        let d = wigner_small_d(j, h(1), h(1), theta).unwrap();
        assert_abs_diff_eq!(d, (theta / 2.0).cos(), epsilon = 1e-14);
    }

    #[test]
    fn d_matrix_unitary_j1() {
        let j = h(2);
        let u = wigner_d_matrix(j, 0.9, 1.3, -0.4).unwrap();
        let prod = &u * u.adjoint();
        let id = nalgebra::DMatrix::<Complex64>::identity(3, 3);
        assert!((prod - id).norm() < 1e-12);
    }

    #[test]
    fn d_matrix_identity_rotation() {
        let j = h(3);
        let u = wigner_d_matrix(j, 0.0, 0.0, 0.0).unwrap();
        let id = nalgebra::DMatrix::<Complex64>::identity(4, 4);
        assert!((u - id).norm() < 1e-14);
    }

    #[test]
    fn small_d_group_property() {
        for tj in 0..=4 {
            let j = h(tj);
            let (t1, t2) = (0.61, 0.97);
            let d1 = wigner_d_matrix(j, 0.0, t1, 0.0).unwrap();
            let d2 = wigner_d_matrix(j, 0.0, t2, 0.0).unwrap();
            let d12 = wigner_d_matrix(j, 0.0, t1 + t2, 0.0).unwrap();
            assert!((d1 * d2 - d12).norm() < 1e-10);
        }
    }

    #[test]
    fn small_d_00_is_legendre() {
        let theta = 1.1_f64;
        let x = theta.cos();
        for n in 0..5 {
            let d = wigner_small_d(h(2 * n), h(0), h(0), theta).unwrap();
            let (p, _) = legendre_and_derivative(n as usize, x);
            assert_abs_diff_eq!(d, p, epsilon = 1e-13);
        }
    }

    #[test]
    fn laguerre_low_orders() {
        assert_abs_diff_eq!(laguerre_assoc(0, 3, 2.7).unwrap(), 1.0, epsilon = 1e-15);
        let x = 0.83;
        assert_abs_diff_eq!(laguerre_assoc(1, 0, x).unwrap(), 1.0 - x, epsilon = 1e-15);
    }

    #[test]
    fn laguerre_matches_series() {
        // L_n^k(x) = sum_i (-1)^i C(n + k, n - i) x^i / i!
        let (n, k, x) = (3i64, 2i64, 1.5f64);
        let mut series = 0.0;
        for i in 0..=n {
            let binom = binomial((n + k) as u64, (n - i) as u64);
            let fact: f64 = (1..=i).map(|v| v as f64).product();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            series += sign * binom * x.powi(i as i32) / fact.max(1.0);
        }
        assert_abs_diff_eq!(laguerre_assoc(n, k, x).unwrap(), series, epsilon = 1e-12);
        assert!(laguerre_assoc(-1, 0, 1.0).is_err());
    }

    fn binomial(n: u64, k: u64) -> f64 {
        if k > n {
            return 0.0;
        }
        let mut acc = 1.0;
        for i in 0..k {
            acc *= (n - i) as f64 / (i + 1) as f64;
        }
        acc
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let r = gauss_legendre(1, -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.nodes[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 2.0, epsilon = 1e-15);

        let r = gauss_legendre(2, -1.0, 1.0).unwrap();
        let inv_sqrt3 = 1.0 / 3.0f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -inv_sqrt3, epsilon = 1e-14);
        assert_abs_diff_eq!(r.nodes[1], inv_sqrt3, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn gauss_legendre_quartic_exact() {
        let r = gauss_legendre(3, -1.0, 1.0).unwrap();
        let integral = r.integrate(|x| x.powi(4));
        assert_abs_diff_eq!(integral, 2.0 / 5.0, epsilon = 1e-14);
    }

    #[test]
    fn gauss_legendre_rejects_bad_input() {
        assert!(gauss_legendre(0, -1.0, 1.0).is_err());
        assert!(gauss_legendre(4, 1.0, 1.0).is_err());
        assert!(gauss_legendre(4, 2.0, -2.0).is_err());
    }

    #[test]
    fn gauss_legendre_sin_convergence() {
        let mut last = f64::INFINITY;
        for n in [4usize, 8, 16] {
            let r = gauss_legendre(n, 0.0, std::f64::consts::PI).unwrap();
            let err = (r.integrate(f64::sin) - 2.0).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-12);
    }

    #[test]
    fn uniform_periodic_rules() {
        let tau = std::f64::consts::TAU;
        let r = uniform_periodic(4, tau).unwrap();
        for w in &r.weights {
            assert_abs_diff_eq!(*w, tau / 4.0, epsilon = 1e-15);
        }
        let re: f64 = r.integrate(f64::cos);
        let im: f64 = r.integrate(f64::sin);
        assert!(re.abs() < 1e-14 && im.abs() < 1e-14);

        let r = uniform_periodic(3, tau).unwrap();
        let c2 = r.integrate(|t| t.cos() * t.cos());
        assert_abs_diff_eq!(c2, std::f64::consts::PI, epsilon = 1e-13);
    }

    #[test]
    fn uniform_periodic_weight_sum() {
        let r = uniform_periodic(7, 5.0).unwrap();
        let s: f64 = r.weights.iter().sum();
        assert_abs_diff_eq!(s, 5.0, epsilon = 1e-12);
    }
}
