//! Exact dense-matrix oracle.
//!
//! Every symbolic claim in the library is checked against 2^n x 2^n complex
//! matrices built here. Basis-state convention: |00...0> is row/column 0 and
//! spin 1 is the most significant bit, so the ground projector sits at entry
//! (0, 0) and the phase flip acts on index 0.
//!
//! Supported spin range is 1 <= n <= [`SPIN_CAP`]; 2^20-entry matrices stay
//! desk-scale and nothing here tries to be clever beyond that.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Factor, LadderFactor, LadderSum, OperatorSum, ProductTerm, CANON_TOL};

/// Hard cap on the spin count for dense work.
pub const SPIN_CAP: usize = 10;

/// Residual bound for asserted Hermiticity / unitarity checks.
pub const UNITARY_TOL: f64 = 1e-12;

/// Default tolerance for dense max-entry comparisons.
pub const COMPARE_TOL: f64 = 1e-10;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn cone() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// A 2^n x 2^n complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn check_cap(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::SpinCountTooSmall { n, min: 1 });
        }
        if n > SPIN_CAP {
            return Err(Error::SpinCountExceedsCap { n, cap: SPIN_CAP });
        }
        Ok(())
    }

    pub fn zeros(n: usize) -> Self {
        let dim = 1usize << n;
        DenseOperator {
            n,
            data: vec![czero(); dim * dim],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseOperator::zeros(n);
        for i in 0..m.dim() {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_diagonal(n: usize, diag: &[Complex64]) -> Self {
        let mut m = DenseOperator::zeros(n);
        assert_eq!(diag.len(), m.dim());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Wraps an explicit 2x2 for single-spin building blocks.
    pub fn from_2x2(entries: [Complex64; 4]) -> Self {
        DenseOperator {
            n: 1,
            data: entries.to_vec(),
        }
    }

    pub fn spin_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self[(i, i)]).collect()
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(other)?;
        let dim = self.dim();
        let mut out = DenseOperator::zeros(self.n);
        for i in 0..dim {
            for k in 0..dim {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                let row = &other.data[k * dim..(k + 1) * dim];
                let dst = &mut out.data[i * dim..(i + 1) * dim];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (d, &s) in out.data.iter_mut().zip(&other.data) {
            *d += s;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (d, &s) in out.data.iter_mut().zip(&other.data) {
            *d -= s;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> DenseOperator {
        let mut out = self.clone();
        for d in &mut out.data {
            *d *= s;
        }
        out
    }

    pub fn dagger(&self) -> DenseOperator {
        let dim = self.dim();
        let mut out = DenseOperator::zeros(self.n);
        for i in 0..dim {
            for j in 0..dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self[(i, i)]).sum()
    }

    /// Sum of all matrix entries.
    pub fn entry_sum(&self) -> Complex64 {
        self.data.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch in comparison");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &DenseOperator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// max |A - A^dagger|.
    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// max |U^dagger U - E|.
    pub fn unitarity_residual(&self) -> f64 {
        let udu = self.dagger().mul(self).expect("same dim");
        udu.max_abs_diff(&DenseOperator::identity(self.n))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    pub fn is_diagonal(&self) -> bool {
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if i != j && self[(i, j)] != czero() {
                    return false;
                }
            }
        }
        true
    }

    /// Kronecker product; `self` supplies the most significant spins.
    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        let (da, db) = (self.dim(), other.dim());
        let mut out = DenseOperator::zeros(self.n + other.n);
        for ia in 0..da {
            for ja in 0..da {
                let a = self[(ia, ja)];
                if a == czero() {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out[(ia * db + ib, ja * db + jb)] = a * other[(ib, jb)];
                    }
                }
            }
        }
        out
    }

    fn check_same_dim(&self, other: &DenseOperator) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for DenseOperator {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim() + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseOperator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        let dim = self.dim();
        &mut self.data[i * dim + j]
    }
}

/// U A U^dagger; rejects non-unitary U.
pub fn unitary_conjugate(u: &DenseOperator, a: &DenseOperator) -> Result<DenseOperator> {
    let residual = u.unitarity_residual();
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary {
            context: "unitary_conjugate",
            residual,
        });
    }
    u.mul(a)?.mul(&u.dagger())
}

/// Sum of weight * A over the pairs; dimensions must agree.
pub fn weighted_accumulate(pairs: &[(f64, &DenseOperator)]) -> Result<DenseOperator> {
    let first = match pairs.first() {
        Some((_, a)) => a,
        None => return Err(Error::EmptySubset),
    };
    let mut out = DenseOperator::zeros(first.spin_count());
    for (w, a) in pairs {
        if a.spin_count() != out.spin_count() {
            return Err(Error::DimensionMismatch {
                left: out.dim(),
                right: a.dim(),
            });
        }
        let w = Complex64::new(*w, 0.0);
        for (d, &s) in out.data.iter_mut().zip(&a.data) {
            *d += w * s;
        }
    }
    Ok(out)
}

/// Dense 2x2 of one Cartesian factor (I = sigma/2 normalization).
pub fn factor_matrix(f: Factor) -> DenseOperator {
    let h = 0.5;
    match f {
        Factor::E => DenseOperator::from_2x2([cone(), czero(), czero(), cone()]),
        Factor::X => DenseOperator::from_2x2([
            czero(),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            czero(),
        ]),
        Factor::Y => DenseOperator::from_2x2([
            czero(),
            Complex64::new(0.0, -h),
            Complex64::new(0.0, h),
            czero(),
        ]),
        Factor::Z => DenseOperator::from_2x2([
            Complex64::new(h, 0.0),
            czero(),
            czero(),
            Complex64::new(-h, 0.0),
        ]),
    }
}

/// Dense 2x2 of one ladder factor; I^+ = |0><1|, I^- = |1><0|.
pub fn ladder_factor_matrix(f: LadderFactor) -> DenseOperator {
    match f {
        LadderFactor::E => factor_matrix(Factor::E),
        LadderFactor::Z => factor_matrix(Factor::Z),
        LadderFactor::Plus => DenseOperator::from_2x2([czero(), cone(), czero(), czero()]),
        LadderFactor::Minus => DenseOperator::from_2x2([czero(), czero(), cone(), czero()]),
    }
}

fn kron_factors<T: Copy>(
    factors: &[T],
    coeff: Complex64,
    site: impl Fn(T) -> DenseOperator,
) -> DenseOperator {
    let mut acc = DenseOperator {
        n: 0,
        data: vec![coeff],
    };
    for &f in factors {
        acc = acc.kron(&site(f));
    }
    acc
}

/// Kronecker-product assembly of a symbolic sum; linear in terms.
pub fn to_dense(sum: &OperatorSum) -> DenseOperator {
    let mut out = DenseOperator::zeros(sum.spin_count());
    for (factors, coeff) in sum.terms() {
        let term = kron_factors(factors, *coeff, factor_matrix);
        for (d, &s) in out.data.iter_mut().zip(&term.data) {
            *d += s;
        }
    }
    out
}

pub fn term_to_dense(term: &ProductTerm) -> DenseOperator {
    kron_factors(&term.factors, term.coeff, factor_matrix)
}

pub fn ladder_to_dense(sum: &LadderSum) -> DenseOperator {
    let mut out = DenseOperator::zeros(sum.spin_count());
    for (factors, coeff) in sum.terms() {
        let term = kron_factors(factors, *coeff, ladder_factor_matrix);
        for (d, &s) in out.data.iter_mut().zip(&term.data) {
            *d += s;
        }
    }
    out
}

/// Projects a dense operator onto the product basis.
///
/// The coefficient extraction factorizes per site, so the whole transform is
/// O(n 4^n) rather than the naive O(8^n) of projecting term by term.
pub fn from_dense(a: &DenseOperator) -> OperatorSum {
    let n = a.spin_count();
    let dim = a.dim();
    // Permute (row, col) into interleaved per-site digit order d_k = 2 i_k + j_k.
    let mut work = vec![czero(); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut idx = 0usize;
            for k in 0..n {
                let shift = n - 1 - k;
                let d = ((i >> shift) & 1) * 2 + ((j >> shift) & 1);
                idx = idx * 4 + d;
            }
            work[idx] = a[(i, j)];
        }
    }
    // Per-site change of basis from matrix units to {E, X, Y, Z} coefficients.
    let ii = Complex64::new(0.0, 1.0);
    for k in 0..n {
        let stride = 4usize.pow((n - 1 - k) as u32);
        let block = stride * 4;
        let mut base = 0;
        while base < dim * dim {
            for off in 0..stride {
                let i00 = base + off;
                let i01 = base + stride + off;
                let i10 = base + 2 * stride + off;
                let i11 = base + 3 * stride + off;
                let (m00, m01, m10, m11) = (work[i00], work[i01], work[i10], work[i11]);
                work[i00] = (m00 + m11) * 0.5; // E
                work[i01] = m01 + m10; // X
                work[i10] = ii * (m01 - m10); // Y
                work[i11] = m00 - m11; // Z
            }
            base += block;
        }
    }
    let mut out = OperatorSum::zero(n);
    for (idx, &coeff) in work.iter().enumerate() {
        if coeff.norm() < CANON_TOL {
            continue;
        }
        let mut factors = vec![Factor::E; n];
        let mut rem = idx;
        for k in (0..n).rev() {
            factors[k] = match rem % 4 {
                0 => Factor::E,
                1 => Factor::X,
                2 => Factor::Y,
                _ => Factor::Z,
            };
            rem /= 4;
        }
        out.add_term(&ProductTerm::new(coeff, factors));
    }
    out
}

/// exp(scale * H).
///
/// Diagonal inputs exponentiate entrywise (exact); everything else goes
/// through Pade(13) scaling-and-squaring.
pub fn matrix_exponential(h: &DenseOperator, scale: Complex64) -> DenseOperator {
    if h.is_diagonal() {
        let diag: Vec<Complex64> = (0..h.dim()).map(|i| (scale * h[(i, i)]).exp()).collect();
        return DenseOperator::from_diagonal(h.spin_count(), &diag);
    }
    pade_exponential(&h.scale(scale))
}

// Pade(13) coefficients, Higham's scaling-and-squaring method.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn pade_exponential(a: &DenseOperator) -> DenseOperator {
    let n = a.spin_count();
    let theta13 = 5.371920351148152;
    let norm = one_norm(a);
    let squarings = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let a = a.scale(Complex64::new(1.0 / (1u64 << squarings) as f64, 0.0));

    let eye = DenseOperator::identity(n);
    let a2 = a.mul(&a).expect("same dim");
    let a4 = a2.mul(&a2).expect("same dim");
    let a6 = a2.mul(&a4).expect("same dim");

    let c = |k: usize| Complex64::new(PADE13[k], 0.0);
    let w1 = a6
        .scale(c(13))
        .add(&a4.scale(c(11)))
        .and_then(|m| m.add(&a2.scale(c(9))))
        .expect("same dim");
    let w2 = w1
        .mul(&a6)
        .and_then(|m| m.add(&a6.scale(c(7))))
        .and_then(|m| m.add(&a4.scale(c(5))))
        .and_then(|m| m.add(&a2.scale(c(3))))
        .and_then(|m| m.add(&eye.scale(c(1))))
        .expect("same dim");
    let u = a.mul(&w2).expect("same dim");
    let v1 = a6
        .scale(c(12))
        .add(&a4.scale(c(10)))
        .and_then(|m| m.add(&a2.scale(c(8))))
        .expect("same dim");
    let v = v1
        .mul(&a6)
        .and_then(|m| m.add(&a6.scale(c(6))))
        .and_then(|m| m.add(&a4.scale(c(4))))
        .and_then(|m| m.add(&a2.scale(c(2))))
        .and_then(|m| m.add(&eye.scale(c(0))))
        .expect("same dim");

    let numer = v.add(&u).expect("same dim");
    let denom = v.sub(&u).expect("same dim");
    let mut result = solve(&denom, &numer);
    for _ in 0..squarings {
        result = result.mul(&result).expect("same dim");
    }
    result
}

fn one_norm(a: &DenseOperator) -> f64 {
    let dim = a.dim();
    let mut worst: f64 = 0.0;
    for j in 0..dim {
        let mut col = 0.0;
        for i in 0..dim {
            col += a[(i, j)].norm();
        }
        worst = worst.max(col);
    }
    worst
}

/// Solve A X = B by Gaussian elimination with partial pivoting.
fn solve(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    let dim = a.dim();
    let mut lhs = a.clone();
    let mut rhs = b.clone();
    for col in 0..dim {
        let mut pivot_row = col;
        let mut pivot_mag = lhs[(col, col)].norm();
        for row in col + 1..dim {
            let mag = lhs[(row, col)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_row != col {
            for j in 0..dim {
                let (x, y) = (lhs[(col, j)], lhs[(pivot_row, j)]);
                lhs[(col, j)] = y;
                lhs[(pivot_row, j)] = x;
                let (x, y) = (rhs[(col, j)], rhs[(pivot_row, j)]);
                rhs[(col, j)] = y;
                rhs[(pivot_row, j)] = x;
            }
        }
        let pivot = lhs[(col, col)];
        for row in col + 1..dim {
            let factor = lhs[(row, col)] / pivot;
            if factor == czero() {
                continue;
            }
            for j in col..dim {
                let v = lhs[(col, j)];
                lhs[(row, j)] -= factor * v;
            }
            for j in 0..dim {
                let v = rhs[(col, j)];
                rhs[(row, j)] -= factor * v;
            }
        }
    }
    let mut x = DenseOperator::zeros(a.spin_count());
    for col in (0..dim).rev() {
        for j in 0..dim {
            let mut sum = rhs[(col, j)];
            for k in col + 1..dim {
                sum -= lhs[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = sum / lhs[(col, col)];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_z_dense_forms() {
        let e = to_dense(&OperatorSum::identity(1));
        assert!(e.approx_eq(&DenseOperator::identity(1), 0.0));

        let z = term_to_dense(&ProductTerm::from_real(1.0, vec![Factor::Z]));
        assert!((z[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((z[(1, 1)] - c(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_spin_order_is_the_expected_diagonal() {
        // 2 I_1z I_2z = diag(1/2, -1/2, -1/2, 1/2)
        let zz = term_to_dense(&ProductTerm::from_real(2.0, vec![Factor::Z, Factor::Z]));
        let expected = DenseOperator::from_diagonal(
            2,
            &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        );
        assert!(zz.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn projection_recovers_ground_projector_pattern() {
        // diag(2, 0) = E + 2 I_z at n = 1
        let a = DenseOperator::from_diagonal(1, &[c(2.0, 0.0), c(0.0, 0.0)]);
        let sum = from_dense(&a);
        assert_eq!(sum.term_count(), 2);
        assert!((sum.coefficient(&[Factor::E]) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((sum.coefficient(&[Factor::Z]) - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn projection_of_zero_is_empty() {
        let sum = from_dense(&DenseOperator::zeros(2));
        assert!(sum.is_zero());
    }

    #[test]
    fn dense_round_trip_random_hermitian() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4usize {
            let dim = 1usize << n;
            let mut a = DenseOperator::zeros(n);
            for i in 0..dim {
                for j in i..dim {
                    let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    if i == j {
                        a[(i, j)] = c(v.re, 0.0);
                    } else {
                        a[(i, j)] = v;
                        a[(j, i)] = v.conj();
                    }
                }
            }
            let back = to_dense(&from_dense(&a));
            assert!(back.approx_eq(&a, 1e-12), "round trip failed at n={n}");
        }
    }

    #[test]
    fn conjugation_by_identity_is_identity_map() {
        let a = term_to_dense(&ProductTerm::from_real(2.0, vec![Factor::Y, Factor::Z]));
        let e = DenseOperator::identity(2);
        assert!(unitary_conjugate(&e, &a).unwrap().approx_eq(&a, 0.0));
    }

    #[test]
    fn conjugation_rejects_non_unitary() {
        let a = DenseOperator::identity(1);
        let bad = DenseOperator::from_2x2([c(2.0, 0.0), czero(), czero(), c(1.0, 0.0)]);
        assert!(matches!(
            unitary_conjugate(&bad, &a),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn rotation_moves_z_to_minus_y() {
        // exp(-i (pi/2) I_x) I_z exp(i (pi/2) I_x) = -I_y
        let ix = term_to_dense(&ProductTerm::from_real(1.0, vec![Factor::X]));
        let u = matrix_exponential(&ix, c(0.0, -std::f64::consts::FRAC_PI_2));
        let z = term_to_dense(&ProductTerm::from_real(1.0, vec![Factor::Z]));
        let y = term_to_dense(&ProductTerm::from_real(1.0, vec![Factor::Y]));
        let rotated = unitary_conjugate(&u, &z).unwrap();
        assert!(rotated.approx_eq(&y.scale(c(-1.0, 0.0)), 1e-12));
        let _ = Axis::X;
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let h = DenseOperator::zeros(2);
        let e = matrix_exponential(&h, c(1.0, 0.0));
        assert!(e.approx_eq(&DenseOperator::identity(2), 1e-15));
    }

    #[test]
    fn diagonal_exponential_is_entrywise() {
        let d =
            DenseOperator::from_diagonal(2, &[c(0.3, 0.0), c(-1.2, 0.4), c(0.0, 2.0), c(5.0, 0.0)]);
        let e = matrix_exponential(&d, c(0.0, -1.0));
        for i in 0..4 {
            let expected = (c(0.0, -1.0) * d[(i, i)]).exp();
            assert!((e[(i, i)] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn pade_matches_series_on_small_matrix() {
        // exp of a non-normal 2x2 against a long Taylor sum
        let a = DenseOperator::from_2x2([c(0.1, 0.3), c(-0.7, 0.2), c(0.4, -0.1), c(0.0, -0.5)]);
        let pade = pade_exponential(&a);
        let mut series = DenseOperator::identity(1);
        let mut term = DenseOperator::identity(1);
        for k in 1..40 {
            term = term.mul(&a).unwrap().scale(c(1.0 / k as f64, 0.0));
            series = series.add(&term).unwrap();
        }
        assert!(pade.approx_eq(&series, 1e-13));
    }

    #[test]
    fn weighted_accumulate_cancels() {
        let a = term_to_dense(&ProductTerm::from_real(1.0, vec![Factor::X]));
        let out = weighted_accumulate(&[(1.0, &a), (-1.0, &a)]).unwrap();
        assert!(out.max_abs() < 1e-15);
        let single = weighted_accumulate(&[(1.0, &a)]).unwrap();
        assert!(single.approx_eq(&a, 0.0));
    }

    #[test]
    fn conjugation_preserves_trace_and_hermiticity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3usize {
            let dim = 1usize << n;
            let mut h = DenseOperator::zeros(n);
            for i in 0..dim {
                for j in i..dim {
                    let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    if i == j {
                        h[(i, j)] = c(v.re, 0.0);
                    } else {
                        h[(i, j)] = v;
                        h[(j, i)] = v.conj();
                    }
                }
            }
            // a random unitary from exp(-i H')
            let u = matrix_exponential(&h, c(0.0, -0.7));
            assert!(u.is_unitary(1e-12));
            let out = unitary_conjugate(&u, &h).unwrap();
            assert!((out.trace() - h.trace()).norm() < 1e-11);
            assert!(out.is_hermitian(1e-11));
        }
    }

    #[test]
    fn cap_checks() {
        assert!(DenseOperator::check_cap(0).is_err());
        assert!(DenseOperator::check_cap(10).is_ok());
        assert!(DenseOperator::check_cap(11).is_err());
    }

    #[test]
    fn ladder_matrices_match_definitions() {
        let plus = ladder_factor_matrix(LadderFactor::Plus);
        assert!((plus[(0, 1)] - cone()).norm() < 1e-15);
        assert_eq!(plus[(1, 0)], czero());
        let minus = ladder_factor_matrix(LadderFactor::Minus);
        assert!((minus[(1, 0)] - cone()).norm() < 1e-15);
    }
}
