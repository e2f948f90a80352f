//! Constructors for every named operator the preparation schemes use, in
//! symbolic and dense form.
//!
//! Sign convention, fixed globally: a rotation labeled (theta, P) is the map
//! A -> exp(-i theta P) A exp(i theta P). All builders below follow it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{self, DenseOperator};
use crate::error::{Error, Result};
use crate::pauli::{Axis, Factor, OperatorSum, ProductTerm};

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn cone() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// The all-ones matrix: a rank-one operator with every entry 1.
pub fn ones(n: usize) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    let dim = 1usize << n;
    let mut m = DenseOperator::zeros(n);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = cone();
        }
    }
    Ok(m)
}

/// Closed-form exp(-i alpha Q) for the all-ones operator Q:
/// E - (1 - e^{-i alpha N}) Q / N. Unitary for real alpha.
pub fn exp_ones(alpha: f64, n: usize) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    let dim = (1usize << n) as f64;
    let phase = (Complex64::new(0.0, -alpha * dim)).exp();
    let w = (cone() - phase) / dim;
    let mut m = ones(n)?.scale(-w);
    for i in 0..(1usize << n) {
        m[(i, i)] += cone();
    }
    Ok(m)
}

/// Projector onto basis state `s`, symbolically and densely.
///
/// The symbolic form is the product over sites of (E +/- 2 I_z)/2 with the
/// sign set by the corresponding bit of `s`.
pub fn basis_projector(s: usize, n: usize) -> Result<(OperatorSum, DenseOperator)> {
    DenseOperator::check_cap(n)?;
    let dim = 1usize << n;
    if s >= dim {
        return Err(Error::IndexOutOfRange { index: s, dim });
    }
    let mut sum = OperatorSum::zero(n);
    sum.add_term(&ProductTerm::from_real(1.0, vec![Factor::E; n]));
    for k in 1..=n {
        let bit = (s >> (n - k)) & 1;
        let sign = if bit == 0 { 2.0 } else { -2.0 };
        let mut site = OperatorSum::zero(n);
        site.add_term(&ProductTerm::from_real(0.5, vec![Factor::E; n]));
        site.add_term(&ProductTerm::on_spins(0.5 * sign, &[k], Axis::Z, n)?);
        sum = sum.multiply(&site)?;
    }
    let mut dense = DenseOperator::zeros(n);
    dense[(s, s)] = cone();
    Ok((sum, dense))
}

pub fn basis_projector_dense(s: usize, n: usize) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    let dim = 1usize << n;
    if s >= dim {
        return Err(Error::IndexOutOfRange { index: s, dim });
    }
    let mut dense = DenseOperator::zeros(n);
    dense[(s, s)] = cone();
    Ok(dense)
}

/// The ground-state phase flip diag(-1, 1, ..., 1) = E - 2 D_0.
///
/// At the canonical angle alpha = pi/N the diagonal exponential
/// exp(-+ i N alpha D_0) equals this operator exactly.
pub fn ground_phase_flip(n: usize) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    let mut m = DenseOperator::identity(n);
    m[(0, 0)] = Complex64::new(-1.0, 0.0);
    Ok(m)
}

/// n-fold tensor power of the one-qubit Hadamard; involutory.
pub fn walsh_hadamard(n: usize) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = DenseOperator::from_2x2([
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
    ]);
    let mut acc = h.clone();
    for _ in 1..n {
        acc = acc.kron(&h);
    }
    Ok(acc)
}

/// The diffusion operator W R W (inversion about the average).
pub fn diffusion(n: usize) -> Result<DenseOperator> {
    let w = walsh_hadamard(n)?;
    let r = ground_phase_flip(n)?;
    w.mul(&r)?.mul(&w)
}

/// Total spin component: sum over k of I_{k,axis}.
pub fn total_spin(axis: Axis, n: usize) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    let mut sum = OperatorSum::zero(n);
    for k in 1..=n {
        sum.add_term(&ProductTerm::on_spins(1.0, &[k], axis, n)?);
    }
    Ok(dense::to_dense(&sum))
}

/// 2x2 rotation exp(-i theta I_axis) = cos(theta/2) E - 2 i sin(theta/2) I_axis.
pub fn single_spin_rotation(axis: Axis, theta: f64) -> DenseOperator {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(theta / 2.0).sin());
    let pauli = dense::factor_matrix(axis.factor()).scale(Complex64::new(2.0, 0.0));
    let mut m = pauli.scale(s);
    m[(0, 0)] += c;
    m[(1, 1)] += c;
    m
}

/// Product of independent one-spin rotations exp(-i theta I_{k,axis}) over
/// the listed spins (exact trigonometry, no matrix exponential).
pub fn collective_rotation(
    spins: &[usize],
    axis: Axis,
    theta: f64,
    n: usize,
) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    validate_subset(spins, n)?;
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let rot = single_spin_rotation(axis, theta);
    let eye = DenseOperator::identity(1);
    let mut acc = DenseOperator::from_2x2([cone(), czero(), czero(), cone()]);
    let mut first = true;
    for k in 1..=n {
        let site = if spins.contains(&k) { &rot } else { &eye };
        if first {
            acc = site.clone();
            first = false;
        } else {
            acc = acc.kron(site);
        }
    }
    Ok(acc)
}

/// Collective z rotation exp(-i theta F_z); diagonal, built entrywise.
pub fn collective_z_rotation(theta: f64, n: usize) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let dim = 1usize << n;
    let diag: Vec<Complex64> = (0..dim)
        .map(|s| {
            let pop = (s as u64).count_ones() as f64;
            let eigen = (n as f64 - 2.0 * pop) / 2.0;
            Complex64::new(0.0, -theta * eigen).exp()
        })
        .collect();
    Ok(DenseOperator::from_diagonal(n, &diag))
}

/// The m-body propagator exp(-i theta 2^{m-1} prod_{k in S} I_{k,axis}).
///
/// P = 2^{m-1} prod I satisfies P^2 = E/4, so the exponential has the exact
/// closed form cos(theta/2) E - 2 i sin(theta/2) P.
pub fn multibody_propagator(
    spins: &[usize],
    axis: Axis,
    theta: f64,
    n: usize,
) -> Result<DenseOperator> {
    DenseOperator::check_cap(n)?;
    validate_subset(spins, n)?;
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let m = spins.len();
    let scale = (1u64 << (m - 1)) as f64;
    let term = ProductTerm::on_spins(scale, spins, axis, n)?;
    let p = dense::term_to_dense(&term);
    let mut out = p.scale(Complex64::new(0.0, -2.0 * (theta / 2.0).sin()));
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    for i in 0..out.dim() {
        out[(i, i)] += c;
    }
    Ok(out)
}

/// Expands N D_0 over the longitudinal magnetization and spin order basis:
/// E + sum 2 I_kz + sum 4 I_kz I_lz + ... = prod_k (E_k + 2 I_kz).
pub fn lomso_expand(n: usize) -> Result<OperatorSum> {
    DenseOperator::check_cap(n)?;
    let mut sum = OperatorSum::zero(n);
    sum.add_term(&ProductTerm::from_real(1.0, vec![Factor::E; n]));
    for k in 1..=n {
        let mut site = OperatorSum::zero(n);
        site.add_term(&ProductTerm::from_real(1.0, vec![Factor::E; n]));
        site.add_term(&ProductTerm::on_spins(2.0, &[k], Axis::Z, n)?);
        sum = sum.multiply(&site)?;
    }
    Ok(sum)
}

pub(crate) fn validate_subset(spins: &[usize], n: usize) -> Result<()> {
    if spins.is_empty() {
        return Err(Error::EmptySubset);
    }
    for w in spins.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidSubset(spins.to_vec()));
        }
    }
    for &k in spins {
        if k < 1 || k > n {
            return Err(Error::SpinOutOfRange { spin: k, n });
        }
    }
    Ok(())
}

/// A reified handle for the operators the schemes are built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NamedOperator {
    /// The all-ones matrix.
    AllOnes,
    /// Projector onto basis state `index`.
    BasisProjector {
        index: usize,
    },
    /// diag(-1, 1, ..., 1).
    GroundPhaseFlip,
    WalshHadamard,
    Diffusion,
    /// sum_k I_{k,axis}.
    TotalSpin {
        axis: Axis,
    },
    /// exp(-i angle 2^{m-1} prod_{k in spins} I_{k,axis}).
    MultibodyPropagator {
        spins: Vec<usize>,
        axis: Axis,
        angle: f64,
    },
    /// exp(-i lambda 2 I_kz I_lz).
    TwoQubitDiagonal {
        k: usize,
        l: usize,
        lambda: f64,
    },
}

impl NamedOperator {
    pub fn dense(&self, n: usize) -> Result<DenseOperator> {
        match self {
            NamedOperator::AllOnes => ones(n),
            NamedOperator::BasisProjector { index } => basis_projector_dense(*index, n),
            NamedOperator::GroundPhaseFlip => ground_phase_flip(n),
            NamedOperator::WalshHadamard => walsh_hadamard(n),
            NamedOperator::Diffusion => diffusion(n),
            NamedOperator::TotalSpin { axis } => total_spin(*axis, n),
            NamedOperator::MultibodyPropagator { spins, axis, angle } => {
                multibody_propagator(spins, *axis, *angle, n)
            }
            NamedOperator::TwoQubitDiagonal { k, l, lambda } => {
                let spins = if k < l { vec![*k, *l] } else { vec![*l, *k] };
                multibody_propagator(&spins, Axis::Z, *lambda, n)
            }
        }
    }
}
