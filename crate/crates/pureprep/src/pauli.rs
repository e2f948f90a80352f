//! Exact symbolic algebra over n-spin product operators.
//!
//! A product operator is a tensor product over spins of factors from
//! {E, I_x, I_y, I_z} with I = sigma/2, scaled by a complex coefficient.
//! Products of basis factors close onto single scaled factors, so sums of
//! product terms form an exact algebra; coefficients are complex doubles
//! and every result is canonicalized by dropping magnitudes below
//! [`CANON_TOL`].
//!
//! The ladder basis {E, I^+, I^-, I_z} is supported for coherence-order
//! bookkeeping; conversion both ways is exact.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped during canonicalization.
pub const CANON_TOL: f64 = 1e-14;

/// One tensor factor of a Cartesian product operator.
///
/// The ordering E < X < Y < Z is the canonical term order used everywhere
/// terms are serialized or diffed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Factor {
    E,
    X,
    Y,
    Z,
}

impl Factor {
    pub fn as_char(self) -> char {
        match self {
            Factor::E => 'E',
            Factor::X => 'X',
            Factor::Y => 'Y',
            Factor::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Factor> {
        match c {
            'E' => Some(Factor::E),
            'X' => Some(Factor::X),
            'Y' => Some(Factor::Y),
            'Z' => Some(Factor::Z),
            _ => None,
        }
    }
}

/// A rotation axis; the non-identity factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn factor(self) -> Factor {
        match self {
            Axis::X => Factor::X,
            Axis::Y => Factor::Y,
            Axis::Z => Factor::Z,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One factor of a ladder-basis product operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LadderFactor {
    E,
    Plus,
    Minus,
    Z,
}

impl LadderFactor {
    pub fn as_str(self) -> &'static str {
        match self {
            LadderFactor::E => "E",
            LadderFactor::Plus => "+",
            LadderFactor::Minus => "-",
            LadderFactor::Z => "Z",
        }
    }
}

/// Render a factor tuple as its n-character serialization, spin 1 leftmost.
pub fn factors_to_string(factors: &[Factor]) -> String {
    factors.iter().map(|f| f.as_char()).collect()
}

/// Parse an n-character string over {E, X, Y, Z} into a factor tuple.
pub fn factors_from_string(s: &str) -> Option<Vec<Factor>> {
    s.chars().map(Factor::from_char).collect()
}

/// Single-site product: returns (scalar, factor) with a*b = scalar * factor.
///
/// Per site, I_mu I_mu = E/4 and I_x I_y = (i/2) I_z cyclically.
fn site_product(a: Factor, b: Factor) -> (Complex64, Factor) {
    use Factor::*;
    let half_i = Complex64::new(0.0, 0.5);
    let neg_half_i = Complex64::new(0.0, -0.5);
    let quarter = Complex64::new(0.25, 0.0);
    let one = Complex64::new(1.0, 0.0);
    match (a, b) {
        (E, f) => (one, f),
        (f, E) => (one, f),
        (X, X) | (Y, Y) | (Z, Z) => (quarter, E),
        (X, Y) => (half_i, Z),
        (Y, X) => (neg_half_i, Z),
        (Y, Z) => (half_i, X),
        (Z, Y) => (neg_half_i, X),
        (Z, X) => (half_i, Y),
        (X, Z) => (neg_half_i, Y),
    }
}

/// A single scaled product operator: coeff * (f_1 (x) f_2 (x) ... (x) f_n).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub coeff: Complex64,
    pub factors: Vec<Factor>,
}

impl ProductTerm {
    pub fn new(coeff: Complex64, factors: Vec<Factor>) -> Self {
        ProductTerm { coeff, factors }
    }

    pub fn from_real(coeff: f64, factors: Vec<Factor>) -> Self {
        ProductTerm::new(Complex64::new(coeff, 0.0), factors)
    }

    /// Builds coeff * prod_{k in spins} I_{k,axis} on n spins (1-based spins).
    pub fn on_spins(coeff: f64, spins: &[usize], axis: Axis, n: usize) -> Result<Self> {
        let mut factors = vec![Factor::E; n];
        for &k in spins {
            if k < 1 || k > n {
                return Err(Error::SpinOutOfRange { spin: k, n });
            }
            factors[k - 1] = axis.factor();
        }
        Ok(ProductTerm::from_real(coeff, factors))
    }

    pub fn spin_count(&self) -> usize {
        self.factors.len()
    }

    /// Exact single-term product; errors if the spin counts differ.
    pub fn multiply(&self, other: &ProductTerm) -> Result<ProductTerm> {
        if self.factors.len() != other.factors.len() {
            return Err(Error::SpinCountMismatch {
                left: self.factors.len(),
                right: other.factors.len(),
            });
        }
        let mut coeff = self.coeff * other.coeff;
        let mut factors = Vec::with_capacity(self.factors.len());
        for (&a, &b) in self.factors.iter().zip(&other.factors) {
            let (scale, f) = site_product(a, b);
            coeff *= scale;
            factors.push(f);
        }
        Ok(ProductTerm { coeff, factors })
    }

    /// Sum of all dense-matrix entries, computed symbolically.
    ///
    /// Per factor the entry sums are E -> 2, X -> 1, Y -> 0, Z -> 0.
    pub fn entry_sum(&self) -> Complex64 {
        let mut total = self.coeff;
        for &f in &self.factors {
            let w = match f {
                Factor::E => 2.0,
                Factor::X => 1.0,
                Factor::Y | Factor::Z => 0.0,
            };
            total *= w;
        }
        total
    }
}

/// Classification of a basis product term by its entry sum.
///
/// Terms whose factors all lie in {E, X} have a nonzero entry sum (they
/// overlap the uniform superposition); any Y or Z factor kills it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntrySumClass {
    /// At least one Y or Z factor: the entry sum vanishes.
    Vanishing,
    /// All factors in {E, X}: the entry sum is nonzero.
    NonVanishing,
}

/// Classify a basis factor tuple; the coefficient is disregarded.
pub fn classify_entry_sum(factors: &[Factor]) -> EntrySumClass {
    if factors.iter().all(|&f| f == Factor::E || f == Factor::X) {
        EntrySumClass::NonVanishing
    } else {
        EntrySumClass::Vanishing
    }
}

/// A canonical sum of product terms, keyed by factor tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n: usize,
    terms: BTreeMap<Vec<Factor>, Complex64>,
}

impl OperatorSum {
    pub fn zero(n: usize) -> Self {
        OperatorSum {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut s = OperatorSum::zero(n);
        s.add_term(&ProductTerm::from_real(1.0, vec![Factor::E; n]));
        s
    }

    pub fn from_term(term: &ProductTerm) -> Self {
        let mut s = OperatorSum::zero(term.spin_count());
        s.add_term(term);
        s
    }

    pub fn spin_count(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Factor>, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, factors: &[Factor]) -> Complex64 {
        self.terms
            .get(factors)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Coefficient of the all-E string.
    pub fn identity_coefficient(&self) -> Complex64 {
        self.coefficient(&vec![Factor::E; self.n])
    }

    pub fn add_term(&mut self, term: &ProductTerm) {
        debug_assert_eq!(term.factors.len(), self.n);
        let entry = self
            .terms
            .entry(term.factors.clone())
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += term.coeff;
        if entry.norm() < CANON_TOL {
            self.terms.remove(&term.factors);
        }
    }

    pub fn add(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check_same_n(other)?;
        let mut out = self.clone();
        for (factors, coeff) in &other.terms {
            out.add_term(&ProductTerm::new(*coeff, factors.clone()));
        }
        Ok(out)
    }

    pub fn sub(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> OperatorSum {
        let mut out = OperatorSum::zero(self.n);
        for (factors, coeff) in &self.terms {
            let c = coeff * s;
            if c.norm() >= CANON_TOL {
                out.terms.insert(factors.clone(), c);
            }
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> OperatorSum {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Exact product of two sums (distributes term by term).
    pub fn multiply(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check_same_n(other)?;
        let mut out = OperatorSum::zero(self.n);
        for (fa, ca) in &self.terms {
            let ta = ProductTerm::new(*ca, fa.clone());
            for (fb, cb) in &other.terms {
                let tb = ProductTerm::new(*cb, fb.clone());
                out.add_term(&ta.multiply(&tb)?);
            }
        }
        Ok(out)
    }

    /// ab + ba, canonicalized.
    pub fn anticommutator(&self, other: &OperatorSum) -> Result<OperatorSum> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.add(&ba)
    }

    /// ab - ba, canonicalized.
    pub fn commutator(&self, other: &OperatorSum) -> Result<OperatorSum> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.sub(&ba)
    }

    /// Sum of all dense-matrix entries (linear over terms).
    pub fn entry_sum(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(f, c)| ProductTerm::new(*c, f.clone()).entry_sum())
            .sum()
    }

    /// Trace of the dense form; only the all-E term contributes.
    pub fn trace(&self) -> Complex64 {
        self.identity_coefficient() * Complex64::new((1u64 << self.n) as f64, 0.0)
    }

    /// Exact basis change to the ladder basis.
    pub fn to_ladder(&self) -> LadderSum {
        let mut out = LadderSum::zero(self.n);
        for (factors, coeff) in &self.terms {
            expand_ladder(factors, *coeff, &mut out);
        }
        out
    }

    /// Drops every component with nonzero coherence order; idempotent.
    pub fn crush_transverse(&self) -> OperatorSum {
        let ladder = self.to_ladder();
        let mut kept = LadderSum::zero(self.n);
        for (factors, coeff) in &ladder.terms {
            if coherence_order(factors) == 0 {
                kept.add(factors.clone(), *coeff);
            }
        }
        kept.to_cartesian()
    }

    /// Largest coefficient deviation between two sums (union of supports).
    pub fn max_coeff_diff(&self, other: &OperatorSum) -> f64 {
        let mut worst: f64 = 0.0;
        for (factors, coeff) in &self.terms {
            worst = worst.max((coeff - other.coefficient(factors)).norm());
        }
        for (factors, coeff) in &other.terms {
            worst = worst.max((coeff - self.coefficient(factors)).norm());
        }
        worst
    }

    pub fn approx_eq(&self, other: &OperatorSum, tol: f64) -> bool {
        self.max_coeff_diff(other) <= tol
    }

    fn check_same_n(&self, other: &OperatorSum) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SpinCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (factors, coeff) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(
                f,
                "({:+.6}{:+.6}i)*{}",
                coeff.re,
                coeff.im,
                factors_to_string(factors)
            )?;
        }
        Ok(())
    }
}

/// A single scaled ladder-basis product term.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderTerm {
    pub coeff: Complex64,
    pub factors: Vec<LadderFactor>,
}

impl LadderTerm {
    /// Coherence order p = (#Plus) - (#Minus).
    pub fn coherence_order(&self) -> i64 {
        coherence_order(&self.factors)
    }
}

pub fn coherence_order(factors: &[LadderFactor]) -> i64 {
    let plus = factors.iter().filter(|&&f| f == LadderFactor::Plus).count() as i64;
    let minus = factors
        .iter()
        .filter(|&&f| f == LadderFactor::Minus)
        .count() as i64;
    plus - minus
}

/// A canonical sum of ladder-basis terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSum {
    n: usize,
    terms: BTreeMap<Vec<LadderFactor>, Complex64>,
}

impl LadderSum {
    pub fn zero(n: usize) -> Self {
        LadderSum {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn spin_count(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, factors: Vec<LadderFactor>, coeff: Complex64) {
        debug_assert_eq!(factors.len(), self.n);
        let entry = self
            .terms
            .entry(factors.clone())
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += coeff;
        if entry.norm() < CANON_TOL {
            self.terms.remove(&factors);
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<LadderFactor>, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, factors: &[LadderFactor]) -> Complex64 {
        self.terms
            .get(factors)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn into_terms(self) -> Vec<LadderTerm> {
        self.terms
            .into_iter()
            .map(|(factors, coeff)| LadderTerm { coeff, factors })
            .collect()
    }

    pub fn max_coeff_diff(&self, other: &LadderSum) -> f64 {
        let mut worst: f64 = 0.0;
        for (factors, coeff) in &self.terms {
            worst = worst.max((coeff - other.coefficient(factors)).norm());
        }
        for (factors, coeff) in &other.terms {
            worst = worst.max((coeff - self.coefficient(factors)).norm());
        }
        worst
    }

    /// Exact basis change back to the Cartesian basis; round-trips with
    /// [`OperatorSum::to_ladder`].
    pub fn to_cartesian(&self) -> OperatorSum {
        let mut out = OperatorSum::zero(self.n);
        for (factors, coeff) in &self.terms {
            expand_cartesian(factors, *coeff, &mut out);
        }
        out
    }
}

/// Per-site ladder expansion: I_x = (I^+ + I^-)/2, I_y = (I^+ - I^-)/(2i).
fn ladder_components(f: Factor) -> Vec<(Complex64, LadderFactor)> {
    match f {
        Factor::E => vec![(Complex64::new(1.0, 0.0), LadderFactor::E)],
        Factor::Z => vec![(Complex64::new(1.0, 0.0), LadderFactor::Z)],
        Factor::X => vec![
            (Complex64::new(0.5, 0.0), LadderFactor::Plus),
            (Complex64::new(0.5, 0.0), LadderFactor::Minus),
        ],
        Factor::Y => vec![
            (Complex64::new(0.0, -0.5), LadderFactor::Plus),
            (Complex64::new(0.0, 0.5), LadderFactor::Minus),
        ],
    }
}

/// Per-site Cartesian expansion: I^+ = I_x + i I_y, I^- = I_x - i I_y.
fn cartesian_components(f: LadderFactor) -> Vec<(Complex64, Factor)> {
    match f {
        LadderFactor::E => vec![(Complex64::new(1.0, 0.0), Factor::E)],
        LadderFactor::Z => vec![(Complex64::new(1.0, 0.0), Factor::Z)],
        LadderFactor::Plus => vec![
            (Complex64::new(1.0, 0.0), Factor::X),
            (Complex64::new(0.0, 1.0), Factor::Y),
        ],
        LadderFactor::Minus => vec![
            (Complex64::new(1.0, 0.0), Factor::X),
            (Complex64::new(0.0, -1.0), Factor::Y),
        ],
    }
}

fn expand_ladder(factors: &[Factor], coeff: Complex64, out: &mut LadderSum) {
    let mut partial: Vec<(Complex64, Vec<LadderFactor>)> = vec![(coeff, Vec::new())];
    for &f in factors {
        let comps = ladder_components(f);
        let mut next = Vec::with_capacity(partial.len() * comps.len());
        for (c, prefix) in &partial {
            for (w, lf) in &comps {
                let mut p = prefix.clone();
                p.push(*lf);
                next.push((c * w, p));
            }
        }
        partial = next;
    }
    for (c, f) in partial {
        out.add(f, c);
    }
}

fn expand_cartesian(factors: &[LadderFactor], coeff: Complex64, out: &mut OperatorSum) {
    let mut partial: Vec<(Complex64, Vec<Factor>)> = vec![(coeff, Vec::new())];
    for &f in factors {
        let comps = cartesian_components(f);
        let mut next = Vec::with_capacity(partial.len() * comps.len());
        for (c, prefix) in &partial {
            for (w, cf) in &comps {
                let mut p = prefix.clone();
                p.push(*cf);
                next.push((c * w, p));
            }
        }
        partial = next;
    }
    for (c, f) in partial {
        out.add_term(&ProductTerm::new(c, f));
    }
}
