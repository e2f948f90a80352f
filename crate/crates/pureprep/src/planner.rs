//! Temporal-averaging experiment plans.
//!
//! Both schemes start every experiment from the longitudinal n-spin order
//! sigma(0) = 2^(n-1) I_1z ... I_nz and combine conjugated copies with signed
//! weights:
//!
//! - the general scheme runs 2^(n-1) + 1 experiments (one weighted identity
//!   plus one per odd-cardinality spin subset) and averages to
//!   2^(n-1) D_0 - E/2;
//! - the logical-labeling scheme runs 2 experiments and averages to
//!   D_0 - D_{N-1}.
//!
//! Step angles are exact multiples of pi and the composed unitaries are
//! verified dense. The collective-rotation / multibody-propagator sign pair
//! for each subset size is resolved once (see [`resolved_sign_pair`]); the
//! paired sign flip leaves every experiment output invariant, which
//! [`verify_sign_invariance`] checks against the oracle.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{self, to_dense, DenseOperator};
use crate::error::{Error, Result};
use crate::identities::{IdentityId, IdentityReport};
use crate::operators;
use crate::pauli::{Axis, OperatorSum, ProductTerm};

/// Which preparation target a plan realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "general")]
    General,
    #[serde(rename = "logical-label")]
    LogicalLabel,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::General => "general",
            Scheme::LogicalLabel => "logical-label",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "general" => Ok(Scheme::General),
            "logical-label" => Ok(Scheme::LogicalLabel),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

/// An angle in radians, kept as an exact multiple of pi where possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    /// pi * num / den.
    PiRational {
        num: i64,
        den: i64,
    },
    Radians(f64),
}

impl Angle {
    pub fn pi(num: i64, den: i64) -> Self {
        debug_assert!(den != 0);
        Angle::PiRational { num, den }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Angle::PiRational { num, den } => PI * num as f64 / den as f64,
            Angle::Radians(r) => r,
        }
    }
}

/// One element of a preparation circuit.
///
/// A step labeled (theta, P) applies the map
/// A -> exp(-i theta P) A exp(i theta P). `GradientCrusher` is the only
/// non-unitary kind; it appears in state-preparation sequences only, never
/// inside plan unitaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UnitaryStep {
    OneQubitRotation {
        spin: usize,
        axis: Axis,
        angle: Angle,
    },
    CollectiveRotation {
        spins: Vec<usize>,
        axis: Axis,
        angle: Angle,
    },
    WalshHadamard,
    Diffusion,
    #[serde(rename = "phase-flip")]
    GroundPhaseFlip,
    MultibodyPropagator {
        spins: Vec<usize>,
        axis: Axis,
        angle: Angle,
    },
    TwoQubitDiagonal {
        k: usize,
        l: usize,
        lambda: Angle,
    },
    CollectiveZRotation {
        angle: Angle,
    },
    GradientCrusher,
}

impl UnitaryStep {
    pub fn kind_name(&self) -> &'static str {
        match self {
            UnitaryStep::OneQubitRotation { .. } => "one-qubit-rotation",
            UnitaryStep::CollectiveRotation { .. } => "collective-rotation",
            UnitaryStep::WalshHadamard => "walsh-hadamard",
            UnitaryStep::Diffusion => "diffusion",
            UnitaryStep::GroundPhaseFlip => "phase-flip",
            UnitaryStep::MultibodyPropagator { .. } => "multibody-propagator",
            UnitaryStep::TwoQubitDiagonal { .. } => "two-qubit-diagonal",
            UnitaryStep::CollectiveZRotation { .. } => "collective-z-rotation",
            UnitaryStep::GradientCrusher => "gradient-crusher",
        }
    }
}

/// Dense unitary of a single step; the gradient crusher has none.
pub fn step_unitary(step: &UnitaryStep, n: usize) -> Result<DenseOperator> {
    match step {
        UnitaryStep::OneQubitRotation { spin, axis, angle } => {
            operators::collective_rotation(&[*spin], *axis, angle.radians(), n)
        }
        UnitaryStep::CollectiveRotation { spins, axis, angle } => {
            operators::collective_rotation(spins, *axis, angle.radians(), n)
        }
        UnitaryStep::WalshHadamard => operators::walsh_hadamard(n),
        UnitaryStep::Diffusion => operators::diffusion(n),
        UnitaryStep::GroundPhaseFlip => operators::ground_phase_flip(n),
        UnitaryStep::MultibodyPropagator { spins, axis, angle } => {
            operators::multibody_propagator(spins, *axis, angle.radians(), n)
        }
        UnitaryStep::TwoQubitDiagonal { k, l, lambda } => {
            if k == l {
                return Err(Error::InvalidSubset(vec![*k, *l]));
            }
            let spins = if k < l { vec![*k, *l] } else { vec![*l, *k] };
            operators::multibody_propagator(&spins, Axis::Z, lambda.radians(), n)
        }
        UnitaryStep::CollectiveZRotation { angle } => {
            operators::collective_z_rotation(angle.radians(), n)
        }
        UnitaryStep::GradientCrusher => Err(Error::CrusherNotUnitary),
    }
}

/// One weighted experiment: conjugate the shared start state by the
/// composition of `steps` (applied in list order) and scale by `weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub weight: f64,
    pub steps: Vec<UnitaryStep>,
}

impl ExperimentSpec {
    pub fn identity(weight: f64) -> Self {
        ExperimentSpec {
            weight,
            steps: Vec::new(),
        }
    }
}

/// Composite unitary of an experiment: the product of its step matrices,
/// last step leftmost.
pub fn experiment_unitary(exp: &ExperimentSpec, n: usize) -> Result<DenseOperator> {
    let mut u = DenseOperator::identity(n);
    for step in &exp.steps {
        u = step_unitary(step, n)?.mul(&u)?;
    }
    Ok(u)
}

/// The target state split into its traceless part and the unobservable
/// identity offset.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationTarget {
    pub traceless_part: OperatorSum,
    pub identity_coefficient: f64,
}

/// Resolved sign conventions for one subset size (see [`resolved_sign_pair`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPair {
    /// s in the inner collective rotation exp(s i (pi/2) sum_{k in S} I_kx).
    pub inner: i8,
    /// t in the outer propagator exp(-t i (pi/2) 2^(m-1) prod_{k in S} I_kx).
    pub outer: i8,
}

/// A full temporal-averaging plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationPlan {
    pub n: usize,
    pub scheme: Scheme,
    pub experiments: Vec<ExperimentSpec>,
    pub target: PreparationTarget,
    /// Keyed by subset size (general) or by n (logical-label).
    pub resolved_signs: BTreeMap<usize, SignPair>,
}

/// The shared start state sigma(0) = 2^(n-1) I_1z ... I_nz.
pub fn start_state(n: usize) -> Result<OperatorSum> {
    let all: Vec<usize> = (1..=n).collect();
    let scale = (1u64 << (n - 1)) as f64;
    Ok(OperatorSum::from_term(&ProductTerm::on_spins(
        scale,
        &all,
        Axis::Z,
        n,
    )?))
}

/// All odd-cardinality subsets of {1..n}, ordered by size then
/// lexicographically; there are 2^(n-1) of them.
pub fn odd_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut subsets = Vec::with_capacity(1usize << n.saturating_sub(1));
    for mask in 1u64..(1u64 << n) {
        if mask.count_ones() % 2 == 1 {
            let spins: Vec<usize> = (1..=n).filter(|k| mask & (1 << (k - 1)) != 0).collect();
            subsets.push(spins);
        }
    }
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// The sign pair fixed for each odd subset size m.
///
/// The transverse-frame image of the anticommutator flips sign with m mod 4,
/// and flipping both signs together leaves the experiment output unchanged on
/// the all-z start state; the pair below makes every experiment contribute
/// sigma(0) - (D_0 - D_s) with a plus sign, which is what the plan weights
/// assume.
pub fn resolved_sign_pair(m: usize) -> SignPair {
    debug_assert!(m % 2 == 1);
    if m % 4 == 1 {
        SignPair { inner: 1, outer: 1 }
    } else {
        SignPair {
            inner: -1,
            outer: 1,
        }
    }
}

/// The weight -1 experiment for one odd subset: rotate the subset from z
/// into the transverse plane, reflect with W D W, and close with the subset
/// propagator.
pub fn experiment_for_subset(spins: &[usize], n: usize) -> Result<ExperimentSpec> {
    operators::validate_subset(spins, n)?;
    let m = spins.len();
    if m.is_multiple_of(2) {
        return Err(Error::EvenSubset(m));
    }
    let signs = resolved_sign_pair(m);
    let inner_angle = Angle::pi(-i64::from(signs.inner), 2);
    let outer_angle = Angle::pi(i64::from(signs.outer), 2);

    let mut steps = Vec::with_capacity(5);
    if m == 1 {
        steps.push(UnitaryStep::OneQubitRotation {
            spin: spins[0],
            axis: Axis::X,
            angle: inner_angle,
        });
    } else {
        steps.push(UnitaryStep::CollectiveRotation {
            spins: spins.to_vec(),
            axis: Axis::X,
            angle: inner_angle,
        });
    }
    steps.push(UnitaryStep::WalshHadamard);
    steps.push(UnitaryStep::Diffusion);
    steps.push(UnitaryStep::WalshHadamard);
    if m == 1 {
        steps.push(UnitaryStep::OneQubitRotation {
            spin: spins[0],
            axis: Axis::X,
            angle: outer_angle,
        });
    } else {
        steps.push(UnitaryStep::MultibodyPropagator {
            spins: spins.to_vec(),
            axis: Axis::X,
            angle: outer_angle,
        });
    }
    Ok(ExperimentSpec {
        weight: -1.0,
        steps,
    })
}

/// The general scheme: 2^(n-1) + 1 experiments averaging to
/// 2^(n-1) D_0 - E/2 (the E/2 offset is target metadata, never simulated).
pub fn general_plan(n: usize) -> Result<PreparationPlan> {
    if n < 2 {
        return Err(Error::SpinCountTooSmall { n, min: 2 });
    }
    DenseOperator::check_cap(n)?;
    let repeat_weight = ((1u64 << (n - 1)) - 1) as f64;
    let mut experiments = vec![ExperimentSpec::identity(repeat_weight)];
    let mut resolved_signs = BTreeMap::new();
    for spins in odd_subsets(n) {
        resolved_signs.insert(spins.len(), resolved_sign_pair(spins.len()));
        experiments.push(experiment_for_subset(&spins, n)?);
    }

    let (d0, _) = operators::basis_projector(0, n)?;
    let scale = (1u64 << (n - 1)) as f64;
    let traceless = d0
        .scale_real(scale)
        .sub(&OperatorSum::identity(n).scale_real(0.5))?;
    Ok(PreparationPlan {
        n,
        scheme: Scheme::General,
        experiments,
        target: PreparationTarget {
            traceless_part: traceless,
            identity_coefficient: 0.5,
        },
        resolved_signs,
    })
}

/// The logical-labeling scheme: two experiments averaging to D_0 - D_{N-1}.
///
/// For n = 1 mod 4 the first experiment is the bare identity and the second
/// carries the full chain. Other residues compose the same chain with the
/// case-table sign correction (the outer propagator reversed) and, for even
/// n, the collective z rotation with n theta = pi/2; the conversion tail
/// must then sit on both experiments, so the identity experiment carries it
/// too.
pub fn logical_label_plan(n: usize) -> Result<PreparationPlan> {
    if n < 2 {
        return Err(Error::SpinCountTooSmall { n, min: 2 });
    }
    DenseOperator::check_cap(n)?;
    let all: Vec<usize> = (1..=n).collect();
    let outer_sign: i8 = if n % 4 == 1 || n.is_multiple_of(4) {
        1
    } else {
        -1
    };

    let inner = UnitaryStep::CollectiveRotation {
        spins: all.clone(),
        axis: Axis::X,
        angle: Angle::pi(-1, 2),
    };
    let propagator = UnitaryStep::MultibodyPropagator {
        spins: all,
        axis: Axis::X,
        angle: Angle::pi(i64::from(outer_sign), 2),
    };
    let conversion = UnitaryStep::CollectiveZRotation {
        angle: Angle::pi(1, 2 * n as i64),
    };

    let mut first = Vec::new();
    let mut second = vec![
        inner.clone(),
        UnitaryStep::WalshHadamard,
        UnitaryStep::Diffusion,
        UnitaryStep::WalshHadamard,
    ];
    if n.is_multiple_of(2) {
        first = vec![inner, conversion.clone(), propagator.clone()];
        second.push(conversion);
    }
    second.push(propagator);

    let experiments = vec![
        ExperimentSpec {
            weight: 1.0,
            steps: first,
        },
        ExperimentSpec {
            weight: -1.0,
            steps: second,
        },
    ];

    let dim = 1usize << n;
    let (d0, _) = operators::basis_projector(0, n)?;
    let (dtop, _) = operators::basis_projector(dim - 1, n)?;
    let traceless = d0.sub(&dtop)?;
    let mut resolved_signs = BTreeMap::new();
    resolved_signs.insert(
        n,
        SignPair {
            inner: 1,
            outer: outer_sign,
        },
    );
    Ok(PreparationPlan {
        n,
        scheme: Scheme::LogicalLabel,
        experiments,
        target: PreparationTarget {
            traceless_part: traceless,
            identity_coefficient: 0.0,
        },
        resolved_signs,
    })
}

/// Replaces each integer weight w > 1 by w unit-weight repetitions, for
/// experiment-count fidelity with the physical procedure.
pub fn expand_repetitions(plan: &PreparationPlan) -> PreparationPlan {
    let mut experiments = Vec::new();
    for exp in &plan.experiments {
        let w = exp.weight;
        if w > 1.0 && w.fract() == 0.0 {
            for _ in 0..(w as u64) {
                experiments.push(ExperimentSpec {
                    weight: 1.0,
                    steps: exp.steps.clone(),
                });
            }
        } else {
            experiments.push(exp.clone());
        }
    }
    PreparationPlan {
        experiments,
        ..plan.clone()
    }
}

/// Evaluates every experiment as a dense conjugation of the start state,
/// accumulates with weights, and compares against the plan target.
pub fn simulate_plan(plan: &PreparationPlan, tol: f64) -> Result<(OperatorSum, IdentityReport)> {
    let n = plan.n;
    DenseOperator::check_cap(n)?;
    let sigma0 = to_dense(&start_state(n)?);
    let mut avg = DenseOperator::zeros(n);
    for exp in &plan.experiments {
        let u = experiment_unitary(exp, n)?;
        let residual = u.unitarity_residual();
        if residual > dense::UNITARY_TOL {
            return Err(Error::NotUnitary {
                context: "experiment unitary",
                residual,
            });
        }
        let out = u.mul(&sigma0)?.mul(&u.dagger())?;
        let w = Complex64::new(exp.weight, 0.0);
        avg = avg.add(&out.scale(w))?;
    }
    let target_dense = to_dense(&plan.target.traceless_part);
    let residual = avg.max_abs_diff(&target_dense);
    let id = match plan.scheme {
        Scheme::General => IdentityId::PlanGeneral,
        Scheme::LogicalLabel => IdentityId::PlanLogicalLabel,
    };
    let report = IdentityReport::new(
        id,
        n,
        format!(
            "scheme={}, experiments={}",
            plan.scheme.as_str(),
            plan.experiments.len()
        ),
        residual,
        tol,
    );
    Ok((dense::from_dense(&avg), report))
}

/// The maximum-coherence operator produced by the reflection pipeline with
/// the all-transverse choice: [2^(n-1) I_1y...I_ny, N D_0]_+, computed
/// symbolically. Its ladder form is the resolved four-case table and its
/// dense form has exactly two nonzero entries, at (0, N-1) and (N-1, 0).
pub fn max_entanglement_state(n: usize) -> Result<OperatorSum> {
    if n < 2 {
        return Err(Error::SpinCountTooSmall { n, min: 2 });
    }
    DenseOperator::check_cap(n)?;
    let all: Vec<usize> = (1..=n).collect();
    let scale = (1u64 << (n - 1)) as f64;
    let plus_state = OperatorSum::from_term(&ProductTerm::on_spins(scale, &all, Axis::Y, n)?);
    plus_state.anticommutator(&operators::lomso_expand(n)?)
}

/// Oracle check that flipping both resolved signs leaves each subset
/// experiment's output invariant, and that the resolved choice produces the
/// expected per-subset contribution sigma(0) - U sigma(0) U^dag = D_0 - D_s.
pub fn verify_sign_invariance(n: usize) -> Result<Vec<IdentityReport>> {
    DenseOperator::check_cap(n)?;
    let sigma0 = to_dense(&start_state(n)?);
    let mut reports = Vec::new();
    for spins in odd_subsets(n) {
        let m = spins.len();
        let resolved = experiment_for_subset(&spins, n)?;
        let u = experiment_unitary(&resolved, n)?;
        let out = u.mul(&sigma0)?.mul(&u.dagger())?;

        // Flip both signs and rebuild by hand.
        let signs = resolved_sign_pair(m);
        let flipped = ExperimentSpec {
            weight: -1.0,
            steps: vec![
                UnitaryStep::CollectiveRotation {
                    spins: spins.clone(),
                    axis: Axis::X,
                    angle: Angle::pi(i64::from(signs.inner), 2),
                },
                UnitaryStep::WalshHadamard,
                UnitaryStep::Diffusion,
                UnitaryStep::WalshHadamard,
                UnitaryStep::MultibodyPropagator {
                    spins: spins.clone(),
                    axis: Axis::X,
                    angle: Angle::pi(-i64::from(signs.outer), 2),
                },
            ],
        };
        let uf = experiment_unitary(&flipped, n)?;
        let out_flipped = uf.mul(&sigma0)?.mul(&uf.dagger())?;

        // Expected contribution: sigma(0) - (D_0 - D_s) with s the index
        // whose set bits are exactly the subset.
        let s_index: usize = spins.iter().map(|k| 1usize << (n - k)).sum();
        let d0 = operators::basis_projector_dense(0, n)?;
        let ds = operators::basis_projector_dense(s_index, n)?;
        let expected = sigma0.sub(&d0)?.add(&ds)?;

        let residual = out
            .max_abs_diff(&out_flipped)
            .max(out.max_abs_diff(&expected));
        reports.push(IdentityReport::new(
            IdentityId::PlanGeneral,
            n,
            format!("subset={spins:?}"),
            residual,
            1e-10,
        ));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn odd_subsets_ordering_and_counts() {
        assert_eq!(odd_subsets(2), vec![vec![1], vec![2]]);
        assert_eq!(
            odd_subsets(3),
            vec![vec![1], vec![2], vec![3], vec![1, 2, 3]]
        );
        let s4 = odd_subsets(4);
        assert_eq!(s4.len(), 8);
        assert!(s4[..4].iter().all(|s| s.len() == 1));
        assert!(s4[4..].iter().all(|s| s.len() == 3));
        for n in 1..=7usize {
            assert_eq!(odd_subsets(n).len(), 1 << (n - 1));
        }
    }

    #[test]
    fn experiment_counts_per_scheme() {
        for (n, count) in [(2usize, 3usize), (3, 5), (4, 9), (5, 17), (6, 33), (7, 65)] {
            let plan = general_plan(n).unwrap();
            assert_eq!(plan.experiments.len(), count);
            // exactly one positive weight, of value 2^(n-1) - 1
            let positives: Vec<&ExperimentSpec> =
                plan.experiments.iter().filter(|e| e.weight > 0.0).collect();
            assert_eq!(positives.len(), 1);
            assert_eq!(positives[0].weight, ((1u64 << (n - 1)) - 1) as f64);
            assert!(positives[0].steps.is_empty());
        }
        for n in 2..=6usize {
            assert_eq!(logical_label_plan(n).unwrap().experiments.len(), 2);
        }
        assert!(general_plan(1).is_err());
        assert!(logical_label_plan(1).is_err());
    }

    #[test]
    fn even_subsets_rejected() {
        assert!(matches!(
            experiment_for_subset(&[1, 2], 3),
            Err(Error::EvenSubset(2))
        ));
    }

    #[test]
    fn start_state_is_half_signed_diagonal() {
        let s = to_dense(&start_state(3).unwrap());
        for i in 0..8usize {
            let sign = if (i as u32).count_ones().is_multiple_of(2) {
                0.5
            } else {
                -0.5
            };
            assert!((s[(i, i)] - c(sign, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn general_plan_two_spins_hits_printed_diagonal() {
        let plan = general_plan(2).unwrap();
        let (avg, report) = simulate_plan(&plan, 1e-10).unwrap();
        assert!(report.passed, "{}", report.summary());
        // 2 D_0 - E/2 = diag(3/2, -1/2, -1/2, -1/2)
        let dense_avg = to_dense(&avg);
        let expected = DenseOperator::from_diagonal(
            2,
            &[c(1.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0)],
        );
        assert!(dense_avg.approx_eq(&expected, 1e-12));
        assert_eq!(plan.target.identity_coefficient, 0.5);
    }

    #[test]
    fn general_plans_hit_target_through_six_spins() {
        for n in 2..=6usize {
            let plan = general_plan(n).unwrap();
            let (_, report) = simulate_plan(&plan, 1e-9).unwrap();
            assert!(report.passed, "{}", report.summary());
        }
    }

    #[test]
    fn logical_label_plans_hit_target() {
        for n in 2..=6usize {
            let plan = logical_label_plan(n).unwrap();
            let (avg, report) = simulate_plan(&plan, 1e-9).unwrap();
            assert!(report.passed, "n={n}: {}", report.summary());
            // support exactly on the two poles, opposite equal magnitudes
            let dense_avg = to_dense(&avg);
            let dim = 1usize << n;
            for i in 0..dim {
                for j in 0..dim {
                    let v = dense_avg[(i, j)];
                    if i == j && (i == 0 || i == dim - 1) {
                        continue;
                    }
                    assert!(v.norm() < 1e-9, "unexpected entry at ({i},{j}): {v}");
                }
            }
            assert!((dense_avg[(0, 0)] - c(1.0, 0.0)).norm() < 1e-9);
            assert!((dense_avg[(dim - 1, dim - 1)] - c(-1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn logical_label_even_n_carries_conversion_on_both_experiments() {
        let plan = logical_label_plan(2).unwrap();
        let has_z = |steps: &[UnitaryStep]| {
            steps
                .iter()
                .any(|s| matches!(s, UnitaryStep::CollectiveZRotation { .. }))
        };
        assert!(has_z(&plan.experiments[0].steps));
        assert!(has_z(&plan.experiments[1].steps));
        // odd n: bare identity first experiment
        let plan = logical_label_plan(5).unwrap();
        assert!(plan.experiments[0].steps.is_empty());
    }

    #[test]
    fn sign_invariance_and_per_subset_contributions() {
        for n in 2..=5usize {
            for report in verify_sign_invariance(n).unwrap() {
                assert!(report.passed, "{}", report.summary());
            }
        }
    }

    #[test]
    fn printed_sandwich_equals_adjoint() {
        // The right-hand factors as printed (reversed order, opposite phases)
        // recompose the adjoint because the reflection block is Hermitian.
        let n = 3;
        let exp = experiment_for_subset(&[1, 2, 3], n).unwrap();
        let u = experiment_unitary(&exp, n).unwrap();
        let mut right = DenseOperator::identity(n);
        for step in exp.steps.iter().rev() {
            let m = match step {
                UnitaryStep::OneQubitRotation { spin, axis, angle } => {
                    operators::collective_rotation(&[*spin], *axis, -angle.radians(), n).unwrap()
                }
                UnitaryStep::CollectiveRotation { spins, axis, angle } => {
                    operators::collective_rotation(spins, *axis, -angle.radians(), n).unwrap()
                }
                UnitaryStep::MultibodyPropagator { spins, axis, angle } => {
                    operators::multibody_propagator(spins, *axis, -angle.radians(), n).unwrap()
                }
                other => step_unitary(other, n).unwrap(),
            };
            right = m.mul(&right).unwrap();
        }
        assert!(u.dagger().approx_eq(&right, 1e-12));
    }

    #[test]
    fn zeroed_weights_give_zero_operator() {
        let mut plan = general_plan(2).unwrap();
        for exp in &mut plan.experiments {
            exp.weight = 0.0;
        }
        let (avg, report) = simulate_plan(&plan, 1e-10).unwrap();
        assert!(avg.is_zero());
        assert!(!report.passed);
    }

    #[test]
    fn expand_repetitions_reaches_exhaustive_count() {
        for n in 2..=5usize {
            let plan = general_plan(n).unwrap();
            let expanded = expand_repetitions(&plan);
            assert_eq!(expanded.experiments.len(), (1 << n) - 1);
            assert!(expanded.experiments.iter().all(|e| e.weight.abs() == 1.0));
            let (_, report) = simulate_plan(&expanded, 1e-9).unwrap();
            assert!(report.passed);
        }
    }

    #[test]
    fn max_entanglement_state_forms() {
        // n=2: -2 (I-I- + I+I+); dense support on the two antidiagonal corners
        let state = max_entanglement_state(2).unwrap();
        let ladder = state.to_ladder();
        use crate::pauli::LadderFactor::{Minus, Plus};
        assert!((ladder.coefficient(&[Minus, Minus]) - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((ladder.coefficient(&[Plus, Plus]) - c(-2.0, 0.0)).norm() < 1e-14);
        assert_eq!(ladder.term_count(), 2);

        let state3 = max_entanglement_state(3).unwrap();
        let ladder3 = state3.to_ladder();
        assert!((ladder3.coefficient(&[Minus; 3]) - c(0.0, -4.0)).norm() < 1e-14);
        assert!((ladder3.coefficient(&[Plus; 3]) - c(0.0, 4.0)).norm() < 1e-14);

        for n in 2..=5usize {
            let dense_state = to_dense(&max_entanglement_state(n).unwrap());
            let dim = 1usize << n;
            for i in 0..dim {
                for j in 0..dim {
                    let v = dense_state[(i, j)];
                    if (i, j) == (0, dim - 1) || (i, j) == (dim - 1, 0) {
                        assert!(v.norm() > 0.1);
                    } else {
                        assert!(v.norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn plan_target_traceless_split() {
        let plan = general_plan(3).unwrap();
        assert!(plan.target.traceless_part.trace().norm() < 1e-12);
        // traceless + c E = 2^(n-1) D_0
        let full = plan
            .target
            .traceless_part
            .add(&OperatorSum::identity(3).scale_real(plan.target.identity_coefficient))
            .unwrap();
        let (d0, _) = operators::basis_projector(0, 3).unwrap();
        assert!(full.approx_eq(&d0.scale_real(4.0), 1e-12));
    }

    #[test]
    fn crusher_steps_are_rejected_in_plans() {
        let exp = ExperimentSpec {
            weight: 1.0,
            steps: vec![UnitaryStep::GradientCrusher],
        };
        assert!(matches!(
            experiment_unitary(&exp, 2),
            Err(Error::CrusherNotUnitary)
        ));
    }

    #[test]
    fn count_advantage_over_exhaustive() {
        for n in 3..=10usize {
            assert!((1u64 << (n - 1)) + 1 < (1u64 << n) - 1);
        }
    }

    #[test]
    fn angle_values() {
        assert_eq!(Angle::pi(1, 2).radians(), PI / 2.0);
        assert_eq!(Angle::pi(-1, 2).radians(), -PI / 2.0);
        assert_eq!(Angle::Radians(0.25).radians(), 0.25);
    }
}
