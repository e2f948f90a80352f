//! Lowers every plan step to the two-gate target set: one-qubit rotations
//! and the two-qubit diagonal gate exp(-i lambda 2 I_kz I_lz).
//!
//! Multi-spin z-string propagators are built by a nesting ladder: the
//! (m-1)-string propagator is conjugated by a bilinear block (an x-rotation
//! sandwich around the diagonal gate, then a y rotation) that extends the
//! string by one spin. x- and y-axis propagators conjugate the z version
//! with per-qubit rotations. The ground phase flip expands over all z
//! strings, which costs O(n 2^n) gates; recorded, not optimized.
//!
//! Global phase is tracked explicitly (the per-qubit Hadamard lowering and
//! the phase-flip expansion are the only sources) and excluded from
//! equality: recomposition compares up to a unit phase taken from the
//! largest-magnitude entry ratio.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::identities::{IdentityId, IdentityReport};
use crate::operators;
use crate::pauli::{Axis, Factor, OperatorSum, ProductTerm};
use crate::planner::{step_unitary, Angle, ExperimentSpec, PreparationPlan, UnitaryStep};

use std::f64::consts::PI;

/// One gate of the target set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Gate {
    #[serde(rename = "1q")]
    OneQubit { spin: usize, axis: Axis, angle: f64 },
    #[serde(rename = "g2")]
    Diagonal2 { k: usize, l: usize, lambda: f64 },
}

impl Gate {
    fn inverse(&self) -> Gate {
        match *self {
            Gate::OneQubit { spin, axis, angle } => Gate::OneQubit {
                spin,
                axis,
                angle: -angle,
            },
            Gate::Diagonal2 { k, l, lambda } => Gate::Diagonal2 {
                k,
                l,
                lambda: -lambda,
            },
        }
    }
}

/// Dense unitary of one gate.
pub fn gate_unitary(gate: &Gate, n: usize) -> Result<DenseOperator> {
    match gate {
        Gate::OneQubit { spin, axis, angle } => {
            operators::collective_rotation(&[*spin], *axis, *angle, n)
        }
        Gate::Diagonal2 { k, l, lambda } => {
            if k == l {
                return Err(Error::InvalidSubset(vec![*k, *l]));
            }
            let spins = if k < l { vec![*k, *l] } else { vec![*l, *k] };
            operators::multibody_propagator(&spins, Axis::Z, *lambda, n)
        }
    }
}

/// An ordered gate list with its tracked (non-physical) global phase.
///
/// Gates apply in list order; the recomposed matrix is
/// global_phase * (G_m ... G_2 G_1).
#[derive(Debug, Clone, PartialEq)]
pub struct GateSequence {
    pub n: usize,
    pub gates: Vec<Gate>,
    pub global_phase: Complex64,
}

impl GateSequence {
    pub fn empty(n: usize) -> Self {
        GateSequence {
            n,
            gates: Vec::new(),
            global_phase: Complex64::new(1.0, 0.0),
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: GateSequence) {
        debug_assert_eq!(self.n, other.n);
        self.gates.extend(other.gates);
        self.global_phase *= other.global_phase;
    }

    /// Chronologically reversed sequence with inverted angles and phase.
    pub fn inverse(&self) -> GateSequence {
        GateSequence {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            global_phase: self.global_phase.conj(),
        }
    }

    /// Recomposed dense matrix including the tracked phase.
    ///
    /// Gates are applied qubit-wise (O(4^n) per gate) rather than by full
    /// matrix products; the two routes are cross-checked in tests.
    pub fn dense(&self) -> Result<DenseOperator> {
        let mut u = DenseOperator::identity(self.n);
        for gate in &self.gates {
            apply_gate_left(&mut u, gate, self.n)?;
        }
        Ok(u.scale(self.global_phase))
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

/// Left-multiplies `u` by the gate's unitary in place.
///
/// One-qubit gates mix row pairs that differ in the target bit; the diagonal
/// coupling scales each row by e^{-+ i lambda / 2} according to bit parity.
fn apply_gate_left(u: &mut DenseOperator, gate: &Gate, n: usize) -> Result<()> {
    let dim = u.dim();
    match *gate {
        Gate::OneQubit { spin, axis, angle } => {
            if spin < 1 || spin > n {
                return Err(Error::SpinOutOfRange { spin, n });
            }
            let rot = operators::single_spin_rotation(axis, angle);
            let (a, b) = (rot[(0, 0)], rot[(0, 1)]);
            let (c, d) = (rot[(1, 0)], rot[(1, 1)]);
            let mask = 1usize << (n - spin);
            for i0 in 0..dim {
                if i0 & mask != 0 {
                    continue;
                }
                let i1 = i0 | mask;
                for j in 0..dim {
                    let (r0, r1) = (u[(i0, j)], u[(i1, j)]);
                    u[(i0, j)] = a * r0 + b * r1;
                    u[(i1, j)] = c * r0 + d * r1;
                }
            }
        }
        Gate::Diagonal2 { k, l, lambda } => {
            if k == l || k < 1 || k > n || l < 1 || l > n {
                return Err(Error::InvalidSubset(vec![k, l]));
            }
            let mask_k = 1usize << (n - k);
            let mask_l = 1usize << (n - l);
            let aligned = Complex64::new(0.0, -lambda / 2.0).exp();
            let opposed = Complex64::new(0.0, lambda / 2.0).exp();
            for i in 0..dim {
                let phase = if ((i & mask_k) != 0) == ((i & mask_l) != 0) {
                    aligned
                } else {
                    opposed
                };
                for j in 0..dim {
                    u[(i, j)] *= phase;
                }
            }
        }
    }
    Ok(())
}

/// Realizes exp(-i theta 2^(m-1) prod_{k in S} I_kz) in the gate set.
///
/// |S| = 1 is a z rotation and |S| = 2 a single diagonal gate; longer
/// strings conjugate the one-shorter propagator by the bilinear extension
/// block.
pub fn compile_zstring(spins: &[usize], theta: f64, n: usize) -> Result<GateSequence> {
    operators::validate_subset(spins, n)?;
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let m = spins.len();
    let mut seq = GateSequence::empty(n);
    match m {
        1 => seq.push(Gate::OneQubit {
            spin: spins[0],
            axis: Axis::Z,
            angle: theta,
        }),
        2 => seq.push(Gate::Diagonal2 {
            k: spins[0],
            l: spins[1],
            lambda: theta,
        }),
        _ => {
            let bridge_src = spins[m - 2];
            let bridge_dst = spins[m - 1];
            let extension = extension_block(bridge_src, bridge_dst, n);
            seq.extend(extension.inverse());
            seq.extend(compile_zstring(&spins[..m - 1], theta, n)?);
            seq.extend(extension);
        }
    }
    Ok(seq)
}

/// The block W with W (2^(m-2) I_{s1,z}...I_{a,z}) W^dag extending the string
/// onto spin b: the bilinear propagator labeled pi I_ay I_bz followed by the
/// -(pi/2) y rotation on a.
fn extension_block(a: usize, b: usize, n: usize) -> GateSequence {
    let mut seq = GateSequence::empty(n);
    // x sandwich turning the diagonal coupling into the y-z bilinear
    seq.push(Gate::OneQubit {
        spin: a,
        axis: Axis::X,
        angle: PI / 2.0,
    });
    seq.push(Gate::Diagonal2 {
        k: a.min(b),
        l: a.max(b),
        lambda: PI / 2.0,
    });
    seq.push(Gate::OneQubit {
        spin: a,
        axis: Axis::X,
        angle: -PI / 2.0,
    });
    // closing rotation
    seq.push(Gate::OneQubit {
        spin: a,
        axis: Axis::Y,
        angle: -PI / 2.0,
    });
    seq
}

/// All nonempty subsets of {1..n}, by size then lexicographically.
fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut subsets = Vec::with_capacity((1usize << n) - 1);
    for mask in 1u64..(1u64 << n) {
        let spins: Vec<usize> = (1..=n).filter(|k| mask & (1 << (k - 1)) != 0).collect();
        subsets.push(spins);
    }
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// Lowers one plan step to the gate set. The gradient crusher is a channel,
/// not a unitary, and is rejected.
pub fn compile_step(step: &UnitaryStep, n: usize) -> Result<GateSequence> {
    DenseOperator::check_cap(n)?;
    let mut seq = GateSequence::empty(n);
    match step {
        UnitaryStep::OneQubitRotation { spin, axis, angle } => {
            if *spin < 1 || *spin > n {
                return Err(Error::SpinOutOfRange { spin: *spin, n });
            }
            seq.push(Gate::OneQubit {
                spin: *spin,
                axis: *axis,
                angle: angle.radians(),
            });
        }
        UnitaryStep::CollectiveRotation { spins, axis, angle } => {
            operators::validate_subset(spins, n)?;
            for &spin in spins {
                seq.push(Gate::OneQubit {
                    spin,
                    axis: *axis,
                    angle: angle.radians(),
                });
            }
        }
        UnitaryStep::CollectiveZRotation { angle } => {
            for spin in 1..=n {
                seq.push(Gate::OneQubit {
                    spin,
                    axis: Axis::Z,
                    angle: angle.radians(),
                });
            }
        }
        UnitaryStep::TwoQubitDiagonal { k, l, lambda } => {
            if k == l {
                return Err(Error::InvalidSubset(vec![*k, *l]));
            }
            seq.push(Gate::Diagonal2 {
                k: *k.min(l),
                l: *k.max(l),
                lambda: lambda.radians(),
            });
        }
        UnitaryStep::WalshHadamard => {
            // H = i R_y(pi/2) R_z(pi) per qubit; phase i each.
            for spin in 1..=n {
                seq.push(Gate::OneQubit {
                    spin,
                    axis: Axis::Z,
                    angle: PI,
                });
                seq.push(Gate::OneQubit {
                    spin,
                    axis: Axis::Y,
                    angle: PI / 2.0,
                });
                seq.global_phase *= Complex64::new(0.0, 1.0);
            }
        }
        UnitaryStep::GroundPhaseFlip => {
            // R = exp(-i pi D_0) with D_0 expanded over z strings: one
            // commuting z-string propagator at theta = 2 pi / N per nonempty
            // subset, plus the scalar phase from the empty one.
            let big_n = (1u64 << n) as f64;
            let theta = 2.0 * PI / big_n;
            for spins in nonempty_subsets(n) {
                seq.extend(compile_zstring(&spins, theta, n)?);
            }
            seq.global_phase *= Complex64::new(0.0, -PI / big_n).exp();
        }
        UnitaryStep::Diffusion => {
            seq.extend(compile_step(&UnitaryStep::WalshHadamard, n)?);
            seq.extend(compile_step(&UnitaryStep::GroundPhaseFlip, n)?);
            seq.extend(compile_step(&UnitaryStep::WalshHadamard, n)?);
        }
        UnitaryStep::MultibodyPropagator { spins, axis, angle } => {
            operators::validate_subset(spins, n)?;
            let theta = angle.radians();
            match axis {
                Axis::Z => seq.extend(compile_zstring(spins, theta, n)?),
                Axis::X => {
                    // conjugate the z string by per-qubit y rotations (z -> x)
                    for &spin in spins {
                        seq.push(Gate::OneQubit {
                            spin,
                            axis: Axis::Y,
                            angle: -PI / 2.0,
                        });
                    }
                    seq.extend(compile_zstring(spins, theta, n)?);
                    for &spin in spins {
                        seq.push(Gate::OneQubit {
                            spin,
                            axis: Axis::Y,
                            angle: PI / 2.0,
                        });
                    }
                }
                Axis::Y => {
                    // per-qubit x rotations send z -> y
                    for &spin in spins {
                        seq.push(Gate::OneQubit {
                            spin,
                            axis: Axis::X,
                            angle: PI / 2.0,
                        });
                    }
                    seq.extend(compile_zstring(spins, theta, n)?);
                    for &spin in spins {
                        seq.push(Gate::OneQubit {
                            spin,
                            axis: Axis::X,
                            angle: -PI / 2.0,
                        });
                    }
                }
            }
        }
        UnitaryStep::GradientCrusher => return Err(Error::CrusherNotUnitary),
    }
    Ok(seq)
}

/// Concatenates the lowered steps of one experiment into a single sequence.
pub fn compile_experiment(exp: &ExperimentSpec, n: usize) -> Result<GateSequence> {
    let mut seq = GateSequence::empty(n);
    for step in &exp.steps {
        seq.extend(compile_step(step, n)?);
    }
    Ok(seq)
}

/// One gate sequence per experiment.
pub fn compile_plan(plan: &PreparationPlan) -> Result<Vec<GateSequence>> {
    plan.experiments
        .iter()
        .map(|exp| compile_experiment(exp, plan.n))
        .collect()
}

/// Max-entry difference minimized over a unit global phase, taken from the
/// ratio at the source's largest-magnitude entry.
pub fn phase_blind_residual(recomposed: &DenseOperator, source: &DenseOperator) -> f64 {
    let dim = source.dim();
    let mut best = (0usize, 0usize);
    let mut best_mag = -1.0;
    for i in 0..dim {
        for j in 0..dim {
            let mag = source[(i, j)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = (i, j);
            }
        }
    }
    if best_mag <= 0.0 {
        return recomposed.max_abs_diff(source);
    }
    let ratio = recomposed[best] / source[best];
    if ratio.norm() == 0.0 {
        return recomposed.max_abs_diff(source);
    }
    let phase = ratio / Complex64::new(ratio.norm(), 0.0);
    recomposed.max_abs_diff(&source.scale(phase))
}

/// Recomposes the sequence and compares against an explicit source unitary.
pub fn verify_sequence(
    source: &DenseOperator,
    seq: &GateSequence,
    tol: f64,
) -> Result<IdentityReport> {
    let recomposed = seq.dense()?;
    Ok(IdentityReport::new(
        IdentityId::Compilation,
        seq.n,
        format!("gates={}", seq.gate_count()),
        phase_blind_residual(&recomposed, source),
        tol,
    ))
}

/// Recomposes the lowering of one step and compares against the step's own
/// dense unitary, up to global phase.
pub fn verify_compilation(
    step: &UnitaryStep,
    seq: &GateSequence,
    tol: f64,
) -> Result<IdentityReport> {
    let source = step_unitary(step, seq.n)?;
    let recomposed = seq.dense()?;
    Ok(IdentityReport::new(
        IdentityId::Compilation,
        seq.n,
        format!("step={}, gates={}", step.kind_name(), seq.gate_count()),
        phase_blind_residual(&recomposed, &source),
        tol,
    ))
}

/// The equilibrium-to-n-spin-order chain, fully lowered: for k = 1..n-1 the
/// bilinear block labeled pi I_ky I_{k+1,z} followed by the -(pi/2) I_ky
/// rotation, each in gate-set form. Conjugating I_1z by the sequence yields
/// 2^(n-1) I_1z ... I_nz.
pub fn equilibrium_to_order_sequence(n: usize) -> Result<GateSequence> {
    if n < 2 {
        return Err(Error::SpinCountTooSmall { n, min: 2 });
    }
    DenseOperator::check_cap(n)?;
    let mut seq = GateSequence::empty(n);
    for k in 1..n {
        seq.extend(extension_block(k, k + 1, n));
    }
    Ok(seq)
}

/// Isolation of I_kz from the thermal state sum_j I_jz: a selective x pulse
/// on spin k, a collective -x pulse, then the gradient crusher that cancels
/// the remaining transverse magnetizations.
pub fn selective_prep_sequence(n: usize, k: usize) -> Result<Vec<UnitaryStep>> {
    DenseOperator::check_cap(n)?;
    if k < 1 || k > n {
        return Err(Error::SpinOutOfRange { spin: k, n });
    }
    let all: Vec<usize> = (1..=n).collect();
    Ok(vec![
        UnitaryStep::OneQubitRotation {
            spin: k,
            axis: Axis::X,
            angle: Angle::pi(1, 2),
        },
        UnitaryStep::CollectiveRotation {
            spins: all,
            axis: Axis::X,
            angle: Angle::pi(-1, 2),
        },
        UnitaryStep::GradientCrusher,
    ])
}

fn third_axis(a: Axis, b: Axis) -> (f64, Axis) {
    // sign = Levi-Civita epsilon_{abc} with c the remaining axis
    match (a, b) {
        (Axis::X, Axis::Y) => (1.0, Axis::Z),
        (Axis::Y, Axis::X) => (-1.0, Axis::Z),
        (Axis::Y, Axis::Z) => (1.0, Axis::X),
        (Axis::Z, Axis::Y) => (-1.0, Axis::X),
        (Axis::Z, Axis::X) => (1.0, Axis::Y),
        (Axis::X, Axis::Z) => (-1.0, Axis::Y),
        _ => unreachable!("parallel axes have no third"),
    }
}

fn axis_of_factor(f: Factor) -> Option<Axis> {
    match f {
        Factor::E => None,
        Factor::X => Some(Axis::X),
        Factor::Y => Some(Axis::Y),
        Factor::Z => Some(Axis::Z),
    }
}

/// Exact product-operator evolution under one one-qubit rotation:
/// I_b -> cos(theta) I_b + sin(theta) eps_{abc} I_c on the rotated spin.
pub fn evolve_one_qubit(sum: &OperatorSum, spin: usize, axis: Axis, theta: f64) -> OperatorSum {
    let n = sum.spin_count();
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let mut out = OperatorSum::zero(n);
    for (factors, coeff) in sum.terms() {
        let f = factors[spin - 1];
        match axis_of_factor(f) {
            None => out.add_term(&ProductTerm::new(*coeff, factors.clone())),
            Some(b) if b == axis => out.add_term(&ProductTerm::new(*coeff, factors.clone())),
            Some(b) => {
                let (sign, c_axis) = third_axis(axis, b);
                out.add_term(&ProductTerm::new(coeff * cos_t, factors.clone()));
                let mut rotated = factors.clone();
                rotated[spin - 1] = c_axis.factor();
                out.add_term(&ProductTerm::new(coeff * (sin_t * sign), rotated));
            }
        }
    }
    out
}

/// Exact product-operator evolution under the two-qubit diagonal gate
/// exp(-i lambda 2 I_kz I_lz).
///
/// Terms with zero or two transverse factors on {k, l} commute with the
/// coupling; a single transverse factor precesses, with the partner toggling
/// E <-> Z (weight 2 appearing, weight 1/2 disappearing).
pub fn evolve_diagonal2(sum: &OperatorSum, k: usize, l: usize, lambda: f64) -> OperatorSum {
    let n = sum.spin_count();
    let (cos_l, sin_l) = (lambda.cos(), lambda.sin());
    let transverse = |f: Factor| matches!(f, Factor::X | Factor::Y);
    let mut out = OperatorSum::zero(n);
    for (factors, coeff) in sum.terms() {
        let fk = factors[k - 1];
        let fl = factors[l - 1];
        let active = match (transverse(fk), transverse(fl)) {
            (true, false) => Some((k, l)),
            (false, true) => Some((l, k)),
            _ => None,
        };
        match active {
            None => out.add_term(&ProductTerm::new(*coeff, factors.clone())),
            Some((t, p)) => {
                out.add_term(&ProductTerm::new(coeff * cos_l, factors.clone()));
                let (sign, t_new) = match factors[t - 1] {
                    Factor::X => (1.0, Factor::Y),
                    Factor::Y => (-1.0, Factor::X),
                    _ => unreachable!(),
                };
                let (scale, p_new) = match factors[p - 1] {
                    Factor::E => (2.0, Factor::Z),
                    Factor::Z => (0.5, Factor::E),
                    _ => unreachable!(),
                };
                let mut rotated = factors.clone();
                rotated[t - 1] = t_new;
                rotated[p - 1] = p_new;
                out.add_term(&ProductTerm::new(coeff * (sin_l * sign * scale), rotated));
            }
        }
    }
    out
}

/// Conjugates a sum through a gate list, gate by gate.
pub fn evolve_by_gates(sum: &OperatorSum, gates: &[Gate]) -> OperatorSum {
    let mut state = sum.clone();
    for gate in gates {
        state = match *gate {
            Gate::OneQubit { spin, axis, angle } => evolve_one_qubit(&state, spin, axis, angle),
            Gate::Diagonal2 { k, l, lambda } => evolve_diagonal2(&state, k, l, lambda),
        };
    }
    state
}

/// Applies rotation steps and gradient crushers symbolically; the reflection
/// blocks and multibody propagators are not supported here.
pub fn apply_steps_symbolic(sum: &OperatorSum, steps: &[UnitaryStep]) -> Result<OperatorSum> {
    let mut state = sum.clone();
    for step in steps {
        state = match step {
            UnitaryStep::OneQubitRotation { spin, axis, angle } => {
                evolve_one_qubit(&state, *spin, *axis, angle.radians())
            }
            UnitaryStep::CollectiveRotation { spins, axis, angle } => {
                let mut s = state;
                for &spin in spins {
                    s = evolve_one_qubit(&s, spin, *axis, angle.radians());
                }
                s
            }
            UnitaryStep::CollectiveZRotation { angle } => {
                let mut s = state;
                for spin in 1..=sum.spin_count() {
                    s = evolve_one_qubit(&s, spin, Axis::Z, angle.radians());
                }
                s
            }
            UnitaryStep::TwoQubitDiagonal { k, l, lambda } => {
                evolve_diagonal2(&state, *k, *l, lambda.radians())
            }
            UnitaryStep::GradientCrusher => state.crush_transverse(),
            other => return Err(Error::UnsupportedSymbolicStep(other.kind_name())),
        };
    }
    Ok(state)
}
