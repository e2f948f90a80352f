//! JSON wire formats.
//!
//! Plan files:
//! `{version, n, scheme, experiments: [{weight, initial: "zorder", steps}],
//!   target: {identity_coefficient, terms: [{coeff: [re, im], factors}]},
//!   resolved_signs}`.
//! Factor strings are n characters over {E, X, Y, Z} with spin 1 leftmost;
//! complex numbers serialize as [re, im] pairs; angles as {num, den}
//! multiples of pi where exact, plain radians otherwise. Term order is the
//! canonical lexicographic one, so output is deterministic.
//!
//! Gate files wrap one gate sequence per experiment:
//! `{version, n, gates: [{kind: "1q", spin, axis, angle} |
//!   {kind: "g2", k, l, lambda}], global_phase: [re, im]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::compiler::{Gate, GateSequence};
use crate::error::{Error, Result};
use crate::pauli::{factors_from_string, factors_to_string, OperatorSum, ProductTerm};
use crate::planner::{
    ExperimentSpec, PreparationPlan, PreparationTarget, Scheme, SignPair, UnitaryStep,
};

pub const FORMAT_VERSION: u32 = 1;

/// The label every experiment's start state carries: the longitudinal
/// n-spin order.
pub const INITIAL_STATE_LABEL: &str = "zorder";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDto {
    pub coeff: Complex64,
    pub factors: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetDto {
    pub identity_coefficient: f64,
    pub terms: Vec<TermDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentDto {
    pub weight: f64,
    pub initial: String,
    pub steps: Vec<UnitaryStep>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanFile {
    pub version: u32,
    pub n: usize,
    pub scheme: Scheme,
    pub experiments: Vec<ExperimentDto>,
    pub target: TargetDto,
    pub resolved_signs: BTreeMap<usize, SignPair>,
}

pub fn sum_to_terms(sum: &OperatorSum) -> Vec<TermDto> {
    sum.terms()
        .map(|(factors, coeff)| TermDto {
            coeff: *coeff,
            factors: factors_to_string(factors),
        })
        .collect()
}

pub fn terms_to_sum(terms: &[TermDto], n: usize) -> Result<OperatorSum> {
    let mut sum = OperatorSum::zero(n);
    for term in terms {
        let factors = factors_from_string(&term.factors)
            .ok_or_else(|| Error::Malformed(format!("bad factor string `{}`", term.factors)))?;
        if factors.len() != n {
            return Err(Error::Malformed(format!(
                "factor string `{}` has length {}, expected {}",
                term.factors,
                factors.len(),
                n
            )));
        }
        sum.add_term(&ProductTerm::new(term.coeff, factors));
    }
    Ok(sum)
}

pub fn plan_to_file(plan: &PreparationPlan) -> PlanFile {
    PlanFile {
        version: FORMAT_VERSION,
        n: plan.n,
        scheme: plan.scheme,
        experiments: plan
            .experiments
            .iter()
            .map(|exp| ExperimentDto {
                weight: exp.weight,
                initial: INITIAL_STATE_LABEL.to_string(),
                steps: exp.steps.clone(),
            })
            .collect(),
        target: TargetDto {
            identity_coefficient: plan.target.identity_coefficient,
            terms: sum_to_terms(&plan.target.traceless_part),
        },
        resolved_signs: plan.resolved_signs.clone(),
    }
}

pub fn plan_from_file(file: &PlanFile) -> Result<PreparationPlan> {
    if file.version != FORMAT_VERSION {
        return Err(Error::Malformed(format!(
            "unsupported plan version {}",
            file.version
        )));
    }
    for exp in &file.experiments {
        if exp.initial != INITIAL_STATE_LABEL {
            return Err(Error::Malformed(format!(
                "unknown initial state label `{}`",
                exp.initial
            )));
        }
    }
    Ok(PreparationPlan {
        n: file.n,
        scheme: file.scheme,
        experiments: file
            .experiments
            .iter()
            .map(|exp| ExperimentSpec {
                weight: exp.weight,
                steps: exp.steps.clone(),
            })
            .collect(),
        target: PreparationTarget {
            traceless_part: terms_to_sum(&file.target.terms, file.n)?,
            identity_coefficient: file.target.identity_coefficient,
        },
        resolved_signs: file.resolved_signs.clone(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateSequenceDto {
    pub version: u32,
    pub n: usize,
    pub gates: Vec<Gate>,
    pub global_phase: Complex64,
}

pub fn sequence_to_dto(seq: &GateSequence) -> GateSequenceDto {
    GateSequenceDto {
        version: FORMAT_VERSION,
        n: seq.n,
        gates: seq.gates.clone(),
        global_phase: seq.global_phase,
    }
}

pub fn sequence_from_dto(dto: &GateSequenceDto) -> Result<GateSequence> {
    if dto.version != FORMAT_VERSION {
        return Err(Error::Malformed(format!(
            "unsupported gate-sequence version {}",
            dto.version
        )));
    }
    Ok(GateSequence {
        n: dto.n,
        gates: dto.gates.clone(),
        global_phase: dto.global_phase,
    })
}

/// One compiled experiment: the source steps plus their lowered sequence,
/// so a checker can recompose both sides from the file alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompiledExperimentDto {
    pub weight: f64,
    pub steps: Vec<UnitaryStep>,
    pub gate_sequence: GateSequenceDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompiledFile {
    pub version: u32,
    pub n: usize,
    pub scheme: Scheme,
    pub experiments: Vec<CompiledExperimentDto>,
}

pub fn compiled_to_file(plan: &PreparationPlan, sequences: &[GateSequence]) -> CompiledFile {
    CompiledFile {
        version: FORMAT_VERSION,
        n: plan.n,
        scheme: plan.scheme,
        experiments: plan
            .experiments
            .iter()
            .zip(sequences)
            .map(|(exp, seq)| CompiledExperimentDto {
                weight: exp.weight,
                steps: exp.steps.clone(),
                gate_sequence: sequence_to_dto(seq),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;
    use crate::planner::{general_plan, logical_label_plan, Angle};

    #[test]
    fn plan_round_trip_preserves_everything() {
        for plan in [general_plan(3).unwrap(), logical_label_plan(4).unwrap()] {
            let file = plan_to_file(&plan);
            let json = serde_json::to_string_pretty(&file).unwrap();
            let parsed: PlanFile = serde_json::from_str(&json).unwrap();
            let back = plan_from_file(&parsed).unwrap();
            assert_eq!(back, plan);
        }
    }

    #[test]
    fn plan_json_shape() {
        let plan = general_plan(2).unwrap();
        let json = serde_json::to_value(plan_to_file(&plan)).unwrap();
        assert_eq!(json["version"], 1);
        assert_eq!(json["n"], 2);
        assert_eq!(json["scheme"], "general");
        assert_eq!(json["experiments"].as_array().unwrap().len(), 3);
        assert_eq!(json["experiments"][0]["initial"], "zorder");
        assert_eq!(json["experiments"][0]["weight"], 1.0);
        // first subset experiment: inner one-qubit rotation with pi-rational angle
        let step = &json["experiments"][1]["steps"][0];
        assert_eq!(step["kind"], "one-qubit-rotation");
        assert_eq!(step["spin"], 1);
        assert_eq!(step["axis"], "x");
        assert_eq!(step["angle"]["num"], -1);
        assert_eq!(step["angle"]["den"], 2);
        // target terms carry [re, im] coefficients and EXYZ strings
        let term = &json["target"]["terms"][0];
        assert!(term["coeff"].as_array().unwrap().len() == 2);
        assert!(term["factors"].as_str().unwrap().len() == 2);
        // resolved signs keyed by subset size
        assert_eq!(json["resolved_signs"]["1"]["inner"], 1);
        assert_eq!(json["resolved_signs"]["1"]["outer"], 1);
    }

    #[test]
    fn deterministic_output() {
        let a = serde_json::to_string(&plan_to_file(&general_plan(4).unwrap())).unwrap();
        let b = serde_json::to_string(&plan_to_file(&general_plan(4).unwrap())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_factor_strings_rejected() {
        let terms = [TermDto {
            coeff: Complex64::new(1.0, 0.0),
            factors: "EQ".into(),
        }];
        assert!(terms_to_sum(&terms, 2).is_err());
        let terms = [TermDto {
            coeff: Complex64::new(1.0, 0.0),
            factors: "EXE".into(),
        }];
        assert!(terms_to_sum(&terms, 2).is_err());
    }

    #[test]
    fn gate_sequence_json_shape() {
        let seq = crate::compiler::compile_step(&UnitaryStep::WalshHadamard, 1).unwrap();
        let json = serde_json::to_value(sequence_to_dto(&seq)).unwrap();
        assert_eq!(json["version"], 1);
        assert_eq!(json["gates"][0]["kind"], "1q");
        assert_eq!(json["gates"][0]["spin"], 1);
        assert_eq!(json["gates"][0]["axis"], "z");
        // global phase i as [0, 1]
        assert_eq!(json["global_phase"][0], 0.0);
        assert_eq!(json["global_phase"][1], 1.0);

        let g2 = crate::compiler::compile_step(
            &UnitaryStep::TwoQubitDiagonal {
                k: 1,
                l: 2,
                lambda: Angle::Radians(0.25),
            },
            2,
        )
        .unwrap();
        let json = serde_json::to_value(sequence_to_dto(&g2)).unwrap();
        assert_eq!(json["gates"][0]["kind"], "g2");
        assert_eq!(json["gates"][0]["k"], 1);
        assert_eq!(json["gates"][0]["l"], 2);
        assert_eq!(json["gates"][0]["lambda"], 0.25);
        let _ = Axis::X;
    }

    #[test]
    fn compiled_file_round_trip() {
        let plan = general_plan(2).unwrap();
        let sequences = crate::compiler::compile_plan(&plan).unwrap();
        let file = compiled_to_file(&plan, &sequences);
        let json = serde_json::to_string(&file).unwrap();
        let parsed: CompiledFile = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.experiments.len(), 3);
        for (dto, seq) in parsed.experiments.iter().zip(&sequences) {
            let back = sequence_from_dto(&dto.gate_sequence).unwrap();
            assert_eq!(&back, seq);
        }
    }

    #[test]
    fn version_mismatch_rejected() {
        let mut file = plan_to_file(&general_plan(2).unwrap());
        file.version = 9;
        assert!(plan_from_file(&file).is_err());
    }
}
