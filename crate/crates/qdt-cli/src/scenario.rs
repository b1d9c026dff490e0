//! Scenario files: JSON with complex numbers as [re, im] pairs.
//!
//! Exactly one kind-section may be present and it must match the declared
//! kind. Supported kinds: prediction, quantum, pipeline, logic_demo (the
//! last carries no section).

use num_complex::Complex64;
use qdt_core::decision::{AttractionMode, AttractionSpec, UtilityMode, UtilitySpec};
use qdt_core::event::{InconclusiveEvent, Prospect};
use qdt_core::matrix::Tolerance;
use qdt_core::state::{DensityOperator, HilbertSpace, UnitaryOperator};
use qdt_core::ComplexMatrix;
use serde::Deserialize;

/// Canned scenarios addressable with `--builtin <name>`.
pub const BUILTIN_PRISONER_DILEMMA: &str = r#"{
  "schema_version": "1",
  "kind": "prediction",
  "prediction": {
    "labels": ["cooperate-under-uncertainty", "defect-under-uncertainty"],
    "utility": { "mode": "direct_factors", "values": [0.60, 0.40] },
    "attraction": { "mode": "quarter_law_prior", "signs": [-1, 1] },
    "empirical": [0.37, 0.63]
  },
  "seed": 0
}"#;

/// Quantum demo: a pure state aligned with the first prospect.
pub const BUILTIN_ALIGNED_PURE: &str = r#"{
  "schema_version": "1",
  "kind": "quantum",
  "quantum": {
    "dims": [2, 2],
    "rho": [
      [[0.5, 0.0], [0.5, 0.0], [0.0, 0.0], [0.0, 0.0]],
      [[0.5, 0.0], [0.5, 0.0], [0.0, 0.0], [0.0, 0.0]],
      [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
      [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
    ],
    "prospects": [
      { "outcome_index": 0, "amplitudes": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]] },
      { "outcome_index": 1, "amplitudes": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]] }
    ]
  },
  "seed": 0
}"#;

pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "prisoner-dilemma" => Some(BUILTIN_PRISONER_DILEMMA),
        "aligned-pure" => Some(BUILTIN_ALIGNED_PURE),
        _ => None,
    }
}

pub fn builtin_names() -> &'static [&'static str] {
    &["prisoner-dilemma", "aligned-pure"]
}

type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: String,
    pub kind: String,
    #[serde(default)]
    pub prediction: Option<PredictionSection>,
    #[serde(default)]
    pub quantum: Option<QuantumSection>,
    #[serde(default)]
    pub pipeline: Option<PipelineSection>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionSection {
    pub labels: Vec<String>,
    pub utility: UtilityJson,
    pub attraction: AttractionJson,
    #[serde(default)]
    pub empirical: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityJson {
    pub mode: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttractionJson {
    pub mode: String,
    #[serde(default)]
    pub signs: Option<Vec<i8>>,
    #[serde(default)]
    pub magnitudes: Option<Vec<f64>>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub mu_c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSection {
    pub dims: [usize; 2],
    pub rho: ComplexRows,
    pub prospects: Vec<ProspectJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProspectJson {
    pub outcome_index: usize,
    pub amplitudes: Vec<[f64; 2]>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSection {
    pub dims: [usize; 3],
    #[serde(default)]
    pub initial: Option<InitialJson>,
    #[serde(default)]
    pub unitaries: Option<UnitariesJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialJson {
    pub rho_a: ComplexRows,
    pub rho_b: ComplexRows,
    pub rho_m: ComplexRows,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitariesJson {
    pub preparation: ComplexRows,
    pub evolution_1: ComplexRows,
    pub evolution_2: ComplexRows,
}

/// Parse and structurally validate scenario text.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, String> {
    let file: ScenarioFile = serde_json::from_str(text)
        .map_err(|e| format!("scenario parse error at line {}, column {}: {e}", e.line(), e.column()))?;
    if file.schema_version != "1" {
        return Err(format!("unknown schema_version {:?}", file.schema_version));
    }
    let sections = [
        ("prediction", file.prediction.is_some()),
        ("quantum", file.quantum.is_some()),
        ("pipeline", file.pipeline.is_some()),
    ];
    let present: Vec<&str> = sections.iter().filter(|(_, p)| *p).map(|(n, _)| *n).collect();
    match file.kind.as_str() {
        "prediction" | "quantum" | "pipeline" => {
            if present != [file.kind.as_str()] {
                return Err(format!(
                    "kind {:?} requires exactly the matching section, found {:?}",
                    file.kind, present
                ));
            }
        }
        "logic_demo" => {
            if !present.is_empty() {
                return Err(format!("kind \"logic_demo\" takes no sections, found {present:?}"));
            }
        }
        other => return Err(format!("unknown kind {other:?}")),
    }
    Ok(file)
}

fn complex_matrix(rows: &ComplexRows, want: usize, what: &str) -> Result<ComplexMatrix, String> {
    if rows.len() != want || rows.iter().any(|r| r.len() != want) {
        return Err(format!("{what} must be a {want}x{want} matrix of [re, im] pairs"));
    }
    let data: Vec<Complex64> = rows
        .iter()
        .flatten()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    ComplexMatrix::new(want, want, data).map_err(|e| format!("{what}: {e}"))
}

/// Validated contents of a prediction section.
#[derive(Debug)]
pub struct PredictionInputs {
    pub labels: Vec<String>,
    pub utility: UtilitySpec,
    pub attraction: AttractionSpec,
    pub empirical: Option<Vec<f64>>,
}

pub fn prediction_inputs(
    section: &PredictionSection,
    mu_override: Option<f64>,
    mu_c_override: Option<f64>,
) -> Result<PredictionInputs, String> {
    if section.labels.iter().any(|l| l.contains(['\t', '\n'])) {
        return Err("labels must not contain tab or newline characters".into());
    }
    let mode = match section.utility.mode.as_str() {
        "direct_factors" => UtilityMode::DirectFactors,
        "nonnegative_utilities" => UtilityMode::NonnegativeUtilities,
        other => return Err(format!("unknown utility mode {other:?}")),
    };
    let utility = UtilitySpec { mode, values: section.utility.values.clone() };
    let attraction_mode = match section.attraction.mode.as_str() {
        "quarter_law_prior" => AttractionMode::QuarterLawPrior,
        "from_quantum_state" => AttractionMode::FromQuantumState,
        "explicit" => AttractionMode::Explicit,
        other => return Err(format!("unknown attraction mode {other:?}")),
    };
    if attraction_mode == AttractionMode::FromQuantumState {
        return Err(
            "attraction mode \"from_quantum_state\" needs a quantum scenario; use the eval-quantum command"
                .into(),
        );
    }
    let attraction = AttractionSpec {
        mode: attraction_mode,
        signs: section.attraction.signs.clone(),
        magnitudes: section.attraction.magnitudes.clone(),
        mu: mu_override.or(section.attraction.mu).unwrap_or(0.0),
        mu_c: mu_c_override.or(section.attraction.mu_c).unwrap_or(1.0),
    };
    if let Some(empirical) = &section.empirical {
        if empirical.len() != section.labels.len() {
            return Err(format!(
                "{} empirical targets for {} prospects",
                empirical.len(),
                section.labels.len()
            ));
        }
    }
    Ok(PredictionInputs {
        labels: section.labels.clone(),
        utility,
        attraction,
        empirical: section.empirical.clone(),
    })
}

/// Validated contents of a quantum section.
#[derive(Debug)]
pub struct QuantumInputs {
    pub dims: [usize; 2],
    pub rho: DensityOperator,
    pub labels: Vec<String>,
    pub prospects: Vec<Prospect>,
}

pub fn quantum_inputs(section: &QuantumSection, tol: &Tolerance) -> Result<QuantumInputs, String> {
    let [da, db] = section.dims;
    if da == 0 || db == 0 {
        return Err("dims must be positive".into());
    }
    let d = da * db;
    let matrix = complex_matrix(&section.rho, d, "rho")?;
    let space_a = HilbertSpace::new(da).map_err(|e| e.to_string())?;
    let space_b = HilbertSpace::new(db).map_err(|e| e.to_string())?;
    let space = space_a.tensor(&space_b).map_err(|e| e.to_string())?;
    // serialized states carry rounding; clip within eps_psd and renormalize
    let rho = DensityOperator::from_matrix_clipped(space, matrix, tol).map_err(|e| e.to_string())?;
    if section.prospects.len() < 2 {
        return Err("a quantum scenario needs at least two prospects".into());
    }
    let mut labels = Vec::with_capacity(section.prospects.len());
    let mut prospects = Vec::with_capacity(section.prospects.len());
    for (i, p) in section.prospects.iter().enumerate() {
        if p.amplitudes.len() != db {
            return Err(format!(
                "prospect {i} has {} amplitudes, dims give {db}",
                p.amplitudes.len()
            ));
        }
        let amplitudes: Vec<Complex64> =
            p.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        let uncertain = InconclusiveEvent::new(space_b.clone(), amplitudes, tol)
            .map_err(|e| format!("prospect {i}: {e}"))?;
        let prospect = Prospect::new(space_a.clone(), p.outcome_index, uncertain)
            .map_err(|e| format!("prospect {i}: {e}"))?;
        let label = p.label.clone().unwrap_or_else(|| format!("pi{i}"));
        if label.contains(['\t', '\n']) {
            return Err(format!("prospect {i}: label must not contain tab or newline"));
        }
        labels.push(label);
        prospects.push(prospect);
    }
    Ok(QuantumInputs { dims: section.dims, rho, labels, prospects })
}

/// Validated contents of a pipeline section; missing pieces fall back to
/// ground states and seeded random unitaries.
#[derive(Debug)]
pub struct PipelineInputs {
    pub dims: [usize; 3],
    pub initial: [DensityOperator; 3],
    pub unitaries: Option<[UnitaryOperator; 3]>,
}

pub fn pipeline_inputs(section: &PipelineSection, tol: &Tolerance) -> Result<PipelineInputs, String> {
    let dims = section.dims;
    if dims.contains(&0) {
        return Err("dims must be positive".into());
    }
    let spaces: Vec<HilbertSpace> = dims
        .iter()
        .map(|&d| HilbertSpace::new(d).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let initial = match &section.initial {
        Some(init) => {
            let mut states = Vec::with_capacity(3);
            for (rows, (space, name)) in [&init.rho_a, &init.rho_b, &init.rho_m]
                .into_iter()
                .zip(spaces.iter().zip(["rho_a", "rho_b", "rho_m"]))
            {
                let m = complex_matrix(rows, space.dimension(), name)?;
                states.push(
                    DensityOperator::from_matrix_clipped(space.clone(), m, tol)
                        .map_err(|e| format!("{name}: {e}"))?,
                );
            }
            states
        }
        None => spaces
            .iter()
            .map(|s| {
                let d = s.dimension();
                let mut m = ComplexMatrix::zeros(d, d);
                m.set(0, 0, Complex64::new(1.0, 0.0));
                DensityOperator::new(s.clone(), m, tol).expect("ground state is valid")
            })
            .collect(),
    };
    let total: usize = dims.iter().product();
    let unitaries = match &section.unitaries {
        Some(u) => {
            let composite = HilbertSpace::new(total).map_err(|e| e.to_string())?;
            let mut out = Vec::with_capacity(3);
            for (rows, name) in [
                (&u.preparation, "preparation"),
                (&u.evolution_1, "evolution_1"),
                (&u.evolution_2, "evolution_2"),
            ] {
                let m = complex_matrix(rows, total, name)?;
                out.push(
                    UnitaryOperator::new(composite.clone(), m, tol)
                        .map_err(|e| format!("{name}: {e}"))?,
                );
            }
            Some([out.remove(0), out.remove(0), out.remove(0)])
        }
        None => None,
    };
    let mut it = initial.into_iter();
    Ok(PipelineInputs {
        dims,
        initial: [
            it.next().expect("three states"),
            it.next().expect("three states"),
            it.next().expect("three states"),
        ],
        unitaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_prisoner_dilemma_parses() {
        let file = parse_scenario(BUILTIN_PRISONER_DILEMMA).unwrap();
        assert_eq!(file.kind, "prediction");
        let section = file.prediction.unwrap();
        let inputs = prediction_inputs(&section, None, None).unwrap();
        assert_eq!(inputs.labels.len(), 2);
        assert_eq!(inputs.utility.values, vec![0.60, 0.40]);
        assert_eq!(inputs.attraction.signs, Some(vec![-1, 1]));
        assert_eq!(inputs.empirical, Some(vec![0.37, 0.63]));
    }

    #[test]
    fn kind_section_mismatch_is_rejected() {
        let text = r#"{"schema_version":"1","kind":"quantum","prediction":{"labels":["a","b"],"utility":{"mode":"direct_factors","values":[0.5,0.5]},"attraction":{"mode":"quarter_law_prior","signs":[1,-1]}}}"#;
        let err = parse_scenario(text).unwrap_err();
        assert!(err.contains("matching section"), "{err}");
    }

    #[test]
    fn unknown_schema_version_is_rejected() {
        let text = r#"{"schema_version":"2","kind":"logic_demo"}"#;
        assert!(parse_scenario(text).unwrap_err().contains("schema_version"));
    }

    #[test]
    fn bad_utility_sum_is_rejected_downstream() {
        let text = r#"{"schema_version":"1","kind":"prediction","prediction":{"labels":["a","b"],"utility":{"mode":"direct_factors","values":[0.5,0.4]},"attraction":{"mode":"quarter_law_prior","signs":[1,-1]}}}"#;
        let file = parse_scenario(text).unwrap();
        let inputs = prediction_inputs(&file.prediction.unwrap(), None, None).unwrap();
        let err = qdt_core::decision::utility_factors(&inputs.utility, &Tolerance::default())
            .unwrap_err();
        assert!(err.to_string().contains("sum to 1"));
    }

    #[test]
    fn quantum_builtin_round_trips_to_dims() {
        let file = parse_scenario(BUILTIN_ALIGNED_PURE).unwrap();
        let inputs = quantum_inputs(&file.quantum.unwrap(), &Tolerance::default()).unwrap();
        assert_eq!(inputs.dims, [2, 2]);
        assert_eq!(inputs.prospects.len(), 2);
        assert_eq!(inputs.rho.space().dimension(), 4);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let text = r#"{"schema_version":"1","kind":"quantum","quantum":{"dims":[2,2],"rho":[[[1.0,0.0]]],"prospects":[{"outcome_index":0,"amplitudes":[[1.0,0.0],[0.0,0.0]]},{"outcome_index":1,"amplitudes":[[1.0,0.0],[0.0,0.0]]}]}}"#;
        let file = parse_scenario(text).unwrap();
        let err = quantum_inputs(&file.quantum.unwrap(), &Tolerance::default()).unwrap_err();
        assert!(err.contains("4x4"), "{err}");
    }
}
