//! Command implementations: each produces a [`Report`] and an exit class.

use crate::report::Report;
use crate::scenario::{PipelineInputs, PredictionInputs, QuantumInputs};
use num_complex::Complex64;
use qdt_core::channel::{choi_state, run_pipeline, Channel, MeasurementPipeline};
use qdt_core::decision::{evaluate_lattice, predict, predict_from_state, ProspectLattice};
use qdt_core::eig::eig_hermitian;
use qdt_core::event::{join, meet, projector, EventOperator};
use qdt_core::matrix::Tolerance;
use qdt_core::prob::ClampedProbability;
use qdt_core::random::Prng;
use qdt_core::state::HilbertSpace;
use qdt_core::verify;

/// Report plus whether a numerical invariant failed (exit 3).
pub struct CommandOutput {
    pub report: Report,
    pub numerical_failure: bool,
}

impl CommandOutput {
    fn clean(report: Report) -> Self {
        Self { report, numerical_failure: false }
    }
}

fn push_clamped(report: &mut Report, key: &str, raw: f64) {
    let clamped = ClampedProbability::from_raw(raw);
    report.push_num(key, clamped.value);
    if let Some(raw) = clamped.raw {
        report.push_num(&format!("{key}.raw"), raw);
    }
}

pub fn predict_command(
    inputs: &PredictionInputs,
    source: &str,
    tol: &Tolerance,
) -> Result<CommandOutput, String> {
    let lattice = ProspectLattice::abstract_lattice(inputs.labels.clone())
        .map_err(|e| e.to_string())?;
    let prediction =
        predict(&lattice, &inputs.utility, &inputs.attraction, tol).map_err(|e| e.to_string())?;

    let mut report = Report::new("predict", source);
    report.push_num("mu", prediction.mu);
    report.push_num("mu_c", prediction.mu_c);
    report.push_int("n", prediction.rows.len());
    for (i, row) in prediction.rows.iter().enumerate() {
        report.push_str(&format!("label.{i}"), &row.label);
        report.push_num(&format!("f.{i}"), row.utility_factor);
        report.push_num(&format!("q.{i}"), row.attraction_factor);
        push_clamped(&mut report, &format!("p.{i}"), row.probability);
        report.push_int(&format!("rank_p.{i}"), row.rank_by_p);
        report.push_int(&format!("rank_f.{i}"), row.rank_by_f);
        report.push_int(&format!("rank_q.{i}"), row.rank_by_q);
    }
    report.push_num("sum_p", prediction.rows.iter().map(|r| r.probability).sum());
    report.push_num("normalization_defect", prediction.normalization_defect);
    if let Some(empirical) = &inputs.empirical {
        let mut max_dev = 0.0_f64;
        for (i, (row, e)) in prediction.rows.iter().zip(empirical).enumerate() {
            report.push_num(&format!("empirical.{i}"), *e);
            max_dev = max_dev.max((row.probability - e).abs());
        }
        report.push_num("empirical_max_deviation", max_dev);
    }

    report.human_line(format!(
        "{:<32} {:>12} {:>12} {:>12} {:>7} {:>7} {:>7}",
        "prospect", "f", "q", "p", "rank(f)", "rank(q)", "rank(p)"
    ));
    for row in &prediction.rows {
        report.human_line(format!(
            "{:<32} {:>12.6} {:>12.6} {:>12.6} {:>7} {:>7} {:>7}",
            row.label,
            row.utility_factor,
            row.attraction_factor,
            row.probability,
            row.rank_by_f,
            row.rank_by_q,
            row.rank_by_p
        ));
    }
    if let Some(empirical) = &inputs.empirical {
        let max_dev = prediction
            .rows
            .iter()
            .zip(empirical)
            .map(|(r, e)| (r.probability - e).abs())
            .fold(0.0_f64, f64::max);
        report.human_line(format!(
            "empirical targets {:?}, max deviation {:.6}",
            empirical, max_dev
        ));
    }
    Ok(CommandOutput::clean(report))
}

pub fn eval_quantum_command(
    inputs: &QuantumInputs,
    source: &str,
    mu: f64,
    mu_c: f64,
    tol: &Tolerance,
) -> Result<CommandOutput, String> {
    let lattice = ProspectLattice::quantum(inputs.labels.clone(), inputs.prospects.clone())
        .map_err(|e| e.to_string())?;
    let eval = evaluate_lattice(&inputs.rho, &lattice, tol).map_err(|e| e.to_string())?;
    let prediction =
        predict_from_state(&inputs.rho, &lattice, mu, mu_c, tol).map_err(|e| e.to_string())?;

    let mut report = Report::new("eval-quantum", source);
    report.push_str("dims", format!("{}x{}", inputs.dims[0], inputs.dims[1]));
    report.push_num("mu", mu);
    report.push_num("mu_c", mu_c);
    report.push_int("n", inputs.labels.len());
    for (i, label) in inputs.labels.iter().enumerate() {
        report.push_str(&format!("label.{i}"), label);
        push_clamped(&mut report, &format!("raw_p.{i}"), eval.raw[i].total);
        report.push_num(&format!("raw_f.{i}"), eval.raw[i].utility_factor);
        report.push_num(&format!("raw_q.{i}"), eval.raw[i].attraction_factor);
        report.push_num(&format!("f.{i}"), prediction.rows[i].utility_factor);
        report.push_num(&format!("q.{i}"), prediction.rows[i].attraction_factor);
        push_clamped(&mut report, &format!("p.{i}"), prediction.rows[i].probability);
    }
    report.push_num("pre_normalization_sum", eval.probability_sum_raw);
    report.push_num("utility_sum_raw", eval.utility_sum_raw);
    report.push_num("alternation_defect_raw", eval.alternation_defect_raw);
    report.push_num(
        "alternation_defect",
        prediction.rows.iter().map(|r| r.attraction_factor).sum::<f64>().abs(),
    );
    report.push_num("resolution_defect", eval.resolution_defect);
    report.push_num("normalization_defect", prediction.normalization_defect);

    report.human_line(format!(
        "{:<16} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "prospect", "raw p", "raw f", "raw q", "p", "f", "q"
    ));
    for (i, label) in inputs.labels.iter().enumerate() {
        report.human_line(format!(
            "{:<16} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            label,
            eval.raw[i].total,
            eval.raw[i].utility_factor,
            eval.raw[i].attraction_factor,
            prediction.rows[i].probability,
            prediction.rows[i].utility_factor,
            prediction.rows[i].attraction_factor,
        ));
    }
    report.human_line(format!(
        "pre-normalization sum {:.6}, resolution-of-unity defect {:.6}",
        eval.probability_sum_raw, eval.resolution_defect
    ));
    Ok(CommandOutput::clean(report))
}

pub fn pipeline_command(
    inputs: &PipelineInputs,
    source: &str,
    seed: u64,
    tol: &Tolerance,
) -> Result<CommandOutput, String> {
    let dims = inputs.dims;
    let spaces = [
        HilbertSpace::new(dims[0]).map_err(|e| e.to_string())?,
        HilbertSpace::new(dims[1]).map_err(|e| e.to_string())?,
        HilbertSpace::new(dims[2]).map_err(|e| e.to_string())?,
    ];
    let dims_vec = dims.to_vec();
    let mut rng = Prng::new(seed);
    let steps = match &inputs.unitaries {
        Some([prep, ev1, ev2]) => vec![
            Channel::preparation(prep.matrix().clone(), dims_vec.clone(), tol)
                .map_err(|e| e.to_string())?,
            Channel::evolution(ev1.matrix().clone(), dims_vec.clone(), tol)
                .map_err(|e| e.to_string())?,
            Channel::measurement(vec![1], dims_vec.clone())
                .map_err(|e| e.to_string())?
                .with_label("B-measurement"),
            Channel::evolution(ev2.matrix().clone(), dims_vec.clone(), tol)
                .map_err(|e| e.to_string())?,
            Channel::measurement(vec![0], dims_vec.clone())
                .map_err(|e| e.to_string())?
                .with_label("A-measurement"),
        ],
        None => {
            let total: usize = dims_vec.iter().product();
            vec![
                Channel::preparation(qdt_core::random::unitary(&mut rng, total), dims_vec.clone(), tol)
                    .map_err(|e| e.to_string())?,
                Channel::evolution(qdt_core::random::unitary(&mut rng, total), dims_vec.clone(), tol)
                    .map_err(|e| e.to_string())?,
                Channel::measurement(vec![1], dims_vec.clone())
                    .map_err(|e| e.to_string())?
                    .with_label("B-measurement"),
                Channel::evolution(qdt_core::random::unitary(&mut rng, total), dims_vec.clone(), tol)
                    .map_err(|e| e.to_string())?,
                Channel::measurement(vec![0], dims_vec.clone())
                    .map_err(|e| e.to_string())?
                    .with_label("A-measurement"),
            ]
        }
    };
    let pipeline = MeasurementPipeline::new(spaces, steps, vec![1.0, 2.0, 3.0, 4.0, 5.0])
        .map_err(|e| e.to_string())?;
    let run = run_pipeline(&pipeline, [&inputs.initial[0], &inputs.initial[1], &inputs.initial[2]])
        .map_err(|e| e.to_string())?;

    let mut report = Report::new("pipeline", source);
    report.push_str("dims", format!("{}x{}x{}", dims[0], dims[1], dims[2]));
    report.push_int("steps", run.trajectory.len());
    let mut worst_trace = 0.0_f64;
    for (i, audit) in run.step_audits.iter().enumerate() {
        report.push_str(&format!("step.{i}.label"), &audit.label);
        report.push_num(&format!("step.{i}.trace"), audit.trace);
        report.push_num(&format!("step.{i}.hermiticity_defect"), audit.hermiticity_defect);
        worst_trace = worst_trace.max((audit.trace - 1.0).abs());
    }
    report.push_num("b_cut_defect", run.b_cut_defect);
    report.push_num("a_cut_defect", run.a_cut_defect);
    report.push_num("duality_defect", run.duality_defect);

    let mut min_choi = f64::INFINITY;
    for (i, step) in pipeline.steps().iter().enumerate() {
        let dual = choi_state(step).map_err(|e| e.to_string())?;
        let min_eig = eig_hermitian(dual.matrix(), tol)
            .map_err(|e| e.to_string())?
            .min_eigenvalue();
        report.push_num(&format!("choi_min_eigenvalue.{i}"), min_eig);
        min_choi = min_choi.min(min_eig);
    }

    let pass = worst_trace <= 1e-12
        && run.b_cut_defect <= 1e-10
        && run.a_cut_defect <= 1e-10
        && run.duality_defect <= 1e-12
        && min_choi >= -1e-10;
    report.push_bool("pass", pass);

    report.human_line(format!("{:<20} {:>18} {:>18}", "step", "trace", "herm defect"));
    for audit in &run.step_audits {
        report.human_line(format!(
            "{:<20} {:>18.12} {:>18.3e}",
            audit.label, audit.trace, audit.hermiticity_defect
        ));
    }
    report.human_line(format!(
        "product cuts: (AM|B) {:.3e} after B-measurement, (A|BM) {:.3e} after A-measurement",
        run.b_cut_defect, run.a_cut_defect
    ));
    report.human_line(format!(
        "duality defect {:.3e}, smallest dual-state eigenvalue {:.3e}",
        run.duality_defect, min_choi
    ));
    report.human_line(format!("audit {}", if pass { "passed" } else { "FAILED" }));
    Ok(CommandOutput { report, numerical_failure: !pass })
}

pub fn logic_demo_command(source: &str, tol: &Tolerance) -> Result<CommandOutput, String> {
    let space = HilbertSpace::new(2).map_err(|e| e.to_string())?;
    let inv = 1.0 / 2.0_f64.sqrt();
    let a = EventOperator::rank_one(
        space.clone(),
        &[Complex64::new(inv, 0.0), Complex64::new(inv, 0.0)],
        tol,
    )
    .map_err(|e| e.to_string())?;
    let b1 = projector(&space, &[0]).map_err(|e| e.to_string())?;
    let b2 = projector(&space, &[1]).map_err(|e| e.to_string())?;

    let join_b = join(&b1, &b2, tol).map_err(|e| e.to_string())?;
    let join_identity_defect = join_b
        .matrix()
        .sub(&qdt_core::ComplexMatrix::identity(2))
        .map_err(|e| e.to_string())?
        .frobenius_norm();
    let lhs = meet(&a, &join_b, tol).map_err(|e| e.to_string())?;
    let lhs_defect = lhs
        .matrix()
        .sub(a.matrix())
        .map_err(|e| e.to_string())?
        .frobenius_norm();
    let meet_a_b1 = meet(&a, &b1, tol).map_err(|e| e.to_string())?;
    let meet_a_b2 = meet(&a, &b2, tol).map_err(|e| e.to_string())?;
    let rhs = join(&meet_a_b1, &meet_a_b2, tol).map_err(|e| e.to_string())?;
    let rhs_defect = rhs.matrix().frobenius_norm();

    let mut report = Report::new("logic-demo", source);
    report.push_num("join_b1_b2_identity_defect", join_identity_defect);
    report.push_num("meet_a_join_defect", lhs_defect);
    report.push_num("meet_a_b1_norm", meet_a_b1.matrix().frobenius_norm());
    report.push_num("meet_a_b2_norm", meet_a_b2.matrix().frobenius_norm());
    report.push_num("join_of_meets_norm", rhs_defect);
    let pass = lhs_defect <= 1e-12 && rhs_defect <= 1e-12;
    report.push_bool("pass", pass);

    report.human_line("non-distributivity witness on a spin-1/2 pair of axes:".to_string());
    report.human_line(format!(
        "  B1 ∪ B2 = 1            (defect {join_identity_defect:.3e})"
    ));
    report.human_line(format!(
        "  A ∩ (B1 ∪ B2) = A      (defect {lhs_defect:.3e})"
    ));
    report.human_line(format!(
        "  A ∩ B1 = A ∩ B2 = 0    (norms {:.3e}, {:.3e})",
        meet_a_b1.matrix().frobenius_norm(),
        meet_a_b2.matrix().frobenius_norm()
    ));
    report.human_line(format!(
        "  (A ∩ B1) ∪ (A ∩ B2) = 0 (norm {rhs_defect:.3e})"
    ));
    report.human_line(
        "the two sides differ by the nonzero event A: conjunction does not distribute".to_string(),
    );
    Ok(CommandOutput { report, numerical_failure: !pass })
}

pub fn verify_command(source: &str, seed: u64, tol: &Tolerance) -> Result<CommandOutput, String> {
    let results = verify::run_all(seed, tol);
    let failures = verify::failures(&results);

    let mut report = Report::new("verify", source);
    report.push_int("seed", seed as usize);
    report.push_int("checks", results.len());
    for (i, r) in results.iter().enumerate() {
        report.push_str(&format!("check.{i}.module"), r.module);
        report.push_str(&format!("check.{i}.name"), r.name);
        report.push_bool(&format!("check.{i}.passed"), r.passed);
        report.push_num(&format!("check.{i}.defect"), r.defect);
        report.push_num(&format!("check.{i}.tolerance"), r.tolerance);
    }
    report.push_int("failures", failures);

    report.human_line(format!(
        "{:<12} {:<36} {:>10} {:>10} {:>6}",
        "module", "check", "defect", "tol", "ok"
    ));
    for r in &results {
        report.human_line(format!(
            "{:<12} {:<36} {:>10.2e} {:>10.2e} {:>6}",
            r.module,
            r.name,
            r.defect,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        ));
    }
    report.human_line(format!("{} checks, {} failures", results.len(), failures));
    Ok(CommandOutput { report, numerical_failure: failures > 0 })
}
