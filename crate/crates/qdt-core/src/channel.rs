//! The five-step measurement pipeline and channel-state duality.
//!
//! A realistic measurement of two observables runs through five channels on
//! the tripartite space system-A ⊗ system-B ⊗ device: entangling
//! preparation, unitary evolution, B-measurement, unitary evolution,
//! A-measurement. Evolution channels are unitary but entangling; measurement
//! channels are disentangling but nonunitary (they trace and replace across a
//! factor cut). The dual state of a channel on the doubled space certifies
//! positivity.

use crate::matrix::{assemble_bipartition, outer, partial_trace, ComplexMatrix, Tolerance};
use crate::state::{DensityOperator, HilbertSpace};
use crate::{C64, Error, Result};

/// What a channel does to the composite state.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    /// Global unitary forming an entangled total state out of the product
    /// initial state.
    EntanglingPreparation(ComplexMatrix),
    /// Unitary evolution between measurements.
    UnitaryEvolution(ComplexMatrix),
    /// Partially disentangling measurement: the state is replaced by the
    /// product of its marginals across the cut (measured factors | rest).
    DisentanglingMeasurement(Vec<usize>),
}

/// One step of the measurement procedure, acting on a composite space with
/// the given factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    kind: ChannelKind,
    dims: Vec<usize>,
    label: String,
}

impl Channel {
    pub fn preparation(unitary: ComplexMatrix, dims: Vec<usize>, tol: &Tolerance) -> Result<Self> {
        Self::unitary_kind(unitary, dims, tol, true)
    }

    pub fn evolution(unitary: ComplexMatrix, dims: Vec<usize>, tol: &Tolerance) -> Result<Self> {
        Self::unitary_kind(unitary, dims, tol, false)
    }

    fn unitary_kind(
        unitary: ComplexMatrix,
        dims: Vec<usize>,
        tol: &Tolerance,
        preparation: bool,
    ) -> Result<Self> {
        let d: usize = dims.iter().product();
        if unitary.rows() != d || !unitary.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on factor dims {:?}",
                unitary.rows(),
                unitary.cols(),
                dims
            )));
        }
        let defect = unitary
            .adjoint()
            .mul(&unitary)?
            .sub(&ComplexMatrix::identity(d))?
            .frobenius_norm();
        if defect > tol.eps_equality {
            return Err(Error::NotUnitary(defect));
        }
        let (kind, label) = if preparation {
            (ChannelKind::EntanglingPreparation(unitary), "preparation".to_string())
        } else {
            (ChannelKind::UnitaryEvolution(unitary), "evolution".to_string())
        };
        Ok(Self { kind, dims, label })
    }

    /// Measurement channel separating the given factor indices from the rest.
    pub fn measurement(measured: Vec<usize>, dims: Vec<usize>) -> Result<Self> {
        let mut sorted = measured.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != measured.len() || sorted.iter().any(|&f| f >= dims.len()) {
            return Err(Error::Invalid("invalid measured factor set".into()));
        }
        if sorted.is_empty() || sorted.len() == dims.len() {
            return Err(Error::Invalid(
                "measurement partition must be a proper nonempty subset of the factors".into(),
            ));
        }
        let label = format!("measurement{sorted:?}");
        Ok(Self { kind: ChannelKind::DisentanglingMeasurement(sorted), dims, label })
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self.kind, ChannelKind::DisentanglingMeasurement(_))
    }
}

/// Apply one channel. Unitary channels conjugate; measurement channels trace
/// out across the cut and reassemble the product of the two marginals, which
/// preserves trace and positivity but not the spectrum.
pub fn apply_channel(state: &DensityOperator, c: &Channel) -> Result<DensityOperator> {
    let d: usize = c.dims.iter().product();
    if state.space().dimension() != d {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs channel dimension {d}",
            state.space().dimension()
        )));
    }
    let matrix = match &c.kind {
        ChannelKind::EntanglingPreparation(u) | ChannelKind::UnitaryEvolution(u) => {
            u.mul(state.matrix())?.mul(&u.adjoint())?
        }
        ChannelKind::DisentanglingMeasurement(measured) => {
            let rest: Vec<usize> =
                (0..c.dims.len()).filter(|f| !measured.contains(f)).collect();
            let on_measured = partial_trace(state.matrix(), &c.dims, measured)?;
            let on_rest = partial_trace(state.matrix(), &c.dims, &rest)?;
            assemble_bipartition(&c.dims, measured, &on_measured, &on_rest)?
        }
    };
    DensityOperator::unchecked(state.space().clone(), matrix)
}

/// Ordered five-channel template: preparation, evolution, B-measurement,
/// evolution, A-measurement, with strictly increasing timestamps (bookkeeping
/// labels only; no Hamiltonian generates the unitaries).
#[derive(Debug, Clone)]
pub struct MeasurementPipeline {
    spaces: [HilbertSpace; 3],
    steps: Vec<Channel>,
    timestamps: Vec<f64>,
}

impl MeasurementPipeline {
    pub fn new(spaces: [HilbertSpace; 3], steps: Vec<Channel>, timestamps: Vec<f64>) -> Result<Self> {
        if steps.len() != 5 {
            return Err(Error::Invalid(format!("expected 5 channels, got {}", steps.len())));
        }
        if timestamps.len() != 5 || timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("timestamps must be 5 strictly increasing values".into()));
        }
        let dims: Vec<usize> = spaces.iter().map(|s| s.dimension()).collect();
        for (i, step) in steps.iter().enumerate() {
            if step.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch(format!(
                    "channel {i} has dims {:?}, pipeline has {:?}",
                    step.dims(),
                    dims
                )));
            }
        }
        let template_ok = matches!(steps[0].kind(), ChannelKind::EntanglingPreparation(_))
            && matches!(steps[1].kind(), ChannelKind::UnitaryEvolution(_))
            && matches!(steps[2].kind(), ChannelKind::DisentanglingMeasurement(m) if m == &[1])
            && matches!(steps[3].kind(), ChannelKind::UnitaryEvolution(_))
            && matches!(steps[4].kind(), ChannelKind::DisentanglingMeasurement(m) if m == &[0]);
        if !template_ok {
            return Err(Error::Invalid(
                "steps must follow the template preparation, evolution, B-measurement, evolution, A-measurement"
                    .into(),
            ));
        }
        Ok(Self { spaces, steps, timestamps })
    }

    /// Template pipeline with seeded random preparation/evolution unitaries.
    pub fn seeded(
        spaces: [HilbertSpace; 3],
        rng: &mut crate::random::Prng,
        tol: &Tolerance,
    ) -> Result<Self> {
        let dims: Vec<usize> = spaces.iter().map(|s| s.dimension()).collect();
        let d: usize = dims.iter().product();
        let steps = vec![
            Channel::preparation(crate::random::unitary(rng, d), dims.clone(), tol)?,
            Channel::evolution(crate::random::unitary(rng, d), dims.clone(), tol)?,
            Channel::measurement(vec![1], dims.clone())?.with_label("B-measurement"),
            Channel::evolution(crate::random::unitary(rng, d), dims.clone(), tol)?,
            Channel::measurement(vec![0], dims.clone())?.with_label("A-measurement"),
        ];
        Self::new(spaces, steps, vec![1.0, 2.0, 3.0, 4.0, 5.0])
    }

    pub fn spaces(&self) -> &[HilbertSpace; 3] {
        &self.spaces
    }

    pub fn steps(&self) -> &[Channel] {
        &self.steps
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dimension()).collect()
    }
}

/// Audit row for one trajectory state.
#[derive(Debug, Clone)]
pub struct StepAudit {
    pub label: String,
    pub trace: f64,
    pub hermiticity_defect: f64,
}

/// Trajectory of the pipeline with its invariant audits.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    /// Initial product state followed by the state after each channel.
    pub trajectory: Vec<DensityOperator>,
    pub step_audits: Vec<StepAudit>,
    /// ‖ρ − ρ_AM ⊗ ρ_B‖_F after the B-measurement.
    pub b_cut_defect: f64,
    /// ‖ρ − ρ_A ⊗ ρ_BM‖_F after the A-measurement.
    pub a_cut_defect: f64,
    /// Largest disagreement between outcome probabilities read from the final
    /// state and from the dual composite state on system-A ⊗ system-B.
    pub duality_defect: f64,
}

/// Distance of a state from the product of its marginals across a cut.
pub fn product_cut_defect(
    state: &DensityOperator,
    dims: &[usize],
    part: &[usize],
) -> Result<f64> {
    let rest: Vec<usize> = (0..dims.len()).filter(|f| !part.contains(f)).collect();
    let on_part = partial_trace(state.matrix(), dims, part)?;
    let on_rest = partial_trace(state.matrix(), dims, &rest)?;
    let product = assemble_bipartition(dims, part, &on_part, &on_rest)?;
    Ok(state.matrix().sub(&product)?.frobenius_norm())
}

/// Run the five channels from the product initial state and audit every step.
pub fn run_pipeline(
    pipeline: &MeasurementPipeline,
    initial: [&DensityOperator; 3],
) -> Result<PipelineRun> {
    for (rho, space) in initial.iter().zip(pipeline.spaces()) {
        rho.space().check_matches(space)?;
    }
    let dims = pipeline.dims();
    let composite = initial[0].tensor(initial[1])?.tensor(initial[2])?;

    let mut trajectory = vec![composite];
    for step in pipeline.steps() {
        let next = apply_channel(trajectory.last().expect("non-empty"), step)?;
        trajectory.push(next);
    }

    let mut step_audits = Vec::with_capacity(trajectory.len());
    for (i, state) in trajectory.iter().enumerate() {
        let label = if i == 0 {
            "initial".to_string()
        } else {
            pipeline.steps()[i - 1].label().to_string()
        };
        step_audits.push(StepAudit {
            label,
            trace: state.matrix().trace().re,
            hermiticity_defect: state.matrix().hermiticity_defect(),
        });
    }

    let b_cut_defect = product_cut_defect(&trajectory[3], &dims, &[1])?;
    let a_cut_defect = product_cut_defect(&trajectory[5], &dims, &[0])?;

    // channel-state duality: outcome probabilities from the final tripartite
    // state must match marginals of the dual composite state on A ⊗ B
    let final_state = &trajectory[5];
    let dual = partial_trace(final_state.matrix(), &dims, &[0, 1])?;
    let (da, db) = (dims[0], dims[1]);
    let mut duality_defect: f64 = 0.0;
    for n in 0..da {
        let mut from_pipeline = 0.0;
        let mut from_dual = 0.0;
        for b in 0..db {
            for m in 0..dims[2] {
                let idx = (n * db + b) * dims[2] + m;
                from_pipeline += final_state.matrix().get(idx, idx).re;
            }
            from_dual += dual.get(n * db + b, n * db + b).re;
        }
        duality_defect = duality_defect.max((from_pipeline - from_dual).abs());
    }
    for b in 0..db {
        let mut from_pipeline = 0.0;
        let mut from_dual = 0.0;
        for n in 0..da {
            for m in 0..dims[2] {
                let idx = (n * db + b) * dims[2] + m;
                from_pipeline += final_state.matrix().get(idx, idx).re;
            }
            from_dual += dual.get(n * db + b, n * db + b).re;
        }
        duality_defect = duality_defect.max((from_pipeline - from_dual).abs());
    }

    Ok(PipelineRun { trajectory, step_audits, b_cut_defect, a_cut_defect, duality_defect })
}

/// Dual state of a channel on the doubled space: the channel applied to the
/// first half of a maximally entangled pair. A valid density operator here
/// certifies the channel preserves positivity and trace.
pub fn choi_state(c: &Channel) -> Result<DensityOperator> {
    let d: usize = c.dims.iter().product();
    let mut omega = vec![C64::new(0.0, 0.0); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        omega[i * d + i] = C64::new(amp, 0.0);
    }
    let omega_rho = outer(&omega, &omega);

    let matrix = match &c.kind {
        ChannelKind::EntanglingPreparation(u) | ChannelKind::UnitaryEvolution(u) => {
            let lifted = crate::matrix::kron(u, &ComplexMatrix::identity(d));
            lifted.mul(&omega_rho)?.mul(&lifted.adjoint())?
        }
        ChannelKind::DisentanglingMeasurement(measured) => {
            // extend the factor list with the reference copy, keep the cut
            let mut full_dims = c.dims.clone();
            full_dims.push(d);
            let rest: Vec<usize> =
                (0..full_dims.len()).filter(|f| !measured.contains(f)).collect();
            let on_measured = partial_trace(&omega_rho, &full_dims, measured)?;
            let on_rest = partial_trace(&omega_rho, &full_dims, &rest)?;
            assemble_bipartition(&full_dims, measured, &on_measured, &on_rest)?
        }
    };
    let space = HilbertSpace::new(d * d)?;
    DensityOperator::unchecked(space, matrix)
}
