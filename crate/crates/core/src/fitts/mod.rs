//! Study protocols, the synthetic participant that runs them through the
//! pipeline, and the pointing metrics used to compare triggers.

mod agent;
mod metrics;
mod protocol;
mod summary;

pub use agent::{
    run_agent, run_protocol_trial, track_plan, AgentParams, AgentSetup, FingerPlan, Pipeline, SelectionRecord,
    SonarPipeline, Stroke, TrialRecord,
};
pub use metrics::{
    effective_id, fit_fitts, reference_model, EffectiveId, FittsModel, REFERENCE_MODELS, WE_FACTOR, WE_FLOOR_MM,
};
pub use protocol::{
    enumerate_study2_sequences, make_study1_block, make_study1_session, make_study2_session, make_study2_trial,
    ProtocolTrial, TaskKind, TaskSpec, DISPLAY_MM, STUDY1_AMPLITUDES, STUDY1_BLOCKS, STUDY1_REPS, STUDY1_SELECTIONS,
    STUDY1_WIDTHS, STUDY2_AMPLITUDE, STUDY2_BLOCKS, STUDY2_SELECTIONS, STUDY2_TRIALS_PER_BLOCK, STUDY2_WIDTH,
};
pub use summary::{summarize, CellSummary, FittsSummary};
