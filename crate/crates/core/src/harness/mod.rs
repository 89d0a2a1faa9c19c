//! Experiment runner and the two contradiction pipelines.

pub mod experiment;
pub mod pipeline;

pub use experiment::{
    run_experiment, summarize, ComboStatistic, ExperimentConfig, ExperimentSummary, ModelKind,
    RoundRecord, CORRELATED_MEMBERS, DEFAULT_DENOMINATOR_BOUND, PRODUCT_OPTIONS,
};
pub use pipeline::{
    pipeline_section2, pipeline_section3, ComboCorrelation, NonlocalComboEvidence, RationalSextet,
    Section2Report, Section3Report,
};
