//! Instance generation, CSV ingestion/emission and the Monte-Carlo
//! experiment runners.

mod experiment;
mod instance;
mod io;
mod pitprops;

pub use experiment::{
    run_bucket_experiment, run_synthetic, uniform_buckets, ExperimentReport, ExperimentRow,
    SyntheticConfig, TrialOutcome, DEFAULT_MAX_TRIES,
};
pub use instance::{gen_instance, gen_instance_on_support, random_support, ProblemInstance};
pub use io::{
    emit_csv, format_sig6, load_mask_csv, load_matrix_csv, read_rows_csv, render_rows,
    write_mask_csv, write_matrix_csv, LoadedMatrix, ASYMMETRY_TOL, NA, ROW_HEADER,
};
pub use pitprops::{
    default_itspca_thresholds, load_pitprops, pitprops_experiment, run_pitprops, MethodRows,
    PitpropsConfig, PitpropsData, PitpropsReport, ITSPCA_MAX_ITER, ITSPCA_TOL, PITPROPS_SUPPORT,
    PITPROPS_VARIABLES,
};
