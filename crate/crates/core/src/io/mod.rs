//! Configuration, deterministic output files and run orchestration.

mod config;
mod csv;
mod manifest;
mod run;
mod svg;

pub use config::{
    parse_bayes_config, parse_config, parse_maxent_config, BayesConfig, ConfigErrors, ConfigIssue, IssueKind,
    MaxEntConfig, ScenarioConfig, CONFIG_KEYS,
};
pub use csv::{snapshot_csv, snapshot_header, write_snapshots};
pub use manifest::{fnv1a64, FileRecord, RunManifest, MANIFEST_NAME};
pub use run::{run_config, sample_config, RunOutcome, SampleOutcome};
pub use svg::{arrows, render_plot, Arrow, PlotSeries, plot_series};
