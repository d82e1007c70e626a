//! The rare-event coverage study, percentile and logit-distance tables, and
//! the mutational-signature scale sweep.

mod coverage;
mod hpd;
mod signatures;
mod tables;

use std::io::Write;

use crate::error::{domain, Result};

pub use coverage::{
    coverage_curve, coverage_from_intervals, coverage_rows, exact_coverage, log_grid, posterior_intervals,
    write_coverage_csv, CoverageRow, CoverageSpec, PriorMethod, TargetMode, DEFAULT_GRID_POINTS, DEFAULT_GRID_RANGE,
};
pub use hpd::hpd_interval;
pub use signatures::{
    iqr_at_matched_average, load_cosmic, load_cosmic_path, sbs96_labels, signature_scale_sweep, summarize_sweep,
    synthetic_catalog, write_catalog, write_summary_csv, write_sweep_csv, MatchedIqr, ScaleSweep, SignatureCatalog,
    SweepRow, SweepSummary, DEFAULT_MC_SAMPLES, ENTRY_FLOOR, SBS_TYPES,
};
pub use tables::{
    default_alphas, default_y_grid, logit_comparison, percentile_table, write_logit_csv, write_percentile_csv,
    LocationMethod, LogitRow, PercentileRow, PERCENTILES,
};

pub(crate) fn write_csv<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let res: std::result::Result<(), csv::Error> = (|| {
        wtr.write_record(header)?;
        for r in rows {
            wtr.write_record(&r)?;
        }
        wtr.flush()?;
        Ok(())
    })();
    res.map_err(|e| domain(format!("writing CSV: {e}")))
}
