use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::Metadata;
use crate::error::{Error, Result};
use crate::moments::MomentReport;

/// Moment reports over an increasing ladder of cutoffs.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub metadata: Metadata,
    pub rows: Vec<MomentReport>,
    /// `(T, ratio_full)` pairs.
    pub plot: Vec<(f64, Option<f64>)>,
}

impl ReportBundle {
    pub fn new(metadata: Metadata, rows: Vec<MomentReport>) -> Result<Self> {
        if rows.windows(2).any(|w| !(w[0].t_max < w[1].t_max)) {
            return Err(Error::Contract("T-ladder must be strictly increasing".into()));
        }
        let plot = rows.iter().map(|r| (r.t_max, r.ratio_full)).collect();
        Ok(ReportBundle { metadata, rows, plot })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(MomentReport::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }
}

/// Write `T ratio_full` columns under a one-line header. An empty bundle is
/// an error and writes nothing.
pub fn emit_plot_data(bundle: &ReportBundle, path: &Path) -> Result<()> {
    if bundle.plot.is_empty() {
        return Err(Error::Contract("no rows to plot".into()));
    }
    let mut s = String::from("T ratio_full\n");
    for (t, r) in &bundle.plot {
        let r = r.map(|v| v.to_string()).unwrap_or_else(|| "nan".into());
        let _ = writeln!(s, "{t} {r}");
    }
    std::fs::write(path, s)?;
    Ok(())
}
