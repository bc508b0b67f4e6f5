use std::path::{Path, PathBuf};

use super::experiment::{ErrorCurve, ExperimentResults};
use super::tables::SpeedupTable;
use crate::error::{Error, Result};
use crate::model::write_json;

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// One CSV per (problem, learner) with columns iteration, elapsed_ms, log_posterior, error.
/// Returns the files written, in problem then learner order.
pub fn emit_curves(results: &ExperimentResults, dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();
    for (problem, run) in results.traces() {
        let curve = ErrorCurve::new(problem, run);
        let path = dir.join(format!("{}-{}.csv", problem.id(), run.algorithm));
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["iteration", "elapsed_ms", "log_posterior", "error"])?;
        for k in 0..curve.iteration.len() {
            w.write_record([
                curve.iteration[k].to_string(),
                curve.elapsed_ms[k].to_string(),
                curve.log_posterior[k].to_string(),
                curve.error[k].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Writes `results.json` (spec plus every trace) into `dir`.
pub fn write_results(results: &ExperimentResults, dir: &Path) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = dir.join("results.json");
    write_json(&path, results)?;
    Ok(path)
}

/// Writes `<stem>.txt` and `<stem>.csv` renderings of a table.
pub fn write_table(table: &SpeedupTable, dir: &Path, stem: &str) -> Result<()> {
    create_dir(dir)?;
    let txt = dir.join(format!("{stem}.txt"));
    std::fs::write(&txt, table.to_text()).map_err(|e| Error::io(&txt, e))?;
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv, table.to_csv()?).map_err(|e| Error::io(&csv, e))?;
    Ok(())
}
