use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::experiment::{ErrorCurve, ExperimentResults, ProblemResult};
use crate::error::{Error, Result};
use crate::learn::Algorithm;

/// Errors below this many nats count as having reached the best estimate; also the slack
/// allowed when a challenger tries to match the reference learner's final quality.
pub const ERROR_THRESHOLD: f64 = 1e-4;

/// Marker for an undefined cell.
pub const UNDEFINED: &str = "—";

/// One category row comparing two learners.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub category: String,
    /// Iterations (iteration table) or problems (time table) compared.
    pub compared: usize,
    pub wins_first: usize,
    pub wins_second: usize,
    /// Mean fractional reduction of the other learner's error (or time) where each wins.
    pub reduction_first: Option<f64>,
    pub reduction_second: Option<f64>,
}

impl SpeedupRow {
    pub fn share_first(&self) -> Option<f64> {
        (self.compared > 0).then(|| self.wins_first as f64 / self.compared as f64)
    }

    pub fn share_second(&self) -> Option<f64> {
        (self.compared > 0).then(|| self.wins_second as f64 / self.compared as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupTable {
    pub title: String,
    pub first: Algorithm,
    pub second: Algorithm,
    /// Column names of the two reduction factors.
    pub reduction_labels: (String, String),
    pub rows: Vec<SpeedupRow>,
}

/// Wins and summed reductions accumulated over a category.
#[derive(Default)]
struct Tally {
    compared: usize,
    wins: [usize; 2],
    reduction: [f64; 2],
}

impl Tally {
    fn record(&mut self, a: f64, b: f64) {
        self.compared += 1;
        if a < b {
            self.wins[0] += 1;
            self.reduction[0] += (b - a) / b;
        } else if b < a {
            self.wins[1] += 1;
            self.reduction[1] += (a - b) / a;
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.compared += other.compared;
        for k in 0..2 {
            self.wins[k] += other.wins[k];
            self.reduction[k] += other.reduction[k];
        }
    }

    fn row(&self, category: String) -> SpeedupRow {
        let mean = |k: usize| (self.wins[k] > 0).then(|| self.reduction[k] / self.wins[k] as f64);
        SpeedupRow {
            category,
            compared: self.compared,
            wins_first: self.wins[0],
            wins_second: self.wins[1],
            reduction_first: mean(0),
            reduction_second: mean(1),
        }
    }
}

fn hiding_label(h: f64) -> String {
    format!("hiding {}%", (h * 100.0).round() as u32)
}

/// Rows by network, by hiding level, then the average over everything.
fn categorize(results: &ExperimentResults, per_problem: impl Fn(&ProblemResult) -> Option<Tally>) -> Vec<SpeedupRow> {
    let mut by_network: BTreeMap<String, Tally> = BTreeMap::new();
    let mut by_hiding: BTreeMap<u32, (f64, Tally)> = BTreeMap::new();
    let mut all = Tally::default();
    for p in &results.problems {
        let Some(t) = per_problem(p) else { continue };
        by_network.entry(p.network.clone()).or_default().merge(&t);
        by_hiding
            .entry((p.hiding * 1e6).round() as u32)
            .or_insert_with(|| (p.hiding, Tally::default()))
            .1
            .merge(&t);
        all.merge(&t);
    }
    let mut rows: Vec<SpeedupRow> = by_network.into_iter().map(|(n, t)| t.row(n)).collect();
    rows.extend(by_hiding.into_values().map(|(h, t)| t.row(hiding_label(h))));
    rows.push(all.row("average".into()));
    rows
}

/// Per global iteration, which of `first` and `second` is closer to the best posterior.
///
/// Iterations are counted from 1 until both errors are below [`ERROR_THRESHOLD`]; a trace
/// that stopped early keeps its last error. Ties count as compared but are nobody's win.
pub fn iteration_speedup_table(results: &ExperimentResults, first: Algorithm, second: Algorithm) -> SpeedupTable {
    let rows = categorize(results, |p| {
        let a = ErrorCurve::new(p, p.run(first)?);
        let b = ErrorCurve::new(p, p.run(second)?);
        let horizon = a.error.len().max(b.error.len());
        let mut tally = Tally::default();
        for i in 1..horizon {
            let (ea, eb) = (a.error_at(i), b.error_at(i));
            if ea < ERROR_THRESHOLD && eb < ERROR_THRESHOLD {
                break;
            }
            tally.record(ea, eb);
        }
        Some(tally)
    });
    SpeedupTable {
        title: "Speedup (iterations)".into(),
        first,
        second,
        reduction_labels: (format!("r {first}"), format!("r {second}")),
        rows,
    }
}

/// Time each learner needs: `reference` to finish, `challenger` to come within
/// [`ERROR_THRESHOLD`] of the reference's final log posterior (its total time if it never does).
pub fn race_times(problem: &ProblemResult, reference: Algorithm, challenger: Algorithm) -> Option<(f64, f64)> {
    let r = &problem.run(reference)?.trace;
    let c = &problem.run(challenger)?.trace;
    let target = r.final_log_posterior() - ERROR_THRESHOLD;
    let t_reference = r.iterations.last()?.elapsed_ms;
    let t_challenger = c
        .iterations
        .iter()
        .find(|i| i.log_posterior >= target)
        .or(c.iterations.last())?
        .elapsed_ms;
    Some((t_challenger, t_reference))
}

/// Problems on which `challenger` reached the quality of `reference` sooner, and by how much.
pub fn time_speedup_table(results: &ExperimentResults, challenger: Algorithm, reference: Algorithm) -> SpeedupTable {
    let rows = categorize(results, |p| {
        let (tc, tr) = race_times(p, reference, challenger)?;
        let mut tally = Tally::default();
        tally.record(tc, tr);
        Some(tally)
    });
    SpeedupTable {
        title: "Speedup (time)".into(),
        first: challenger,
        second: reference,
        reduction_labels: (format!("s {challenger}"), format!("s {reference}")),
        rows,
    }
}

fn percent(x: Option<f64>) -> String {
    x.map_or_else(|| UNDEFINED.to_string(), |v| format!("{:.2}%", 100.0 * v))
}

impl SpeedupTable {
    fn cells(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let header = vec![
            "category".to_string(),
            "compared".to_string(),
            format!("% {}", self.first),
            format!("% {}", self.second),
            self.reduction_labels.0.clone(),
            self.reduction_labels.1.clone(),
        ];
        let body = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.category.clone(),
                    r.compared.to_string(),
                    percent(r.share_first()),
                    percent(r.share_second()),
                    percent(r.reduction_first),
                    percent(r.reduction_second),
                ]
            })
            .collect();
        (header, body)
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let (header, body) = self.cells();
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &body {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = format!("{}\n", self.title);
        for row in std::iter::once(&header).chain(&body) {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(k, (c, &w))| {
                    let pad = w - c.chars().count();
                    if k == 0 {
                        format!("{c}{}", " ".repeat(pad))
                    } else {
                        format!("{}{c}", " ".repeat(pad))
                    }
                })
                .collect();
            writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let (header, body) = self.cells();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)?;
        for row in &body {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::io("<csv>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn row(&self, category: &str) -> Option<&SpeedupRow> {
        self.rows.iter().find(|r| r.category == category)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::experiment::{ExperimentSpec, LearnerRun};
    use crate::learn::{IterationRecord, LearningTrace, Status};
    use crate::model::Parameterization;

    fn trace(algorithm: Algorithm, lps: &[f64], times: &[f64]) -> LearnerRun {
        LearnerRun {
            algorithm,
            trace: LearningTrace {
                algorithm,
                iterations: lps
                    .iter()
                    .zip(times)
                    .enumerate()
                    .map(|(i, (&lp, &t))| IterationRecord {
                        iteration: i,
                        log_posterior: lp,
                        elapsed_ms: t,
                        max_change: 0.0,
                        local_iterations: None,
                        branch: None,
                        params: None,
                    })
                    .collect(),
                final_params: Parameterization::from_tables(vec![]),
                status: Status::Converged,
            },
        }
    }

    fn results(runs: Vec<LearnerRun>) -> ExperimentResults {
        let best = runs
            .iter()
            .flat_map(|r| r.trace.log_posteriors())
            .fold(f64::NEG_INFINITY, f64::max);
        ExperimentResults {
            spec: ExperimentSpec::default(),
            problems: vec![ProblemResult {
                network: "toy".into(),
                hiding: 0.25,
                replicate: 0,
                sample_seed: 0,
                hiding_seed: 0,
                init_seed: 0,
                best_log_posterior: best,
                runs,
            }],
        }
    }

    #[test]
    fn identical_traces_are_all_ties() {
        let lps = [-10.0, -5.0, -4.0, -3.9];
        let t = [0.0; 4];
        let r = results(vec![trace(Algorithm::Edml, &lps, &t), trace(Algorithm::Em, &lps, &t)]);
        let table = iteration_speedup_table(&r, Algorithm::Edml, Algorithm::Em);
        let avg = table.row("average").unwrap();
        assert_eq!((avg.share_first(), avg.share_second()), (Some(0.0), Some(0.0)));
        assert_eq!(avg.reduction_first, None);
        assert!(table.to_text().contains(UNDEFINED));
    }

    #[test]
    fn dominating_learner_takes_every_iteration() {
        let t = [0.0; 4];
        let r = results(vec![
            trace(Algorithm::Edml, &[-10.0, -4.0, -3.5, -3.0], &t),
            trace(Algorithm::Em, &[-10.0, -6.0, -5.0, -4.0], &t),
        ]);
        let table = iteration_speedup_table(&r, Algorithm::Edml, Algorithm::Em);
        let row = table.row("hiding 25%").unwrap();
        // iteration 3 still counts: EDML's error is 0 there but EM's is not
        assert_eq!((row.compared, row.wins_first, row.wins_second), (3, 3, 0));
        // errors (1, 0.5, 0) against (3, 2, 1)
        let expected = ((3.0 - 1.0) / 3.0 + (2.0 - 0.5) / 2.0 + 1.0) / 3.0;
        assert!((row.reduction_first.unwrap() - expected).abs() < 1e-15);
        assert_eq!(
            table.row("toy").unwrap(),
            &SpeedupRow {
                category: "toy".into(),
                ..row.clone()
            }
        );
    }

    #[test]
    fn race_against_reference() {
        let r = results(vec![
            trace(Algorithm::Em, &[-10.0, -6.0, -5.0], &[0.0, 10.0, 20.0]),
            trace(Algorithm::Hybrid, &[-10.0, -5.0, -4.9], &[0.0, 5.0, 9.0]),
        ]);
        let table = time_speedup_table(&r, Algorithm::Hybrid, Algorithm::Em);
        let avg = table.row("average").unwrap();
        assert_eq!((avg.wins_first, avg.wins_second), (1, 0));
        assert!((avg.reduction_first.unwrap() - 0.75).abs() < 1e-15);
        let csv = table.to_csv().unwrap();
        assert!(csv.starts_with("category,compared,% hybrid,% em,s hybrid,s em\n"));
    }

    #[test]
    fn already_converged_challenger_wins_at_zero() {
        let r = results(vec![
            trace(Algorithm::Em, &[-5.0, -5.0], &[0.0, 3.0]),
            trace(Algorithm::Hybrid, &[-5.0, -5.0], &[0.0, 4.0]),
        ]);
        assert_eq!(
            race_times(&r.problems[0], Algorithm::Em, Algorithm::Hybrid),
            Some((0.0, 3.0))
        );
    }
}
