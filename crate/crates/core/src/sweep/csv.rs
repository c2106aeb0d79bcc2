use std::io::{self, Write};

use super::regions::RegionRow;
use super::{Consistency, Empirical, Mode, RegionVerdict, SweepSummary};
use crate::convergence::{NecessaryReport, PredicateReport, SufficientReport};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: [&str; 21] = [
    "yA_1",
    "yA_2",
    "empirical",
    "converged_fraction",
    "alpha_star",
    "zero_case",
    "weak_case",
    "mixed_case",
    "weak_necessary",
    "suf1",
    "suf2",
    "strong_sufficient",
    "consistency",
    "slack_zero",
    "slack_weak",
    "slack_mixed",
    "slack_suf1",
    "slack_suf2",
    "runs",
    "mixed_runs",
    "all_mixed",
];

/// 17 significant digits: parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn opt_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

fn coord(row: &RegionVerdict, i: usize) -> String {
    row.y_attack
        .as_slice()
        .get(i)
        .copied()
        .map(num)
        .unwrap_or_default()
}

/// Writes sweep rows followed by `#` summary lines.
pub fn write_sweep_csv<W: Write>(
    mut w: W,
    rows: &[RegionVerdict],
    mode: Mode,
    slack_tol: f64,
) -> io::Result<()> {
    writeln!(w, "{}", SWEEP_HEADER.join(","))?;
    for r in rows {
        let n = &r.report.necessary;
        let s = &r.report.sufficient;
        let fields = [
            coord(r, 0),
            coord(r, 1),
            r.empirical.as_str().to_string(),
            num(r.summary.converged_fraction()),
            opt_num(r.summary.alpha_star),
            n.zero_case.to_string(),
            n.weak_case.to_string(),
            opt_bool(n.mixed_case),
            n.weak_necessary.to_string(),
            s.suf1.to_string(),
            s.suf2.to_string(),
            s.strong_sufficient.to_string(),
            r.consistency.as_str().to_string(),
            num(n.slack_zero),
            num(n.slack_weak),
            opt_num(n.slack_mixed),
            num(s.slack_suf1),
            num(s.slack_suf2),
            r.summary.runs.to_string(),
            r.summary.mixed_runs.to_string(),
            r.summary.all_mixed().to_string(),
        ];
        writeln!(w, "{}", fields.join(","))?;
    }
    let sum = SweepSummary::of(rows, slack_tol);
    writeln!(w, "# mode={} slack_tol={}", mode.as_str(), num(slack_tol))?;
    writeln!(
        w,
        "# points={} ok={} necessary_violated={} sufficient_violated={} suf1_violated={} no_samples={}",
        sum.points, sum.ok, sum.necessary_violated, sum.sufficient_violated, sum.suf1_violated, sum.no_samples
    )
}

/// A sweep row read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub y_attack: Vec<f64>,
    pub empirical: Empirical,
    pub converged_fraction: f64,
    pub alpha_star: Option<f64>,
    pub report: PredicateReport<f64>,
    pub consistency: Consistency,
    pub runs: usize,
    pub mixed_runs: usize,
    pub all_mixed: bool,
}

impl CsvRow {
    /// Consistency recomputed from the other columns.
    pub fn recomputed_consistency(&self, mode: Mode, slack_tol: f64) -> Consistency {
        Consistency::classify(mode, self.empirical, &self.report, slack_tol)
    }

    /// Whether every stored boolean agrees with its slack column.
    pub fn booleans_match_slacks(&self) -> bool {
        let n = &self.report.necessary;
        let s = &self.report.sufficient;
        let rn = NecessaryReport::from_slacks(n.slack_zero, n.slack_weak, n.slack_mixed, None);
        let rs = SufficientReport::from_slacks(s.slack_suf1, s.slack_suf2, None);
        rn.zero_case == n.zero_case
            && rn.weak_case == n.weak_case
            && rn.mixed_case == n.mixed_case
            && rn.weak_necessary == n.weak_necessary
            && rs.suf1 == s.suf1
            && rs.suf2 == s.suf2
            && rs.strong_sufficient == s.strong_sufficient
    }
}

fn bad(line: usize, what: &str) -> Error {
    Error::InvalidConfig(format!("csv line {line}: bad {what}"))
}

/// Parses the rows written by [`write_sweep_csv`]; `#` lines are skipped.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SWEEP_HEADER.join(",") => {}
        _ => return Err(Error::InvalidConfig("csv header mismatch".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != SWEEP_HEADER.len() {
            return Err(bad(lineno, "field count"));
        }
        let float = |j: usize| {
            f[j].parse::<f64>()
                .map_err(|_| bad(lineno, SWEEP_HEADER[j]))
        };
        let opt_float = |j: usize| -> Result<Option<f64>> {
            if f[j].is_empty() {
                Ok(None)
            } else {
                float(j).map(Some)
            }
        };
        let boolean = |j: usize| {
            f[j].parse::<bool>()
                .map_err(|_| bad(lineno, SWEEP_HEADER[j]))
        };
        let opt_boolean = |j: usize| -> Result<Option<bool>> {
            if f[j].is_empty() {
                Ok(None)
            } else {
                boolean(j).map(Some)
            }
        };
        let count = |j: usize| {
            f[j].parse::<usize>()
                .map_err(|_| bad(lineno, SWEEP_HEADER[j]))
        };

        let mut y_attack = vec![float(0)?];
        if let Some(y) = opt_float(1)? {
            y_attack.push(y);
        }
        let necessary = NecessaryReport {
            zero_case: boolean(5)?,
            weak_case: boolean(6)?,
            mixed_case: opt_boolean(7)?,
            weak_necessary: boolean(8)?,
            zeta_side: None,
            slack_zero: float(13)?,
            slack_weak: float(14)?,
            slack_mixed: opt_float(15)?,
        };
        let sufficient = SufficientReport {
            suf1: boolean(9)?,
            suf2: boolean(10)?,
            strong_sufficient: boolean(11)?,
            slack_suf1: float(16)?,
            slack_suf2: float(17)?,
            collinear: None,
        };
        rows.push(CsvRow {
            y_attack,
            empirical: Empirical::parse(f[2]).ok_or_else(|| bad(lineno, "empirical"))?,
            converged_fraction: float(3)?,
            alpha_star: opt_float(4)?,
            report: PredicateReport {
                necessary,
                sufficient,
                equal_means: false,
            },
            consistency: Consistency::parse(f[12]).ok_or_else(|| bad(lineno, "consistency"))?,
            runs: count(18)?,
            mixed_runs: count(19)?,
            all_mixed: boolean(20)?,
        });
    }
    Ok(rows)
}

/// Writes union/intersection membership per radius and target.
pub fn write_regions_csv<W: Write>(
    mut w: W,
    rows: &[RegionRow],
    required_eps: &[(f64, Option<f64>)],
) -> io::Result<()> {
    writeln!(
        w,
        "radius,yA_1,yA_2,union_necessary,intersection_sufficient"
    )?;
    for r in rows {
        let y = r.y_attack.as_slice();
        writeln!(
            w,
            "{},{},{},{},{}",
            num(r.radius),
            num(y[0]),
            y.get(1).copied().map(num).unwrap_or_default(),
            r.union_necessary,
            r.intersection_sufficient
        )?;
    }
    for (radius, eps) in required_eps {
        match eps {
            Some(e) => writeln!(w, "# radius={} required_epsilon={}", num(*radius), num(*e))?,
            None => writeln!(w, "# radius={} required_epsilon=none", num(*radius))?,
        }
    }
    Ok(())
}
