//! Grid experiments over the attacker target, comparing simulated outcomes
//! with the analytic predicates. Double precision only.

mod config;
mod csv;
mod regions;
mod report;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{CapPolicy, ExperimentConfig, Mode, PerAxis, ZetaSetConfig, ZetaShapeConfig};
pub use csv::{parse_sweep_csv, write_regions_csv, write_sweep_csv, CsvRow, SWEEP_HEADER};
pub use regions::{run_regions, RegionRow, RequiredEpsilon};
pub use report::{equilibrium_report, CandidateReport, EquilibriumReport, QuadraticReport};

use crate::convergence::{evaluate_predicates, PredicateReport};
use crate::error::Result;
use crate::game::GameParams;
use crate::geometry::Vector;
use crate::ibr::{ibr_run, sample_initial_conditions_with_rng, IbrConfig, IbrOutcome};

/// Runs that hit the cap count as converging when their tail contraction
/// ratio is below this.
pub const TAIL_RATIO_LIMIT: f64 = 1.0 - 1e-6;

/// Largest spread of converged weights still reported as one `alpha_star`.
pub const UNANIMITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Empirical {
    Converges,
    Diverges,
    /// No non-trivial initial condition could be sampled.
    NoSamples,
}

impl Empirical {
    pub fn as_str(self) -> &'static str {
        match self {
            Empirical::Converges => "Converges",
            Empirical::Diverges => "Diverges",
            Empirical::NoSamples => "NoSamples",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Converges" => Some(Empirical::Converges),
            "Diverges" => Some(Empirical::Diverges),
            "NoSamples" => Some(Empirical::NoSamples),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Consistency {
    Ok,
    /// Simulation converged where the necessary condition fails.
    NecessaryViolated,
    /// Simulation failed to converge where the sufficient condition holds.
    SufficientViolated,
}

impl Consistency {
    pub fn as_str(self) -> &'static str {
        match self {
            Consistency::Ok => "OK",
            Consistency::NecessaryViolated => "NecessaryViolated",
            Consistency::SufficientViolated => "SufficientViolated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "OK" => Some(Consistency::Ok),
            "NecessaryViolated" => Some(Consistency::NecessaryViolated),
            "SufficientViolated" => Some(Consistency::SufficientViolated),
            _ => None,
        }
    }

    /// Cross-checks an empirical verdict against the predicates. A violation
    /// is only declared when the predicate misses by more than `slack_tol`.
    pub fn classify(
        mode: Mode,
        empirical: Empirical,
        report: &PredicateReport<f64>,
        slack_tol: f64,
    ) -> Self {
        match empirical {
            Empirical::Converges if !report.necessary.holds_within(slack_tol) => {
                Consistency::NecessaryViolated
            }
            Empirical::Diverges
                if mode == Mode::Strong && report.sufficient.holds_beyond(slack_tol) =>
            {
                Consistency::SufficientViolated
            }
            _ => Consistency::Ok,
        }
    }
}

/// Aggregate of the runs at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub runs: usize,
    /// Converged, or extrapolated to converge at the cap.
    pub converged: usize,
    /// Stopped on the convergence test with `α* ∈ (0, 1)`.
    pub mixed_runs: usize,
    /// The common weight when every run converged to the same one.
    pub alpha_star: Option<f64>,
    pub sampling_error: Option<String>,
}

impl RunSummary {
    pub fn converged_fraction(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.converged as f64 / self.runs as f64
        }
    }

    pub fn all_mixed(&self) -> bool {
        self.runs > 0 && self.mixed_runs == self.runs
    }

    pub fn empirical(&self, mode: Mode) -> Empirical {
        if self.runs == 0 {
            return Empirical::NoSamples;
        }
        let converges = match mode {
            Mode::Weak => self.converged > 0,
            Mode::Strong => self.converged == self.runs,
        };
        if converges {
            Empirical::Converges
        } else {
            Empirical::Diverges
        }
    }
}

/// Weight a run settled on, if it counts as converged under `policy`.
pub fn run_limit(outcome: &IbrOutcome<f64>, last_alpha: f64, policy: CapPolicy) -> Option<f64> {
    match outcome {
        IbrOutcome::ConvergedZero { .. } | IbrOutcome::ConvergedMixed { .. } => {
            outcome.alpha_star().map(|a| a.value())
        }
        IbrOutcome::MaxIterNoConvergence {
            tail_ratio: Some(r),
        } if policy == CapPolicy::Extrapolate && *r < TAIL_RATIO_LIMIT => Some(last_alpha),
        _ => None,
    }
}

/// Runs iterated best response from each initial condition.
pub fn summarize_runs(
    p: &GameParams<f64>,
    inits: &[Vector<f64>],
    ibr: &IbrConfig<f64>,
    policy: CapPolicy,
) -> Result<RunSummary> {
    let mut converged = 0;
    let mut mixed_runs = 0;
    let mut alphas = Vec::with_capacity(inits.len());
    for y0 in inits {
        let trace = ibr_run(p, y0, ibr)?;
        if matches!(trace.outcome(), IbrOutcome::ConvergedMixed { .. }) {
            mixed_runs += 1;
        }
        if let Some(a) = run_limit(trace.outcome(), trace.last_alpha().value(), policy) {
            converged += 1;
            alphas.push(a);
        }
    }
    let alpha_star = if converged == inits.len() && !alphas.is_empty() {
        let lo = alphas.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo <= UNANIMITY_TOL).then_some(alphas[0])
    } else {
        None
    };
    Ok(RunSummary {
        runs: inits.len(),
        converged,
        mixed_runs,
        alpha_star,
        sampling_error: None,
    })
}

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionVerdict {
    pub y_attack: Vector<f64>,
    pub summary: RunSummary,
    pub empirical: Empirical,
    pub report: PredicateReport<f64>,
    pub consistency: Consistency,
}

impl RegionVerdict {
    /// Strong convergence observed with every run mixed, yet the necessary
    /// half of the sufficient condition fails by more than `slack_tol`.
    pub fn suf1_violated(&self, slack_tol: f64) -> bool {
        self.summary.all_mixed() && self.report.sufficient.slack_suf1 < -slack_tol
    }
}

/// Counts per consistency class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub points: usize,
    pub ok: usize,
    pub necessary_violated: usize,
    pub sufficient_violated: usize,
    pub suf1_violated: usize,
    pub no_samples: usize,
}

impl SweepSummary {
    pub fn of(rows: &[RegionVerdict], slack_tol: f64) -> Self {
        let mut s = SweepSummary {
            points: rows.len(),
            ..Default::default()
        };
        for r in rows {
            match r.consistency {
                Consistency::Ok => s.ok += 1,
                Consistency::NecessaryViolated => s.necessary_violated += 1,
                Consistency::SufficientViolated => s.sufficient_violated += 1,
            }
            if r.suf1_violated(slack_tol) {
                s.suf1_violated += 1;
            }
            if r.empirical == Empirical::NoSamples {
                s.no_samples += 1;
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Evaluates one grid point. The initial conditions come from stream
/// `index` of the master seed, so the result does not depend on scheduling.
pub fn evaluate_point(
    cfg: &ExperimentConfig,
    base: &GameParams<f64>,
    index: usize,
    y_attack: &Vector<f64>,
) -> Result<RegionVerdict> {
    let p = base.with_attack(y_attack.clone())?;
    let ibr = cfg.ibr_config();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let summary = match sample_initial_conditions_with_rng(
        &p,
        cfg.init_count,
        cfg.init_radius(),
        ibr.tau_one,
        &mut rng,
    ) {
        Ok(inits) => summarize_runs(&p, &inits, &ibr, cfg.cap_policy)?,
        Err(e) => RunSummary {
            runs: 0,
            converged: 0,
            mixed_runs: 0,
            alpha_star: None,
            sampling_error: Some(e.to_string()),
        },
    };
    let empirical = summary.empirical(cfg.mode);
    let report = evaluate_predicates(&p);
    let consistency = Consistency::classify(cfg.mode, empirical, &report, cfg.slack_tol);
    Ok(RegionVerdict {
        y_attack: y_attack.clone(),
        summary,
        empirical,
        report,
        consistency,
    })
}

/// Sweeps the configured grid. Rows come back in grid order.
pub fn run_sweep(cfg: &ExperimentConfig, execution: Execution) -> Result<Vec<RegionVerdict>> {
    cfg.validate()?;
    let base = cfg.base_params()?;
    let grid = cfg.grid()?;
    match execution {
        Execution::Parallel => grid
            .par_iter()
            .enumerate()
            .map(|(i, ya)| evaluate_point(cfg, &base, i, ya))
            .collect(),
        Execution::Sequential => grid
            .iter()
            .enumerate()
            .map(|(i, ya)| evaluate_point(cfg, &base, i, ya))
            .collect(),
    }
}
