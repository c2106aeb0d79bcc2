use std::fmt;

use serde::Serialize;

use crate::equilibrium::{
    verify_nash, zero_equilibrium, zero_equilibrium_slack, Equilibrium, EquilibriumKind,
    MixedQuadratic,
};
use crate::error::Result;
use crate::game::GameParams;

const ALPHA_GRID: usize = 1001;
const PERTURBATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub discriminant: f64,
    pub linear: bool,
    pub real_roots: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateReport {
    pub r: f64,
    pub y_bar: Vec<f64>,
    pub alpha: f64,
    pub accepted: bool,
    pub verdict: String,
    /// Nash oracle result, for accepted candidates.
    pub nash_verified: Option<bool>,
}

/// Everything known in closed form about the equilibria of one game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub zero_equilibrium_exists: bool,
    pub zero_equilibrium_slack: f64,
    pub zero_equilibrium_verified: Option<bool>,
    pub quadratic: QuadraticReport,
    pub candidates: Vec<CandidateReport>,
    pub mixed_equilibria: usize,
}

impl EquilibriumReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Builds the report, running the Nash oracle on every accepted candidate.
/// Fails with `DegenerateGame` when `ŷ = ζ`.
pub fn equilibrium_report(
    p: &GameParams<f64>,
    tau_one: f64,
    seed: u64,
) -> Result<EquilibriumReport> {
    let q = MixedQuadratic::solve(p, tau_one)?;
    let zero = zero_equilibrium(p);
    let candidates: Vec<CandidateReport> = q
        .candidates
        .iter()
        .map(|c| {
            let accepted = c.verdict == crate::equilibrium::CandidateVerdict::Accepted;
            let nash_verified = accepted.then(|| {
                let e = Equilibrium {
                    kind: EquilibriumKind::Mixed,
                    alpha_star: c.alpha,
                    y_bar_star: c.y_bar.clone(),
                    r: Some(c.r),
                };
                verify_nash(&e, p, ALPHA_GRID, PERTURBATIONS, seed)
            });
            CandidateReport {
                r: c.r,
                y_bar: c.y_bar.as_slice().to_vec(),
                alpha: c.alpha.value(),
                accepted,
                verdict: c.verdict.to_string(),
                nash_verified,
            }
        })
        .collect();
    Ok(EquilibriumReport {
        zero_equilibrium_exists: zero.is_some(),
        zero_equilibrium_slack: zero_equilibrium_slack(p),
        zero_equilibrium_verified: zero
            .map(|e| verify_nash(&e, p, ALPHA_GRID, PERTURBATIONS, seed)),
        quadratic: QuadraticReport {
            a: q.a,
            b: q.b,
            c: q.c,
            discriminant: q.discriminant,
            linear: q.linear,
            real_roots: q.has_real_roots(),
        },
        mixed_equilibria: candidates.iter().filter(|c| c.accepted).count(),
        candidates,
    })
}

fn opt<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref()
        .map_or_else(|| "-".to_string(), ToString::to_string)
}

impl fmt::Display for EquilibriumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "zero_equilibrium_exists: {}",
            self.zero_equilibrium_exists
        )?;
        writeln!(f, "zero_equilibrium_slack: {}", self.zero_equilibrium_slack)?;
        writeln!(
            f,
            "zero_equilibrium_verified: {}",
            opt(&self.zero_equilibrium_verified)
        )?;
        let q = &self.quadratic;
        writeln!(f, "quadratic: a={} b={} c={}", q.a, q.b, q.c)?;
        writeln!(f, "discriminant: {}", q.discriminant)?;
        writeln!(f, "linear: {}", q.linear)?;
        writeln!(f, "real_roots: {}", q.real_roots)?;
        for (i, c) in self.candidates.iter().enumerate() {
            writeln!(
                f,
                "candidate {}: r={} alpha={} y_bar={:?} {} nash_verified={}",
                i + 1,
                c.r,
                c.alpha,
                c.y_bar,
                c.verdict,
                opt(&c.nash_verified)
            )?;
        }
        write!(f, "mixed_equilibria: {}", self.mixed_equilibria)
    }
}
