//! Iterated best response: the attacker opens with `ȳ₀`, then the sensor and
//! the attacker alternate exact best responses until the fusion weight
//! settles, saturates at one, or the iterates blow up.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{FusionWeight, GameParams};
use crate::geometry::Vector;
use crate::sampling::{offset_point, unit_ball};
use crate::scalar::Scalar;

/// Rejections allowed per requested initial condition.
pub const MAX_REJECTIONS_PER_POINT: usize = 1000;

/// Number of trailing steps used for [`IbrOutcome::MaxIterNoConvergence`]'s
/// tail contraction ratio.
pub const TAIL_WINDOW: usize = 10;

/// Stopping rules of the iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IbrConfig<T> {
    pub max_iter: usize,
    /// Stop when `|α_i − α_{i−1}|` drops below this (and `ȳ` has settled).
    pub alpha_tol: T,
    /// `α ≥ 1 − tau_one` counts as `α = 1`.
    pub tau_one: T,
    /// Stop once `‖ȳ_i − ζ‖` exceeds this.
    pub divergence_norm: T,
    /// Relative bound on `‖ȳ_i − ȳ_{i−1}‖ / (1 + ‖ȳ_i‖)` required alongside
    /// the `α` test.
    pub y_bar_tol: T,
}

impl<T: Scalar> Default for IbrConfig<T> {
    fn default() -> Self {
        IbrConfig {
            max_iter: 100,
            alpha_tol: T::lit(1e-9),
            tau_one: T::lit(1e-9),
            divergence_norm: T::lit(1e12),
            y_bar_tol: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> IbrConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: T| x > T::zero() && x < T::one();
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if !unit(self.alpha_tol) {
            return Err(Error::InvalidConfig("alpha_tol must lie in (0, 1)".into()));
        }
        if !unit(self.tau_one) {
            return Err(Error::InvalidConfig("tau_one must lie in (0, 1)".into()));
        }
        if !(self.divergence_norm > T::zero()) {
            return Err(Error::InvalidConfig(
                "divergence_norm must be positive".into(),
            ));
        }
        if !(self.y_bar_tol > T::zero()) {
            return Err(Error::InvalidConfig("y_bar_tol must be positive".into()));
        }
        Ok(())
    }
}

/// One round: the sensor's weight and the attacker's reply. The reply is
/// absent when the weight saturated and the loop exited.
#[derive(Clone, Debug, PartialEq)]
pub struct IbrStep<T> {
    pub alpha: FusionWeight<T>,
    pub y_bar: Option<Vector<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    ConvergedZero,
    ConvergedMixed,
    ExitAlphaOne,
    TrivialInit,
    Diverged,
    MaxIterNoConvergence,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::ConvergedZero => "ConvergedZero",
            OutcomeKind::ConvergedMixed => "ConvergedMixed",
            OutcomeKind::ExitAlphaOne => "ExitAlphaOne",
            OutcomeKind::TrivialInit => "TrivialInit",
            OutcomeKind::Diverged => "Diverged",
            OutcomeKind::MaxIterNoConvergence => "MaxIterNoConvergence",
        }
    }
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq)]
pub enum IbrOutcome<T> {
    /// `α* = 0`, `ȳ* = y_A`.
    ConvergedZero {
        y_bar_star: Vector<T>,
    },
    ConvergedMixed {
        alpha_star: FusionWeight<T>,
        y_bar_star: Vector<T>,
    },
    /// `α` saturated after the first round.
    ExitAlphaOne,
    /// `α₁` saturated: `ȳ₀` was not a non-trivial initial condition.
    TrivialInit,
    Diverged,
    /// The iteration cap was hit. `tail_ratio` is the geometric mean
    /// contraction of `‖ȳ_i − ȳ_{i−1}‖` over the last [`TAIL_WINDOW`] steps,
    /// when enough steps exist.
    MaxIterNoConvergence {
        tail_ratio: Option<T>,
    },
}

impl<T: Scalar> IbrOutcome<T> {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            IbrOutcome::ConvergedZero { .. } => OutcomeKind::ConvergedZero,
            IbrOutcome::ConvergedMixed { .. } => OutcomeKind::ConvergedMixed,
            IbrOutcome::ExitAlphaOne => OutcomeKind::ExitAlphaOne,
            IbrOutcome::TrivialInit => OutcomeKind::TrivialInit,
            IbrOutcome::Diverged => OutcomeKind::Diverged,
            IbrOutcome::MaxIterNoConvergence { .. } => OutcomeKind::MaxIterNoConvergence,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(
            self,
            IbrOutcome::ConvergedZero { .. } | IbrOutcome::ConvergedMixed { .. }
        )
    }

    pub fn alpha_star(&self) -> Option<FusionWeight<T>> {
        match self {
            IbrOutcome::ConvergedZero { .. } => Some(FusionWeight::zero()),
            IbrOutcome::ConvergedMixed { alpha_star, .. } => Some(*alpha_star),
            _ => None,
        }
    }

    pub fn y_bar_star(&self) -> Option<&Vector<T>> {
        match self {
            IbrOutcome::ConvergedZero { y_bar_star }
            | IbrOutcome::ConvergedMixed { y_bar_star, .. } => Some(y_bar_star),
            _ => None,
        }
    }

    pub fn tail_ratio(&self) -> Option<T> {
        match self {
            IbrOutcome::MaxIterNoConvergence { tail_ratio } => *tail_ratio,
            _ => None,
        }
    }
}

/// Full record of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct IbrTrace<T> {
    initial_y_bar: Vector<T>,
    steps: Vec<IbrStep<T>>,
    outcome: IbrOutcome<T>,
}

impl<T: Scalar> IbrTrace<T> {
    pub fn initial_y_bar(&self) -> &Vector<T> {
        &self.initial_y_bar
    }

    pub fn steps(&self) -> &[IbrStep<T>] {
        &self.steps
    }

    pub fn outcome(&self) -> &IbrOutcome<T> {
        &self.outcome
    }

    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    pub fn last_alpha(&self) -> FusionWeight<T> {
        self.steps
            .last()
            .expect("trace has at least one step")
            .alpha
    }

    /// The computer output the step's sensor response was computed against.
    pub fn y_bar_before(&self, step: usize) -> Option<&Vector<T>> {
        if step == 0 {
            Some(&self.initial_y_bar)
        } else {
            self.steps.get(step - 1).and_then(|s| s.y_bar.as_ref())
        }
    }
}

/// Runs iterated best response from `y_bar_0`.
pub fn ibr_run<T: Scalar>(
    p: &GameParams<T>,
    y_bar_0: &Vector<T>,
    cfg: &IbrConfig<T>,
) -> Result<IbrTrace<T>> {
    cfg.validate()?;
    y_bar_0.check_dim(p.dim())?;
    if !y_bar_0.is_finite() {
        return Err(Error::NonFinite {
            index: y_bar_0.iter().position(|c| !c.is_finite()).unwrap_or(0),
        });
    }

    let mut steps = Vec::with_capacity(cfg.max_iter.min(1024));
    let mut moves: Vec<T> = Vec::with_capacity(cfg.max_iter.min(1024));
    let mut prev_y = y_bar_0.clone();
    let mut prev_alpha: Option<T> = None;
    let saturation = T::one() - cfg.tau_one;

    for i in 1..=cfg.max_iter {
        let alpha = p.best_response_sensor(&prev_y);
        if alpha.value() >= saturation {
            steps.push(IbrStep { alpha, y_bar: None });
            let outcome = if i == 1 {
                IbrOutcome::TrivialInit
            } else {
                IbrOutcome::ExitAlphaOne
            };
            return Ok(finish(y_bar_0, steps, outcome));
        }

        let y = p.best_response_attacker(alpha, cfg.tau_one)?;
        let spread = (&y - p.zeta()).norm();
        steps.push(IbrStep {
            alpha,
            y_bar: Some(y.clone()),
        });
        if !(spread <= cfg.divergence_norm) {
            return Ok(finish(y_bar_0, steps, IbrOutcome::Diverged));
        }

        let moved = y.distance(&prev_y);
        moves.push(moved);
        if let Some(prev) = prev_alpha {
            let settled = (alpha.value() - prev).abs() < cfg.alpha_tol
                && moved <= cfg.y_bar_tol * (T::one() + y.norm());
            if settled {
                let outcome = if alpha.value() == T::zero() {
                    IbrOutcome::ConvergedZero { y_bar_star: y }
                } else {
                    IbrOutcome::ConvergedMixed {
                        alpha_star: alpha,
                        y_bar_star: y,
                    }
                };
                return Ok(finish(y_bar_0, steps, outcome));
            }
        }
        prev_alpha = Some(alpha.value());
        prev_y = y;
    }

    let outcome = IbrOutcome::MaxIterNoConvergence {
        tail_ratio: tail_ratio(&moves),
    };
    Ok(finish(y_bar_0, steps, outcome))
}

fn finish<T: Scalar>(
    y_bar_0: &Vector<T>,
    steps: Vec<IbrStep<T>>,
    outcome: IbrOutcome<T>,
) -> IbrTrace<T> {
    IbrTrace {
        initial_y_bar: y_bar_0.clone(),
        steps,
        outcome,
    }
}

fn tail_ratio<T: Scalar>(moves: &[T]) -> Option<T> {
    if moves.len() <= TAIL_WINDOW {
        return None;
    }
    let last = moves[moves.len() - 1];
    let earlier = moves[moves.len() - 1 - TAIL_WINDOW];
    if earlier == T::zero() {
        return Some(T::zero());
    }
    Some((last / earlier).powf(T::lit(1.0 / TAIL_WINDOW as f64)))
}

/// Whether `ȳ₀` avoids an immediate `α = 1` exit.
pub fn is_nontrivial_init<T: Scalar>(p: &GameParams<T>, y_bar_0: &Vector<T>, tau_one: T) -> bool {
    p.best_response_sensor(y_bar_0).value() < T::one() - tau_one
}

/// `count` non-trivial initial conditions drawn uniformly from the ball of
/// the given radius around `μ`, reproducible from `seed`.
pub fn sample_initial_conditions<T: Scalar>(
    p: &GameParams<T>,
    count: usize,
    radius: T,
    seed: u64,
    tau_one: T,
) -> Result<Vec<Vector<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_initial_conditions_with_rng(p, count, radius, tau_one, &mut rng)
}

/// As [`sample_initial_conditions`], drawing from a caller-supplied generator.
pub fn sample_initial_conditions_with_rng<T: Scalar, R: Rng + ?Sized>(
    p: &GameParams<T>,
    count: usize,
    radius: T,
    tau_one: T,
    rng: &mut R,
) -> Result<Vec<Vector<T>>> {
    if count == 0 {
        return Err(Error::InvalidConfig("init_count must be positive".into()));
    }
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::InvalidConfig("init_radius must be positive".into()));
    }
    let k = p.dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut rejections = 0;
        loop {
            let candidate = offset_point(p.mu(), radius, &unit_ball(rng, k));
            if is_nontrivial_init(p, &candidate, tau_one) {
                out.push(candidate);
                break;
            }
            rejections += 1;
            if rejections >= MAX_REJECTIONS_PER_POINT {
                return Err(Error::SamplingExhausted { rejections });
            }
        }
    }
    Ok(out)
}
