//! Closed-form equilibria of the game and a brute-force Nash check.
//!
//! With `δ = ζ − μ`, `z_A = y_A − ζ` and `ẑ = ŷ − ζ`, a mixed equilibrium has
//! `ȳ* = ζ + r z_A` where `r` solves
//!
//! ```text
//! z_Aᵀ(ẑ + z_A + δ) r² − ẑᵀ(ẑ + 2z_A + δ) r + ẑᵀẑ = 0.
//! ```
//!
//! Real roots are only candidates: each is checked against both best
//! responses before it is reported.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{FusionWeight, GameParams};
use crate::geometry::Vector;
use crate::sampling::{offset_point, unit_ball};
use crate::scalar::{degeneracy_tol, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquilibriumKind {
    ZeroAlpha,
    Mixed,
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquilibriumKind::ZeroAlpha => "ZeroAlpha",
            EquilibriumKind::Mixed => "Mixed",
        })
    }
}

/// A strategy pair `(α*, ȳ*)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Equilibrium<T> {
    pub kind: EquilibriumKind,
    pub alpha_star: FusionWeight<T>,
    pub y_bar_star: Vector<T>,
    /// `ȳ* = ζ + r (y_A − ζ)` for mixed equilibria.
    pub r: Option<T>,
}

/// `(y_A − μ)ᵀ(ŷ − μ) − ‖y_A − μ‖²`; nonnegative iff `(0, y_A)` is an
/// equilibrium.
pub fn zero_equilibrium_slack<T: Scalar>(p: &GameParams<T>) -> T {
    let ya_mu = p.y_attack() - p.mu();
    ya_mu.dot(&(p.y_hat() - p.mu())) - ya_mu.norm_sq()
}

pub fn zero_equilibrium_exists<T: Scalar>(p: &GameParams<T>) -> bool {
    zero_equilibrium_slack(p) >= T::zero()
}

/// The `(0, y_A)` equilibrium, when it exists.
pub fn zero_equilibrium<T: Scalar>(p: &GameParams<T>) -> Option<Equilibrium<T>> {
    zero_equilibrium_exists(p).then(|| Equilibrium {
        kind: EquilibriumKind::ZeroAlpha,
        alpha_star: FusionWeight::zero(),
        y_bar_star: p.y_attack().clone(),
        r: None,
    })
}

/// Why a root of the quadratic was or was not accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CandidateVerdict {
    Accepted,
    /// The sensor's response to the candidate is not strictly inside `(0, 1)`.
    AlphaNotInterior,
    /// The attacker's response to that weight does not reproduce the candidate.
    NotFixedPoint,
}

impl fmt::Display for CandidateVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateVerdict::Accepted => "accepted",
            CandidateVerdict::AlphaNotInterior => "alpha not in (0, 1)",
            CandidateVerdict::NotFixedPoint => "not a best-response fixed point",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate<T> {
    pub r: T,
    pub y_bar: Vector<T>,
    pub alpha: FusionWeight<T>,
    pub verdict: CandidateVerdict,
}

/// The quadratic in `r`, its roots and the verdict on each.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedQuadratic<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub discriminant: T,
    /// The leading coefficient was negligible and the linear equation was
    /// solved instead.
    pub linear: bool,
    pub candidates: Vec<Candidate<T>>,
}

impl<T: Scalar> MixedQuadratic<T> {
    /// Builds and solves the quadratic, validating every real root.
    pub fn solve(p: &GameParams<T>, tau_one: T) -> Result<Self> {
        let delta = p.zeta() - p.mu();
        let z_a = p.y_attack() - p.zeta();
        let z_hat = p.y_hat() - p.zeta();
        let scale = p.y_hat().norm().max(p.zeta().norm());
        if z_hat.norm() <= degeneracy_tol(scale) {
            return Err(Error::DegenerateGame);
        }

        let a = z_a.dot(&(&(&z_hat + &z_a) + &delta));
        let b = -z_hat.dot(&(&(&z_hat + &z_a.scaled(T::lit(2.0))) + &delta));
        let c = z_hat.norm_sq();
        let discriminant = b * b - T::lit(4.0) * a * c;

        let a_scale = z_a.norm() * (z_hat.norm() + z_a.norm() + delta.norm());
        let linear = a.abs() <= degeneracy_tol(a_scale);
        let roots = if linear {
            if b == T::zero() {
                Vec::new()
            } else {
                vec![-c / b]
            }
        } else {
            stable_roots(a, b, c)
        };

        let candidates = roots
            .into_iter()
            .map(|r| validate(p, &z_a, r, tau_one))
            .collect();
        Ok(MixedQuadratic {
            a,
            b,
            c,
            discriminant,
            linear,
            candidates,
        })
    }

    /// Whether the discriminant condition for real roots holds.
    pub fn has_real_roots(&self) -> bool {
        if self.linear {
            self.b != T::zero()
        } else {
            self.discriminant >= T::zero()
        }
    }

    /// `a r² + b r + c` at `r`.
    pub fn evaluate(&self, r: T) -> T {
        (self.a * r + self.b) * r + self.c
    }

    pub fn equilibria(&self) -> Vec<Equilibrium<T>> {
        self.candidates
            .iter()
            .filter(|c| c.verdict == CandidateVerdict::Accepted)
            .map(|c| Equilibrium {
                kind: EquilibriumKind::Mixed,
                alpha_star: c.alpha,
                y_bar_star: c.y_bar.clone(),
                r: Some(c.r),
            })
            .collect()
    }
}

/// Real roots of `a r² + b r + c` without cancellation. A negative
/// discriminant within rounding of zero is treated as a double root.
fn stable_roots<T: Scalar>(a: T, b: T, c: T) -> Vec<T> {
    let mut disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        if -disc <= degeneracy_tol(b * b + (T::lit(4.0) * a * c).abs()) {
            disc = T::zero();
        } else {
            return Vec::new();
        }
    }
    let sign = if b >= T::zero() { T::one() } else { -T::one() };
    let q = -(b + sign * disc.sqrt()) / T::lit(2.0);
    if q == T::zero() {
        // b = 0 and disc = 0 force c = 0.
        return vec![T::zero()];
    }
    let r1 = q / a;
    let r2 = c / q;
    if r1 == r2 {
        vec![r1]
    } else {
        vec![r1, r2]
    }
}

/// Absolute tolerance for the attacker fixed-point residual and for cost
/// comparisons in [`verify_nash`].
fn fixed_point_tol<T: Scalar>() -> T {
    T::lit(1e-8).max(T::check_tol())
}

fn validate<T: Scalar>(p: &GameParams<T>, z_a: &Vector<T>, r: T, tau_one: T) -> Candidate<T> {
    let y_bar = p.zeta().add_scaled(r, z_a);
    let alpha = p.best_response_sensor(&y_bar);
    let a = alpha.value();
    let verdict = if !(a > tau_one && a < T::one() - tau_one) {
        CandidateVerdict::AlphaNotInterior
    } else {
        match p.best_response_attacker(alpha, tau_one) {
            Ok(back)
                if back.distance(&y_bar) < fixed_point_tol::<T>() * (T::one() + y_bar.norm()) =>
            {
                CandidateVerdict::Accepted
            }
            _ => CandidateVerdict::NotFixedPoint,
        }
    };
    Candidate {
        r,
        y_bar,
        alpha,
        verdict,
    }
}

/// Validated mixed equilibria. Fails with [`Error::DegenerateGame`] when
/// `ŷ = ζ`.
pub fn mixed_equilibria<T: Scalar>(p: &GameParams<T>, tau_one: T) -> Result<Vec<Equilibrium<T>>> {
    Ok(MixedQuadratic::solve(p, tau_one)?.equilibria())
}

/// Checks both Nash inequalities for `candidate`: the sensor cannot gain on
/// a uniform grid of `alpha_grid` weights in `[0, 1]`, and the attacker
/// cannot gain on `perturbations` seeded offsets `η` with
/// `‖η‖ ≤ 1 + ‖ȳ*‖`.
pub fn verify_nash<T: Scalar>(
    candidate: &Equilibrium<T>,
    p: &GameParams<T>,
    alpha_grid: usize,
    perturbations: usize,
    seed: u64,
) -> bool {
    if candidate.y_bar_star.dim() != p.dim() {
        return false;
    }
    let tol = fixed_point_tol::<T>();
    let y_star = &candidate.y_bar_star;
    let alpha_star = candidate.alpha_star;

    let sensor_cost = p.cost_defender(alpha_star, y_star);
    let steps = alpha_grid.max(2) - 1;
    for j in 0..=steps {
        let alpha = FusionWeight::clamped(T::lit(j as f64 / steps as f64));
        if sensor_cost > p.cost_defender(alpha, y_star) + tol {
            return false;
        }
    }

    let attacker_cost = p.cost_attacker(alpha_star, y_star);
    let radius = T::one() + y_star.norm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..perturbations {
        let moved = offset_point(y_star, radius, &unit_ball(&mut rng, p.dim()));
        if attacker_cost > p.cost_attacker(alpha_star, &moved) + tol {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ibr::{ibr_run, IbrConfig, IbrOutcome};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector<f64> {
        Vector::from_slice(c).unwrap()
    }

    fn params(y_hat: &[f64], mu: &[f64], zeta: &[f64], y_attack: &[f64]) -> GameParams<f64> {
        GameParams::new(v(y_hat), v(mu), v(zeta), v(y_attack)).unwrap()
    }

    #[test]
    fn zero_equilibrium_examples() {
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]);
        assert!(zero_equilibrium_exists(&p));
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.4, 0.0]);
        assert!(zero_equilibrium_exists(&p));
        assert_abs_diff_eq!(zero_equilibrium_slack(&p), 0.4 - 0.16, epsilon = 1e-15);
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[2.0, 0.0]);
        assert!(!zero_equilibrium_exists(&p));
        assert_eq!(zero_equilibrium(&p), None);
    }

    #[test]
    fn scalar_worked_instance() {
        let p = params(&[1.0], &[0.0], &[0.0], &[-0.2]);
        let q = MixedQuadratic::solve(&p, 1e-9).unwrap();
        assert_abs_diff_eq!(q.a, -0.16, epsilon = 1e-15);
        assert_abs_diff_eq!(q.b, -0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(q.c, 1.0, epsilon = 1e-15);
        let mut roots: Vec<f64> = q.candidates.iter().map(|c| c.r).collect();
        roots.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(roots[0], -5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(roots[1], 1.25, epsilon = 1e-12);

        let eqs = q.equilibria();
        assert_eq!(eqs.len(), 1);
        assert_abs_diff_eq!(eqs[0].alpha_star.value(), 0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(eqs[0].y_bar_star[0], -0.25, epsilon = 1e-9);
        assert!(verify_nash(&eqs[0], &p, 1001, 200, 1));

        let rejected = q.candidates.iter().find(|c| c.r < 0.0).unwrap();
        assert_abs_diff_eq!(rejected.y_bar[0], 1.0, epsilon = 1e-12);
        assert_ne!(rejected.verdict, CandidateVerdict::Accepted);
    }

    #[test]
    fn scalar_roots_without_valid_equilibrium() {
        let p = params(&[1.0], &[0.0], &[0.0], &[0.5]);
        let q = MixedQuadratic::solve(&p, 1e-9).unwrap();
        let mut roots: Vec<f64> = q.candidates.iter().map(|c| c.r).collect();
        roots.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(roots[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(roots[1], 2.0, epsilon = 1e-12);
        assert!(q.has_real_roots());
        assert!(q.equilibria().is_empty());
        let third = q.candidates.iter().find(|c| c.r < 1.0).unwrap();
        assert_eq!(third.alpha.value(), 0.0);
        assert_eq!(third.verdict, CandidateVerdict::AlphaNotInterior);
        assert!(zero_equilibrium_exists(&p));
    }

    #[test]
    fn negative_discriminant_gives_nothing() {
        // In one dimension with ζ = μ the discriminant is identically ẑ⁴, so
        // the scan runs over a perpendicular target.
        for s in [-2.0, -0.8, -0.51, 0.51, 0.75, 3.0] {
            let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, s]);
            let q = MixedQuadratic::solve(&p, 1e-9).unwrap();
            assert_abs_diff_eq!(q.discriminant, 1.0 - 4.0 * s * s, epsilon = 1e-12);
            assert!(!q.has_real_roots());
            assert!(q.candidates.is_empty());
            assert!(mixed_equilibria(&p, 1e-9).unwrap().is_empty());
        }
    }

    #[test]
    fn degenerate_game() {
        let p = params(&[0.3, 0.3], &[0.0, 0.0], &[0.3, 0.3], &[1.0, 0.0]);
        assert_eq!(MixedQuadratic::solve(&p, 1e-9), Err(Error::DegenerateGame));
    }

    #[test]
    fn target_at_attacker_mean() {
        // z_A = 0: every candidate is ȳ = ζ, which is a fixed point of the
        // attacker's response for any α.
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.3, 0.4], &[0.3, 0.4]);
        let q = MixedQuadratic::solve(&p, 1e-9).unwrap();
        assert!(q.linear);
        for e in q.equilibria() {
            assert_eq!(e.y_bar_star, v(&[0.3, 0.4]));
            assert!(verify_nash(&e, &p, 1001, 200, 3));
        }
    }

    #[test]
    fn nash_oracle_rejects_corruption() {
        let p = params(&[1.0], &[0.0], &[0.0], &[-0.2]);
        let mut e = mixed_equilibria(&p, 1e-9).unwrap().remove(0);
        e.alpha_star = FusionWeight::new(e.alpha_star.value() + 0.1).unwrap();
        assert!(!verify_nash(&e, &p, 1001, 200, 1));

        let mut e = mixed_equilibria(&p, 1e-9).unwrap().remove(0);
        e.y_bar_star = v(&[-0.4]);
        assert!(!verify_nash(&e, &p, 1001, 200, 1));
    }

    #[test]
    fn zero_equilibrium_passes_oracle() {
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.4, 0.0]);
        let e = zero_equilibrium(&p).unwrap();
        assert!(verify_nash(&e, &p, 1001, 200, 5));
    }

    #[test]
    fn stable_roots_avoid_cancellation() {
        let roots = stable_roots(1.0, -1e8, 1.0);
        let small = roots.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(small, 1e-8, epsilon = 1e-20);
        assert_eq!(stable_roots(1.0, 0.0, 1.0), Vec::<f64>::new());
        assert_eq!(stable_roots(1.0, -2.0, 1.0), vec![1.0]);
    }

    fn draw(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, k), 5)
    }

    proptest! {
        #[test]
        fn equilibria_are_nash_and_roots_are_small(vs in prop::sample::select(vec![1usize, 2, 3, 5]).prop_flat_map(draw)) {
            let p = params(&vs[0], &vs[1], &vs[2], &vs[3]);
            let q = match MixedQuadratic::solve(&p, 1e-9) {
                Ok(q) => q,
                Err(_) => return Ok(()),
            };
            for cand in &q.candidates {
                let r = cand.r;
                let budget = (q.a.abs() + q.b.abs() + q.c.abs()) * r.abs().max(1.0).powi(2);
                prop_assert!(q.evaluate(r).abs() < 1e-8 * budget);
            }
            for e in q.equilibria() {
                prop_assert!(verify_nash(&e, &p, 1001, 200, 9));
            }
        }

        #[test]
        fn equal_means_coefficients(vs in (1usize..5).prop_flat_map(draw)) {
            let p = params(&vs[0], &vs[1], &vs[1], &vs[3]);
            if let Ok(q) = MixedQuadratic::solve(&p, 1e-9) {
                let z_a = p.y_attack() - p.zeta();
                let z_hat = p.y_hat() - p.zeta();
                prop_assert_eq!(q.a, z_a.dot(&(&z_hat + &z_a)));
                prop_assert_eq!(q.b, -z_hat.dot(&(&z_hat + &z_a.scaled(2.0))));
                prop_assert_eq!(q.c, z_hat.norm_sq());
            }
        }

        #[test]
        fn converged_runs_match_closed_form(vs in prop::sample::select(vec![1usize, 2, 3]).prop_flat_map(draw)) {
            let p = params(&vs[0], &vs[1], &vs[2], &vs[3]);
            let trace = ibr_run(&p, &v(&vs[4]), &IbrConfig::default()).unwrap();
            match trace.outcome() {
                IbrOutcome::ConvergedZero { .. } => prop_assert!(zero_equilibrium_slack(&p) >= -1e-9),
                IbrOutcome::ConvergedMixed { alpha_star, y_bar_star } => {
                    let eqs = mixed_equilibria(&p, 1e-9).unwrap();
                    let hit = eqs.iter().any(|e| {
                        (e.alpha_star.value() - alpha_star.value()).abs() < 1e-6
                            && e.y_bar_star.distance(y_bar_star) < 1e-6 * (1.0 + y_bar_star.norm())
                    });
                    prop_assert!(hit, "run ended at ({}, {:?}); closed form {:?}", alpha_star, y_bar_star, eqs);
                }
                _ => {}
            }
        }
    }
}
