//! Analytic convergence conditions for iterated best response.
//!
//! * The mismatch assumption `‖ζ − μ‖ ≤ ε/(1+ε) ‖ŷ − μ‖` and the two
//!   geometric bounds built on it.
//! * Necessary conditions for weak convergence (some initial condition
//!   converges), sufficient conditions for strong convergence (all do).
//! * Their specializations for `ζ = μ`.
//! * Union and intersection of those regions over a sampled set of `ζ`.
//!
//! Every inequality is reported with a signed slack that is nonnegative
//! (positive for strict inequalities) exactly when the inequality holds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{GameParams, RegionLabel};
use crate::geometry::{projection_norm, HalfPlane, Side, Vector};
use crate::sampling::{offset_point, unit_ball, unit_direction};
use crate::scalar::{degeneracy_tol, Scalar};

/// Mismatch budget `ε ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct MismatchBudget<T>(T);

impl<T: Scalar> MismatchBudget<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if epsilon >= T::zero() && epsilon <= T::one() {
            Ok(MismatchBudget(epsilon))
        } else {
            Err(Error::BudgetOutOfRange(epsilon.as_f64()))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// `‖ζ − μ‖ ≤ ε/(1+ε) ‖ŷ − μ‖`
pub fn assumption1_holds<T: Scalar>(p: &GameParams<T>, eps: MismatchBudget<T>) -> bool {
    let e = eps.value();
    (p.zeta() - p.mu()).norm() <= e / (T::one() + e) * (p.y_hat() - p.mu()).norm()
}

/// Smallest `ε` for which the mismatch assumption holds, or `None` when no
/// finite `ε` suffices (`‖ζ − μ‖ ≥ ‖ŷ − μ‖ > 0`).
pub fn required_epsilon<T: Scalar>(p: &GameParams<T>) -> Option<T> {
    let d = (p.zeta() - p.mu()).norm();
    let h = (p.y_hat() - p.mu()).norm();
    if d == T::zero() {
        Some(T::zero())
    } else if h > d {
        Some(d / (h - d))
    } else {
        None
    }
}

/// `‖ζ − μ̂‖ ≤ ε ‖ŷ − μ̂‖`, which must hold whenever the mismatch assumption
/// does. A relative slack of [`Scalar::check_tol`] absorbs rounding.
pub fn lemma1_bound_check<T: Scalar>(p: &GameParams<T>, eps: MismatchBudget<T>) -> Result<bool> {
    if !assumption1_holds(p, eps) {
        return Err(Error::PreconditionViolated(
            "mismatch assumption does not hold",
        ));
    }
    let mu_hat = p.mu_hat();
    let lhs = (p.zeta() - &mu_hat).norm();
    let rhs = eps.value() * (p.y_hat() - &mu_hat).norm();
    Ok(lhs <= rhs + T::check_tol() * (T::one() + rhs))
}

/// Both sides of the projection bound for a computer output `ȳ`, when `ȳ`
/// meets its hypotheses: the sensor's response to `ȳ` is mixed and `ȳ` lies
/// in the closed half-plane bounded by the line through `ŷ` and `y_A` away
/// from `μ̂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionBound<T> {
    /// `‖Proj(ŷ − μ̂, y_A − ŷ)‖`
    pub bound: T,
    /// `‖Proj(ŷ − μ̂, ȳ − ŷ)‖`
    pub value: T,
}

impl<T: Scalar> ProjectionBound<T> {
    pub fn holds(&self, tol: T) -> bool {
        self.value <= self.bound + tol
    }
}

/// Evaluates the projection bound at `ȳ`, or `None` if the hypotheses fail.
/// `ȳ` is assumed to lie in the plane of `ŷ`, `ζ`, `y_A`.
pub fn projection_bound<T: Scalar>(
    p: &GameParams<T>,
    y_bar: &Vector<T>,
) -> Option<ProjectionBound<T>> {
    if p.classify_region(y_bar) != RegionLabel::Mixed {
        return None;
    }
    let mu_hat = p.mu_hat();
    let psi = HalfPlane::new(p.y_hat().clone(), p.y_attack().clone(), mu_hat.clone()).ok()?;
    if psi.side(y_bar) == Side::Inside {
        return None;
    }
    let x = p.y_hat() - &mu_hat;
    let bound = projection_norm(&x, &(p.y_attack() - p.y_hat())).ok()?;
    let value = projection_norm(&x, &(y_bar - p.y_hat())).ok()?;
    Some(ProjectionBound { bound, value })
}

/// Necessary conditions for weak convergence.
#[derive(Clone, Debug, PartialEq)]
pub struct NecessaryReport<T> {
    /// Convergence to `α* = 0` is possible.
    pub zero_case: bool,
    pub weak_case: bool,
    /// `None` when `ŷ = y_A` leaves the half-plane undefined.
    pub mixed_case: Option<bool>,
    /// `zero_case || (weak_case && mixed_case)`
    pub weak_necessary: bool,
    /// Side of `ζ` relative to the half-plane through `ŷ`, `y_A` that contains
    /// `μ̂`.
    pub zeta_side: Option<Side>,
    /// `(y_A − μ̂)ᵀ(ŷ − y_A)`
    pub slack_zero: T,
    /// `−(ŷ − μ̂)ᵀ(y_A − ŷ)`; the condition is strict.
    pub slack_weak: T,
    /// Branch bound minus `‖y_A − ζ‖`.
    pub slack_mixed: Option<T>,
}

impl<T: Scalar> NecessaryReport<T> {
    /// Rebuilds the booleans from the slacks.
    pub fn from_slacks(
        slack_zero: T,
        slack_weak: T,
        slack_mixed: Option<T>,
        zeta_side: Option<Side>,
    ) -> Self {
        let zero_case = slack_zero >= T::zero();
        let weak_case = slack_weak > T::zero();
        let mixed_case = slack_mixed.map(|s| s >= T::zero());
        NecessaryReport {
            zero_case,
            weak_case,
            mixed_case,
            weak_necessary: zero_case || (weak_case && mixed_case == Some(true)),
            zeta_side,
            slack_zero,
            slack_weak,
            slack_mixed,
        }
    }

    /// The composite with every inequality relaxed by `tol`.
    pub fn holds_within(&self, tol: T) -> bool {
        self.slack_zero >= -tol
            || (self.slack_weak > -tol && self.slack_mixed.is_some_and(|s| s >= -tol))
    }

    /// The composite with every inequality tightened by `tol`.
    pub fn holds_beyond(&self, tol: T) -> bool {
        self.slack_zero >= tol
            || (self.slack_weak > tol && self.slack_mixed.is_some_and(|s| s >= tol))
    }
}

/// Sufficient conditions for strong convergence.
#[derive(Clone, Debug, PartialEq)]
pub struct SufficientReport<T> {
    /// `(y_A − ζ)ᵀ(ŷ − μ̂) ≤ 0`; also necessary for strong convergence.
    pub suf1: bool,
    pub suf2: bool,
    pub strong_sufficient: bool,
    /// `−(y_A − ζ)ᵀ(ŷ − μ̂)`
    pub slack_suf1: T,
    /// `min(‖Proj(ŷ − μ̂, y_A − ζ)‖, ‖Proj(ŷ − μ̂, y_A − ŷ)‖) − ‖y_A − ζ‖`
    pub slack_suf2: T,
    /// `μ`, `y_A`, `ŷ` collinear; only set by the equal-means form.
    pub collinear: Option<bool>,
}

impl<T: Scalar> SufficientReport<T> {
    /// Rebuilds the booleans from the slacks.
    pub fn from_slacks(slack_suf1: T, slack_suf2: T, collinear: Option<bool>) -> Self {
        let suf1 = slack_suf1 >= T::zero();
        let suf2 = slack_suf2 >= T::zero();
        SufficientReport {
            suf1,
            suf2,
            strong_sufficient: suf1 && suf2,
            slack_suf1,
            slack_suf2,
            collinear,
        }
    }

    pub fn holds_within(&self, tol: T) -> bool {
        self.slack_suf1 >= -tol && self.slack_suf2 >= -tol
    }

    pub fn holds_beyond(&self, tol: T) -> bool {
        self.slack_suf1 >= tol && self.slack_suf2 >= tol
    }
}

/// Both reports for one parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct PredicateReport<T> {
    pub necessary: NecessaryReport<T>,
    pub sufficient: SufficientReport<T>,
    /// Evaluated with the `ζ = μ` specializations.
    pub equal_means: bool,
}

/// `‖Proj(x, dir)‖`, with a vanishing direction projecting to zero.
fn proj_len<T: Scalar>(x: &Vector<T>, dir: &Vector<T>) -> T {
    projection_norm(x, dir).unwrap_or_else(|_| T::zero())
}

/// Necessary conditions for weak convergence, evaluated with `μ̂`.
pub fn weak_necessary<T: Scalar>(p: &GameParams<T>) -> NecessaryReport<T> {
    let mu_hat = p.mu_hat();
    let y_hat = p.y_hat();
    let y_a = p.y_attack();
    let hat_minus_mu = y_hat - &mu_hat;
    let slack_zero = (y_a - &mu_hat).dot(&(y_hat - y_a));
    let slack_weak = -hat_minus_mu.dot(&(y_a - y_hat));

    let (slack_mixed, zeta_side) = match HalfPlane::new(y_hat.clone(), y_a.clone(), mu_hat.clone())
    {
        Ok(psi) => {
            let reach = (y_a - p.zeta()).norm();
            let inside = proj_len(&hat_minus_mu, &(y_hat - y_a)) - reach;
            let outside = hat_minus_mu.norm() - reach;
            let side = psi.side(p.zeta());
            let slack = match side {
                Side::Inside => inside,
                Side::Outside => outside,
                Side::Boundary => inside.max(outside),
            };
            (Some(slack), Some(side))
        }
        Err(_) => (None, None),
    };
    NecessaryReport::from_slacks(slack_zero, slack_weak, slack_mixed, zeta_side)
}

/// Sufficient conditions for strong convergence, evaluated with `μ̂`.
pub fn strong_sufficient<T: Scalar>(p: &GameParams<T>) -> SufficientReport<T> {
    let mu_hat = p.mu_hat();
    let hat_minus_mu = p.y_hat() - &mu_hat;
    let z_a = p.y_attack() - p.zeta();
    let slack_suf1 = -z_a.dot(&hat_minus_mu);

    let reach = z_a.norm();
    let toward_estimate = proj_len(&hat_minus_mu, &(p.y_attack() - p.y_hat()));
    let scale = p.y_attack().norm().max(p.zeta().norm());
    let bound = if reach <= degeneracy_tol(scale) {
        // y_A = ζ: the attacker's reply is constant and the left side is 0.
        toward_estimate
    } else {
        proj_len(&hat_minus_mu, &z_a).min(toward_estimate)
    };
    SufficientReport::from_slacks(slack_suf1, bound - reach, None)
}

fn require_equal_means<T: Scalar>(p: &GameParams<T>) -> Result<()> {
    if p.zeta() == p.mu() {
        Ok(())
    } else {
        Err(Error::ParamsMismatch)
    }
}

/// Necessary conditions for weak convergence when `ζ = μ`.
pub fn weak_necessary_equal_means<T: Scalar>(p: &GameParams<T>) -> Result<NecessaryReport<T>> {
    require_equal_means(p)?;
    let mu = p.mu();
    let y_hat = p.y_hat();
    let y_a = p.y_attack();
    let slack_zero = (y_a - mu).dot(&(y_hat - y_a));
    let slack_weak = -(y_hat - mu).dot(&(y_a - y_hat));
    let line = y_hat - y_a;
    let scale = y_hat.norm().max(y_a.norm());
    let slack_mixed = (line.norm() > degeneracy_tol(scale))
        .then(|| proj_len(&(y_hat - mu), &line) - (y_a - mu).norm());
    Ok(NecessaryReport::from_slacks(
        slack_zero,
        slack_weak,
        slack_mixed,
        None,
    ))
}

/// Sufficient conditions for strong convergence when `ζ = μ`.
pub fn strong_sufficient_equal_means<T: Scalar>(p: &GameParams<T>) -> Result<SufficientReport<T>> {
    require_equal_means(p)?;
    let mu = p.mu();
    let hat_minus_mu = p.y_hat() - mu;
    let ya_minus_mu = p.y_attack() - mu;
    let slack_suf1 = -ya_minus_mu.dot(&hat_minus_mu);
    let reach = ya_minus_mu.norm();
    let scale = p.y_attack().norm().max(mu.norm());
    let slack_suf2 = if reach <= degeneracy_tol(scale) {
        proj_len(&hat_minus_mu, &(p.y_attack() - p.y_hat()))
    } else {
        proj_len(&hat_minus_mu, &ya_minus_mu) - reach
    };
    Ok(SufficientReport::from_slacks(
        slack_suf1,
        slack_suf2,
        Some(collinear(mu, p.y_attack(), p.y_hat())),
    ))
}

/// Whether three points lie on one line, within the degeneracy tolerance.
pub fn collinear<T: Scalar>(a: &Vector<T>, b: &Vector<T>, c: &Vector<T>) -> bool {
    let u = b - a;
    let w = c - a;
    let scale = a.norm().max(b.norm()).max(c.norm()).max(T::one());
    // ‖u‖²‖w‖² − (u·w)² is the squared area of the parallelogram.
    let gram = u.norm_sq() * w.norm_sq() - u.dot(&w).powi(2);
    gram <= degeneracy_tol(scale.powi(4))
}

/// Both reports, using the equal-means forms when `ζ` and `μ` coincide.
pub fn evaluate_predicates<T: Scalar>(p: &GameParams<T>) -> PredicateReport<T> {
    if p.zeta() == p.mu() {
        PredicateReport {
            necessary: weak_necessary_equal_means(p).expect("means checked equal"),
            sufficient: strong_sufficient_equal_means(p).expect("means checked equal"),
            equal_means: true,
        }
    } else {
        PredicateReport {
            necessary: weak_necessary(p),
            sufficient: strong_sufficient(p),
            equal_means: false,
        }
    }
}

/// Where sampled `ζ` values are drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ZetaShape {
    /// Uniform in the closed ball.
    #[default]
    Ball,
    /// Uniform on the bounding sphere.
    Circle,
}

/// A sampled set of attacker-side means around `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaSet<T> {
    pub center: Vector<T>,
    pub radius: T,
    pub sample_count: usize,
    pub seed: u64,
    pub shape: ZetaShape,
}

impl<T: Scalar> ZetaSet<T> {
    pub fn new(
        center: Vector<T>,
        radius: T,
        sample_count: usize,
        seed: u64,
        shape: ZetaShape,
    ) -> Result<Self> {
        if !(radius >= T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidConfig(
                "zeta radius must be nonnegative".into(),
            ));
        }
        if sample_count == 0 {
            return Err(Error::InvalidConfig(
                "zeta sample_count must be positive".into(),
            ));
        }
        Ok(ZetaSet {
            center,
            radius,
            sample_count,
            seed,
            shape,
        })
    }

    /// Seeded offsets in the unit ball (or on the unit sphere); the same for
    /// every radius.
    pub fn unit_offsets(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let k = self.center.dim();
        (0..self.sample_count)
            .map(|_| match self.shape {
                ZetaShape::Ball => unit_ball(&mut rng, k),
                ZetaShape::Circle => unit_direction(&mut rng, k),
            })
            .collect()
    }

    /// The sampled means: the center alone at radius 0, otherwise the unit
    /// offsets scaled by the radius.
    pub fn samples(&self) -> Vec<Vector<T>> {
        if self.radius == T::zero() {
            return vec![self.center.clone()];
        }
        self.unit_offsets()
            .iter()
            .map(|o| offset_point(&self.center, self.radius, o))
            .collect()
    }

    /// Cumulative sample sets for several radii: the set for a radius holds
    /// the center and the scaled offsets of every radius not above it, so the
    /// sets are nested by construction and each stays inside its own ball.
    pub fn nested(&self, radii: &[T]) -> Result<Vec<Vec<Vector<T>>>> {
        if radii.iter().any(|r| !(*r >= T::zero()) || !r.is_finite()) {
            return Err(Error::InvalidConfig(
                "zeta radii must be nonnegative".into(),
            ));
        }
        let offsets = self.unit_offsets();
        let scaled = |r: T| -> Vec<Vector<T>> {
            if r == T::zero() {
                Vec::new()
            } else {
                offsets
                    .iter()
                    .map(|o| offset_point(&self.center, r, o))
                    .collect()
            }
        };
        Ok(radii
            .iter()
            .map(|&r| {
                let mut set = vec![self.center.clone()];
                let mut smaller: Vec<T> = radii.iter().copied().filter(|&s| s <= r).collect();
                smaller.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
                smaller.dedup();
                for s in smaller {
                    set.extend(scaled(s));
                }
                set
            })
            .collect())
    }
}

fn worst_epsilon<T: Scalar>(base: &GameParams<T>, zetas: &[Vector<T>]) -> Option<T> {
    zetas.iter().try_fold(T::zero(), |acc, z| {
        let p = base.with_zeta(z.clone()).ok()?;
        required_epsilon(&p).map(|e| acc.max(e))
    })
}

/// Union of the necessary regions over a finite set of `ζ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NecessaryRegion<T> {
    base: GameParams<T>,
    zetas: Vec<Vector<T>>,
}

impl<T: Scalar> NecessaryRegion<T> {
    pub fn new(base: GameParams<T>, zetas: Vec<Vector<T>>) -> Result<Self> {
        check_zetas(&base, &zetas)?;
        Ok(NecessaryRegion { base, zetas })
    }

    pub fn zetas(&self) -> &[Vector<T>] {
        &self.zetas
    }

    /// Whether some sampled `ζ` admits weak convergence toward `y_attack`.
    pub fn contains(&self, y_attack: &Vector<T>) -> Result<bool> {
        let p = self.base.with_attack(y_attack.clone())?;
        for z in &self.zetas {
            if weak_necessary(&p.with_zeta(z.clone())?).weak_necessary {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Largest mismatch budget any sample needs; `None` if some sample fits
    /// no budget.
    pub fn required_epsilon(&self) -> Option<T> {
        worst_epsilon(&self.base, &self.zetas)
    }
}

/// Intersection of the sufficient regions over a finite set of `ζ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SufficientRegion<T> {
    base: GameParams<T>,
    zetas: Vec<Vector<T>>,
}

impl<T: Scalar> SufficientRegion<T> {
    pub fn new(base: GameParams<T>, zetas: Vec<Vector<T>>) -> Result<Self> {
        check_zetas(&base, &zetas)?;
        Ok(SufficientRegion { base, zetas })
    }

    pub fn zetas(&self) -> &[Vector<T>] {
        &self.zetas
    }

    /// Whether every sampled `ζ` guarantees strong convergence toward
    /// `y_attack`.
    pub fn contains(&self, y_attack: &Vector<T>) -> Result<bool> {
        let p = self.base.with_attack(y_attack.clone())?;
        for z in &self.zetas {
            if !strong_sufficient(&p.with_zeta(z.clone())?).strong_sufficient {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn required_epsilon(&self) -> Option<T> {
        worst_epsilon(&self.base, &self.zetas)
    }
}

fn check_zetas<T: Scalar>(base: &GameParams<T>, zetas: &[Vector<T>]) -> Result<()> {
    if zetas.is_empty() {
        return Err(Error::InvalidConfig("zeta sample set is empty".into()));
    }
    zetas.iter().try_for_each(|z| z.check_dim(base.dim()))
}

/// Union region over the samples of `zset`. The `ζ` of `base` is ignored.
pub fn necessary_region_union<T: Scalar>(
    base: &GameParams<T>,
    zset: &ZetaSet<T>,
) -> Result<NecessaryRegion<T>> {
    NecessaryRegion::new(base.clone(), zset.samples())
}

/// Intersection region over the samples of `zset`. The `ζ` of `base` is
/// ignored.
pub fn sufficient_region_intersection<T: Scalar>(
    base: &GameParams<T>,
    zset: &ZetaSet<T>,
) -> Result<SufficientRegion<T>> {
    SufficientRegion::new(base.clone(), zset.samples())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector<f64> {
        Vector::from_slice(c).unwrap()
    }

    fn params(y_hat: &[f64], mu: &[f64], zeta: &[f64], y_attack: &[f64]) -> GameParams<f64> {
        GameParams::new(v(y_hat), v(mu), v(zeta), v(y_attack)).unwrap()
    }

    fn eps(e: f64) -> MismatchBudget<f64> {
        MismatchBudget::new(e).unwrap()
    }

    #[test]
    fn budget_range() {
        assert_eq!(MismatchBudget::new(1.5), Err(Error::BudgetOutOfRange(1.5)));
        assert!(MismatchBudget::new(-0.1).is_err());
        assert!(MismatchBudget::new(0.0).is_ok());
    }

    #[test]
    fn mismatch_assumption_examples() {
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.3, 0.3]);
        assert!(assumption1_holds(&p, eps(0.0)));
        assert!(assumption1_holds(&p, eps(1.0)));
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.6], &[0.3, 0.3]);
        assert!(!assumption1_holds(&p, eps(1.0)));
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.4], &[0.3, 0.3]);
        assert!(assumption1_holds(&p, eps(1.0)));
        assert_abs_diff_eq!(required_epsilon(&p).unwrap(), 0.4 / 0.6, epsilon = 1e-15);
    }

    #[test]
    fn mismatch_bound_examples() {
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.3, 0.3]);
        assert_eq!(lemma1_bound_check(&p, eps(0.5)), Ok(true));
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.4], &[0.3, 0.3]);
        assert_eq!(lemma1_bound_check(&p, eps(1.0)), Ok(true));
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.6], &[0.3, 0.3]);
        assert!(matches!(
            lemma1_bound_check(&p, eps(1.0)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn necessary_examples() {
        let r = weak_necessary(&params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]));
        assert!(r.zero_case && r.weak_necessary);
        assert_eq!(r.slack_zero, 0.0);

        let r = weak_necessary(&params(&[1.0], &[0.0], &[0.0], &[-0.2]));
        assert!(r.weak_case);
        assert_abs_diff_eq!(r.slack_weak, 1.2, epsilon = 1e-15);
        assert_eq!(r.mixed_case, Some(true));
        assert!(r.weak_necessary);

        let r = weak_necessary(&params(&[1.0, 0.0], &[0.0, 0.0], &[0.2, 0.0], &[1.0, 0.0]));
        assert_eq!(r.mixed_case, None);
        assert!(r.zero_case && r.weak_necessary);
    }

    #[test]
    fn necessary_branch_follows_zeta_side() {
        // Line through ŷ = (0.8, 0) and y_A = (0.8, 1) is x = 0.8; μ̂ = 0 is
        // on its left.
        let inside = weak_necessary(&params(&[0.8, 0.0], &[0.0, 0.0], &[0.3, -0.2], &[0.8, 1.0]));
        assert_eq!(inside.zeta_side, Some(Side::Inside));
        let expected = 0.0 - (0.5f64 * 0.5 + 1.2 * 1.2).sqrt();
        assert_abs_diff_eq!(inside.slack_mixed.unwrap(), expected, epsilon = 1e-15);

        let outside = weak_necessary(&params(&[0.8, 0.0], &[0.0, 0.0], &[1.0, 0.5], &[0.8, 1.0]));
        assert_eq!(outside.zeta_side, Some(Side::Outside));
        let expected = 0.8 - (0.2f64 * 0.2 + 0.5 * 0.5).sqrt();
        assert_abs_diff_eq!(outside.slack_mixed.unwrap(), expected, epsilon = 1e-15);

        // ζ on the line makes the anchors collinear, so μ̂ falls onto ŷ and
        // both branch bounds vanish.
        let boundary = weak_necessary(&params(&[0.8, 0.0], &[0.0, 0.0], &[0.8, 0.5], &[0.8, 1.0]));
        assert_eq!(boundary.zeta_side, Some(Side::Boundary));
        assert_abs_diff_eq!(boundary.slack_mixed.unwrap(), -0.5, epsilon = 1e-15);

        // μ̂ on the line: both closed sides qualify and the larger bound wins.
        let on_line = weak_necessary(&params(
            &[0.8, 0.0],
            &[0.0, 0.0],
            &[0.3, -0.2],
            &[-0.8, 0.0],
        ));
        assert_eq!(on_line.zeta_side, Some(Side::Boundary));
        assert_abs_diff_eq!(
            on_line.slack_mixed.unwrap(),
            0.8 - 1.25f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn sufficient_examples() {
        let r = strong_sufficient(&params(
            &[0.8, 0.0],
            &[0.0, 0.0],
            &[0.3, -0.2],
            &[0.3, -0.2],
        ));
        assert!(r.suf1 && r.suf2 && r.strong_sufficient);

        let r = strong_sufficient(&params(
            &[0.8, 0.0],
            &[0.0, 0.0],
            &[0.3, -0.2],
            &[0.25, -0.2],
        ));
        assert_abs_diff_eq!(r.slack_suf1, 0.04, epsilon = 1e-15);
        let p2 = 0.8 * 0.55 / (0.55f64 * 0.55 + 0.04).sqrt();
        assert_abs_diff_eq!(r.slack_suf2, p2.min(0.8) - 0.05, epsilon = 1e-15);
        assert!(r.strong_sufficient);

        let r = strong_sufficient(&params(&[1.0], &[0.0], &[0.0], &[-0.2]));
        assert!(r.suf1 && r.suf2);
        assert_abs_diff_eq!(r.slack_suf2, 0.8, epsilon = 1e-15);

        // y_A = ŷ ≠ ζ: the second projection vanishes.
        let r = strong_sufficient(&params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.5], &[1.0, 0.0]));
        assert!(!r.suf2);
    }

    #[test]
    fn equal_means_examples() {
        let r =
            weak_necessary_equal_means(&params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]))
                .unwrap();
        assert!(r.zero_case && r.weak_necessary);

        let r = weak_necessary_equal_means(&params(&[1.0], &[0.0], &[0.0], &[-2.0])).unwrap();
        assert!(r.weak_case);
        assert_abs_diff_eq!(r.slack_mixed.unwrap(), 1.0 - 2.0, epsilon = 1e-15);
        assert!(!r.weak_necessary);

        let s = strong_sufficient_equal_means(&params(&[1.0], &[0.0], &[0.0], &[-0.2])).unwrap();
        assert!(s.suf1 && s.suf2 && s.strong_sufficient);
        assert_eq!(s.collinear, Some(true));

        let s = strong_sufficient_equal_means(&params(
            &[1.0, 0.0],
            &[0.0, 0.0],
            &[0.0, 0.0],
            &[0.3, 0.2],
        ))
        .unwrap();
        assert!(!s.suf1 && !s.strong_sufficient);
        assert_eq!(s.collinear, Some(false));

        let mismatched = params(&[1.0], &[0.0], &[0.1], &[-0.2]);
        assert_eq!(
            weak_necessary_equal_means(&mismatched),
            Err(Error::ParamsMismatch)
        );
        assert_eq!(
            strong_sufficient_equal_means(&mismatched),
            Err(Error::ParamsMismatch)
        );
    }

    #[test]
    fn evaluate_picks_form() {
        assert!(evaluate_predicates(&params(&[1.0], &[0.0], &[0.0], &[-0.2])).equal_means);
        assert!(!evaluate_predicates(&params(&[1.0], &[0.0], &[0.1], &[-0.2])).equal_means);
    }

    #[test]
    fn scalar_projection_bound() {
        let p = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, -0.5]);
        let b = projection_bound(&p, &v(&[0.5, -1.0])).unwrap();
        assert!(b.holds(1e-9), "{b:?}");
        // Mixed, but on the same side as μ̂.
        assert_eq!(p.classify_region(&v(&[0.5, 1.0])), RegionLabel::Mixed);
        assert_eq!(projection_bound(&p, &v(&[0.5, 1.0])), None);
        // Opposite side, but not mixed.
        assert_eq!(projection_bound(&p, &v(&[0.2, -0.3])), None);
    }

    #[test]
    fn zeta_sets() {
        let z = ZetaSet::new(v(&[0.0, 0.0]), 0.0, 100, 3, ZetaShape::Ball).unwrap();
        assert_eq!(z.samples(), vec![v(&[0.0, 0.0])]);
        let z = ZetaSet { radius: 0.2, ..z };
        let s = z.samples();
        assert_eq!(s.len(), 100);
        assert!(s.iter().all(|p| p.norm() <= 0.2 + 1e-15));
        let c = ZetaSet {
            shape: ZetaShape::Circle,
            ..z.clone()
        };
        assert!(c.samples().iter().all(|p| (p.norm() - 0.2).abs() < 1e-12));

        let nested = z.nested(&[0.0, 0.2, 0.4]).unwrap();
        assert_eq!(nested[0].len(), 1);
        assert_eq!(nested[1].len(), 101);
        assert_eq!(nested[2].len(), 201);
        assert!(nested[1].iter().all(|q| nested[2].contains(q)));
        assert!(nested[2].iter().all(|p| p.norm() <= 0.4 + 1e-15));
        assert!(ZetaSet::new(v(&[0.0]), -1.0, 1, 0, ZetaShape::Ball).is_err());
        assert!(ZetaSet::new(v(&[0.0]), 1.0, 0, 0, ZetaShape::Ball).is_err());
    }

    #[test]
    fn singleton_regions_match_pointwise() {
        let base = params(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]);
        let z = ZetaSet::new(v(&[0.0, 0.0]), 0.0, 100, 1, ZetaShape::Ball).unwrap();
        let union = necessary_region_union(&base, &z).unwrap();
        let inter = sufficient_region_intersection(&base, &z).unwrap();
        assert_eq!(union.required_epsilon(), Some(0.0));
        for i in -10..=10 {
            for j in -10..=10 {
                let ya = v(&[i as f64 * 0.1, j as f64 * 0.1]);
                let p = base.with_attack(ya.clone()).unwrap();
                assert_eq!(
                    union.contains(&ya).unwrap(),
                    weak_necessary(&p).weak_necessary
                );
                assert_eq!(
                    inter.contains(&ya).unwrap(),
                    strong_sufficient(&p).strong_sufficient
                );
            }
        }
    }

    #[test]
    fn f32_predicates() {
        let p = GameParams::<f32>::new(
            Vector::from([1.0]),
            Vector::from([0.0]),
            Vector::from([0.0]),
            Vector::from([-0.2]),
        )
        .unwrap();
        let r = evaluate_predicates(&p);
        assert!(r.necessary.weak_necessary && r.sufficient.strong_sufficient);
    }

    fn draw(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, k), 4)
    }

    proptest! {
        #[test]
        fn composites_follow_slack_signs(vs in (1usize..5).prop_flat_map(draw)) {
            let p = params(&vs[0], &vs[1], &vs[2], &vs[3]);
            let n = weak_necessary(&p);
            prop_assert_eq!(n.weak_necessary, n.holds_within(0.0));
            prop_assert!(!n.holds_beyond(1e-6) || n.weak_necessary);
            prop_assert!(n.weak_necessary || !n.holds_beyond(0.0));
            let s = strong_sufficient(&p);
            prop_assert_eq!(s.strong_sufficient, s.holds_within(0.0));
            prop_assert!(!s.strong_sufficient || s.suf1);
        }

        #[test]
        fn equal_means_forms_agree(vs in (1usize..6).prop_flat_map(draw)) {
            let p = params(&vs[0], &vs[1], &vs[1], &vs[3]);
            let (g, c) = (weak_necessary(&p), weak_necessary_equal_means(&p).unwrap());
            prop_assert_eq!(g.weak_necessary, c.weak_necessary);
            prop_assert_eq!(g.zero_case, c.zero_case);
            prop_assert_eq!(g.weak_case, c.weak_case);
            let (g, c) = (strong_sufficient(&p), strong_sufficient_equal_means(&p).unwrap());
            prop_assert_eq!(g.strong_sufficient, c.strong_sufficient);
            prop_assert_eq!(g.suf1, c.suf1);
        }

        #[test]
        fn mismatch_bound_holds(vs in (2usize..6).prop_flat_map(draw), e in 0.0f64..=1.0, shrink in 0.0f64..=1.0) {
            let y_hat = v(&vs[0]);
            let mu = v(&vs[1]);
            // Place ζ inside the allowed ball around μ.
            let allowed = e / (1.0 + e) * (&y_hat - &mu).norm() * shrink;
            let dir = v(&vs[2]);
            let zeta = if dir.norm() > 1e-9 { mu.add_scaled(allowed / dir.norm(), &dir) } else { mu.clone() };
            let p = GameParams::new(y_hat, mu, zeta, v(&vs[3])).unwrap();
            if assumption1_holds(&p, eps(e)) {
                prop_assert_eq!(lemma1_bound_check(&p, eps(e)), Ok(true));
            }
        }
    }
}
