//! The fusion game: parameters, both players' costs and best responses.
//!
//! The sensor fuses its private estimate `ŷ` with the computer's output `ȳ`
//! as `α ŷ + (1 − α) ȳ`. Its cost is the expected squared distance to the
//! true output (conditional mean `μ`); the attacker's cost is the expected
//! squared distance of the fused value to its target `y_A` (with `ŷ` having
//! mean `ζ` from the attacker's point of view).

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{project_onto_affine_hull, Vector};
use crate::scalar::Scalar;

/// Parameters of one game instance.
#[derive(Clone, Debug, PartialEq)]
pub struct GameParams<T> {
    y_hat: Vector<T>,
    mu: Vector<T>,
    zeta: Vector<T>,
    y_attack: Vector<T>,
    var_y: Option<T>,
    var_yhat: Option<T>,
}

impl<T: Scalar> GameParams<T> {
    /// `y_hat`: sensor estimate; `mu`: sensor-side mean of the true output;
    /// `zeta`: attacker-side mean of `y_hat`; `y_attack`: attacker target.
    pub fn new(
        y_hat: Vector<T>,
        mu: Vector<T>,
        zeta: Vector<T>,
        y_attack: Vector<T>,
    ) -> Result<Self> {
        let k = y_hat.dim();
        mu.check_dim(k)?;
        zeta.check_dim(k)?;
        y_attack.check_dim(k)?;
        Ok(GameParams {
            y_hat,
            mu,
            zeta,
            y_attack,
            var_y: None,
            var_yhat: None,
        })
    }

    /// Attaches the second-moment constants `E‖y‖² − ‖μ‖²` and
    /// `E‖ŷ‖² − ‖ζ‖²`. They shift absolute cost values only.
    pub fn with_variances(mut self, var_y: Option<T>, var_yhat: Option<T>) -> Result<Self> {
        for (name, value) in [("var_y", var_y), ("var_yhat", var_yhat)] {
            if let Some(v) = value {
                if !(v >= T::zero()) || !v.is_finite() {
                    return Err(Error::NegativeVariance {
                        name,
                        value: v.as_f64(),
                    });
                }
            }
        }
        self.var_y = var_y;
        self.var_yhat = var_yhat;
        Ok(self)
    }

    pub fn with_attack(&self, y_attack: Vector<T>) -> Result<Self> {
        y_attack.check_dim(self.dim())?;
        Ok(GameParams {
            y_attack,
            ..self.clone()
        })
    }

    pub fn with_zeta(&self, zeta: Vector<T>) -> Result<Self> {
        zeta.check_dim(self.dim())?;
        Ok(GameParams {
            zeta,
            ..self.clone()
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.y_hat.dim()
    }

    pub fn y_hat(&self) -> &Vector<T> {
        &self.y_hat
    }

    pub fn mu(&self) -> &Vector<T> {
        &self.mu
    }

    pub fn zeta(&self) -> &Vector<T> {
        &self.zeta
    }

    pub fn y_attack(&self) -> &Vector<T> {
        &self.y_attack
    }

    pub fn var_y(&self) -> Option<T> {
        self.var_y
    }

    pub fn var_yhat(&self) -> Option<T> {
        self.var_yhat
    }

    /// Orthogonal projection of `μ` onto the plane through `ŷ`, `ζ`, `y_A`
    /// (or the lower-dimensional hull when those points are dependent).
    pub fn mu_hat(&self) -> Vector<T> {
        project_onto_affine_hull(&self.mu, &[&self.y_hat, &self.zeta, &self.y_attack])
    }

    /// Sensor cost `J_D(α, ȳ) = ‖α(ŷ − ȳ) + ȳ − μ‖² + var_y`.
    pub fn cost_defender(&self, alpha: FusionWeight<T>, y_bar: &Vector<T>) -> T {
        let fused = fuse(alpha, &self.y_hat, y_bar);
        (&fused - &self.mu).norm_sq() + self.var_y.unwrap_or_else(T::zero)
    }

    /// Attacker cost `J_A(α, ȳ) = ‖(1 − α)ȳ + αζ − y_A‖² + α² var_yhat`.
    pub fn cost_attacker(&self, alpha: FusionWeight<T>, y_bar: &Vector<T>) -> T {
        let a = alpha.value();
        let expected_fused = y_bar.scaled(T::one() - a).add_scaled(a, &self.zeta);
        (&expected_fused - &self.y_attack).norm_sq() + a * a * self.var_yhat.unwrap_or_else(T::zero)
    }

    /// Sensor best response `α*(ȳ)` against the computer output `ȳ`.
    pub fn best_response_sensor(&self, y_bar: &Vector<T>) -> FusionWeight<T> {
        sensor_response(&self.y_hat, &self.mu, y_bar).1
    }

    /// Same response computed with `μ̂` in place of `μ`. Agrees with
    /// [`Self::best_response_sensor`] for `ȳ` in the plane of `ŷ`, `ζ`, `y_A`.
    pub fn best_response_sensor_projected(&self, y_bar: &Vector<T>) -> FusionWeight<T> {
        sensor_response(&self.y_hat, &self.mu_hat(), y_bar).1
    }

    /// Attacker best response `ȳ*(α) = (y_A − αζ) / (1 − α)`.
    ///
    /// The response is unconstrained at `α = 1`; any `α ≥ 1 − tau_one` is
    /// rejected with [`Error::AlphaSaturated`].
    pub fn best_response_attacker(&self, alpha: FusionWeight<T>, tau_one: T) -> Result<Vector<T>> {
        let a = alpha.value();
        if a >= T::one() - tau_one {
            return Err(Error::AlphaSaturated(a.as_f64()));
        }
        let inv = (T::one() - a).recip();
        let numerator = self.y_attack.add_scaled(-a, &self.zeta);
        Ok(numerator.scaled(inv))
    }

    pub fn classify_region(&self, y_bar: &Vector<T>) -> RegionLabel {
        sensor_response(&self.y_hat, &self.mu, y_bar).0
    }
}

/// Sensor fusion weight `α ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct FusionWeight<T>(T);

impl<T: Scalar> FusionWeight<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha >= T::zero() && alpha <= T::one() {
            Ok(FusionWeight(alpha))
        } else {
            Err(Error::AlphaOutOfRange(alpha.as_f64()))
        }
    }

    pub fn zero() -> Self {
        FusionWeight(T::zero())
    }

    pub fn one() -> Self {
        FusionWeight(T::one())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// Clamps into `[0, 1]`; NaN maps to 0.
    pub(crate) fn clamped(alpha: T) -> Self {
        if alpha.is_nan() {
            FusionWeight(T::zero())
        } else {
            FusionWeight(alpha.max(T::zero()).min(T::one()))
        }
    }
}

impl<T: fmt::Display> fmt::Display for FusionWeight<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which branch of the sensor best response a computer output falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// `α* = 0`: the sensor uses the computer output as is.
    TrustComputer,
    /// `α* ∈ (0, 1)`.
    Mixed,
    /// `α* = 1`: the sensor discards the computer output.
    TrustSelf,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::TrustComputer => "TrustComputer",
            RegionLabel::Mixed => "Mixed",
            RegionLabel::TrustSelf => "TrustSelf",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `α ŷ + (1 − α) ȳ`
pub fn fuse<T: Scalar>(alpha: FusionWeight<T>, y_hat: &Vector<T>, y_bar: &Vector<T>) -> Vector<T> {
    let a = alpha.value();
    y_bar.add_scaled(a, &(y_hat - y_bar))
}

/// Three-case sensor response against `ȳ` using `mean` as the conditional
/// mean. The `α = 0` condition is checked first, then `α = 1`, so boundary
/// ties (including `ȳ = ŷ`) resolve to the earlier case.
pub(crate) fn sensor_response<T: Scalar>(
    y_hat: &Vector<T>,
    mean: &Vector<T>,
    y_bar: &Vector<T>,
) -> (RegionLabel, FusionWeight<T>) {
    let bar_minus_mean = y_bar - mean;
    let hat_minus_bar = y_hat - y_bar;
    if bar_minus_mean.dot(&hat_minus_bar) >= T::zero() {
        return (RegionLabel::TrustComputer, FusionWeight::zero());
    }
    let hat_minus_mean = y_hat - mean;
    // (ŷ − μ)ᵀ(ȳ − ŷ)
    if -hat_minus_mean.dot(&hat_minus_bar) >= T::zero() {
        return (RegionLabel::TrustSelf, FusionWeight::one());
    }
    // (ȳ − μ)ᵀ(ȳ − ŷ) / ‖ȳ − ŷ‖²
    let alpha = -bar_minus_mean.dot(&hat_minus_bar) / hat_minus_bar.norm_sq();
    (RegionLabel::Mixed, FusionWeight::clamped(alpha))
}
