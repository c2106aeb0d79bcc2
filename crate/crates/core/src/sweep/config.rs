use serde::{Deserialize, Serialize};

use crate::convergence::{ZetaSet, ZetaShape};
use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::geometry::Vector;
use crate::ibr::IbrConfig;

/// Quantifier over initial conditions used to call a grid point convergent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Some run converges.
    #[default]
    Weak,
    /// Every run converges.
    Strong,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Weak => "weak",
            Mode::Strong => "strong",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Mode::Weak),
            "strong" => Ok(Mode::Strong),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

/// How runs that hit the iteration cap are counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapPolicy {
    /// Converged if the tail contraction ratio is below one.
    #[default]
    Extrapolate,
    /// Never converged.
    Strict,
}

/// Sampled attacker-side means for the union/intersection regions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaSetConfig {
    pub radii: Vec<f64>,
    #[serde(default = "default_zeta_samples")]
    pub sample_count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub shape: ZetaShapeConfig,
    /// Defaults to `mu`.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZetaShapeConfig {
    #[default]
    Ball,
    Circle,
}

impl From<ZetaShapeConfig> for ZetaShape {
    fn from(s: ZetaShapeConfig) -> Self {
        match s {
            ZetaShapeConfig::Ball => ZetaShape::Ball,
            ZetaShapeConfig::Circle => ZetaShape::Circle,
        }
    }
}

/// A value shared by both grid axes, or one per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerAxis {
    Same(f64),
    Each([f64; 2]),
}

impl PerAxis {
    fn axis(self, i: usize) -> f64 {
        match self {
            PerAxis::Same(x) => x,
            PerAxis::Each(xs) => xs[i],
        }
    }
}

/// Experiment description read from a JSON file. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub y_hat: Vec<f64>,
    pub mu: Vec<f64>,
    /// Defaults to `mu`.
    #[serde(default)]
    pub zeta: Option<Vec<f64>>,
    /// Attacker target for `run` and `equilibria`.
    #[serde(default)]
    pub y_attack: Option<Vec<f64>>,
    /// Initial computer output for `run`.
    #[serde(default)]
    pub y_bar_0: Option<Vec<f64>>,
    #[serde(default)]
    pub var_y: Option<f64>,
    #[serde(default)]
    pub var_yhat: Option<f64>,

    #[serde(default = "default_grid_min")]
    pub grid_min: PerAxis,
    #[serde(default = "default_grid_max")]
    pub grid_max: PerAxis,
    #[serde(default = "default_grid_step")]
    pub grid_step: PerAxis,
    /// Coordinates 3..k of every grid target when `k > 2`; zeros if absent.
    #[serde(default)]
    pub y_attack_fixed: Option<Vec<f64>>,

    #[serde(default = "default_init_count")]
    pub init_count: usize,
    /// Defaults to `2‖ŷ − μ‖`.
    #[serde(default)]
    pub init_radius: Option<f64>,
    #[serde(default)]
    pub seed: u64,

    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub alpha_tol: f64,
    #[serde(default = "default_tol")]
    pub tau_one: f64,
    #[serde(default = "default_divergence_norm")]
    pub divergence_norm: f64,
    #[serde(default = "default_y_bar_tol")]
    pub y_bar_tol: f64,

    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub cap_policy: CapPolicy,
    #[serde(default = "default_slack_tol")]
    pub slack_tol: f64,

    #[serde(default)]
    pub zeta_set: Option<ZetaSetConfig>,
}

fn default_zeta_samples() -> usize {
    100
}
fn default_grid_min() -> PerAxis {
    PerAxis::Same(-1.0)
}
fn default_grid_max() -> PerAxis {
    PerAxis::Same(1.0)
}
fn default_grid_step() -> PerAxis {
    PerAxis::Same(0.05)
}
fn default_init_count() -> usize {
    20
}
fn default_max_iter() -> usize {
    100
}
fn default_tol() -> f64 {
    1e-9
}
fn default_divergence_norm() -> f64 {
    1e12
}
fn default_y_bar_tol() -> f64 {
    1e-6
}
fn default_slack_tol() -> f64 {
    1e-6
}

fn vector(name: &str, coords: &[f64]) -> Result<Vector<f64>> {
    Vector::from_slice(coords).map_err(|e| Error::InvalidConfig(format!("{name}: {e}")))
}

impl ExperimentConfig {
    /// A configuration with every optional field at its default.
    pub fn new(y_hat: Vec<f64>, mu: Vec<f64>) -> Self {
        serde_json::from_value(serde_json::json!({ "y_hat": y_hat, "mu": mu }))
            .expect("minimal config deserializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate().map_err(|e| match e {
            Error::InvalidConfig(_) => e,
            other => Error::InvalidConfig(other.to_string()),
        })?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn dim(&self) -> usize {
        self.y_hat.len()
    }

    pub fn validate(&self) -> Result<()> {
        let base = self.base_params()?;
        self.ibr_config().validate()?;
        let k = base.dim();
        for (name, v) in [("y_attack", &self.y_attack), ("y_bar_0", &self.y_bar_0)] {
            if let Some(v) = v {
                vector(name, v)?.check_dim(k)?;
            }
        }
        if self.init_count == 0 {
            return Err(Error::InvalidConfig("init_count must be positive".into()));
        }
        if let Some(r) = self.init_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidConfig("init_radius must be positive".into()));
            }
        }
        if !(self.slack_tol >= 0.0) || !self.slack_tol.is_finite() {
            return Err(Error::InvalidConfig("slack_tol must be nonnegative".into()));
        }
        for axis in 0..k.min(2) {
            let (lo, hi, step) = self.axis(axis);
            if !(step > 0.0) || !step.is_finite() {
                return Err(Error::InvalidConfig("grid_step must be positive".into()));
            }
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidConfig(
                    "grid_min must not exceed grid_max".into(),
                ));
            }
        }
        if k > 2 {
            let fixed = self.y_attack_fixed.as_ref().map_or(k - 2, Vec::len);
            if fixed != k - 2 {
                return Err(Error::InvalidConfig(format!(
                    "y_attack_fixed needs {} coordinates",
                    k - 2
                )));
            }
        }
        if let Some(z) = &self.zeta_set {
            if z.radii.is_empty() {
                return Err(Error::InvalidConfig("zeta_set.radii is empty".into()));
            }
            self.zeta_set()?;
        }
        Ok(())
    }

    /// Parameters with `y_A = μ` as a placeholder target.
    pub fn base_params(&self) -> Result<GameParams<f64>> {
        let y_hat = vector("y_hat", &self.y_hat)?;
        let mu = vector("mu", &self.mu)?;
        let zeta = match &self.zeta {
            Some(z) => vector("zeta", z)?,
            None => mu.clone(),
        };
        let p = GameParams::new(y_hat, mu.clone(), zeta, mu)?;
        p.with_variances(self.var_y, self.var_yhat)
    }

    /// Parameters with the configured `y_attack`.
    pub fn game_params(&self) -> Result<GameParams<f64>> {
        let base = self.base_params()?;
        let ya = self
            .y_attack
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("y_attack is required".into()))?;
        base.with_attack(vector("y_attack", ya)?)
    }

    pub fn y_bar_0(&self) -> Result<Vector<f64>> {
        let y0 = self
            .y_bar_0
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("y_bar_0 is required".into()))?;
        vector("y_bar_0", y0)
    }

    pub fn ibr_config(&self) -> IbrConfig<f64> {
        IbrConfig {
            max_iter: self.max_iter,
            alpha_tol: self.alpha_tol,
            tau_one: self.tau_one,
            divergence_norm: self.divergence_norm,
            y_bar_tol: self.y_bar_tol,
        }
    }

    pub fn init_radius(&self) -> f64 {
        self.init_radius.unwrap_or_else(|| {
            let d: f64 = self
                .y_hat
                .iter()
                .zip(&self.mu)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            2.0 * d.sqrt()
        })
    }

    fn axis(&self, i: usize) -> (f64, f64, f64) {
        (
            self.grid_min.axis(i),
            self.grid_max.axis(i),
            self.grid_step.axis(i),
        )
    }

    /// Grid values along one axis: `min + j·step` for
    /// `j = 0..=round((max − min)/step)`.
    pub fn axis_values(&self, i: usize) -> Vec<f64> {
        let (lo, hi, step) = self.axis(i);
        let n = ((hi - lo) / step).round() as usize + 1;
        (0..n).map(|j| lo + j as f64 * step).collect()
    }

    /// Attacker targets in row-major order (first coordinate outermost).
    pub fn grid(&self) -> Result<Vec<Vector<f64>>> {
        let k = self.dim();
        let tail: Vec<f64> = if k > 2 {
            self.y_attack_fixed
                .clone()
                .unwrap_or_else(|| vec![0.0; k - 2])
        } else {
            Vec::new()
        };
        let xs = self.axis_values(0);
        if k == 1 {
            return xs.into_iter().map(|x| vector("grid", &[x])).collect();
        }
        let ys = self.axis_values(1);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                let mut c = vec![x, y];
                c.extend_from_slice(&tail);
                out.push(vector("grid", &c)?);
            }
        }
        Ok(out)
    }

    /// The configured ζ-set at its first radius, plus the radius list.
    pub fn zeta_set(&self) -> Result<(ZetaSet<f64>, Vec<f64>)> {
        let z = self
            .zeta_set
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("zeta_set is required".into()))?;
        let center = match &z.center {
            Some(c) => vector("zeta_set.center", c)?,
            None => vector("mu", &self.mu)?,
        };
        center.check_dim(self.dim())?;
        let first = z.radii.first().copied().unwrap_or(0.0);
        let set = ZetaSet::new(center, first, z.sample_count, z.seed, z.shape.into())?;
        Ok((set, z.radii.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_grid() {
        let cfg = ExperimentConfig::from_json(r#"{"y_hat":[0.8,0],"mu":[0,0],"zeta":[0.3,-0.2]}"#)
            .unwrap();
        assert_eq!(cfg.init_count, 20);
        assert_eq!(cfg.max_iter, 100);
        assert_eq!(cfg.mode, Mode::Weak);
        assert_eq!(cfg.cap_policy, CapPolicy::Extrapolate);
        assert!((cfg.init_radius() - 1.6).abs() < 1e-15);
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.len(), 41 * 41);
        assert_eq!(grid[0].as_slice(), &[-1.0, -1.0]);
        assert_eq!(grid[1].as_slice(), &[-1.0, -0.95]);
        assert!((grid[41 * 41 - 1][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn per_axis_grid_and_higher_dimensions() {
        let cfg = ExperimentConfig::from_json(
            r#"{"y_hat":[1,0,0],"mu":[0,0,0],"grid_min":[-2,0],"grid_max":[2,0],"grid_step":0.5,"y_attack_fixed":[0.25]}"#,
        )
        .unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[0].as_slice(), &[-2.0, 0.0, 0.25]);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            r#"{"y_hat":[1,0],"mu":[0,0],"bogus":1}"#,
            r#"{"y_hat":[1,0],"mu":[0]}"#,
            r#"{"y_hat":[],"mu":[]}"#,
            r#"{"y_hat":[1,0],"mu":[0,0],"grid_step":0}"#,
            r#"{"y_hat":[1,0],"mu":[0,0],"mode":"sometimes"}"#,
            r#"{"y_hat":[1,0],"mu":[0,0],"var_y":-1}"#,
            r#"{"y_hat":[1,0],"mu":[0,0],"alpha_tol":2}"#,
            r#"{"y_hat":[1,0,0],"mu":[0,0,0],"y_attack_fixed":[1,2]}"#,
            r#"{"y_hat":[1,0],"mu":[0,0],"zeta_set":{"radii":[]}}"#,
            "not json",
        ] {
            assert!(
                matches!(
                    ExperimentConfig::from_json(text),
                    Err(Error::InvalidConfig(_))
                ),
                "{text}"
            );
        }
    }

    #[test]
    fn round_trips_through_json() {
        let mut cfg = ExperimentConfig::new(vec![1.0, 0.0], vec![0.0, 0.0]);
        cfg.mode = Mode::Strong;
        cfg.zeta_set = Some(ZetaSetConfig {
            radii: vec![0.0, 0.2],
            sample_count: 10,
            seed: 4,
            shape: ZetaShapeConfig::Circle,
            center: None,
        });
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
}
