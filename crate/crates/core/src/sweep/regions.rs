use rayon::prelude::*;

use super::ExperimentConfig;
use crate::convergence::{NecessaryRegion, SufficientRegion};
use crate::error::Result;
use crate::geometry::Vector;

/// Region membership of one target at one radius.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionRow {
    pub radius: f64,
    pub y_attack: Vector<f64>,
    pub union_necessary: bool,
    pub intersection_sufficient: bool,
}

/// Largest mismatch budget the sampled means need, per radius.
pub type RequiredEpsilon = Vec<(f64, Option<f64>)>;

/// Evaluates the union and intersection regions on the grid for every
/// configured radius, radius-major. Also returns, per radius, the largest
/// mismatch budget the sampled means need.
pub fn run_regions(cfg: &ExperimentConfig) -> Result<(Vec<RegionRow>, RequiredEpsilon)> {
    cfg.validate()?;
    let base = cfg.base_params()?;
    let (zset, radii) = cfg.zeta_set()?;
    let grid = cfg.grid()?;
    let nested = zset.nested(&radii)?;

    let mut rows = Vec::with_capacity(radii.len() * grid.len());
    let mut eps = Vec::with_capacity(radii.len());
    for (&radius, zetas) in radii.iter().zip(nested) {
        let union = NecessaryRegion::new(base.clone(), zetas.clone())?;
        let inter = SufficientRegion::new(base.clone(), zetas)?;
        eps.push((radius, union.required_epsilon()));
        let block: Result<Vec<RegionRow>> = grid
            .par_iter()
            .map(|ya| {
                Ok(RegionRow {
                    radius,
                    y_attack: ya.clone(),
                    union_necessary: union.contains(ya)?,
                    intersection_sufficient: inter.contains(ya)?,
                })
            })
            .collect();
        rows.extend(block?);
    }
    Ok((rows, eps))
}
