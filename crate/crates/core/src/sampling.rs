//! Uniform sampling in balls and on spheres.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::Vector;
use crate::scalar::Scalar;

/// Uniform direction on the unit sphere in `R^dim`.
pub(crate) fn unit_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point in the closed unit ball of `R^dim`.
pub(crate) fn unit_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let u: f64 = rng.random();
    let r = u.powf(1.0 / dim as f64);
    unit_direction(rng, dim)
        .into_iter()
        .map(|x| x * r)
        .collect()
}

/// `center + radius * offset`, with `offset` given in `f64`.
pub(crate) fn offset_point<T: Scalar>(center: &Vector<T>, radius: T, offset: &[f64]) -> Vector<T> {
    let coords = center
        .iter()
        .zip(offset)
        .map(|(&c, &o)| c + radius * T::lit(o))
        .collect();
    Vector::from_raw(coords)
}
