//! Vector algebra used by the game: orthogonal projections, projection onto
//! the affine hull of a few anchor points, and closed half-plane membership.
//!
//! All points live in `R^k`. Half-plane tests assume the query point, the two
//! line points and the witness are coplanar; in the game this holds because
//! every point involved lies in the plane through `ŷ`, `ζ` and `y_A`.

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{degeneracy_tol, Scalar};

/// A finite point or direction in `R^k`, `k >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector(coords))
    }

    pub fn from_slice(coords: &[T]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be at least 1");
        Vector(vec![T::zero(); dim])
    }

    /// Builds a vector from values produced by arithmetic on valid vectors.
    /// Overflow to infinity is possible there and is left to the caller.
    pub(crate) fn from_raw(coords: Vec<T>) -> Self {
        debug_assert!(!coords.is_empty());
        Vector(coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(
            self.dim(),
            other.dim(),
            "dot product of mismatched dimensions"
        );
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    #[inline]
    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        (self - other).norm()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Vector(self.0.iter().map(|&c| c * factor).collect())
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, factor: T, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "axpy of mismatched dimensions");
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a + factor * b)
                .collect(),
        )
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }
}

impl<T: Scalar, const N: usize> From<[T; N]> for Vector<T> {
    /// Panics on an empty array or non-finite coordinates.
    fn from(coords: [T; N]) -> Self {
        Vector::new(coords.to_vec()).expect("valid vector literal")
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> Add for &Vector<T> {
    type Output = Vector<T>;

    fn add(self, rhs: &Vector<T>) -> Vector<T> {
        assert_eq!(self.dim(), rhs.dim(), "sum of mismatched dimensions");
        Vector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
    }
}

impl<T: Scalar> Sub for &Vector<T> {
    type Output = Vector<T>;

    fn sub(self, rhs: &Vector<T>) -> Vector<T> {
        assert_eq!(self.dim(), rhs.dim(), "difference of mismatched dimensions");
        Vector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
    }
}

impl<T: Scalar> Add for Vector<T> {
    type Output = Vector<T>;

    fn add(self, rhs: Vector<T>) -> Vector<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for Vector<T> {
    type Output = Vector<T>;

    fn sub(self, rhs: Vector<T>) -> Vector<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul<T> for &Vector<T> {
    type Output = Vector<T>;

    fn mul(self, rhs: T) -> Vector<T> {
        self.scaled(rhs)
    }
}

impl<T: Scalar> Mul<T> for Vector<T> {
    type Output = Vector<T>;

    fn mul(self, rhs: T) -> Vector<T> {
        self.scaled(rhs)
    }
}

impl<T: Scalar> Neg for &Vector<T> {
    type Output = Vector<T>;

    fn neg(self) -> Vector<T> {
        Vector(self.0.iter().map(|&c| -c).collect())
    }
}

fn direction_is_degenerate<T: Scalar>(direction_norm: T, scale: T) -> bool {
    direction_norm <= degeneracy_tol(scale)
}

/// Orthogonal projection of `x1` onto the line spanned by `x2`.
///
/// Fails with [`Error::DegenerateDirection`] when `x2` is zero relative to
/// the magnitude of the inputs.
pub fn project<T: Scalar>(x1: &Vector<T>, x2: &Vector<T>) -> Result<Vector<T>> {
    let coefficient = projection_coefficient(x1, x2)?;
    Ok(x2.scaled(coefficient))
}

/// Length of [`project`]`(x1, x2)`, computed as `|x1·x2| / ‖x2‖`.
pub fn projection_norm<T: Scalar>(x1: &Vector<T>, x2: &Vector<T>) -> Result<T> {
    let n2 = x2.norm();
    if direction_is_degenerate(n2, x1.norm().max(n2)) {
        return Err(Error::DegenerateDirection);
    }
    Ok(x1.dot(x2).abs() / n2)
}

fn projection_coefficient<T: Scalar>(x1: &Vector<T>, x2: &Vector<T>) -> Result<T> {
    let n2 = x2.norm();
    if direction_is_degenerate(n2, x1.norm().max(n2)) {
        return Err(Error::DegenerateDirection);
    }
    Ok(x1.dot(x2) / (n2 * n2))
}

/// Closest point to `p` in the affine hull of `anchors`.
///
/// The hull may be a point, a line, a plane or anything up to the whole
/// space; dependent anchors simply reduce its dimension. If `p` coincides
/// with one of the anchors it is returned unchanged, and when the hull spans
/// `R^k` the result is `p` itself.
///
/// # Panics
///
/// Panics if `anchors` is empty or the dimensions disagree.
pub fn project_onto_affine_hull<T: Scalar>(p: &Vector<T>, anchors: &[&Vector<T>]) -> Vector<T> {
    assert!(!anchors.is_empty(), "affine hull needs at least one anchor");
    let k = p.dim();
    for a in anchors {
        assert_eq!(a.dim(), k, "anchor dimension mismatch");
    }
    if anchors.contains(&p) {
        return p.clone();
    }

    let origin = anchors[0];
    let spread = anchors
        .iter()
        .map(|a| a.distance(origin))
        .fold(T::zero(), T::max);

    // Modified Gram-Schmidt with one re-orthogonalization pass.
    let mut basis: Vec<Vector<T>> = Vec::with_capacity(anchors.len().min(k));
    for a in &anchors[1..] {
        if basis.len() == k {
            break;
        }
        let mut v = *a - origin;
        let original = v.norm();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v = v.add_scaled(-c, q);
            }
        }
        let residual = v.norm();
        if residual > degeneracy_tol(original.max(spread)) && residual > T::zero() {
            basis.push(v.scaled(residual.recip()));
        }
    }

    if basis.len() == k {
        return p.clone();
    }
    let offset = p - origin;
    basis
        .iter()
        .fold(origin.clone(), |acc, q| acc.add_scaled(q.dot(&offset), q))
}

/// Position of a point relative to a [`HalfPlane`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Strictly on the witness side.
    Inside,
    /// On the bounding line, within tolerance.
    Boundary,
    /// Strictly on the far side.
    Outside,
}

/// Closed half-plane bounded by the line through two points, on the side of
/// a witness point.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPlane<T> {
    line_point_a: Vector<T>,
    line_point_b: Vector<T>,
    interior_witness: Vector<T>,
}

impl<T: Scalar> HalfPlane<T> {
    pub fn new(
        line_point_a: Vector<T>,
        line_point_b: Vector<T>,
        interior_witness: Vector<T>,
    ) -> Result<Self> {
        let k = line_point_a.dim();
        line_point_b.check_dim(k)?;
        interior_witness.check_dim(k)?;
        let d = &line_point_b - &line_point_a;
        let scale = line_point_a.norm().max(line_point_b.norm());
        if direction_is_degenerate(d.norm(), scale) {
            return Err(Error::DegenerateDirection);
        }
        Ok(HalfPlane {
            line_point_a,
            line_point_b,
            interior_witness,
        })
    }

    pub fn line_point_a(&self) -> &Vector<T> {
        &self.line_point_a
    }

    pub fn line_point_b(&self) -> &Vector<T> {
        &self.line_point_b
    }

    pub fn interior_witness(&self) -> &Vector<T> {
        &self.interior_witness
    }

    /// Component of `x - a` orthogonal to the bounding line, and the tolerance
    /// below which that component counts as zero.
    fn offset(&self, x: &Vector<T>) -> (Vector<T>, T) {
        let d = &self.line_point_b - &self.line_point_a;
        let rel = x - &self.line_point_a;
        let along = rel.dot(&d) / d.norm_sq();
        let perp = rel.add_scaled(-along, &d);
        let scale = rel.norm().max(d.norm());
        (perp, degeneracy_tol(scale))
    }

    /// Whether the witness itself lies on the bounding line, which leaves the
    /// side undetermined.
    pub fn witness_on_line(&self) -> bool {
        let (perp, tol) = self.offset(&self.interior_witness);
        perp.norm() <= tol
    }

    pub fn side(&self, q: &Vector<T>) -> Side {
        let (q_perp, q_tol) = self.offset(q);
        if q_perp.norm() <= q_tol {
            return Side::Boundary;
        }
        let (w_perp, w_tol) = self.offset(&self.interior_witness);
        if w_perp.norm() <= w_tol {
            // Witness on the line: both closed sides contain it.
            return Side::Boundary;
        }
        if q_perp.dot(&w_perp) >= T::zero() {
            Side::Inside
        } else {
            Side::Outside
        }
    }

    /// The complementary closed half-plane: witness reflected across the line.
    pub fn flipped(&self) -> Self {
        let (w_perp, _) = self.offset(&self.interior_witness);
        HalfPlane {
            line_point_a: self.line_point_a.clone(),
            line_point_b: self.line_point_b.clone(),
            interior_witness: self.interior_witness.add_scaled(-T::lit(2.0), &w_perp),
        }
    }
}

/// Closed half-plane membership; boundary points count as inside.
pub fn in_closed_half_plane<T: Scalar>(q: &Vector<T>, h: &HalfPlane<T>) -> bool {
    h.side(q) != Side::Outside
}
