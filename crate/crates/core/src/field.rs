//! Points and tensor fields on a single chart.
//!
//! Every field is a pure closure over chart coordinates taking [`Dual`]
//! arguments, so the same evaluator serves plain evaluation, forward-mode
//! differentiation and finite differences.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Scalar};
use crate::error::{GeometryError, Result};
use crate::linalg::{self, Mat};

/// A point of a `2n+1`-dimensional chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let dim = coords.len();
        if dim < 3 || dim.is_multiple_of(2) {
            return Err(GeometryError::BadDimension(dim));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(GeometryError::NonFiniteCoordinate(i));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `n` in `dim = 2n + 1`.
    pub fn half_rank(&self) -> usize {
        self.0.len() / 2
    }

    pub fn lift(&self) -> Vec<Dual> {
        linalg::lift(&self.0)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = GeometryError;
    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// Axis-aligned box of chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(GeometryError::InvalidParameter("empty domain box".into()));
        }
        Ok(DomainBox { lower, upper })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        DomainBox {
            lower: vec![lo; dim],
            upper: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p
                .coords()
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| l <= x && x <= u)
    }

    /// Uniform sample inside the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let coords = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| l + (u - l) * rng.random::<f64>())
            .collect();
        Point(coords)
    }
}

fn all_finite(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}

macro_rules! field_type {
    ($(#[$doc:meta])* $name:ident, $out:ty) => {
        $(#[$doc])*
        #[derive(Clone)]
        pub struct $name {
            dim: usize,
            f: Arc<dyn Fn(&[Dual]) -> $out + Send + Sync>,
        }

        impl $name {
            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn eval(&self, q: &[Dual]) -> $out {
                debug_assert_eq!(q.len(), self.dim);
                (self.f)(q)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "(dim = {})"), self.dim)
            }
        }
    };
}

field_type!(
    /// A smooth function on the chart.
    ScalarField,
    Dual
);
field_type!(
    /// A vector field, components in the coordinate basis.
    VectorField,
    Vec<Dual>
);
field_type!(
    /// A one-form, components in the coordinate coframe.
    OneForm,
    Vec<Dual>
);
field_type!(
    /// A two-form as an antisymmetric matrix `ω_ij = ω(∂_i, ∂_j)`.
    TwoForm,
    Mat<Dual>
);
field_type!(
    /// A field of endomorphisms of the tangent bundle.
    EndoField,
    Mat<Dual>
);

impl ScalarField {
    pub fn new(dim: usize, f: impl Fn(&[Dual]) -> Dual + Send + Sync + 'static) -> Self {
        ScalarField { dim, f: Arc::new(f) }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::new(dim, move |_| Dual::constant(value))
    }

    pub fn at(&self, p: &Point) -> Result<f64> {
        let v = self.eval(&p.lift()).value();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeometryError::NonFinite("scalar field"))
        }
    }
}

impl VectorField {
    pub fn new(dim: usize, f: impl Fn(&[Dual]) -> Vec<Dual> + Send + Sync + 'static) -> Self {
        VectorField { dim, f: Arc::new(f) }
    }

    /// Field with constant chart components.
    pub fn constant(v: &[f64]) -> Self {
        let v: Vec<Dual> = linalg::lift(v);
        Self::new(v.len(), move |_| v.clone())
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        Self::constant(&linalg::basis::<f64>(dim, i))
    }

    /// `f · self`
    pub fn scaled_by(&self, f: &ScalarField) -> Self {
        let (x, f) = (self.clone(), f.clone());
        Self::new(self.dim, move |q| linalg::scale(&x.eval(q), f.eval(q)))
    }

    /// `self + other`
    pub fn plus(&self, other: &VectorField) -> Self {
        let (x, y) = (self.clone(), other.clone());
        Self::new(self.dim, move |q| linalg::add(&x.eval(q), &y.eval(q)))
    }

    /// Pointwise image under an endomorphism field.
    pub fn mapped_by(&self, a: &EndoField) -> Self {
        let (x, a) = (self.clone(), a.clone());
        Self::new(self.dim, move |q| a.eval(q).matvec(&x.eval(q)))
    }

    pub fn at(&self, p: &Point) -> Result<Vec<f64>> {
        let v = linalg::values(&self.eval(&p.lift()));
        if all_finite(&v) {
            Ok(v)
        } else {
            Err(GeometryError::NonFinite("vector field"))
        }
    }
}

impl OneForm {
    pub fn new(dim: usize, f: impl Fn(&[Dual]) -> Vec<Dual> + Send + Sync + 'static) -> Self {
        OneForm { dim, f: Arc::new(f) }
    }

    /// `α(X)` as a scalar field.
    pub fn pair(&self, x: &VectorField) -> ScalarField {
        let (a, x) = (self.clone(), x.clone());
        ScalarField::new(self.dim, move |q| linalg::dot(&a.eval(q), &x.eval(q)))
    }

    /// `a · self`
    pub fn scaled(&self, a: f64) -> Self {
        let alpha = self.clone();
        Self::new(self.dim, move |q| linalg::scale(&alpha.eval(q), Dual::constant(a)))
    }

    pub fn at(&self, p: &Point) -> Result<Vec<f64>> {
        let v = linalg::values(&self.eval(&p.lift()));
        if all_finite(&v) {
            Ok(v)
        } else {
            Err(GeometryError::NonFinite("one-form"))
        }
    }
}

impl TwoForm {
    /// The closure's output is antisymmetrised, so values are exactly antisymmetric.
    pub fn new(dim: usize, f: impl Fn(&[Dual]) -> Mat<Dual> + Send + Sync + 'static) -> Self {
        TwoForm {
            dim,
            f: Arc::new(move |q| {
                let m = f(q);
                Mat::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] - m[(j, i)]) * 0.5)
            }),
        }
    }

    pub fn at(&self, p: &Point) -> Result<Mat<f64>> {
        let m = self.eval(&p.lift()).values();
        if all_finite(m.entries()) {
            Ok(m)
        } else {
            Err(GeometryError::NonFinite("two-form"))
        }
    }
}

impl EndoField {
    pub fn new(dim: usize, f: impl Fn(&[Dual]) -> Mat<Dual> + Send + Sync + 'static) -> Self {
        EndoField { dim, f: Arc::new(f) }
    }

    pub fn constant(m: &Mat<f64>) -> Self {
        let m: Mat<Dual> = m.lift();
        Self::new(m.rows(), move |_| m.clone())
    }

    pub fn at(&self, p: &Point) -> Result<Mat<f64>> {
        let m = self.eval(&p.lift()).values();
        if all_finite(m.entries()) {
            Ok(m)
        } else {
            Err(GeometryError::NonFinite("endomorphism field"))
        }
    }
}
