//! Directional derivatives in forward-mode or central-difference form.

use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Scalar, MAX_GENERATORS};
use crate::error::{GeometryError, Result};
use crate::field::{EndoField, OneForm, Point, ScalarField, VectorField};
use crate::linalg::{self, Mat};

pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Values that can be differentiated componentwise.
pub trait Tangent: Sized {
    fn map_duals(&self, f: &dyn Fn(Dual) -> Dual) -> Self;
    fn zip_duals(&self, other: &Self, f: &dyn Fn(Dual, Dual) -> Dual) -> Self;
}

impl Tangent for Dual {
    fn map_duals(&self, f: &dyn Fn(Dual) -> Dual) -> Self {
        f(*self)
    }
    fn zip_duals(&self, other: &Self, f: &dyn Fn(Dual, Dual) -> Dual) -> Self {
        f(*self, *other)
    }
}

impl<T: Tangent> Tangent for Vec<T> {
    fn map_duals(&self, f: &dyn Fn(Dual) -> Dual) -> Self {
        self.iter().map(|t| t.map_duals(f)).collect()
    }
    fn zip_duals(&self, other: &Self, f: &dyn Fn(Dual, Dual) -> Dual) -> Self {
        self.iter().zip(other).map(|(a, b)| a.zip_duals(b, f)).collect()
    }
}

impl Tangent for Mat<Dual> {
    fn map_duals(&self, f: &dyn Fn(Dual) -> Dual) -> Self {
        self.map(f)
    }
    fn zip_duals(&self, other: &Self, f: &dyn Fn(Dual, Dual) -> Dual) -> Self {
        let mut out = self.clone();
        for (o, b) in out.entries_mut().iter_mut().zip(other.entries()) {
            *o = f(*o, *b);
        }
        out
    }
}

impl<A: Tangent, B: Tangent> Tangent for (A, B) {
    fn map_duals(&self, f: &dyn Fn(Dual) -> Dual) -> Self {
        (self.0.map_duals(f), self.1.map_duals(f))
    }
    fn zip_duals(&self, other: &Self, f: &dyn Fn(Dual, Dual) -> Dual) -> Self {
        (self.0.zip_duals(&other.0, f), self.1.zip_duals(&other.1, f))
    }
}

fn generator_mask(v: &[Dual]) -> u8 {
    v.iter().fold(0, |m, d| m | d.generators())
}

/// How derivatives are taken.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
#[derive(Default)]
pub enum DiffEngine {
    /// Nested forward-mode dual numbers, exact to rounding.
    #[default]
    Forward,
    /// Central differences `(f(q + hv) − f(q − hv)) / 2h`.
    CentralDifference { step: f64 },
}


impl DiffEngine {
    pub fn central_difference(step: f64) -> Result<Self> {
        if step > 0.0 && step.is_finite() {
            Ok(DiffEngine::CentralDifference { step })
        } else {
            Err(GeometryError::InvalidParameter(format!(
                "finite-difference step must be positive, got {step}"
            )))
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DiffEngine::Forward => "ad",
            DiffEngine::CentralDifference { .. } => "fd",
        }
    }

    /// `d/dt f(q + t v)` at `t = 0`.
    ///
    /// In forward mode the lowest generator unused by `q` and `v` carries
    /// the perturbation, so calls nest freely up to [`MAX_GENERATORS`] deep.
    pub fn derivative<T: Tangent>(&self, f: impl Fn(&[Dual]) -> T, q: &[Dual], v: &[Dual]) -> T {
        assert_eq!(q.len(), v.len(), "direction has the wrong dimension");
        match *self {
            DiffEngine::Forward => {
                let used = generator_mask(q) | generator_mask(v);
                let g = (0..MAX_GENERATORS as u8)
                    .find(|g| used & (1 << g) == 0)
                    .unwrap_or_else(|| panic!("derivatives nested deeper than {MAX_GENERATORS}"));
                let eps = Dual::generator(g);
                let shifted: Vec<Dual> = q.iter().zip(v).map(|(&a, &b)| a + b * eps).collect();
                f(&shifted).map_duals(&|d| d.derivative_part(g))
            }
            DiffEngine::CentralDifference { step } => {
                let h = Dual::constant(step);
                let plus: Vec<Dual> = q.iter().zip(v).map(|(&a, &b)| a + b * h).collect();
                let minus: Vec<Dual> = q.iter().zip(v).map(|(&a, &b)| a - b * h).collect();
                let scale = 0.5 / step;
                f(&plus).zip_duals(&f(&minus), &|a, b| (a - b) * scale)
            }
        }
    }

    /// All partials `∂_k f`, `k = 0..dim`.
    pub fn partials<T: Tangent>(&self, f: impl Fn(&[Dual]) -> T, q: &[Dual]) -> Vec<T> {
        let dim = q.len();
        (0..dim)
            .map(|k| self.derivative(&f, q, &linalg::basis(dim, k)))
            .collect()
    }

    /// `DX` with `DX[(i, k)] = ∂_k X^i`.
    pub fn jacobian_at(&self, x: &VectorField, q: &[Dual]) -> Mat<Dual> {
        Mat::from_columns(&self.partials(|r| x.eval(r), q))
    }

    /// `[X, Y] = DY·X − DX·Y`
    pub fn lie_bracket_at(&self, x: &VectorField, y: &VectorField, q: &[Dual]) -> Vec<Dual> {
        let xq = x.eval(q);
        let yq = y.eval(q);
        let dy_x = self.derivative(|r| y.eval(r), q, &xq);
        let dx_y = self.derivative(|r| x.eval(r), q, &yq);
        linalg::sub(&dy_x, &dx_y)
    }

    /// `(dα)_ij = ∂_i α_j − ∂_j α_i`
    pub fn exterior_derivative_at(&self, alpha: &OneForm, q: &[Dual]) -> Mat<Dual> {
        let d = self.partials(|r| alpha.eval(r), q);
        let dim = q.len();
        Mat::from_fn(dim, dim, |i, j| d[i][j] - d[j][i])
    }

    /// `Y ↦ [X, AY] − A[X, Y]`, assembled column by column with constant `Y`.
    pub fn lie_derivative_endo_at(&self, x: &VectorField, a: &EndoField, q: &[Dual]) -> Mat<Dual> {
        let dim = q.len();
        let aq = a.eval(q);
        let columns: Vec<Vec<Dual>> = (0..dim)
            .map(|j| {
                let y = VectorField::coordinate(dim, j);
                let ay = y.mapped_by(a);
                let first = self.lie_bracket_at(x, &ay, q);
                let second = aq.matvec(&self.lie_bracket_at(x, &y, q));
                linalg::sub(&first, &second)
            })
            .collect();
        Mat::from_columns(&columns)
    }

    pub fn directional_derivative(&self, f: &ScalarField, p: &Point, v: &[f64]) -> Result<f64> {
        check_dim(p, v.len())?;
        let d = self.derivative(|r| f.eval(r), &p.lift(), &linalg::lift(v)).value();
        finite(d, "directional derivative")
    }

    pub fn lie_bracket(&self, x: &VectorField, y: &VectorField, p: &Point) -> Result<Vec<f64>> {
        check_dim(p, x.dim())?;
        check_dim(p, y.dim())?;
        finite_vec(linalg::values(&self.lie_bracket_at(x, y, &p.lift())), "Lie bracket")
    }

    pub fn exterior_derivative(&self, alpha: &OneForm, p: &Point) -> Result<Mat<f64>> {
        check_dim(p, alpha.dim())?;
        finite_mat(self.exterior_derivative_at(alpha, &p.lift()).values(), "exterior derivative")
    }

    pub fn lie_derivative_endo(&self, x: &VectorField, a: &EndoField, p: &Point) -> Result<Mat<f64>> {
        check_dim(p, x.dim())?;
        check_dim(p, a.dim())?;
        finite_mat(self.lie_derivative_endo_at(x, a, &p.lift()).values(), "Lie derivative")
    }
}

fn check_dim(p: &Point, got: usize) -> Result<()> {
    if p.dim() == got {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch {
            expected: p.dim(),
            got,
        })
    }
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GeometryError::NonFinite(what))
    }
}

fn finite_vec(v: Vec<f64>, what: &'static str) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(GeometryError::NonFinite(what))
    }
}

fn finite_mat(m: Mat<f64>, what: &'static str) -> Result<Mat<f64>> {
    if m.entries().iter().all(|x| x.is_finite()) {
        Ok(m)
    } else {
        Err(GeometryError::NonFinite(what))
    }
}
