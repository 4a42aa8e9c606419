//! Closed-form strict contactomorphisms `φ*λ = λ`.

use std::fmt;
use std::sync::Arc;

use crate::dual::{Dual, Scalar};
use crate::error::{GeometryError, Result};
use crate::field::Point;
use crate::linalg::{self, Mat};
use crate::triad::{ContactTriad, MapFn, MatrixFn};

/// Largest accepted `|φ*λ − λ|` at a sampled point.
pub const STRICTNESS_TOLERANCE: f64 = 1e-9;

#[derive(Clone)]
pub struct StrictContactMap {
    label: String,
    forward: MapFn,
    differential: MatrixFn,
}

impl fmt::Debug for StrictContactMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StrictContactMap").field("label", &self.label).finish_non_exhaustive()
    }
}

impl StrictContactMap {
    pub fn new(
        label: impl Into<String>,
        forward: impl Fn(&[Dual]) -> Vec<Dual> + Send + Sync + 'static,
        differential: impl Fn(&[Dual]) -> Mat<Dual> + Send + Sync + 'static,
    ) -> Self {
        StrictContactMap {
            label: label.into(),
            forward: Arc::new(forward),
            differential: Arc::new(differential),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn forward_at(&self, q: &[Dual]) -> Vec<Dual> {
        (self.forward)(q)
    }

    pub fn differential_at(&self, q: &[Dual]) -> Mat<Dual> {
        (self.differential)(q)
    }

    pub fn forward(&self, p: &Point) -> Result<Point> {
        Point::new(linalg::values(&self.forward_at(&p.lift())))
    }

    pub fn differential(&self, p: &Point) -> Mat<f64> {
        self.differential_at(&p.lift()).values()
    }

    /// `max_i |(φ*λ − λ)_i|` at `p`.
    pub fn strictness_residual(&self, triad: &ContactTriad, p: &Point) -> f64 {
        let q = p.lift();
        let pulled = self
            .differential_at(&q)
            .transpose()
            .matvec(&triad.lambda().eval(&self.forward_at(&q)));
        linalg::max_abs(&linalg::values(&linalg::sub(&pulled, &triad.lambda().eval(&q))))
    }

    pub fn verify_strict(&self, triad: &ContactTriad, p: &Point) -> Result<()> {
        let residual = self.strictness_residual(triad, p);
        if residual <= STRICTNESS_TOLERANCE {
            Ok(())
        } else {
            Err(GeometryError::NotStrict(residual))
        }
    }

    /// The triad `(λ, φ*J)`; `λ` is unchanged up to rounding since `φ` is strict.
    pub fn pull_back(&self, triad: &ContactTriad) -> ContactTriad {
        triad.pullback(self.forward.clone(), self.differential.clone())
    }
}

fn constant(v: f64) -> Dual {
    Dual::constant(v)
}

/// Translation by `t` along coordinate `axis`.
pub fn translation(dim: usize, axis: usize, t: f64) -> StrictContactMap {
    StrictContactMap::new(
        format!("translate-{axis}({t})"),
        move |q| {
            let mut out = q.to_vec();
            out[axis] = out[axis] + t;
            out
        },
        move |_| Mat::identity(dim),
    )
}

/// `(x_1, y_1, z) ↦ (x_1, y_1 + s, z + s x_1)` on `ℝ^{2n+1}` with `λ = dz − Σ y_i dx_i`.
pub fn heisenberg_shift(dim: usize, s: f64) -> StrictContactMap {
    let n = dim / 2;
    StrictContactMap::new(
        format!("heisenberg-shift({s})"),
        move |q| {
            let mut out = q.to_vec();
            out[n] = out[n] + s;
            out[2 * n] += q[0] * s;
            out
        },
        move |_| {
            let mut m = Mat::identity(dim);
            m[(2 * n, 0)] = constant(s);
            m
        },
    )
}

/// Time-`t` Reeb flow `(x + t cos z, y + t sin z, z)` of `λ = cos z dx + sin z dy`.
pub fn tight_reeb_flow(t: f64) -> StrictContactMap {
    StrictContactMap::new(
        format!("reeb-flow({t})"),
        move |q| vec![q[0] + q[2].cos() * t, q[1] + q[2].sin() * t, q[2]],
        move |q| {
            let (s, c) = (q[2].sin(), q[2].cos());
            let (one, zero) = (constant(1.0), constant(0.0));
            Mat::from_rows(&[vec![one, zero, -s * t], vec![zero, one, c * t], vec![zero, zero, one]])
        },
    )
}

/// Rotation of `(x, y)` by `s` combined with `z ↦ z + s`, preserving `cos z dx + sin z dy`.
pub fn tight_rotation(s: f64) -> StrictContactMap {
    let (sn, cs) = (s.sin(), s.cos());
    StrictContactMap::new(
        format!("rotation({s})"),
        move |q| vec![q[0] * cs - q[1] * sn, q[0] * sn + q[1] * cs, q[2] + s],
        move |_| {
            Mat::from_rows(&[vec![cs, -sn, 0.0], vec![sn, cs, 0.0], vec![0.0, 0.0, 1.0]]).lift()
        },
    )
}
