//! Per-point derivative data of a triad: Christoffel symbols, `∇^LC J`, `ℒ_{X_λ}J`.

use crate::dual::{Dual, Scalar};
use crate::engine::DiffEngine;
use crate::error::{GeometryError, Result};
use crate::field::Point;
use crate::linalg::{self, Mat};
use crate::triad::{ContactTriad, TriadValues};

#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub point: Vec<Dual>,
    pub engine: DiffEngine,
    pub values: TriadValues,
    /// `partials[k] = ∂_k` of every entry of [`TriadValues`].
    pub partials: Vec<TriadValues>,
    pub metric_inverse: Mat<Dual>,
    /// `christoffel[k][(i, j)] = Γ^i_{kj}`, so `∇^LC_{∂k} Y = ∂_k Y + christoffel[k]·Y`.
    pub christoffel: Vec<Mat<Dual>>,
    /// `nabla_j[k] = ∇^LC_{∂k} J`
    pub nabla_j: Vec<Mat<Dual>>,
    /// `(i, k) ↦ ∂_k X_λ^i`
    pub reeb_jacobian: Mat<Dual>,
    /// `ℒ_{X_λ} J`
    pub lie_reeb_j: Mat<Dual>,
}

fn combine(mats: &[Mat<Dual>], x: &[Dual]) -> Mat<Dual> {
    let mut out = Mat::zeros(mats[0].rows(), mats[0].cols());
    for (m, &xk) in mats.iter().zip(x) {
        if xk.value() == 0.0 && xk.generators() == 0 {
            continue;
        }
        out = out.add(&m.scale(xk));
    }
    out
}

fn all_finite_values(v: &TriadValues) -> bool {
    v.lambda.iter().chain(&v.reeb).all(|d| d.is_finite())
        && [&v.omega, &v.pi, &v.j, &v.metric]
            .iter()
            .all(|m| m.entries().iter().all(|d| d.is_finite()))
}

impl LocalGeometry {
    pub fn at(triad: &ContactTriad, p: &Point) -> Result<Self> {
        if p.dim() != triad.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: triad.dim(),
                got: p.dim(),
            });
        }
        Self::new(triad, &p.lift())
    }

    pub fn new(triad: &ContactTriad, q: &[Dual]) -> Result<Self> {
        let dim = triad.dim();
        let engine = triad.engine();
        let values = triad.values_at(q)?;
        let partials = engine.partials(|r| triad.values_or_nan(r), q);
        if !all_finite_values(&values) || !partials.iter().all(all_finite_values) {
            return Err(GeometryError::NonFinite("triad data"));
        }
        let metric_inverse = values.metric.inverse().ok_or(GeometryError::NonFinite("metric inverse"))?;

        let half = Dual::constant(0.5);
        let christoffel: Vec<Mat<Dual>> = (0..dim)
            .map(|k| {
                // lowered[(l, j)] = ½(∂_k g_jl + ∂_j g_kl − ∂_l g_kj)
                let lowered = Mat::from_fn(dim, dim, |l, j| {
                    (partials[k].metric[(j, l)] + partials[j].metric[(k, l)] - partials[l].metric[(k, j)]) * half
                });
                metric_inverse.matmul(&lowered)
            })
            .collect();
        let nabla_j: Vec<Mat<Dual>> = (0..dim)
            .map(|k| {
                partials[k]
                    .j
                    .add(&christoffel[k].matmul(&values.j))
                    .sub(&values.j.matmul(&christoffel[k]))
            })
            .collect();
        let reeb_jacobian = Mat::from_fn(dim, dim, |i, k| partials[k].reeb[i]);
        let dj: Vec<Mat<Dual>> = partials.iter().map(|d| d.j.clone()).collect();
        let lie_reeb_j = combine(&dj, &values.reeb)
            .sub(&reeb_jacobian.matmul(&values.j))
            .add(&values.j.matmul(&reeb_jacobian));

        Ok(LocalGeometry {
            point: q.to_vec(),
            engine,
            values,
            partials,
            metric_inverse,
            christoffel,
            nabla_j,
            reeb_jacobian,
            lie_reeb_j,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    /// `Σ_k x^k Γ_k`, the matrix of `Y ↦ Γ(x, Y)`.
    pub fn christoffel_along(&self, x: &[Dual]) -> Mat<Dual> {
        combine(&self.christoffel, x)
    }

    /// `∇^LC_x J`
    pub fn nabla_j_along(&self, x: &[Dual]) -> Mat<Dual> {
        combine(&self.nabla_j, x)
    }

    /// `∂_x J`
    pub fn dj_along(&self, x: &[Dual]) -> Mat<Dual> {
        let dj: Vec<Mat<Dual>> = self.partials.iter().map(|d| d.j.clone()).collect();
        combine(&dj, x)
    }

    /// `∂_x ω`
    pub fn domega_along(&self, x: &[Dual]) -> Mat<Dual> {
        let d: Vec<Mat<Dual>> = self.partials.iter().map(|d| d.omega.clone()).collect();
        combine(&d, x)
    }

    /// `∂_x λ`
    pub fn dlambda_form_along(&self, x: &[Dual]) -> Vec<Dual> {
        let mut out = vec![Dual::zero(); self.dim()];
        for (d, &xk) in self.partials.iter().zip(x) {
            out = linalg::axpy(&out, xk, &d.lambda);
        }
        out
    }

    pub fn g(&self, u: &[Dual], v: &[Dual]) -> Dual {
        self.values.g(u, v)
    }

    pub fn j(&self, v: &[Dual]) -> Vec<Dual> {
        self.values.j.matvec(v)
    }

    pub fn pi(&self, v: &[Dual]) -> Vec<Dual> {
        self.values.pi.matvec(v)
    }

    pub fn lambda_of(&self, v: &[Dual]) -> Dual {
        self.values.lambda_of(v)
    }

    pub fn reeb(&self) -> &[Dual] {
        &self.values.reeb
    }

    /// `Γ(x, y)` for the Levi-Civita connection.
    pub fn christoffel_apply(&self, x: &[Dual], y: &[Dual]) -> Vec<Dual> {
        self.christoffel_along(x).matvec(y)
    }
}

/// First-order jet of a vector field at the geometry's base point.
#[derive(Clone, Debug)]
pub struct Germ {
    pub value: Vec<Dual>,
    /// `(i, k) ↦ ∂_k Y^i`
    pub jacobian: Mat<Dual>,
}

impl Germ {
    pub fn constant(v: &[Dual]) -> Self {
        Germ {
            value: v.to_vec(),
            jacobian: Mat::zeros(v.len(), v.len()),
        }
    }

    /// `q ↦ Π(q) v`
    pub fn xi_section(geo: &LocalGeometry, v: &[Dual]) -> Self {
        let dim = geo.dim();
        let columns: Vec<Vec<Dual>> = (0..dim).map(|k| geo.partials[k].pi.matvec(v)).collect();
        Germ {
            value: geo.pi(v),
            jacobian: Mat::from_columns(&columns),
        }
    }

    /// The Reeb field.
    pub fn reeb(geo: &LocalGeometry) -> Self {
        Germ {
            value: geo.reeb().to_vec(),
            jacobian: geo.reeb_jacobian.clone(),
        }
    }

    /// `q ↦ J(q) Y(q)`
    pub fn apply_j(&self, geo: &LocalGeometry) -> Self {
        let dim = geo.dim();
        let columns: Vec<Vec<Dual>> = (0..dim)
            .map(|k| {
                linalg::add(
                    &geo.partials[k].j.matvec(&self.value),
                    &geo.values.j.matvec(&self.jacobian.column(k)),
                )
            })
            .collect();
        Germ {
            value: geo.j(&self.value),
            jacobian: Mat::from_columns(&columns),
        }
    }

    /// `DY · x`
    pub fn derivative(&self, x: &[Dual]) -> Vec<Dual> {
        self.jacobian.matvec(x)
    }

    /// `[self, other] = D(other)·self − D(self)·other`
    pub fn bracket(&self, other: &Germ) -> Vec<Dual> {
        linalg::sub(&other.derivative(&self.value), &self.derivative(&other.value))
    }

    pub fn scaled(&self, s: Dual) -> Self {
        Germ {
            value: linalg::scale(&self.value, s),
            jacobian: self.jacobian.scale(s),
        }
    }
}

impl LocalGeometry {
    /// `x[g(Y, Z)]`
    pub fn metric_derivative(&self, x: &[Dual], y: &Germ, z: &Germ) -> Dual {
        let mut dg = Mat::zeros(self.dim(), self.dim());
        for (d, &xk) in self.partials.iter().zip(x) {
            dg = dg.add(&d.metric.scale(xk));
        }
        dg.bilinear(&y.value, &z.value) + self.g(&y.derivative(x), &z.value) + self.g(&y.value, &z.derivative(x))
    }

    /// `N(X, Y) = [JX, JY] − [X, Y] − J[X, JY] − J[JX, Y]`.
    ///
    /// Since `J² = −Π`, changing an extension shifts `N` along `X_λ`;
    /// pass ξ-section germs for arguments in `ξ`.
    pub fn nijenhuis(&self, gx: &Germ, gy: &Germ) -> Vec<Dual> {
        let (jx, jy) = (gx.apply_j(self), gy.apply_j(self));
        let a = jx.bracket(&jy);
        let b = gx.bracket(gy);
        let c = self.j(&gx.bracket(&jy));
        let d = self.j(&jx.bracket(gy));
        linalg::sub(&linalg::sub(&linalg::sub(&a, &b), &c), &d)
    }

    /// `(ℒ_W J) Z = [W, JZ] − J[W, Z]`
    pub fn lie_derivative_j(&self, w: &Germ, z: &Germ) -> Vec<Dual> {
        let jz = z.apply_j(self);
        linalg::sub(&w.bracket(&jz), &self.j(&w.bracket(z)))
    }
}
