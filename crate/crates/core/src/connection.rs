//! Levi-Civita, `∇^{tmp;1}` and the triad connections `∇^{λ;c} = ∇^LC + B1 + B2(c)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Scalar};
use crate::error::Result;
use crate::field::{EndoField, OneForm, Point, TwoForm, VectorField};
use crate::linalg::{self, Mat};
use crate::local::{Germ, LocalGeometry};
use crate::triad::ContactTriad;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConnectionKind {
    LeviCivita,
    /// `∇^LC + B1`
    Tmp1,
    /// `∇^LC + B1 + B2(c)`
    Triad { c: f64 },
}

impl ConnectionKind {
    pub fn label(&self) -> String {
        match self {
            ConnectionKind::LeviCivita => "levi-civita".into(),
            ConnectionKind::Tmp1 => "tmp1".into(),
            ConnectionKind::Triad { c } => format!("triad(c={c})"),
        }
    }

    fn has_b1(&self) -> bool {
        !matches!(self, ConnectionKind::LeviCivita)
    }

    fn b2_parameter(&self) -> Option<f64> {
        match self {
            ConnectionKind::Triad { c } => Some(*c),
            _ => None,
        }
    }
}

/// An affine connection attached to a triad.
#[derive(Clone, Debug)]
pub struct AffineConnection {
    triad: ContactTriad,
    kind: ConnectionKind,
    b1_scale: f64,
}

impl AffineConnection {
    pub fn levi_civita(triad: &ContactTriad) -> Self {
        Self::new(triad, ConnectionKind::LeviCivita)
    }

    pub fn tmp1(triad: &ContactTriad) -> Self {
        Self::new(triad, ConnectionKind::Tmp1)
    }

    pub fn triad_connection(triad: &ContactTriad, c: f64) -> Self {
        Self::new(triad, ConnectionKind::Triad { c })
    }

    pub fn new(triad: &ContactTriad, kind: ConnectionKind) -> Self {
        AffineConnection {
            triad: triad.clone(),
            kind,
            b1_scale: 1.0,
        }
    }

    /// Multiplies the `B1` term, for fault injection.
    pub fn with_b1_scale(mut self, scale: f64) -> Self {
        self.b1_scale = scale;
        self
    }

    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    pub fn label(&self) -> String {
        if self.b1_scale == 1.0 {
            self.kind.label()
        } else {
            format!("{}[b1 x {}]", self.kind.label(), self.b1_scale)
        }
    }

    pub fn triad(&self) -> &ContactTriad {
        &self.triad
    }

    pub fn local(&self, p: &Point) -> Result<LocalConnection> {
        Ok(self.on(Arc::new(LocalGeometry::at(&self.triad, p)?)))
    }

    pub fn local_at(&self, q: &[Dual]) -> Result<LocalConnection> {
        Ok(self.on(Arc::new(LocalGeometry::new(&self.triad, q)?)))
    }

    /// Reuses already computed point data.
    pub fn on(&self, geometry: Arc<LocalGeometry>) -> LocalConnection {
        LocalConnection {
            geometry,
            kind: self.kind,
            b1_scale: self.b1_scale,
        }
    }

    pub fn covariant(&self, x: &VectorField, y: &VectorField, p: &Point) -> Result<Vec<f64>> {
        let local = self.local(p)?;
        Ok(linalg::values(&local.covariant(&x.eval(&p.lift()), y)))
    }

    pub fn torsion(&self, x: &VectorField, y: &VectorField, p: &Point) -> Result<Vec<f64>> {
        Ok(linalg::values(&self.local(p)?.torsion(x, y)))
    }

    pub fn covariant_derivative_endo(&self, a: &EndoField, x: &[f64], p: &Point) -> Result<Mat<f64>> {
        Ok(self.local(p)?.covariant_endo(a, &linalg::lift(x)).values())
    }

    pub fn covariant_derivative_form(&self, alpha: &OneForm, x: &[f64], p: &Point) -> Result<Vec<f64>> {
        Ok(linalg::values(&self.local(p)?.covariant_form(alpha, &linalg::lift(x))))
    }

    pub fn covariant_derivative_two_form(&self, w: &TwoForm, x: &[f64], p: &Point) -> Result<Mat<f64>> {
        Ok(self.local(p)?.covariant_two_form(w, &linalg::lift(x)).values())
    }
}

/// A connection evaluated at one point.
#[derive(Clone, Debug)]
pub struct LocalConnection {
    geometry: Arc<LocalGeometry>,
    kind: ConnectionKind,
    b1_scale: f64,
}

impl LocalConnection {
    pub fn geometry(&self) -> &LocalGeometry {
        &self.geometry
    }

    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    /// `∇_x Y` from the value `Y(q)` and the derivative `DY·x`.
    pub fn apply(&self, x: &[Dual], y: &[Dual], dy_x: &[Dual]) -> Vec<Dual> {
        let geo = &*self.geometry;
        let mut out = linalg::add(dy_x, &geo.christoffel_apply(x, y));
        if self.kind.has_b1() {
            out = linalg::axpy(&out, Dual::constant(self.b1_scale), &tensor_b1(geo, x, y));
        }
        if let Some(c) = self.kind.b2_parameter() {
            out = linalg::add(&out, &tensor_b2(geo, c, x, y));
        }
        out
    }

    /// `∇_x Y`
    pub fn covariant(&self, x: &[Dual], y: &VectorField) -> Vec<Dual> {
        let q = &self.geometry.point;
        let dy_x = self.geometry.engine.derivative(|r| y.eval(r), q, x);
        self.apply(x, &y.eval(q), &dy_x)
    }

    /// `∇_x Y` for a first-order jet of `Y`.
    pub fn covariant_germ(&self, x: &[Dual], y: &Germ) -> Vec<Dual> {
        self.apply(x, &y.value, &y.derivative(x))
    }

    /// Torsion of two germs.
    pub fn torsion_germs(&self, x: &Germ, y: &Germ) -> Vec<Dual> {
        let a = self.covariant_germ(&x.value, y);
        let b = self.covariant_germ(&y.value, x);
        linalg::sub(&linalg::sub(&a, &b), &x.bracket(y))
    }

    /// Matrix of `v ↦ ∇_x V` for the constant field `V ≡ v`.
    pub fn coefficient_matrix(&self, x: &[Dual]) -> Mat<Dual> {
        let dim = self.geometry.dim();
        let zero = vec![Dual::zero(); dim];
        let columns: Vec<Vec<Dual>> = (0..dim)
            .map(|j| self.apply(x, &linalg::basis(dim, j), &zero))
            .collect();
        Mat::from_columns(&columns)
    }

    /// `T(X, Y) = ∇_X Y − ∇_Y X − [X, Y]`
    pub fn torsion(&self, x: &VectorField, y: &VectorField) -> Vec<Dual> {
        let q = &self.geometry.point;
        let (xq, yq) = (x.eval(q), y.eval(q));
        let bracket = self.geometry.engine.lie_bracket_at(x, y, q);
        linalg::sub(&linalg::sub(&self.covariant(&xq, y), &self.covariant(&yq, x)), &bracket)
    }

    /// Torsion of two tangent vectors, extended as constant fields.
    pub fn torsion_vectors(&self, u: &[Dual], v: &[Dual]) -> Vec<Dual> {
        let zero = vec![Dual::zero(); u.len()];
        linalg::sub(&self.apply(u, v, &zero), &self.apply(v, u, &zero))
    }

    /// `(∇_x A) = ∂_x A + M(x) A − A M(x)`
    pub fn covariant_endo(&self, a: &EndoField, x: &[Dual]) -> Mat<Dual> {
        let q = &self.geometry.point;
        let m = self.coefficient_matrix(x);
        let aq = a.eval(q);
        let da = self.geometry.engine.derivative(|r| a.eval(r), q, x);
        da.add(&m.matmul(&aq)).sub(&aq.matmul(&m))
    }

    /// `(∇_x α)(Z) = x[α(Z)] − α(∇_x Z)`
    pub fn covariant_form(&self, alpha: &OneForm, x: &[Dual]) -> Vec<Dual> {
        let q = &self.geometry.point;
        let m = self.coefficient_matrix(x);
        let da = self.geometry.engine.derivative(|r| alpha.eval(r), q, x);
        linalg::sub(&da, &m.transpose().matvec(&alpha.eval(q)))
    }

    /// `(∇_x ω)(Y, Z) = x[ω(Y, Z)] − ω(∇_x Y, Z) − ω(Y, ∇_x Z)`
    pub fn covariant_two_form(&self, w: &TwoForm, x: &[Dual]) -> Mat<Dual> {
        let q = &self.geometry.point;
        let m = self.coefficient_matrix(x);
        let wq = w.eval(q);
        let dw = self.geometry.engine.derivative(|r| w.eval(r), q, x);
        dw.sub(&m.transpose().matmul(&wq)).sub(&wq.matmul(&m))
    }
}

/// `4P(X, Y) = (∇_{JY}J)X + J(∇_Y J)X + 2J(∇_X J)Y`
pub fn tensor_p(geo: &LocalGeometry, x: &[Dual], y: &[Dual]) -> Vec<Dual> {
    let jy = geo.j(y);
    let first = geo.nabla_j_along(&jy).matvec(x);
    let second = geo.j(&geo.nabla_j_along(y).matvec(x));
    let third = geo.j(&geo.nabla_j_along(x).matvec(y));
    let sum = linalg::axpy(&linalg::add(&first, &second), Dual::constant(2.0), &third);
    linalg::scale(&sum, Dual::constant(0.25))
}

/// `B1(Z1, Z2) = −½ J (∇_{ΠZ1} J) ΠZ2`
pub fn tensor_b1(geo: &LocalGeometry, z1: &[Dual], z2: &[Dual]) -> Vec<Dual> {
    let v = geo.nabla_j_along(&geo.pi(z1)).matvec(&geo.pi(z2));
    linalg::scale(&geo.j(&v), Dual::constant(-0.5))
}

/// `B2(Z1, Z2) = ½(1+c)(−λ(Z2) JZ1 − λ(Z1) JZ2 + ⟨JZ1, Z2⟩ X_λ)`
pub fn tensor_b2(geo: &LocalGeometry, c: f64, z1: &[Dual], z2: &[Dual]) -> Vec<Dual> {
    let jz1 = geo.j(z1);
    let jz2 = geo.j(z2);
    let mut out = linalg::scale(&jz1, -geo.lambda_of(z2));
    out = linalg::axpy(&out, -geo.lambda_of(z1), &jz2);
    out = linalg::axpy(&out, geo.g(&jz1, z2), geo.reeb());
    linalg::scale(&out, Dual::constant(0.5 * (1.0 + c)))
}

/// `N(X, Y) = [JX, JY] − [X, Y] − J[X, JY] − J[JX, Y]`
pub fn nijenhuis(triad: &ContactTriad, x: &VectorField, y: &VectorField, q: &[Dual]) -> Vec<Dual> {
    let engine = triad.engine();
    let j = triad.j_field();
    let (jx, jy) = (x.mapped_by(&j), y.mapped_by(&j));
    let jq = triad.values_or_nan(q).j;
    let a = engine.lie_bracket_at(&jx, &jy, q);
    let b = engine.lie_bracket_at(x, y, q);
    let c = jq.matvec(&engine.lie_bracket_at(x, &jy, q));
    let d = jq.matvec(&engine.lie_bracket_at(&jx, y, q));
    linalg::sub(&linalg::sub(&linalg::sub(&a, &b), &c), &d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DomainBox;

    fn r3_standard() -> ContactTriad {
        let lambda = OneForm::new(3, |q| vec![-q[1], Dual::constant(0.0), Dual::constant(1.0)]);
        let frame = |q: &[Dual]| {
            vec![
                vec![Dual::constant(1.0), Dual::constant(0.0), q[1]],
                vec![Dual::constant(0.0), Dual::constant(1.0), Dual::constant(0.0)],
            ]
        };
        let m = Mat::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).lift::<Dual>();
        ContactTriad::new(lambda, frame, move |_| m.clone(), DomainBox::cube(3, -1.0, 1.0)).unwrap()
    }

    /// `2⟨∇_X Y, Z⟩` by the six-term Koszul formula, with constant fields.
    fn koszul(t: &ContactTriad, x: &[f64], y: &[f64], z: &[f64], p: &Point) -> f64 {
        let engine = t.engine();
        let (fx, fy, fz) = (VectorField::constant(x), VectorField::constant(y), VectorField::constant(z));
        let d = |a: &VectorField, b: &VectorField, dir: &[f64]| {
            engine
                .directional_derivative(&t.metric_pairing(a, b), p, dir)
                .unwrap()
        };
        // brackets of constant fields vanish
        d(&fy, &fz, x) + d(&fx, &fz, y) - d(&fx, &fy, z)
    }

    #[test]
    fn christoffel_agrees_with_koszul() {
        let t = r3_standard();
        let p = Point::new(vec![0.3, -0.8, 0.4]).unwrap();
        let lc = AffineConnection::levi_civita(&t);
        let g = t.metric_matrix(&p).unwrap();
        let vs = [[1.0, 0.5, -0.2], [0.0, 1.0, 2.0], [-1.5, 0.3, 0.7]];
        for x in &vs {
            for y in &vs {
                let nabla = lc.covariant(&VectorField::constant(x), &VectorField::constant(y), &p).unwrap();
                for z in &vs {
                    let lhs = 2.0 * g.bilinear(&nabla, z);
                    assert!((lhs - koszul(&t, x, y, z, &p)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn levi_civita_examples_on_r3() {
        let t = r3_standard();
        let y = -0.6;
        let p = Point::new(vec![0.2, y, 0.9]).unwrap();
        let lc = AffineConnection::levi_civita(&t);
        let dy = VectorField::coordinate(3, 1);
        let dz = VectorField::coordinate(3, 2);
        let v = lc.covariant(&dy, &dz, &p).unwrap();
        let expected = [-0.5, 0.0, -y / 2.0];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let reeb = t.reeb_field();
        let v = lc.covariant(&reeb, &reeb, &p).unwrap();
        assert!(linalg::max_abs(&v) < 1e-14);
    }

    #[test]
    fn b2_values() {
        let t = r3_standard();
        let p = Point::new(vec![0.1, 0.2, 0.3]).unwrap();
        let geo = LocalGeometry::at(&t, &p).unwrap();
        let reeb = geo.reeb().to_vec();
        assert!(linalg::max_abs(&linalg::values(&tensor_b2(&geo, 0.7, &reeb, &reeb))) < 1e-15);
    }
}
