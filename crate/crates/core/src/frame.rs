//! Unitary moving frames `(X_λ, E_i, JE_i)`, connection matrices and the
//! first structure equation.

use serde::{Deserialize, Serialize};

use crate::connection::{AffineConnection, LocalConnection};
use crate::dual::{Dual, Scalar};
use crate::error::{GeometryError, Result};
use crate::field::{OneForm, Point, VectorField};
use crate::linalg::{self, Mat};
use crate::local::LocalGeometry;
use crate::triad::ContactTriad;

/// Seeds whose projected remainder is shorter than this are skipped.
const SEED_THRESHOLD: f64 = 1e-3;

/// An orthonormal frame `e_0 = X_λ, e_i = E_i, e_{n+i} = JE_i` near a point.
///
/// Coordinate fields `∂_s` for the chosen seeds `s` are projected to `ξ` and
/// run through a Gram–Schmidt procedure that appends `JE` after every `E`.
#[derive(Clone, Debug)]
pub struct MovingFrame {
    triad: ContactTriad,
    seeds: Vec<usize>,
}

impl MovingFrame {
    /// Frame from coordinate seeds tried in `order`.
    pub fn build(triad: &ContactTriad, p: &Point, order: &[usize]) -> Result<Self> {
        let dim = triad.dim();
        if p.dim() != dim {
            return Err(GeometryError::DimensionMismatch { expected: dim, got: p.dim() });
        }
        if order.iter().any(|&s| s >= dim) {
            return Err(GeometryError::InvalidParameter("seed index out of range".into()));
        }
        let values = triad.values_at(&p.lift())?;
        let n = triad.half_rank();
        let mut basis: Vec<Vec<Dual>> = Vec::new();
        let mut seeds = Vec::new();
        for &s in order {
            if seeds.len() == n {
                break;
            }
            let v = orthogonalize(&values.pi.column(s), &basis, &values.metric);
            let norm = values.metric.bilinear(&v, &v).value().max(0.0).sqrt();
            if norm < SEED_THRESHOLD {
                continue;
            }
            let e = linalg::scale(&v, Dual::constant(1.0 / norm));
            basis.push(values.j.matvec(&e));
            basis.push(e);
            seeds.push(s);
        }
        if seeds.len() < n {
            return Err(GeometryError::RankDeficientSeeds);
        }
        Ok(MovingFrame { triad: triad.clone(), seeds })
    }

    /// Seeds in chart order, retried in rotated order on rank failure.
    pub fn build_default(triad: &ContactTriad, p: &Point) -> Result<Self> {
        let dim = triad.dim();
        let mut last = GeometryError::RankDeficientSeeds;
        for shift in 0..dim {
            let order: Vec<usize> = (0..dim).map(|i| (i + shift) % dim).collect();
            match Self::build(triad, p, &order) {
                Ok(frame) => return Ok(frame),
                Err(GeometryError::RankDeficientSeeds) => continue,
                Err(e) => {
                    last = e;
                    break;
                }
            }
        }
        Err(last)
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    pub fn dim(&self) -> usize {
        self.triad.dim()
    }

    pub fn triad(&self) -> &ContactTriad {
        &self.triad
    }

    /// Frame matrix at `q`, column `i` is `e_i`. NaN where the triad degenerates.
    pub fn frame_at(&self, q: &[Dual]) -> Mat<Dual> {
        let values = self.triad.values_or_nan(q);
        let mut es = Vec::new();
        let mut basis: Vec<Vec<Dual>> = Vec::new();
        for &s in &self.seeds {
            let v = orthogonalize(&values.pi.column(s), &basis, &values.metric);
            let e = linalg::scale(&v, values.metric.bilinear(&v, &v).sqrt().recip());
            basis.push(values.j.matvec(&e));
            basis.push(e.clone());
            es.push(e);
        }
        let mut columns = vec![values.reeb.clone()];
        columns.extend(es.iter().cloned());
        columns.extend(es.iter().map(|e| values.j.matvec(e)));
        Mat::from_columns(&columns)
    }

    /// Coframe matrix at `q`, row `i` is `θ^i`.
    pub fn coframe_at(&self, q: &[Dual]) -> Mat<Dual> {
        let dim = self.dim();
        self.frame_at(q)
            .inverse()
            .unwrap_or_else(|| Mat::from_fn(dim, dim, |_, _| Dual::constant(f64::NAN)))
    }

    pub fn field(&self, i: usize) -> VectorField {
        let frame = self.clone();
        VectorField::new(self.dim(), move |q| frame.frame_at(q).column(i))
    }

    pub fn coframe_form(&self, i: usize) -> OneForm {
        let frame = self.clone();
        OneForm::new(self.dim(), move |q| frame.coframe_at(q).row(i))
    }

    /// Values and first partials of frame and coframe at `p`.
    pub fn jet(&self, p: &Point) -> Result<FrameJet> {
        let q = p.lift();
        let engine = self.triad.engine();
        let frame = self.frame_at(&q);
        let coframe = self.coframe_at(&q);
        let frame_partials = engine.partials(|r| self.frame_at(r), &q);
        let coframe_partials = engine.partials(|r| self.coframe_at(r), &q);
        let finite = |m: &Mat<Dual>| m.entries().iter().all(|d| d.is_finite());
        if !finite(&frame) || !finite(&coframe) || !frame_partials.iter().chain(&coframe_partials).all(finite) {
            return Err(GeometryError::NonFinite("moving frame"));
        }
        Ok(FrameJet {
            half_rank: self.triad.half_rank(),
            frame,
            coframe,
            frame_partials,
            coframe_partials,
        })
    }
}

fn orthogonalize(v: &[Dual], basis: &[Vec<Dual>], metric: &Mat<Dual>) -> Vec<Dual> {
    let mut out = v.to_vec();
    for b in basis {
        out = linalg::axpy(&out, -metric.bilinear(&out, b), b);
    }
    out
}

/// A frame and coframe together with their coordinate partials at one point.
#[derive(Clone, Debug)]
pub struct FrameJet {
    pub half_rank: usize,
    pub frame: Mat<Dual>,
    pub coframe: Mat<Dual>,
    /// `frame_partials[a] = ∂_a` of the frame matrix
    pub frame_partials: Vec<Mat<Dual>>,
    pub coframe_partials: Vec<Mat<Dual>>,
}

impl FrameJet {
    pub fn dim(&self) -> usize {
        self.frame.rows()
    }

    pub fn e(&self, i: usize) -> Vec<Dual> {
        self.frame.column(i)
    }

    /// `D e_i · x`
    pub fn derivative(&self, i: usize, x: &[Dual]) -> Vec<Dual> {
        let mut out = vec![Dual::zero(); self.dim()];
        for (d, &xa) in self.frame_partials.iter().zip(x) {
            out = linalg::axpy(&out, xa, &d.column(i));
        }
        out
    }

    /// Components `θ^i(v)`.
    pub fn components(&self, v: &[Dual]) -> Vec<f64> {
        linalg::values(&self.coframe.matvec(v))
    }

    /// `max |G − I|` and `max |θ^i(e_j) − δ|`.
    pub fn orthonormality(&self, geo: &LocalGeometry) -> (f64, f64) {
        let dim = self.dim();
        let gram = Mat::from_fn(dim, dim, |i, j| geo.g(&self.e(i), &self.e(j)).value());
        let pairing = self.coframe.matmul(&self.frame).values();
        let id = Mat::<f64>::identity(dim);
        (gram.sub(&id).max_abs(), pairing.sub(&id).max_abs())
    }
}

/// Connection coefficients `Γ^i_{k,j} = θ^i(∇_{e_k} e_j)` in a moving frame.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConnectionMatrix {
    /// `gamma[k][(i, j)] = Γ^i_{k,j}`
    pub gamma: Vec<Mat<f64>>,
    /// Row `i` is the coframe form `θ^i` at the base point.
    pub coframe: Mat<f64>,
}

impl ConnectionMatrix {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self, i: usize, k: usize, j: usize) -> f64 {
        self.gamma[k][(i, j)]
    }

    /// Coordinate components of `Ω^i_j = Σ_m Γ^i_{m,j} θ^m`.
    pub fn omega(&self, i: usize, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for m in 0..self.dim() {
            out = linalg::axpy(&out, self.gamma(i, m, j), &self.coframe.row(m));
        }
        out
    }
}

/// `Γ^i_{k,j}` of `conn` in the frame described by `jet`.
pub fn connection_matrix(conn: &LocalConnection, jet: &FrameJet) -> ConnectionMatrix {
    let dim = jet.dim();
    let gamma = (0..dim)
        .map(|k| {
            let ek = jet.e(k);
            let columns: Vec<Vec<f64>> = (0..dim)
                .map(|j| jet.components(&conn.apply(&ek, &jet.e(j), &jet.derivative(j, &ek))))
                .collect();
            Mat::from_columns(&columns)
        })
        .collect();
    ConnectionMatrix {
        gamma,
        coframe: jet.coframe.values(),
    }
}

/// Connection matrix of `conn` in `frame` at `p`.
pub fn connection_one_forms(conn: &AffineConnection, frame: &MovingFrame, p: &Point) -> Result<ConnectionMatrix> {
    let local = conn.local(p)?;
    Ok(connection_matrix(&local, &frame.jet(p)?))
}

/// `max |dθ^j + Σ_k Ω^j_k ∧ θ^k − T^j|` over all coordinate bivectors.
///
/// With `with_torsion = false` the torsion term is dropped.
pub fn structure_residual(conn: &LocalConnection, jet: &FrameJet, with_torsion: bool) -> f64 {
    let dim = jet.dim();
    let cm = connection_matrix(conn, jet);
    let omegas: Vec<Vec<Vec<f64>>> = (0..dim).map(|j| (0..dim).map(|k| cm.omega(j, k)).collect()).collect();
    let theta = &cm.coframe;
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for b in (a + 1)..dim {
            let torsion = if with_torsion {
                jet.components(&conn.torsion_vectors(&linalg::basis(dim, a), &linalg::basis(dim, b)))
            } else {
                vec![0.0; dim]
            };
            for j in 0..dim {
                let d_theta = jet.coframe_partials[a][(j, b)].value() - jet.coframe_partials[b][(j, a)].value();
                let wedge: f64 = (0..dim)
                    .map(|k| omegas[j][k][a] * theta[(k, b)] - omegas[j][k][b] * theta[(k, a)])
                    .sum();
                worst = worst.max((d_theta + wedge - torsion[j]).abs());
            }
        }
    }
    worst
}

pub fn structure_equation_residual(conn: &AffineConnection, frame: &MovingFrame, p: &Point) -> Result<f64> {
    Ok(structure_residual(&conn.local(p)?, &frame.jet(p)?, true))
}

/// The entries of `Γ^i_{k,j}` forced in closed form by the axioms, `None` elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTable {
    dim: usize,
    entries: Vec<Option<f64>>,
}

impl GammaTable {
    fn new(dim: usize) -> Self {
        GammaTable {
            dim,
            entries: vec![None; dim * dim * dim],
        }
    }

    fn index(&self, i: usize, k: usize, j: usize) -> usize {
        (i * self.dim + k) * self.dim + j
    }

    fn set(&mut self, i: usize, k: usize, j: usize, v: f64) {
        let idx = self.index(i, k, j);
        self.entries[idx] = Some(v);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, k: usize, j: usize) -> Option<f64> {
        self.entries[self.index(i, k, j)]
    }

    /// `(i, k, j, Γ^i_{k,j})` for every determined entry.
    pub fn determined(&self) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for k in 0..d {
                for j in 0..d {
                    if let Some(v) = self.get(i, k, j) {
                        out.push((i, k, j, v));
                    }
                }
            }
        }
        out
    }
}

/// Reeb-direction coefficients from `ℒ_{X_λ}J`, the torsion axiom and metric compatibility.
pub fn gamma_table(geo: &LocalGeometry, jet: &FrameJet, c: f64) -> GammaTable {
    let dim = jet.dim();
    let n = jet.half_rank;
    let mut t = GammaTable::new(dim);
    let lj = &geo.lie_reeb_j;
    let e = |i: usize| jet.e(i);
    let ip = |u: &[Dual], v: &[Dual]| geo.g(u, v).value();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };

    for i in 0..dim {
        t.set(i, 0, 0, 0.0);
    }
    for a in 1..dim {
        t.set(0, a, 0, 0.0);
    }
    for j in 1..=n {
        for k in 1..=n {
            let lj_je = lj.matvec(&e(n + j));
            let lj_e = lj.matvec(&e(j));
            t.set(k, j, 0, 0.5 * ip(&lj_je, &e(k)));
            t.set(n + k, j, 0, -0.5 * c * delta(j, k) + 0.5 * ip(&lj_je, &e(n + k)));
            t.set(k, n + j, 0, 0.5 * c * delta(j, k) - 0.5 * ip(&lj_e, &e(k)));
            t.set(n + k, n + j, 0, -0.5 * ip(&lj_je, &e(k)));
        }
    }
    let reeb = geo.reeb().to_vec();
    for a in 1..dim {
        // [e_a, X_λ] = DX_λ·e_a − De_a·X_λ
        let bracket = linalg::sub(&geo.reeb_jacobian.matvec(&e(a)), &jet.derivative(a, &reeb));
        let theta = jet.components(&bracket);
        for i in 0..dim {
            let v = t.get(i, a, 0).expect("Reeb column is filled") - theta[i];
            t.set(i, 0, a, v);
        }
        for b in 1..dim {
            let v = -t.get(b, a, 0).expect("Reeb column is filled");
            t.set(0, a, b, v);
        }
    }
    t
}

pub fn gamma_from_axioms(triad: &ContactTriad, c: f64, frame: &MovingFrame, p: &Point) -> Result<GammaTable> {
    let geo = LocalGeometry::at(triad, p)?;
    Ok(gamma_table(&geo, &frame.jet(p)?, c))
}

/// Largest `|Γ_table − Γ_direct|` over the determined entries.
pub fn gamma_discrepancy(table: &GammaTable, direct: &ConnectionMatrix) -> f64 {
    table
        .determined()
        .into_iter()
        .map(|(i, k, j, v)| (v - direct.gamma(i, k, j)).abs())
        .fold(0.0, f64::max)
}

pub fn cross_check_gamma(triad: &ContactTriad, c: f64, frame: &MovingFrame, p: &Point) -> Result<f64> {
    let conn = AffineConnection::triad_connection(triad, c).local(p)?;
    let jet = frame.jet(p)?;
    let table = gamma_table(conn.geometry(), &jet, c);
    Ok(gamma_discrepancy(&table, &connection_matrix(&conn, &jet)))
}

/// Residuals of the complex-linear and skew-Hermitian block structure of
/// `Ω|_ξ` in the basis `(E_i; JE_i)`, evaluated on `ξ`-directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianResidual {
    pub j_linearity: f64,
    pub skew: f64,
}

impl HermitianResidual {
    pub fn max(&self) -> f64 {
        self.j_linearity.max(self.skew)
    }
}

pub fn hermitian_residual(cm: &ConnectionMatrix) -> HermitianResidual {
    let n = cm.dim() / 2;
    let mut out = HermitianResidual { j_linearity: 0.0, skew: 0.0 };
    for m in 1..cm.dim() {
        let g = |i: usize, j: usize| cm.gamma(i, m, j);
        for a in 1..=n {
            for b in 1..=n {
                out.j_linearity = out
                    .j_linearity
                    .max((g(n + a, n + b) - g(a, b)).abs())
                    .max((g(a, n + b) + g(n + a, b)).abs());
                out.skew = out
                    .skew
                    .max((g(a, b) + g(b, a)).abs())
                    .max((g(n + a, b) - g(n + b, a)).abs());
            }
        }
    }
    out
}

pub fn skew_hermitian_check(conn: &AffineConnection, frame: &MovingFrame, p: &Point) -> Result<HermitianResidual> {
    Ok(hermitian_residual(&connection_one_forms(conn, frame, p)?))
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

    #[test]
    fn standard_frame_is_explicit() {
        let t = r3_standard();
        let p = Point::new(vec![0.2, 0.5, -0.3]).unwrap();
        let frame = MovingFrame::build(&t, &p, &[0, 1, 2]).unwrap();
        let m = frame.frame_at(&p.lift()).values();
        let expected = Mat::from_columns(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.5], vec![0.0, 1.0, 0.0]]);
        assert!(m.sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn z_seed_is_skipped() {
        let t = r3_standard();
        let p = Point::new(vec![0.0, 0.0, 0.0]).unwrap();
        let frame = MovingFrame::build(&t, &p, &[2, 1, 0]).unwrap();
        assert_eq!(frame.seeds(), &[1]);
        assert_eq!(
            MovingFrame::build(&t, &p, &[2]).unwrap_err(),
            GeometryError::RankDeficientSeeds
        );
    }

    #[test]
    fn levi_civita_standard_structure() {
        let t = r3_standard();
        let p = Point::new(vec![0.3, -0.4, 0.7]).unwrap();
        let frame = MovingFrame::build_default(&t, &p).unwrap();
        let lc = AffineConnection::levi_civita(&t);
        assert!(structure_equation_residual(&lc, &frame, &p).unwrap() < 1e-7);
        let cm = connection_one_forms(&lc, &frame, &p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(linalg::max_abs(&linalg::add(&cm.omega(i, j), &cm.omega(j, i))) < 1e-12);
            }
        }
    }

    #[test]
    fn triad_torsion_is_visible_in_structure_equation() {
        let t = r3_standard();
        let p = Point::new(vec![0.3, -0.4, 0.7]).unwrap();
        let frame = MovingFrame::build_default(&t, &p).unwrap();
        let conn = AffineConnection::triad_connection(&t, 0.0).local(&p).unwrap();
        let jet = frame.jet(&p).unwrap();
        assert!(structure_residual(&conn, &jet, true) < 1e-7);
        assert!((structure_residual(&conn, &jet, false) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn standard_gamma_table_vanishes() {
        let t = r3_standard();
        let p = Point::new(vec![0.3, -0.4, 0.7]).unwrap();
        let frame = MovingFrame::build_default(&t, &p).unwrap();
        let table = gamma_from_axioms(&t, 0.0, &frame, &p).unwrap();
        assert!(table.determined().iter().all(|e| e.3.abs() < 1e-12));
        assert!(cross_check_gamma(&t, 0.0, &frame, &p).unwrap() < 1e-9);
    }
}
