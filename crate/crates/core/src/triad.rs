//! Contact triads `(Q, λ, J)` on a chart.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dual::{Dual, Scalar};
use crate::engine::{DiffEngine, Tangent};
use crate::error::{GeometryError, Result};
use crate::field::{DomainBox, EndoField, OneForm, Point, ScalarField, TwoForm, VectorField};
use crate::linalg::{self, Mat};

/// `|λ∧(dλ)^n|` below this is treated as degenerate.
pub const CONTACT_TOLERANCE: f64 = 1e-8;
/// Largest accepted `|J² + Π|` for a user-supplied `J`.
pub const J_TOLERANCE: f64 = 1e-8;
pub const COMPATIBILITY_SAMPLES: usize = 32;
const COMPATIBILITY_SEED: u64 = 0x5eed_c0de;

pub type FrameFn = Arc<dyn Fn(&[Dual]) -> Vec<Vec<Dual>> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[Dual]) -> Mat<Dual> + Send + Sync>;
pub type MapFn = Arc<dyn Fn(&[Dual]) -> Vec<Dual> + Send + Sync>;

/// A contact form together with a complex structure on `ξ = ker λ`.
///
/// `J` is given through its action on a frame `f_1..f_2n` of `ξ`:
/// `J f_b = Σ_a M_ab f_a`. The frame is projected by `Π` before use, so it
/// only has to be transverse to the Reeb field.
#[derive(Clone)]
pub struct ContactTriad {
    dim: usize,
    lambda: OneForm,
    xi_frame: FrameFn,
    j_action: MatrixFn,
    domain: DomainBox,
    engine: DiffEngine,
}

impl std::fmt::Debug for ContactTriad {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContactTriad")
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("engine", &self.engine)
            .finish_non_exhaustive()
    }
}

/// Everything the triad determines pointwise.
#[derive(Clone, Debug)]
pub struct TriadValues {
    pub lambda: Vec<Dual>,
    /// `ω_ij = dλ(∂_i, ∂_j)`
    pub omega: Mat<Dual>,
    pub reeb: Vec<Dual>,
    pub pi: Mat<Dual>,
    /// `J` extended by `J X_λ = 0`.
    pub j: Mat<Dual>,
    pub metric: Mat<Dual>,
}

impl Tangent for TriadValues {
    fn map_duals(&self, f: &dyn Fn(Dual) -> Dual) -> Self {
        TriadValues {
            lambda: self.lambda.map_duals(f),
            omega: self.omega.map_duals(f),
            reeb: self.reeb.map_duals(f),
            pi: self.pi.map_duals(f),
            j: self.j.map_duals(f),
            metric: self.metric.map_duals(f),
        }
    }

    fn zip_duals(&self, other: &Self, f: &dyn Fn(Dual, Dual) -> Dual) -> Self {
        TriadValues {
            lambda: self.lambda.zip_duals(&other.lambda, f),
            omega: self.omega.zip_duals(&other.omega, f),
            reeb: self.reeb.zip_duals(&other.reeb, f),
            pi: self.pi.zip_duals(&other.pi, f),
            j: self.j.zip_duals(&other.j, f),
            metric: self.metric.zip_duals(&other.metric, f),
        }
    }
}

impl TriadValues {
    fn nan(dim: usize) -> Self {
        let v = vec![Dual::constant(f64::NAN); dim];
        let m = Mat::from_fn(dim, dim, |_, _| Dual::constant(f64::NAN));
        TriadValues {
            lambda: v.clone(),
            omega: m.clone(),
            reeb: v,
            pi: m.clone(),
            j: m.clone(),
            metric: m,
        }
    }

    /// `g(u, v)`
    pub fn g(&self, u: &[Dual], v: &[Dual]) -> Dual {
        self.metric.bilinear(u, v)
    }

    /// `dλ(u, v)`
    pub fn dlambda(&self, u: &[Dual], v: &[Dual]) -> Dual {
        self.omega.bilinear(u, v)
    }

    pub fn lambda_of(&self, v: &[Dual]) -> Dual {
        linalg::dot(&self.lambda, v)
    }
}

impl ContactTriad {
    pub fn new(
        lambda: OneForm,
        xi_frame: impl Fn(&[Dual]) -> Vec<Vec<Dual>> + Send + Sync + 'static,
        j_action: impl Fn(&[Dual]) -> Mat<Dual> + Send + Sync + 'static,
        domain: DomainBox,
    ) -> Result<Self> {
        let dim = lambda.dim();
        if dim < 3 || dim.is_multiple_of(2) {
            return Err(GeometryError::BadDimension(dim));
        }
        if domain.dim() != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                got: domain.dim(),
            });
        }
        Ok(ContactTriad {
            dim,
            lambda,
            xi_frame: Arc::new(xi_frame),
            j_action: Arc::new(j_action),
            domain,
            engine: DiffEngine::Forward,
        })
    }

    pub fn with_engine(mut self, engine: DiffEngine) -> Self {
        self.engine = engine;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n` in `dim = 2n + 1`.
    pub fn half_rank(&self) -> usize {
        self.dim / 2
    }

    pub fn engine(&self) -> DiffEngine {
        self.engine
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn lambda(&self) -> &OneForm {
        &self.lambda
    }

    /// The user-supplied `ξ`-frame at `q`, unprojected.
    pub fn xi_frame_at(&self, q: &[Dual]) -> Vec<Vec<Dual>> {
        (self.xi_frame)(q)
    }

    /// Matrix of `J` in the user frame at `q`.
    pub fn j_action_at(&self, q: &[Dual]) -> Mat<Dual> {
        (self.j_action)(q)
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        Ok(())
    }

    /// Pointwise data at a (possibly dual) point.
    pub fn values_at(&self, q: &[Dual]) -> Result<TriadValues> {
        let dim = self.dim;
        let lambda = self.lambda.eval(q);
        let omega = self.engine.exterior_derivative_at(&self.lambda, q);
        // (ω + λλᵀ) X = λ has the Reeb field as its unique solution
        let system = omega.add(&Mat::outer(&lambda, &lambda));
        let reeb = system
            .solve(&lambda)
            .ok_or(GeometryError::NotContact(0.0))?;
        let pi = Mat::identity(dim).sub(&Mat::outer(&reeb, &lambda));

        let user = self.xi_frame_at(q);
        if user.len() != dim - 1 {
            return Err(GeometryError::DimensionMismatch {
                expected: dim - 1,
                got: user.len(),
            });
        }
        let frame: Vec<Vec<Dual>> = user.iter().map(|f| pi.matvec(f)).collect();
        let mut columns = vec![reeb.clone()];
        columns.extend(frame.iter().cloned());
        let basis_inv = Mat::from_columns(&columns)
            .inverse()
            .ok_or(GeometryError::RankDeficientSeeds)?;
        let m = self.j_action_at(q);
        let f = Mat::from_columns(&frame);
        let coeffs = Mat::from_fn(dim - 1, dim, |a, j| basis_inv[(a + 1, j)]);
        let j = f.matmul(&m).matmul(&coeffs);

        let metric = Mat::outer(&lambda, &lambda).add(&pi.transpose().matmul(&omega).matmul(&j));
        Ok(TriadValues {
            lambda,
            omega,
            reeb,
            pi,
            j,
            metric,
        })
    }

    /// Like [`Self::values_at`] but failure becomes NaN, for use inside field closures.
    pub fn values_or_nan(&self, q: &[Dual]) -> TriadValues {
        self.values_at(q).unwrap_or_else(|_| TriadValues::nan(self.dim))
    }

    /// Signed coefficient of `λ∧(dλ)^n` against `dx_1∧…∧dx_dim`.
    pub fn contact_coefficient(&self, p: &Point) -> Result<f64> {
        self.check_point(p)?;
        let q = p.lift();
        let lambda = linalg::values(&self.lambda.eval(&q));
        let omega = self.engine.exterior_derivative_at(&self.lambda, &q).values();
        let n = self.half_rank();
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        let mut total = 0.0;
        for i in 0..self.dim {
            let keep: Vec<usize> = (0..self.dim).filter(|&k| k != i).collect();
            let minor = Mat::from_fn(keep.len(), keep.len(), |a, b| omega[(keep[a], keep[b])]);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * lambda[i] * pfaffian(&minor);
        }
        let c = factorial * total;
        if c.is_finite() {
            Ok(c)
        } else {
            Err(GeometryError::NonFinite("contact coefficient"))
        }
    }

    /// Contact coefficient, rejecting values below [`CONTACT_TOLERANCE`].
    pub fn verify_contact_condition(&self, p: &Point) -> Result<f64> {
        let c = self.contact_coefficient(p)?;
        if c.abs() < CONTACT_TOLERANCE {
            Err(GeometryError::NotContact(c))
        } else {
            Ok(c)
        }
    }

    fn values_checked(&self, p: &Point) -> Result<TriadValues> {
        self.check_point(p)?;
        match self.values_at(&p.lift()) {
            Err(GeometryError::NotContact(_)) => Err(GeometryError::NotContact(self.contact_coefficient(p)?)),
            other => other,
        }
    }

    pub fn reeb_vector_field(&self, p: &Point) -> Result<Vec<f64>> {
        let v = linalg::values(&self.values_checked(p)?.reeb);
        if v.iter().all(|x| x.is_finite()) {
            Ok(v)
        } else {
            Err(GeometryError::NonFinite("Reeb field"))
        }
    }

    /// `Π v = v − λ(v) X_λ`
    pub fn project_xi(&self, v: &[f64], p: &Point) -> Result<Vec<f64>> {
        let values = self.values_checked(p)?;
        Ok(linalg::values(&values.pi.matvec(&linalg::lift(v))))
    }

    /// `J` on all of `TQ`, rejecting a user `J` with `|J² + Π|` above [`J_TOLERANCE`].
    pub fn extend_j(&self, p: &Point) -> Result<Mat<f64>> {
        let values = self.values_checked(p)?;
        let j = values.j.values();
        let residual = j.matmul(&j).add(&values.pi.values()).max_abs();
        if residual.is_finite() && residual <= J_TOLERANCE {
            Ok(j)
        } else {
            Err(GeometryError::InvalidJ(residual))
        }
    }

    pub fn metric_matrix(&self, p: &Point) -> Result<Mat<f64>> {
        Ok(self.values_checked(p)?.metric.values())
    }

    /// `g(u, v) = λ(u)λ(v) + dλ(Πu, JΠv)`
    pub fn triad_metric(&self, u: &[f64], v: &[f64], p: &Point) -> Result<f64> {
        let values = self.values_checked(p)?;
        let (u, v) = (linalg::lift::<Dual>(u), linalg::lift::<Dual>(v));
        let (pu, pv) = (values.pi.matvec(&u), values.pi.matvec(&v));
        let g = values.lambda_of(&u) * values.lambda_of(&v) + values.dlambda(&pu, &values.j.matvec(&pv));
        Ok(g.value())
    }

    /// `(max |dλ(JY, JZ) − dλ(Y, Z)|, min dλ(Y, JY))` over sampled unit
    /// coefficient vectors in the user `ξ`-frame.
    pub fn verify_compatibility(&self, p: &Point) -> Result<(f64, f64)> {
        let values = self.values_checked(p)?;
        let frame: Vec<Vec<f64>> = self
            .xi_frame_at(&p.lift())
            .iter()
            .map(|f| linalg::values(&values.pi.matvec(f)))
            .collect();
        let omega = values.omega.values();
        let j = values.j.values();
        let mut rng = ChaCha8Rng::seed_from_u64(COMPATIBILITY_SEED);
        let samples: Vec<Vec<f64>> = (0..COMPATIBILITY_SAMPLES)
            .map(|_| {
                let c: Vec<f64> = (0..frame.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = linalg::norm(&c);
                let mut y = vec![0.0; self.dim];
                for (ca, fa) in c.iter().zip(&frame) {
                    y = linalg::axpy(&y, ca / norm, fa);
                }
                y
            })
            .collect();
        let mut invariance: f64 = 0.0;
        let mut positivity = f64::INFINITY;
        for (k, y) in samples.iter().enumerate() {
            let jy = j.matvec(y);
            positivity = positivity.min(omega.bilinear(y, &jy));
            let z = &samples[(k + 1) % samples.len()];
            let jz = j.matvec(z);
            invariance = invariance.max((omega.bilinear(&jy, &jz) - omega.bilinear(y, z)).abs());
        }
        Ok((invariance, positivity))
    }

    /// Contact, `J² = −Π` and compatibility at `p`.
    pub fn validate_at(&self, p: &Point) -> Result<()> {
        self.verify_contact_condition(p)?;
        self.extend_j(p)?;
        let (residual, positivity) = self.verify_compatibility(p)?;
        if residual > J_TOLERANCE || !(positivity > 0.0) {
            return Err(GeometryError::IncompatibleJ { residual, positivity });
        }
        Ok(())
    }

    pub fn dlambda_field(&self) -> TwoForm {
        let (lambda, engine) = (self.lambda.clone(), self.engine);
        TwoForm::new(self.dim, move |q| engine.exterior_derivative_at(&lambda, q))
    }

    pub fn reeb_field(&self) -> VectorField {
        let t = self.clone();
        VectorField::new(self.dim, move |q| t.values_or_nan(q).reeb)
    }

    pub fn pi_field(&self) -> EndoField {
        let t = self.clone();
        EndoField::new(self.dim, move |q| t.values_or_nan(q).pi)
    }

    pub fn j_field(&self) -> EndoField {
        let t = self.clone();
        EndoField::new(self.dim, move |q| t.values_or_nan(q).j)
    }

    /// `q ↦ Π(q) v`, the `ξ`-section extending a fixed chart vector.
    pub fn xi_section(&self, v: &[f64]) -> VectorField {
        let t = self.clone();
        let v: Vec<Dual> = linalg::lift(v);
        VectorField::new(self.dim, move |q| t.values_or_nan(q).pi.matvec(&v))
    }

    /// `q ↦ g_q(X, Y)`
    pub fn metric_pairing(&self, x: &VectorField, y: &VectorField) -> ScalarField {
        let (t, x, y) = (self.clone(), x.clone(), y.clone());
        ScalarField::new(self.dim, move |q| t.values_or_nan(q).g(&x.eval(q), &y.eval(q)))
    }

    /// The triad `(aλ, J)`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(GeometryError::InvalidParameter(format!(
                "scale factor must be positive, got {a}"
            )));
        }
        let mut out = self.clone();
        out.lambda = self.lambda.scaled(a);
        Ok(out)
    }

    /// `(φ*λ, φ*J)` for a chart map `φ` with Jacobian `dφ`.
    pub fn pullback(&self, forward: MapFn, differential: MatrixFn) -> Self {
        let base = self.clone();
        let (fw, df) = (forward.clone(), differential.clone());
        let lambda = OneForm::new(self.dim, move |q| {
            let d = df(q);
            d.transpose().matvec(&base.lambda.eval(&fw(q)))
        });
        let base = self.clone();
        let (fw, df) = (forward.clone(), differential);
        let xi_frame = move |q: &[Dual]| {
            let inv = df(q).inverse();
            let image = fw(q);
            base.xi_frame_at(&image)
                .iter()
                .map(|f| match &inv {
                    Some(inv) => inv.matvec(f),
                    None => vec![Dual::constant(f64::NAN); f.len()],
                })
                .collect()
        };
        let base = self.clone();
        let j_action = move |q: &[Dual]| base.j_action_at(&forward(q));
        ContactTriad {
            dim: self.dim,
            lambda,
            xi_frame: Arc::new(xi_frame),
            j_action: Arc::new(j_action),
            domain: self.domain.clone(),
            engine: self.engine,
        }
    }
}

/// Pfaffian of an antisymmetric matrix of even size (expansion along the first row).
pub fn pfaffian(m: &Mat<f64>) -> f64 {
    let n = m.rows();
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 1..n {
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor = Mat::from_fn(keep.len(), keep.len(), |a, b| m[(keep[a], keep[b])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * m[(0, j)] * pfaffian(&minor);
    }
    total
}
