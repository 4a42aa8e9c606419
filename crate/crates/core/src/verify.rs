//! The check battery. Every check reports a named residual instead of failing.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::connection::{tensor_b1, tensor_b2, AffineConnection, LocalConnection};
use crate::dual::{Dual, Scalar};
use crate::error::Result;
use crate::field::Point;
use crate::frame::{self, FrameJet, MovingFrame};
use crate::linalg::{self, Mat};
use crate::local::{Germ, LocalGeometry};
use crate::maps::StrictContactMap;
use crate::triad::ContactTriad;

/// Identities with no differentiation beyond the Christoffel symbols.
pub const ALGEBRAIC_TOLERANCE: f64 = 1e-8;
/// Identities involving derivatives of Christoffel-dependent quantities.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-7;
/// Random input tuples drawn per check and point.
pub const DEFAULT_SAMPLES: usize = 8;
/// A fault injection counts as discriminating only above this residual.
pub const CONTROL_THRESHOLD: f64 = 1e-3;
/// `B1` below this at every sample means the sign flip changes nothing.
const INERT_THRESHOLD: f64 = 1e-12;

/// A registered check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    pub tolerance: f64,
    /// Fault injections, expected to fail.
    pub control: bool,
}

const fn check(name: &'static str, anchor: &'static str, tolerance: f64) -> CheckInfo {
    CheckInfo { name, anchor, tolerance, control: false }
}

const fn control(name: &'static str, anchor: &'static str, tolerance: f64) -> CheckInfo {
    CheckInfo { name, anchor, tolerance, control: true }
}

pub const CHECKS: &[CheckInfo] = &[
    check(
        "axiom-1",
        "Hermitian on ξ: π∇_X(JY) = Jπ∇_X Y and X⟨Y,Z⟩ = ⟨π∇_X Y,Z⟩ + ⟨Y,π∇_X Z⟩ for X ∈ TQ, Y, Z ∈ ξ",
        ALGEBRAIC_TOLERANCE,
    ),
    check("axiom-2", "T^π(JY, Y) = 0 for Y ∈ ξ", ALGEBRAIC_TOLERANCE),
    check("axiom-3", "T(X_λ, Y) = 0 for Y ∈ TQ", ALGEBRAIC_TOLERANCE),
    check("axiom-4", "∇_{X_λ}X_λ = 0 and λ(∇_Y X_λ) = 0 for Y ∈ TQ", ALGEBRAIC_TOLERANCE),
    check("axiom-5c", "∇_{JY}X_λ + J∇_Y X_λ = cY for Y ∈ ξ", ALGEBRAIC_TOLERANCE),
    check("axiom-6", "⟨∇_Y X_λ, Z⟩ + ⟨X_λ, ∇_Y Z⟩ = 0 for Y, Z ∈ ξ", ALGEBRAIC_TOLERANCE),
    check("cr-reeb", "∇_{X_λ}λ = 0", ALGEBRAIC_TOLERANCE),
    check(
        "cr-holomorphic",
        "λ is CR-holomorphic for the contact triad connection: ∇_Y λ + J∇_{JY}λ = 0 for Y ∈ ξ",
        ALGEBRAIC_TOLERANCE,
    ),
    check("scaling", "∇^{aλ;1} = ∇^{λ;a}", DERIVATIVE_TOLERANCE),
    check(
        "naturality",
        "φ*∇ is the triad connection of (λ, φ*J) for every strict contactomorphism φ",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "explicit-formula",
        "∇^{λ;c} = ∇^LC + B1 + B2(c), B1 = −½J(∇^LC_{ΠZ1}J)ΠZ2, so ∇^{λ;−1} = ∇^LC + B1",
        1e-12,
    ),
    check(
        "gamma-cross-check",
        "the Reeb-direction coefficients Γ^i_{k,j} forced by the axioms agree with the connection",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "structure-equation",
        "dθ^j + Ω^j_k ∧ θ^k = T^j for the triad connection in a unitary frame",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "structure-equation-levi-civita",
        "dθ^j + Ω^j_k ∧ θ^k = 0 for the Levi-Civita connection in a unitary frame",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "skew-hermitian",
        "the connection matrix restricted to ξ is complex linear and skew-Hermitian",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "frame-orthonormal",
        "the moving frame (X_λ, E_i, JE_i) is orthonormal and dual to its coframe",
        1e-9,
    ),
    check(
        "compatibility-identities",
        "⟨JX,JY⟩ = dλ(X,JY), ⟨X,JY⟩ = −dλ(X,Y), ⟨JX,Y⟩ = −⟨X,JY⟩, dλ(JX,JY) = dλ(X,Y) on ξ",
        1e-10,
    ),
    check(
        "lie-reeb-j-symmetric",
        "ℒ_{X_λ}J is symmetric on ξ: ⟨(ℒ_{X_λ}J)Y, Z⟩ = ⟨Y, (ℒ_{X_λ}J)Z⟩",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "reeb-geodesic",
        "∇^LC_{X_λ}X_λ = 0 and ∇^LC_Z X_λ ∈ ξ for all Z",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "nabla-j-nijenhuis",
        "2⟨(∇^LC_X J)Y, Z⟩ = ⟨N(Y,Z), JX⟩ − ⟨JX,JY⟩λ(Z) + ⟨JX,JZ⟩λ(Y) for X, Y, Z ∈ TQ",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "nijenhuis-reeb",
        "N(X_λ,Z) = −J(ℒ_{X_λ}J)Z, N(Z,X_λ) = J(ℒ_{X_λ}J)Z and 2⟨(∇^LC_Y J)X_λ, Z⟩ = −⟨(ℒ_{X_λ}J)Z, Y⟩ + ⟨Y,Z⟩ for Y, Z ∈ ξ",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "nijenhuis-j-relations",
        "JN(Y,JZ) = ΠN(Y,Z) and ΠN(Y,JZ) + ΠN(Z,JY) = 0 for Y, Z ∈ ξ",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "nabla-j-xi-identity",
        "Π(∇^LC_{JY}J)X + J(∇^LC_Y J)X = 0 for X, Y ∈ ξ",
        DERIVATIVE_TOLERANCE,
    ),
    check("nabla-reeb-j", "∇^LC_{X_λ}J = 0", DERIVATIVE_TOLERANCE),
    check(
        "lc-reeb-derivative",
        "∇^LC_Y X_λ = ½JY + ½(ℒ_{X_λ}J)JY for Y ∈ ξ",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "tmp1-j-linear",
        "π∇^{tmp;1}_X(JY) = Jπ∇^{tmp;1}_X Y for X ∈ TQ, Y ∈ ξ",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "p-metric-skew",
        "⟨P(X,Y), Z⟩ + ⟨Y, P(X,Z)⟩ = 0 for X, Y, Z ∈ ξ",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "tmp1-hermitian",
        "π∇^{tmp;1} is a Hermitian connection on ξ, including the X_λ direction",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "tmp1-reeb-metric",
        "⟨∇^{tmp;1}_Y X_λ, Z⟩ + ⟨X_λ, ∇^{tmp;1}_Y Z⟩ = 0 for Y, Z ∈ ξ",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "tmp1-torsion",
        "T^{tmp;1}(X_λ, Y) = 0, πT^{tmp;1}|_ξ = ¼πN|_ξ and λ(T^{tmp;1}|_ξ) = 0",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "p-bracket-identity",
        "P(Z,Y) − P(Y,Z) = ¼([JY,JZ] − Π[Y,Z] − J[JY,Z] − J[Y,JZ]) for Y, Z ∈ ξ",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "p-xi-projection",
        "ΠP(Y, Z) = ½J(∇^LC_Y J)Z for Y, Z ∈ ξ",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "reeb-derivative-formula",
        "∇_Y X_λ = −½cJY + ½(ℒ_{X_λ}J)JY for Y ∈ ξ",
        DERIVATIVE_TOLERANCE,
    ),
    check(
        "torsion-lambda-part",
        "λ(T(Y,Z)) = (1+c)dλ(Y,Z) for Y, Z ∈ ξ",
        ALGEBRAIC_TOLERANCE,
    ),
    check(
        "torsion-xi-part",
        "πT(Y,Z) = ¼((ℒ_{JY}J)Z + (ℒ_Y J)JZ) for Y, Z ∈ ξ",
        DERIVATIVE_TOLERANCE,
    ),
    check("reeb-preserves-dlambda", "∇_{X_λ}dλ = 0", ALGEBRAIC_TOLERANCE),
    check(
        "torsion-type",
        "T^π(JY,Z) = T^π(Y,JZ) and JT^π(JY,Z) = T^π(Y,Z) for Y, Z ∈ ξ",
        ALGEBRAIC_TOLERANCE,
    ),
    control(
        "control-wrong-c",
        "∇^{λ;1} checked against ∇_{JY}X_λ + J∇_Y X_λ = 0 must fail by exactly |Y|",
        ALGEBRAIC_TOLERANCE,
    ),
    control(
        "control-levi-civita",
        "the Levi-Civita connection run through the six axioms must fail at least one",
        ALGEBRAIC_TOLERANCE,
    ),
    control(
        "control-b1-sign-flip",
        "∇^LC − B1 run through the ∇^{tmp;1} lemmas must fail where B1 ≠ 0",
        DERIVATIVE_TOLERANCE,
    ),
    control(
        "control-cr-defect",
        "for c ≠ 0, ∇_Y λ + J∇_{JY}λ has a defect proportional to c",
        ALGEBRAIC_TOLERANCE,
    ),
    control(
        "control-scaling-mismatch",
        "∇^{aλ;1} differs from ∇^{λ;1} for a ≠ 1",
        DERIVATIVE_TOLERANCE,
    ),
];

/// Looks up a registered check.
pub fn describe(name: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.name == name)
}

fn info(name: &str) -> &'static CheckInfo {
    describe(name).unwrap_or_else(|| panic!("unregistered check {name}"))
}

/// One residual at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// The identity being checked, in words.
    pub anchor: String,
    pub c: Option<f64>,
    /// The connection under test, when there is exactly one.
    pub connection: Option<String>,
    pub point_index: usize,
    pub point: Vec<f64>,
    pub residual: f64,
    pub tolerance: f64,
    /// `residual ≤ tolerance`
    pub pass: bool,
    pub control: bool,
    /// Inputs attaining the residual.
    pub witness: Option<Vec<Vec<f64>>>,
    pub error: Option<String>,
    pub note: Option<String>,
}

impl CheckResult {
    fn new(name: &str, point: &Point, residual: f64) -> Self {
        let info = info(name);
        CheckResult {
            name: name.into(),
            anchor: info.anchor.into(),
            c: None,
            connection: None,
            point_index: 0,
            point: point.coords().to_vec(),
            residual,
            tolerance: info.tolerance,
            pass: residual <= info.tolerance,
            control: info.control,
            witness: None,
            error: None,
            note: None,
        }
    }

    /// A check whose evaluation failed; it never passes.
    pub fn failed(name: &str, point: &Point, error: impl ToString) -> Self {
        let mut out = Self::new(name, point, f64::NAN);
        out.error = Some(error.to_string());
        out
    }

    fn from_worst(name: &str, point: &Point, worst: Worst) -> Self {
        let mut out = Self::new(name, point, worst.residual);
        out.witness = worst.witness;
        out
    }

    fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    fn with_connection(mut self, label: String) -> Self {
        self.connection = Some(label);
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// For a control: the fault was noticed.
    pub fn detected(&self) -> bool {
        self.error.is_none() && self.residual > self.tolerance
    }

    pub fn inert(&self) -> bool {
        self.note.as_deref().is_some_and(|n| n.starts_with(INERT_NOTE))
    }
}

const INERT_NOTE: &str = "inert";

/// Largest residual seen so far, with the inputs that produced it. NaN sticks.
#[derive(Debug, Default)]
struct Worst {
    residual: f64,
    witness: Option<Vec<Vec<f64>>>,
}

impl Worst {
    fn offer(&mut self, r: f64, inputs: &[&[Dual]]) {
        if self.residual.is_nan() {
            return;
        }
        if r.is_nan() || r > self.residual || self.witness.is_none() {
            self.residual = r;
            self.witness = Some(inputs.iter().map(|v| linalg::values(v)).collect());
        }
    }

    fn merge(&mut self, other: Worst) {
        if let Some(w) = other.witness {
            let inputs: Vec<Vec<Dual>> = w.iter().map(|v| linalg::lift(v)).collect();
            let refs: Vec<&[Dual]> = inputs.iter().map(|v| v.as_slice()).collect();
            self.offer(other.residual, &refs);
        }
    }
}

/// Seeded draws of random inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub seed: u64,
    pub samples: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { seed: 0, samples: DEFAULT_SAMPLES }
    }
}

/// FNV-1a, so every check draws from its own reproducible stream.
fn stream_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    geo: &'a LocalGeometry,
}

impl Sampler<'_> {
    fn gaussian(&mut self) -> Vec<Dual> {
        (0..self.geo.dim())
            .map(|_| Dual::constant(StandardNormal.sample(&mut self.rng)))
            .collect()
    }

    fn unit(&self, v: Vec<Dual>) -> Vec<Dual> {
        let n = norm(self.geo, &v);
        linalg::scale(&v, Dual::constant(1.0 / n))
    }

    /// `g`-unit vector in `TQ`.
    fn tangent(&mut self) -> Vec<Dual> {
        let v = self.gaussian();
        self.unit(v)
    }

    /// `g`-unit vector in `ξ`.
    fn xi(&mut self) -> Vec<Dual> {
        let v = self.gaussian();
        let v = self.geo.pi(&v);
        self.unit(v)
    }
}

fn norm(geo: &LocalGeometry, v: &[Dual]) -> f64 {
    geo.g(v, v).value().max(0.0).sqrt()
}

fn diff_norm(geo: &LocalGeometry, a: &[Dual], b: &[Dual]) -> f64 {
    norm(geo, &linalg::sub(a, b))
}

/// `|α|` in the dual metric.
fn covector_norm(geo: &LocalGeometry, alpha: &[Dual]) -> f64 {
    geo.metric_inverse.bilinear(alpha, alpha).value().max(0.0).sqrt()
}

/// `∇_x α = ∂_x α − M(x)ᵀ α` for `α = λ`.
fn nabla_lambda(conn: &LocalConnection, x: &[Dual]) -> Vec<Dual> {
    let geo = conn.geometry();
    let m = conn.coefficient_matrix(x);
    linalg::sub(&geo.dlambda_form_along(x), &m.transpose().matvec(&geo.values.lambda))
}

/// Per-point context shared by every check at that point.
#[derive(Clone, Debug)]
pub struct PointContext {
    pub triad: ContactTriad,
    pub point: Point,
    pub geometry: Arc<LocalGeometry>,
    pub sampling: Sampling,
    frame: std::result::Result<FrameJet, String>,
}

impl PointContext {
    pub fn new(triad: &ContactTriad, p: &Point, sampling: Sampling) -> Result<Self> {
        triad.validate_at(p)?;
        let geometry = Arc::new(LocalGeometry::at(triad, p)?);
        let frame = MovingFrame::build_default(triad, p)
            .and_then(|f| f.jet(p))
            .map_err(|e| e.to_string());
        Ok(PointContext {
            triad: triad.clone(),
            point: p.clone(),
            geometry,
            sampling,
            frame,
        })
    }

    pub fn geometry(&self) -> &LocalGeometry {
        &self.geometry
    }

    pub fn local(&self, conn: &AffineConnection) -> LocalConnection {
        conn.on(self.geometry.clone())
    }

    fn sampler(&self, name: &str) -> Sampler<'_> {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(stream_seed(self.sampling.seed, name)),
            geo: &self.geometry,
        }
    }

    fn result(&self, name: &str, worst: Worst) -> CheckResult {
        CheckResult::from_worst(name, &self.point, worst)
    }

    fn xi_germ(&self, s: &mut Sampler<'_>) -> Germ {
        Germ::xi_section(&self.geometry, &s.xi())
    }

    // ---- axioms ----

    /// The six defining axioms for `conn`, with `(5;c)` tested against `c`.
    pub fn axioms(&self, conn: &AffineConnection, c: f64) -> Vec<CheckResult> {
        let l = self.local(conn);
        let label = conn.label();
        [
            self.axiom_1(&l),
            self.axiom_2(&l),
            self.axiom_3(&l),
            self.axiom_4(&l),
            self.axiom_5(&l, c),
            self.axiom_6(&l),
        ]
        .into_iter()
        .map(|r| r.with_c(c).with_connection(label.clone()))
        .collect()
    }

    fn hermitian_worst(&self, l: &LocalConnection, name: &str, reeb_direction: bool) -> Worst {
        let geo = l.geometry();
        let mut s = self.sampler(name);
        let mut worst = Worst::default();
        for k in 0..self.sampling.samples {
            let x = if reeb_direction && k % 2 == 0 { geo.reeb().to_vec() } else { s.tangent() };
            let y = self.xi_germ(&mut s);
            let z = self.xi_germ(&mut s);
            let jy = y.apply_j(geo);
            let pny = geo.pi(&l.covariant_germ(&x, &y));
            let pnz = geo.pi(&l.covariant_germ(&x, &z));
            let j_linear = diff_norm(geo, &geo.pi(&l.covariant_germ(&x, &jy)), &geo.j(&pny));
            let metric = (geo.metric_derivative(&x, &y, &z) - geo.g(&pny, &z.value) - geo.g(&y.value, &pnz))
                .value()
                .abs();
            worst.offer(j_linear.max(metric), &[&x, &y.value, &z.value]);
        }
        worst
    }

    fn axiom_1(&self, l: &LocalConnection) -> CheckResult {
        self.result("axiom-1", self.hermitian_worst(l, "axiom-1", false))
    }

    fn axiom_2(&self, l: &LocalConnection) -> CheckResult {
        let geo = l.geometry();
        let mut s = self.sampler("axiom-2");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = self.xi_germ(&mut s);
            let jy = y.apply_j(geo);
            let t = geo.pi(&l.torsion_germs(&jy, &y));
            worst.offer(norm(geo, &t), &[&y.value]);
        }
        self.result("axiom-2", worst)
    }

    fn axiom_3(&self, l: &LocalConnection) -> CheckResult {
        let geo = l.geometry();
        let reeb = Germ::reeb(geo);
        let mut s = self.sampler("axiom-3");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = Germ::constant(&s.tangent());
            worst.offer(norm(geo, &l.torsion_germs(&reeb, &y)), &[&y.value]);
        }
        self.result("axiom-3", worst)
    }

    fn axiom_4(&self, l: &LocalConnection) -> CheckResult {
        let geo = l.geometry();
        let reeb = Germ::reeb(geo);
        let mut s = self.sampler("axiom-4");
        let mut worst = Worst::default();
        worst.offer(norm(geo, &l.covariant_germ(geo.reeb(), &reeb)), &[geo.reeb()]);
        for _ in 0..self.sampling.samples {
            let y = s.tangent();
            worst.offer(geo.lambda_of(&l.covariant_germ(&y, &reeb)).value().abs(), &[&y]);
        }
        self.result("axiom-4", worst)
    }

    fn axiom_5(&self, l: &LocalConnection, c: f64) -> CheckResult {
        let geo = l.geometry();
        let reeb = Germ::reeb(geo);
        let mut s = self.sampler("axiom-5c");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = s.xi();
            let lhs = linalg::add(
                &l.covariant_germ(&geo.j(&y), &reeb),
                &geo.j(&l.covariant_germ(&y, &reeb)),
            );
            worst.offer(diff_norm(geo, &lhs, &linalg::scale(&y, Dual::constant(c))), &[&y]);
        }
        self.result("axiom-5c", worst)
    }

    fn axiom_6(&self, l: &LocalConnection) -> CheckResult {
        self.result("axiom-6", self.reeb_metric_worst(l, "axiom-6"))
    }

    fn reeb_metric_worst(&self, l: &LocalConnection, name: &str) -> Worst {
        let geo = l.geometry();
        let reeb = Germ::reeb(geo);
        let mut s = self.sampler(name);
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = s.xi();
            let z = self.xi_germ(&mut s);
            let r = geo.g(&l.covariant_germ(&y, &reeb), &z.value) + geo.g(geo.reeb(), &l.covariant_germ(&y, &z));
            worst.offer(r.value().abs(), &[&y, &z.value]);
        }
        worst
    }

    // ---- CR-holomorphicity ----

    /// `∇_{X_λ}λ` and `∇_Y λ + J∇_{JY}λ` for `∇^{λ;c}`.
    pub fn cr_form(&self, c: f64) -> (CheckResult, CheckResult) {
        let conn = AffineConnection::triad_connection(&self.triad, c);
        let l = self.local(&conn);
        let geo = l.geometry();
        let reeb_part = covector_norm(geo, &nabla_lambda(&l, geo.reeb()));
        let mut reeb_worst = Worst::default();
        reeb_worst.offer(reeb_part, &[geo.reeb()]);

        let mut s = self.sampler("cr-holomorphic");
        let mut worst = Worst::default();
        let jt = geo.values.j.transpose();
        for _ in 0..self.sampling.samples {
            let y = s.xi();
            let r = linalg::add(&nabla_lambda(&l, &y), &jt.matvec(&nabla_lambda(&l, &geo.j(&y))));
            worst.offer(covector_norm(geo, &r), &[&y]);
        }
        let name = if c == 0.0 { "cr-holomorphic" } else { "control-cr-defect" };
        (
            self.result("cr-reeb", reeb_worst).with_c(c).with_connection(conn.label()),
            self.result(name, worst).with_c(c).with_connection(conn.label()),
        )
    }

    // ---- scaling and naturality ----

    /// `∇^{aλ;1}` against `∇^{λ;b}` on random vector pairs.
    fn scaling_residual(&self, a: f64, b: f64) -> Result<Worst> {
        let scaled = self.triad.scaled(a)?;
        let lhs = AffineConnection::triad_connection(&scaled, 1.0).local(&self.point)?;
        let rhs = self.local(&AffineConnection::triad_connection(&self.triad, b));
        let geo = &*self.geometry;
        let zero = vec![Dual::zero(); geo.dim()];
        let mut s = self.sampler("scaling");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (x, y) = (s.tangent(), s.tangent());
            let r = diff_norm(geo, &lhs.apply(&x, &y, &zero), &rhs.apply(&x, &y, &zero));
            worst.offer(r, &[&x, &y]);
        }
        Ok(worst)
    }

    pub fn scaling(&self, a: f64) -> CheckResult {
        match self.scaling_residual(a, a) {
            Ok(w) => self.result("scaling", w).with_c(a),
            Err(e) => CheckResult::failed("scaling", &self.point, e).with_c(a),
        }
    }

    /// `∇^{aλ;1}` against `∇^{λ;1}`, which must differ.
    pub fn scaling_mismatch(&self, a: f64) -> CheckResult {
        match self.scaling_residual(a, 1.0) {
            Ok(w) => self.result("control-scaling-mismatch", w).with_c(a),
            Err(e) => CheckResult::failed("control-scaling-mismatch", &self.point, e).with_c(a),
        }
    }

    pub fn naturality(&self, map: &StrictContactMap, c: f64) -> CheckResult {
        let out = self.naturality_worst(map, c).map(|w| self.result("naturality", w));
        out.unwrap_or_else(|e| CheckResult::failed("naturality", &self.point, e))
            .with_c(c)
            .with_note(map.label().to_string())
    }

    fn naturality_worst(&self, map: &StrictContactMap, c: f64) -> Result<Worst> {
        map.verify_strict(&self.triad, &self.point)?;
        let q = self.point.lift();
        let image = map.forward_at(&q);
        let d = map.differential_at(&q);
        let d_inv = d.inverse().ok_or(crate::error::GeometryError::NonFinite("differential inverse"))?;
        let pulled = AffineConnection::triad_connection(&map.pull_back(&self.triad), c).local_at(&q)?;
        let pushed = AffineConnection::triad_connection(&self.triad, c).local_at(&image)?;
        let geo = pulled.geometry();
        let zero = vec![Dual::zero(); geo.dim()];
        let engine = self.triad.engine();
        let mut s = self.sampler("naturality");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (x, y) = (s.tangent(), s.tangent());
            let lhs = pulled.apply(&x, &y, &zero);
            // φ_*Y near φ(p) has derivative (∂_X dφ)·Y along dφ·X
            let dy = engine.derivative(|r| map.differential_at(r).matvec(&y), &q, &x);
            let rhs = d_inv.matvec(&pushed.apply(&d.matvec(&x), &d.matvec(&y), &dy));
            worst.offer(diff_norm(geo, &lhs, &rhs), &[&x, &y]);
        }
        Ok(worst)
    }

    // ---- explicit formula and frames ----

    /// The connection against an independent assembly of `∇^LC + B1 + B2(c)`.
    pub fn explicit_formula(&self, c: f64) -> CheckResult {
        let geo = &*self.geometry;
        let l = self.local(&AffineConnection::triad_connection(&self.triad, c));
        let zero = vec![Dual::zero(); geo.dim()];
        let mut worst = Worst::default();
        for k in 0..geo.dim() {
            let x = linalg::basis(geo.dim(), k);
            for j in 0..geo.dim() {
                let y = linalg::basis(geo.dim(), j);
                let lc = geo.christoffel[k].column(j);
                let mut expected = linalg::add(&lc, &tensor_b1(geo, &x, &y));
                if c != -1.0 {
                    expected = linalg::add(&expected, &tensor_b2(geo, c, &x, &y));
                }
                let r = linalg::max_abs(&linalg::values(&linalg::sub(&l.apply(&x, &y, &zero), &expected)));
                worst.offer(r, &[&x, &y]);
            }
        }
        self.result("explicit-formula", worst).with_c(c)
    }

    fn frame_jet(&self) -> std::result::Result<&FrameJet, &str> {
        self.frame.as_ref().map_err(|e| e.as_str())
    }

    pub fn frame_checks(&self, c: f64) -> Vec<CheckResult> {
        let names = ["gamma-cross-check", "structure-equation", "skew-hermitian"];
        let jet = match self.frame_jet() {
            Ok(jet) => jet,
            Err(e) => {
                return names
                    .iter()
                    .map(|n| CheckResult::failed(n, &self.point, e).with_c(c))
                    .collect()
            }
        };
        let l = self.local(&AffineConnection::triad_connection(&self.triad, c));
        let cm = frame::connection_matrix(&l, jet);
        let table = frame::gamma_table(&self.geometry, jet, c);
        let scalar = |name: &str, r: f64| {
            let mut w = Worst::default();
            w.offer(r, &[]);
            self.result(name, w).with_c(c)
        };
        vec![
            scalar("gamma-cross-check", frame::gamma_discrepancy(&table, &cm)),
            scalar("structure-equation", frame::structure_residual(&l, jet, true)),
            scalar("skew-hermitian", frame::hermitian_residual(&cm).max()),
        ]
    }

    pub fn levi_civita_frame_checks(&self) -> Vec<CheckResult> {
        let names = ["structure-equation-levi-civita", "frame-orthonormal"];
        let jet = match self.frame_jet() {
            Ok(jet) => jet,
            Err(e) => return names.iter().map(|n| CheckResult::failed(n, &self.point, e)).collect(),
        };
        let l = self.local(&AffineConnection::levi_civita(&self.triad));
        let (gram, duality) = jet.orthonormality(&self.geometry);
        let scalar = |name: &str, r: f64| {
            let mut w = Worst::default();
            w.offer(r, &[]);
            self.result(name, w)
        };
        vec![
            scalar("structure-equation-levi-civita", frame::structure_residual(&l, jet, true)),
            scalar("frame-orthonormal", gram.max(duality)),
        ]
    }

    // ---- Levi-Civita identities ----

    pub fn levi_civita_lemmas(&self) -> Vec<CheckResult> {
        vec![
            self.compatibility_identities(),
            self.lie_reeb_j_symmetric(),
            self.reeb_geodesic(),
            self.nabla_j_nijenhuis(),
            self.nijenhuis_reeb(),
            self.nijenhuis_j_relations(),
            self.nabla_j_xi_identity(),
            self.nabla_reeb_j(),
            self.lc_reeb_derivative(),
        ]
    }

    fn compatibility_identities(&self) -> CheckResult {
        let geo = &*self.geometry;
        let v = &geo.values;
        let mut s = self.sampler("compatibility-identities");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (x, y) = (s.xi(), s.xi());
            let (jx, jy) = (geo.j(&x), geo.j(&y));
            let r = [
                v.g(&jx, &jy) - v.dlambda(&x, &jy),
                v.g(&x, &jy) + v.dlambda(&x, &y),
                v.g(&jx, &y) + v.g(&x, &jy),
                v.dlambda(&jx, &jy) - v.dlambda(&x, &y),
            ]
            .iter()
            .map(|d| d.value().abs())
            .fold(0.0, f64::max);
            worst.offer(r, &[&x, &y]);
        }
        self.result("compatibility-identities", worst)
    }

    fn lie_reeb_j_symmetric(&self) -> CheckResult {
        let geo = &*self.geometry;
        let lj = &geo.lie_reeb_j;
        let mut s = self.sampler("lie-reeb-j-symmetric");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (y, z) = (s.xi(), s.xi());
            let r = geo.g(&lj.matvec(&y), &z) - geo.g(&y, &lj.matvec(&z));
            worst.offer(r.value().abs(), &[&y, &z]);
        }
        self.result("lie-reeb-j-symmetric", worst)
    }

    fn lc_covariant(&self, x: &[Dual], y: &Germ) -> Vec<Dual> {
        linalg::add(&y.derivative(x), &self.geometry.christoffel_apply(x, &y.value))
    }

    fn reeb_geodesic(&self) -> CheckResult {
        let geo = &*self.geometry;
        let reeb = Germ::reeb(geo);
        let mut s = self.sampler("reeb-geodesic");
        let mut worst = Worst::default();
        worst.offer(norm(geo, &self.lc_covariant(geo.reeb(), &reeb)), &[geo.reeb()]);
        for _ in 0..self.sampling.samples {
            let z = s.tangent();
            worst.offer(geo.lambda_of(&self.lc_covariant(&z, &reeb)).value().abs(), &[&z]);
        }
        self.result("reeb-geodesic", worst)
    }

    fn nabla_j_nijenhuis(&self) -> CheckResult {
        let geo = &*self.geometry;
        let mut s = self.sampler("nabla-j-nijenhuis");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (x, y, z) = (s.tangent(), s.tangent(), s.tangent());
            let jx = geo.j(&x);
            let lhs = geo.g(&geo.nabla_j_along(&x).matvec(&y), &z) * 2.0;
            let rhs = geo.g(&geo.nijenhuis(&Germ::constant(&y), &Germ::constant(&z)), &jx) - geo.g(&jx, &geo.j(&y)) * geo.lambda_of(&z)
                + geo.g(&jx, &geo.j(&z)) * geo.lambda_of(&y);
            worst.offer((lhs - rhs).value().abs(), &[&x, &y, &z]);
        }
        self.result("nabla-j-nijenhuis", worst)
    }

    fn nijenhuis_reeb(&self) -> CheckResult {
        let geo = &*self.geometry;
        let reeb_germ = Germ::reeb(geo);
        let reeb = geo.reeb();
        let lj = &geo.lie_reeb_j;
        let mut s = self.sampler("nijenhuis-reeb");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = s.xi();
            let zg = self.xi_germ(&mut s);
            let z = zg.value.clone();
            let jljz = geo.j(&lj.matvec(&z));
            let first = norm(geo, &linalg::add(&geo.nijenhuis(&reeb_germ, &zg), &jljz));
            let second = diff_norm(geo, &geo.nijenhuis(&zg, &reeb_germ), &jljz);
            let third = geo.g(&geo.nabla_j_along(&y).matvec(reeb), &z) * 2.0 + geo.g(&lj.matvec(&z), &y)
                - geo.g(&y, &z);
            let fourth = geo.g(&geo.nabla_j_along(&y).matvec(&z), reeb) * 2.0 - geo.g(&lj.matvec(&z), &y)
                + geo.g(&y, &z);
            let r = first.max(second).max(third.value().abs()).max(fourth.value().abs());
            worst.offer(r, &[&y, &z]);
        }
        self.result("nijenhuis-reeb", worst)
    }

    fn nijenhuis_j_relations(&self) -> CheckResult {
        let geo = &*self.geometry;
        let mut s = self.sampler("nijenhuis-j-relations");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = self.xi_germ(&mut s);
            let z = self.xi_germ(&mut s);
            let (jy, jz) = (y.apply_j(geo), z.apply_j(geo));
            let n_y_jz = geo.nijenhuis(&y, &jz);
            let first = diff_norm(geo, &geo.j(&n_y_jz), &geo.pi(&geo.nijenhuis(&y, &z)));
            let second = norm(geo, &geo.pi(&linalg::add(&n_y_jz, &geo.nijenhuis(&z, &jy))));
            worst.offer(first.max(second), &[&y.value, &z.value]);
        }
        self.result("nijenhuis-j-relations", worst)
    }

    fn nabla_j_xi_identity(&self) -> CheckResult {
        let geo = &*self.geometry;
        let mut s = self.sampler("nabla-j-xi-identity");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (x, y) = (s.xi(), s.xi());
            let a = geo.pi(&geo.nabla_j_along(&geo.j(&y)).matvec(&x));
            let b = geo.j(&geo.nabla_j_along(&y).matvec(&x));
            worst.offer(norm(geo, &linalg::add(&a, &b)), &[&x, &y]);
        }
        self.result("nabla-j-xi-identity", worst)
    }

    fn nabla_reeb_j(&self) -> CheckResult {
        let geo = &*self.geometry;
        let m = geo.nabla_j_along(geo.reeb());
        let mut s = self.sampler("nabla-reeb-j");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = s.tangent();
            worst.offer(norm(geo, &m.matvec(&y)), &[&y]);
        }
        self.result("nabla-reeb-j", worst)
    }

    fn lc_reeb_derivative(&self) -> CheckResult {
        let geo = &*self.geometry;
        let reeb = Germ::reeb(geo);
        let mut s = self.sampler("lc-reeb-derivative");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = s.xi();
            let jy = geo.j(&y);
            let expected = linalg::scale(&linalg::add(&jy, &geo.lie_reeb_j.matvec(&jy)), Dual::constant(0.5));
            worst.offer(diff_norm(geo, &self.lc_covariant(&y, &reeb), &expected), &[&y]);
        }
        self.result("lc-reeb-derivative", worst)
    }

    // ---- ∇^{tmp;1} identities ----

    /// Identities of `∇^{tmp;1}`; `b1_scale` other than 1 injects a fault.
    pub fn tmp1_lemmas(&self) -> Vec<CheckResult> {
        let l = self.local(&AffineConnection::tmp1(&self.triad));
        vec![
            self.result("tmp1-j-linear", self.tmp1_j_linear(&l)),
            self.p_metric_skew(),
            self.result("tmp1-hermitian", self.hermitian_worst(&l, "tmp1-hermitian", true)),
            self.result("tmp1-reeb-metric", self.reeb_metric_worst(&l, "tmp1-reeb-metric")),
            self.result("tmp1-torsion", self.tmp1_torsion(&l)),
            self.p_bracket_identity(),
            self.p_xi_projection(),
        ]
    }

    fn tmp1_j_linear(&self, l: &LocalConnection) -> Worst {
        let geo = l.geometry();
        let mut s = self.sampler("tmp1-j-linear");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let x = s.tangent();
            let y = self.xi_germ(&mut s);
            let jy = y.apply_j(geo);
            let a = geo.pi(&l.covariant_germ(&x, &jy));
            let b = geo.j(&geo.pi(&l.covariant_germ(&x, &y)));
            worst.offer(diff_norm(geo, &a, &b), &[&x, &y.value]);
        }
        worst
    }

    fn tmp1_torsion(&self, l: &LocalConnection) -> Worst {
        let geo = l.geometry();
        let reeb = Germ::reeb(geo);
        let mut s = self.sampler("tmp1-torsion");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = self.xi_germ(&mut s);
            let z = self.xi_germ(&mut s);
            let reeb_part = norm(geo, &l.torsion_germs(&reeb, &y));
            let t = l.torsion_germs(&y, &z);
            let quarter_n = linalg::scale(&geo.pi(&geo.nijenhuis(&y, &z)), Dual::constant(0.25));
            let xi_part = diff_norm(geo, &geo.pi(&t), &quarter_n);
            let lambda_part = geo.lambda_of(&t).value().abs();
            worst.offer(reeb_part.max(xi_part).max(lambda_part), &[&y.value, &z.value]);
        }
        worst
    }

    fn p_metric_skew(&self) -> CheckResult {
        let geo = &*self.geometry;
        let mut s = self.sampler("p-metric-skew");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (x, y, z) = (s.xi(), s.xi(), s.xi());
            let r = geo.g(&crate::connection::tensor_p(geo, &x, &y), &z)
                + geo.g(&y, &crate::connection::tensor_p(geo, &x, &z));
            worst.offer(r.value().abs(), &[&x, &y, &z]);
        }
        self.result("p-metric-skew", worst)
    }

    fn p_bracket_identity(&self) -> CheckResult {
        let geo = &*self.geometry;
        let mut s = self.sampler("p-bracket-identity");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = self.xi_germ(&mut s);
            let z = self.xi_germ(&mut s);
            let (jy, jz) = (y.apply_j(geo), z.apply_j(geo));
            let lhs = linalg::sub(
                &crate::connection::tensor_p(geo, &z.value, &y.value),
                &crate::connection::tensor_p(geo, &y.value, &z.value),
            );
            let mut rhs = jy.bracket(&jz);
            rhs = linalg::sub(&rhs, &geo.pi(&y.bracket(&z)));
            rhs = linalg::sub(&rhs, &geo.j(&jy.bracket(&z)));
            rhs = linalg::sub(&rhs, &geo.j(&y.bracket(&jz)));
            let rhs = linalg::scale(&rhs, Dual::constant(0.25));
            worst.offer(diff_norm(geo, &lhs, &rhs), &[&y.value, &z.value]);
        }
        self.result("p-bracket-identity", worst)
    }

    fn p_xi_projection(&self) -> CheckResult {
        let geo = &*self.geometry;
        let mut s = self.sampler("p-xi-projection");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (y, z) = (s.xi(), s.xi());
            let lhs = geo.pi(&crate::connection::tensor_p(geo, &y, &z));
            let rhs = linalg::scale(&geo.j(&geo.nabla_j_along(&y).matvec(&z)), Dual::constant(0.5));
            worst.offer(diff_norm(geo, &lhs, &rhs), &[&y, &z]);
        }
        self.result("p-xi-projection", worst)
    }

    // ---- identities of the family ∇^{λ;c} ----

    pub fn family_lemmas(&self, c: f64) -> Vec<CheckResult> {
        let conn = AffineConnection::triad_connection(&self.triad, c);
        let l = self.local(&conn);
        vec![
            self.reeb_derivative_formula(&l, c),
            self.torsion_parts(&l, c).0,
            self.torsion_parts(&l, c).1,
            self.reeb_preserves_dlambda(&l),
            self.torsion_type(&l),
        ]
        .into_iter()
        .map(|r| r.with_c(c).with_connection(conn.label()))
        .collect()
    }

    fn reeb_derivative_formula(&self, l: &LocalConnection, c: f64) -> CheckResult {
        let geo = l.geometry();
        let reeb = Germ::reeb(geo);
        let mut s = self.sampler("reeb-derivative-formula");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let y = s.xi();
            let jy = geo.j(&y);
            let expected = linalg::add(
                &linalg::scale(&jy, Dual::constant(-0.5 * c)),
                &linalg::scale(&geo.lie_reeb_j.matvec(&jy), Dual::constant(0.5)),
            );
            worst.offer(diff_norm(geo, &l.covariant_germ(&y, &reeb), &expected), &[&y]);
        }
        self.result("reeb-derivative-formula", worst)
    }

    fn torsion_parts(&self, l: &LocalConnection, c: f64) -> (CheckResult, CheckResult) {
        let geo = l.geometry();
        let mut s = self.sampler("torsion-parts");
        let (mut lambda_worst, mut xi_worst) = (Worst::default(), Worst::default());
        for _ in 0..self.sampling.samples {
            let y = self.xi_germ(&mut s);
            let z = self.xi_germ(&mut s);
            let t = l.torsion_germs(&y, &z);
            let expected = geo.values.dlambda(&y.value, &z.value) * (1.0 + c);
            lambda_worst.offer((geo.lambda_of(&t) - expected).value().abs(), &[&y.value, &z.value]);
            let jy = y.apply_j(geo);
            let jz = z.apply_j(geo);
            let lie = linalg::add(&geo.lie_derivative_j(&jy, &z), &geo.lie_derivative_j(&y, &jz));
            let lie = linalg::scale(&lie, Dual::constant(0.25));
            xi_worst.offer(diff_norm(geo, &geo.pi(&t), &lie), &[&y.value, &z.value]);
        }
        (
            self.result("torsion-lambda-part", lambda_worst),
            self.result("torsion-xi-part", xi_worst),
        )
    }

    fn reeb_preserves_dlambda(&self, l: &LocalConnection) -> CheckResult {
        let geo = l.geometry();
        let reeb = geo.reeb();
        let m = l.coefficient_matrix(reeb);
        let w = &geo.values.omega;
        let dw: Mat<Dual> = geo.domega_along(reeb).sub(&m.transpose().matmul(w)).sub(&w.matmul(&m));
        let mut s = self.sampler("reeb-preserves-dlambda");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (a, b) = (s.tangent(), s.tangent());
            worst.offer(dw.bilinear(&a, &b).value().abs(), &[&a, &b]);
        }
        self.result("reeb-preserves-dlambda", worst)
    }

    fn torsion_type(&self, l: &LocalConnection) -> CheckResult {
        let geo = l.geometry();
        let mut s = self.sampler("torsion-type");
        let mut worst = Worst::default();
        for _ in 0..self.sampling.samples {
            let (y, z) = (s.xi(), s.xi());
            let (jy, jz) = (geo.j(&y), geo.j(&z));
            let tp = |a: &[Dual], b: &[Dual]| geo.pi(&l.torsion_vectors(a, b));
            let t_jy_z = tp(&jy, &z);
            let first = diff_norm(geo, &t_jy_z, &tp(&y, &jz));
            let second = diff_norm(geo, &geo.j(&t_jy_z), &tp(&y, &z));
            worst.offer(first.max(second), &[&y, &z]);
        }
        self.result("torsion-type", worst)
    }

    // ---- fault injections ----

    /// `∇^{λ;1}` tested against `(5;0)`.
    pub fn control_wrong_c(&self) -> CheckResult {
        let conn = AffineConnection::triad_connection(&self.triad, 1.0);
        let l = self.local(&conn);
        let r = self.axiom_5(&l, 0.0);
        let mut out = CheckResult::new("control-wrong-c", &self.point, r.residual).with_c(0.0);
        out.witness = r.witness;
        out.with_connection(conn.label())
    }

    /// The Levi-Civita connection against the six axioms with `c = 0`.
    pub fn control_levi_civita(&self) -> CheckResult {
        let conn = AffineConnection::levi_civita(&self.triad);
        self.battery("control-levi-civita", self.axioms(&conn, 0.0), conn.label())
            .with_c(0.0)
    }

    /// `∇^LC − B1` against the `∇^{tmp;1}` identities.
    pub fn control_b1_sign_flip(&self) -> CheckResult {
        let conn = AffineConnection::tmp1(&self.triad).with_b1_scale(-1.0);
        let l = self.local(&conn);
        let checks = vec![
            self.result("tmp1-j-linear", self.tmp1_j_linear(&l)),
            self.result("tmp1-hermitian", self.hermitian_worst(&l, "tmp1-hermitian", true)),
            self.result("tmp1-reeb-metric", self.reeb_metric_worst(&l, "tmp1-reeb-metric")),
            self.result("tmp1-torsion", self.tmp1_torsion(&l)),
        ];
        let out = self.battery("control-b1-sign-flip", checks, conn.label());
        let geo = &*self.geometry;
        let mut s = self.sampler("control-b1-sign-flip");
        let b1_size = (0..self.sampling.samples)
            .map(|_| {
                let (y, z) = (s.tangent(), s.tangent());
                norm(geo, &tensor_b1(geo, &y, &z))
            })
            .fold(0.0, f64::max);
        if b1_size < INERT_THRESHOLD {
            let note = format!("{INERT_NOTE}: B1 vanishes at this point (max |B1| = {b1_size:.3e})");
            out.with_note(note)
        } else {
            out
        }
    }

    /// Largest residual of a battery, naming the worst member.
    fn battery(&self, name: &str, checks: Vec<CheckResult>, label: String) -> CheckResult {
        let mut worst = Worst::default();
        let mut summary = Vec::new();
        let mut worst_name = String::new();
        for r in checks {
            summary.push(format!("{} {:.3e}", r.name, r.residual));
            let before = worst.residual;
            worst.merge(Worst { residual: r.residual, witness: r.witness.clone() });
            if worst.residual != before || worst_name.is_empty() {
                worst_name = r.name.clone();
            }
        }
        self.result(name, worst)
            .with_connection(label)
            .with_note(format!("largest: {worst_name}; {}", summary.join(", ")))
    }
}

fn at_point<T>(triad: &ContactTriad, p: &Point, f: impl FnOnce(&PointContext) -> T) -> Result<T> {
    Ok(f(&PointContext::new(triad, p, Sampling::default())?))
}

/// One result per axiom for `∇^{λ;c}`.
pub fn check_axioms(triad: &ContactTriad, c: f64, p: &Point) -> Result<Vec<CheckResult>> {
    at_point(triad, p, |ctx| ctx.axioms(&AffineConnection::triad_connection(triad, c), c))
}

/// `∇_{X_λ}λ = 0` and the CR residual for `∇^{λ;c}`.
pub fn check_cr_form(triad: &ContactTriad, c: f64, p: &Point) -> Result<(CheckResult, CheckResult)> {
    at_point(triad, p, |ctx| ctx.cr_form(c))
}

pub fn check_scaling(triad: &ContactTriad, a: f64, p: &Point) -> Result<CheckResult> {
    at_point(triad, p, |ctx| ctx.scaling(a))
}

pub fn check_naturality(triad: &ContactTriad, map: &StrictContactMap, c: f64, p: &Point) -> Result<CheckResult> {
    map.verify_strict(triad, p)?;
    at_point(triad, p, |ctx| ctx.naturality(map, c))
}

/// Levi-Civita and `∇^{tmp;1}` identities plus the family identities for `c = 0`.
pub fn check_lemma_suite(triad: &ContactTriad, p: &Point) -> Result<Vec<CheckResult>> {
    at_point(triad, p, |ctx| {
        let mut out = ctx.levi_civita_lemmas();
        out.extend(ctx.tmp1_lemmas());
        out.extend(ctx.family_lemmas(0.0));
        out
    })
}
