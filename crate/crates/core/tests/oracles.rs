//! Test-only oracles computed independently of the library's derivative machinery.

use contact_triad::catalog;
use contact_triad::connection::AffineConnection;
use contact_triad::dual::{Dual, Scalar};
use contact_triad::field::{Point, VectorField};
use contact_triad::linalg::{self, Mat};
use contact_triad::local::{Germ, LocalGeometry};
use contact_triad::triad::ContactTriad;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    Point::new((0..dim).map(|_| rng.random_range(-0.9..0.9)).collect()).unwrap()
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `∇^{λ;c}_V W` for constant coordinate fields on `ℝ^{2n+1}` with `λ = dz − Σ y_i dx_i`,
/// written out by hand: the frame `∂x_i + y_i∂z, ∂y_i, ∂z` is parallel for `c = 0`,
/// and `c` adds `½c(−λ(W)JV − λ(V)JW + dλ(V,W)∂z)`.
fn heisenberg_covariant(n: usize, c: f64, p: &[f64], v: &[f64], w: &[f64]) -> Vec<f64> {
    let dim = 2 * n + 1;
    let y = &p[n..2 * n];
    let lambda = |u: &[f64]| u[2 * n] - (0..n).map(|i| y[i] * u[i]).sum::<f64>();
    let j = |u: &[f64]| {
        let mut out = vec![0.0; dim];
        for i in 0..n {
            out[n + i] += u[i];
            out[i] -= u[n + i];
            out[2 * n] -= y[i] * u[n + i];
        }
        out
    };
    let dlambda = |a: &[f64], b: &[f64]| (0..n).map(|i| a[i] * b[n + i] - a[n + i] * b[i]).sum::<f64>();
    let mut out = vec![0.0; dim];
    out[2 * n] = -(0..n).map(|i| v[n + i] * w[i]).sum::<f64>();
    let (jv, jw) = (j(v), j(w));
    for k in 0..dim {
        out[k] += 0.5 * c * (-lambda(w) * jv[k] - lambda(v) * jw[k]);
    }
    out[2 * n] += 0.5 * c * dlambda(v, w);
    out
}

#[test]
fn heisenberg_connection_matches_hand_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        let triad = catalog::standard(n).unwrap();
        let dim = 2 * n + 1;
        for c in [-1.0, 0.0, 0.5, 1.0] {
            let conn = AffineConnection::triad_connection(&triad, c);
            for _ in 0..5 {
                let p = random_point(&mut rng, dim);
                let (v, w) = (random_vector(&mut rng, dim), random_vector(&mut rng, dim));
                let got = conn
                    .covariant(&VectorField::constant(&v), &VectorField::constant(&w), &p)
                    .unwrap();
                let want = heisenberg_covariant(n, c, p.coords(), &v, &w);
                let err = linalg::max_abs(&linalg::sub(&got, &want));
                assert!(err < 1e-12, "n={n} c={c}: {err:e}");
            }
        }
    }
}

/// RK4 integration of the Reeb flow.
fn reeb_flow(triad: &ContactTriad, p: &[f64], t: f64) -> Vec<f64> {
    let steps = 40;
    let h = t / steps as f64;
    let field = |q: &[f64]| triad.reeb_vector_field(&Point::new(q.to_vec()).unwrap()).unwrap();
    let mut q = p.to_vec();
    for _ in 0..steps {
        let k1 = field(&q);
        let k2 = field(&linalg::axpy(&q, h / 2.0, &k1));
        let k3 = field(&linalg::axpy(&q, h / 2.0, &k2));
        let k4 = field(&linalg::axpy(&q, h, &k3));
        for i in 0..q.len() {
            q[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    q
}

/// `(φ_t^* J)(p) = dφ_t⁻¹ J(φ_t p) dφ_t` with `dφ_t` by central differences of the flow.
fn pulled_back_j(triad: &ContactTriad, p: &[f64], t: f64) -> Mat<f64> {
    let dim = p.len();
    let delta = 1e-5;
    let columns: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut plus = p.to_vec();
            let mut minus = p.to_vec();
            plus[k] += delta;
            minus[k] -= delta;
            linalg::scale(&linalg::sub(&reeb_flow(triad, &plus, t), &reeb_flow(triad, &minus, t)), 0.5 / delta)
        })
        .collect();
    let d = Mat::from_columns(&columns);
    let image = Point::new(reeb_flow(triad, p, t)).unwrap();
    let j = triad.extend_j(&image).unwrap();
    d.inverse().unwrap().matmul(&j).matmul(&d)
}

fn flow_oracle_lie_j(triad: &ContactTriad, p: &[f64]) -> Mat<f64> {
    let h = 1e-3;
    pulled_back_j(triad, p, h).sub(&pulled_back_j(triad, p, -h)).scale(0.5 / h)
}

#[test]
fn lie_reeb_j_matches_flow_oracle() {
    let cases: [(&str, &[f64]); 4] = [
        ("r3-perturbed-j", &[0.0, 0.0, 1.0]),
        ("r3-perturbed-j", &[0.4, -0.3, -0.2]),
        ("r5-perturbed-j", &[0.1, 0.2, -0.3, 0.4, 0.5]),
        ("t3-tight", &[1.0, 2.0, 3.0]),
    ];
    for (id, p) in cases {
        let triad = catalog::example(id).unwrap().triad;
        let geo = LocalGeometry::at(&triad, &Point::new(p.to_vec()).unwrap()).unwrap();
        let oracle = flow_oracle_lie_j(&triad, p);
        let err = oracle.sub(&geo.lie_reeb_j.values()).max_abs();
        assert!(err < 1e-5, "{id}: {err:e}");
    }
}

#[test]
fn perturbed_lie_reeb_j_is_nonzero() {
    let triad = catalog::example("r3-perturbed-j").unwrap().triad;
    let lj = flow_oracle_lie_j(&triad, &[0.0, 0.0, 1.0]);
    let frobenius = lj.entries().iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(frobenius > 0.01, "{frobenius}");
    let standard = catalog::example("r3-standard").unwrap().triad;
    assert!(flow_oracle_lie_j(&standard, &[0.0, 0.0, 1.0]).max_abs() < 1e-8);
}

#[test]
fn field_and_jet_evaluation_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for id in ["r3-perturbed-j", "r5-perturbed-j", "t3-tight"] {
        let triad = catalog::example(id).unwrap().triad;
        let dim = triad.dim();
        for c in [-1.0, 0.0, 1.0] {
            let conn = AffineConnection::triad_connection(&triad, c);
            for _ in 0..3 {
                let p = if id == "t3-tight" {
                    Point::new((0..3).map(|_| rng.random_range(0.1..6.0)).collect()).unwrap()
                } else {
                    random_point(&mut rng, dim)
                };
                let (x, v, w) = (random_vector(&mut rng, dim), random_vector(&mut rng, dim), random_vector(&mut rng, dim));
                let local = conn.local(&p).unwrap();
                let geo = local.geometry();
                let (yv, zw) = (triad.xi_section(&v), triad.xi_section(&w));
                let (ygerm, zgerm) = (Germ::xi_section(geo, &linalg::lift(&v)), Germ::xi_section(geo, &linalg::lift(&w)));

                let by_field = conn.covariant(&VectorField::constant(&x), &yv, &p).unwrap();
                let by_jet = linalg::values(&local.covariant_germ(&linalg::lift(&x), &ygerm));
                assert!(linalg::max_abs(&linalg::sub(&by_field, &by_jet)) < 1e-12, "{id} covariant");

                let jy = yv.mapped_by(&triad.j_field());
                let by_field = conn.torsion(&jy, &zw, &p).unwrap();
                let by_jet = linalg::values(&local.torsion_germs(&ygerm.apply_j(geo), &zgerm));
                assert!(linalg::max_abs(&linalg::sub(&by_field, &by_jet)) < 1e-12, "{id} torsion");

                let by_field = linalg::values(&contact_triad::connection::nijenhuis(&triad, &yv, &zw, &p.lift()));
                let by_jet = linalg::values(&geo.nijenhuis(&ygerm, &zgerm));
                assert!(linalg::max_abs(&linalg::sub(&by_field, &by_jet)) < 1e-12, "{id} nijenhuis");
            }
        }
    }
}

#[test]
fn wrong_parameter_defect_is_exactly_the_parameter_gap() {
    // ∇^{λ;c} against (5;c'): the defect is (c − c')Y for every Y ∈ ξ.
    let triad = catalog::example("r5-perturbed-j").unwrap().triad;
    let p = Point::new(vec![0.2, -0.1, 0.3, 0.4, -0.5]).unwrap();
    let local = AffineConnection::triad_connection(&triad, 0.75).local(&p).unwrap();
    let geo = local.geometry();
    let reeb = Germ::reeb(geo);
    let y = geo.pi(&linalg::lift(&[0.3, -0.2, 0.5, 0.1, 0.7]));
    let lhs = linalg::add(&local.covariant_germ(&geo.j(&y), &reeb), &geo.j(&local.covariant_germ(&y, &reeb)));
    let gap = linalg::sub(&lhs, &linalg::scale(&y, Dual::constant(-0.25)));
    let defect = geo.g(&gap, &gap).value().sqrt() / geo.g(&y, &y).value().sqrt();
    assert!((defect - 1.0).abs() < 1e-12, "{defect}");
}
