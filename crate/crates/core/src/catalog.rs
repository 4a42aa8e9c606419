//! Example triads with closed-form strict contactomorphisms.

use std::f64::consts::TAU;

use crate::dual::{Dual, Scalar};
use crate::error::{GeometryError, Result};
use crate::field::{DomainBox, OneForm};
use crate::linalg::Mat;
use crate::maps::{self, StrictContactMap};
use crate::triad::ContactTriad;

/// Perturbation size used by the catalog's perturbed entries.
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct Example {
    pub id: String,
    pub description: String,
    pub triad: ContactTriad,
    pub maps: Vec<StrictContactMap>,
    /// Whether the scaling comparison is run for this example.
    pub supports_scaling: bool,
    pub epsilon: Option<f64>,
}

impl Example {
    pub fn dim(&self) -> usize {
        self.triad.dim()
    }
}

/// `λ = dz − Σ y_i dx_i` in coordinates `(x_1..x_n, y_1..y_n, z)`.
fn standard_form(n: usize) -> OneForm {
    let dim = 2 * n + 1;
    OneForm::new(dim, move |q| {
        let mut out = vec![Dual::zero(); dim];
        for i in 0..n {
            out[i] = -q[n + i];
        }
        out[2 * n] = Dual::one();
        out
    })
}

/// `ξ`-frame `∂x_i + y_i ∂z, ∂y_i`.
fn standard_frame(n: usize) -> impl Fn(&[Dual]) -> Vec<Vec<Dual>> + Send + Sync + 'static {
    let dim = 2 * n + 1;
    move |q| {
        let mut frame = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![Dual::zero(); dim];
            e[i] = Dual::one();
            e[2 * n] = q[n + i];
            frame.push(e);
        }
        for i in 0..n {
            let mut e = vec![Dual::zero(); dim];
            e[n + i] = Dual::one();
            frame.push(e);
        }
        frame
    }
}

/// `(a, b, c̃)` with `J e_1 = a e_1 + b e_2`, `J e_2 = c̃ e_1 − a e_2`.
fn perturbed_block(eps: f64, phase: Dual) -> (Dual, Dual, Dual) {
    let a = phase.sin() * eps;
    let b = (a * a + 1.0).sqrt() * (phase.cos() * eps).exp();
    let c = -(a * a + 1.0) / b;
    (a, b, c)
}

fn r2n1(n: usize, eps: Option<f64>) -> Result<ContactTriad> {
    let dim = 2 * n + 1;
    let j_action = move |q: &[Dual]| {
        let mut m = Mat::zeros(2 * n, 2 * n);
        for i in 0..n {
            match eps {
                None => {
                    m[(n + i, i)] = Dual::one();
                    m[(i, n + i)] = -Dual::one();
                }
                Some(eps) => {
                    let (a, b, c) = perturbed_block(eps, q[2 * n] + i as f64);
                    m[(i, i)] = a;
                    m[(n + i, i)] = b;
                    m[(i, n + i)] = c;
                    m[(n + i, n + i)] = -a;
                }
            }
        }
        m
    };
    ContactTriad::new(standard_form(n), standard_frame(n), j_action, DomainBox::cube(dim, -1.0, 1.0))
}

/// `ℝ^{2n+1}` with `λ = dz − Σ y_i dx_i` and `J(∂x_i + y_i∂z) = ∂y_i`.
pub fn standard(n: usize) -> Result<ContactTriad> {
    r2n1(n, None)
}

/// The standard form with a `z`-dependent `J`; block `i` uses phase `z + i`.
pub fn perturbed(n: usize, eps: f64) -> Result<ContactTriad> {
    if !(eps.is_finite() && eps.abs() <= 0.5) {
        return Err(GeometryError::InvalidParameter(format!(
            "perturbation must satisfy |ε| ≤ 0.5, got {eps}"
        )));
    }
    r2n1(n, Some(eps))
}

/// `λ = cos z dx + sin z dy` on the chart `[0, 2π)³`, `J ∂z = −sin z ∂x + cos z ∂y`.
pub fn tight_torus() -> Result<ContactTriad> {
    let lambda = OneForm::new(3, |q| vec![q[2].cos(), q[2].sin(), Dual::zero()]);
    let frame = |q: &[Dual]| {
        vec![
            vec![Dual::zero(), Dual::zero(), Dual::one()],
            vec![-q[2].sin(), q[2].cos(), Dual::zero()],
        ]
    };
    let m = Mat::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).lift::<Dual>();
    ContactTriad::new(lambda, frame, move |_| m.clone(), DomainBox::cube(3, 0.0, TAU))
}

fn heisenberg_maps(dim: usize) -> Vec<StrictContactMap> {
    vec![
        maps::translation(dim, dim - 1, 0.3),
        maps::translation(dim, 0, 0.7),
        maps::heisenberg_shift(dim, 0.4),
    ]
}

fn entry(id: &str, description: &str, triad: ContactTriad, maps: Vec<StrictContactMap>) -> Example {
    Example {
        id: id.into(),
        description: description.into(),
        triad,
        maps,
        supports_scaling: false,
        epsilon: None,
    }
}

pub fn catalog() -> Vec<Example> {
    let mut out = Vec::new();
    for n in 1..=4 {
        let dim = 2 * n + 1;
        let mut ex = entry(
            &format!("r{dim}-standard"),
            &format!("R^{dim}, λ = dz − Σ y_i dx_i, J(∂x_i + y_i ∂z) = ∂y_i"),
            standard(n).expect("standard triad"),
            heisenberg_maps(dim),
        );
        ex.supports_scaling = n == 1;
        out.push(ex);
    }
    out.push(entry(
        "t3-tight",
        "T^3 chart [0, 2π)^3, λ = cos z dx + sin z dy, J rotates ξ by +90°",
        tight_torus().expect("tight torus triad"),
        vec![maps::tight_reeb_flow(0.5), maps::tight_rotation(0.3)],
    ));
    for n in 1..=2 {
        let dim = 2 * n + 1;
        let mut ex = entry(
            &format!("r{dim}-perturbed-j"),
            &format!("R^{dim}, standard λ, z-dependent J with ε = {DEFAULT_EPSILON}"),
            perturbed(n, DEFAULT_EPSILON).expect("perturbed triad"),
            heisenberg_maps(dim),
        );
        ex.supports_scaling = n == 1;
        ex.epsilon = Some(DEFAULT_EPSILON);
        out.push(ex);
    }
    out
}

pub fn example(id: &str) -> Option<Example> {
    catalog().into_iter().find(|e| e.id == id)
}

pub fn ids() -> Vec<String> {
    catalog().into_iter().map(|e| e.id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_entry_validates_at_sampled_points() {
        for ex in catalog() {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..100 {
                let p = ex.triad.domain().sample(&mut rng);
                ex.triad.validate_at(&p).unwrap_or_else(|e| panic!("{}: {e}", ex.id));
                for m in &ex.maps {
                    m.verify_strict(&ex.triad, &p)
                        .unwrap_or_else(|e| panic!("{} {}: {e}", ex.id, m.label()));
                }
            }
        }
    }

    #[test]
    fn unperturbed_limit_is_standard() {
        let a = perturbed(1, 0.0).unwrap();
        let b = standard(1).unwrap();
        let p = Point::new(vec![0.2, -0.7, 0.4]).unwrap();
        assert_eq!(a.extend_j(&p).unwrap(), b.extend_j(&p).unwrap());
    }

    #[test]
    fn contact_coefficients() {
        let p = Point::new(vec![0.5, 1.5, 2.5]).unwrap();
        assert!((example("r3-standard").unwrap().triad.contact_coefficient(&p).unwrap() - 1.0).abs() < 1e-12);
        assert!((tight_torus().unwrap().contact_coefficient(&p).unwrap() + 1.0).abs() < 1e-12);
        let reeb = tight_torus().unwrap().reeb_vector_field(&p).unwrap();
        assert!((reeb[0] - 2.5f64.cos()).abs() < 1e-12 && (reeb[1] - 2.5f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn ids_are_unique() {
        let mut ids = ids();
        let count = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), count);
        assert!(ids.contains(&"r9-standard".to_string()));
    }

    #[test]
    fn rejects_large_perturbation() {
        assert!(perturbed(1, 0.6).is_err());
    }
}
