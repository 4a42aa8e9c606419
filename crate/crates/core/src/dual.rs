//! Multi-generator dual numbers for nested forward-mode differentiation.
//!
//! A [`Dual`] is a truncated polynomial in up to [`MAX_GENERATORS`]
//! nilpotent generators `ε_0, ε_1, ...` with `ε_g² = 0` but `ε_g ε_h ≠ 0`
//! for `g ≠ h`. Coefficients are indexed by the subset of generators in the
//! monomial, so a number carrying `k` active generators holds every mixed
//! partial derivative up to order `k` along the seeded directions.
//!
//! Nesting works by allocating a fresh generator for every derivative taken
//! inside another one (see [`crate::engine::DiffEngine`]). Perturbation
//! confusion cannot happen as long as closures do not capture `Dual` values
//! carrying generators absent from their inputs.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Maximum nesting depth of derivatives.
pub const MAX_GENERATORS: usize = 4;
const WIDTH: usize = 1 << MAX_GENERATORS;

/// Iterates over all subsets of `mask`, from `mask` itself down to the empty set.
#[derive(Clone, Copy)]
struct Subsets {
    mask: u8,
    next: Option<u8>,
}

fn subsets(mask: u8) -> Subsets {
    Subsets {
        mask,
        next: Some(mask),
    }
}

impl Iterator for Subsets {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        let current = self.next?;
        self.next = if current == 0 {
            None
        } else {
            Some((current - 1) & self.mask)
        };
        Some(current)
    }
}

/// Arithmetic shared by plain floats and dual numbers.
pub trait Scalar:
    Copy
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(v: f64) -> Self;
    /// The primal (real) part.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn recip(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn powi(self, n: i32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n.unsigned_abs() {
            acc *= self;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Truncated multivariate dual number.
#[derive(Clone, Copy)]
pub struct Dual {
    coeffs: [f64; WIDTH],
    mask: u8,
}

impl Dual {
    pub const fn constant(value: f64) -> Self {
        let mut coeffs = [0.0; WIDTH];
        coeffs[0] = value;
        Dual { coeffs, mask: 0 }
    }

    /// The pure infinitesimal `ε_g`.
    pub fn generator(g: u8) -> Self {
        assert!(
            (g as usize) < MAX_GENERATORS,
            "derivative nesting deeper than {MAX_GENERATORS} levels"
        );
        let mut coeffs = [0.0; WIDTH];
        coeffs[1 << g] = 1.0;
        Dual {
            coeffs,
            mask: 1 << g,
        }
    }

    /// Bitmask of the generators this number depends on.
    pub fn generators(&self) -> u8 {
        self.mask
    }

    /// Coefficient of the monomial `Π_{g ∈ set} ε_g`.
    pub fn coefficient(&self, set: u8) -> f64 {
        if set & !self.mask != 0 {
            0.0
        } else {
            self.coeffs[set as usize]
        }
    }

    pub fn is_finite(&self) -> bool {
        subsets(self.mask).all(|s| self.coeffs[s as usize].is_finite())
    }

    /// Coefficient of `ε_g` as a dual number in the remaining generators.
    pub fn derivative_part(&self, g: u8) -> Dual {
        let bit = 1u8 << g;
        let mut out = Dual::constant(0.0);
        if self.mask & bit == 0 {
            return out;
        }
        out.mask = self.mask & !bit;
        for s in subsets(out.mask) {
            out.coeffs[s as usize] = self.coeffs[(s | bit) as usize];
        }
        out
    }

    /// Evaluates `f(self)` from the derivatives `f^(m)(x0)`, `m = 0..=k`,
    /// where `k` is the number of active generators.
    fn chain(self, derivs: &[f64]) -> Dual {
        let mut nil = self;
        nil.coeffs[0] = 0.0;
        let order = self.mask.count_ones() as usize;
        let mut out = Dual::constant(derivs[0]);
        let mut power = Dual::constant(1.0);
        let mut factorial = 1.0;
        for (m, d) in derivs.iter().enumerate().take(order + 1).skip(1) {
            power *= nil;
            factorial *= m as f64;
            out += power * (d / factorial);
        }
        out
    }

    fn power_rule(self, exponent: f64) -> Dual {
        let x0 = self.coeffs[0];
        let order = self.mask.count_ones() as usize;
        let mut derivs = [0.0; MAX_GENERATORS + 1];
        let mut falling = 1.0;
        for (m, d) in derivs.iter_mut().enumerate().take(order + 1) {
            *d = falling * x0.powf(exponent - m as f64);
            falling *= exponent - m as f64;
        }
        self.chain(&derivs)
    }
}

impl Default for Dual {
    fn default() -> Self {
        Dual::constant(0.0)
    }
}

impl From<f64> for Dual {
    fn from(v: f64) -> Self {
        Dual::constant(v)
    }
}

impl fmt::Debug for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mask == 0 {
            return write!(f, "{:?}", self.coeffs[0]);
        }
        write!(f, "{:?}", self.coeffs[0])?;
        for s in subsets(self.mask).filter(|&s| s != 0) {
            write!(f, " + {:?}ε[{:04b}]", self.coeffs[s as usize], s)?;
        }
        Ok(())
    }
}

impl fmt::Display for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.coeffs[0], f)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(mut self, rhs: Dual) -> Dual {
        self += rhs;
        self
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, rhs: Dual) {
        self.mask |= rhs.mask;
        for s in subsets(rhs.mask) {
            self.coeffs[s as usize] += rhs.coeffs[s as usize];
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(mut self, rhs: Dual) -> Dual {
        self -= rhs;
        self
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, rhs: Dual) {
        self.mask |= rhs.mask;
        for s in subsets(rhs.mask) {
            self.coeffs[s as usize] -= rhs.coeffs[s as usize];
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(mut self) -> Dual {
        for s in subsets(self.mask) {
            self.coeffs[s as usize] = -self.coeffs[s as usize];
        }
        self
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        let mut out = Dual {
            coeffs: [0.0; WIDTH],
            mask: self.mask | rhs.mask,
        };
        for a in subsets(self.mask) {
            let av = self.coeffs[a as usize];
            if av == 0.0 {
                continue;
            }
            for b in subsets(rhs.mask & !a) {
                out.coeffs[(a | b) as usize] += av * rhs.coeffs[b as usize];
            }
        }
        out
    }
}

impl MulAssign for Dual {
    fn mul_assign(&mut self, rhs: Dual) {
        *self = *self * rhs;
    }
}

impl Div for Dual {
    type Output = Dual;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Dual) -> Dual {
        if rhs.mask == 0 {
            return self * (1.0 / rhs.coeffs[0]);
        }
        self * rhs.recip()
    }
}

impl DivAssign for Dual {
    fn div_assign(&mut self, rhs: Dual) {
        *self = *self / rhs;
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(mut self, rhs: f64) -> Dual {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    fn sub(mut self, rhs: f64) -> Dual {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(mut self, rhs: f64) -> Dual {
        for s in subsets(self.mask) {
            self.coeffs[s as usize] *= rhs;
        }
        self
    }
}

impl Div<f64> for Dual {
    type Output = Dual;
    fn div(self, rhs: f64) -> Dual {
        self * (1.0 / rhs)
    }
}

impl Add<Dual> for f64 {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        rhs + self
    }
}

impl Sub<Dual> for f64 {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        -rhs + self
    }
}

impl Mul<Dual> for f64 {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        rhs * self
    }
}

impl Div<Dual> for f64 {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        rhs.recip() * self
    }
}

impl Sum for Dual {
    fn sum<I: Iterator<Item = Dual>>(iter: I) -> Dual {
        iter.fold(Dual::constant(0.0), |acc, x| acc + x)
    }
}

impl Scalar for Dual {
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }

    fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn sqrt(self) -> Self {
        self.power_rule(0.5)
    }

    fn sin(self) -> Self {
        let (s, c) = self.coeffs[0].sin_cos();
        self.chain(&[s, c, -s, -c, s])
    }

    fn cos(self) -> Self {
        let (s, c) = self.coeffs[0].sin_cos();
        self.chain(&[c, -s, -c, s, c])
    }

    fn exp(self) -> Self {
        let e = self.coeffs[0].exp();
        self.chain(&[e; MAX_GENERATORS + 1])
    }

    fn ln(self) -> Self {
        let x0 = self.coeffs[0];
        let mut derivs = [x0.ln(), 0.0, 0.0, 0.0, 0.0];
        let mut factor = 1.0;
        for m in 1..=MAX_GENERATORS {
            derivs[m] = factor * x0.powi(-(m as i32));
            factor *= -(m as f64);
        }
        self.chain(&derivs)
    }

    fn recip(self) -> Self {
        let x0 = self.coeffs[0];
        let mut derivs = [0.0; MAX_GENERATORS + 1];
        let mut factor = 1.0;
        for (m, d) in derivs.iter_mut().enumerate() {
            *d = factor / x0.powi(m as i32 + 1);
            factor *= -((m + 1) as f64);
        }
        self.chain(&derivs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(x: f64, g: u8) -> Dual {
        Dual::constant(x) + Dual::generator(g)
    }

    #[test]
    fn product_rule_and_mixed_partials() {
        // f(x, y) = x² y at (3, 2): f_x = 12, f_y = 9, f_xy = 6
        let x = seeded(3.0, 0);
        let y = seeded(2.0, 1);
        let f = x * x * y;
        assert_eq!(f.value(), 18.0);
        assert_eq!(f.coefficient(0b01), 12.0);
        assert_eq!(f.coefficient(0b10), 9.0);
        assert_eq!(f.coefficient(0b11), 6.0);
    }

    #[test]
    fn nested_second_derivative_of_sin() {
        // Seeding both generators along the same direction gives f''.
        let x = Dual::constant(0.7) + Dual::generator(0) + Dual::generator(1);
        let f = x.sin();
        assert!((f.coefficient(0b11) + 0.7f64.sin()).abs() < 1e-15);
        assert!((f.coefficient(0b01) - 0.7f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x0 = 1.3;
        let x = seeded(x0, 2);
        let cases: [(Dual, f64); 5] = [
            (x.sqrt(), 0.5 / x0.sqrt()),
            (x.exp(), x0.exp()),
            (x.ln(), 1.0 / x0),
            (x.recip(), -1.0 / (x0 * x0)),
            (x.cos(), -x0.sin()),
        ];
        for (f, expected) in cases {
            assert!((f.coefficient(0b100) - expected).abs() < 1e-14, "{f:?}");
        }
    }

    #[test]
    fn third_order_of_reciprocal() {
        // d³/dx³ (1/x) = -6/x⁴
        let x = Dual::constant(2.0) + Dual::generator(0) + Dual::generator(1) + Dual::generator(3);
        let f = x.recip();
        assert!((f.coefficient(0b1011) + 6.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_part_shifts_coefficients() {
        let x = seeded(2.0, 0);
        let y = seeded(5.0, 1);
        let f = x * y * y;
        let dfdy = f.derivative_part(1);
        assert_eq!(dfdy.generators(), 0b01);
        assert_eq!(dfdy.value(), 20.0);
        assert_eq!(dfdy.coefficient(0b01), 10.0);
    }

    #[test]
    fn generators_square_to_zero() {
        let e = Dual::generator(0);
        let sq = e * e;
        assert_eq!(sq.coefficient(0b1), 0.0);
        assert_eq!(sq.value(), 0.0);
    }
}
