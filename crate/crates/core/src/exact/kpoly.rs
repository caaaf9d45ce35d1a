//! Polynomials in the spectral variable `K` over [`SLaurent`].

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{Complex, RealField};
use num_traits::{One, Zero};

use super::coeff::Coeff;
use super::laurent::{forward_owned, SLaurent};
use crate::error::{Error, Result};

/// `Σ_k a_k K^k` with `a_k ∈ Q[s, 1/s]`; trailing zero coefficients are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KPoly<C> {
    coeffs: Vec<SLaurent<C>>,
}

impl<C: Coeff> KPoly<C> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(SLaurent::one())
    }

    pub fn constant(a: SLaurent<C>) -> Self {
        Self::from_coeffs(vec![a])
    }

    /// The formal variable `K`.
    pub fn k() -> Self {
        Self::from_coeffs(vec![SLaurent::zero(), SLaurent::one()])
    }

    /// `a · K^k`.
    pub fn monomial(a: SLaurent<C>, k: usize) -> Self {
        let mut coeffs = vec![SLaurent::zero(); k];
        coeffs.push(a);
        Self::from_coeffs(coeffs)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(SLaurent::from_int(n))
    }

    pub fn from_coeffs(mut coeffs: Vec<SLaurent<C>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `(1 + K)^r`.
    pub fn one_plus_k_pow(r: u32) -> Self {
        let base = Self::one() + Self::k();
        base.pow(r)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `K`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[SLaurent<C>] {
        &self.coeffs
    }

    /// Coefficient of `K^k`.
    pub fn coeff(&self, k: usize) -> SLaurent<C> {
        self.coeffs.get(k).cloned().unwrap_or_else(SLaurent::zero)
    }

    /// `f₁`, the coefficient of `K¹` (the derivative at `K = 0`).
    pub fn derivative_at_zero(&self) -> SLaurent<C> {
        self.coeff(1)
    }

    /// Formal derivative in `K`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a.scale(&C::from_ratio(k as i64, 1)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn q_invert(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(SLaurent::q_invert).collect())
    }

    pub fn scale(&self, a: &SLaurent<C>) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// True when no coefficient depends on `q`.
    pub fn is_q_free(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_constant().is_some())
    }

    /// Coefficients evaluated at `q0 > 0`, lowest power first.
    pub fn eval_coeffs<T: RealField + Copy>(&self, q0: T) -> Result<Vec<T>> {
        self.coeffs.iter().map(|c| c.eval(q0)).collect()
    }

    /// Ring homomorphism to the complex numbers at `(q0, K0)`.
    pub fn eval<T: RealField + Copy>(&self, q0: T, k0: Complex<T>) -> Result<Complex<T>> {
        if q0 <= T::zero() {
            return Err(Error::domain(format!("q must be positive, got {q0}")));
        }
        let s = q0.sqrt();
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * k0 + Complex::new(c.eval_s(s), T::zero());
        }
        Ok(acc)
    }

    /// Real evaluation at real `K0`.
    pub fn eval_real<T: RealField + Copy>(&self, q0: T, k0: T) -> Result<T> {
        let s = if q0 > T::zero() {
            q0.sqrt()
        } else {
            return Err(Error::domain(format!("q must be positive, got {q0}")));
        };
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * k0 + c.eval_s(s);
        }
        Ok(acc)
    }
}

impl<C: Coeff> Default for KPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> From<SLaurent<C>> for KPoly<C> {
    fn from(a: SLaurent<C>) -> Self {
        Self::constant(a)
    }
}

impl<C: Coeff> Zero for KPoly<C> {
    fn zero() -> Self {
        KPoly::zero()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<C: Coeff> One for KPoly<C> {
    fn one() -> Self {
        KPoly::one()
    }
}

impl<C: Coeff> AddAssign<&KPoly<C>> for KPoly<C> {
    fn add_assign(&mut self, rhs: &KPoly<C>) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), SLaurent::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl<C: Coeff> SubAssign<&KPoly<C>> for KPoly<C> {
    fn sub_assign(&mut self, rhs: &KPoly<C>) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), SLaurent::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl<C: Coeff> Add<&KPoly<C>> for &KPoly<C> {
    type Output = KPoly<C>;
    fn add(self, rhs: &KPoly<C>) -> KPoly<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coeff> Sub<&KPoly<C>> for &KPoly<C> {
    type Output = KPoly<C>;
    fn sub(self, rhs: &KPoly<C>) -> KPoly<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Coeff> Mul<&KPoly<C>> for &KPoly<C> {
    type Output = KPoly<C>;
    fn mul(self, rhs: &KPoly<C>) -> KPoly<C> {
        if self.is_zero() || rhs.is_zero() {
            return KPoly::zero();
        }
        let mut coeffs = vec![SLaurent::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        KPoly::from_coeffs(coeffs)
    }
}

impl<C: Coeff> Neg for &KPoly<C> {
    type Output = KPoly<C>;
    fn neg(self) -> KPoly<C> {
        KPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<C: Coeff> Neg for KPoly<C> {
    type Output = KPoly<C>;
    fn neg(self) -> KPoly<C> {
        -&self
    }
}

forward_owned!(KPoly, Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type S = SLaurent<BigRational>;
    type P = KPoly<BigRational>;

    fn k() -> P {
        P::k()
    }

    fn x() -> S {
        S::q_pow(1) + S::q_pow(-1)
    }

    #[test]
    fn k_squared_plus_one_at_one() {
        let p = k() * k() + P::one();
        let v = p.eval(1.3f64, Complex::new(1.0, 0.0)).unwrap();
        assert!((v.re - 2.0).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn constant_term_of_one_plus_k_pow() {
        for r in 1..6 {
            let p = P::one() + k().pow(r);
            let v = p.eval(0.7f64, Complex::new(0.0, 0.0)).unwrap();
            assert_eq!(v, Complex::new(1.0, 0.0));
        }
    }

    #[test]
    fn two_site_branch_value() {
        // -(K² + (q + 1/q - 2)K + 1) at q = 1, K = 1
        let lin = P::constant(x() - S::from_int(2));
        let p = -(k() * k() + lin * k() + P::one());
        let v = p.eval(1.0f64, Complex::new(1.0, 0.0)).unwrap();
        assert!((v.re + 2.0).abs() < 1e-15);
    }

    #[test]
    fn linear_coefficient_extraction() {
        assert!((k() * k() + P::one()).derivative_at_zero().is_zero());
        let f1 = x() + S::from_int(4);
        let p = k() * k() + P::constant(f1.clone()) * k() + P::one();
        assert_eq!(p.derivative_at_zero(), f1);
        for r in 2..6 {
            assert!((P::one() + k().pow(r)).derivative_at_zero().is_zero());
        }
    }

    #[test]
    fn eval_domain_error() {
        assert!(P::one().eval(-0.5, Complex::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn trimmed_after_cancellation() {
        let p = k().pow(3) - k().pow(3);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn derivative_rule() {
        let p = k().pow(3) + P::constant(x()) * k();
        let d = P::from_int(3) * k().pow(2) + P::constant(x());
        assert_eq!(p.derivative(), d);
    }
}
