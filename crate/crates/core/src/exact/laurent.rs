//! Laurent polynomials in `s`, where `s² = q`.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::RealField;
use num_traits::{One, Zero};

use super::coeff::Coeff;
use crate::error::{Error, Result};

/// Finite sum `Σ c_k s^k` with rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is ring
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SLaurent<C> {
    terms: BTreeMap<i32, C>,
}

impl<C: Coeff> SLaurent<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · s^k`.
    pub fn monomial(c: C, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    pub fn s_pow(k: i32) -> Self {
        Self::monomial(C::one(), k)
    }

    /// `q^k = s^{2k}`.
    pub fn q_pow(k: i32) -> Self {
        Self::s_pow(2 * k)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(C::from_ratio(n, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Coefficient of `s^k`.
    pub fn coeff(&self, k: i32) -> C {
        self.terms.get(&k).cloned().unwrap_or_else(C::zero)
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &C)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Constant coefficient when the element has no `s` dependence.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, k: i32, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// The automorphism `q -> 1/q`, i.e. `s^k -> s^-k`.
    pub fn q_invert(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (-k, v.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluate at `q = q0`, which must be positive.
    pub fn eval<T: RealField + Copy>(&self, q0: T) -> Result<T> {
        if q0 <= T::zero() {
            return Err(Error::domain(format!("q must be positive, got {q0}")));
        }
        Ok(self.eval_s(q0.sqrt()))
    }

    /// Evaluate at a given value of `s`; no domain check.
    pub fn eval_s<T: RealField + Copy>(&self, s: T) -> T {
        let mut acc = T::zero();
        for (k, c) in &self.terms {
            let c = T::from_f64(c.to_f64().unwrap_or(f64::NAN)).unwrap();
            acc += c * s.powi(*k);
        }
        acc
    }
}

impl<C: Coeff> Default for SLaurent<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> From<C> for SLaurent<C> {
    fn from(c: C) -> Self {
        Self::constant(c)
    }
}

impl<C: Coeff> Zero for SLaurent<C> {
    fn zero() -> Self {
        SLaurent::zero()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coeff> One for SLaurent<C> {
    fn one() -> Self {
        SLaurent::one()
    }
}

impl<C: Coeff> AddAssign<&SLaurent<C>> for SLaurent<C> {
    fn add_assign(&mut self, rhs: &SLaurent<C>) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, c.clone());
        }
    }
}

impl<C: Coeff> SubAssign<&SLaurent<C>> for SLaurent<C> {
    fn sub_assign(&mut self, rhs: &SLaurent<C>) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, -c.clone());
        }
    }
}

impl<C: Coeff> Add<&SLaurent<C>> for &SLaurent<C> {
    type Output = SLaurent<C>;
    fn add(self, rhs: &SLaurent<C>) -> SLaurent<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coeff> Sub<&SLaurent<C>> for &SLaurent<C> {
    type Output = SLaurent<C>;
    fn sub(self, rhs: &SLaurent<C>) -> SLaurent<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Coeff> Mul<&SLaurent<C>> for &SLaurent<C> {
    type Output = SLaurent<C>;
    fn mul(self, rhs: &SLaurent<C>) -> SLaurent<C> {
        let mut out = SLaurent::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a + b, x.clone() * y.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &SLaurent<C> {
    type Output = SLaurent<C>;
    fn neg(self) -> SLaurent<C> {
        SLaurent {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }
}

impl<C: Coeff> Neg for SLaurent<C> {
    type Output = SLaurent<C>;
    fn neg(self) -> SLaurent<C> {
        -&self
    }
}

macro_rules! forward_owned {
    ($ty:ident, $($tr:ident $m:ident),*) => {$(
        impl<C: Coeff> $tr<$ty<C>> for $ty<C> {
            type Output = $ty<C>;
            fn $m(self, rhs: $ty<C>) -> $ty<C> {
                (&self).$m(&rhs)
            }
        }
        impl<C: Coeff> $tr<&$ty<C>> for $ty<C> {
            type Output = $ty<C>;
            fn $m(self, rhs: &$ty<C>) -> $ty<C> {
                (&self).$m(rhs)
            }
        }
        impl<C: Coeff> $tr<$ty<C>> for &$ty<C> {
            type Output = $ty<C>;
            fn $m(self, rhs: $ty<C>) -> $ty<C> {
                self.$m(&rhs)
            }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(SLaurent, Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type S = SLaurent<BigRational>;

    fn q_sym() -> S {
        S::q_pow(1) + S::q_pow(-1) + S::one()
    }

    #[test]
    fn additive_identity() {
        let a = S::s_pow(2) + S::s_pow(-2);
        assert_eq!(&a + &S::zero(), a);
    }

    #[test]
    fn difference_of_squares() {
        let a = S::s_pow(1) + S::s_pow(-1);
        let b = S::s_pow(1) - S::s_pow(-1);
        assert_eq!(a * b, S::s_pow(2) - S::s_pow(-2));
    }

    #[test]
    fn eval_at_one() {
        assert!((q_sym().eval(1.0_f64).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_nonpositive_q() {
        assert!(matches!(q_sym().eval(0.0_f64), Err(Error::Domain(_))));
        assert!(q_sym().eval(-1.0_f64).is_err());
    }

    #[test]
    fn q_invert_examples() {
        assert_eq!(S::s_pow(1).q_invert(), S::s_pow(-1));
        assert_eq!(q_sym().q_invert(), q_sym());
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = S::q_pow(1) - S::q_pow(1);
        assert!(a.is_zero());
        assert_eq!(a.num_terms(), 0);
    }
}
