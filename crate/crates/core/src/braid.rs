//! The braid matrix `R̂(θ) = I + K(θ) P₀′` and its building blocks.
//!
//! Indices are 0-based internally: `|i⟩⊗|j⟩` sits at `i·N + j`, and the
//! conjugate index of `i` is `i′ = N − 1 − i`.

use nalgebra::{DMatrix, RealField};
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Coeff, KPoly, SLaurent};
use crate::matrix::{max_abs_real, PolyMatrix};

/// Twice the `ρ`-vector, so every entry is an integer exponent of `s`.
pub fn rho_doubled(n: usize) -> Result<Vec<i32>> {
    if n < 3 {
        return Err(Error::domain(format!("N must be at least 3, got {n}")));
    }
    let half = (n / 2) as i32;
    let v = if n % 2 == 1 {
        // (n-1/2, ..., 1/2, 0, -1/2, ..., -n+1/2)
        let mut v: Vec<i32> = (0..half).map(|k| 2 * (half - k) - 1).collect();
        v.push(0);
        v.extend((0..half).map(|k| -(2 * k + 1)));
        v
    } else {
        // (n-1, ..., 1, 0, 0, -1, ..., -n+1)
        let mut v: Vec<i32> = (0..half).map(|k| 2 * (half - 1 - k)).collect();
        v.extend((0..half).map(|k| -2 * k));
        v
    };
    Ok(v)
}

/// The half-integer `ρ`-vector.
pub fn make_rho(n: usize) -> Result<Vec<Rational64>> {
    Ok(rho_doubled(n)?
        .into_iter()
        .map(|x| Rational64::new(x as i64, 2))
        .collect())
}

pub fn conj(n: usize, i: usize) -> usize {
    n - 1 - i
}

/// `[N−1] + 1 = e^η + e^{−η}` as an exact Laurent polynomial.
pub fn eta_sum<C: Coeff>(n: usize) -> SLaurent<C> {
    let mut c = SLaurent::one();
    let top = n as i32 - 2;
    for k in 0..=top {
        c += &SLaurent::q_pow(top - 2 * k);
    }
    c
}

/// `η = ln((c + √(c² − 4))/2)` with `c = [N−1]+1` at `q`.
pub fn make_eta<T: RealField + Copy>(n: usize, q: T) -> Result<T> {
    if n < 3 {
        return Err(Error::domain(format!("N must be at least 3, got {n}")));
    }
    let c = eta_sum::<Rational64>(n).eval(q)?;
    let two = T::one() + T::one();
    if c <= two {
        return Err(Error::domain(format!(
            "e^eta + e^-eta = {c} must exceed 2 (N = {n}, q = {q})"
        )));
    }
    Ok(((c + (c * c - two * two).sqrt()) / two).ln())
}

/// Parameters shared by every numeric construction.
#[derive(Clone, Debug, Serialize)]
pub struct ModelParams<T> {
    pub n: usize,
    pub q: T,
    pub rho: Vec<Rational64>,
    pub eta: T,
}

impl<T: RealField + Copy> ModelParams<T> {
    pub fn new(n: usize, q: T) -> Result<Self> {
        if q <= T::zero() {
            return Err(Error::domain(format!("q must be positive, got {q}")));
        }
        Ok(Self {
            n,
            q,
            rho: make_rho(n)?,
            eta: make_eta(n, q)?,
        })
    }

    /// `e^η + e^{−η}` at this `q`.
    pub fn eta_sum(&self) -> T {
        eta_sum::<Rational64>(self.n).eval(self.q).unwrap()
    }

    /// `K(θ) = −sinh θ / sinh(η + θ)`.
    pub fn k_of_theta(&self, theta: T) -> Result<T> {
        let shifted = self.eta + theta;
        let tol = T::default_epsilon() * T::from_f64(64.0).unwrap() * (T::one() + self.eta);
        if shifted.abs() <= tol {
            return Err(Error::Pole(format!(
                "theta = {theta} sits on -eta = {}",
                -self.eta
            )));
        }
        Ok(-theta.sinh() / shifted.sinh())
    }

    /// `dK/dθ` at `θ = 0`, equal to `−1/sinh η`.
    pub fn kdot0(&self) -> T {
        -T::one() / self.eta.sinh()
    }
}

/// `P₀′ = Σ_{ij} q^{−ρ_i−ρ_j} (ij)⊗(i′j′)`.
pub fn build_p0prime<C: Coeff>(n: usize) -> Result<PolyMatrix<C>> {
    let rho = rho_doubled(n)?;
    let mut m = PolyMatrix::zero(n * n);
    for i in 0..n {
        for j in 0..n {
            let r = i * n + conj(n, i);
            let c = j * n + conj(n, j);
            m.set(r, c, KPoly::constant(SLaurent::s_pow(-(rho[i] + rho[j]))));
        }
    }
    Ok(m)
}

/// The swap `P = Σ (ij)⊗(ji)` on `N²`.
pub fn build_swap<C: Coeff>(n: usize) -> PolyMatrix<C> {
    let perm: Vec<usize> = (0..n * n).map(|x| (x % n) * n + x / n).collect();
    PolyMatrix::permutation(&perm)
}

/// `R̂ = I + K P₀′` with `K` formal.
pub fn build_rhat<C: Coeff>(n: usize) -> Result<PolyMatrix<C>> {
    let p0 = build_p0prime(n)?;
    Ok(PolyMatrix::identity(n * n).add(&p0.scale(&KPoly::k())))
}

/// `R = P R̂`.
pub fn build_r<C: Coeff>(n: usize) -> Result<PolyMatrix<C>> {
    Ok(build_swap(n).mul(&build_rhat(n)?))
}

fn rhat_numeric<T: RealField + Copy>(p0: &DMatrix<T>, k: T) -> DMatrix<T> {
    DMatrix::identity(p0.nrows(), p0.ncols()) + p0 * k
}

fn kron_real<T: RealField + Copy>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a.kronecker(b)
}

/// Max-norm residual of `R̂₁₂(θ) R̂₂₃(θ+θ′) R̂₁₂(θ′) − R̂₂₃(θ′) R̂₁₂(θ+θ′) R̂₂₃(θ)`.
pub fn verify_ybe<T: RealField + Copy>(params: &ModelParams<T>, theta: T, theta_p: T) -> Result<T> {
    let n = params.n;
    let k1 = params.k_of_theta(theta)?;
    let k2 = params.k_of_theta(theta_p)?;
    let k12 = params.k_of_theta(theta + theta_p)?;
    let p0 = build_p0prime::<Rational64>(n)?.eval_real(params.q, T::zero())?;
    let id = DMatrix::<T>::identity(n, n);
    let r12 = |k: T| kron_real(&rhat_numeric(&p0, k), &id);
    let r23 = |k: T| kron_real(&id, &rhat_numeric(&p0, k));
    let lhs = r12(k1) * r23(k12) * r12(k2);
    let rhs = r23(k2) * r12(k12) * r23(k1);
    Ok(max_abs_real(&(lhs - rhs)))
}

/// `R̂(θ)R̂(−θ)` measured against a multiple of the identity.
#[derive(Clone, Debug, Serialize)]
pub struct UnitarityReport<T> {
    pub scalar: T,
    pub residual: T,
}

pub fn measure_unitarity<T: RealField + Copy>(
    params: &ModelParams<T>,
    theta: T,
) -> Result<UnitarityReport<T>> {
    let p0 = build_p0prime::<Rational64>(params.n)?.eval_real(params.q, T::zero())?;
    let prod = rhat_numeric(&p0, params.k_of_theta(theta)?)
        * rhat_numeric(&p0, params.k_of_theta(-theta)?);
    let dim = prod.nrows();
    let scalar = prod.trace() / T::from_usize(dim).unwrap();
    let residual = max_abs_real(&(prod - DMatrix::identity(dim, dim) * scalar));
    Ok(UnitarityReport { scalar, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type M = PolyMatrix<BigRational>;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn rho_vectors() {
        assert_eq!(make_rho(3).unwrap(), vec![r(1, 2), r(0, 1), r(-1, 2)]);
        assert_eq!(
            make_rho(4).unwrap(),
            vec![r(1, 1), r(0, 1), r(0, 1), r(-1, 1)]
        );
        assert_eq!(
            make_rho(5).unwrap(),
            vec![r(3, 2), r(1, 2), r(0, 1), r(-1, 2), r(-3, 2)]
        );
        assert!(make_rho(2).is_err());
        for n in 3..10 {
            let v = make_rho(n).unwrap();
            for i in 0..n {
                assert_eq!(v[conj(n, i)], -v[i]);
            }
        }
    }

    #[test]
    fn eta_values() {
        let golden = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((make_eta(3, 1.0).unwrap() - golden).abs() < 1e-14);
        assert!((make_eta(4, 1.0).unwrap() - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-14);
        let c: f64 = 3.5;
        let want = ((c + (c * c - 4.0).sqrt()) / 2.0).ln();
        assert!((make_eta(3, 2.0).unwrap() - want).abs() < 1e-14);
        for n in 3..8 {
            for q in [0.3, 1.0, 2.7] {
                let p = ModelParams::<f64>::new(n, q).unwrap();
                assert!((2.0 * p.eta.cosh() - p.eta_sum()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eta_sum_matches_rho() {
        for n in 3..8 {
            let rho = rho_doubled(n).unwrap();
            let mut s = SLaurent::<BigRational>::zero();
            for x in rho {
                s += &SLaurent::s_pow(-2 * x);
            }
            assert_eq!(s, eta_sum(n));
        }
    }

    #[test]
    fn k_of_theta_landmarks() {
        let p = ModelParams::<f64>::new(3, 1.4).unwrap();
        assert_eq!(p.k_of_theta(0.0).unwrap(), 0.0);
        assert!((p.k_of_theta(-p.eta / 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(p.k_of_theta(-p.eta), Err(Error::Pole(_))));
        let mut last = 1.0;
        for j in 1..20 {
            let th = -p.eta * (0.5 + 0.49 * j as f64 / 19.0);
            let k = p.k_of_theta(th).unwrap();
            assert!(k > last);
            last = k;
        }
        assert!(p.k_of_theta(-0.9 * p.eta).unwrap() > 1.0);
        for j in 1..=100 {
            let th = -p.eta * j as f64 / 101.0;
            assert!(p.k_of_theta(th).unwrap() > 0.0);
        }
    }

    #[test]
    fn p0prime_three_state_coefficients() {
        let p0 = build_p0prime::<BigRational>(3).unwrap();
        assert_eq!(p0.nnz(), 9);
        let at = |i: usize, j: usize| p0.get(i * 3 + (2 - i), j * 3 + (2 - j));
        let q = |k: i32| KPoly::constant(SLaurent::s_pow(k));
        // (11)⊗(33), (12)⊗(32), (13)⊗(31), (23)⊗(21), (33)⊗(11)
        assert_eq!(at(0, 0), q(-2));
        assert_eq!(at(0, 1), q(-1));
        assert_eq!(at(0, 2), q(0));
        assert_eq!(at(1, 1), q(0));
        assert_eq!(at(1, 2), q(1));
        assert_eq!(at(2, 1), q(1));
        assert_eq!(at(2, 2), q(2));
    }

    #[test]
    fn projector_identity() {
        for n in 3..=6 {
            let p0 = build_p0prime::<BigRational>(n).unwrap();
            let c = KPoly::constant(eta_sum(n));
            assert_eq!(p0.mul(&p0), p0.scale(&c), "N = {n}");
        }
    }

    #[test]
    fn swap_squares_to_identity() {
        for n in 3..6 {
            let p = build_swap::<BigRational>(n);
            assert_eq!(p.mul(&p), M::identity(n * n));
        }
    }

    #[test]
    fn rhat_is_identity_off_conjugate_pairs() {
        let n = 4;
        let rh = build_rhat::<BigRational>(n).unwrap();
        assert_eq!(rh.eval_real(1.3, 0.0).unwrap(), DMatrix::identity(16, 16));
        let pair = |x: usize| x % n == conj(n, x / n);
        for (r, c, v) in rh.entries() {
            if r != c {
                assert!(pair(r) && pair(c));
            } else if !pair(r) {
                assert_eq!(*v, KPoly::one());
            }
        }
    }

    #[test]
    fn ybe_examples() {
        let p = ModelParams::new(3, 1.3).unwrap();
        let res = verify_ybe(&p, -0.3 * p.eta, -0.25 * p.eta).unwrap();
        assert!(res < 1e-10, "{res}");
        assert!(verify_ybe(&p, -0.4 * p.eta, 0.0).unwrap() < 1e-14);
        let p5 = ModelParams::new(5, 0.7).unwrap();
        let res = verify_ybe(&p5, -0.17 * p5.eta, -0.61 * p5.eta).unwrap();
        assert!(res < 1e-10, "{res}");
        assert!(verify_ybe(&p, -0.5 * p.eta, -0.5 * p.eta).is_err());
    }

    #[test]
    fn unitarity_scalar_is_one() {
        for n in 3..6 {
            let p = ModelParams::<f64>::new(n, 0.8).unwrap();
            let u = measure_unitarity(&p, -0.3 * p.eta).unwrap();
            assert!((u.scalar - 1.0).abs() < 1e-12 && u.residual < 1e-12);
        }
    }

    #[test]
    fn f32_params() {
        let p = ModelParams::<f32>::new(3, 1.0).unwrap();
        assert!((p.k_of_theta(-p.eta / 2.0).unwrap() - 1.0).abs() < 1e-5);
        assert!(verify_ybe(&p, -0.3 * p.eta, -0.2 * p.eta).unwrap() < 1e-4);
    }
}
