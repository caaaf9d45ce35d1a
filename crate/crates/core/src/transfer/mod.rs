//! Monodromy blocks `t⁽ʳ⁾_{ij}` built by the coproduct and the transfer
//! matrix `T⁽ʳ⁾ = Σ_i t⁽ʳ⁾_{ii}`.

pub mod display;

use nalgebra::RealField;
use rayon::prelude::*;

use crate::braid::{build_r, ModelParams};
use crate::error::{Error, Result};
use crate::exact::{Coeff, KPoly};
use crate::matrix::{max_abs_real, PolyMatrix};

/// Default bound on `N^r`.
pub const DEFAULT_CAP: usize = 60_000;

/// `N^r`, or `CapExceeded` when it would exceed `cap`.
pub fn checked_dim(n: usize, r: usize, cap: usize) -> Result<usize> {
    let mut d: usize = 1;
    for _ in 0..r {
        d = d
            .checked_mul(n)
            .filter(|&x| x <= cap)
            .ok_or(Error::CapExceeded {
                dim: n.saturating_pow(r as u32),
                cap,
            })?;
    }
    Ok(d)
}

/// `N × N` array of `N^r`-dimensional blocks, `blocks[i·N + j] = t_{ij}`.
#[derive(Clone, Debug)]
pub struct MonodromyBlocks<C> {
    pub n: usize,
    pub r: usize,
    blocks: Vec<PolyMatrix<C>>,
}

impl<C: Coeff> MonodromyBlocks<C> {
    /// Fundamental blocks from `t⁽¹⁾ = P R̂`, the auxiliary space being the
    /// first tensor factor.
    pub fn fundamental(n: usize) -> Result<Self> {
        let r = build_r::<C>(n)?;
        let mut blocks = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut t = PolyMatrix::zero(n);
                for x in 0..n {
                    for (&col, v) in r.row(a * n + x) {
                        if col / n == b {
                            t.set(x, col % n, v.clone());
                        }
                    }
                }
                blocks.push(t);
            }
        }
        Ok(Self { n, r: 1, blocks })
    }

    pub fn block(&self, i: usize, j: usize) -> &PolyMatrix<C> {
        &self.blocks[i * self.n + j]
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].dim()
    }

    /// `t⁽ʳ⁺¹⁾_{ij} = Σ_k t⁽¹⁾_{ik} ⊗ t⁽ʳ⁾_{kj}`.
    pub fn coproduct_step(&self, t1: &Self, cap: usize) -> Result<Self> {
        let n = self.n;
        assert_eq!(t1.r, 1);
        assert_eq!(t1.n, n);
        let dim = checked_dim(n, self.r + 1, cap)?;
        let blocks: Vec<PolyMatrix<C>> = (0..n * n)
            .into_par_iter()
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                let mut acc = PolyMatrix::zero(dim);
                for k in 0..n {
                    t1.block(i, k).kron_accumulate(self.block(k, j), &mut acc);
                }
                acc
            })
            .collect();
        let out = Self {
            n,
            r: self.r + 1,
            blocks,
        };
        if let Some(d) = out.max_k_degree() {
            if d > out.r {
                return Err(Error::InvariantViolation(format!(
                    "K-degree {d} exceeds r = {}",
                    out.r
                )));
            }
        }
        Ok(out)
    }

    pub fn build(n: usize, r: usize, cap: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::domain("chain length r must be at least 1"));
        }
        checked_dim(n, r, cap)?;
        let t1 = Self::fundamental(n)?;
        let mut t = t1.clone();
        for _ in 1..r {
            t = t.coproduct_step(&t1, cap)?;
        }
        Ok(t)
    }

    pub fn max_k_degree(&self) -> Option<usize> {
        self.blocks
            .iter()
            .filter_map(PolyMatrix::max_k_degree)
            .max()
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().map(PolyMatrix::nnz).sum()
    }

    pub fn transfer(&self) -> TransferMatrix<C> {
        let mut m = PolyMatrix::zero(self.dim());
        for i in 0..self.n {
            m = m.add(self.block(i, i));
        }
        TransferMatrix {
            n: self.n,
            r: self.r,
            matrix: m,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransferMatrix<C> {
    pub n: usize,
    pub r: usize,
    pub matrix: PolyMatrix<C>,
}

impl<C: Coeff> TransferMatrix<C> {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> KPoly<C> {
        self.matrix.trace()
    }

    /// `N (1 + K)^r`.
    pub fn expected_trace(&self) -> KPoly<C> {
        KPoly::from_int(self.n as i64) * KPoly::one_plus_k_pow(self.r as u32)
    }

    /// `T` with `K` set to zero.
    pub fn at_k_zero(&self) -> PolyMatrix<C> {
        self.matrix.k_coeff(0)
    }
}

/// Exact `T⁽ʳ⁾` for `N` states per site.
pub fn build_t<C: Coeff>(n: usize, r: usize, cap: usize) -> Result<TransferMatrix<C>> {
    Ok(MonodromyBlocks::build(n, r, cap)?.transfer())
}

/// Checks `Tr T⁽ʳ⁺¹⁾ = (1 + K) Tr T⁽ʳ⁾` at every coproduct step up to `r`.
pub fn trace_recursion<C: Coeff>(n: usize, r: usize, cap: usize) -> Result<Vec<KPoly<C>>> {
    let t1 = MonodromyBlocks::<C>::fundamental(n)?;
    let mut t = t1.clone();
    let mut traces = vec![t.transfer().trace()];
    for step in 1..r {
        t = t.coproduct_step(&t1, cap)?;
        let tr = t.transfer().trace();
        let want = (KPoly::one() + KPoly::k()) * traces.last().unwrap();
        if tr != want {
            return Err(Error::InvariantViolation(format!(
                "trace recursion broken at r = {}: {tr} vs {want}",
                step + 1
            )));
        }
        traces.push(tr);
    }
    Ok(traces)
}

/// Scaled commutator `‖[T(θ), T(θ′)]‖_max / max(1, ‖T(θ)‖_max ‖T(θ′)‖_max)`.
pub fn verify_commutativity<C: Coeff, T: RealField + Copy>(
    t: &TransferMatrix<C>,
    params: &ModelParams<T>,
    theta: T,
    theta_p: T,
) -> Result<T> {
    let a = t.matrix.eval_real(params.q, params.k_of_theta(theta)?)?;
    let b = t.matrix.eval_real(params.q, params.k_of_theta(theta_p)?)?;
    let comm = &a * &b - &b * &a;
    let scale = (max_abs_real(&a) * max_abs_real(&b)).max(T::one());
    Ok(max_abs_real(&comm) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type P = KPoly<BigRational>;

    fn kp(s: &str) -> P {
        s.parse().unwrap()
    }

    fn unit(n: usize, entries: &[(usize, usize, &str)]) -> PolyMatrix<BigRational> {
        let mut m = PolyMatrix::zero(n);
        for (a, b, v) in entries {
            m.set(a - 1, b - 1, kp(v));
        }
        m
    }

    #[test]
    fn three_state_fundamental_blocks() {
        let t = MonodromyBlocks::<BigRational>::fundamental(3).unwrap();
        assert_eq!(*t.block(0, 0), unit(3, &[(1, 1, "1"), (3, 3, "K")]));
        assert_eq!(*t.block(1, 1), unit(3, &[(2, 2, "1 + K")]));
        assert_eq!(*t.block(0, 1), unit(3, &[(2, 1, "1"), (3, 2, "q^(1/2)*K")]));
        assert_eq!(*t.block(0, 2), unit(3, &[(3, 1, "1 + q*K")]));
        assert_eq!(
            *t.block(2, 1),
            unit(3, &[(1, 2, "q^(-1/2)*K"), (2, 3, "1")])
        );
    }

    #[test]
    fn four_state_corner_blocks() {
        let t = MonodromyBlocks::<BigRational>::fundamental(4).unwrap();
        assert_eq!(*t.block(0, 3), unit(4, &[(4, 1, "1 + q^2*K")]));
        assert_eq!(*t.block(3, 0), unit(4, &[(1, 4, "1 + q^-2*K")]));
    }

    #[test]
    fn first_order_transfer_is_scalar() {
        for n in 3..6 {
            let t = build_t::<BigRational>(n, 1, DEFAULT_CAP).unwrap();
            let want = PolyMatrix::identity(n).scale(&kp("1 + K"));
            assert_eq!(t.matrix, want);
        }
    }

    #[test]
    fn exact_traces() {
        for (n, r) in [(3, 3), (4, 2), (3, 4), (5, 2)] {
            let t = build_t::<BigRational>(n, r, DEFAULT_CAP).unwrap();
            assert_eq!(t.trace(), t.expected_trace(), "N = {n}, r = {r}");
        }
        let t = build_t::<BigRational>(4, 2, DEFAULT_CAP).unwrap();
        assert_eq!(t.trace(), kp("4*(K + 1)^2"));
    }

    #[test]
    fn trace_recursion_each_step() {
        let tr = trace_recursion::<BigRational>(4, 4, DEFAULT_CAP).unwrap();
        assert_eq!(tr.len(), 4);
        assert_eq!(tr[3], kp("4*(1 + K)^4"));
    }

    #[test]
    fn degree_bounded_by_r() {
        let t = MonodromyBlocks::<BigRational>::build(3, 4, DEFAULT_CAP).unwrap();
        assert!(t.max_k_degree().unwrap() <= 4);
    }

    #[test]
    fn two_site_transfer_at_k_zero_is_swap() {
        let t = build_t::<BigRational>(3, 2, DEFAULT_CAP).unwrap();
        assert_eq!(t.at_k_zero(), crate::braid::build_swap(3));
    }

    #[test]
    fn cap_is_enforced() {
        let err = build_t::<BigRational>(3, 5, 100).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { dim: 243, cap: 100 }));
    }

    #[test]
    fn commutativity_examples() {
        let p = ModelParams::new(3, 1.5).unwrap();
        let t = build_t::<BigRational>(3, 3, DEFAULT_CAP).unwrap();
        let res = verify_commutativity(&t, &p, -0.4 * p.eta, -0.2 * p.eta).unwrap();
        assert!(res < 1e-9, "{res}");
        assert_eq!(
            verify_commutativity(&t, &p, -0.3 * p.eta, -0.3 * p.eta).unwrap(),
            0.0
        );
        let p4 = ModelParams::new(4, 0.8).unwrap();
        let t4 = build_t::<BigRational>(4, 2, DEFAULT_CAP).unwrap();
        let res = verify_commutativity(&t4, &p4, -0.7 * p4.eta, -0.15 * p4.eta).unwrap();
        assert!(res < 1e-9, "{res}");
    }

    #[test]
    fn transfer_is_sparse() {
        let t = build_t::<BigRational>(3, 5, DEFAULT_CAP).unwrap();
        let dim = t.dim();
        assert!(t.matrix.nnz() < dim * dim / 4);
    }
}
