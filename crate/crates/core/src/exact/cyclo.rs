//! `KPoly` coefficients extended by a primitive `m`-th root of unity.
//!
//! Elements are stored in the group ring `R[x]/(x^m - 1)`; zero-testing
//! reduces modulo the cyclotomic polynomial `Φ_m`, which gives exact
//! arithmetic in `R[ζ_m]`.

use super::coeff::Coeff;
use super::kpoly::KPoly;
use super::laurent::SLaurent;

/// Integer coefficients of `Φ_m`, lowest degree first.
pub fn cyclotomic_poly(m: usize) -> Vec<i64> {
    assert!(m >= 1);
    // x^m - 1 = Π_{d | m} Φ_d
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = exact_div(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let mut quo = vec![0i64; num.len() - dn];
    for i in (dn..num.len()).rev() {
        let c = rem[i] / den[dn];
        quo[i - dn] = c;
        for (j, dj) in den.iter().enumerate() {
            rem[i - dn + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quo
}

#[derive(Clone, Debug)]
pub struct Cyclo<C> {
    m: usize,
    c: Vec<KPoly<C>>,
}

impl<C: Coeff> Cyclo<C> {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            c: vec![KPoly::zero(); m],
        }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// Coefficients of `ζ^0, …, ζ^{m−1}` (not reduced).
    pub fn coeffs(&self) -> &[KPoly<C>] {
        &self.c
    }

    /// Add `p · ζ^j`.
    pub fn add_scaled_root(&mut self, p: &KPoly<C>, j: usize) {
        let j = j % self.m;
        self.c[j] += p;
    }

    pub fn sub_assign(&mut self, other: &Cyclo<C>) {
        assert_eq!(self.m, other.m);
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a -= b;
        }
    }

    /// Multiply by `ζ^j`.
    pub fn rotate(&self, j: usize) -> Self {
        let mut c = vec![KPoly::zero(); self.m];
        for (i, p) in self.c.iter().enumerate() {
            c[(i + j) % self.m] = p.clone();
        }
        Self { m: self.m, c }
    }

    /// Canonical representative of degree `< φ(m)`.
    pub fn reduced(&self) -> Vec<KPoly<C>> {
        let phi = cyclotomic_poly(self.m);
        let deg = phi.len() - 1;
        let mut c = self.c.clone();
        for i in (deg..self.m).rev() {
            if c[i].is_zero() {
                continue;
            }
            let lead = std::mem::take(&mut c[i]);
            for (j, pj) in phi.iter().enumerate().take(deg) {
                if *pj != 0 {
                    let t = lead.scale(&SLaurent::from_int(*pj));
                    c[i - deg + j] -= &t;
                }
            }
        }
        c.truncate(deg);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(KPoly::is_zero)
    }
}
