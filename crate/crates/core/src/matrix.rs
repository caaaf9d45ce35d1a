//! Sparse square matrices with [`KPoly`] entries.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{Complex, DMatrix, RealField};

use crate::error::{Error, Result};
use crate::exact::{Coeff, KPoly, SLaurent};

/// Dense complex matrix used for all numeric work.
pub type NumMatrix<T> = DMatrix<Complex<T>>;

/// Row-major sparse matrix; zero entries are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<C> {
    dim: usize,
    rows: Vec<BTreeMap<usize, KPoly<C>>>,
}

impl<C: Coeff> PolyMatrix<C> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![BTreeMap::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.rows[i].insert(i, KPoly::one());
        }
        m
    }

    /// Permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let mut m = Self::zero(perm.len());
        for (j, &i) in perm.iter().enumerate() {
            m.rows[i].insert(j, KPoly::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> KPoly<C> {
        self.rows[r].get(&c).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, r: usize, c: usize) -> Option<&KPoly<C>> {
        self.rows[r].get(&c)
    }

    pub fn row(&self, r: usize) -> &BTreeMap<usize, KPoly<C>> {
        &self.rows[r]
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: &KPoly<C>) {
        if v.is_zero() {
            return;
        }
        let row = &mut self.rows[r];
        match row.get_mut(&c) {
            Some(e) => {
                *e += v;
                if e.is_zero() {
                    row.remove(&c);
                }
            }
            None => {
                row.insert(c, v.clone());
            }
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: KPoly<C>) {
        if v.is_zero() {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, v);
        }
    }

    /// All nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &KPoly<C>)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn max_k_degree(&self) -> Option<usize> {
        self.entries().filter_map(|(_, _, v)| v.degree()).max()
    }

    pub fn trace(&self) -> KPoly<C> {
        let mut t = KPoly::zero();
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(v) = row.get(&i) {
                t += v;
            }
        }
        t
    }

    pub fn scale(&self, a: &KPoly<C>) -> Self {
        let mut out = Self::zero(self.dim);
        for (r, c, v) in self.entries() {
            out.set(r, c, v * a);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_entry(r, c, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_entry(r, c, &-v);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                for (c, b) in &other.rows[*k] {
                    out.add_entry(r, *c, &(a * b));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (r, c, v) in self.entries() {
            out.rows[c].insert(r, v.clone());
        }
        out
    }

    /// `self ⊗ other`, with `self` acting on the leftmost tensor factor.
    pub fn kron(&self, other: &Self) -> Self {
        let d = other.dim;
        let mut out = Self::zero(self.dim * d);
        for (a1, a2, x) in self.entries() {
            for (b1, b2, y) in other.entries() {
                out.rows[a1 * d + b1].insert(a2 * d + b2, x * y);
            }
        }
        out
    }

    /// Add `coeff · (self ⊗ other)` into `acc`.
    pub(crate) fn kron_accumulate(&self, other: &Self, acc: &mut Self) {
        let d = other.dim;
        for (a1, a2, x) in self.entries() {
            for (b1, b2, y) in other.entries() {
                acc.add_entry(a1 * d + b1, a2 * d + b2, &(x * y));
            }
        }
    }

    pub fn q_invert(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (r, c, v) in self.entries() {
            out.rows[r].insert(c, v.q_invert());
        }
        out
    }

    /// Entry-wise coefficient of `K^k`.
    pub fn k_coeff(&self, k: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (r, c, v) in self.entries() {
            out.set(r, c, KPoly::constant(v.coeff(k)));
        }
        out
    }

    /// Entry-wise formal derivative in `K`.
    pub fn k_derivative(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (r, c, v) in self.entries() {
            out.set(r, c, v.derivative());
        }
        out
    }

    /// Conjugate by the basis relabeling `i -> perm[i]`: `out[perm[r], perm[c]] = self[r, c]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.dim);
        for (r, c, v) in self.entries() {
            out.rows[perm[r]].insert(perm[c], v.clone());
        }
        out
    }

    /// Dense numeric evaluation at `(q0, K0)`.
    pub fn eval<T: RealField + Copy>(&self, q0: T, k0: Complex<T>) -> Result<NumMatrix<T>> {
        let mut m = NumMatrix::<T>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.eval(q0, k0)?;
        }
        Ok(m)
    }

    /// Dense real evaluation at real `K0`.
    pub fn eval_real<T: RealField + Copy>(&self, q0: T, k0: T) -> Result<DMatrix<T>> {
        let mut m = DMatrix::<T>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.eval_real(q0, k0)?;
        }
        Ok(m)
    }

    /// Sparse numeric coefficient matrices `M_k` with `M(K) = Σ K^k M_k`.
    pub fn eval_k_coeffs(&self, q0: f64) -> Result<Vec<SparseReal>> {
        let deg = self.max_k_degree().unwrap_or(0);
        let mut out = vec![SparseReal::zero(self.dim); deg + 1];
        for (r, c, v) in self.entries() {
            for (k, a) in v.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    out[k].rows[r].push((c, a.eval(q0)?));
                }
            }
        }
        Ok(out)
    }

    /// Sparse-triplet dump, one `row col poly` line per nonzero entry (0-based).
    pub fn to_triplets(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# dim {}", self.dim).unwrap();
        for (r, c, v) in self.entries() {
            writeln!(s, "{r} {c} {v}").unwrap();
        }
        s
    }

    pub fn from_triplets(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut m: Option<Self> = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# dim ") {
                let d: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(ln, "bad dimension header"))?;
                dim = Some(d);
                m = Some(Self::zero(d));
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let m = m
                .as_mut()
                .ok_or_else(|| Error::parse(ln, "missing '# dim' header"))?;
            let mut it = line.splitn(3, ' ');
            let r: usize = it
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Error::parse(ln, "bad row"))?;
            let c: usize = it
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Error::parse(ln, "bad column"))?;
            let v: KPoly<C> = it.next().unwrap_or("").parse()?;
            if r >= dim.unwrap() || c >= dim.unwrap() {
                return Err(Error::parse(ln, "index out of range"));
            }
            m.set(r, c, v);
        }
        m.ok_or_else(|| Error::parse(0, "empty input"))
    }
}

impl<C: Coeff> PolyMatrix<C> {
    /// Matrix with a single `SLaurent` entry scaled into `K^0`.
    pub fn from_laurent_entries(dim: usize, entries: &[(usize, usize, SLaurent<C>)]) -> Self {
        let mut m = Self::zero(dim);
        for (r, c, v) in entries {
            m.add_entry(*r, *c, &KPoly::constant(v.clone()));
        }
        m
    }
}

/// Real sparse matrix in row lists, used for K-coefficient slices.
#[derive(Clone, Debug)]
pub struct SparseReal {
    pub dim: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseReal {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m[(r, *c)] += *v;
            }
        }
        m
    }
}

/// Max-norm of a complex matrix.
pub fn max_abs<T: RealField + Copy>(m: &NumMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| {
        acc.max(nalgebra::ComplexField::modulus(*z))
    })
}

/// Max-norm of a real matrix.
pub fn max_abs_real<T: RealField + Copy>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type M = PolyMatrix<BigRational>;

    #[test]
    fn kron_with_identity_is_block_diagonal() {
        let mut a = M::zero(2);
        a.set(0, 1, KPoly::k());
        let ab = M::identity(2).kron(&a);
        assert_eq!(ab.nnz(), 2);
        assert_eq!(ab.get(0, 1), KPoly::k());
        assert_eq!(ab.get(2, 3), KPoly::k());
        let ba = a.kron(&M::identity(2));
        assert_eq!(ba.get(0, 2), KPoly::k());
        assert_eq!(ba.get(1, 3), KPoly::k());
    }

    #[test]
    fn triplet_round_trip() {
        let mut a = M::zero(3);
        a.set(0, 2, "q^(1/2)*K + 1".parse().unwrap());
        a.set(2, 1, "-(q + q^-1)*K^2".parse().unwrap());
        let back = M::from_triplets(&a.to_triplets()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn permutation_convention() {
        let p = M::permutation(&[1, 2, 0]);
        assert_eq!(p.get(1, 0), KPoly::one());
        assert_eq!(p.get(0, 2), KPoly::one());
    }
}
