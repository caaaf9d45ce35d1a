//! Weight classes `S_n`, cyclic-shift orbits and the ω-symmetrized basis
//! in which `T⁽ʳ⁾` is block diagonal.
//!
//! `CP` acts on kets as the left shift `|a₁a₂…a_r⟩ ↦ |a₂…a_r a₁⟩`, which is
//! exactly `T⁽ʳ⁾` at `K = 0`. A symmetrized vector on the orbit of `a` is
//! `Σ_m ω^m |S^m a⟩` with `S` the right shift, so `CP v = ω v`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use nalgebra::DVector;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::eigen::{multiset_distance, CMat, Decomposition, C64};
use crate::error::{Error, Result};
use crate::exact::{Coeff, Cyclo, KPoly};
use crate::matrix::PolyMatrix;
use crate::transfer::TransferMatrix;

/// Site-label word, digits in `1..=N`, leftmost digit = first tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateWord {
    pub digits: Vec<u8>,
}

impl StateWord {
    pub fn new(digits: Vec<u8>) -> Self {
        Self { digits }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `Σ (a_k − 1) N^{r−k}`.
    pub fn index(&self, n: usize) -> usize {
        self.digits
            .iter()
            .fold(0, |acc, &d| acc * n + (d as usize - 1))
    }

    pub fn from_index(n: usize, r: usize, mut idx: usize) -> Self {
        let mut digits = vec![0u8; r];
        for k in (0..r).rev() {
            digits[k] = (idx % n) as u8 + 1;
            idx /= n;
        }
        Self { digits }
    }

    pub fn weight(&self) -> usize {
        self.digits.iter().map(|&d| d as usize).sum()
    }

    /// `S^m`: `|a₁…a_r⟩ ↦ |a_r a₁ … a_{r−1}⟩` applied `m` times.
    pub fn shift_right(&self, m: usize) -> Self {
        let mut d = self.digits.clone();
        if !d.is_empty() {
            let k = m % d.len();
            d.rotate_right(k);
        }
        Self { digits: d }
    }

    /// `CP^m`: the left shift applied `m` times.
    pub fn shift_left(&self, m: usize) -> Self {
        let mut d = self.digits.clone();
        if !d.is_empty() {
            let k = m % d.len();
            d.rotate_left(k);
        }
        Self { digits: d }
    }

    /// Smallest `d > 0` with `S^d a = a`.
    pub fn period(&self) -> usize {
        let r = self.len();
        (1..=r)
            .find(|&d| r.is_multiple_of(d) && self.shift_right(d) == *self)
            .unwrap_or(r)
    }

    /// Each digit `i` replaced by `i′ = N + 1 − i`.
    pub fn flip(&self, n: usize) -> Self {
        Self {
            digits: self.digits.iter().map(|&d| (n + 1) as u8 - d).collect(),
        }
    }
}

impl fmt::Display for StateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// A root of unity `e^{2πi num/den}` kept as a reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Omega {
    pub num: u32,
    pub den: u32,
}

impl Omega {
    pub fn new(k: i64, m: u32) -> Self {
        assert!(m > 0);
        let k = k.rem_euclid(m as i64) as u32;
        let g = k.gcd(&m).max(1);
        if k == 0 {
            return Self { num: 0, den: 1 };
        }
        Self {
            num: k / g,
            den: m / g,
        }
    }

    pub fn one() -> Self {
        Self { num: 0, den: 1 }
    }

    /// The `r` eigenvalues of `CP` on a chain of length `r`, by increasing
    /// argument.
    pub fn all(r: usize) -> Vec<Self> {
        (0..r as i64).map(|k| Self::new(k, r as u32)).collect()
    }

    /// `ω^d = 1`.
    pub fn is_admissible(&self, d: usize) -> bool {
        d.is_multiple_of(self.den as usize)
    }

    pub fn pow(&self, e: i64) -> Self {
        Self::new(self.num as i64 * e, self.den)
    }

    pub fn conj(&self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    pub fn to_complex(&self) -> C64 {
        let a = 2.0 * std::f64::consts::PI * self.num as f64 / self.den as f64;
        // exact values on the axes keep f₀ = ω checks clean
        match (4 * self.num).checked_rem(self.den) {
            Some(0) => match 4 * self.num / self.den {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, 1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, -1.0),
            },
            _ => C64::new(a.cos(), a.sin()),
        }
    }

    /// Parse `k/m`, `1`, `-1`, `i`, `-i`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let special = match s {
            "1" => Some(Self::one()),
            "-1" => Some(Self::new(1, 2)),
            "i" => Some(Self::new(1, 4)),
            "-i" => Some(Self::new(3, 4)),
            _ => None,
        };
        if let Some(o) = special {
            return Ok(o);
        }
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::parse(0, format!("bad root of unity '{s}', expected k/m")))?;
        let k: i64 = a
            .trim()
            .parse()
            .map_err(|_| Error::parse(0, format!("bad numerator in '{s}'")))?;
        let m: u32 = b
            .trim()
            .parse()
            .ok()
            .filter(|&m| m > 0)
            .ok_or_else(|| Error::parse(0, format!("bad denominator in '{s}'")))?;
        Ok(Self::new(k, m))
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// All words of length `r` over `1..=N` with digit sum `weight`, in
/// increasing index order.
pub fn words(n: usize, r: usize, weight: usize) -> Vec<StateWord> {
    fn rec(n: usize, left: usize, weight: usize, cur: &mut Vec<u8>, out: &mut Vec<StateWord>) {
        if left == 0 {
            if weight == 0 {
                out.push(StateWord::new(cur.clone()));
            }
            return;
        }
        for d in 1..=n {
            let rest = left - 1;
            if d > weight || weight - d < rest || weight - d > rest * n {
                continue;
            }
            cur.push(d as u8);
            rec(n, rest, weight - d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, r, weight, &mut Vec::with_capacity(r), &mut out);
    out
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// `dim S_n`: sum of multinomials `r!/(n₁!⋯n_N!)` over occupation numbers
/// with `Σ n_i = r`, `Σ i·n_i = n`. Zero outside `[r, N r]`.
pub fn subspace_dim(n_states: usize, r: usize, weight: usize) -> u128 {
    fn rec(i: usize, n: usize, left: usize, weight: usize, denom: u128, r_fact: u128) -> u128 {
        if i > n {
            return if left == 0 && weight == 0 {
                r_fact / denom
            } else {
                0
            };
        }
        let mut total = 0;
        for k in 0..=left {
            if k * i > weight {
                break;
            }
            total += rec(
                i + 1,
                n,
                left - k,
                weight - k * i,
                denom * factorial(k),
                r_fact,
            );
        }
        total
    }
    if weight < r || weight > n_states * r {
        return 0;
    }
    rec(1, n_states, r, weight, 1, factorial(r))
}

/// Number of words of length `len` and given weight, by dynamic
/// programming over sites.
fn count_words(n: usize, len: usize, weight: usize) -> u128 {
    let mut dp = vec![0u128; weight + 1];
    dp[0] = 1;
    for _ in 0..len {
        let mut next = vec![0u128; weight + 1];
        for (w, &c) in dp.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for d in 1..=n {
                if w + d <= weight {
                    next[w + d] += c;
                }
            }
        }
        dp = next;
    }
    dp[weight]
}

fn euler_phi(m: usize) -> usize {
    (1..=m).filter(|k| k.gcd(&m) == 1).count()
}

/// Orbit count of `S_n` under cyclic shifts by Burnside's lemma:
/// `(1/r) Σ_{g|r} φ(r/g) · #{words with period dividing g}`.
pub fn burnside_orbit_count(n_states: usize, r: usize, weight: usize) -> u128 {
    let mut total = 0u128;
    for g in (1..=r).filter(|g| r.is_multiple_of(*g)) {
        let reps = r / g;
        if !weight.is_multiple_of(reps) {
            continue;
        }
        total += euler_phi(reps) as u128 * count_words(n_states, g, weight / reps);
    }
    total / r as u128
}

/// A cyclic orbit; `members[m] = S^m representative`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpOrbit {
    pub representative: StateWord,
    pub period: usize,
    pub members: Vec<StateWord>,
}

impl CpOrbit {
    pub fn of(word: &StateWord) -> Self {
        let r = word.len();
        let rep = (0..r).map(|m| word.shift_right(m)).min().unwrap();
        let period = rep.period();
        let members = (0..period).map(|m| rep.shift_right(m)).collect();
        Self {
            representative: rep,
            period,
            members,
        }
    }
}

/// Orbits of `S_n`, ordered by representative.
pub fn enumerate_orbits(n_states: usize, r: usize, weight: usize) -> Vec<CpOrbit> {
    words(n_states, r, weight)
        .into_iter()
        .filter_map(|w| {
            let o = CpOrbit::of(&w);
            (o.representative == w).then_some(o)
        })
        .collect()
}

/// `Σ_{m<d} ω^m |S^m a⟩`, leading coefficient 1 on the representative.
#[derive(Clone, Debug)]
pub struct SymBasisVector {
    pub orbit: CpOrbit,
    pub omega: Omega,
}

impl SymBasisVector {
    /// `(flat index, ω^m)` pairs.
    pub fn components(&self, n: usize) -> Vec<(usize, Omega)> {
        self.orbit
            .members
            .iter()
            .enumerate()
            .map(|(m, w)| (w.index(n), self.omega.pow(m as i64)))
            .collect()
    }

    pub fn to_dense(&self, n: usize) -> DVector<C64> {
        let r = self.orbit.representative.len();
        let mut v = DVector::zeros(n.pow(r as u32));
        for (i, w) in self.components(n) {
            v[i] += w.to_complex();
        }
        v
    }

    /// Squared norm, equal to the period.
    pub fn norm_sqr(&self) -> usize {
        self.orbit.period
    }
}

/// Every symmetrized vector of `S_n`, ordered by (representative, ω).
pub fn build_sym_basis(n_states: usize, r: usize, weight: usize) -> Vec<SymBasisVector> {
    let omegas = Omega::all(r);
    let mut out = Vec::new();
    for orbit in enumerate_orbits(n_states, r, weight) {
        for &omega in &omegas {
            if omega.is_admissible(orbit.period) {
                out.push(SymBasisVector {
                    orbit: orbit.clone(),
                    omega,
                });
            }
        }
    }
    out
}

/// Orbits of `S_n` that carry a vector for `ω`.
pub fn sector_orbits(n_states: usize, r: usize, weight: usize, omega: Omega) -> Vec<CpOrbit> {
    enumerate_orbits(n_states, r, weight)
        .into_iter()
        .filter(|o| omega.is_admissible(o.period))
        .collect()
}

/// `CP` as a permutation matrix: `|a₁…a_r⟩ ↦ |a₂…a_r a₁⟩`.
pub fn cp_matrix<C: Coeff>(n_states: usize, r: usize) -> PolyMatrix<C> {
    PolyMatrix::permutation(&cp_perm(n_states, r))
}

fn cp_perm(n_states: usize, r: usize) -> Vec<usize> {
    let dim = n_states.pow(r as u32);
    (0..dim)
        .map(|j| {
            StateWord::from_index(n_states, r, j)
                .shift_left(1)
                .index(n_states)
        })
        .collect()
}

/// `T⁽ʳ⁾(K = 0) = CP`, exactly.
pub fn check_t0_is_cp<C: Coeff>(t: &TransferMatrix<C>) -> Result<()> {
    let cp = cp_matrix::<C>(t.n, t.r);
    let t0 = t.at_k_zero();
    if t0 == cp {
        return Ok(());
    }
    let diff = t0.sub(&cp);
    let (r, c, v) = diff.entries().next().unwrap();
    Err(Error::InvariantViolation(format!(
        "T(K=0) differs from CP at ({r}, {c}) by {v}"
    )))
}

/// `[T, CP] = 0`, exactly.
pub fn check_cp_commutes<C: Coeff>(t: &TransferMatrix<C>) -> Result<()> {
    let perm = cp_perm(t.n, t.r);
    let conj = t.matrix.relabel(&perm);
    if conj == t.matrix {
        return Ok(());
    }
    let diff = conj.sub(&t.matrix);
    let (r, c, v) = diff.entries().next().unwrap();
    Err(Error::InvariantViolation(format!(
        "CP T CP⁻¹ differs from T at ({r}, {c}) by {v}"
    )))
}

/// `[T, W] = 0`: every nonzero entry connects words of equal weight.
pub fn check_weight_conservation<C: Coeff>(t: &TransferMatrix<C>) -> Result<()> {
    for (r, c, _) in t.matrix.entries() {
        let a = StateWord::from_index(t.n, t.r, r);
        let b = StateWord::from_index(t.n, t.r, c);
        if a.weight() != b.weight() {
            return Err(Error::InvariantViolation(format!(
                "T connects |{b}⟩ (weight {}) to |{a}⟩ (weight {})",
                b.weight(),
                a.weight()
            )));
        }
    }
    Ok(())
}

/// `F T(q) F = T(q⁻¹)` with `F` the digit flip `i ↦ i′`, exactly.
pub fn check_flip_symmetry<C: Coeff>(t: &TransferMatrix<C>) -> bool {
    let dim = t.dim();
    let perm: Vec<usize> = (0..dim)
        .map(|j| StateWord::from_index(t.n, t.r, j).flip(t.n).index(t.n))
        .collect();
    t.matrix.relabel(&perm) == t.matrix.q_invert()
}

/// `T⁽ʳ⁾` restricted to the `(n, ω)` sector, exact over `ℚ(s, ζ)[K]` with
/// `ζ = e^{2πi/den(ω)}`. Column `j` holds the coordinates of `T v_j`.
#[derive(Clone, Debug)]
pub struct ReducedBlock<C> {
    pub n_states: usize,
    pub r: usize,
    pub weight: usize,
    pub omega: Omega,
    pub basis: Vec<CpOrbit>,
    entries: Vec<Vec<Cyclo<C>>>,
}

impl<C: Coeff> ReducedBlock<C> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, b: usize, j: usize) -> &Cyclo<C> {
        &self.entries[b][j]
    }

    /// Numeric `B_k` with `B(K) = Σ K^k B_k`, `k = 0..=r`.
    pub fn k_coeff_matrices(&self, q: f64) -> Result<Vec<CMat>> {
        let d = self.dim();
        let mut out = vec![CMat::zeros(d, d); self.r + 1];
        let m = self.omega.den;
        for b in 0..d {
            for j in 0..d {
                for (e, p) in self.entries[b][j].coeffs().iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    let z = Omega::new(e as i64, m).to_complex();
                    for (k, a) in p.eval_coeffs(q)?.into_iter().enumerate() {
                        if k > self.r {
                            return Err(Error::InvariantViolation(format!(
                                "K-degree {k} exceeds r = {}",
                                self.r
                            )));
                        }
                        out[k][(b, j)] += z * a;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn eval(&self, q: f64, k: C64) -> Result<CMat> {
        Ok(eval_k_poly_matrix(&self.k_coeff_matrices(q)?, k))
    }

    pub fn basis_words(&self) -> Vec<String> {
        self.basis
            .iter()
            .map(|o| o.representative.to_string())
            .collect()
    }
}

/// `Σ K^k B_k` by Horner.
pub fn eval_k_poly_matrix(coeffs: &[CMat], k: C64) -> CMat {
    let d = coeffs.first().map_or(0, |m| m.nrows());
    coeffs
        .iter()
        .rev()
        .fold(CMat::zeros(d, d), |acc, b| acc * k + b)
}

/// Extract the `(n, ω)` block and verify exactly that `T` maps the sector
/// into itself.
pub fn reduced_block<C: Coeff>(
    t: &TransferMatrix<C>,
    weight: usize,
    omega: Omega,
) -> Result<ReducedBlock<C>> {
    let (n, r) = (t.n, t.r);
    let basis = sector_orbits(n, r, weight, omega);
    let m = omega.den as usize;
    // every word of S_n: (orbit position, shift)
    let mut locate: HashMap<usize, (usize, usize)> = HashMap::new();
    for (j, o) in basis.iter().enumerate() {
        for (s, w) in o.members.iter().enumerate() {
            locate.insert(w.index(n), (j, s));
        }
    }
    let shift_exp = |s: usize| (s * omega.num as usize) % m;
    let d = basis.len();
    let mut entries = vec![vec![Cyclo::zero(m); d]; d];
    for (b, o) in basis.iter().enumerate() {
        for (&col, v) in t.matrix.row(o.representative.index(n)) {
            if let Some(&(j, s)) = locate.get(&col) {
                entries[b][j].add_scaled_root(v, shift_exp(s));
            }
        }
    }
    // leakage: T v_j − Σ_b B_{bj} v_b must vanish on every word
    let tt = t.matrix.transpose();
    for (j, o) in basis.iter().enumerate() {
        let mut diff: BTreeMap<usize, Cyclo<C>> = BTreeMap::new();
        for (s, w) in o.members.iter().enumerate() {
            for (&x, v) in tt.row(w.index(n)) {
                diff.entry(x)
                    .or_insert_with(|| Cyclo::zero(m))
                    .add_scaled_root(v, shift_exp(s));
            }
        }
        for (b, ob) in basis.iter().enumerate() {
            let e = &entries[b][j];
            if e.is_zero() {
                continue;
            }
            for (s, w) in ob.members.iter().enumerate() {
                let slot = diff.entry(w.index(n)).or_insert_with(|| Cyclo::zero(m));
                slot.sub_assign(&e.rotate(shift_exp(s)));
            }
        }
        for (x, c) in diff {
            if !c.is_zero() {
                let word = StateWord::from_index(n, r, x);
                return Err(Error::InvariantViolation(format!(
                    "T maps the (n = {weight}, ω = {omega}) vector on orbit {} onto |{word}⟩ outside the sector",
                    o.representative
                )));
            }
        }
    }
    Ok(ReducedBlock {
        n_states: n,
        r,
        weight,
        omega,
        basis,
        entries,
    })
}

/// Eigenvalues with multiplicity, taken as cluster means.
pub fn block_eigenvalues(block: &CMat) -> Result<Vec<C64>> {
    let d = Decomposition::new(block)?;
    Ok(d.clusters
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationCheck {
    pub weight: usize,
    pub partner: usize,
    pub omega: Omega,
    pub q: f64,
    pub dim: usize,
    /// Largest matching distance over the sampled `K`.
    pub residual: f64,
}

/// Compares the spectrum of the `(n, ω)` block at `q` with that of the
/// `((N+1)r − n, ω)` block at `1/q` on each sampled `K`.
pub fn conjugate_spectrum_check<C: Coeff>(
    t: &TransferMatrix<C>,
    weight: usize,
    omega: Omega,
    q: f64,
    ks: &[f64],
) -> Result<ConjugationCheck> {
    let partner = (t.n + 1) * t.r - weight;
    let a = reduced_block(t, weight, omega)?;
    let b = reduced_block(t, partner, omega)?;
    let mut residual: f64 = if a.dim() == b.dim() {
        0.0
    } else {
        f64::INFINITY
    };
    if a.dim() == b.dim() && a.dim() > 0 {
        let ca = a.k_coeff_matrices(q)?;
        let cb = b.k_coeff_matrices(1.0 / q)?;
        for &k in ks {
            let k = C64::new(k, 0.0);
            let ea = block_eigenvalues(&eval_k_poly_matrix(&ca, k))?;
            let eb = block_eigenvalues(&eval_k_poly_matrix(&cb, k))?;
            residual = residual.max(multiset_distance(&ea, &eb));
        }
    }
    Ok(ConjugationCheck {
        weight,
        partner,
        omega,
        q,
        dim: a.dim(),
        residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DimRow {
    pub n: usize,
    pub dim: u128,
    pub words_enumerated: usize,
    pub orbits: usize,
    pub burnside_orbits: u128,
    /// `(period, number of orbits)` pairs.
    pub periods: Vec<(usize, usize)>,
    /// `(ω, sector dimension)` pairs.
    pub sectors: Vec<(Omega, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimTable {
    #[serde(rename = "N")]
    pub n_states: usize,
    pub r: usize,
    pub total: u128,
    pub rows: Vec<DimRow>,
}

impl DimTable {
    /// `Σ dim S_n = N^r`, enumeration agrees with the multinomial count,
    /// orbit periods add up and Burnside agrees with the orbit census.
    pub fn consistent(&self) -> bool {
        let full = (self.n_states as u128).pow(self.r as u32);
        self.total == full
            && self.rows.iter().all(|row| {
                let by_period: usize = row.periods.iter().map(|(p, c)| p * c).sum();
                let by_sector: usize = row.sectors.iter().map(|(_, c)| c).sum();
                row.dim == row.words_enumerated as u128
                    && by_period == row.words_enumerated
                    && by_sector == row.words_enumerated
                    && row.burnside_orbits == row.orbits as u128
            })
    }
}

pub fn dims_table(n_states: usize, r: usize) -> DimTable {
    let rows: Vec<DimRow> = (r..=n_states * r)
        .map(|n| {
            let orbits = enumerate_orbits(n_states, r, n);
            let mut periods: BTreeMap<usize, usize> = BTreeMap::new();
            for o in &orbits {
                *periods.entry(o.period).or_default() += 1;
            }
            let sectors = Omega::all(r)
                .into_iter()
                .map(|w| {
                    (
                        w,
                        orbits.iter().filter(|o| w.is_admissible(o.period)).count(),
                    )
                })
                .collect();
            DimRow {
                n,
                dim: subspace_dim(n_states, r, n),
                words_enumerated: words(n_states, r, n).len(),
                orbits: orbits.len(),
                burnside_orbits: burnside_orbit_count(n_states, r, n),
                periods: periods.into_iter().collect(),
                sectors,
            }
        })
        .collect();
    DimTable {
        n_states,
        r,
        total: rows.iter().map(|x| x.dim).sum(),
        rows,
    }
}

/// `1 + K^r`, the `n = r` block entry.
pub fn ground_block_entry<C: Coeff>(r: usize) -> KPoly<C> {
    KPoly::one() + KPoly::k().pow(r as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::{build_t, DEFAULT_CAP};
    use num_rational::BigRational;

    fn w(s: &str) -> StateWord {
        StateWord::new(s.bytes().map(|b| b - b'0').collect())
    }

    #[test]
    fn word_index_round_trip() {
        let x = w("11231");
        // digits − 1 = 0,0,1,2,0 in base 3
        assert_eq!(x.index(3), 9 + 2 * 3);
        assert_eq!(StateWord::from_index(3, 5, x.index(3)), x);
    }

    #[test]
    fn subspace_dimensions() {
        assert_eq!(subspace_dim(3, 5, 10), 51);
        assert_eq!(subspace_dim(3, 4, 8), 19);
        assert_eq!(subspace_dim(3, 4, 4), 1);
        assert_eq!(subspace_dim(3, 4, 3), 0);
        assert_eq!(subspace_dim(3, 4, 13), 0);
        for (n, r) in [(3, 5), (4, 3), (5, 3)] {
            let total: u128 = (r..=n * r).map(|x| subspace_dim(n, r, x)).sum();
            assert_eq!(total, (n as u128).pow(r as u32));
        }
    }

    #[test]
    fn orbit_census_examples() {
        let o = enumerate_orbits(3, 4, 8);
        let reps: Vec<String> = o.iter().map(|x| x.representative.to_string()).collect();
        assert!(reps.contains(&"2222".to_string()) && reps.contains(&"1313".to_string()));
        let mut periods: Vec<usize> = o.iter().map(|x| x.period).collect();
        periods.sort();
        assert_eq!(periods, vec![1, 2, 4, 4, 4, 4]);

        let o = enumerate_orbits(3, 3, 6);
        let reps: Vec<String> = o.iter().map(|x| x.representative.to_string()).collect();
        assert_eq!(reps, vec!["123", "132", "222"]);

        let o = enumerate_orbits(3, 5, 10);
        assert_eq!(o.len(), 11);
        assert_eq!(o.iter().filter(|x| x.period == 1).count(), 1);
    }

    #[test]
    fn burnside_agrees_with_enumeration() {
        for (n, r) in [(3, 4), (3, 6), (4, 4), (5, 3)] {
            for x in r..=n * r {
                assert_eq!(
                    burnside_orbit_count(n, r, x),
                    enumerate_orbits(n, r, x).len() as u128,
                    "N = {n}, r = {r}, n = {x}"
                );
            }
        }
    }

    #[test]
    fn sym_basis_counts_and_doublet() {
        let v = build_sym_basis(3, 4, 8);
        assert_eq!(v.len(), 19);
        let b: Vec<&SymBasisVector> = v
            .iter()
            .filter(|x| x.orbit.representative == w("1313"))
            .collect();
        let omegas: Vec<Omega> = b.iter().map(|x| x.omega).collect();
        assert_eq!(omegas, vec![Omega::one(), Omega::new(1, 2)]);
        assert_eq!(build_sym_basis(3, 5, 5).len(), 1);
        assert_eq!(build_sym_basis(3, 4, 5).len(), 4);
    }

    #[test]
    fn cp_eigenrelation_and_orthogonality() {
        let n = 3;
        let r = 4;
        let cp = cp_matrix::<BigRational>(n, r)
            .eval(1.0f64, C64::new(0.0, 0.0))
            .unwrap();
        for x in r..=n * r {
            let basis = build_sym_basis(n, r, x);
            for v in &basis {
                let d = v.to_dense(n);
                let res = (&cp * &d - &d * v.omega.to_complex()).norm();
                assert!(res < 1e-12);
                assert!((d.norm_squared() - v.norm_sqr() as f64).abs() < 1e-12);
            }
            for (i, a) in basis.iter().enumerate() {
                for b in &basis[i + 1..] {
                    assert!(a.to_dense(n).dotc(&b.to_dense(n)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cp_examples() {
        let t = build_t::<BigRational>(3, 2, DEFAULT_CAP).unwrap();
        check_t0_is_cp(&t).unwrap();
        assert_eq!(cp_matrix::<BigRational>(3, 2), crate::braid::build_swap(3));
        assert_eq!(w("1123").shift_left(1), w("1231"));
        assert_eq!(w("1123").shift_right(1), w("3112"));
    }

    #[test]
    fn exact_symmetry_checks() {
        for (n, r) in [(3, 3), (3, 4), (4, 3)] {
            let t = build_t::<BigRational>(n, r, DEFAULT_CAP).unwrap();
            check_t0_is_cp(&t).unwrap();
            check_cp_commutes(&t).unwrap();
            check_weight_conservation(&t).unwrap();
            assert!(check_flip_symmetry(&t));
        }
    }

    #[test]
    fn block_sizes_and_ground_block() {
        let t = build_t::<BigRational>(3, 4, DEFAULT_CAP).unwrap();
        let b = reduced_block(&t, 8, Omega::one()).unwrap();
        assert_eq!(b.dim(), 6);
        let b = reduced_block(&t, 4, Omega::one()).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.entry(0, 0).reduced()[0], ground_block_entry(4));
        let t3 = build_t::<BigRational>(3, 3, DEFAULT_CAP).unwrap();
        for k in 0..3 {
            assert_eq!(reduced_block(&t3, 5, Omega::new(k, 3)).unwrap().dim(), 2);
        }
    }

    #[test]
    fn leakage_is_detected() {
        let mut t = build_t::<BigRational>(3, 2, DEFAULT_CAP).unwrap();
        // spoil the weight structure: |11⟩ ← |12⟩
        t.matrix.set(0, 1, KPoly::k());
        assert!(matches!(
            reduced_block(&t, 3, Omega::one()),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn omega_parsing() {
        assert_eq!(Omega::parse("-1").unwrap(), Omega::new(2, 4));
        assert_eq!(Omega::parse("3/4").unwrap(), Omega::new(3, 4));
        assert_eq!(Omega::parse("i").unwrap().to_complex(), C64::new(0.0, 1.0));
        assert!(Omega::parse("1/0").is_err());
    }

    #[test]
    fn dims_table_is_consistent() {
        let t = dims_table(3, 5);
        assert!(t.consistent());
        assert_eq!(t.rows.iter().find(|r| r.n == 10).unwrap().dim, 51);
    }
}
