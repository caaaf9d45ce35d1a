//! Chain Hamiltonian `H⁽ʳ⁾ = T(0)⁻¹ ∂_θ T(θ)|₀`, built both as a sum of
//! nearest-neighbour terms and from the exact `K`-derivative of `T`.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::Serialize;

use crate::braid::{build_p0prime, conj, ModelParams};
use crate::eigen::{schur_eigenvalues, CMat, C64};
use crate::error::{Error, Result};
use crate::exact::Coeff;
use crate::spectra::SpectralRecord;
use crate::symmetry::{CpOrbit, StateWord, SymBasisVector};
use crate::transfer::{checked_dim, TransferMatrix};

/// Entries below this are treated as structural zeros in audits.
const ZERO: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    pub n_states: usize,
    pub r: usize,
    pub q: f64,
    pub kdot0: f64,
    pub matrix: DMatrix<f64>,
}

/// `K̇₀ = −1/sinh η`.
pub fn kdot0(params: &ModelParams<f64>) -> f64 {
    params.kdot0()
}

/// `Σ_k K̇₀ P₀′` on each neighbouring pair, with site `r` wrapped to site 1.
/// The two-site term on sites `(k, k+1)` acts on the ordered pair
/// `(k+1, k)`; for `r = 1` the single term degenerates to `K̇₀ I`.
pub fn build_h_sum(params: &ModelParams<f64>, r: usize, cap: usize) -> Result<HamiltonianMatrix> {
    let n = params.n;
    let dim = checked_dim(n, r, cap)?;
    let kd = params.kdot0();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    if r == 1 {
        h.fill_with_identity();
        h *= kd;
    } else {
        let p0 = build_p0prime::<Rational64>(n)?.eval_real(params.q, 0.0)?;
        for col in 0..dim {
            let y = StateWord::from_index(n, r, col);
            for k in 0..r {
                let (a, b) = ((k + 1) % r, k);
                let pc = (y.digits[a] as usize - 1) * n + (y.digits[b] as usize - 1);
                for pr in 0..n * n {
                    let v = p0[(pr, pc)];
                    if v == 0.0 {
                        continue;
                    }
                    let mut x = y.clone();
                    x.digits[a] = (pr / n + 1) as u8;
                    x.digits[b] = (pr % n + 1) as u8;
                    h[(x.index(n), col)] += kd * v;
                }
            }
        }
    }
    Ok(HamiltonianMatrix {
        n_states: n,
        r,
        q: params.q,
        kdot0: kd,
        matrix: h,
    })
}

/// `CP⁻¹ · K̇₀ · ∂_K T|_{K=0}`, with the derivative taken exactly and
/// `CP⁻¹` applied as a row permutation.
pub fn build_h_logderiv<C: Coeff>(
    t: &TransferMatrix<C>,
    params: &ModelParams<f64>,
) -> Result<HamiltonianMatrix> {
    if t.n != params.n {
        return Err(Error::domain(
            "transfer matrix and parameters disagree on N",
        ));
    }
    let t1 = t.matrix.k_coeff(1).eval_real(params.q, 0.0)?;
    Ok(from_t1(t, params, &t1))
}

/// Finite-difference variant for debugging: `CP⁻¹ (T(K(h)) − T(K(−h))) / 2h`.
pub fn build_h_logderiv_fd<C: Coeff>(
    t: &TransferMatrix<C>,
    params: &ModelParams<f64>,
    h: f64,
) -> Result<HamiltonianMatrix> {
    let plus = t.matrix.eval_real(params.q, params.k_of_theta(h)?)?;
    let minus = t.matrix.eval_real(params.q, params.k_of_theta(-h)?)?;
    let d = (plus - minus) / (2.0 * h);
    let mut out = from_t1(t, params, &d);
    // from_t1 multiplies by K̇₀; the θ-derivative already contains it
    out.matrix /= params.kdot0();
    Ok(out)
}

fn from_t1<C>(
    t: &TransferMatrix<C>,
    params: &ModelParams<f64>,
    d: &DMatrix<f64>,
) -> HamiltonianMatrix {
    let (n, r) = (t.n, t.r);
    let dim = d.nrows();
    let kd = params.kdot0();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let src = StateWord::from_index(n, r, i).shift_left(1).index(n);
        for j in 0..dim {
            h[(i, j)] = kd * d[(src, j)];
        }
    }
    HamiltonianMatrix {
        n_states: n,
        r,
        q: params.q,
        kdot0: kd,
        matrix: h,
    }
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn to_complex(&self) -> CMat {
        self.matrix.map(|x| C64::new(x, 0.0))
    }

    /// Max-norm distance to another Hamiltonian.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }

    /// Largest entry connecting words of different weight.
    pub fn weight_commutator(&self) -> f64 {
        let (n, r) = (self.n_states, self.r);
        let w: Vec<usize> = (0..self.dim())
            .map(|i| StateWord::from_index(n, r, i).weight())
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if w[i] != w[j] {
                    worst = worst.max(self.matrix[(i, j)].abs());
                }
            }
        }
        worst
    }

    /// `max |H[CP i, CP j] − H[i, j]|`.
    pub fn cp_commutator(&self) -> f64 {
        let (n, r) = (self.n_states, self.r);
        let p: Vec<usize> = (0..self.dim())
            .map(|i| StateWord::from_index(n, r, i).shift_left(1).index(n))
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((self.matrix[(p[i], p[j])] - self.matrix[(i, j)]).abs());
            }
        }
        worst
    }

    /// Largest column of `H` over the words of the given weights; zero when
    /// those weight spaces lie in the kernel.
    pub fn kernel_defect(&self, weights: &[usize]) -> f64 {
        let (n, r) = (self.n_states, self.r);
        let mut worst: f64 = 0.0;
        for j in 0..self.dim() {
            if weights.contains(&StateWord::from_index(n, r, j).weight()) {
                worst = worst.max(self.matrix.column(j).amax());
            }
        }
        worst
    }

    /// Weights whose spaces the closed-form spectra put in the kernel:
    /// `r`, `r + 1`, `(N+1)r − 1`, `(N+1)r`.
    pub fn edge_weights(&self) -> Vec<usize> {
        let top = (self.n_states + 1) * self.r;
        let mut w = vec![self.r, self.r + 1, top - 1, top];
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        schur_eigenvalues(&self.to_complex())
    }

    /// Largest imaginary part in the spectrum.
    pub fn max_imag(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max))
    }

    pub fn nullity(&self, tol: f64) -> usize {
        let sv = self.matrix.clone().singular_values();
        let scale = sv.max().max(1.0);
        sv.iter().filter(|&&s| s <= tol * scale).count()
    }
}

/// `H` eigenvalue attached to one transfer-matrix branch.
#[derive(Clone, Debug, Serialize)]
pub struct HEigen {
    pub n: usize,
    pub omega: crate::symmetry::Omega,
    pub multiplicity: usize,
    #[serde(serialize_with = "ser_c")]
    pub eigenvalue: C64,
    /// `‖H v − λ v‖ / (‖v‖ max(1, |λ|))` for the record's eigenvector.
    pub residual: f64,
}

fn ser_c<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// The record's eigenvector in the full `N^r` space.
pub fn record_vector(rec: &SpectralRecord) -> Result<nalgebra::DVector<C64>> {
    let n = rec.n_states;
    let mut v = nalgebra::DVector::<C64>::zeros(n.pow(rec.r as u32));
    for (c, word) in rec.eigvec.iter().zip(&rec.basis) {
        let digits = word
            .bytes()
            .map(|b| b.wrapping_sub(b'0'))
            .collect::<Vec<u8>>();
        if digits.len() != rec.r {
            return Err(Error::domain(format!("bad basis word '{word}'")));
        }
        let orbit = CpOrbit::of(&StateWord::new(digits));
        let sym = SymBasisVector {
            orbit,
            omega: rec.omega,
        };
        v += sym.to_dense(n) * *c;
    }
    Ok(v)
}

/// `λ_H = K̇₀ ω^{r−1} f₁` for every record, checked by acting with `H`.
pub fn h_eigens_from_records(
    h: &HamiltonianMatrix,
    records: &[SpectralRecord],
) -> Result<Vec<HEigen>> {
    let hc = h.to_complex();
    records
        .iter()
        .map(|rec| {
            let f1 = rec.f.get(1).copied().unwrap_or_default();
            let w = rec.omega.pow(rec.r as i64 - 1).to_complex();
            let lambda = w * f1 * h.kdot0;
            let v = record_vector(rec)?;
            let hv = &hc * &v;
            let residual = (hv - &v * lambda).norm() / (v.norm() * lambda.norm().max(1.0));
            Ok(HEigen {
                n: rec.n,
                omega: rec.omega,
                multiplicity: rec.multiplicity,
                eigenvalue: lambda,
                residual,
            })
        })
        .collect()
}

/// `σ_i = (N + 1)/2 − i` for `i = 1..N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinAssignment {
    pub sigma: Vec<Rational64>,
}

impl SpinAssignment {
    pub fn new(n: usize) -> Self {
        let half = Rational64::new(n as i64 + 1, 2);
        Self {
            sigma: (1..=n as i64).map(|i| half - i).collect(),
        }
    }

    /// Spin of the 1-based state label.
    pub fn of(&self, label: u8) -> Rational64 {
        self.sigma[label as usize - 1]
    }

    pub fn pair_is_neutral(&self, a: u8, b: u8) -> bool {
        self.of(a) + self.of(b) == Rational64::from_integer(0)
    }
}

/// Two-site pairs `(i, j)` (1-based) on which `P₀′` has a nonzero entry.
pub fn p0_active_pairs(n: usize, q: f64) -> Result<Vec<(u8, u8)>> {
    let p0 = build_p0prime::<Rational64>(n)?.eval_real(q, 0.0)?;
    let mut out = BTreeSet::new();
    for row in 0..n * n {
        for col in 0..n * n {
            if p0[(row, col)].abs() > ZERO {
                out.insert(((row / n + 1) as u8, (row % n + 1) as u8));
                out.insert(((col / n + 1) as u8, (col % n + 1) as u8));
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub from: String,
    pub to: String,
    pub value: f64,
    pub reason: String,
}

/// Every nonzero element of `H` must either leave the word unchanged and
/// sit on a word with a neutral neighbouring pair, or change exactly one
/// neighbouring pair from a neutral pair to a neutral pair.
pub fn selection_rule_audit(h: &HamiltonianMatrix) -> Vec<Violation> {
    let (n, r) = (h.n_states, h.r);
    let spins = SpinAssignment::new(n);
    let pairs: Vec<(usize, usize)> = if r == 1 {
        Vec::new()
    } else {
        (0..r).map(|k| (k, (k + 1) % r)).collect()
    };
    let mut out = Vec::new();
    for j in 0..h.dim() {
        let y = StateWord::from_index(n, r, j);
        for i in 0..h.dim() {
            let v = h.matrix[(i, j)];
            if v.abs() <= ZERO {
                continue;
            }
            let x = StateWord::from_index(n, r, i);
            let diff: Vec<usize> = (0..r).filter(|&k| x.digits[k] != y.digits[k]).collect();
            let neutral = |w: &StateWord, (a, b): (usize, usize)| {
                spins.pair_is_neutral(w.digits[a], w.digits[b])
            };
            let reason = if diff.is_empty() {
                if r == 1 || pairs.iter().any(|&p| neutral(&y, p)) {
                    continue;
                }
                "diagonal element on a word without a neutral pair".to_string()
            } else {
                let ok = pairs.iter().any(|&(a, b)| {
                    diff.iter().all(|&k| k == a || k == b)
                        && neutral(&y, (a, b))
                        && neutral(&x, (a, b))
                });
                if ok {
                    continue;
                }
                format!("changes sites {diff:?} outside a neutral neighbouring pair")
            };
            out.push(Violation {
                from: y.to_string(),
                to: x.to_string(),
                value: v,
                reason,
            });
        }
    }
    out
}

/// Words reachable from `start` through off-diagonal elements of `H`.
pub fn flip_reachability(h: &HamiltonianMatrix, start: &StateWord) -> Vec<StateWord> {
    let (n, r) = (h.n_states, h.r);
    let mut seen = BTreeSet::from([start.index(n)]);
    let mut queue = VecDeque::from([start.index(n)]);
    while let Some(j) = queue.pop_front() {
        for i in 0..h.dim() {
            if i != j && h.matrix[(i, j)].abs() > ZERO && seen.insert(i) {
                queue.push_back(i);
            }
        }
    }
    seen.into_iter()
        .map(|i| StateWord::from_index(n, r, i))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagationReport {
    pub starts_checked: usize,
    /// `(start word, next-site label)` pairs where site 2 is not neutral with
    /// site 3 and no single flip of the leading pair makes it so.
    pub failures: Vec<(String, u8)>,
    /// Start words whose orbit under repeated flips misses a neutral pair at
    /// some position of the chain.
    pub unreached: Vec<String>,
}

impl PropagationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.unreached.is_empty()
    }
}

/// A neutral pair on sites `(1, 2)` can be flipped, in one step, into a
/// pair whose second member is neutral with site 3, whatever site 3 holds;
/// repeated flips therefore move a neutral pair all around the chain.
pub fn propagation_audit(h: &HamiltonianMatrix) -> PropagationReport {
    let (n, r) = (h.n_states, h.r);
    let spins = SpinAssignment::new(n);
    let mut rep = PropagationReport {
        starts_checked: 0,
        failures: Vec::new(),
        unreached: Vec::new(),
    };
    if r < 3 {
        return rep;
    }
    for j in 0..h.dim() {
        let y = StateWord::from_index(n, r, j);
        if !spins.pair_is_neutral(y.digits[0], y.digits[1]) {
            continue;
        }
        rep.starts_checked += 1;
        let next = y.digits[2];
        let one_step = spins.pair_is_neutral(y.digits[1], next)
            || (0..h.dim()).any(|i| {
                if i == j || h.matrix[(i, j)].abs() <= ZERO {
                    return false;
                }
                let x = StateWord::from_index(n, r, i);
                x.digits[2..] == y.digits[2..] && spins.pair_is_neutral(x.digits[1], next)
            });
        if !one_step {
            rep.failures.push((y.to_string(), next));
        }
        let reach = flip_reachability(h, &y);
        let everywhere = (0..r).all(|k| {
            reach
                .iter()
                .any(|w| spins.pair_is_neutral(w.digits[k], w.digits[(k + 1) % r]))
        });
        if !everywhere {
            rep.unreached.push(y.to_string());
        }
    }
    rep
}

/// Conjugate label `i′` for 1-based labels.
pub fn conj_label(n: usize, i: u8) -> u8 {
    (conj(n, i as usize - 1) + 1) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::diagonalize_all;
    use crate::transfer::{build_t, DEFAULT_CAP};
    use num_rational::BigRational;

    fn params(n: usize, q: f64) -> ModelParams<f64> {
        ModelParams::new(n, q).unwrap()
    }

    #[test]
    fn kdot0_values() {
        assert!((kdot0(&params(3, 1.0)) + 2.0 / 5f64.sqrt()).abs() < 1e-14);
        assert!((kdot0(&params(4, 1.0)) + 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(kdot0(&params(5, 0.3)) < 0.0);
    }

    #[test]
    fn two_site_matrix_elements() {
        let p = params(3, 2.0);
        let h = build_h_sum(&p, 2, DEFAULT_CAP).unwrap();
        let kd = p.kdot0();
        let idx = |s: &str| StateWord::new(s.bytes().map(|b| b - b'0').collect()).index(3);
        // (11)⊗(33) is diagonal on |13⟩
        assert!((h.matrix[(idx("13"), idx("13"))] - kd * 2.5).abs() < 1e-12);
        assert!((h.matrix[(idx("22"), idx("22"))] - kd * 2.0).abs() < 1e-12);
        assert!((h.trace() - 7.0 * kd).abs() < 1e-12);

        let p = params(4, 1.5);
        let h = build_h_sum(&p, 2, DEFAULT_CAP).unwrap();
        let want = p.kdot0() * (1.5f64.powi(2) + 1.5f64.powi(-2));
        let i = StateWord::new(vec![1, 4]).index(4);
        assert!((h.matrix[(i, i)] - want).abs() < 1e-12);
    }

    #[test]
    fn both_constructions_agree() {
        for (n, r) in [(3, 1), (3, 2), (3, 3), (4, 2)] {
            let t = build_t::<BigRational>(n, r, DEFAULT_CAP).unwrap();
            for q in [0.7, 1.0, 1.6] {
                let p = params(n, q);
                let a = build_h_sum(&p, r, DEFAULT_CAP).unwrap();
                let b = build_h_logderiv(&t, &p).unwrap();
                assert!(a.distance(&b) < 1e-12, "N={n} r={r} q={q}");
                let fd = build_h_logderiv_fd(&t, &p, 1e-6).unwrap();
                assert!(a.distance(&fd) < 1e-6);
                assert!(a.weight_commutator() == 0.0 && a.cp_commutator() < 1e-13);
            }
        }
    }

    #[test]
    fn two_site_spectrum_and_kernel() {
        let q = 1.7;
        let p = params(3, q);
        let h = build_h_sum(&p, 2, DEFAULT_CAP).unwrap();
        let kd = p.kdot0();
        let mut ev: Vec<f64> = h.eigenvalues().unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let mut want = vec![0.0; 7];
        want.push(kd * (q + 1.0 / q - 2.0));
        want.push(kd * (q + 1.0 / q + 4.0));
        want.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((h.trace() - 2.0 * kd * (q + 1.0 / q + 1.0)).abs() < 1e-10);
        assert_eq!(h.kernel_defect(&h.edge_weights()), 0.0);
    }

    #[test]
    fn record_eigenvalues_match_direct_action() {
        for (n, r, q) in [(3, 3, 1.3), (3, 3, 1.0), (3, 4, 0.7), (4, 2, 1.6)] {
            let t = build_t::<BigRational>(n, r, DEFAULT_CAP).unwrap();
            let p = params(n, q);
            let h = build_h_sum(&p, r, DEFAULT_CAP).unwrap();
            let recs = diagonalize_all(&t, q).unwrap();
            let hs = h_eigens_from_records(&h, &recs).unwrap();
            let mut tr = C64::new(0.0, 0.0);
            for e in &hs {
                assert!(e.residual < 1e-8, "{e:?}");
                tr += e.eigenvalue * e.multiplicity as f64;
            }
            assert!((tr.re - h.trace()).abs() < 1e-9 && tr.im.abs() < 1e-9);
        }
    }

    #[test]
    fn spins_and_selection_rules() {
        let s = SpinAssignment::new(4);
        assert_eq!(s.sigma[0], Rational64::new(3, 2));
        assert_eq!(s.sigma[3], Rational64::new(-3, 2));
        assert_eq!(
            p0_active_pairs(3, 1.3).unwrap(),
            vec![(1, 3), (2, 2), (3, 1)]
        );
        assert_eq!(p0_active_pairs(5, 0.8).unwrap().len(), 5);
        for (n, r) in [(3, 3), (4, 2), (5, 2)] {
            let h = build_h_sum(&params(n, 1.4), r, DEFAULT_CAP).unwrap();
            assert!(selection_rule_audit(&h).is_empty());
        }
        assert_eq!(conj_label(4, 1), 4);
    }

    #[test]
    fn audit_detects_a_bad_element() {
        let mut h = build_h_sum(&params(3, 1.0), 2, DEFAULT_CAP).unwrap();
        let i = StateWord::new(vec![1, 2]).index(3);
        let j = StateWord::new(vec![2, 1]).index(3);
        h.matrix[(i, j)] = 0.5;
        let v = selection_rule_audit(&h);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].from.as_str(), v[0].to.as_str()), ("21", "12"));
    }

    #[test]
    fn neutral_pairs_travel_along_the_chain() {
        let h = build_h_sum(&params(3, 1.2), 4, DEFAULT_CAP).unwrap();
        let rep = propagation_audit(&h);
        assert_eq!(rep.starts_checked, 27);
        assert!(rep.passed(), "{rep:?}");
    }
}
