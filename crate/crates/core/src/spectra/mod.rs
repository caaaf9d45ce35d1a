//! Eigenvalues of the reduced blocks as polynomials in `K`.
//!
//! Eigenvectors of `T⁽ʳ⁾` do not depend on `K`, and all `T(K)` commute, so
//! the generalized eigenspaces of one irrational sample `B(K_ref)` split
//! `B(K)` for every `K`. Each branch is then sampled on that fixed
//! subspace and interpolated exactly.

pub mod oracle;

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::eigen::{
    cluster, horner, interpolate, schur_eigenvalues, subspace_overlap, CMat, Decomposition, C64,
    CLUSTER_TOL,
};
use crate::error::{Error, Result};
use crate::exact::Coeff;
use crate::symmetry::{eval_k_poly_matrix, reduced_block, sector_orbits, Omega, ReducedBlock};
use crate::transfer::TransferMatrix;

/// Reference sample for the eigenspace split; irrational so that distinct
/// branches do not meet there by accident.
pub const K_REF: f64 = 0.618_033_988_749_894_8;

/// Held-out interpolation tolerance (relative).
pub const FIT_TOL: f64 = 1e-8;

/// `0.15, 0.35, 0.55, …`: `r + 3` points, the last two held out.
pub fn default_k_samples(r: usize) -> Vec<f64> {
    (0..r + 3).map(|i| 0.15 + 0.2 * i as f64).collect()
}

pub(crate) fn ser_cvec<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// One eigenbranch `v(K) = Σ f_k K^k` of an `(n, ω)` block.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralRecord {
    #[serde(rename = "N")]
    pub n_states: usize,
    pub r: usize,
    pub n: usize,
    pub omega: Omega,
    pub q: f64,
    /// `f₀ … f_r`, ascending.
    #[serde(serialize_with = "ser_cvec")]
    pub f: Vec<C64>,
    pub multiplicity: usize,
    /// Components over the sector basis, largest one scaled to 1.
    #[serde(serialize_with = "ser_cvec")]
    pub eigvec: Vec<C64>,
    /// Orbit representatives of the sector basis.
    pub basis: Vec<String>,
    /// Relative residual of the fit at the held-out samples.
    pub fit_residual: f64,
}

impl SpectralRecord {
    pub fn eval(&self, k: C64) -> C64 {
        horner(&self.f, k)
    }

    /// `|f₀ − ω|`.
    pub fn f0_defect(&self) -> f64 {
        (self.f[0] - self.omega.to_complex()).norm()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyFit {
    #[serde(serialize_with = "ser_cvec")]
    pub coeffs: Vec<C64>,
    pub held_out_residual: f64,
}

/// Interpolate `degree + 1` samples and check the rest.
pub fn fit_k_polynomial(samples: &[(f64, C64)], degree: usize) -> Result<PolyFit> {
    if samples.len() < degree + 1 {
        return Err(Error::domain(format!(
            "need at least {} samples for degree {degree}, got {}",
            degree + 1,
            samples.len()
        )));
    }
    let (fit, rest) = samples.split_at(degree + 1);
    let xs: Vec<f64> = fit.iter().map(|s| s.0).collect();
    let ys: Vec<C64> = fit.iter().map(|s| s.1).collect();
    let coeffs = interpolate(&xs, &ys)?;
    let held_out_residual = rest
        .iter()
        .map(|&(x, y)| (horner(&coeffs, C64::new(x, 0.0)) - y).norm() / y.norm().max(1.0))
        .fold(0.0, f64::max);
    if held_out_residual > FIT_TOL {
        return Err(Error::BranchMatching {
            msg: format!("held-out residual {held_out_residual:.3e} exceeds {FIT_TOL:.0e}"),
            overlaps: String::new(),
        });
    }
    Ok(PolyFit {
        coeffs,
        held_out_residual,
    })
}

fn overlap_matrix(a: &Decomposition, b: &Decomposition) -> String {
    a.clusters
        .iter()
        .map(|ca| {
            b.clusters
                .iter()
                .map(|cb| format!("{:.6}", subspace_overlap(&cb.basis, &ca.basis)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn normalize_eigvec(v: &CMat) -> Vec<C64> {
    let col: Vec<C64> = v.column(0).iter().copied().collect();
    let lead = col
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(C64::new(1.0, 0.0));
    col.iter().map(|z| z / lead).collect()
}

/// Eigenbranches of one reduced block at `q`.
pub fn diagonalize_block<C: Coeff>(block: &ReducedBlock<C>, q: f64) -> Result<Vec<SpectralRecord>> {
    let d = block.dim();
    if d == 0 {
        return Ok(Vec::new());
    }
    let r = block.r;
    let coeffs = block.k_coeff_matrices(q)?;
    let b_ref = eval_k_poly_matrix(&coeffs, C64::new(K_REF, 0.0));
    let dec = Decomposition::new(&b_ref)?;
    let ks = default_k_samples(r);
    let mut series: Vec<Vec<(f64, C64)>> = vec![Vec::with_capacity(ks.len()); dec.clusters.len()];
    for &k in &ks {
        let b = eval_k_poly_matrix(&coeffs, C64::new(k, 0.0));
        let scale = b.norm().max(1.0);
        let leak = dec.leakage(&b);
        let split_fail = |msg: String| -> Error {
            let overlaps = Decomposition::new(&b)
                .map(|db| overlap_matrix(&dec, &db))
                .unwrap_or_default();
            Error::BranchMatching { msg, overlaps }
        };
        if leak > 1e-8 * scale {
            return Err(split_fail(format!(
                "eigenspaces at K = {K_REF} are not invariant at K = {k} (leakage {leak:.3e})"
            )));
        }
        for (c, cl) in dec.clusters.iter().enumerate() {
            let sub = dec.restrict(c, &b);
            let m = cl.multiplicity as f64;
            let lambda = sub.trace() / m;
            // a cluster must stay a single eigenvalue away from K_ref
            let splits = cl.multiplicity > 1 && {
                let vals = schur_eigenvalues(&sub)?;
                cluster(&vals, CLUSTER_TOL).len() > 1
            };
            if splits {
                return Err(split_fail(format!(
                    "cluster {c} (multiplicity {}) splits at K = {k}",
                    cl.multiplicity
                )));
            }
            series[c].push((k, lambda));
        }
    }
    let basis = block.basis_words();
    let mut out = Vec::with_capacity(dec.clusters.len());
    for (c, cl) in dec.clusters.iter().enumerate() {
        let fit = fit_k_polynomial(&series[c], r).map_err(|e| match e {
            Error::BranchMatching { msg, .. } => Error::BranchMatching {
                msg: format!(
                    "(N = {}, r = {r}, n = {}, ω = {}) branch {c}: {msg}",
                    block.n_states, block.weight, block.omega
                ),
                overlaps: String::new(),
            },
            other => other,
        })?;
        out.push(SpectralRecord {
            n_states: block.n_states,
            r,
            n: block.weight,
            omega: block.omega,
            q,
            f: fit.coeffs,
            multiplicity: cl.multiplicity,
            eigvec: normalize_eigvec(&cl.eigvecs),
            basis: basis.clone(),
            fit_residual: fit.held_out_residual,
        });
    }
    Ok(out)
}

/// Every `(n, ω)` sector of `T⁽ʳ⁾`, ordered by `(n, ω)`.
pub fn sectors(n_states: usize, r: usize) -> Vec<(usize, Omega)> {
    let mut out = Vec::new();
    for n in r..=n_states * r {
        for w in Omega::all(r) {
            if !sector_orbits(n_states, r, n, w).is_empty() {
                out.push((n, w));
            }
        }
    }
    out
}

/// Records of one weight class (every ω).
pub fn diagonalize_weight<C: Coeff>(
    t: &TransferMatrix<C>,
    n: usize,
    q: f64,
) -> Result<Vec<SpectralRecord>> {
    let mut out = Vec::new();
    for w in Omega::all(t.r) {
        let block = reduced_block(t, n, w)?;
        out.extend(diagonalize_block(&block, q)?);
    }
    Ok(out)
}

/// Records of every sector, computed in parallel, in `(n, ω)` order.
pub fn diagonalize_all<C: Coeff>(t: &TransferMatrix<C>, q: f64) -> Result<Vec<SpectralRecord>> {
    let keys = sectors(t.n, t.r);
    let parts: Vec<Result<Vec<SpectralRecord>>> = keys
        .par_iter()
        .map(|&(n, w)| diagonalize_block(&reduced_block(t, n, w)?, q))
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// `Σ multiplicity · f` over the given records.
pub fn subspace_trace(records: &[SpectralRecord]) -> Vec<C64> {
    let len = records.iter().map(|x| x.f.len()).max().unwrap_or(0);
    let mut acc = vec![C64::new(0.0, 0.0); len];
    for rec in records {
        for (a, f) in acc.iter_mut().zip(&rec.f) {
            *a += f * rec.multiplicity as f64;
        }
    }
    acc
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficient-wise relative deviation of `Σ v` from `N (1 + K)^r`.
pub fn sum_rule_residual(records: &[SpectralRecord], n_states: usize, r: usize) -> f64 {
    let sum = subspace_trace(records);
    (0..=r)
        .map(|k| {
            let want = n_states as f64 * binomial(r, k);
            let got = sum.get(k).copied().unwrap_or_default();
            (got - C64::new(want, 0.0)).norm() / want.max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Smallest projector overlap between the branch decompositions at two
/// values of `K`. Clusters that are degenerate at one value are compared
/// through the sum of the clusters they meet at the other.
pub fn projector_stability(block_coeffs: &[CMat], ka: f64, kb: f64) -> Result<f64> {
    let da = Decomposition::new(&eval_k_poly_matrix(block_coeffs, C64::new(ka, 0.0)))?;
    let db = Decomposition::new(&eval_k_poly_matrix(block_coeffs, C64::new(kb, 0.0)))?;
    let mut worst: f64 = 1.0;
    for ca in &da.clusters {
        let hits: Vec<&crate::eigen::Cluster> = db
            .clusters
            .iter()
            .filter(|cb| subspace_overlap(&cb.basis, &ca.basis) > 1e-3)
            .collect();
        let cols: usize = hits.iter().map(|c| c.multiplicity).sum();
        let n = ca.basis.nrows();
        let mut union = CMat::zeros(n, cols);
        let mut o = 0;
        for h in &hits {
            union.columns_mut(o, h.multiplicity).copy_from(&h.basis);
            o += h.multiplicity;
        }
        let q = union.qr().q();
        let overlap = subspace_overlap(&q, &ca.basis);
        let overlap = if cols < ca.multiplicity {
            overlap.min(0.0)
        } else {
            overlap
        };
        worst = worst.min(overlap);
    }
    Ok(worst)
}
