//! Dense complex eigen-machinery for the reduced blocks: Schur eigenvalues,
//! clustering, generalized eigenspaces and spectral projectors.

use nalgebra::{Complex, DMatrix, Schur, SVD};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Relative tolerance used to decide that two Schur eigenvalues belong to
/// the same eigenvalue. Generous because a defective eigenvalue of
/// multiplicity `m` splits by `O(ε^{1/m})`.
pub const CLUSTER_TOL: f64 = 1e-6;

pub fn schur_eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    // tighten first, relax if the QR sweep stalls on a near-defective block
    let schur = [f64::EPSILON, 1e-13, 1e-11]
        .iter()
        .find_map(|&eps| Schur::try_new(m.clone(), eps, 20_000))
        .ok_or_else(|| Error::InvariantViolation("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Group eigenvalues closer than `rel_tol · max(1, |λ|)`; returns
/// (mean, count) pairs, ordered by decreasing real part then imaginary part.
pub fn cluster(values: &[C64], rel_tol: f64) -> Vec<(C64, usize)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = 1f64.max(values[i].norm()).max(values[j].norm());
            if (values[i] - values[j]).norm() <= rel_tol * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<C64>> = Default::default();
    for (i, &v) in values.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(v);
    }
    let mut out: Vec<(C64, usize)> = groups
        .into_values()
        .map(|g| {
            let sum: C64 = g.iter().sum();
            (sum / g.len() as f64, g.len())
        })
        .collect();
    out.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(b.0.im.total_cmp(&a.0.im)));
    out
}

/// Orthonormal basis of the `k` right singular directions with the
/// smallest singular values, together with the gap ratio
/// `σ_{n−k} / σ_{n−k−1}` (small when the subspace is well separated).
pub fn smallest_singular_subspace(m: &CMat, k: usize) -> (CMat, f64) {
    let n = m.ncols();
    let svd = SVD::new(m.clone(), false, true);
    let v = svd.v_t.expect("requested V").adjoint();
    let sv = &svd.singular_values;
    // singular values come sorted in decreasing order
    let basis = v.columns(n - k, k).into_owned();
    let gap = if k < n {
        let inside = sv[n - k];
        let outside = sv[n - k - 1];
        if outside == 0.0 {
            1.0
        } else {
            inside / outside
        }
    } else {
        0.0
    };
    (basis, gap)
}

/// One eigenvalue with its generalized eigenspace.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub value: C64,
    pub multiplicity: usize,
    /// Orthonormal columns spanning the generalized eigenspace.
    pub basis: CMat,
    /// Orthonormal columns spanning the ordinary eigenspace.
    pub eigvecs: CMat,
}

/// Spectral decomposition `B = Σ_c λ_c P_c + nilpotent`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub clusters: Vec<Cluster>,
    /// Columns: the cluster bases side by side.
    pub v: CMat,
    /// `v⁻¹`; its row blocks are the dual bases.
    pub w: CMat,
    offsets: Vec<usize>,
}

fn mat_pow_shifted(b: &CMat, lambda: C64, m: usize) -> CMat {
    let n = b.nrows();
    let shifted = b - CMat::identity(n, n) * lambda;
    let mut acc = shifted.clone();
    for _ in 1..m {
        acc = &acc * &shifted;
    }
    acc
}

fn eigenspace_dim(b: &CMat, lambda: C64, m: usize) -> CMat {
    let n = b.nrows();
    let shifted = b - CMat::identity(n, n) * lambda;
    let svd = SVD::new(shifted, false, true);
    let v = svd.v_t.expect("requested V").adjoint();
    let sv = &svd.singular_values;
    let scale = 1f64.max(sv[0]);
    let tol = 1e-7 * scale;
    let k = (0..n).filter(|&i| sv[i] <= tol).count().clamp(1, m);
    v.columns(n - k, k).into_owned()
}

impl Decomposition {
    pub fn new(b: &CMat) -> Result<Self> {
        let n = b.nrows();
        let vals = schur_eigenvalues(b)?;
        let groups = cluster(&vals, CLUSTER_TOL);
        let mut clusters = Vec::with_capacity(groups.len());
        for (value, multiplicity) in groups {
            let (basis, _) =
                smallest_singular_subspace(&mat_pow_shifted(b, value, multiplicity), multiplicity);
            let eigvecs = eigenspace_dim(b, value, multiplicity);
            clusters.push(Cluster {
                value,
                multiplicity,
                basis,
                eigvecs,
            });
        }
        let mut v = CMat::zeros(n, n);
        let mut offsets = Vec::with_capacity(clusters.len());
        let mut col = 0;
        for c in &clusters {
            offsets.push(col);
            v.columns_mut(col, c.multiplicity).copy_from(&c.basis);
            col += c.multiplicity;
        }
        let w = v.clone().try_inverse().ok_or_else(|| {
            Error::InvariantViolation("generalized eigenspaces are not independent".into())
        })?;
        Ok(Self {
            clusters,
            v,
            w,
            offsets,
        })
    }

    /// `W_c · M · V_c` for cluster `c`.
    pub fn restrict(&self, c: usize, m: &CMat) -> CMat {
        let k = self.clusters[c].multiplicity;
        let o = self.offsets[c];
        self.w.rows(o, k) * m * self.v.columns(o, k)
    }

    /// Spectral projector onto cluster `c` along the others.
    pub fn projector(&self, c: usize) -> CMat {
        let k = self.clusters[c].multiplicity;
        let o = self.offsets[c];
        self.v.columns(o, k) * self.w.rows(o, k)
    }

    /// Largest entry of the off-diagonal cluster blocks of `W M V`.
    pub fn leakage(&self, m: &CMat) -> f64 {
        let full = &self.w * m * &self.v;
        let mut worst: f64 = 0.0;
        for (a, &oa) in self.offsets.iter().enumerate() {
            let ka = self.clusters[a].multiplicity;
            for (b, &ob) in self.offsets.iter().enumerate() {
                if a == b {
                    continue;
                }
                let kb = self.clusters[b].multiplicity;
                for i in oa..oa + ka {
                    for j in ob..ob + kb {
                        worst = worst.max(full[(i, j)].norm());
                    }
                }
            }
        }
        worst
    }
}

/// `‖Q_aᴴ Q_b‖_F² / cols(Q_b)`: 1 when the span of `Q_b` lies in that of
/// `Q_a` (both orthonormal).
pub fn subspace_overlap(qa: &CMat, qb: &CMat) -> f64 {
    if qb.ncols() == 0 {
        return 1.0;
    }
    (qa.adjoint() * qb).norm_squared() / qb.ncols() as f64
}

/// Greedy nearest matching distance between two multisets of equal size;
/// `f64::INFINITY` when the sizes differ.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut rest: Vec<C64> = b.to_vec();
    let mut worst: f64 = 0.0;
    let mut order: Vec<&C64> = a.iter().collect();
    order.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    for x in order {
        let (j, d) = rest
            .iter()
            .enumerate()
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        worst = worst.max(d);
        rest.swap_remove(j);
    }
    worst
}

/// Solve the Vandermonde system through `xs` and return coefficients in
/// ascending order.
pub fn interpolate(xs: &[f64], ys: &[C64]) -> Result<Vec<C64>> {
    let n = xs.len();
    let mut v = CMat::zeros(n, n);
    for (i, &x) in xs.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..n {
            v[(i, j)] = C64::new(p, 0.0);
            p *= x;
        }
    }
    let rhs = nalgebra::DVector::from_column_slice(ys);
    v.lu()
        .solve(&rhs)
        .map(|c| c.iter().copied().collect())
        .ok_or_else(|| Error::domain("interpolation nodes are not distinct"))
}

pub fn horner(coeffs: &[C64], x: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn schur_of_rotation_gives_unit_roots() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                c(0., 0.),
                c(0., 0.),
                c(1., 0.),
                c(1., 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(1., 0.),
                c(0., 0.),
            ],
        );
        let ev = schur_eigenvalues(&m).unwrap();
        for e in &ev {
            assert!((e.powu(3) - c(1., 0.)).norm() < 1e-12);
        }
        assert!(ev.iter().sum::<C64>().norm() < 1e-12);
    }

    #[test]
    fn jordan_block_is_one_cluster() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                c(2., 0.),
                c(1., 0.),
                c(0., 0.),
                c(0., 0.),
                c(2., 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(-1., 0.),
            ],
        );
        let d = Decomposition::new(&m).unwrap();
        assert_eq!(d.clusters.len(), 2);
        assert_eq!(d.clusters[0].multiplicity, 2);
        assert_eq!(d.clusters[0].eigvecs.ncols(), 1);
        assert!((d.clusters[0].value - c(2., 0.)).norm() < 1e-12);
        let p0 = d.projector(0);
        let p1 = d.projector(1);
        assert!((&p0 * &p0 - &p0).norm() < 1e-12);
        assert!((p0 + p1 - CMat::identity(3, 3)).norm() < 1e-12);
        assert!(d.leakage(&m) < 1e-12);
    }

    #[test]
    fn quadratic_interpolation_is_exact() {
        let xs = [0.2, 0.5, 1.1];
        let f = [c(1., 0.5), c(-2., 0.), c(0.25, -1.)];
        let ys: Vec<C64> = xs.iter().map(|&x| horner(&f, c(x, 0.))).collect();
        let got = interpolate(&xs, &ys).unwrap();
        for (a, b) in got.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn multiset_distance_respects_multiplicity() {
        let a = [c(1., 0.), c(1., 0.), c(2., 0.)];
        let b = [c(1., 0.), c(2., 0.), c(2., 0.)];
        assert!((multiset_distance(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(multiset_distance(&a, &a), 0.0);
        assert!(multiset_distance(&a, &b[..2]).is_infinite());
    }
}
