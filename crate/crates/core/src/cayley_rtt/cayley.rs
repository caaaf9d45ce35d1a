//! `X (R − λI) = I` and `−iV = I + 2λX`.

use std::fmt::Write as _;

use num_rational::Rational64;
use serde::Serialize;

use crate::braid::{build_r, ModelParams};
use crate::eigen::{CMat, C64};
use crate::error::{Error, Result};
use crate::matrix::max_abs;

/// Condition number of `R − λI` above which the solve is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative distance to an excluded value below which `λ` is rejected.
pub const EXCLUSION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exclusion {
    /// `"+1"`, `"-1"`, `"root+"` or `"root-"`.
    pub which: String,
    #[serde(serialize_with = "ser_c")]
    pub value: C64,
}

fn ser_c<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Excluded values for `N = 3`: `±1` and `½[3K ± √(9K² + 4(q+1+q⁻¹)K + 4)]`.
pub fn excluded_values(k: f64, q: f64) -> Vec<(&'static str, C64)> {
    let disc = C64::new(9.0 * k * k + 4.0 * (q + 1.0 + 1.0 / q) * k + 4.0, 0.0).sqrt();
    vec![
        ("+1", C64::new(1.0, 0.0)),
        ("-1", C64::new(-1.0, 0.0)),
        ("root+", (disc + 3.0 * k) / 2.0),
        ("root-", (-disc + 3.0 * k) / 2.0),
    ]
}

/// The excluded value `λ` sits on, if any.
pub fn cayley_exclusion(lambda: C64, k: f64, q: f64) -> Option<Exclusion> {
    excluded_values(k, q)
        .into_iter()
        .find(|(_, v)| (lambda - v).norm() <= EXCLUSION_TOL * v.norm().max(1.0))
        .map(|(which, value)| Exclusion {
            which: which.into(),
            value,
        })
}

#[derive(Clone, Debug, Serialize)]
pub struct CayleyResult {
    #[serde(rename = "N")]
    pub n_states: usize,
    #[serde(serialize_with = "ser_c")]
    pub lambda: C64,
    pub theta: f64,
    pub q: f64,
    pub k: f64,
    #[serde(skip)]
    pub x: CMat,
    #[serde(skip)]
    pub v: CMat,
    pub excluded: bool,
    /// `σ_max / σ_min` of `R − λI`.
    pub condition: f64,
    /// `max |X (R − λI) − I|`.
    pub inverse_residual: f64,
    /// `max |(R − λI)(−iV) − (R + λI)|`.
    pub residual: f64,
}

fn r_numeric(n: usize, q: f64, k: f64) -> Result<CMat> {
    Ok(build_r::<Rational64>(n)?
        .eval_real(q, k)?
        .map(|x| C64::new(x, 0.0)))
}

/// Solve `X (R(θ) − λI) = I` and form `V = i (I + 2λX)`.
pub fn inverse_cayley(params: &ModelParams<f64>, theta: f64, lambda: C64) -> Result<CayleyResult> {
    let n = params.n;
    let q = params.q;
    let k = params.k_of_theta(theta)?;
    if n == 3 {
        if let Some(e) = cayley_exclusion(lambda, k, q) {
            return Err(Error::Excluded {
                lambda: format!("{lambda}"),
                reason: format!("coincides with the {} value {}", e.which, e.value),
            });
        }
    }
    let r = r_numeric(n, q, k)?;
    let dim = r.nrows();
    let id = CMat::identity(dim, dim);
    let shifted = &r - &id * lambda;
    let sv = shifted.clone().singular_values();
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Excluded {
            lambda: format!("{lambda}"),
            reason: format!("R - lambda I is near-singular (condition {condition:.3e})"),
        });
    }
    let x = shifted
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Excluded {
            lambda: format!("{lambda}"),
            reason: "R - lambda I is singular".into(),
        })?;
    let minus_iv = &id + &x * (lambda * 2.0);
    let v = &minus_iv * C64::new(0.0, 1.0);
    let inverse_residual = max_abs(&(&x * &shifted - &id));
    let residual = max_abs(&(&shifted * &minus_iv - (&r + &id * lambda)));
    Ok(CayleyResult {
        n_states: n,
        lambda,
        theta,
        q,
        k,
        x,
        v,
        excluded: false,
        condition,
        inverse_residual,
        residual,
    })
}

/// Closed form of `X` for `N = 3`: the `2,4` and `6,8` pairs, the corners,
/// and the central `3,5,7` block built from six rational functions.
pub fn closed_form_x(k: f64, lambda: C64, q: f64) -> CMat {
    let l = lambda;
    let one = C64::new(1.0, 0.0);
    let sq = q.sqrt();
    let den = (one - l) * (l * l * q - l * (3.0 * q * k) - (q * q * k + k + q * k + q));
    let a = (l * l - l - l * (2.0 * k) + k) * q / den;
    let b = (l * q + 1.0) * (sq * k) / den;
    let c = (l + l * (q * k) - q * k - 1.0 - k) * q / den;
    let d = (l + q) * (k * sq) / den;
    let e = (l * l * q - l * (2.0 * k * q) - q * q * k - k - q) / den;
    let f = (l * q + l * k - q - q * k - k) / den;
    let diag1 = one / (one - l);
    let even = l / (one - l * l);
    let off = one / (one - l * l);
    let mut x = CMat::zeros(9, 9);
    let mut set = |i: usize, j: usize, v: C64| x[(i - 1, j - 1)] = v;
    set(1, 1, diag1);
    set(9, 9, diag1);
    for (i, j) in [(2, 4), (6, 8)] {
        set(i, i, even);
        set(j, j, even);
        set(i, j, off);
        set(j, i, off);
    }
    set(3, 3, a);
    set(3, 5, b);
    set(3, 7, c);
    set(5, 3, d);
    set(5, 5, e);
    set(5, 7, b);
    set(7, 3, f);
    set(7, 5, d);
    set(7, 7, a);
    x
}

/// `V_{(ab,cd)}` for `V = Σ V_{(ab,cd)} (ab)⊗(cd)`, one CSV row per
/// `(a, b, c, d)` with 1-based labels.
pub fn emit_v_csv(res: &CayleyResult) -> String {
    let n = res.n_states;
    let mut s = String::new();
    writeln!(s, "# V from -iV = (R - lambda I)^-1 (R + lambda I)").unwrap();
    writeln!(s, "a,b,c,d,re,im").unwrap();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = res.v[(a * n + c, b * n + d)];
                    writeln!(
                        s,
                        "{},{},{},{},{:e},{:e}",
                        a + 1,
                        b + 1,
                        c + 1,
                        d + 1,
                        v.re,
                        v.im
                    )
                    .unwrap();
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn params(q: f64) -> ModelParams<f64> {
        ModelParams::new(3, q).unwrap()
    }

    #[test]
    fn r_matches_the_displayed_matrix() {
        let (q, k) = (1.7, 0.4);
        let r = r_numeric(3, q, k).unwrap();
        let sq = q.sqrt();
        let mut want = CMat::zeros(9, 9);
        let rows: [(usize, usize, f64); 15] = [
            (1, 1, 1.0),
            (2, 4, 1.0),
            (4, 2, 1.0),
            (3, 3, k),
            (3, 5, sq * k),
            (3, 7, 1.0 + q * k),
            (5, 3, k / sq),
            (5, 5, 1.0 + k),
            (5, 7, sq * k),
            (6, 8, 1.0),
            (8, 6, 1.0),
            (7, 3, 1.0 + k / q),
            (7, 5, k / sq),
            (7, 7, k),
            (9, 9, 1.0),
        ];
        for (i, j, v) in rows {
            want[(i - 1, j - 1)] = c(v, 0.0);
        }
        assert!(max_abs(&(r - want)) < 1e-14);
    }

    #[test]
    fn exclusions() {
        assert_eq!(cayley_exclusion(c(1.0, 0.0), 0.3, 1.2).unwrap().which, "+1");
        let roots = excluded_values(0.0, 2.0);
        assert!((roots[2].1 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((roots[3].1 - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(cayley_exclusion(c(0.37, 0.0), 0.5, 1.2).is_none());
        let root = excluded_values(0.5, 1.2)[2].1;
        assert_eq!(cayley_exclusion(root, 0.5, 1.2).unwrap().which, "root+");
        let p = params(1.2);
        let theta = -0.2;
        let k = p.k_of_theta(theta).unwrap();
        let root = excluded_values(k, 1.2)[3].1;
        assert!(matches!(
            inverse_cayley(&p, theta, root),
            Err(Error::Excluded { .. })
        ));
    }

    #[test]
    fn solver_matches_closed_form() {
        for q in [0.7, 1.0, 1.6] {
            let p = params(q);
            for theta in [-0.3, 0.2, 0.9] {
                for lambda in [c(0.37, 0.0), c(-2.5, 0.0), c(0.3, 0.8)] {
                    let res = inverse_cayley(&p, theta, lambda).unwrap();
                    let cf = closed_form_x(res.k, lambda, q);
                    assert!(max_abs(&(&res.x - &cf)) < 1e-10);
                    assert!(res.residual < 1e-9 && res.inverse_residual < 1e-10);
                }
            }
        }
    }

    #[test]
    fn simple_entries_and_limits() {
        let l = c(0.37, 0.0);
        let res = inverse_cayley(&params(1.3), 0.4, l).unwrap();
        let one = c(1.0, 0.0);
        assert!((res.x[(0, 0)] - one / (one - l)).norm() < 1e-12);
        assert!((res.x[(1, 1)] - l / (one - l * l)).norm() < 1e-12);
        assert!((res.x[(1, 3)] - one / (one - l * l)).norm() < 1e-12);
        let v11 = c(0.0, 1.0) * (one + l * 2.0 / (one - l));
        assert!((res.v[(0, 0)] - v11).norm() < 1e-12);
        // large λ: X ≈ −I/λ
        let big = c(1e6, 0.0);
        let res = inverse_cayley(&params(1.3), 0.4, big).unwrap();
        let want = CMat::identity(9, 9) * (-one / big);
        assert!(max_abs(&(&res.x - want)) < 1e-11);
    }

    #[test]
    fn k_zero_block_inverts_the_swap() {
        // at θ = 0, R = P and the central block of P − λI is easy to invert
        let l = c(0.6, -0.2);
        let cf = closed_form_x(0.0, l, 1.9);
        let p = r_numeric(3, 1.9, 0.0).unwrap();
        let x = (p - CMat::identity(9, 9) * l).try_inverse().unwrap();
        assert!(max_abs(&(cf - x)) < 1e-12);
    }

    #[test]
    fn v_table() {
        let res = inverse_cayley(&params(1.1), 0.3, c(0.5, 0.0)).unwrap();
        let csv = emit_v_csv(&res);
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "a,b,c,d,re,im");
        assert_eq!(rows.len(), 82);
        let nonzero = rows[1..]
            .iter()
            .filter(|r| {
                let f: Vec<f64> = r.split(',').skip(4).map(|x| x.parse().unwrap()).collect();
                f[0] != 0.0 || f[1] != 0.0
            })
            .count();
        // diagonal (9) plus the off-diagonal pattern of X (4 + 6)
        assert_eq!(nonzero, 19);
    }
}
