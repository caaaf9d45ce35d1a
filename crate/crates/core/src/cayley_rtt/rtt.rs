//! `(I + K″P₀′)(t ⊗ t′) = (t′ ⊗ t)(I + K″P₀′)` for monodromy blocks, with
//! `t = t(θ)`, `t′ = t(θ′)`, `K″ = K(θ − θ′)`.
//!
//! The itemized catalogue is written for `N = 3`; the wholesale identity
//! works for any `N`.

use nalgebra::DMatrix;
use num_rational::{BigRational, Rational64};
use rayon::prelude::*;
use serde::Serialize;

use crate::braid::{build_p0prime, conj, rho_doubled, ModelParams};
use crate::error::{Error, Result};
use crate::transfer::{MonodromyBlocks, DEFAULT_CAP};

type Mat = DMatrix<f64>;

/// One block `t_{ij}` (0-based) at `θ` or, when `prime`, at `θ′`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub prime: bool,
    pub i: usize,
    pub j: usize,
}

/// `coef · a · b`, the coefficient being `±s^pow` with `s² = q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub sign: f64,
    pub s_pow: i32,
    pub a: Factor,
    pub b: Factor,
}

fn t(i: usize, j: usize) -> Factor {
    Factor { prime: false, i, j }
}

fn tp(i: usize, j: usize) -> Factor {
    Factor { prime: true, i, j }
}

impl Factor {
    fn transposed(self) -> Self {
        Self {
            prime: self.prime,
            i: self.j,
            j: self.i,
        }
    }

    /// Transpose the indices and exchange `θ ↔ θ′`.
    fn mirrored(self) -> Self {
        Self {
            prime: !self.prime,
            i: self.j,
            j: self.i,
        }
    }
}

impl Term {
    fn map(self, f: impl Fn(Factor) -> Factor) -> Self {
        Self {
            a: f(self.a),
            b: f(self.b),
            ..self
        }
    }
}

/// `X_{cd} = Σ_a s^{−ρ_a} t_{ac} t′_{a′d}` (doubled `ρ`), numbered
/// `X_{3c + d + 1}` as in the printed list.
pub fn x_terms(c: usize, d: usize) -> Vec<Term> {
    let rho = rho_doubled(3).expect("N = 3");
    (0..3)
        .map(|a| Term {
            sign: 1.0,
            s_pow: -rho[a],
            a: t(a, c),
            b: tp(conj(3, a), d),
        })
        .collect()
}

/// `Y_n`: the terms of `X_n` with indices transposed and `θ ↔ θ′`.
pub fn y_terms(c: usize, d: usize) -> Vec<Term> {
    x_terms(c, d)
        .into_iter()
        .map(|term| term.map(Factor::mirrored))
        .collect()
}

/// Numerically evaluated blocks at `θ` and `θ′`.
struct Blocks {
    n: usize,
    q: f64,
    t: Vec<Mat>,
    tp: Vec<Mat>,
}

impl Blocks {
    fn get(&self, f: Factor) -> &Mat {
        let v = if f.prime { &self.tp } else { &self.t };
        &v[f.i * self.n + f.j]
    }

    fn eval(&self, terms: &[Term]) -> Mat {
        let dim = self.t[0].nrows();
        let mut acc = Mat::zeros(dim, dim);
        for term in terms {
            let coef = term.sign * self.q.sqrt().powi(term.s_pow);
            acc += self.get(term.a) * self.get(term.b) * coef;
        }
        acc
    }
}

fn commutator(a: Factor, b: Factor, s_pow: i32) -> Vec<Term> {
    // s^pow (a b − a' b'), the primes on the two factors exchanged
    let swap = |f: Factor| Factor {
        prime: !f.prime,
        ..f
    };
    vec![
        Term {
            sign: 1.0,
            s_pow,
            a,
            b,
        },
        Term {
            sign: -1.0,
            s_pow,
            a: swap(a),
            b: swap(b),
        },
    ]
}

fn scaled(terms: Vec<Term>, sign: f64, s_pow: i32) -> Vec<Term> {
    terms
        .into_iter()
        .map(|x| Term {
            sign: x.sign * sign,
            s_pow: x.s_pow + s_pow,
            ..x
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationResidual {
    pub label: String,
    pub residual: f64,
}

/// Residual groups of the itemized catalogue.
#[derive(Clone, Debug, Serialize)]
pub struct RttReport {
    #[serde(rename = "N")]
    pub n_states: usize,
    pub r: usize,
    pub theta: f64,
    pub theta_p: f64,
    pub q: f64,
    pub k_pp: f64,
    pub k_independent: Vec<RelationResidual>,
    pub x_sets: Vec<RelationResidual>,
    pub y_sets: Vec<RelationResidual>,
    pub mixed: Vec<RelationResidual>,
    /// `‖R̂″(t⊗t′) − (t′⊗t)R̂″‖_max` over the whole auxiliary space.
    pub wholesale: f64,
}

impl RttReport {
    pub fn max_residual(&self) -> f64 {
        self.k_independent
            .iter()
            .chain(&self.x_sets)
            .chain(&self.y_sets)
            .chain(&self.mixed)
            .map(|x| x.residual)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_residual() < tol && self.wholesale < tol
    }
}

fn label(f: Factor) -> String {
    format!("t{}{}{}", if f.prime { "'" } else { "" }, f.i + 1, f.j + 1)
}

/// Index pairs `((ij), (kl))` of the `K″`-free relations
/// `t_{ij} t′_{kl} = t′_{ij} t_{kl}`: exactly those with `k ≠ i′` and `l ≠ j′`.
pub fn k_independent_pairs(n: usize) -> Vec<((usize, usize), (usize, usize))> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if k != conj(n, i) && l != conj(n, j) {
                        out.push(((i, j), (k, l)));
                    }
                }
            }
        }
    }
    out
}

/// `(c, d)` of the six `X` sets; the same pairs label the `Y` sets.
pub const SET_INDICES: [(usize, usize); 6] = [(0, 0), (0, 1), (1, 0), (1, 2), (2, 1), (2, 2)];

/// The nine mixed relations as printed: `(t_{ij} t′_{kl} − t′_{ij} t_{kl}) =
/// −K″(s^x X_m − s^y Y_m′)` given as `((i,j), (k,l), x, X index, y, Y index)`,
/// 1-based `X`/`Y` numbering.
pub type MixedRow = ((usize, usize), (usize, usize), i32, usize, i32, usize);

pub const MIXED: [MixedRow; 9] = [
    ((1, 1), (3, 3), -1, 3, -1, 3),
    ((1, 2), (3, 2), -1, 5, 0, 3),
    ((1, 3), (3, 1), -1, 7, 1, 3),
    ((2, 1), (2, 3), 0, 3, -1, 5),
    ((2, 2), (2, 2), 0, 5, 0, 5),
    ((2, 3), (2, 1), 0, 7, 1, 5),
    ((3, 1), (1, 3), 1, 3, -1, 7),
    ((3, 2), (1, 2), 1, 5, 0, 7),
    ((3, 3), (1, 1), 1, 7, 1, 7),
];

fn numbered(m: usize) -> (usize, usize) {
    ((m - 1) / 3, (m - 1) % 3)
}

fn evaluate(
    mono: &MonodromyBlocks<BigRational>,
    params: &ModelParams<f64>,
    theta: f64,
) -> Result<Vec<Mat>> {
    let k = params.k_of_theta(theta)?;
    let n = params.n;
    (0..n * n)
        .map(|ij| mono.block(ij / n, ij % n).eval_real(params.q, k))
        .collect()
}

/// `‖R̂(θ−θ′)(t⊗t′) − (t′⊗t)R̂(θ−θ′)‖_max` with every block product taken in
/// the quantum space.
pub fn wholesale_residual(
    params: &ModelParams<f64>,
    r: usize,
    theta: f64,
    theta_p: f64,
) -> Result<f64> {
    let mono = MonodromyBlocks::<BigRational>::build(params.n, r, DEFAULT_CAP)?;
    let k_pp = params.k_of_theta(theta - theta_p)?;
    let b = Blocks {
        n: params.n,
        q: params.q,
        t: evaluate(&mono, params, theta)?,
        tp: evaluate(&mono, params, theta_p)?,
    };
    wholesale(&b, k_pp)
}

fn wholesale(b: &Blocks, k_pp: f64) -> Result<f64> {
    let n = b.n;
    let p0 = build_p0prime::<Rational64>(n)?.eval_real(b.q, 0.0)?;
    let rhat = Mat::identity(n * n, n * n) + p0 * k_pp;
    // (t⊗t′)_{(a,b),(c,d)} = t_{ac} t′_{bd}
    let prod = |first: &[Mat], second: &[Mat], a: usize, bb: usize, c: usize, d: usize| {
        &first[a * n + c] * &second[bb * n + d]
    };
    let rows: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|row| {
            let mut worst: f64 = 0.0;
            for col in 0..n * n {
                let (c, d) = (col / n, col % n);
                let dim = b.t[0].nrows();
                let mut lhs = Mat::zeros(dim, dim);
                let mut rhs = Mat::zeros(dim, dim);
                for mid in 0..n * n {
                    let w = rhat[(row, mid)];
                    if w != 0.0 {
                        lhs += prod(&b.t, &b.tp, mid / n, mid % n, c, d) * w;
                    }
                    let w = rhat[(mid, col)];
                    if w != 0.0 {
                        rhs += prod(&b.tp, &b.t, row / n, row % n, mid / n, mid % n) * w;
                    }
                }
                worst = worst.max((lhs - rhs).amax());
            }
            worst
        })
        .collect();
    Ok(rows.into_iter().fold(0.0, f64::max))
}

/// Every itemized relation and the wholesale identity for `N = 3`.
pub fn rtt_verify(
    params: &ModelParams<f64>,
    r: usize,
    theta: f64,
    theta_p: f64,
) -> Result<RttReport> {
    if params.n != 3 {
        return Err(Error::domain(
            "the itemized relation catalogue is written for N = 3",
        ));
    }
    let k_pp = params.k_of_theta(theta - theta_p)?;
    let mono = MonodromyBlocks::<BigRational>::build(3, r, DEFAULT_CAP)?;
    let b = Blocks {
        n: 3,
        q: params.q,
        t: evaluate(&mono, params, theta)?,
        tp: evaluate(&mono, params, theta_p)?,
    };

    let k_independent = k_independent_pairs(3)
        .par_iter()
        .map(|&((i, j), (k, l))| {
            let terms = commutator(t(i, j), tp(k, l), 0);
            RelationResidual {
                label: format!(
                    "{}{} = {}{}",
                    label(t(i, j)),
                    label(tp(k, l)),
                    label(tp(i, j)),
                    label(t(k, l))
                ),
                residual: b.eval(&terms).amax(),
            }
        })
        .collect();

    let rho = rho_doubled(3)?;
    let mut x_sets = Vec::new();
    let mut y_sets = Vec::new();
    for &(c, d) in &SET_INDICES {
        let m = 3 * c + d + 1;
        let x = x_terms(c, d);
        let y = y_terms(c, d);
        for (a, &rho_a) in rho.iter().enumerate() {
            // s^{ρ_a}(t_{ac} t′_{a′d} − t′_{ac} t_{a′d}) + K″ X = 0
            let lhs = commutator(t(a, c), tp(conj(3, a), d), rho_a);
            let mut rel = lhs.clone();
            rel.extend(scaled(x.clone(), k_pp, 0));
            x_sets.push(RelationResidual {
                label: format!("X{m}, a={}", a + 1),
                residual: residual(&b, &rel),
            });
            // indices of the left side transposed, sign of K″ flipped
            let mut rel: Vec<Term> = lhs.into_iter().map(|x| x.map(Factor::transposed)).collect();
            rel.extend(scaled(y.clone(), -k_pp, 0));
            y_sets.push(RelationResidual {
                label: format!("Y{m}, a={}", a + 1),
                residual: residual(&b, &rel),
            });
        }
    }

    let mixed = MIXED
        .iter()
        .map(|&((i, j), (k, l), xs, xm, ys, ym)| {
            let (xc, xd) = numbered(xm);
            let (yc, yd) = numbered(ym);
            let mut rel = commutator(t(i - 1, j - 1), tp(k - 1, l - 1), 0);
            rel.extend(scaled(x_terms(xc, xd), k_pp, xs));
            rel.extend(scaled(y_terms(yc, yd), -k_pp, ys));
            RelationResidual {
                label: format!("t{i}{j}t'{k}{l}: X{xm}, Y{ym}"),
                residual: residual(&b, &rel),
            }
        })
        .collect();

    Ok(RttReport {
        n_states: 3,
        r,
        theta,
        theta_p,
        q: params.q,
        k_pp,
        k_independent,
        x_sets,
        y_sets,
        mixed,
        wholesale: wholesale(&b, k_pp)?,
    })
}

fn residual(b: &Blocks, terms: &[Term]) -> f64 {
    b.eval(terms).amax()
}
