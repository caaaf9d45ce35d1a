use std::collections::BTreeMap;
use std::time::Instant;

use obraid::braid::{verify_ybe, ModelParams};
use obraid::cayley_rtt::{
    cayley_exclusion, closed_form_x, inverse_cayley, rtt_verify, wholesale_residual,
};
use obraid::eigen::C64;
use obraid::hamiltonian::{build_h_logderiv, build_h_sum, selection_rule_audit};
use obraid::matrix::max_abs;
use obraid::spectra::diagonalize_all;
use obraid::spectra::oracle::{check_sums, check_vectors, compare_chain, Oracle, DEFAULT_GRID};
use obraid::transfer::{build_t, verify_commutativity, TransferMatrix};
use obraid::{Error, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Check, Model, Spectral, Tolerances};
use crate::output::{c2, usage, CliResult};

/// `(R − λI)(−iV) = R + λI` residual bound.
const CAYLEY_RESIDUAL_TOL: f64 = 1e-9;

const CAYLEY_LAMBDAS: [(f64, f64); 5] = [
    (-2.5, 0.0),
    (-0.6, 0.0),
    (0.37, 0.0),
    (0.3, 0.8),
    (3.1, -0.4),
];
const CAYLEY_THETAS: [f64; 5] = [-0.3, -0.1, 0.2, 0.5, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: Check,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub summary: String,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// Transfer matrices built once per chain length and shared by the checks.
pub struct Session<'a> {
    pub model: &'a Model,
    ts: BTreeMap<usize, TransferMatrix<Rational>>,
}

impl<'a> Session<'a> {
    pub fn new(model: &'a Model) -> CliResult<Self> {
        validate_model(model)?;
        Ok(Self {
            model,
            ts: BTreeMap::new(),
        })
    }

    pub fn transfer(&mut self, r: usize) -> CliResult<&TransferMatrix<Rational>> {
        if !self.ts.contains_key(&r) {
            let t = build_t::<Rational>(self.model.n_states, r, self.model.cap)?;
            self.ts.insert(r, t);
        }
        Ok(&self.ts[&r])
    }

    fn params(&self, q: f64) -> CliResult<ModelParams<f64>> {
        Ok(ModelParams::new(self.model.n_states, q)?)
    }
}

pub fn validate_model(model: &Model) -> CliResult<()> {
    if model.n_states < 3 {
        return Err(usage(format!(
            "--N must be at least 3, got {}",
            model.n_states
        )));
    }
    if model.r.is_empty() || model.r.contains(&0) {
        return Err(usage("--r must list chain lengths of at least 1"));
    }
    if model.q.is_empty() || model.q.iter().any(|q| !(q.is_finite() && *q > 0.0)) {
        return Err(usage("--q must list positive numbers"));
    }
    for &r in &model.r {
        obraid::transfer::checked_dim(model.n_states, r, model.cap)?;
    }
    Ok(())
}

pub fn parse_lambda(s: &str) -> CliResult<C64> {
    s.trim().replace(' ', "").parse::<C64>().map_err(|_| {
        usage(format!(
            "bad --lambda '{s}', expected e.g. 0.37 or 0.3+0.8i"
        ))
    })
}

/// `k` evenly spaced points on `[-0.4, 0.4]`.
pub fn theta_grid(k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![0.25],
        _ => (0..k)
            .map(|i| -0.4 + 0.8 * i as f64 / (k - 1) as f64)
            .collect(),
    }
}

fn theta_pairs(sp: &Spectral) -> Vec<(f64, f64)> {
    let g = theta_grid(sp.grid);
    let mut pairs: Vec<(f64, f64)> = g
        .iter()
        .flat_map(|&a| g.iter().map(move |&b| (a, b)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sp.seed);
    for _ in 0..sp.random {
        pairs.push((rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4)));
    }
    pairs
}

fn finish(
    name: Check,
    ok: bool,
    tolerance: Option<f64>,
    residual: Option<f64>,
    summary: String,
    detail: Value,
) -> CheckResult {
    CheckResult {
        name,
        status: Status::of(ok),
        tolerance,
        residual,
        summary,
        detail,
        timing_ms: None,
    }
}

fn skip(name: Check, why: &str) -> CheckResult {
    CheckResult {
        name,
        status: Status::Skip,
        tolerance: None,
        residual: None,
        summary: why.into(),
        detail: Value::Null,
        timing_ms: None,
    }
}

pub fn expand(checks: &[Check]) -> Vec<Check> {
    let mut out = Vec::new();
    for &c in checks {
        let items: &[Check] = if c == Check::All {
            &Check::SUITE
        } else {
            std::slice::from_ref(&c)
        };
        for &i in items {
            if !out.contains(&i) {
                out.push(i);
            }
        }
    }
    out
}

pub fn run(
    check: Check,
    session: &mut Session,
    sp: &Spectral,
    tol: &Tolerances,
    lambda: Option<C64>,
    timings: bool,
) -> CliResult<CheckResult> {
    let start = Instant::now();
    let mut res = match check {
        Check::Ybe => ybe(session, sp, tol),
        Check::Trace => trace(session),
        Check::Commute => commute(session, sp, tol),
        Check::Rtt => rtt(session, sp, tol),
        Check::Cayley => cayley(session, sp, tol, lambda),
        Check::Hamiltonian => hamiltonian(session, tol),
        Check::Oracle => oracle(session, tol),
        Check::All => unreachable!("expanded before dispatch"),
    }?;
    if timings {
        res.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(res)
}

fn ybe(s: &Session, sp: &Spectral, tol: &Tolerances) -> CliResult<CheckResult> {
    let pairs = theta_pairs(sp);
    let mut worst: f64 = 0.0;
    let mut per_q = Vec::new();
    for &q in &s.model.q {
        let p = s.params(q)?;
        let mut m: f64 = 0.0;
        for &(a, b) in &pairs {
            m = m.max(verify_ybe(&p, a, b)?);
        }
        worst = worst.max(m);
        per_q.push(json!({ "q": q, "residual_max": m }));
    }
    Ok(finish(
        Check::Ybe,
        worst < tol.ybe,
        Some(tol.ybe),
        Some(worst),
        format!(
            "max residual {worst:.3e} over {} (theta, theta') pairs",
            pairs.len()
        ),
        json!({
            "residual_max": worst,
            "grid": theta_grid(sp.grid),
            "random_samples": sp.random,
            "seed": sp.seed,
            "params": { "N": s.model.n_states, "q": s.model.q },
            "per_q": per_q,
        }),
    ))
}

fn trace(s: &mut Session) -> CliResult<CheckResult> {
    let mut rows = Vec::new();
    let mut ok = true;
    let mut last = String::new();
    for &r in &s.model.r.clone() {
        let t = s.transfer(r)?;
        let (got, want) = (t.trace(), t.expected_trace());
        let exact = got == want;
        ok &= exact;
        last = format!("Tr T = {got}");
        rows.push(json!({ "r": r, "trace": got.to_string(), "expected": want.to_string(), "exact": exact }));
    }
    let summary = if ok {
        format!("exact, {last}")
    } else {
        "trace differs from N(1+K)^r".into()
    };
    Ok(finish(
        Check::Trace,
        ok,
        None,
        None,
        summary,
        json!({ "rows": rows }),
    ))
}

fn commute(s: &mut Session, sp: &Spectral, tol: &Tolerances) -> CliResult<CheckResult> {
    let pairs = theta_pairs(sp);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &r in &s.model.r.clone() {
        for &q in &s.model.q.clone() {
            let p = s.params(q)?;
            let t = s.transfer(r)?;
            let mut m: f64 = 0.0;
            for &(a, b) in &pairs {
                m = m.max(verify_commutativity(t, &p, a, b)?);
            }
            worst = worst.max(m);
            rows.push(json!({ "r": r, "q": q, "residual": m }));
        }
    }
    Ok(finish(
        Check::Commute,
        worst < tol.commute,
        Some(tol.commute),
        Some(worst),
        format!("max scaled commutator {worst:.3e}"),
        json!({ "grid": theta_grid(sp.grid), "rows": rows }),
    ))
}

fn rtt(s: &Session, sp: &Spectral, tol: &Tolerances) -> CliResult<CheckResult> {
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &r in &s.model.r {
        for &q in &s.model.q {
            let p = s.params(q)?;
            if s.model.n_states == 3 {
                let rep = rtt_verify(&p, r, sp.theta, sp.theta_p)?;
                worst = worst.max(rep.max_residual()).max(rep.wholesale);
                rows.push(serde_json::to_value(&rep).expect("serializable"));
            } else {
                let w = wholesale_residual(&p, r, sp.theta, sp.theta_p)?;
                worst = worst.max(w);
                rows.push(json!({ "N": s.model.n_states, "r": r, "q": q, "wholesale": w }));
            }
        }
    }
    let scope = if s.model.n_states == 3 {
        "itemized relations and wholesale identity"
    } else {
        "wholesale identity"
    };
    Ok(finish(
        Check::Rtt,
        worst < tol.rtt,
        Some(tol.rtt),
        Some(worst),
        format!("{scope}, max residual {worst:.3e}"),
        json!({ "theta": sp.theta, "theta_p": sp.theta_p, "rows": rows }),
    ))
}

fn cayley(
    s: &Session,
    sp: &Spectral,
    tol: &Tolerances,
    lambda: Option<C64>,
) -> CliResult<CheckResult> {
    let n = s.model.n_states;
    let points: Vec<(C64, f64)> = match lambda {
        Some(l) => vec![(l, sp.theta)],
        None => CAYLEY_LAMBDAS
            .iter()
            .flat_map(|&(re, im)| CAYLEY_THETAS.iter().map(move |&t| (C64::new(re, im), t)))
            .collect(),
    };
    let mut rows = Vec::new();
    let (mut worst_x, mut worst_res): (f64, f64) = (0.0, 0.0);
    let mut solved = 0;
    for &q in &s.model.q {
        let p = s.params(q)?;
        for &(l, theta) in &points {
            let k = p.k_of_theta(theta)?;
            if n == 3 {
                if let Some(e) = cayley_exclusion(l, k, q) {
                    if lambda.is_some() {
                        return Err(Error::Excluded {
                            lambda: l.to_string(),
                            reason: format!("coincides with the {} value", e.which),
                        }
                        .into());
                    }
                    rows.push(
                        json!({ "q": q, "theta": theta, "lambda": c2(l), "excluded": e.which }),
                    );
                    continue;
                }
            }
            match inverse_cayley(&p, theta, l) {
                Ok(res) => {
                    solved += 1;
                    let dev = (n == 3).then(|| max_abs(&(&res.x - closed_form_x(k, l, q))));
                    worst_x = worst_x.max(dev.unwrap_or(0.0));
                    worst_res = worst_res.max(res.residual);
                    rows.push(json!({
                        "q": q, "theta": theta, "lambda": c2(l), "k": k,
                        "closed_form_deviation": dev, "residual": res.residual,
                        "condition": res.condition,
                    }));
                }
                Err(Error::Excluded { reason, .. }) if lambda.is_none() => {
                    rows.push(
                        json!({ "q": q, "theta": theta, "lambda": c2(l), "excluded": reason }),
                    );
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let ok = solved > 0 && worst_x < tol.cayley && worst_res < CAYLEY_RESIDUAL_TOL;
    let summary = if n == 3 {
        format!("{solved} points, closed-form deviation {worst_x:.3e}, residual {worst_res:.3e}")
    } else {
        format!("{solved} points, residual {worst_res:.3e} (no closed form for N = {n})")
    };
    Ok(finish(
        Check::Cayley,
        ok,
        Some(tol.cayley),
        Some(worst_x.max(worst_res)),
        summary,
        json!({ "residual_tolerance": CAYLEY_RESIDUAL_TOL, "points": rows }),
    ))
}

/// `2K̇₀(q + q⁻¹ + 1)` for `N = 3`, `r = 2`.
fn expected_trace(n: usize, r: usize, q: f64, kdot0: f64) -> Option<f64> {
    (n == 3 && r == 2).then(|| 2.0 * kdot0 * (q + 1.0 / q + 1.0))
}

fn hamiltonian(s: &mut Session, tol: &Tolerances) -> CliResult<CheckResult> {
    let n = s.model.n_states;
    let mut rows = Vec::new();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for &r in &s.model.r.clone() {
        for &q in &s.model.q.clone() {
            let p = s.params(q)?;
            let hs = build_h_sum(&p, r, s.model.cap)?;
            let hl = build_h_logderiv(s.transfer(r)?, &p)?;
            let dist = hs.distance(&hl);
            let wc = hs.weight_commutator();
            let cc = hs.cp_commutator();
            let tr = hs.trace();
            let tr_dev = expected_trace(n, r, q, hs.kdot0).map(|e| (tr - e).abs());
            let kernel = (n == 3).then(|| hs.kernel_defect(&hs.edge_weights()));
            let violations = selection_rule_audit(&hs).len();
            let row_ok = dist < tol.hamiltonian
                && wc < tol.hamiltonian
                && cc < tol.hamiltonian
                && tr_dev.is_none_or(|d| d < tol.hamiltonian)
                && kernel.is_none_or(|d| d < tol.hamiltonian)
                && violations == 0;
            ok &= row_ok;
            worst = worst.max(dist).max(wc).max(cc);
            rows.push(json!({
                "r": r, "q": q, "kdot0": hs.kdot0, "cross_distance": dist,
                "weight_commutator": wc, "cp_commutator": cc, "trace": tr,
                "trace_deviation": tr_dev, "kernel_defect": kernel,
                "selection_violations": violations, "passed": row_ok,
            }));
        }
    }
    Ok(finish(
        Check::Hamiltonian,
        ok,
        Some(tol.hamiltonian),
        Some(worst),
        format!("H_sum vs log-derivative and commutators within {worst:.3e}"),
        json!({ "rows": rows }),
    ))
}

fn oracle(s: &mut Session, tol: &Tolerances) -> CliResult<CheckResult> {
    let oracle = Oracle::bundled()?;
    let n = s.model.n_states;
    let mut rows = Vec::new();
    let mut any = false;
    let (mut failed, mut total) = (0usize, 0usize);
    for &r in &s.model.r.clone() {
        let Some(chain) = oracle.chain(n, r) else {
            continue;
        };
        any = true;
        for &q in &s.model.q.clone() {
            let t = s.transfer(r)?;
            let records = diagonalize_all(t, q)?;
            let sectors = compare_chain(chain, &records, q, &DEFAULT_GRID, tol.eig)?;
            let sums = check_sums(chain, &records, q, tol.eig)?;
            let vectors = check_vectors(chain, t, q, &DEFAULT_GRID, tol.eig)?;
            let flags = sectors
                .iter()
                .map(|x| x.passed)
                .chain(sums.iter().map(|x| x.passed))
                .chain(vectors.iter().map(|x| x.passed));
            for f in flags {
                total += 1;
                failed += usize::from(!f);
            }
            rows.push(
                json!({ "r": r, "q": q, "sectors": sectors, "sums": sums, "vectors": vectors }),
            );
        }
    }
    if !any {
        return Ok(skip(
            Check::Oracle,
            "no closed forms bundled for this (N, r)",
        ));
    }
    Ok(finish(
        Check::Oracle,
        failed == 0,
        Some(tol.eig),
        None,
        format!("{} of {total} comparisons match", total - failed),
        json!({ "grid": DEFAULT_GRID, "rows": rows }),
    ))
}
