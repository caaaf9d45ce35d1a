use std::fmt::Write as _;

use obraid::braid::ModelParams;
use obraid::cayley_rtt::{
    closed_form_x, emit_v_csv, excluded_values, inverse_cayley, CayleyResult,
};
use obraid::eigen::C64;
use obraid::hamiltonian::{
    build_h_logderiv, build_h_logderiv_fd, build_h_sum, h_eigens_from_records, propagation_audit,
    selection_rule_audit, HEigen, PropagationReport, Violation,
};
use obraid::matrix::max_abs;
use obraid::spectra::{diagonalize_all, diagonalize_weight, SpectralRecord};
use obraid::symmetry::{dims_table, DimTable, Omega};
use serde::Serialize;

use crate::args::{
    CayleyArgs, Check, DimsArgs, HamiltonianArgs, ReportArgs, SpectrumArgs, VerifyArgs,
};
use crate::checks::{self, parse_lambda, validate_model, CheckResult, Session, Status};
use crate::output::{c2, emit_csv, emit_json, usage, write_artifact, CliResult};

/// Process exit status: `true` when every selected check passed.
pub type Outcome = bool;

fn print_checks(results: &[CheckResult]) {
    for c in results {
        let name = serde_json::to_value(c.name).unwrap();
        eprintln!(
            "{} {}: {}",
            c.status.label(),
            name.as_str().unwrap_or("?"),
            c.summary
        );
    }
}

fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|c| c.status != Status::Fail)
}

#[derive(Serialize)]
struct VerifyBody<'a> {
    checks: &'a [CheckResult],
    passed: bool,
}

#[derive(Serialize)]
struct VerifyConfig<'a> {
    checks: Vec<Check>,
    #[serde(flatten)]
    model: &'a crate::args::Model,
    #[serde(flatten)]
    spectral: &'a crate::args::Spectral,
    lambda: Option<[f64; 2]>,
    tolerances: &'a crate::args::Tolerances,
}

pub fn verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let selected = match (a.check, a.all) {
        (Some(c), false) => vec![c],
        (None, true) | (Some(Check::All), true) => vec![Check::All],
        (Some(_), true) => return Err(usage("give either a check name or --all, not both")),
        (None, false) => return Err(usage("name a check (ybe, trace, commute, rtt, cayley, hamiltonian, oracle, all) or pass --all")),
    };
    a.tol.validate().map_err(usage)?;
    let lambda = a.lambda.as_deref().map(parse_lambda).transpose()?;
    let checks = checks::expand(&selected);
    let mut session = Session::new(&a.model)?;
    let mut results = Vec::new();
    for &c in &checks {
        results.push(checks::run(
            c,
            &mut session,
            &a.spectral,
            &a.tol,
            lambda,
            a.out.timings,
        )?);
    }
    print_checks(&results);
    let passed = all_passed(&results);
    let config = VerifyConfig {
        checks,
        model: &a.model,
        spectral: &a.spectral,
        lambda: lambda.map(c2),
        tolerances: &a.tol,
    };
    emit_json(
        "verify",
        &a.out,
        &config,
        &VerifyBody {
            checks: &results,
            passed,
        },
    )?;
    Ok(passed)
}

#[derive(Serialize)]
struct SpectrumBody<'a> {
    records: &'a [SpectralRecord],
}

#[derive(Serialize)]
struct SpectrumConfig<'a> {
    #[serde(flatten)]
    model: &'a crate::args::Model,
    n: Option<usize>,
    omega: Option<Omega>,
}

fn spectra(
    session: &mut Session,
    n: Option<usize>,
    omega: Option<Omega>,
) -> CliResult<Vec<SpectralRecord>> {
    let mut out = Vec::new();
    for &r in &session.model.r.clone() {
        for &q in &session.model.q.clone() {
            let t = session.transfer(r)?;
            let recs = match n {
                Some(n) => {
                    if n < r || n > t.n * r {
                        return Err(usage(format!("--n must lie in {r}..={}", t.n * r)));
                    }
                    diagonalize_weight(t, n, q)?
                }
                None => diagonalize_all(t, q)?,
            };
            out.extend(
                recs.into_iter()
                    .filter(|x| omega.is_none_or(|w| w == x.omega)),
            );
        }
    }
    Ok(out)
}

fn spectrum_csv(records: &[SpectralRecord]) -> String {
    let mut s = String::from("N,r,n,omega,q,branch,multiplicity,k,re,im\n");
    for (b, rec) in records.iter().enumerate() {
        for (k, f) in rec.f.iter().enumerate() {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{:e},{:e}",
                rec.n_states, rec.r, rec.n, rec.omega, rec.q, b, rec.multiplicity, k, f.re, f.im
            )
            .unwrap();
        }
    }
    s
}

pub fn spectrum(a: &SpectrumArgs) -> CliResult<Outcome> {
    let omega = a.omega.as_deref().map(Omega::parse).transpose()?;
    if let Some(w) = omega {
        if a.model.r.iter().any(|&r| r % w.den as usize != 0) {
            return Err(usage(format!("omega = {w} is not an r-th root of unity")));
        }
    }
    let mut session = Session::new(&a.model)?;
    if let Some(path) = &a.dump_t {
        if a.model.r.len() != 1 {
            return Err(usage("--dump-t needs a single --r"));
        }
        let t = session.transfer(a.model.r[0])?;
        write_artifact(path, &t.matrix.to_triplets())?;
    }
    let records = spectra(&mut session, a.n, omega)?;
    let worst_fit = records.iter().map(|x| x.fit_residual).fold(0.0, f64::max);
    eprintln!(
        "{} eigenbranches, largest held-out fit residual {worst_fit:.3e}",
        records.len()
    );
    emit_csv("spectrum", &a.out, &spectrum_csv(&records))?;
    let config = SpectrumConfig {
        model: &a.model,
        n: a.n,
        omega,
    };
    emit_json(
        "spectrum",
        &a.out,
        &config,
        &SpectrumBody { records: &records },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct HamiltonianRow {
    #[serde(rename = "N")]
    n_states: usize,
    r: usize,
    q: f64,
    kdot0: f64,
    trace: f64,
    trace_over_kdot0: f64,
    /// Sorted by real part, then imaginary part.
    eigenvalues: Vec<[f64; 2]>,
    eigenvalues_over_kdot0: Vec<[f64; 2]>,
    nullity: usize,
    cross_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fd_distance: Option<f64>,
    weight_commutator: f64,
    cp_commutator: f64,
    edge_weights: Vec<usize>,
    kernel_defect: f64,
    record_eigenvalues: Vec<HEigen>,
    selection_violations: Vec<Violation>,
    propagation: PropagationReport,
    passed: bool,
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn hamiltonian_rows(
    session: &mut Session,
    fd: Option<f64>,
    tol: f64,
) -> CliResult<Vec<HamiltonianRow>> {
    let n = session.model.n_states;
    let mut rows = Vec::new();
    for &r in &session.model.r.clone() {
        for &q in &session.model.q.clone() {
            let p = ModelParams::new(n, q)?;
            let hs = build_h_sum(&p, r, session.model.cap)?;
            let t = session.transfer(r)?;
            let hl = build_h_logderiv(t, &p)?;
            let fd_distance = fd
                .map(|h| build_h_logderiv_fd(t, &p, h).map(|x| x.distance(&hs)))
                .transpose()?;
            let records = diagonalize_all(t, q)?;
            let eig = sorted(hs.eigenvalues()?);
            let cross_distance = hs.distance(&hl);
            let selection_violations = selection_rule_audit(&hs);
            let record_eigenvalues = h_eigens_from_records(&hs, &records)?;
            let passed = cross_distance < tol
                && selection_violations.is_empty()
                && record_eigenvalues.iter().all(|x| x.residual < 1e-8);
            rows.push(HamiltonianRow {
                n_states: n,
                r,
                q,
                kdot0: hs.kdot0,
                trace: hs.trace(),
                trace_over_kdot0: hs.trace() / hs.kdot0,
                eigenvalues_over_kdot0: eig.iter().map(|z| c2(z / hs.kdot0)).collect(),
                eigenvalues: eig.into_iter().map(c2).collect(),
                nullity: hs.nullity(tol),
                cross_distance,
                fd_distance,
                weight_commutator: hs.weight_commutator(),
                cp_commutator: hs.cp_commutator(),
                kernel_defect: hs.kernel_defect(&hs.edge_weights()),
                edge_weights: hs.edge_weights(),
                record_eigenvalues,
                selection_violations,
                propagation: propagation_audit(&hs),
                passed,
            });
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct HamiltonianBody<'a> {
    hamiltonians: &'a [HamiltonianRow],
    passed: bool,
}

#[derive(Serialize)]
struct HamiltonianConfig<'a> {
    #[serde(flatten)]
    model: &'a crate::args::Model,
    fd: Option<f64>,
    tol_h: f64,
}

pub fn hamiltonian(a: &HamiltonianArgs) -> CliResult<Outcome> {
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(usage("--tol-h must be positive"));
    }
    if a.fd.is_some_and(|h| !(h.is_finite() && h > 0.0)) {
        return Err(usage("--fd must be a positive step"));
    }
    let mut session = Session::new(&a.model)?;
    let rows = hamiltonian_rows(&mut session, a.fd, a.tol)?;
    let mut csv = String::from("N,r,q,index,re,im\n");
    for row in &rows {
        eprintln!(
            "{} N={} r={} q={}: Tr H = {:.6} = {:.6} Kdot0, |H_sum - H_logderiv| = {:.3e}, {} selection violations",
            if row.passed { "PASS" } else { "FAIL" },
            row.n_states,
            row.r,
            row.q,
            row.trace,
            row.trace_over_kdot0,
            row.cross_distance,
            row.selection_violations.len()
        );
        for (i, z) in row.eigenvalues.iter().enumerate() {
            writeln!(
                csv,
                "{},{},{},{},{:e},{:e}",
                row.n_states, row.r, row.q, i, z[0], z[1]
            )
            .unwrap();
        }
    }
    let passed = rows.iter().all(|x| x.passed);
    emit_csv("hamiltonian", &a.out, &csv)?;
    let config = HamiltonianConfig {
        model: &a.model,
        fd: a.fd,
        tol_h: a.tol,
    };
    emit_json(
        "hamiltonian",
        &a.out,
        &config,
        &HamiltonianBody {
            hamiltonians: &rows,
            passed,
        },
    )?;
    Ok(passed)
}

#[derive(Serialize)]
struct DimsBody<'a> {
    tables: &'a [DimTable],
    consistent: bool,
}

fn dim_tables(model: &crate::args::Model) -> Vec<DimTable> {
    model
        .r
        .iter()
        .map(|&r| dims_table(model.n_states, r))
        .collect()
}

pub fn dims(a: &DimsArgs) -> CliResult<Outcome> {
    validate_model(&a.model)?;
    let tables = dim_tables(&a.model);
    let consistent = tables.iter().all(DimTable::consistent);
    let mut csv = String::from("N,r,n,dim,orbits\n");
    for t in &tables {
        let row: Vec<String> = t
            .rows
            .iter()
            .map(|x| format!("{}:{}", x.n, x.dim))
            .collect();
        eprintln!(
            "N={} r={} total={} [{}]",
            t.n_states,
            t.r,
            t.total,
            row.join(" ")
        );
        for x in &t.rows {
            writeln!(csv, "{},{},{},{},{}", t.n_states, t.r, x.n, x.dim, x.orbits).unwrap();
        }
    }
    emit_csv("dims", &a.out, &csv)?;
    emit_json(
        "dims",
        &a.out,
        &a.model,
        &DimsBody {
            tables: &tables,
            consistent,
        },
    )?;
    Ok(consistent)
}

#[derive(Serialize)]
struct CayleyBody<'a> {
    result: &'a CayleyResult,
    /// `max |X − X_closed|` (`N = 3` only).
    closed_form_deviation: Option<f64>,
    excluded_values: Vec<(String, [f64; 2])>,
    v: Vec<Vec<[f64; 2]>>,
    passed: bool,
}

#[derive(Serialize)]
struct CayleyConfig {
    #[serde(rename = "N")]
    n_states: usize,
    q: f64,
    theta: f64,
    lambda: [f64; 2],
    tol_cayley: f64,
}

pub fn cayley(a: &CayleyArgs) -> CliResult<Outcome> {
    if a.n_states < 3 {
        return Err(usage(format!("--N must be at least 3, got {}", a.n_states)));
    }
    if !(a.q.is_finite() && a.q > 0.0) {
        return Err(usage("--q must be positive"));
    }
    let lambda = parse_lambda(&a.lambda)?;
    let p = ModelParams::new(a.n_states, a.q)?;
    let res = inverse_cayley(&p, a.theta, lambda)?;
    let dev = (a.n_states == 3).then(|| max_abs(&(&res.x - closed_form_x(res.k, lambda, a.q))));
    let excluded = if a.n_states == 3 {
        excluded_values(res.k, a.q)
            .into_iter()
            .map(|(w, v)| (w.to_string(), c2(v)))
            .collect()
    } else {
        Vec::new()
    };
    let passed = res.residual < 1e-9 && dev.is_none_or(|d| d < a.tol);
    eprintln!(
        "{} lambda={} theta={} K={:.6}: condition {:.3e}, residual {:.3e}{}",
        if passed { "PASS" } else { "FAIL" },
        lambda,
        a.theta,
        res.k,
        res.condition,
        res.residual,
        dev.map(|d| format!(", closed-form deviation {d:.3e}"))
            .unwrap_or_default()
    );
    let csv = emit_v_csv(&res);
    if let Some(path) = &a.emit_v {
        write_artifact(path, &csv)?;
    }
    emit_csv("cayley", &a.out, &csv)?;
    let v = res
        .v
        .row_iter()
        .map(|row| row.iter().map(|z| c2(*z)).collect())
        .collect();
    let config = CayleyConfig {
        n_states: a.n_states,
        q: a.q,
        theta: a.theta,
        lambda: c2(lambda),
        tol_cayley: a.tol,
    };
    let body = CayleyBody {
        result: &res,
        closed_form_deviation: dev,
        excluded_values: excluded,
        v,
        passed,
    };
    emit_json("cayley", &a.out, &config, &body)?;
    Ok(passed)
}

#[derive(Serialize)]
struct ReportBody<'a> {
    checks: &'a [CheckResult],
    dims: &'a [DimTable],
    spectra: &'a [SpectralRecord],
    hamiltonians: &'a [HamiltonianRow],
    passed: bool,
}

#[derive(Serialize)]
struct ReportConfig<'a> {
    #[serde(flatten)]
    model: &'a crate::args::Model,
    #[serde(flatten)]
    spectral: &'a crate::args::Spectral,
    tolerances: &'a crate::args::Tolerances,
}

pub fn report(a: &ReportArgs) -> CliResult<Outcome> {
    a.tol.validate().map_err(usage)?;
    let mut session = Session::new(&a.model)?;
    let mut results = Vec::new();
    let selected = [Check::All, Check::Hamiltonian, Check::Oracle];
    for c in checks::expand(&selected) {
        results.push(checks::run(
            c,
            &mut session,
            &a.spectral,
            &a.tol,
            None,
            a.out.timings,
        )?);
    }
    print_checks(&results);
    let dims = dim_tables(&a.model);
    let records = spectra(&mut session, None, None)?;
    let hams = hamiltonian_rows(&mut session, None, a.tol.hamiltonian)?;
    let passed = all_passed(&results) && dims.iter().all(DimTable::consistent);
    emit_csv("report", &a.out, &spectrum_csv(&records))?;
    let config = ReportConfig {
        model: &a.model,
        spectral: &a.spectral,
        tolerances: &a.tol,
    };
    let body = ReportBody {
        checks: &results,
        dims: &dims,
        spectra: &records,
        hamiltonians: &hams,
        passed,
    };
    emit_json("report", &a.out, &config, &body)?;
    Ok(passed)
}
