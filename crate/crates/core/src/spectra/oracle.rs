//! Hand-transcribed closed forms for small chains and the comparisons
//! against computed branches. The data format is described at the top of
//! `data/oracle.txt`.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{default_k_samples, fit_k_polynomial, subspace_trace, SpectralRecord};
use crate::eigen::{multiset_distance, C64};
use crate::error::{Error, Result};
use crate::exact::Coeff;
use crate::symmetry::{Omega, StateWord};
use crate::transfer::TransferMatrix;

pub const ORACLE: &str = include_str!("../../data/oracle.txt");

/// Sample points for comparing branches against closed forms.
pub const DEFAULT_GRID: [f64; 5] = [0.2, 0.5, 0.9, 1.3, 2.0];

/// Lowercase hex SHA-256 of the bundled oracle data.
pub fn oracle_hash() -> String {
    sha256_hex(ORACLE)
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

// ---------------------------------------------------------------- expressions

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Q,
    K,
    W,
    I,
    /// A named ket, `A`..`Z`.
    Sym(char),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
}

/// Values bound to the variables of an expression. Unbound variables are
/// an error at evaluation time.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub q: Option<C64>,
    pub k: Option<C64>,
    pub w: Option<C64>,
    pub syms: BTreeMap<char, C64>,
}

impl Env {
    pub fn new(q: f64, k: f64, w: Option<C64>) -> Self {
        Self {
            q: Some(C64::new(q, 0.0)),
            k: Some(C64::new(k, 0.0)),
            w,
            syms: BTreeMap::new(),
        }
    }
}

fn unbound(name: &str) -> Error {
    Error::domain(format!("variable {name} is not bound"))
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            s: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &Env) -> Result<C64> {
        use Expr::*;
        Ok(match self {
            Num(x) => C64::new(*x, 0.0),
            Q => env.q.ok_or_else(|| unbound("q"))?,
            K => env.k.ok_or_else(|| unbound("K"))?,
            W => env.w.ok_or_else(|| unbound("w"))?,
            I => C64::new(0.0, 1.0),
            Sym(c) => env.syms.get(c).copied().unwrap_or_default(),
            Neg(a) => -a.eval(env)?,
            Add(a, b) => a.eval(env)? + b.eval(env)?,
            Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Div(a, b) => a.eval(env)? / b.eval(env)?,
            Pow(a, b) => {
                let base = a.eval(env)?;
                let e = b.eval(env)?;
                if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() < 64.0 {
                    base.powi(e.re as i32)
                } else {
                    base.powc(e)
                }
            }
            Sqrt(a) => a.eval(env)?.sqrt(),
        })
    }

    /// Named kets occurring in the expression.
    pub fn symbols(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.collect_syms(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_syms(&self, out: &mut Vec<char>) {
        use Expr::*;
        match self {
            Sym(c) => out.push(*c),
            Neg(a) | Sqrt(a) => a.collect_syms(out),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                a.collect_syms(out);
                b.collect_syms(out);
            }
            _ => {}
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                text.parse()
                    .map(Expr::Num)
                    .map_err(|_| self.err("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match name {
                    "q" => Ok(Expr::Q),
                    "K" => Ok(Expr::K),
                    "w" => Ok(Expr::W),
                    "i" => Ok(Expr::I),
                    "sqrt" => {
                        if !self.eat(b'(') {
                            return Err(self.err("expected '(' after sqrt"));
                        }
                        let e = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.err("expected ')'"));
                        }
                        Ok(Expr::Sqrt(Box::new(e)))
                    }
                    s if s.len() == 1 && s.as_bytes()[0].is_ascii_uppercase() => {
                        Ok(Expr::Sym(s.chars().next().unwrap()))
                    }
                    _ => {
                        self.pos = start;
                        Err(self.err(&format!("unknown name '{name}'")))
                    }
                }
            }
            _ => Err(self.err("expected a number, name or '('")),
        }
    }
}

// ---------------------------------------------------------------- data

#[derive(Clone, Debug, PartialEq)]
pub enum Selector {
    All,
    NotOne,
    List(Vec<Omega>),
}

impl Selector {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "*" => Ok(Self::All),
            "!1" => Ok(Self::NotOne),
            list => list
                .split(',')
                .map(Omega::parse)
                .collect::<Result<Vec<_>>>()
                .map(Self::List),
        }
    }

    /// The selected ω among the `r`-th roots of unity.
    pub fn omegas(&self, r: usize) -> Vec<Omega> {
        let all = Omega::all(r);
        match self {
            Self::All => all,
            Self::NotOne => all.into_iter().filter(|w| *w != Omega::one()).collect(),
            Self::List(ws) => all.into_iter().filter(|w| ws.contains(w)).collect(),
        }
    }

    pub fn contains(&self, w: Omega, r: usize) -> bool {
        self.omegas(r).contains(&w)
    }
}

#[derive(Clone, Debug)]
pub struct EigenLine {
    pub n: usize,
    pub selector: Selector,
    pub expr: Expr,
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct SumLine {
    pub n: usize,
    pub selector: Option<Selector>,
    pub expr: Expr,
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct VectorLine {
    pub n: usize,
    pub selector: Selector,
    /// Named kets in force when the line was read.
    pub states: BTreeMap<char, StateWord>,
    pub vector: Expr,
    pub value: Expr,
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub n_states: usize,
    pub r: usize,
    pub eigen: Vec<EigenLine>,
    pub sums: Vec<SumLine>,
    pub total: Option<(Expr, String)>,
    pub mirror: bool,
    pub vectors: Vec<VectorLine>,
}

/// One expected eigenvalue of a sector.
#[derive(Clone, Debug)]
pub struct Expected<'a> {
    pub line: &'a EigenLine,
    /// Read from the mirrored sector with `q → 1/q`.
    pub mirrored: bool,
}

impl Expected<'_> {
    pub fn eval(&self, q: f64, k: f64, w: Omega) -> Result<C64> {
        let q = if self.mirrored { 1.0 / q } else { q };
        self.line.expr.eval(&Env::new(q, k, Some(w.to_complex())))
    }
}

impl Chain {
    fn new(n_states: usize, r: usize) -> Self {
        Self {
            n_states,
            r,
            eigen: Vec::new(),
            sums: Vec::new(),
            total: None,
            mirror: false,
            vectors: Vec::new(),
        }
    }

    fn own(&self, n: usize, w: Omega) -> Vec<&EigenLine> {
        self.eigen
            .iter()
            .filter(|l| l.n == n && l.selector.contains(w, self.r))
            .collect()
    }

    fn has_lines(&self, n: usize) -> bool {
        self.eigen.iter().any(|l| l.n == n)
    }

    /// Expected eigenvalues of `(n, ω)`; `None` when the data says nothing
    /// about weight `n`.
    pub fn expected(&self, n: usize, w: Omega) -> Option<Vec<Expected<'_>>> {
        if self.has_lines(n) {
            return Some(
                self.own(n, w)
                    .into_iter()
                    .map(|line| Expected {
                        line,
                        mirrored: false,
                    })
                    .collect(),
            );
        }
        let partner = (self.n_states + 1) * self.r;
        if self.mirror && n <= partner && self.has_lines(partner - n) {
            return Some(
                self.own(partner - n, w)
                    .into_iter()
                    .map(|line| Expected {
                        line,
                        mirrored: true,
                    })
                    .collect(),
            );
        }
        None
    }
}

#[derive(Clone, Debug)]
pub struct Oracle {
    pub chains: Vec<Chain>,
    pub sha256: String,
}

fn field<'a>(tok: &'a str, key: &str, lineno: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::Parse {
            pos: lineno,
            msg: format!("expected {key}=.., found '{tok}'"),
        })
}

fn num_field(tok: &str, key: &str, lineno: usize) -> Result<usize> {
    field(tok, key, lineno)?.parse().map_err(|_| Error::Parse {
        pos: lineno,
        msg: format!("bad integer in '{tok}'"),
    })
}

impl Oracle {
    pub fn bundled() -> Result<Self> {
        Self::parse(ORACLE)
    }

    /// Parse the oracle format. Error positions are line numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut chains: Vec<Chain> = Vec::new();
        let mut states: BTreeMap<usize, BTreeMap<char, StateWord>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { pos: lineno, msg };
            if let Some(rest) = line.strip_prefix('@') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 2 {
                    return Err(perr("expected '@ N=.. r=..'".into()));
                }
                chains.push(Chain::new(
                    num_field(toks[0], "N", lineno)?,
                    num_field(toks[1], "r", lineno)?,
                ));
                states.clear();
                continue;
            }
            let chain = chains
                .last_mut()
                .ok_or_else(|| perr("data before the first '@' line".into()))?;
            if line == "mirror" {
                chain.mirror = true;
                continue;
            }
            let (head, body) = line
                .split_once(':')
                .ok_or_else(|| perr("missing ':'".into()))?;
            let toks: Vec<&str> = head.split_whitespace().collect();
            let wrap = |e: Error| match e {
                Error::Parse { pos, msg } => Error::Parse {
                    pos: lineno,
                    msg: format!("column {pos}: {msg}"),
                },
                other => other,
            };
            match toks.first().copied() {
                Some("total") => {
                    chain.total = Some((Expr::parse(body).map_err(wrap)?, line.to_string()));
                }
                Some("sum") => {
                    let n = num_field(toks.get(1).copied().unwrap_or(""), "n", lineno)?;
                    let selector = match toks.get(2) {
                        Some(t) => Some(Selector::parse(field(t, "w", lineno)?)?),
                        None => None,
                    };
                    chain.sums.push(SumLine {
                        n,
                        selector,
                        expr: Expr::parse(body).map_err(wrap)?,
                        source: line.to_string(),
                    });
                }
                Some("states") => {
                    let n = num_field(toks.get(1).copied().unwrap_or(""), "n", lineno)?;
                    let map = states.entry(n).or_default();
                    map.clear();
                    for def in body.split_whitespace() {
                        let (name, word) = def
                            .split_once('=')
                            .ok_or_else(|| perr(format!("bad state '{def}'")))?;
                        let digits: Vec<u8> = word.bytes().map(|b| b.wrapping_sub(b'0')).collect();
                        if name.len() != 1
                            || digits.len() != chain.r
                            || digits
                                .iter()
                                .any(|&d| d == 0 || d as usize > chain.n_states)
                        {
                            return Err(perr(format!("bad state '{def}'")));
                        }
                        map.insert(name.chars().next().unwrap(), StateWord::new(digits));
                    }
                }
                Some("vector") => {
                    if toks.len() != 3 {
                        return Err(perr("expected 'vector n=.. w=..'".into()));
                    }
                    let n = num_field(toks[1], "n", lineno)?;
                    let selector = Selector::parse(field(toks[2], "w", lineno)?)?;
                    let (v, val) = body
                        .split_once("=>")
                        .ok_or_else(|| perr("missing '=>'".into()))?;
                    let vector = Expr::parse(v).map_err(wrap)?;
                    let st = states.get(&n).cloned().unwrap_or_default();
                    if let Some(c) = vector.symbols().into_iter().find(|c| !st.contains_key(c)) {
                        return Err(perr(format!("ket {c} is not defined for n={n}")));
                    }
                    chain.vectors.push(VectorLine {
                        n,
                        selector,
                        states: st,
                        vector,
                        value: Expr::parse(val).map_err(wrap)?,
                        source: line.to_string(),
                    });
                }
                Some(t) if t.starts_with("n=") => {
                    if toks.len() != 2 {
                        return Err(perr("expected 'n=.. w=..'".into()));
                    }
                    chain.eigen.push(EigenLine {
                        n: num_field(toks[0], "n", lineno)?,
                        selector: Selector::parse(field(toks[1], "w", lineno)?)?,
                        expr: Expr::parse(body).map_err(wrap)?,
                        source: line.to_string(),
                    });
                }
                _ => return Err(perr(format!("unrecognized line '{line}'"))),
            }
        }
        Ok(Self {
            chains,
            sha256: sha256_hex(text),
        })
    }

    pub fn chain(&self, n_states: usize, r: usize) -> Option<&Chain> {
        self.chains
            .iter()
            .find(|c| c.n_states == n_states && c.r == r)
    }
}

// ---------------------------------------------------------------- comparisons

#[derive(Clone, Debug, Serialize)]
pub struct LineMatch {
    pub source: String,
    pub mirrored: bool,
    /// Smallest relative distance to any computed branch over the grid.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorComparison {
    #[serde(rename = "N")]
    pub n_states: usize,
    pub r: usize,
    pub n: usize,
    pub omega: Omega,
    pub q: f64,
    pub expected_count: usize,
    pub computed_count: usize,
    /// Largest relative multiset distance over the grid.
    pub deviation: f64,
    pub lines: Vec<LineMatch>,
    pub passed: bool,
}

/// Compare the records of one `(n, ω)` sector with the closed forms.
/// Distances are scaled by `max(1, |expected value|)` over the grid.
pub fn compare_sector(
    chain: &Chain,
    records: &[SpectralRecord],
    n: usize,
    w: Omega,
    q: f64,
    grid: &[f64],
    tol: f64,
) -> Result<Option<SectorComparison>> {
    let Some(expected) = chain.expected(n, w) else {
        return Ok(None);
    };
    let recs: Vec<&SpectralRecord> = records
        .iter()
        .filter(|x| x.n == n && x.omega == w)
        .collect();
    let computed_count: usize = recs.iter().map(|x| x.multiplicity).sum();
    let mut exp_vals = vec![Vec::with_capacity(expected.len()); grid.len()];
    let mut got_vals = vec![Vec::with_capacity(computed_count); grid.len()];
    let mut scale: f64 = 1.0;
    for (g, &k) in grid.iter().enumerate() {
        for e in &expected {
            let v = e.eval(q, k, w)?;
            scale = scale.max(v.norm());
            exp_vals[g].push(v);
        }
        for rec in &recs {
            let v = rec.eval(C64::new(k, 0.0));
            for _ in 0..rec.multiplicity {
                got_vals[g].push(v);
            }
        }
    }
    let deviation = (0..grid.len())
        .map(|g| multiset_distance(&got_vals[g], &exp_vals[g]) / scale)
        .fold(0.0, f64::max);
    let lines = expected
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let deviation = recs
                .iter()
                .map(|rec| {
                    (0..grid.len())
                        .map(|g| (rec.eval(C64::new(grid[g], 0.0)) - exp_vals[g][j]).norm())
                        .fold(0.0, f64::max)
                        / scale
                })
                .fold(f64::INFINITY, f64::min);
            LineMatch {
                source: e.line.source.clone(),
                mirrored: e.mirrored,
                deviation,
            }
        })
        .collect();
    Ok(Some(SectorComparison {
        n_states: chain.n_states,
        r: chain.r,
        n,
        omega: w,
        q,
        expected_count: expected.len(),
        computed_count,
        deviation,
        lines,
        passed: expected.len() == computed_count && deviation <= tol,
    }))
}

/// Every sector the chain has data for.
pub fn compare_chain(
    chain: &Chain,
    records: &[SpectralRecord],
    q: f64,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<SectorComparison>> {
    let mut out = Vec::new();
    for (n, w) in super::sectors(chain.n_states, chain.r) {
        if let Some(c) = compare_sector(chain, records, n, w, q, grid, tol)? {
            out.push(c);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SumCheck {
    pub source: String,
    pub q: f64,
    #[serde(serialize_with = "super::ser_cvec")]
    pub expected: Vec<C64>,
    #[serde(serialize_with = "super::ser_cvec")]
    pub computed: Vec<C64>,
    /// Largest coefficient difference relative to `max(1, |coefficient|)`.
    pub deviation: f64,
    pub passed: bool,
}

fn coefficient_check(
    source: &str,
    expr: &Expr,
    recs: &[SpectralRecord],
    r: usize,
    q: f64,
    tol: f64,
) -> Result<SumCheck> {
    let samples: Vec<(f64, C64)> = default_k_samples(r)
        .into_iter()
        .map(|k| Ok((k, expr.eval(&Env::new(q, k, None))?)))
        .collect::<Result<_>>()?;
    let expected = fit_k_polynomial(&samples, r)?.coeffs;
    let mut computed = subspace_trace(recs);
    computed.resize(r + 1, C64::default());
    let deviation = expected
        .iter()
        .zip(&computed)
        .map(|(a, b)| (a - b).norm() / a.norm().max(1.0))
        .fold(0.0, f64::max);
    Ok(SumCheck {
        source: source.to_string(),
        q,
        expected,
        computed,
        deviation,
        passed: deviation <= tol,
    })
}

/// Subspace sums and the overall total, compared coefficient by coefficient.
pub fn check_sums(
    chain: &Chain,
    records: &[SpectralRecord],
    q: f64,
    tol: f64,
) -> Result<Vec<SumCheck>> {
    let mut out = Vec::new();
    for s in &chain.sums {
        let recs: Vec<SpectralRecord> = records
            .iter()
            .filter(|x| {
                x.n == s.n
                    && s.selector
                        .as_ref()
                        .is_none_or(|sel| sel.contains(x.omega, chain.r))
            })
            .cloned()
            .collect();
        out.push(coefficient_check(
            &s.source, &s.expr, &recs, chain.r, q, tol,
        )?);
    }
    if let Some((expr, source)) = &chain.total {
        out.push(coefficient_check(source, expr, records, chain.r, q, tol)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorStatus {
    Checked,
    /// The printed coefficients have a pole at this `q`.
    Singular,
}

#[derive(Clone, Debug, Serialize)]
pub struct VectorCheck {
    pub source: String,
    pub n: usize,
    pub omega: Omega,
    pub q: f64,
    pub status: VectorStatus,
    /// `max_K ‖T v − λ v‖ / ‖v‖` with `λ` the Rayleigh quotient.
    pub residual: f64,
    /// `max_K |λ − printed| / max(1, |printed|)`.
    pub eigenvalue_deviation: f64,
    pub passed: bool,
}

/// `Σ_X c_X (d_X / r) Σ_{m<r} ω^m |S^m X⟩` over the named kets. Returns
/// `None` when a coefficient is not finite.
fn build_vector(
    line: &VectorLine,
    n_states: usize,
    r: usize,
    w: Omega,
    q: f64,
) -> Result<Option<DVector<C64>>> {
    let dim = n_states.pow(r as u32);
    let wc = w.to_complex();
    let base = Env {
        q: Some(C64::new(q, 0.0)),
        k: None,
        w: Some(wc),
        syms: BTreeMap::new(),
    };
    let zero = line.vector.eval(&base)?;
    let mut v = DVector::<C64>::zeros(dim);
    for (&name, word) in &line.states {
        let mut env = base.clone();
        env.syms.insert(name, C64::new(1.0, 0.0));
        let c = line.vector.eval(&env)? - zero;
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Ok(None);
        }
        let d = word.period() as f64;
        for m in 0..r {
            let idx = word.shift_right(m).index(n_states);
            v[idx] += c * wc.powu(m as u32) * (d / r as f64);
        }
    }
    Ok(Some(v))
}

/// Apply `T(q, K)` to the printed eigenvectors and compare with the printed
/// eigenvalues.
pub fn check_vectors<C: Coeff>(
    chain: &Chain,
    t: &TransferMatrix<C>,
    q: f64,
    ks: &[f64],
    tol: f64,
) -> Result<Vec<VectorCheck>> {
    if t.n != chain.n_states || t.r != chain.r {
        return Err(Error::domain("transfer matrix does not match the chain"));
    }
    let mats = ks
        .iter()
        .map(|&k| t.matrix.eval(q, C64::new(k, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for line in &chain.vectors {
        for w in line.selector.omegas(chain.r) {
            let mut check = VectorCheck {
                source: line.source.clone(),
                n: line.n,
                omega: w,
                q,
                status: VectorStatus::Singular,
                residual: f64::NAN,
                eigenvalue_deviation: f64::NAN,
                passed: false,
            };
            let v = match build_vector(line, chain.n_states, chain.r, w, q)? {
                Some(v) if v.norm() > 1e-12 => v,
                _ => {
                    out.push(check);
                    continue;
                }
            };
            check.status = VectorStatus::Checked;
            let (mut res, mut dev) = (0.0f64, 0.0f64);
            for (&k, m) in ks.iter().zip(&mats) {
                let tv = m * &v;
                let lambda = v.dotc(&tv) / v.norm_squared();
                res = res.max((&tv - &v * lambda).norm() / v.norm());
                let printed = line.value.eval(&Env::new(q, k, Some(w.to_complex())))?;
                dev = dev.max((lambda - printed).norm() / printed.norm().max(1.0));
            }
            check.residual = res;
            check.eigenvalue_deviation = dev;
            check.passed = res <= tol && dev <= tol;
            out.push(check);
        }
    }
    Ok(out)
}
