//! Audit of hand-transcribed block displays against the coproduct.
//!
//! The construction never reads these displays; they are compared term by
//! term and every disagreement is reported.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use super::{build_t, MonodromyBlocks, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::exact::KPoly;
use crate::matrix::PolyMatrix;

/// The bundled transcription.
pub const DISPLAYS: &str = include_str!("../../data/displays.txt");

type P = KPoly<BigRational>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Ref {
    /// `t_kj` at order r, `j` implicit.
    Row(usize),
    /// `t_kl` at order r.
    Block(usize, usize),
    /// Tensor product of matrix units.
    Units(Vec<(usize, usize)>),
    Swap,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    /// Entry label as written in the data, e.g. `2,1`.
    pub entry: String,
    /// Which block or matrix unit the coefficient multiplies.
    pub term: String,
    pub displayed: String,
    pub derived: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionAudit {
    pub header: String,
    pub entries_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl SectionAudit {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn parse_ref(s: &str, line: usize) -> Result<Ref> {
    let s = s.trim();
    if s == "P" {
        return Ok(Ref::Swap);
    }
    let nums = |inner: &str| -> Result<Vec<usize>> {
        inner
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(line, format!("bad index in '{s}'")))
            })
            .collect()
    };
    if let Some(inner) = s.strip_prefix("t[").and_then(|x| x.strip_suffix(']')) {
        let v = nums(inner)?;
        return match v.as_slice() {
            [k] => Ok(Ref::Row(*k)),
            [k, l] => Ok(Ref::Block(*k, *l)),
            _ => Err(Error::parse(line, format!("bad block reference '{s}'"))),
        };
    }
    let mut units = Vec::new();
    for piece in s.split("E[").skip(1) {
        let inner = piece
            .trim()
            .strip_suffix(']')
            .ok_or_else(|| Error::parse(line, format!("bad unit '{s}'")))?;
        match nums(inner)?.as_slice() {
            [a, b] => units.push((*a, *b)),
            _ => return Err(Error::parse(line, format!("bad unit '{s}'"))),
        }
    }
    if units.is_empty() {
        return Err(Error::parse(line, format!("unknown reference '{s}'")));
    }
    Ok(Ref::Units(units))
}

/// Split at top-level `+`/`-`, keeping the sign with each term.
fn split_terms(expr: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    let mut prev = ' ';
    for ch in expr.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (ch == '+' || ch == '-') && prev != '^' && prev != '*' {
            if !cur.trim().is_empty() {
                out.push((neg, cur.trim().to_string()));
            }
            cur.clear();
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev = ch;
        }
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur.trim().to_string()));
    }
    out
}

fn parse_entry(expr: &str, line: usize) -> Result<BTreeMap<Ref, P>> {
    let mut acc: BTreeMap<Ref, P> = BTreeMap::new();
    for (neg, term) in split_terms(expr) {
        let at = term
            .find(['t', 'E', 'P'])
            .ok_or_else(|| Error::parse(line, format!("term '{term}' has no block reference")))?;
        let r = parse_ref(&term[at..], line)?;
        let coef_src = term[..at].trim().trim_end_matches('*').trim();
        let mut coef: P = if coef_src.is_empty() {
            P::one()
        } else {
            coef_src.parse()?
        };
        if neg {
            coef = -coef;
        }
        let slot = acc.entry(r).or_default();
        *slot += &coef;
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(acc)
}

fn parse_pair(s: &str, line: usize) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::parse(line, format!("bad entry label '{s}'")))?;
    let p = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| Error::parse(line, format!("bad entry label '{s}'")))
    };
    Ok((p(a)?, p(b)?))
}

struct Section {
    header: String,
    kind: String,
    n: usize,
    row: Option<usize>,
    entries: Vec<(String, usize, String)>,
}

fn sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(h) = trimmed.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let mut words = h.split_whitespace();
            let kind = words.next().unwrap_or("").to_string();
            let mut n = None;
            let mut row = None;
            for w in words {
                if let Some(v) = w.strip_prefix("N=") {
                    n = v.parse().ok();
                } else if let Some(v) = w.strip_prefix("i=") {
                    row = v.parse().ok();
                }
            }
            let n = n.ok_or_else(|| Error::parse(ln, "section header needs N="))?;
            out.push(Section {
                header: h.to_string(),
                kind,
                n,
                row,
                entries: Vec::new(),
            });
            continue;
        }
        let sec = out
            .last_mut()
            .ok_or_else(|| Error::parse(ln, "entry outside a section"))?;
        let continuation = raw.starts_with(char::is_whitespace);
        if sec.kind == "tensor2" {
            if sec.entries.is_empty() {
                sec.entries.push(("all".into(), ln, String::new()));
            }
            let e = sec.entries.last_mut().unwrap();
            e.2.push(' ');
            e.2.push_str(trimmed);
        } else if continuation && !sec.entries.is_empty() {
            let e = sec.entries.last_mut().unwrap();
            e.2.push(' ');
            e.2.push_str(trimmed);
        } else {
            let (label, expr) = trimmed
                .split_once(':')
                .ok_or_else(|| Error::parse(ln, "expected 'a,b: expression'"))?;
            sec.entries
                .push((label.trim().to_string(), ln, expr.trim().to_string()));
        }
    }
    Ok(out)
}

fn fmt_ref(r: &Ref) -> String {
    match r {
        Ref::Row(k) => format!("t[{k}]"),
        Ref::Block(k, l) => format!("t[{k},{l}]"),
        Ref::Units(u) => u.iter().map(|(a, b)| format!("E[{a},{b}]")).collect(),
        Ref::Swap => "P".into(),
    }
}

fn compare(
    entry: &str,
    displayed: &BTreeMap<Ref, P>,
    derived: &BTreeMap<Ref, P>,
    out: &mut Vec<Mismatch>,
) {
    let keys: std::collections::BTreeSet<&Ref> = displayed.keys().chain(derived.keys()).collect();
    for k in keys {
        let d = displayed.get(k).cloned().unwrap_or_default();
        let e = derived.get(k).cloned().unwrap_or_default();
        if d != e {
            out.push(Mismatch {
                entry: entry.to_string(),
                term: fmt_ref(k),
                displayed: d.to_string(),
                derived: e.to_string(),
            });
        }
    }
}

fn units_matrix(
    n: usize,
    terms: &BTreeMap<Ref, P>,
    line: usize,
) -> Result<PolyMatrix<BigRational>> {
    let dim = match terms.keys().next() {
        Some(Ref::Units(u)) => n.pow(u.len() as u32),
        Some(Ref::Swap) => n * n,
        _ => n,
    };
    let mut m = PolyMatrix::zero(dim);
    for (r, c) in terms {
        match r {
            Ref::Units(u) => {
                let (mut row, mut col) = (0, 0);
                for (a, b) in u {
                    if *a == 0 || *b == 0 || *a > n || *b > n {
                        return Err(Error::parse(line, "matrix unit index out of range"));
                    }
                    row = row * n + a - 1;
                    col = col * n + b - 1;
                }
                if row >= dim || col >= dim {
                    return Err(Error::parse(line, "mixed tensor orders"));
                }
                m.add_entry(row, col, c);
            }
            Ref::Swap => {
                let swap = crate::braid::build_swap::<BigRational>(n).scale(c);
                m = m.add(&swap);
            }
            _ => return Err(Error::parse(line, "expected matrix units")),
        }
    }
    Ok(m)
}

fn matrix_as_units(n: usize, order: usize, m: &PolyMatrix<BigRational>) -> BTreeMap<Ref, P> {
    let mut out = BTreeMap::new();
    for (r, c, v) in m.entries() {
        let mut u = Vec::with_capacity(order);
        let (mut rr, mut cc) = (r, c);
        for _ in 0..order {
            u.push((rr % n + 1, cc % n + 1));
            rr /= n;
            cc /= n;
        }
        u.reverse();
        out.insert(Ref::Units(u), v.clone());
    }
    out
}

fn audit_section(sec: &Section) -> Result<SectionAudit> {
    let n = sec.n;
    let t1 = MonodromyBlocks::<BigRational>::fundamental(n)?;
    let mut mismatches = Vec::new();
    let mut checked = 0;
    let site = |i: usize, k: usize, a: usize, b: usize| t1.block(i, k).get(a, b);
    match sec.kind.as_str() {
        "t1" => {
            for (label, ln, expr) in &sec.entries {
                let (i, k) = parse_pair(label, *ln)?;
                let shown = units_matrix(n, &parse_entry(expr, *ln)?, *ln)?;
                compare(
                    label,
                    &matrix_as_units(n, 1, &shown),
                    &matrix_as_units(n, 1, t1.block(i - 1, k - 1)),
                    &mut mismatches,
                );
                checked += 1;
            }
        }
        "recursion" => {
            let i = sec
                .row
                .ok_or_else(|| Error::parse(0, "recursion section needs i="))?
                - 1;
            let mut shown: BTreeMap<(usize, usize), BTreeMap<Ref, P>> = BTreeMap::new();
            for (label, ln, expr) in &sec.entries {
                shown.insert(parse_pair(label, *ln)?, parse_entry(expr, *ln)?);
            }
            for a in 0..n {
                for b in 0..n {
                    let mut derived = BTreeMap::new();
                    for k in 0..n {
                        let v = site(i, k, a, b);
                        if !v.is_zero() {
                            derived.insert(Ref::Row(k + 1), v);
                        }
                    }
                    let disp = shown.remove(&(a + 1, b + 1)).unwrap_or_default();
                    compare(
                        &format!("{},{}", a + 1, b + 1),
                        &disp,
                        &derived,
                        &mut mismatches,
                    );
                    checked += 1;
                }
            }
        }
        "step" => {
            let mut shown: BTreeMap<(usize, usize), BTreeMap<Ref, P>> = BTreeMap::new();
            for (label, ln, expr) in &sec.entries {
                shown.insert(parse_pair(label, *ln)?, parse_entry(expr, *ln)?);
            }
            for a in 0..n {
                for b in 0..n {
                    // coefficient of t_kl is t1_lk[a, b]
                    let mut derived = BTreeMap::new();
                    for k in 0..n {
                        for l in 0..n {
                            let v = site(l, k, a, b);
                            if !v.is_zero() {
                                derived.insert(Ref::Block(k + 1, l + 1), v);
                            }
                        }
                    }
                    let disp = shown.remove(&(a + 1, b + 1)).unwrap_or_default();
                    compare(
                        &format!("{},{}", a + 1, b + 1),
                        &disp,
                        &derived,
                        &mut mismatches,
                    );
                    checked += 1;
                }
            }
        }
        "tensor2" => {
            let (_, ln, expr) = sec
                .entries
                .first()
                .ok_or_else(|| Error::parse(0, "empty tensor2 section"))?;
            let shown = units_matrix(n, &parse_entry(expr, *ln)?, *ln)?;
            let t2 = build_t::<BigRational>(n, 2, DEFAULT_CAP)?;
            compare(
                "T2",
                &matrix_as_units(n, 2, &shown),
                &matrix_as_units(n, 2, &t2.matrix),
                &mut mismatches,
            );
            checked = t2.matrix.nnz().max(shown.nnz());
        }
        other => return Err(Error::parse(0, format!("unknown section kind '{other}'"))),
    }
    Ok(SectionAudit {
        header: sec.header.clone(),
        entries_checked: checked,
        mismatches,
    })
}

/// Audit every section of a display transcription.
pub fn audit_displays(text: &str) -> Result<Vec<SectionAudit>> {
    sections(text)?.iter().map(audit_section).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section<'a>(audits: &'a [SectionAudit], header: &str) -> &'a SectionAudit {
        audits.iter().find(|a| a.header == header).unwrap()
    }

    #[test]
    fn terms_split_at_top_level_only() {
        let t = split_terms("(1 + q^-1*K)*t[1] - K*t[3] + q^(-1/2)*K*t[2]");
        assert_eq!(t.len(), 3);
        assert!(t[1].0);
        assert_eq!(t[0].1, "(1 + q^-1*K)*t[1]");
    }

    #[test]
    fn three_state_displays_agree() {
        let audits = audit_displays(DISPLAYS).unwrap();
        for h in [
            "t1 N=3 matrices",
            "recursion N=3 i=1",
            "recursion N=3 i=2",
            "recursion N=3 i=3",
            "step N=3",
        ] {
            let a = section(&audits, h);
            assert!(a.passed(), "{h}: {:?}", a.mismatches);
        }
    }

    #[test]
    fn four_state_list_agrees() {
        let audits = audit_displays(DISPLAYS).unwrap();
        assert!(section(&audits, "t1 N=4 list").passed());
    }

    #[test]
    fn four_state_recursion_typo_is_reported() {
        let audits = audit_displays(DISPLAYS).unwrap();
        let a = section(&audits, "t1 N=4 recursion");
        assert_eq!(a.mismatches.len(), 1);
        let m = &a.mismatches[0];
        assert_eq!((m.entry.as_str(), m.term.as_str()), ("3,4", "E[4,3]"));
        assert_eq!((m.displayed.as_str(), m.derived.as_str()), ("K", "1"));
    }

    #[test]
    fn four_state_step_typos_are_reported() {
        let audits = audit_displays(DISPLAYS).unwrap();
        let a = section(&audits, "step N=4");
        let got: Vec<(&str, &str, &str, &str)> = a
            .mismatches
            .iter()
            .map(|m| {
                (
                    m.entry.as_str(),
                    m.term.as_str(),
                    m.displayed.as_str(),
                    m.derived.as_str(),
                )
            })
            .collect();
        assert_eq!(
            got,
            vec![
                ("1,3", "t[2,4]", "0", "q^-1*K"),
                ("1,3", "t[3,4]", "q^-1*K", "0"),
                ("2,1", "t[4,3]", "K", "q*K"),
            ]
        );
    }

    #[test]
    fn four_state_two_site_expansion_misses_the_middle_exchange() {
        let audits = audit_displays(DISPLAYS).unwrap();
        let a = section(&audits, "tensor2 N=4");
        let got: Vec<(&str, &str, &str)> = a
            .mismatches
            .iter()
            .map(|m| (m.term.as_str(), m.displayed.as_str(), m.derived.as_str()))
            .collect();
        assert_eq!(
            got,
            vec![
                ("E[2,3]E[3,2]", "K^2 + 1", "K^2 + 2*K + 1"),
                ("E[3,2]E[2,3]", "K^2 + 1", "K^2 + 2*K + 1"),
            ]
        );
    }

    #[test]
    fn bad_input_is_a_parse_error() {
        assert!(audit_displays("1,1: t[1]").is_err());
        assert!(audit_displays("[t1 N=3]\n1,1: E[1,1] + K*X").is_err());
    }
}
