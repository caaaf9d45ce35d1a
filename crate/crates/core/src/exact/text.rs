//! Canonical text form for [`SLaurent`] and [`KPoly`].
//!
//! Powers of `s` are written as powers of `q`, half-integer exponents in
//! parentheses: `q^(1/2)`, `q^(-3/2)`. Terms are ordered by decreasing
//! power of `K`, then of `q`. Coefficients with more than one term are
//! parenthesized: `(q + 1 + q^-1)*K^2 - K + 3`. Parsing accepts any
//! sum/product/power expression in `q`, `s` and `K` with rational literals,
//! so `s.parse::<KPoly<_>>()` inverts `to_string()` exactly.

use std::fmt::{self, Display, Write};
use std::str::FromStr;

use super::coeff::Coeff;
use super::kpoly::KPoly;
use super::laurent::SLaurent;
use crate::error::{Error, Result};

fn q_part(k: i32) -> String {
    match k {
        0 => String::new(),
        2 => "q".to_string(),
        k if k % 2 == 0 => format!("q^{}", k / 2),
        k => format!("q^({k}/2)"),
    }
}

fn coeff_str<C: Coeff>(c: &C) -> String {
    let (n, d) = c.parts();
    if d == "1" {
        n
    } else {
        format!("{n}/{d}")
    }
}

/// Signed monomial pieces: (is_negative, magnitude text).
fn monomial_pieces<C: Coeff>(c: &C, s_exp: i32, k_part: &str) -> (bool, String) {
    let neg = c.is_negative();
    let mag = c.abs();
    let q = q_part(s_exp);
    let mut factors: Vec<String> = Vec::new();
    if !mag.is_one() || (q.is_empty() && k_part.is_empty()) {
        factors.push(coeff_str(&mag));
    }
    if !q.is_empty() {
        factors.push(q);
    }
    if !k_part.is_empty() {
        factors.push(k_part.to_string());
    }
    (neg, factors.join("*"))
}

fn join_terms(out: &mut String, pieces: &[(bool, String)]) {
    if pieces.is_empty() {
        out.push('0');
        return;
    }
    for (i, (neg, t)) in pieces.iter().enumerate() {
        match (i, neg) {
            (0, true) => {
                out.push('-');
            }
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(t);
    }
}

fn laurent_pieces<C: Coeff>(a: &SLaurent<C>, k_part: &str) -> Vec<(bool, String)> {
    a.terms()
        .rev()
        .map(|(e, c)| monomial_pieces(c, e, k_part))
        .collect()
}

impl<C: Coeff> Display for SLaurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        join_terms(&mut out, &laurent_pieces(self, ""));
        f.write_str(&out)
    }
}

impl<C: Coeff> Display for KPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::new();
        for (k, a) in self.coeffs().iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let k_part = match k {
                0 => String::new(),
                1 => "K".to_string(),
                k => format!("K^{k}"),
            };
            if a.num_terms() == 1 || k == 0 {
                pieces.extend(laurent_pieces(a, &k_part));
            } else {
                let mut inner = String::new();
                join_terms(&mut inner, &laurent_pieces(a, ""));
                let mut t = String::new();
                write!(t, "({inner})*{k_part}").unwrap();
                pieces.push((false, t));
            }
        }
        let mut out = String::new();
        join_terms(&mut out, &pieces);
        f.write_str(&out)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected '{}'", b as char)))
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let start = self.pos;
        let d = self.digits()?;
        let v: i64 = d
            .parse()
            .map_err(|_| Error::parse(start, "integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn expr<C: Coeff>(&mut self) -> Result<KPoly<C>> {
        let mut acc = KPoly::zero();
        let mut first = true;
        loop {
            let neg = if self.eat(b'-') {
                true
            } else if self.eat(b'+') || first {
                false
            } else {
                break;
            };
            first = false;
            let t = self.term()?;
            if neg {
                acc -= &t;
            } else {
                acc += &t;
            }
        }
        Ok(acc)
    }

    fn term<C: Coeff>(&mut self) -> Result<KPoly<C>> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    /// Exponent of `q`, returned in units of `s`.
    fn q_exponent(&mut self) -> Result<i32> {
        if self.eat(b'(') {
            let num = self.int()?;
            let den = if self.eat(b'/') { self.int()? } else { 1 };
            self.expect(b')')?;
            match den {
                1 => Ok(2 * num as i32),
                2 => Ok(num as i32),
                _ => Err(Error::parse(self.pos, "q exponent must be a half-integer")),
            }
        } else {
            Ok(2 * self.int()? as i32)
        }
    }

    fn factor<C: Coeff>(&mut self) -> Result<KPoly<C>> {
        let start = self.pos;
        match self.peek() {
            Some(b'q') | Some(b's') => {
                let is_q = self.src[self.pos] == b'q';
                self.pos += 1;
                let unit = if is_q { 2 } else { 1 };
                let e = if self.eat(b'^') {
                    if is_q {
                        self.q_exponent()?
                    } else {
                        self.int()? as i32
                    }
                } else {
                    unit
                };
                Ok(KPoly::constant(SLaurent::s_pow(e)))
            }
            Some(b'K') => {
                self.pos += 1;
                let e = self.opt_power()?;
                Ok(KPoly::k().pow(e))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                let e = self.opt_power()?;
                Ok(inner.pow(e))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits()?;
                let mut lit = n.to_string();
                if self.eat(b'/') {
                    lit.push('/');
                    lit.push_str(self.digits()?);
                } else {
                    lit.push_str("/1");
                }
                let c = C::from_str_radix(&lit, 10)
                    .map_err(|_| Error::parse(start, format!("bad number '{lit}'")))?;
                let e = self.opt_power()?;
                Ok(KPoly::constant(SLaurent::constant(c)).pow(e))
            }
            Some(c) => Err(Error::parse(
                self.pos,
                format!("unexpected '{}'", c as char),
            )),
            None => Err(Error::parse(self.pos, "unexpected end of input")),
        }
    }

    fn opt_power(&mut self) -> Result<u32> {
        if self.eat(b'^') {
            let at = self.pos;
            let e = self.int()?;
            u32::try_from(e).map_err(|_| Error::parse(at, "exponent must be non-negative"))
        } else {
            Ok(1)
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(Error::parse(self.pos, format!("trailing '{}'", c as char))),
        }
    }
}

/// Parse a polynomial in `K` with Laurent coefficients in `q^(1/2)`.
pub fn parse_kpoly<C: Coeff>(src: &str) -> Result<KPoly<C>> {
    let mut p = Parser::new(src);
    let v = p.expr()?;
    p.finish()?;
    Ok(v)
}

impl<C: Coeff> FromStr for KPoly<C> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_kpoly(s)
    }
}

impl<C: Coeff> FromStr for SLaurent<C> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let p: KPoly<C> = parse_kpoly(s)?;
        match p.degree() {
            None => Ok(SLaurent::zero()),
            Some(0) => Ok(p.coeff(0)),
            Some(_) => Err(Error::parse(0, "K not allowed in a Laurent polynomial")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type S = SLaurent<BigRational>;
    type P = KPoly<BigRational>;

    #[test]
    fn canonical_examples() {
        let p = P::monomial(S::q_pow(-1), 2) + P::from_int(3);
        assert_eq!(p.to_string(), "q^-1*K^2 + 3");
        let x = S::q_pow(1) + S::one() + S::q_pow(-1);
        let p = P::monomial(x, 2) - P::k() + P::from_int(3);
        assert_eq!(p.to_string(), "(q + 1 + q^-1)*K^2 - K + 3");
        let h = S::s_pow(1) - S::monomial(BigRational::from_ratio(3, 4), -3);
        assert_eq!(h.to_string(), "q^(1/2) - 3/4*q^(-3/2)");
        assert_eq!(P::zero().to_string(), "0");
        assert_eq!((-P::k()).to_string(), "-K");
    }

    #[test]
    fn parses_free_form() {
        let p: P = "(K + 1)^2 * q - 2*K*q".parse().unwrap();
        let want = P::monomial(S::q_pow(1), 2) + P::constant(S::q_pow(1));
        assert_eq!(p, want);
        let h: S = "s^3 + q^(-1/2)".parse().unwrap();
        assert_eq!(h, S::s_pow(3) + S::s_pow(-1));
    }

    #[test]
    fn parse_errors() {
        assert!("q^(1/3)".parse::<P>().is_err());
        assert!("K^-1".parse::<P>().is_err());
        assert!("1 +".parse::<P>().is_err());
        assert!("K x".parse::<P>().is_err());
        assert!("K".parse::<S>().is_err());
    }
}
