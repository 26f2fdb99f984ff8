//! Text form of scalars: `num/den` with terms in graded-lex order and even
//! powers of `v` written as powers of `q`.

use super::poly::MultiPoly;
use super::rat::Rat;
use super::vars::Var;
use super::{Scalar, ScalarError};
use num_integer::Integer;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn var_power(v: Var, e: i16) -> String {
    let info = v.info();
    if v == Var::V {
        let (k, r) = (e as i32).div_mod_floor(&2);
        let mut parts = Vec::new();
        match k {
            0 => {}
            1 => parts.push("q".to_string()),
            k => parts.push(format!("q^{k}")),
        }
        if r == 1 {
            parts.push("v".to_string());
        }
        return parts.join("*");
    }
    let root = info.root as i32;
    let e = e as i32;
    if root == 1 {
        if e == 1 {
            info.name
        } else {
            format!("{}^{}", info.name, e)
        }
    } else {
        let g = e.gcd(&root);
        let (n, d) = (e / g, root / g);
        if d == 1 && n == 1 {
            info.name
        } else if d == 1 {
            format!("{}^{}", info.name, n)
        } else {
            format!("{}^({}/{})", info.name, n, d)
        }
    }
}

fn format_term(m: &super::poly::Mono, c: &Rat, out: &mut String) {
    let mono: Vec<String> = m
        .0
        .iter()
        .enumerate()
        .filter(|(_, e)| **e != 0)
        .map(|(i, e)| var_power(Var(i as u8), *e))
        .collect();
    let mono = mono.join("*");
    if mono.is_empty() {
        out.push_str(&c.to_string());
    } else if c.is_one() {
        out.push_str(&mono);
    } else if *c == Rat::from_int(-1) {
        out.push('-');
        out.push_str(&mono);
    } else {
        out.push_str(&format!("{c}*{mono}"));
    }
}

pub fn format_poly(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        if i == 0 {
            format_term(m, c, &mut out);
        } else if c.is_negative() {
            out.push_str(" - ");
            format_term(m, &-c, &mut out);
        } else {
            out.push_str(" + ");
            format_term(m, c, &mut out);
        }
    }
    out
}

pub fn format_scalar(s: &Scalar) -> String {
    let num = format_poly(s.num());
    if s.den().is_one() {
        return num;
    }
    let den = format_poly(s.den());
    let num = if s.num().len() > 1 {
        format!("({num})")
    } else {
        num
    };
    let den = if s.den().len() > 1 || den.contains('*') {
        format!("({den})")
    } else {
        den
    };
    format!("{num}/{den}")
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let n = s[st..i].parse::<i64>().map_err(|_| ParseError {
                pos: st,
                msg: "integer literal too large".into(),
            })?;
            out.push((st, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((st, Tok::Ident(s[st..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError {
                pos: i,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.len)
    }

    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse(ParseError {
            pos: self.pos(),
            msg: msg.to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.try_div(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let (base, var) = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let (n, d) = self.exponent()?;
        if d == 1 {
            return if n < 0 && base.is_zero() {
                Err(ScalarError::DivisionByZero)
            } else {
                Ok(base.pow(n as i32))
            };
        }
        // Fractional powers only of a bare variable with a compatible root.
        let Some((v, scale)) = var else {
            return Err(self.err("fractional exponent needs a variable base"));
        };
        let unit = v.info().root as i64 * scale;
        if (n * unit) % d != 0 {
            return Err(self.err("fractional exponent not supported by this variable"));
        }
        let e = (n * unit / d) as i16;
        Ok(Scalar::from_poly(MultiPoly::monomial(
            super::poly::Mono::var(v, e),
            Rat::one(),
        )))
    }

    fn signed_int(&mut self) -> Result<i64, ScalarError> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.err("expected integer exponent")),
        }
    }

    fn exponent(&mut self) -> Result<(i64, i64), ScalarError> {
        if self.eat('(') {
            let n = self.signed_int()?;
            let d = if self.eat('/') { self.signed_int()? } else { 1 };
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            if d == 0 {
                return Err(ScalarError::DivisionByZero);
            }
            let g = n.gcd(&d);
            let (n, d) = (n / g, d / g);
            return Ok(if d < 0 { (-n, -d) } else { (n, d) });
        }
        Ok((self.signed_int()?, 1))
    }

    /// An atom, plus `(var, exponent scale)` when it is a bare variable.
    fn atom(&mut self) -> Result<(Scalar, Option<(Var, i64)>), ScalarError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok((Scalar::from_int(n), None))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if name == "q" {
                    return Ok((Scalar::q(), Some((Var::V, 2))));
                }
                let v = Var::named(&name)?;
                let unit = v.info().root as i16;
                let s = Scalar::from_poly(MultiPoly::monomial(
                    super::poly::Mono::var(v, unit),
                    Rat::one(),
                ));
                Ok((s, Some((v, 1))))
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok((e, None))
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}

pub fn parse_scalar(s: &str) -> Result<Scalar, ScalarError> {
    let toks = lex(s)?;
    let mut p = Parser {
        toks,
        at: 0,
        len: s.len(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
