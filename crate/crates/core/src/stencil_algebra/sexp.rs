//! Plain-text S-expression form of [`DiffPoly`].
//!
//! Canonical output is a sum of products:
//!
//! ```text
//! (+ (* -1 U[0,-1] (^ h -2)) (* 2 U[0,0] (^ h -2)) (* 1/3 t))
//! ```
//!
//! Zero prints as `(+)`. The parser also accepts nested `+`, `-`, `*`, `^`
//! forms, so hand-written inputs need not be expanded.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::poly::{DiffPoly, Rational};
use super::var::{Monomial, Var};
use super::AlgebraError;

pub fn to_sexp(p: &DiffPoly) -> String {
    let mut out = String::from("(+");
    for (m, c) in p.terms() {
        out.push_str(" (* ");
        out.push_str(&c.to_string());
        for (v, e) in m.factors() {
            if *e == 1 {
                out.push_str(&format!(" {v}"));
            } else {
                out.push_str(&format!(" (^ {v} {e})"));
            }
        }
        out.push(')');
    }
    out.push(')');
    out
}

/// One polynomial per line, blank lines and `;` comments skipped.
pub fn to_sexp_lines(ps: &[DiffPoly]) -> String {
    ps.iter().map(|p| to_sexp(p) + "\n").collect()
}

pub fn from_sexp(s: &str) -> Result<DiffPoly, AlgebraError> {
    let tokens = tokenize(s)?;
    let mut pos = 0;
    let p = parse_expr(&tokens, &mut pos, s.len())?;
    if let Some(tok) = tokens.get(pos) {
        return Err(AlgebraError::Parse { pos: tok.pos, msg: format!("trailing input `{}`", tok.text) });
    }
    Ok(p)
}

pub fn from_sexp_lines(s: &str) -> Result<Vec<DiffPoly>, AlgebraError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in s.split_inclusive('\n') {
        let body = line.split(';').next().unwrap_or("").trim();
        if !body.is_empty() {
            out.push(from_sexp(body).map_err(|e| match e {
                AlgebraError::Parse { pos, msg } => AlgebraError::Parse { pos: pos + offset, msg },
                other => other,
            })?);
        }
        offset += line.len();
    }
    Ok(out)
}

#[derive(Debug)]
struct Token<'a> {
    text: &'a str,
    pos: usize,
}

fn tokenize(s: &str) -> Result<Vec<Token<'_>>, AlgebraError> {
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'(' || c == b')' {
            out.push(Token { text: &s[i..i + 1], pos: i });
            i += 1;
        } else {
            let start = i;
            let mut depth = 0;
            while i < bytes.len() {
                let b = bytes[i];
                if b == b'[' {
                    depth += 1;
                } else if b == b']' {
                    depth -= 1;
                } else if depth == 0 && (b.is_ascii_whitespace() || b == b'(' || b == b')') {
                    break;
                }
                i += 1;
            }
            if depth != 0 {
                return Err(AlgebraError::Parse { pos: start, msg: "unbalanced brackets".into() });
            }
            out.push(Token { text: &s[start..i], pos: start });
        }
    }
    Ok(out)
}

fn parse_expr(tokens: &[Token], pos: &mut usize, end: usize) -> Result<DiffPoly, AlgebraError> {
    let Some(tok) = tokens.get(*pos) else {
        return Err(AlgebraError::Parse { pos: end, msg: "unexpected end of input".into() });
    };
    *pos += 1;
    match tok.text {
        ")" => Err(AlgebraError::Parse { pos: tok.pos, msg: "unexpected `)`".into() }),
        "(" => {
            let Some(head) = tokens.get(*pos) else {
                return Err(AlgebraError::Parse { pos: end, msg: "unexpected end of input".into() });
            };
            *pos += 1;
            let mut args = Vec::new();
            let mut exponent = None;
            loop {
                match tokens.get(*pos) {
                    None => return Err(AlgebraError::Parse { pos: end, msg: "missing `)`".into() }),
                    Some(t) if t.text == ")" => {
                        *pos += 1;
                        break;
                    }
                    Some(t) if head.text == "^" && args.len() == 1 => {
                        let e: i32 = t.text.parse().map_err(|_| AlgebraError::Parse {
                            pos: t.pos,
                            msg: format!("exponent `{}` is not an integer", t.text),
                        })?;
                        exponent = Some((e, t.pos));
                        *pos += 1;
                    }
                    Some(_) => args.push(parse_expr(tokens, pos, end)?),
                }
            }
            apply(head, args, exponent)
        }
        text => atom(text, tok.pos),
    }
}

fn apply(head: &Token, args: Vec<DiffPoly>, exponent: Option<(i32, usize)>) -> Result<DiffPoly, AlgebraError> {
    match head.text {
        "+" => Ok(args.iter().fold(DiffPoly::zero(), |acc, a| &acc + a)),
        "*" => Ok(args.iter().fold(DiffPoly::one(), |acc, a| &acc * a)),
        "-" => match args.len() {
            1 => Ok(-&args[0]),
            0 => Err(AlgebraError::Parse { pos: head.pos, msg: "`-` needs an argument".into() }),
            _ => Ok(args[1..].iter().fold(args[0].clone(), |acc, a| &acc - a)),
        },
        "^" => {
            let (Some(base), Some((e, epos))) = (args.first(), exponent) else {
                return Err(AlgebraError::Parse { pos: head.pos, msg: "`^` needs a base and an exponent".into() });
            };
            if args.len() != 1 {
                return Err(AlgebraError::Parse { pos: head.pos, msg: "`^` takes one base".into() });
            }
            if e >= 0 {
                return Ok(base.pow(e as u32));
            }
            // Negative powers exist only for single step monomials.
            let mut terms = base.terms();
            match (terms.next(), terms.next()) {
                (Some((m, c)), None) if c.is_one() && m.factors().iter().all(|(v, _)| v.allows_negative()) => {
                    let pairs = m.factors().iter().map(|(v, k)| (v.clone(), k * e));
                    let mono = Monomial::from_pairs(pairs).expect("steps admit negative exponents");
                    Ok(DiffPoly::term(Rational::one(), mono))
                }
                _ => Err(AlgebraError::Parse {
                    pos: epos,
                    msg: "negative exponents are allowed only on h and tau".into(),
                }),
            }
        }
        other => Err(AlgebraError::Parse { pos: head.pos, msg: format!("unknown operator `{other}`") }),
    }
}

fn atom(text: &str, pos: usize) -> Result<DiffPoly, AlgebraError> {
    let err = |msg: String| AlgebraError::Parse { pos, msg };
    let first = text.as_bytes()[0];
    if first.is_ascii_digit() || ((first == b'-' || first == b'+') && text.len() > 1) {
        return parse_rational(text).map(DiffPoly::constant).ok_or_else(|| err(format!("bad number `{text}`")));
    }
    if let Some(inner) = text.strip_prefix("U[").and_then(|r| r.strip_suffix(']')) {
        let mut parts = inner.split(',');
        let (Some(k), Some(l), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("bad grid value `{text}`")));
        };
        let k: i32 = k.trim().parse().map_err(|_| err(format!("bad time offset in `{text}`")))?;
        let l: i32 = l.trim().parse().map_err(|_| err(format!("bad space offset in `{text}`")))?;
        return Ok(DiffPoly::grid(k, l));
    }
    let var = match text {
        "t" => Var::T,
        "x" => Var::X,
        "h" => Var::H,
        "tau" => Var::Tau,
        _ if text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && first.is_ascii_alphabetic() => {
            Var::Aux(text.to_string())
        }
        _ => return Err(err(format!("bad symbol `{text}`"))),
    };
    Ok(DiffPoly::var(var))
}

fn parse_rational(text: &str) -> Option<Rational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_positive() || d.is_negative() {
                Some(Rational::new(n, d))
            } else {
                None
            }
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stencil_algebra::notation::{utt, uxx};

    #[test]
    fn zero_and_round_trip() {
        assert_eq!(to_sexp(&DiffPoly::zero()), "(+)");
        assert_eq!(from_sexp("(+)").unwrap(), DiffPoly::zero());
        let w = &utt() - &uxx();
        assert_eq!(from_sexp(&to_sexp(&w)).unwrap(), w);
    }

    #[test]
    fn nested_forms() {
        let p = from_sexp("(* (^ h -1) (- U[0,1] U[0,0]))").unwrap();
        assert_eq!(p, crate::stencil_algebra::notation::ux());
        let q = from_sexp("(+ (* 1/2 eps lam) (^ x 2))").unwrap();
        assert_eq!(to_sexp(&q), "(+ (* 1 (^ x 2)) (* 1/2 eps lam))");
    }

    #[test]
    fn errors_carry_positions() {
        match from_sexp("(+ U[0,1] (^ x -1))") {
            Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 15),
            other => panic!("{other:?}"),
        }
        assert!(matches!(from_sexp("(+ 1"), Err(AlgebraError::Parse { .. })));
        assert!(matches!(from_sexp("(% 1 2)"), Err(AlgebraError::Parse { .. })));
        assert!(matches!(from_sexp("1/0"), Err(AlgebraError::Parse { .. })));
    }
}
