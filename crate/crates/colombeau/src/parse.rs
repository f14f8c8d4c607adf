//! Text grammar for expressions and exact nets.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' signed-number)?
//! atom   := number | 'eps' | 'x'<index> | name '(' expr ')' | '(' expr ')'
//! name   := exp | log | sin | cos | tanh | gate
//!         | (bump | plateau) ('@' integer)?
//! ```
//!
//! Exponents are numeric literals: integral ones become integer powers,
//! anything else a real power. `bump@k` and `plateau@k` denote the k-th
//! kernel derivatives, so printed derivatives re-parse. `gate(c)` is the
//! eps-gate with threshold c. Exact nets use the same grammar restricted to
//! eps-only terms, e.g. `3*eps^-1 + 5*eps^2`.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::ExactNet;
use crate::expr::SmoothExpr;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    At,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::ParseError { pos, msg: msg.into() }
}

impl<'a> Lexer<'a> {
    fn lex(src: &'a str) -> Result<Lexer<'a>> {
        let bytes = src.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    toks.push((i, Tok::Plus));
                    i += 1;
                }
                '-' => {
                    toks.push((i, Tok::Minus));
                    i += 1;
                }
                '*' => {
                    toks.push((i, Tok::Star));
                    i += 1;
                }
                '/' => {
                    toks.push((i, Tok::Slash));
                    i += 1;
                }
                '^' => {
                    toks.push((i, Tok::Caret));
                    i += 1;
                }
                '@' => {
                    toks.push((i, Tok::At));
                    i += 1;
                }
                '(' => {
                    toks.push((i, Tok::LParen));
                    i += 1;
                }
                ')' => {
                    toks.push((i, Tok::RParen));
                    i += 1;
                }
                '0'..='9' | '.' => {
                    let start = i;
                    while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                        i += 1;
                    }
                    // Exponent suffix like 1e-3; only when digits follow.
                    if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                        let mut j = i + 1;
                        if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                            j += 1;
                        }
                        if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                            i = j;
                            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                                i += 1;
                            }
                        }
                    }
                    let text = &src[start..i];
                    let v = text
                        .parse::<f64>()
                        .map_err(|_| err(start, format!("malformed number '{text}'")))?;
                    toks.push((start, Tok::Num(v)));
                }
                'a'..='z' | 'A'..='Z' | '_' => {
                    let start = i;
                    while i < bytes.len()
                        && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                    {
                        i += 1;
                    }
                    toks.push((start, Tok::Ident(src[start..i].to_string())));
                }
                _ => return Err(err(i, format!("unexpected character '{c}'"))),
            }
        }
        Ok(Lexer { src, toks })
    }
}

struct Parser<'a> {
    lx: Lexer<'a>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.lx
            .toks
            .get(self.pos)
            .map(|&(p, _)| p)
            .unwrap_or(self.lx.src.len())
    }

    fn bump_tok(&mut self) -> Option<Tok> {
        let t = self.lx.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.here();
        match self.bump_tok() {
            Some(t) if t == want => Ok(()),
            _ => Err(err(at, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<SmoothExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = SmoothExpr::add(acc, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = SmoothExpr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SmoothExpr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = SmoothExpr::mul(acc, self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    acc = SmoothExpr::div(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SmoothExpr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(match inner {
                SmoothExpr::Const(c) => SmoothExpr::Const(-c),
                other => SmoothExpr::mul(SmoothExpr::Const(-1.0), other),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<SmoothExpr> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.here();
        let neg = if matches!(self.peek(), Some(Tok::Minus)) {
            self.pos += 1;
            true
        } else {
            false
        };
        let Some(Tok::Num(raw)) = self.bump_tok() else {
            return Err(err(at, "expected a numeric exponent after '^'"));
        };
        let p = if neg { -raw } else { raw };
        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
            Ok(SmoothExpr::powi(base, p as i32))
        } else {
            Ok(SmoothExpr::powf(base, p))
        }
    }

    fn atom(&mut self) -> Result<SmoothExpr> {
        let at = self.here();
        match self.bump_tok() {
            Some(Tok::Num(v)) => Ok(SmoothExpr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.named(at, &name),
            _ => Err(err(at, "expected a number, name, or '('")),
        }
    }

    fn named(&mut self, at: usize, name: &str) -> Result<SmoothExpr> {
        if name == "eps" {
            return Ok(SmoothExpr::Eps);
        }
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let idx: usize = rest
                    .parse()
                    .map_err(|_| err(at, format!("variable index out of range in '{name}'")))?;
                if idx == 0 {
                    return Err(err(at, "variable indices start at x1"));
                }
                return Ok(SmoothExpr::Var(idx - 1));
            }
        }
        let order = if matches!(self.peek(), Some(Tok::At)) {
            self.pos += 1;
            let oat = self.here();
            match self.bump_tok() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v >= 0.0 => Some(v as u32),
                _ => return Err(err(oat, "expected a nonnegative integer derivative order after '@'")),
            }
        } else {
            None
        };
        if order.is_some() && !matches!(name, "bump" | "plateau") {
            return Err(err(at, format!("'@' derivative orders apply only to kernels, not '{name}'")));
        }
        self.expect(Tok::LParen, format!("'(' after '{name}'").as_str())?;
        let arg = self.expr()?;
        self.expect(Tok::RParen, "')'")?;
        let e = match name {
            "exp" => SmoothExpr::Exp(Box::new(arg)),
            "log" => SmoothExpr::Log(Box::new(arg)),
            "sin" => SmoothExpr::Sin(Box::new(arg)),
            "cos" => SmoothExpr::Cos(Box::new(arg)),
            "tanh" => SmoothExpr::Tanh(Box::new(arg)),
            "bump" => SmoothExpr::Bump { order: order.unwrap_or(0), arg: Box::new(arg) },
            "plateau" => SmoothExpr::Plateau { order: order.unwrap_or(0), arg: Box::new(arg) },
            "gate" => match arg {
                SmoothExpr::Const(threshold) if threshold > 0.0 => SmoothExpr::EpsGate { threshold },
                _ => return Err(err(at, "gate takes a positive numeric threshold")),
            },
            _ => return Err(err(at, format!("unknown function '{name}'"))),
        };
        Ok(e)
    }
}

/// Parse an expression in the grammar above.
pub fn parse_expr(src: &str) -> Result<SmoothExpr> {
    let lx = Lexer::lex(src)?;
    let mut p = Parser { lx, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.lx.toks.len() {
        return Err(err(p.here(), "unexpected trailing input"));
    }
    e.check_orders()?;
    Ok(e)
}

/// Reduce a variable-free polynomial-style expression to an exact net.
fn exactify(e: &SmoothExpr) -> Result<ExactNet> {
    match e {
        SmoothExpr::Const(c) => Ok(ExactNet::constant(*c)),
        SmoothExpr::Eps => Ok(ExactNet::eps_power(1.0)),
        SmoothExpr::Add(a, b) => Ok(exactify(a)?.add(&exactify(b)?)),
        SmoothExpr::Sub(a, b) => Ok(exactify(a)?.sub(&exactify(b)?)),
        SmoothExpr::Mul(a, b) => Ok(exactify(a)?.mul(&exactify(b)?)),
        SmoothExpr::Div(a, b) => exactify(a)?.div(&exactify(b)?),
        SmoothExpr::Powi(a, n) => {
            let base = exactify(a)?;
            if *n >= 0 {
                Ok(base.powi(*n as u32))
            } else {
                ExactNet::constant(1.0).div(&base.powi(n.unsigned_abs()))
            }
        }
        SmoothExpr::Powf(a, p) => exactify(a)?.powf(*p),
        SmoothExpr::Var(_) => Err(Error::PreconditionError(
            "exact nets are eps-only; variables are not allowed".into(),
        )),
        _ => Err(Error::PreconditionError(format!(
            "'{e}' is not representable as an exact power sum in eps"
        ))),
    }
}

/// Parse the textual exact-net form, e.g. `3*eps^-1 + 5*eps^2`.
pub fn parse_exact_net(src: &str) -> Result<ExactNet> {
    exactify(&parse_expr(src)?)
}

impl FromStr for SmoothExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<SmoothExpr> {
        parse_expr(s)
    }
}

impl FromStr for ExactNet {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExactNet> {
        parse_exact_net(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_reference_forms() {
        let e: SmoothExpr = "eps^-1 * bump(x1/eps)".parse().unwrap();
        assert_eq!(
            e,
            SmoothExpr::mul(
                SmoothExpr::powi(SmoothExpr::Eps, -1),
                SmoothExpr::bump(SmoothExpr::div(SmoothExpr::var(0), SmoothExpr::Eps)),
            )
        );
        let n: ExactNet = "3*eps^-1 + 5*eps^2".parse().unwrap();
        assert_eq!(n, ExactNet::from_terms(vec![(3.0, -1.0), (5.0, 2.0)]).unwrap());
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "eps^-1 * bump(x1 / eps)",
            "(x1 + x2)^3 - tanh(x1 * eps)",
            "plateau(2 * x1 / eps) * exp(x1)",
            "5 - 2 * eps^0.5",
            "gate(0.125) * eps^2",
        ] {
            let e: SmoothExpr = src.parse().unwrap();
            let printed = e.to_string();
            let back: SmoothExpr = printed.parse().unwrap();
            assert_eq!(back, e, "printed form '{printed}'");
        }
        // Kernel derivatives print with '@' and re-parse.
        let d: SmoothExpr = "bump(x1)".parse::<SmoothExpr>().unwrap().diff(0);
        let back: SmoothExpr = d.to_string().parse().unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn exact_net_round_trip_through_display() {
        let n: ExactNet = "3*eps^-1 + 5*eps^2".parse().unwrap();
        let back: ExactNet = n.to_string().parse().unwrap();
        assert_eq!(back, n);
        let m: ExactNet = "-eps^2.5".parse().unwrap();
        let back: ExactNet = m.to_string().parse().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn error_positions_point_at_the_problem() {
        let e = parse_expr("1 + $").unwrap_err();
        assert!(matches!(e, Error::ParseError { pos: 4, .. }), "{e}");
        let e = parse_expr("bump(x1").unwrap_err();
        assert!(matches!(e, Error::ParseError { pos: 7, .. }), "{e}");
        let e = parse_expr("x0 + 1").unwrap_err();
        assert!(matches!(e, Error::ParseError { pos: 0, .. }), "{e}");
        let e = parse_expr("frob(x1)").unwrap_err();
        assert!(matches!(e, Error::ParseError { pos: 0, .. }), "{e}");
        let e = parse_expr("2 ^ x1").unwrap_err();
        assert!(matches!(e, Error::ParseError { .. }));
    }

    #[test]
    fn exactification_rejects_variables_and_kernels() {
        assert!(parse_exact_net("x1 + eps").is_err());
        assert!(parse_exact_net("bump(eps)").is_err());
        assert!(parse_exact_net("(1 + eps)^-1").is_err());
        // Monomial division is fine.
        let q = parse_exact_net("(eps^2 + eps^3) / eps").unwrap();
        assert_eq!(q, ExactNet::from_terms(vec![(1.0, 1.0), (1.0, 2.0)]).unwrap());
    }

    #[test]
    fn unary_minus_binds_tighter_than_addition() {
        let e: SmoothExpr = "-x1 + 2".parse().unwrap();
        assert_eq!(
            e,
            SmoothExpr::add(
                SmoothExpr::mul(SmoothExpr::Const(-1.0), SmoothExpr::var(0)),
                SmoothExpr::Const(2.0),
            )
        );
        let n: ExactNet = "-2*eps".parse().unwrap();
        assert_eq!(n, ExactNet::from_terms(vec![(-2.0, 1.0)]).unwrap());
    }
}
