//! Parser for the expression grammar: complex literals `a+bi`, variable `z`,
//! `+ - * /`, integer powers `^k`, `exp(...)`, `moebius(a; ...)`,
//! `cover_pdisc(...)`, `cover_annulus(r; ...)`. Whitespace insignificant.

use crate::expr::HoloExpr;
use crate::{Error, Result, C};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, bool), // value, imaginary?
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Semi,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let b = self.src[self.pos];
        let tok = match b {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b';' => {
                self.pos += 1;
                Tok::Semi
            }
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                let mut seen_e = false;
                while end < self.src.len() {
                    let c = self.src[end];
                    let take = c.is_ascii_digit()
                        || c == b'.'
                        || c == b'e'
                        || c == b'E'
                        || ((c == b'+' || c == b'-')
                            && seen_e
                            && end > self.pos
                            && (self.src[end - 1] == b'e' || self.src[end - 1] == b'E'));
                    if !take {
                        break;
                    }
                    if c == b'e' || c == b'E' {
                        if seen_e {
                            break;
                        }
                        seen_e = true;
                    }
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                let val: f64 = text.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: format!("bad numeric literal `{text}`"),
                })?;
                self.pos = end;
                let imag = self.pos < self.src.len() && self.src[self.pos] == b'i';
                if imag {
                    self.pos += 1;
                }
                Tok::Num(val, imag)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
                self.pos = end;
                Tok::Ident(name)
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected byte `{}`", other as char),
                })
            }
        };
        Ok((tok, start))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn pos(&self) -> usize {
        self.toks[self.idx].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(Error::Parse {
                pos: self.pos(),
                msg: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<HoloExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = fold_sum(acc, self.term()?, false)?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = fold_sum(acc, self.term()?, true)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<HoloExpr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = fold_prod(acc, self.unary()?)?;
                }
                Tok::Slash => {
                    self.bump();
                    acc = fold_quot(acc, self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<HoloExpr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return match constant_of(&inner) {
                Some(c) => HoloExpr::constant(-c),
                None => HoloExpr::affine(C::new(-1.0, 0.0), C::new(0.0, 0.0), inner),
            };
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<HoloExpr> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Tok::Num(v, false) if v >= 0.0 && v.fract() == 0.0 && v <= 1024.0 => {
                    base = HoloExpr::powi(base, v as u32);
                }
                _ => {
                    return Err(Error::Parse {
                        pos,
                        msg: "exponent must be an integer in 0..=1024".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<HoloExpr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v, true) => HoloExpr::constant(C::new(0.0, v)),
            Tok::Num(v, false) => HoloExpr::constant(C::new(v, 0.0)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(HoloExpr::var()),
                "i" => HoloExpr::constant(C::new(0.0, 1.0)),
                "exp" => {
                    self.expect(Tok::LParen, "`(` after exp")?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(HoloExpr::exp(inner))
                }
                "moebius" => {
                    self.expect(Tok::LParen, "`(` after moebius")?;
                    let a = self.constant_arg("moebius parameter")?;
                    self.expect(Tok::Semi, "`;` between moebius parameter and argument")?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    HoloExpr::moebius(a, inner)
                }
                "cover_pdisc" => {
                    self.expect(Tok::LParen, "`(` after cover_pdisc")?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    HoloExpr::cover_pdisc(inner)
                }
                "cover_annulus" => {
                    self.expect(Tok::LParen, "`(` after cover_annulus")?;
                    let r = self.constant_arg("annulus radius")?;
                    if r.im != 0.0 {
                        return Err(Error::Parse {
                            pos,
                            msg: "annulus radius must be real".into(),
                        });
                    }
                    self.expect(Tok::Semi, "`;` between radius and argument")?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    HoloExpr::cover_annulus(r.re, inner)
                }
                other => Err(Error::UnknownIdentifier {
                    name: other.to_string(),
                    pos,
                }),
            },
            _ => Err(Error::Parse {
                pos,
                msg: "expected a literal, `z`, `(` or a function".into(),
            }),
        }
    }

    fn constant_arg(&mut self, what: &str) -> Result<C> {
        let pos = self.pos();
        let e = self.expr()?;
        if e.contains_var() {
            return Err(Error::Parse {
                pos,
                msg: format!("{what} must be constant"),
            });
        }
        e.eval_value(C::new(0.0, 0.0))
    }
}

fn constant_of(e: &HoloExpr) -> Option<C> {
    match e.node() {
        crate::expr::Node::Const(c) => Some(*c),
        _ => None,
    }
}

fn fold_sum(a: HoloExpr, b: HoloExpr, negate: bool) -> Result<HoloExpr> {
    if let (Some(x), Some(y)) = (constant_of(&a), constant_of(&b)) {
        return HoloExpr::constant(if negate { x - y } else { x + y });
    }
    Ok(if negate {
        HoloExpr::diff(a, b)
    } else {
        HoloExpr::sum(a, b)
    })
}

fn fold_prod(a: HoloExpr, b: HoloExpr) -> Result<HoloExpr> {
    if let (Some(x), Some(y)) = (constant_of(&a), constant_of(&b)) {
        return HoloExpr::constant(x * y);
    }
    Ok(HoloExpr::prod(a, b))
}

fn fold_quot(a: HoloExpr, b: HoloExpr) -> Result<HoloExpr> {
    if let (Some(x), Some(y)) = (constant_of(&a), constant_of(&b)) {
        if y.norm() == 0.0 {
            return Err(Error::Degenerate("division by zero constant".into()));
        }
        return HoloExpr::constant(x / y);
    }
    HoloExpr::quot(a, b)
}

/// Parse an expression.
pub fn parse(text: &str) -> Result<HoloExpr> {
    let mut lx = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let t = lx.next()?;
        let end = t.0 == Tok::End;
        toks.push(t);
        if end {
            break;
        }
    }
    let mut p = Parser { toks, idx: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(Error::Parse {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

/// Parse a complex literal such as `0.5`, `-0.4+0.3i`, `1.2i`.
pub fn parse_complex(text: &str) -> Result<C> {
    let e = parse(text)?;
    if e.contains_var() {
        return Err(Error::Parse {
            pos: 0,
            msg: "expected a constant".into(),
        });
    }
    e.eval_value(C::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetOrder;
    use crate::sample;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn variable_jet() {
        let f = parse("z").unwrap();
        let j = f.eval_jet(c(3.0, 0.0), JetOrder::First).unwrap();
        assert_eq!(j.value, c(3.0, 0.0));
        assert_eq!(j.d1, c(1.0, 0.0));
    }

    #[test]
    fn pdisc_formula() {
        let f = parse("exp(-(1+z)/(1-z))").unwrap();
        let v = f.eval_value(c(0.0, 0.0)).unwrap();
        assert!((v.re - 0.367_879_441_171_442_33).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn product_jet() {
        let f = parse("(1+z)*(1-0.5*z)").unwrap();
        let j = f.eval_jet(c(0.0, 0.0), JetOrder::First).unwrap();
        assert!((j.value - c(1.0, 0.0)).norm() < 1e-15);
        assert!((j.d1 - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.0+0.5i").unwrap(), c(0.0, 0.5));
        assert_eq!(parse_complex("-0.4+0.3i").unwrap(), c(-0.4, 0.3));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("1e-3").unwrap(), c(1e-3, 0.0));
    }

    #[test]
    fn errors_carry_positions() {
        match parse("exp(w)") {
            Err(Error::UnknownIdentifier { name, pos }) => {
                assert_eq!(name, "w");
                assert_eq!(pos, 4);
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
        assert!(parse("1 + ").is_err());
        assert!(parse("z^-2").is_err());
        assert!(parse("moebius(z; z)").is_err());
    }

    #[test]
    fn functions_parse() {
        let f = parse("moebius(0.5; z)").unwrap();
        assert!((f.eval_value(c(0.5, 0.0)).unwrap()).norm() < 1e-15);
        let g = parse("cover_annulus(0.3; z)").unwrap();
        let v = g.eval_value(c(0.0, 0.0)).unwrap();
        assert!((v.re - 0.3f64.sqrt()).abs() < 1e-14);
        assert!(parse("cover_annulus(1.5; z)").is_err());
    }

    #[test]
    fn render_round_trips_on_jets() {
        let sources = [
            "z",
            "exp(-(1+z)/(1-z))",
            "(1+z)*(1-0.5*z)^3",
            "moebius(0.2+0.1i; 0.7*z)",
            "cover_annulus(0.3; 0.9*z)",
            "0.5*z+0.25-0.1i",
            "(z+0.1)/(2+z)",
        ];
        for src in sources {
            let f = parse(src).unwrap();
            let g = parse(&f.render()).unwrap_or_else(|e| panic!("re-parse `{}`: {e}", f.render()));
            let r = 0.45 * f.region_radius().min(g.region_radius()).min(2.0);
            for z in sample::disc_points(5, 40, r) {
                let a = f.eval_jet(z, JetOrder::Second).unwrap();
                let b = g.eval_jet(z, JetOrder::Second).unwrap();
                assert!((a.value - b.value).norm() < 1e-12, "{src}");
                assert!((a.d1 - b.d1).norm() < 1e-12, "{src}");
            }
        }
    }
}
