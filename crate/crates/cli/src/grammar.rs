//! Text form of map expressions.
//!
//! ```text
//! expr    := name [ '(' [ arg { ',' arg } ] ')' ]
//! arg     := expr | key '=' literal
//! literal := real | real ('+' | '-') real 'i'
//! ```
//!
//! Names, keys and the `i` suffix are case-insensitive; whitespace between
//! tokens is ignored.

use std::fmt::Write as _;

use awr_core::complex::DisplayComplex;
use awr_core::{Complex, MapExpr};
use thiserror::Error;

pub const MAX_INPUT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown map name `{name}` at byte {offset}")]
    UnknownName { name: String, offset: usize },
    #[error("bad parameter `{key}`: {reason}")]
    BadParam { key: String, reason: String },
}

#[derive(Debug, Clone, Copy)]
struct Literal {
    re: f64,
    im: Option<f64>,
}

enum Arg {
    Expr(MapExpr),
    Param { key: String, value: Literal },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::SyntaxError {
        offset,
        message: message.into(),
    }
}

fn bad(key: &str, reason: impl Into<String>) -> ParseError {
    ParseError::BadParam {
        key: key.to_string(),
        reason: reason.into(),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(|b| b.is_ascii_alphabetic()) {
            return Err(match self.peek() {
                Some(b) => syntax(start, format!("expected a name, found `{}`", b as char)),
                None => syntax(start, "expected a name, found end of input"),
            });
        }
        while self
            .peek()
            .is_some_and(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
        {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok((s.to_ascii_lowercase(), start))
    }

    /// Unsigned decimal with optional fraction and exponent.
    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|b| b.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(syntax(start, "expected a number"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map_err(|e| syntax(start, format!("bad number `{text}`: {e}")))
    }

    fn signed(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let v = self.number()?;
        Ok(if neg { -v } else { v })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let re = self.signed()?;
        self.skip_ws();
        let sign = match self.peek() {
            Some(b'+') => 1.0,
            Some(b'-') => -1.0,
            _ => return Ok(Literal { re, im: None }),
        };
        self.pos += 1;
        self.skip_ws();
        let im = self.number()?;
        self.skip_ws();
        match self.peek() {
            Some(b'i' | b'I') => self.pos += 1,
            _ => return Err(syntax(self.pos, "expected `i` after the imaginary part")),
        }
        Ok(Literal {
            re,
            im: Some(sign * im),
        })
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        self.skip_ws();
        let save = self.pos;
        let (name, _) = self.ident()?;
        self.skip_ws();
        if self.peek() == Some(b'=') {
            self.pos += 1;
            let value = self.literal()?;
            return Ok(Arg::Param { key: name, value });
        }
        self.pos = save;
        Ok(Arg::Expr(self.expr()?))
    }

    fn expr(&mut self) -> Result<MapExpr, ParseError> {
        let (name, at) = self.ident()?;
        self.skip_ws();
        let mut args = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() == Some(b')') {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.arg()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(b) => {
                            return Err(syntax(
                                self.pos,
                                format!("expected `,` or `)`, found `{}`", b as char),
                            ))
                        }
                        None => return Err(syntax(self.pos, "unclosed `(`")),
                    }
                }
            }
        }
        build(&name, at, args)
    }
}

struct Args {
    inner: Vec<MapExpr>,
    params: Vec<(String, Literal)>,
}

impl Args {
    fn take(&mut self, key: &str) -> Result<Literal, ParseError> {
        let idx = self
            .params
            .iter()
            .position(|(k, _)| k == key)
            .ok_or_else(|| bad(key, "missing"))?;
        Ok(self.params.remove(idx).1)
    }

    fn real(&mut self, key: &str) -> Result<f64, ParseError> {
        let v = self.take(key)?;
        match v.im {
            None => Ok(v.re),
            Some(0.0) => Ok(v.re),
            Some(_) => Err(bad(key, "expected a real value")),
        }
    }

    fn complex(&mut self, key: &str) -> Result<Complex, ParseError> {
        let v = self.take(key)?;
        match v.im {
            Some(im) => Ok(Complex::new(v.re, im)),
            None => Err(bad(
                key,
                format!(
                    "complex literal needs a signed imaginary part, e.g. {}+0i",
                    v.re
                ),
            )),
        }
    }

    fn one_inner(&mut self, name: &str) -> Result<Box<MapExpr>, ParseError> {
        match self.inner.len() {
            1 => Ok(Box::new(self.inner.pop().unwrap())),
            0 => Err(bad(
                "map",
                format!("`{name}` needs an inner map expression"),
            )),
            _ => Err(bad(
                "map",
                format!("`{name}` takes a single inner map expression"),
            )),
        }
    }

    fn finish(self, name: &str) -> Result<(), ParseError> {
        if !self.inner.is_empty() {
            return Err(bad(
                "map",
                format!("`{name}` takes no inner map expression"),
            ));
        }
        if let Some((k, _)) = self.params.first() {
            return Err(bad(k, format!("not a parameter of `{name}`")));
        }
        Ok(())
    }
}

fn build(name: &str, at: usize, raw: Vec<Arg>) -> Result<MapExpr, ParseError> {
    let mut args = Args {
        inner: Vec::new(),
        params: Vec::new(),
    };
    for a in raw {
        match a {
            Arg::Expr(e) => args.inner.push(e),
            Arg::Param { key, value } => {
                if args.params.iter().any(|(k, _)| *k == key) {
                    return Err(bad(&key, "given twice"));
                }
                if !value.re.is_finite() || value.im.is_some_and(|v| !v.is_finite()) {
                    return Err(bad(&key, "not finite"));
                }
                args.params.push((key, value));
            }
        }
    }
    let e = match name {
        "identity" => MapExpr::Identity,
        "disk" => MapExpr::Disk { x: args.real("x")? },
        "halfplane" => MapExpr::Halfplane {
            c: args.complex("c")?,
        },
        "sector" => MapExpr::SectorReal { a: args.real("a")? },
        "strip" => MapExpr::Strip,
        "strip-shift" => MapExpr::StripShift { x: args.real("x")? },
        "mobius-of-strip" => MapExpr::MobiusOfStrip {
            a: args.complex("a")?,
        },
        "sector-auto" => MapExpr::SectorFromAutomorphism {
            a: args.complex("a")?,
        },
        "koebe" => MapExpr::Koebe {
            inner: args.one_inner(name)?,
            z0: args.complex("z0")?,
        },
        "mobius-shift" => MapExpr::MobiusShift {
            inner: args.one_inner(name)?,
        },
        "affine" => MapExpr::Affine {
            inner: args.one_inner(name)?,
            scale: args.complex("a")?,
            shift: args.complex("b")?,
        },
        _ => {
            return Err(ParseError::UnknownName {
                name: name.to_string(),
                offset: at,
            })
        }
    };
    args.finish(name)?;
    Ok(e)
}

pub fn parse_map_expr(text: &str) -> Result<MapExpr, ParseError> {
    if text.len() > MAX_INPUT {
        return Err(syntax(
            MAX_INPUT,
            format!("input longer than {MAX_INPUT} bytes"),
        ));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if let Some(b) = p.peek() {
        return Err(syntax(
            p.pos,
            format!("unexpected `{}` after expression", b as char),
        ));
    }
    Ok(e)
}

/// A standalone complex literal `a+bi` / `a-bi`.
pub fn parse_complex(text: &str) -> Result<Complex, ParseError> {
    if text.len() > MAX_INPUT {
        return Err(syntax(
            MAX_INPUT,
            format!("input longer than {MAX_INPUT} bytes"),
        ));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let lit = p.literal()?;
    p.skip_ws();
    if let Some(b) = p.peek() {
        return Err(syntax(
            p.pos,
            format!("unexpected `{}` after literal", b as char),
        ));
    }
    match lit.im {
        Some(im) if lit.re.is_finite() && im.is_finite() => Ok(Complex::new(lit.re, im)),
        Some(_) => Err(syntax(0, "literal is not finite")),
        None => Err(syntax(
            text.len(),
            format!(
                "complex literal needs a signed imaginary part, e.g. {}+0i",
                lit.re
            ),
        )),
    }
}

/// Canonical text form; parses back to an identical expression.
pub fn print_map_expr(e: &MapExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(s: &mut String, e: &MapExpr) {
    let cx = |v: &Complex| DisplayComplex(*v).to_string();
    match e {
        MapExpr::Identity => s.push_str("identity"),
        MapExpr::Disk { x } => write!(s, "disk(x={x})").unwrap(),
        MapExpr::Halfplane { c } => write!(s, "halfplane(c={})", cx(c)).unwrap(),
        MapExpr::SectorReal { a } => write!(s, "sector(a={a})").unwrap(),
        MapExpr::Strip => s.push_str("strip"),
        MapExpr::StripShift { x } => write!(s, "strip-shift(x={x})").unwrap(),
        MapExpr::MobiusOfStrip { a } => write!(s, "mobius-of-strip(a={})", cx(a)).unwrap(),
        MapExpr::SectorFromAutomorphism { a } => write!(s, "sector-auto(a={})", cx(a)).unwrap(),
        MapExpr::Koebe { inner, z0 } => {
            s.push_str("koebe(");
            write_expr(s, inner);
            write!(s, ", z0={})", cx(z0)).unwrap();
        }
        MapExpr::MobiusShift { inner } => {
            s.push_str("mobius-shift(");
            write_expr(s, inner);
            s.push(')');
        }
        MapExpr::Affine {
            inner,
            scale,
            shift,
        } => {
            s.push_str("affine(");
            write_expr(s, inner);
            write!(s, ", A={}, B={})", cx(scale), cx(shift)).unwrap();
        }
    }
}
