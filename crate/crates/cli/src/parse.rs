//! System-file and expression parsing.
//!
//! ```text
//! field: QQ              # or: field: Fp 1000003
//! vars: x, y
//! monoid: true
//! gen: x, x + y
//! point p: 2, 0
//! ```
//!
//! Expressions: integers, variables, `+ - * / ^`, parentheses, unary minus.
//! `^` binds tightest and takes a non-negative integer literal; chains like
//! `x^2^3` must be parenthesized.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use orbit_core::dynsys::{SelfMap, SemigroupSpec};
use orbit_core::{Field, FieldElem, Point, Poly, RatFunc};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, col, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Op(c) => write!(f, "'{c}'"),
        }
    }
}

/// Tokens with their 1-based column.
fn lex(src: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push((Tok::Int(digits.parse().expect("ascii digits")), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(ParseError::new(line, col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
    vars: &'a [String],
    field: Field,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Op('/')) {
                let op_col = self.col();
                self.pos += 1;
                let rhs = self.unary()?;
                acc = acc
                    .div(&rhs)
                    .map_err(|_| ParseError::new(self.line, op_col, "denominator is identically zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ParseError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = match self.peek() {
            Some(Tok::Int(n)) => n.to_u32().ok_or_else(|| self.err("exponent too large"))?,
            Some(Tok::Op('-')) => return Err(self.err("negative exponents are not allowed")),
            _ => return Err(self.err("exponent must be a non-negative integer literal")),
        };
        self.pos += 1;
        if self.peek() == Some(&Tok::Op('^')) {
            return Err(self.err("chained '^'; use parentheses"));
        }
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(RatFunc::constant(self.field, n, self.field.from_bigint(&v)))
            }
            Some(Tok::Ident(name)) => {
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| self.err(format!("unknown identifier '{name}'")))?;
                self.pos += 1;
                Ok(RatFunc::var(self.field, n, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(t) => Err(self.err(format!("unexpected {t}"))),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

fn parse_expr_at(
    toks: &[(Tok, usize)],
    line: usize,
    end_col: usize,
    vars: &[String],
    field: Field,
) -> Result<RatFunc, ParseError> {
    let mut p = ExprParser { toks, pos: 0, line, end_col, vars, field };
    let f = p.expr()?;
    if p.pos < toks.len() {
        return Err(p.err(format!("unexpected {}", toks[p.pos].0)));
    }
    Ok(f)
}

/// Parses a single expression over `vars`.
pub fn parse_expr(src: &str, vars: &[String], field: Field) -> Result<RatFunc, ParseError> {
    let toks = lex(src, 1, 1)?;
    parse_expr_at(&toks, 1, src.chars().count() + 1, vars, field)
}

/// Parses a polynomial expression (rejects proper fractions).
pub fn parse_poly(src: &str, vars: &[String], field: Field) -> Result<Poly, ParseError> {
    let f = parse_expr(src, vars, field)?;
    f.as_poly().cloned().ok_or_else(|| ParseError::new(1, 1, format!("'{src}' is not a polynomial")))
}

/// Parses `a` or `a/b` with an optional sign.
pub fn parse_rational(src: &str, field: Field) -> Result<FieldElem, String> {
    let s = src.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("'{s}' is not a rational number"))?;
    let den: BigInt = den.parse().map_err(|_| format!("'{s}' is not a rational number"))?;
    if den.is_zero() {
        return Err(format!("'{s}' has a zero denominator"));
    }
    field.from_ratio(&num, &den).map_err(|e| format!("'{s}': {e}"))
}

/// Parses comma-separated coordinates.
pub fn parse_point(src: &str, field: Field) -> Result<Point, String> {
    src.split(',').map(|c| parse_rational(c, field)).collect()
}

#[derive(Debug, Clone)]
pub struct SystemFile {
    pub field: Field,
    pub vars: Vec<String>,
    pub monoid: bool,
    pub generators: Vec<Vec<RatFunc>>,
    pub points: Vec<(String, Point)>,
}

impl SystemFile {
    pub fn spec(&self) -> orbit_core::Result<SemigroupSpec> {
        let maps = self.generators.iter().map(|g| SelfMap::new(g.clone())).collect::<orbit_core::Result<Vec<_>>>()?;
        SemigroupSpec::new(maps, self.monoid)
    }

    pub fn point(&self, name: &str) -> Option<&Point> {
        self.points.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }
}

/// Splits on top-level commas, keeping each piece's starting column.
fn split_commas(toks: &[(Tok, usize)]) -> Vec<&[(Tok, usize)]> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, (t, _)) in toks.iter().enumerate() {
        match t {
            Tok::Op('(') => depth += 1,
            Tok::Op(')') => depth -= 1,
            Tok::Op(',') if depth == 0 => {
                out.push(&toks[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&toks[start..]);
    out
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

pub fn parse_system(text: &str) -> Result<SystemFile, ParseError> {
    let mut field = None;
    let mut vars: Option<Vec<String>> = None;
    let mut monoid = None;
    let mut generators = Vec::new();
    let mut points: Vec<(String, Point)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let Some(colon) = content.find(':') else {
            return Err(ParseError::new(line, lead + 1, "expected '<key>: <value>'"));
        };
        let key = content[..colon].trim();
        let value = &content[colon + 1..];
        let value_col = colon + 2;
        let need_header = |what: &str| -> Result<(Field, Vec<String>), ParseError> {
            match &vars {
                Some(v) => Ok((field.unwrap_or(Field::Rational), v.clone())),
                None => Err(ParseError::new(line, lead + 1, format!("'vars' must come before {what}"))),
            }
        };

        match key {
            "field" => {
                if vars.is_some() {
                    return Err(ParseError::new(line, lead + 1, "'field' must come before 'vars'"));
                }
                let words: Vec<&str> = value.split_whitespace().collect();
                field = Some(match words.as_slice() {
                    ["QQ"] => Field::Rational,
                    ["Fp", p] => {
                        let p: u64 = p
                            .parse()
                            .map_err(|_| ParseError::new(line, value_col, format!("bad modulus '{p}'")))?;
                        Field::prime(p).map_err(|e| ParseError::new(line, value_col, e.to_string()))?
                    }
                    _ => return Err(ParseError::new(line, value_col, "expected 'QQ' or 'Fp <prime>'")),
                });
            }
            "vars" => {
                if vars.is_some() {
                    return Err(ParseError::new(line, lead + 1, "'vars' given twice"));
                }
                let names: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
                for (i, n) in names.iter().enumerate() {
                    if !is_ident(n) {
                        return Err(ParseError::new(line, value_col, format!("bad variable name '{n}'")));
                    }
                    if names[..i].contains(n) {
                        return Err(ParseError::new(line, value_col, format!("duplicate variable '{n}'")));
                    }
                }
                vars = Some(names);
            }
            "monoid" => {
                monoid = Some(match value.trim() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(ParseError::new(line, value_col, format!("expected true or false, got '{other}'")))
                    }
                });
            }
            "gen" => {
                let (f, names) = need_header("generators")?;
                let toks = lex(value, line, value_col)?;
                let pieces = split_commas(&toks);
                if pieces.len() != names.len() {
                    return Err(ParseError::new(
                        line,
                        value_col,
                        format!("generator has {} components, expected {}", pieces.len(), names.len()),
                    ));
                }
                let end_col = value_col + value.chars().count();
                let comps = pieces
                    .iter()
                    .map(|p| parse_expr_at(p, line, p.first().map_or(end_col, |(_, c)| *c), &names, f))
                    .collect::<Result<Vec<_>, _>>()?;
                generators.push(comps);
            }
            _ if key.starts_with("point") => {
                let name = key["point".len()..].trim();
                if !is_ident(name) {
                    return Err(ParseError::new(line, lead + 1, "expected 'point <name>: <coordinates>'"));
                }
                if points.iter().any(|(n, _)| n == name) {
                    return Err(ParseError::new(line, lead + 1, format!("point '{name}' defined twice")));
                }
                let (f, names) = need_header("points")?;
                let pt = parse_point(value, f).map_err(|m| ParseError::new(line, value_col, m))?;
                if pt.len() != names.len() {
                    return Err(ParseError::new(
                        line,
                        value_col,
                        format!("point has {} coordinates, expected {}", pt.len(), names.len()),
                    ));
                }
                points.push((name.to_string(), pt));
            }
            other => return Err(ParseError::new(line, lead + 1, format!("unknown key '{other}'"))),
        }
    }

    let vars = vars.ok_or_else(|| ParseError::new(last_line.max(1), 1, "missing 'vars'"))?;
    if generators.is_empty() {
        return Err(ParseError::new(last_line.max(1), 1, "no 'gen' lines"));
    }
    Ok(SystemFile { field: field.unwrap_or(Field::Rational), vars, monoid: monoid.unwrap_or(false), generators, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    const ADDITIVE: &str = "field: QQ\nvars: x, y\nmonoid: true\ngen: x, x + y\npoint p: 2, 0\n";

    #[test]
    fn additive_file() {
        let sys = parse_system(ADDITIVE).unwrap();
        assert_eq!(sys.vars, names(&["x", "y"]));
        assert_eq!(sys.generators.len(), 1);
        assert!(sys.monoid);
        assert_eq!(sys.generators[0][1].display(&sys.vars).to_string(), "x + y");
        assert_eq!(sys.point("p").unwrap(), &vec![Field::Rational.from_i64(2), Field::Rational.zero()]);
    }

    #[test]
    fn precedence() {
        let v = names(&["x", "y"]);
        let show = |s: &str| parse_expr(s, &v, Field::Rational).unwrap().display(&v).to_string();
        assert_eq!(show("-x^2"), "-x^2");
        assert_eq!(show("2*x^2 - x*y"), "2*x^2 - x*y");
        assert_eq!(show("(x + y)^2"), "x^2 + 2*x*y + y^2");
        assert_eq!(show("1/2*x"), "1/2*x");
        assert_eq!(show("y / x"), "y/x");
        assert_eq!(show("x - -y"), "x + y");
        assert_eq!(show("(x^2)^3"), "x^6");
    }

    #[test]
    fn expression_errors() {
        let v = names(&["x", "y"]);
        let err = |s: &str| parse_expr(s, &v, Field::Rational).unwrap_err();
        let e = err("x / (x - x)");
        assert!(e.msg.contains("identically zero"), "{e}");
        assert_eq!(e.col, 3);
        assert!(err("x + z").msg.contains("unknown identifier 'z'"));
        assert!(err("x^2^3").msg.contains("chained"));
        assert!(err("x^-1").msg.contains("negative"));
        assert!(err("x^y").msg.contains("integer"));
        assert!(err("(x + y").msg.contains("')'"));
        assert!(err("x y").msg.contains("unexpected"));
        assert_eq!(err("x $ y").col, 3);
    }

    #[test]
    fn system_errors() {
        let e = parse_system("field: Fp 4\nvars: x\ngen: x\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.msg.contains("not prime"), "{e}");
        let e = parse_system("vars: x, y\ngen: x / (x - x), y\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 8));
        assert!(e.msg.contains("identically zero"));
        assert!(parse_system("gen: x\nvars: x\n").unwrap_err().msg.contains("before"));
        assert!(parse_system("vars: x, y\ngen: x\n").unwrap_err().msg.contains("components"));
        assert!(parse_system("vars: x\n").unwrap_err().msg.contains("gen"));
        assert!(parse_system("vars: x\ngen: x\npoint a: 1, 2\n").unwrap_err().msg.contains("coordinates"));
        assert!(parse_system("vars: x\ngen: x\nmonoid: maybe\n").is_err());
        assert!(parse_system("vars: x\ngen: x\nwat: 1\n").unwrap_err().msg.contains("unknown key"));
    }

    #[test]
    fn prime_field_and_comments() {
        let sys = parse_system("# squaring\nfield: Fp 7\nvars: t\ngen: t^2 + 8 # reduced\npoint a: 1/2\n").unwrap();
        assert_eq!(sys.field, Field::prime(7).unwrap());
        assert_eq!(sys.generators[0][0].display(&sys.vars).to_string(), "t^2 + 1");
        assert_eq!(sys.point("a").unwrap()[0].to_string(), "4");
        assert!(!sys.monoid);
    }

    #[test]
    fn rationals() {
        let q = Field::Rational;
        assert_eq!(parse_rational("-3/6", q).unwrap().to_string(), "-1/2");
        assert!(parse_rational("1/0", q).is_err());
        assert!(parse_rational("x", q).is_err());
        assert_eq!(parse_point("2, -1", q).unwrap().len(), 2);
    }
}
