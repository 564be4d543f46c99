use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{ParseError, ParseErrorKind, Pos};
use crate::poly::{prefix_vars, vars, MatrixPoly, Monomial, ScalarPoly, Vars};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Polymin,
    Certify,
    Lyap,
    KypCheck,
}

impl Target {
    /// Spelling in problem files.
    pub fn keyword(self) -> &'static str {
        match self {
            Target::Polymin => "polymin",
            Target::Certify => "certify",
            Target::Lyap => "lyap",
            Target::KypCheck => "kyp_check",
        }
    }

    /// Spelling on the command line.
    pub fn command(self) -> &'static str {
        match self {
            Target::KypCheck => "kyp-check",
            t => t.keyword(),
        }
    }

    fn from_keyword(s: &str) -> Option<Target> {
        [Target::Polymin, Target::Certify, Target::Lyap, Target::KypCheck]
            .into_iter()
            .find(|t| t.keyword() == s)
    }
}

/// Curve selector for the KYP check.
#[derive(Clone, Debug, PartialEq)]
pub enum ThetaDecl {
    ImaginaryAxis,
    RealAxis,
    Disk(f64),
    Interval(f64, f64),
    /// Real symmetric `[[t11, t12], [t12, t22]]`.
    Real(f64, f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    /// Scalar polynomial to minimize or certify.
    Objective(ScalarPoly),
    /// `dx/dt = A x + B u` with constraint matrix `G`.
    System { a: MatrixPoly, b: MatrixPoly, g: MatrixPoly },
    /// Constant pencil `(M, N)`, matrix `G` and curve selectors.
    Pencil {
        m: MatrixPoly,
        n: MatrixPoly,
        g: MatrixPoly,
        theta1: ThetaDecl,
        theta2: Option<ThetaDecl>,
    },
}

/// Optional overrides; `None` selects the pipeline default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub schedule_cap: Option<u32>,
    pub schedule_degrees: Option<Vec<u32>>,
    pub eps: Option<f64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub h_degree: Option<u32>,
    pub eta_degree: Option<u32>,
}

/// A parsed problem. Variable order fixes the triangular order of the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub target: Option<Target>,
    pub vars: Vars,
    pub bounds: Vec<(ScalarPoly, ScalarPoly)>,
    pub payload: Payload,
    pub settings: Settings,
}

// ---------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Eq,
    Sep,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v, _) => format!("number {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sep => "end of statement".into(),
        Tok::Eof => "end of input".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBrack => "'['".into(),
        Tok::RBrack => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Eq => "'='".into(),
    }
}

fn err(pos: Pos, kind: ParseErrorKind) -> ParseError {
    ParseError { line: pos.line, col: pos.col, kind }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    err(pos, ParseErrorKind::Syntax(msg.into()))
}

/// Newlines end statements only outside brackets and parentheses.
fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut depth = 0usize;
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, col };
        let advance = |i: &mut usize, col: &mut usize, n: usize| {
            *i += n;
            *col += n;
        };
        match ch {
            '\n' => {
                if depth == 0 {
                    out.push((Tok::Sep, pos));
                }
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(&mut i, &mut col, 1),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            ';' => {
                out.push((Tok::Sep, pos));
                advance(&mut i, &mut col, 1);
            }
            c if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                let mut integer = true;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    integer = false;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        integer = false;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s.parse().map_err(|_| syntax(pos, format!("malformed number '{s}'")))?;
                out.push((Tok::Num(v, integer), pos));
                col += i - start;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
                col += i - start;
            }
            _ => {
                let t = match ch {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    '=' => Tok::Eq,
                    other => return Err(syntax(pos, format!("unexpected character '{other}'"))),
                };
                match t {
                    Tok::LParen | Tok::LBrack => depth += 1,
                    Tok::RParen | Tok::RBrack => depth = depth.saturating_sub(1),
                    _ => {}
                }
                out.push((t, pos));
                advance(&mut i, &mut col, 1);
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

// ---------------------------------------------------------------- syntax tree

#[derive(Clone, Debug)]
enum Expr {
    Num(f64),
    Var(String, Pos),
    Call(String, Vec<Expr>, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug)]
enum Value {
    Expr(Expr, Pos),
    List(Vec<Value>, Pos),
}

impl Value {
    fn pos(&self) -> Pos {
        match self {
            Value::Expr(_, p) | Value::List(_, p) => *p,
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, ParseError> {
        let (t, pos) = self.bump();
        if t == want {
            Ok(pos)
        } else {
            Err(syntax(pos, format!("expected {}, found {}", describe(&want), describe(&t))))
        }
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        let pos = self.pos();
        if *self.peek() == Tok::LBrack {
            self.bump();
            let mut items = Vec::new();
            if *self.peek() != Tok::RBrack {
                loop {
                    items.push(self.value()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RBrack)?;
            Ok(Value::List(items, pos))
        } else {
            Ok(Value::Expr(self.sum()?, pos))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (t, pos) = self.bump();
        match t {
            Tok::Num(v, true) if v <= u32::MAX as f64 => Ok(Expr::Pow(Box::new(base), v as u32)),
            Tok::Num(v, _) => Err(err(pos, ParseErrorKind::NonIntegerExponent(v.to_string()))),
            Tok::Minus => Err(err(pos, ParseErrorKind::NonIntegerExponent("negative".into()))),
            other => Err(syntax(pos, format!("expected an exponent, found {}", describe(&other)))),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (t, pos) = self.bump();
        match t {
            Tok::Num(v, _) => Ok(Expr::Num(v)),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.sum()?);
                            if *self.peek() == Tok::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Call(name, args, pos))
                } else {
                    Ok(Expr::Var(name, pos))
                }
            }
            Tok::LParen => {
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(syntax(pos, format!("expected an expression, found {}", describe(&other)))),
        }
    }
}

// ---------------------------------------------------------------- resolution

/// How names that are not in scope are reported.
#[derive(Clone, Copy, PartialEq)]
enum Scope {
    Payload,
    Bound,
}

fn poly(e: &Expr, v: &Vars, all: &[String], scope: Scope) -> Result<ScalarPoly, ParseError> {
    Ok(match e {
        Expr::Num(x) => ScalarPoly::constant(v.clone(), *x),
        Expr::Var(name, pos) => match ScalarPoly::var(v.clone(), name) {
            Ok(p) => p,
            Err(_) if scope == Scope::Bound && all.contains(name) => {
                return Err(err(*pos, ParseErrorKind::ForwardReference(name.clone())))
            }
            Err(_) if scope == Scope::Bound => {
                return Err(err(
                    *pos,
                    ParseErrorKind::ForwardReference(format!("{name} (undeclared)")),
                ))
            }
            Err(_) => return Err(err(*pos, ParseErrorKind::UnknownVariable(name.clone()))),
        },
        Expr::Call(name, _, pos) => {
            return Err(syntax(*pos, format!("'{name}(...)' is not a polynomial")))
        }
        Expr::Neg(a) => -&poly(a, v, all, scope)?,
        Expr::Add(a, b) => &poly(a, v, all, scope)? + &poly(b, v, all, scope)?,
        Expr::Sub(a, b) => &poly(a, v, all, scope)? - &poly(b, v, all, scope)?,
        Expr::Mul(a, b) => &poly(a, v, all, scope)? * &poly(b, v, all, scope)?,
        Expr::Pow(a, k) => poly(a, v, all, scope)?.pow(*k),
    })
}

fn expr_of(v: &Value) -> Result<&Expr, ParseError> {
    match v {
        Value::Expr(e, _) => Ok(e),
        Value::List(_, p) => Err(syntax(*p, "expected an expression, found a list")),
    }
}

fn constant(v: &Value) -> Result<f64, ParseError> {
    let none: Vars = vars::<&str>(&[]);
    let p = poly(expr_of(v)?, &none, &[], Scope::Payload)?;
    Ok(p.eval(&[]))
}

fn unsigned(v: &Value, what: &str) -> Result<u64, ParseError> {
    let x = constant(v)?;
    if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
        Ok(x as u64)
    } else {
        Err(err(v.pos(), ParseErrorKind::Invalid(format!("{what} must be a nonnegative integer"))))
    }
}

fn matrix(v: &Value, vs: &Vars, all: &[String]) -> Result<MatrixPoly, ParseError> {
    let Value::List(rows, pos) = v else {
        return Err(syntax(v.pos(), "expected a matrix [[...], ...]"));
    };
    let mut entries = Vec::new();
    let mut ncols = None;
    for r in rows {
        let Value::List(cells, rpos) = r else {
            return Err(syntax(r.pos(), "expected a row [...]"));
        };
        if *ncols.get_or_insert(cells.len()) != cells.len() {
            return Err(syntax(*rpos, "rows have different lengths"));
        }
        for c in cells {
            entries.push(poly(expr_of(c)?, vs, all, Scope::Payload)?);
        }
    }
    let ncols = ncols.unwrap_or(0);
    if rows.is_empty() || ncols == 0 {
        return Err(syntax(*pos, "empty matrix"));
    }
    MatrixPoly::from_real_entries(vs.clone(), rows.len(), ncols, entries)
        .map_err(|e| err(*pos, ParseErrorKind::Invalid(e.to_string())))
}

fn theta(v: &Value) -> Result<ThetaDecl, ParseError> {
    if let Value::List(..) = v {
        let none: Vars = vars::<&str>(&[]);
        let m = matrix(v, &none, &[])?;
        let e = |i, j| m.entry(i, j).eval(&[]).re;
        if m.dims() != (2, 2) || e(0, 1) != e(1, 0) {
            return Err(err(v.pos(), ParseErrorKind::Invalid("theta must be a symmetric 2x2 matrix".into())));
        }
        return Ok(ThetaDecl::Real(e(0, 0), e(0, 1), e(1, 1)));
    }
    let bad = || {
        err(
            v.pos(),
            ParseErrorKind::Invalid("expected imaginary_axis, real_axis, disk(r), interval(a, b) or a matrix".into()),
        )
    };
    let num = |e: &Expr| constant(&Value::Expr(e.clone(), v.pos()));
    match expr_of(v)? {
        Expr::Var(name, _) if name == "imaginary_axis" => Ok(ThetaDecl::ImaginaryAxis),
        Expr::Var(name, _) if name == "real_axis" => Ok(ThetaDecl::RealAxis),
        Expr::Call(name, args, _) if name == "disk" && args.len() == 1 => Ok(ThetaDecl::Disk(num(&args[0])?)),
        Expr::Call(name, args, _) if name == "interval" && args.len() == 2 => {
            Ok(ThetaDecl::Interval(num(&args[0])?, num(&args[1])?))
        }
        _ => Err(bad()),
    }
}

const KEYS: [&str; 17] = [
    "target",
    "g",
    "A",
    "B",
    "G",
    "M",
    "N",
    "theta1",
    "theta2",
    "schedule.cap",
    "schedule.degrees",
    "solver.eps",
    "solver.grid",
    "seed",
    "samples",
    "lyap.h_degree",
    "lyap.eta_degree",
];

fn known_key(k: &str) -> bool {
    KEYS.contains(&k)
}

/// Parses a problem file.
///
/// ```text
/// target = certify
/// x in [-2, 2]; y in [x - 1, x + 1]
/// g = x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1
/// schedule.degrees = [4]
/// ```
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let mut decls: Vec<(String, Pos, Value, Value)> = Vec::new();
    let mut assigns: BTreeMap<String, (Pos, Value)> = BTreeMap::new();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Sep => {
                p.bump();
                continue;
            }
            Tok::Ident(name) => {
                let pos = p.pos();
                p.bump();
                match p.bump() {
                    (Tok::Ident(kw), _) if kw == "in" => {
                        let lpos = p.expect(Tok::LBrack)?;
                        let lo = Value::Expr(p.sum()?, lpos);
                        p.expect(Tok::Comma)?;
                        let hi = Value::Expr(p.sum()?, lpos);
                        p.expect(Tok::RBrack)?;
                        if known_key(&name) {
                            return Err(err(pos, ParseErrorKind::Invalid(format!("'{name}' is a reserved name"))));
                        }
                        if decls.iter().any(|d| d.0 == name) {
                            return Err(err(pos, ParseErrorKind::Duplicate(name)));
                        }
                        decls.push((name, pos, lo, hi));
                    }
                    (Tok::Eq, _) => {
                        if !known_key(&name) {
                            return Err(err(pos, ParseErrorKind::Invalid(format!("unknown key '{name}'"))));
                        }
                        let v = p.value()?;
                        if assigns.insert(name.clone(), (pos, v)).is_some() {
                            return Err(err(pos, ParseErrorKind::Duplicate(name)));
                        }
                    }
                    (t, tpos) => {
                        return Err(syntax(tpos, format!("expected 'in' or '=', found {}", describe(&t))))
                    }
                }
                match p.peek() {
                    Tok::Sep | Tok::Eof => {}
                    t => return Err(syntax(p.pos(), format!("expected end of statement, found {}", describe(t)))),
                }
            }
            t => return Err(syntax(p.pos(), format!("expected a statement, found {}", describe(&t)))),
        }
    }

    let names: Vec<String> = decls.iter().map(|d| d.0.clone()).collect();
    let all = vars(&names);
    let mut bounds = Vec::with_capacity(decls.len());
    for (i, (_, _, lo, hi)) in decls.iter().enumerate() {
        let pv = prefix_vars(&all, i);
        bounds.push((
            poly(expr_of(lo)?, &pv, &names, Scope::Bound)?,
            poly(expr_of(hi)?, &pv, &names, Scope::Bound)?,
        ));
    }

    let end = p.pos();
    let take = |k: &str| assigns.get(k);
    let need = |k: &str| take(k).ok_or_else(|| err(end, ParseErrorKind::Missing(k.to_string())));

    let target = match take("target") {
        None => None,
        Some((pos, v)) => match expr_of(v)? {
            Expr::Var(name, _) => Some(
                Target::from_keyword(name)
                    .ok_or_else(|| err(*pos, ParseErrorKind::Invalid(format!("unknown target '{name}'"))))?,
            ),
            _ => return Err(err(*pos, ParseErrorKind::Invalid("target must be a name".into()))),
        },
    };

    let payload = if let Some((_, v)) = take("g") {
        Payload::Objective(poly(expr_of(v)?, &all, &names, Scope::Payload)?)
    } else if take("A").is_some() {
        Payload::System {
            a: matrix(&need("A")?.1, &all, &names)?,
            b: matrix(&need("B")?.1, &all, &names)?,
            g: matrix(&need("G")?.1, &all, &names)?,
        }
    } else if take("M").is_some() {
        Payload::Pencil {
            m: matrix(&need("M")?.1, &all, &names)?,
            n: matrix(&need("N")?.1, &all, &names)?,
            g: matrix(&need("G")?.1, &all, &names)?,
            theta1: theta(&need("theta1")?.1)?,
            theta2: take("theta2").map(|(_, v)| theta(v)).transpose()?,
        }
    } else {
        return Err(err(end, ParseErrorKind::Missing("g, A or M".into())));
    };
    let expected = match &payload {
        Payload::Objective(_) => vec!["g"],
        Payload::System { .. } => vec!["A", "B", "G"],
        Payload::Pencil { .. } => vec!["M", "N", "G", "theta1", "theta2"],
    };
    for (k, (pos, _)) in &assigns {
        let setting = k.contains('.') || k == "seed" || k == "samples" || k == "target";
        if !setting && !expected.contains(&k.as_str()) {
            return Err(err(*pos, ParseErrorKind::Invalid(format!("'{k}' does not belong to this problem"))));
        }
    }
    if let Some(t) = target {
        let ok = matches!(
            (t, &payload),
            (Target::Polymin | Target::Certify, Payload::Objective(_))
                | (Target::Lyap, Payload::System { .. })
                | (Target::KypCheck, Payload::Pencil { .. })
        );
        if !ok {
            let pos = take("target").map(|x| x.0).unwrap_or(end);
            return Err(err(pos, ParseErrorKind::Invalid(format!("payload does not fit target {}", t.keyword()))));
        }
    }

    let u32_of = |k: &str| -> Result<Option<u32>, ParseError> {
        take(k)
            .map(|(_, v)| unsigned(v, k).and_then(|x| u32::try_from(x).map_err(|_| err(v.pos(), ParseErrorKind::Invalid(format!("{k} is too large"))))))
            .transpose()
    };
    let settings = Settings {
        schedule_cap: u32_of("schedule.cap")?,
        schedule_degrees: match take("schedule.degrees") {
            None => None,
            Some((_, Value::List(items, _))) => Some(
                items
                    .iter()
                    .map(|v| unsigned(v, "schedule degree").map(|x| x as u32))
                    .collect::<Result<_, _>>()?,
            ),
            Some((pos, _)) => return Err(syntax(*pos, "schedule.degrees must be a list [d1, d2, ...]")),
        },
        eps: match take("solver.eps") {
            None => None,
            Some((_, v)) => {
                let e = constant(v)?;
                if !(e > 0.0) {
                    return Err(err(v.pos(), ParseErrorKind::Invalid("solver.eps must be positive".into())));
                }
                Some(e)
            }
        },
        grid: take("solver.grid").map(|(_, v)| unsigned(v, "solver.grid").map(|x| x as usize)).transpose()?,
        seed: take("seed").map(|(_, v)| unsigned(v, "seed")).transpose()?,
        samples: take("samples").map(|(_, v)| unsigned(v, "samples").map(|x| x as usize)).transpose()?,
        h_degree: u32_of("lyap.h_degree")?,
        eta_degree: u32_of("lyap.eta_degree")?,
    };

    Ok(ProblemFile {
        target,
        vars: all,
        bounds,
        payload,
        settings,
    })
}

// ---------------------------------------------------------------- emission

/// Shortest round-trip form: integers without exponent, others in
/// scientific notation.
pub fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:e}")
    }
}

fn fmt_monomial(m: &Monomial, names: &[String]) -> String {
    let parts: Vec<String> = m
        .exponents()
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    parts.join("*")
}

/// Canonical text of a real polynomial: terms in descending graded-lex order.
pub fn fmt_poly(p: &ScalarPoly) -> String {
    let names = p.vars().to_vec();
    let terms: Vec<(&Monomial, &f64)> = p.terms().collect();
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, &c)) in terms.iter().rev().enumerate() {
        let neg = c < 0.0 || (c == 0.0 && c.is_sign_negative());
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = fmt_monomial(m, &names);
        if mono.is_empty() {
            out.push_str(&fmt_num(mag));
        } else if mag == 1.0 {
            out.push_str(&mono);
        } else {
            let _ = write!(out, "{}*{mono}", fmt_num(mag));
        }
    }
    out
}

fn fmt_matrix(m: &MatrixPoly) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols())
                .map(|j| fmt_poly(&m.entry(i, j).to_real().expect("real matrix entry")))
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn fmt_theta(t: &ThetaDecl) -> String {
    match t {
        ThetaDecl::ImaginaryAxis => "imaginary_axis".into(),
        ThetaDecl::RealAxis => "real_axis".into(),
        ThetaDecl::Disk(r) => format!("disk({})", fmt_num(*r)),
        ThetaDecl::Interval(a, b) => format!("interval({}, {})", fmt_num(*a), fmt_num(*b)),
        ThetaDecl::Real(a, b, c) => format!(
            "[[{}, {}], [{}, {}]]",
            fmt_num(*a),
            fmt_num(*b),
            fmt_num(*b),
            fmt_num(*c)
        ),
    }
}

/// Canonical text; `parse_problem(&emit_problem(p)) == p`.
pub fn emit_problem(p: &ProblemFile) -> String {
    let mut out = String::new();
    if let Some(t) = p.target {
        let _ = writeln!(out, "target = {}", t.keyword());
    }
    for (name, (lo, hi)) in p.vars.iter().zip(&p.bounds) {
        let _ = writeln!(out, "{name} in [{}, {}]", fmt_poly(lo), fmt_poly(hi));
    }
    match &p.payload {
        Payload::Objective(g) => {
            let _ = writeln!(out, "g = {}", fmt_poly(g));
        }
        Payload::System { a, b, g } => {
            let _ = writeln!(out, "A = {}", fmt_matrix(a));
            let _ = writeln!(out, "B = {}", fmt_matrix(b));
            let _ = writeln!(out, "G = {}", fmt_matrix(g));
        }
        Payload::Pencil { m, n, g, theta1, theta2 } => {
            let _ = writeln!(out, "M = {}", fmt_matrix(m));
            let _ = writeln!(out, "N = {}", fmt_matrix(n));
            let _ = writeln!(out, "G = {}", fmt_matrix(g));
            let _ = writeln!(out, "theta1 = {}", fmt_theta(theta1));
            if let Some(t2) = theta2 {
                let _ = writeln!(out, "theta2 = {}", fmt_theta(t2));
            }
        }
    }
    let s = &p.settings;
    if let Some(c) = s.schedule_cap {
        let _ = writeln!(out, "schedule.cap = {c}");
    }
    if let Some(d) = &s.schedule_degrees {
        let items: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "schedule.degrees = [{}]", items.join(", "));
    }
    if let Some(e) = s.eps {
        let _ = writeln!(out, "solver.eps = {}", fmt_num(e));
    }
    if let Some(g) = s.grid {
        let _ = writeln!(out, "solver.grid = {g}");
    }
    if let Some(x) = s.seed {
        let _ = writeln!(out, "seed = {x}");
    }
    if let Some(x) = s.samples {
        let _ = writeln!(out, "samples = {x}");
    }
    if let Some(x) = s.h_degree {
        let _ = writeln!(out, "lyap.h_degree = {x}");
    }
    if let Some(x) = s.eta_degree {
        let _ = writeln!(out, "lyap.eta_degree = {x}");
    }
    out
}
