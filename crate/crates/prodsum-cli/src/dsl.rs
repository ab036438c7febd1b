//! The spec-file language: declarations for objects, generators, relations
//! with index schemas, model bindings, hypothesis flags, and goals.
//!
//! The surface syntax is line-oriented and semicolon-terminated:
//!
//! ```text
//! object A;
//! object AB = product(A, B);
//! mor p[n] : PI -> A;
//! rel p[n].can.s[m] = id(A) when delta(n, m);
//! model finab A = [2], f = [[1, 0]];
//! hypothesis lambda_is_iso;
//! goal p[0].can.s[0] = id(A);
//! ```
//!
//! Composition `.` binds tighter than `+`; both associate to the left and
//! parentheses regroup. Index expressions are affine in one variable with
//! coefficient at most 2 and offset at most 1 (`n`, `2n`, `n+1`, `2n+1`) or
//! a literal. `#` starts a comment running to the end of the line.
//! [`print_spec`] inverts [`parse_spec`] exactly: `parse(print(s)) == s`.

use prodsum_core::chase::Presentation;
use prodsum_core::model::ModelBinding;
use prodsum_core::models::finab::{FinAb, FinAbMor, FinAbObj};
use prodsum_core::models::lattice::LatticeObj;
use prodsum_core::term::{IndexExpr, MorTerm, ObjectRef};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

// ---------------------------------------------------------------------------
// Syntax tree
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Product,
    Coproduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelDeclKind {
    Finab,
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingAst {
    /// `[2, 3]`: a finab object given by its cyclic moduli.
    Vector(Vec<u64>),
    /// `[[1, 0], [2, 1]]`: a finab morphism given by its entry rows.
    Matrix(Vec<Vec<u64>>),
    /// `chain3`: a lattice catalog object.
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Object { name: String, construction: Option<(Construction, Vec<String>)> },
    Mor { name: String, index_var: Option<String>, dom: String, cod: String },
    Rel { lhs: TermAst, rhs: TermAst, delta: Option<(IdxAst, IdxAst)> },
    Model { kind: ModelDeclKind, bindings: Vec<(String, BindingAst)> },
    Hypothesis { flag: String },
    Goal { lhs: TermAst, rhs: TermAst },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermAst {
    Gen(String),
    Indexed(String, IdxAst),
    Id(String),
    Zero(String, String),
    Comp(Box<TermAst>, Box<TermAst>),
    Add(Box<TermAst>, Box<TermAst>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdxAst {
    Const(u64),
    Affine { coeff: u8, var: String, offset: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokKind {
    Ident(String),
    Nat(u64),
    Semi,
    Colon,
    Dot,
    Plus,
    Eq,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Arrow,
    Eof,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Ident(s) => write!(f, "`{s}`"),
            TokKind::Nat(n) => write!(f, "`{n}`"),
            TokKind::Semi => write!(f, "`;`"),
            TokKind::Colon => write!(f, "`:`"),
            TokKind::Dot => write!(f, "`.`"),
            TokKind::Plus => write!(f, "`+`"),
            TokKind::Eq => write!(f, "`=`"),
            TokKind::Comma => write!(f, "`,`"),
            TokKind::LParen => write!(f, "`(`"),
            TokKind::RParen => write!(f, "`)`"),
            TokKind::LBracket => write!(f, "`[`"),
            TokKind::RBracket => write!(f, "`]`"),
            TokKind::Arrow => write!(f, "`->`"),
            TokKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '#' {
            while let Some(&d) = chars.peek() {
                if d == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
            continue;
        }
        let start_col = col;
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            toks.push(Tok { kind: TokKind::Ident(s), line, col: start_col });
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while let Some(&d) = chars.peek() {
                if let Some(v) = d.to_digit(10) {
                    n = n.checked_mul(10).and_then(|x| x.checked_add(v as u64)).ok_or(
                        ParseError {
                            line,
                            col: start_col,
                            expected: "a number that fits in 64 bits".into(),
                            found: "a larger literal".into(),
                        },
                    )?;
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            toks.push(Tok { kind: TokKind::Nat(n), line, col: start_col });
            continue;
        }
        let kind = match c {
            ';' => TokKind::Semi,
            ':' => TokKind::Colon,
            '.' => TokKind::Dot,
            '+' => TokKind::Plus,
            '=' => TokKind::Eq,
            ',' => TokKind::Comma,
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            '[' => TokKind::LBracket,
            ']' => TokKind::RBracket,
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    toks.push(Tok { kind: TokKind::Arrow, line, col: start_col });
                    continue;
                }
                return Err(ParseError {
                    line,
                    col: start_col,
                    expected: "`->`".into(),
                    found: "`-`".into(),
                });
            }
            other => {
                return Err(ParseError {
                    line,
                    col: start_col,
                    expected: "a declaration or punctuation".into(),
                    found: format!("`{other}`"),
                })
            }
        };
        chars.next();
        col += 1;
        toks.push(Tok { kind, line, col: start_col });
    }
    toks.push(Tok { kind: TokKind::Eof, line, col });
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos.min(self.toks.len() - 1)].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            col: t.col,
            expected: expected.into(),
            found: t.kind.to_string(),
        })
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<(), ParseError> {
        if self.peek().kind == kind {
            self.bump();
            Ok(())
        } else {
            self.err(what)
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match &self.peek().kind {
            TokKind::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.err(what),
        }
    }

    fn expect_nat(&mut self, what: &str) -> Result<u64, ParseError> {
        match &self.peek().kind {
            TokKind::Nat(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => self.err(what),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokKind::Ident(s) if s == kw)
    }

    fn parse_file(&mut self) -> Result<SpecFile, ParseError> {
        let mut decls = Vec::new();
        while self.peek().kind != TokKind::Eof {
            decls.push(self.parse_decl()?);
        }
        Ok(SpecFile { decls })
    }

    fn parse_decl(&mut self) -> Result<Decl, ParseError> {
        let kw = match &self.peek().kind {
            TokKind::Ident(s) => s.clone(),
            _ => {
                return self.err(
                    "a declaration keyword (object, mor, rel, model, hypothesis, goal)",
                )
            }
        };
        match kw.as_str() {
            "object" => self.parse_object(),
            "mor" => self.parse_mor(),
            "rel" => self.parse_rel(),
            "model" => self.parse_model(),
            "hypothesis" => self.parse_hypothesis(),
            "goal" => self.parse_goal(),
            _ => self.err("a declaration keyword (object, mor, rel, model, hypothesis, goal)"),
        }
    }

    fn parse_object(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let name = self.expect_ident("an object name")?;
        let construction = if self.peek().kind == TokKind::Eq {
            self.bump();
            let kind = match self.expect_ident("`product` or `coproduct`")?.as_str() {
                "product" => Construction::Product,
                "coproduct" => Construction::Coproduct,
                _ => return self.err("`product` or `coproduct`"),
            };
            self.expect(TokKind::LParen, "`(`")?;
            let mut parts = vec![self.expect_ident("a part name")?];
            while self.peek().kind == TokKind::Comma {
                self.bump();
                parts.push(self.expect_ident("a part name")?);
            }
            self.expect(TokKind::RParen, "`)`")?;
            Some((kind, parts))
        } else {
            None
        };
        self.expect(TokKind::Semi, "`;`")?;
        Ok(Decl::Object { name, construction })
    }

    fn parse_mor(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let name = self.expect_ident("a morphism name")?;
        let index_var = if self.peek().kind == TokKind::LBracket {
            self.bump();
            let v = self.expect_ident("an index variable")?;
            self.expect(TokKind::RBracket, "`]`")?;
            Some(v)
        } else {
            None
        };
        self.expect(TokKind::Colon, "`:`")?;
        let dom = self.expect_ident("a domain object")?;
        self.expect(TokKind::Arrow, "`->`")?;
        let cod = self.expect_ident("a codomain object")?;
        self.expect(TokKind::Semi, "`;`")?;
        Ok(Decl::Mor { name, index_var, dom, cod })
    }

    fn parse_rel(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let lhs = self.parse_term()?;
        self.expect(TokKind::Eq, "`=`")?;
        let rhs = self.parse_term()?;
        let delta = if self.at_keyword("when") {
            self.bump();
            if !self.at_keyword("delta") {
                return self.err("`delta`");
            }
            self.bump();
            self.expect(TokKind::LParen, "`(`")?;
            let i = self.parse_idx()?;
            self.expect(TokKind::Comma, "`,`")?;
            let j = self.parse_idx()?;
            self.expect(TokKind::RParen, "`)`")?;
            Some((i, j))
        } else {
            None
        };
        self.expect(TokKind::Semi, "`;`")?;
        Ok(Decl::Rel { lhs, rhs, delta })
    }

    fn parse_model(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let kind = match self.expect_ident("`finab` or `lattice`")?.as_str() {
            "finab" => ModelDeclKind::Finab,
            "lattice" => ModelDeclKind::Lattice,
            _ => return self.err("`finab` or `lattice`"),
        };
        let mut bindings = Vec::new();
        loop {
            let name = self.expect_ident("a bound name")?;
            self.expect(TokKind::Eq, "`=`")?;
            bindings.push((name, self.parse_binding()?));
            if self.peek().kind == TokKind::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(TokKind::Semi, "`;`")?;
        Ok(Decl::Model { kind, bindings })
    }

    fn parse_binding(&mut self) -> Result<BindingAst, ParseError> {
        match &self.peek().kind {
            TokKind::Ident(_) => Ok(BindingAst::Name(self.expect_ident("a catalog name")?)),
            TokKind::LBracket => {
                self.bump();
                if self.peek().kind == TokKind::LBracket {
                    let mut rows = vec![self.parse_nat_row()?];
                    while self.peek().kind == TokKind::Comma {
                        self.bump();
                        rows.push(self.parse_nat_row()?);
                    }
                    self.expect(TokKind::RBracket, "`]`")?;
                    Ok(BindingAst::Matrix(rows))
                } else {
                    let entries = self.parse_nat_list_tail()?;
                    Ok(BindingAst::Vector(entries))
                }
            }
            _ => self.err("a binding literal (`[..]`, `[[..]]`, or a catalog name)"),
        }
    }

    fn parse_nat_row(&mut self) -> Result<Vec<u64>, ParseError> {
        self.expect(TokKind::LBracket, "`[`")?;
        self.parse_nat_list_tail()
    }

    /// Entries and the closing bracket of a numeric list whose `[` is consumed.
    fn parse_nat_list_tail(&mut self) -> Result<Vec<u64>, ParseError> {
        let mut out = Vec::new();
        if self.peek().kind == TokKind::RBracket {
            self.bump();
            return Ok(out);
        }
        out.push(self.expect_nat("a number")?);
        while self.peek().kind == TokKind::Comma {
            self.bump();
            out.push(self.expect_nat("a number")?);
        }
        self.expect(TokKind::RBracket, "`]`")?;
        Ok(out)
    }

    fn parse_hypothesis(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let flag = self.expect_ident("a hypothesis flag")?;
        self.expect(TokKind::Semi, "`;`")?;
        Ok(Decl::Hypothesis { flag })
    }

    fn parse_goal(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let lhs = self.parse_term()?;
        self.expect(TokKind::Eq, "`=`")?;
        let rhs = self.parse_term()?;
        self.expect(TokKind::Semi, "`;`")?;
        Ok(Decl::Goal { lhs, rhs })
    }

    fn parse_term(&mut self) -> Result<TermAst, ParseError> {
        let mut acc = self.parse_composite()?;
        while self.peek().kind == TokKind::Plus {
            self.bump();
            let rhs = self.parse_composite()?;
            acc = TermAst::Add(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn parse_composite(&mut self) -> Result<TermAst, ParseError> {
        let mut acc = self.parse_primary()?;
        while self.peek().kind == TokKind::Dot {
            self.bump();
            let rhs = self.parse_primary()?;
            acc = TermAst::Comp(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn parse_primary(&mut self) -> Result<TermAst, ParseError> {
        match self.peek().kind.clone() {
            TokKind::LParen => {
                self.bump();
                let t = self.parse_term()?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(t)
            }
            TokKind::Ident(name) if name == "id" => {
                self.bump();
                self.expect(TokKind::LParen, "`(`")?;
                let obj = self.expect_ident("an object name")?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(TermAst::Id(obj))
            }
            TokKind::Ident(name) if name == "zero" => {
                self.bump();
                self.expect(TokKind::LParen, "`(`")?;
                let dom = self.expect_ident("a domain object")?;
                self.expect(TokKind::Comma, "`,`")?;
                let cod = self.expect_ident("a codomain object")?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(TermAst::Zero(dom, cod))
            }
            TokKind::Ident(name) => {
                self.bump();
                if self.peek().kind == TokKind::LBracket {
                    self.bump();
                    let idx = self.parse_idx()?;
                    self.expect(TokKind::RBracket, "`]`")?;
                    Ok(TermAst::Indexed(name, idx))
                } else {
                    Ok(TermAst::Gen(name))
                }
            }
            _ => self.err("a term (a generator, `id(..)`, `zero(..)`, or `(`)"),
        }
    }

    fn parse_idx(&mut self) -> Result<IdxAst, ParseError> {
        match self.peek().kind.clone() {
            TokKind::Nat(n) => {
                if let TokKind::Ident(_) = self.peek2().kind {
                    if n != 2 {
                        return self.err("the coefficient `2`");
                    }
                    self.bump();
                    let var = self.expect_ident("an index variable")?;
                    let offset = self.parse_idx_offset()?;
                    Ok(IdxAst::Affine { coeff: 2, var, offset })
                } else {
                    self.bump();
                    Ok(IdxAst::Const(n))
                }
            }
            TokKind::Ident(var) => {
                self.bump();
                let offset = self.parse_idx_offset()?;
                Ok(IdxAst::Affine { coeff: 1, var, offset })
            }
            _ => self.err("an index expression"),
        }
    }

    fn parse_idx_offset(&mut self) -> Result<u8, ParseError> {
        if self.peek().kind != TokKind::Plus {
            return Ok(0);
        }
        self.bump();
        match self.peek().kind {
            TokKind::Nat(1) => {
                self.bump();
                Ok(1)
            }
            _ => self.err("the offset `1`"),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.parse_file()
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

pub fn print_idx(idx: &IdxAst) -> String {
    match idx {
        IdxAst::Const(n) => n.to_string(),
        IdxAst::Affine { coeff, var, offset } => {
            let mut s = String::new();
            if *coeff == 2 {
                s.push('2');
            }
            s.push_str(var);
            if *offset == 1 {
                s.push_str("+1");
            }
            s
        }
    }
}

fn print_term_prec(t: &TermAst, min_prec: u8) -> String {
    match t {
        TermAst::Gen(name) => name.clone(),
        TermAst::Indexed(name, idx) => format!("{name}[{}]", print_idx(idx)),
        TermAst::Id(obj) => format!("id({obj})"),
        TermAst::Zero(dom, cod) => format!("zero({dom}, {cod})"),
        TermAst::Comp(l, r) => {
            let s = format!("{}.{}", print_term_prec(l, 2), print_term_prec(r, 3));
            if min_prec > 2 {
                format!("({s})")
            } else {
                s
            }
        }
        TermAst::Add(l, r) => {
            let s = format!("{} + {}", print_term_prec(l, 1), print_term_prec(r, 2));
            if min_prec > 1 {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

pub fn print_term(t: &TermAst) -> String {
    print_term_prec(t, 1)
}

fn print_binding(b: &BindingAst) -> String {
    let row = |r: &[u64]| {
        format!("[{}]", r.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "))
    };
    match b {
        BindingAst::Vector(v) => row(v),
        BindingAst::Matrix(rows) => {
            format!("[{}]", rows.iter().map(|r| row(r)).collect::<Vec<_>>().join(", "))
        }
        BindingAst::Name(s) => s.clone(),
    }
}

pub fn print_spec(spec: &SpecFile) -> String {
    let mut out = String::new();
    for decl in &spec.decls {
        match decl {
            Decl::Object { name, construction: None } => {
                out.push_str(&format!("object {name};\n"));
            }
            Decl::Object { name, construction: Some((kind, parts)) } => {
                let kw = match kind {
                    Construction::Product => "product",
                    Construction::Coproduct => "coproduct",
                };
                out.push_str(&format!("object {name} = {kw}({});\n", parts.join(", ")));
            }
            Decl::Mor { name, index_var, dom, cod } => {
                let idx = index_var.as_ref().map(|v| format!("[{v}]")).unwrap_or_default();
                out.push_str(&format!("mor {name}{idx} : {dom} -> {cod};\n"));
            }
            Decl::Rel { lhs, rhs, delta } => {
                let guard = delta
                    .as_ref()
                    .map(|(i, j)| format!(" when delta({}, {})", print_idx(i), print_idx(j)))
                    .unwrap_or_default();
                out.push_str(&format!("rel {} = {}{guard};\n", print_term(lhs), print_term(rhs)));
            }
            Decl::Model { kind, bindings } => {
                let kw = match kind {
                    ModelDeclKind::Finab => "finab",
                    ModelDeclKind::Lattice => "lattice",
                };
                let bs = bindings
                    .iter()
                    .map(|(n, b)| format!("{n} = {}", print_binding(b)))
                    .collect::<Vec<_>>()
                    .join(", ");
                out.push_str(&format!("model {kw} {bs};\n"));
            }
            Decl::Hypothesis { flag } => {
                out.push_str(&format!("hypothesis {flag};\n"));
            }
            Decl::Goal { lhs, rhs } => {
                out.push_str(&format!("goal {} = {};\n", print_term(lhs), print_term(rhs)));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Building core structures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct BuildError(pub String);

fn berr<T>(msg: impl Into<String>) -> Result<T, BuildError> {
    Err(BuildError(msg.into()))
}

/// A goal with the label it is reported under.
#[derive(Debug, Clone)]
pub struct GoalDecl {
    pub label: String,
    pub lhs: MorTerm,
    pub rhs: MorTerm,
}

/// Everything a spec file denotes, resolved against the core library.
pub struct BuiltSpec {
    pub presentation: Presentation,
    pub objects: BTreeMap<String, ObjectRef>,
    pub goals: Vec<GoalDecl>,
    pub hypotheses: Vec<String>,
    pub finab: Option<ModelBinding<FinAb>>,
    pub lattice: Option<BTreeMap<String, LatticeObj>>,
}

pub fn idx_to_expr(idx: &IdxAst) -> Result<IndexExpr, BuildError> {
    match idx {
        IdxAst::Const(n) => Ok(IndexExpr::lit(*n)),
        IdxAst::Affine { coeff, var, offset } => IndexExpr::affine(*coeff, var.clone(), *offset)
            .map_err(|e| BuildError(format!("index `{}`: {e}", print_idx(idx)))),
    }
}

/// Resolve a surface term against a presentation and an object table. Plain
/// names must be declared generators; indexed names must be declared
/// families.
pub fn resolve_term(
    ast: &TermAst,
    pres: &Presentation,
    objects: &BTreeMap<String, ObjectRef>,
) -> Result<MorTerm, BuildError> {
    let lookup_obj = |name: &str| {
        objects
            .get(name)
            .cloned()
            .ok_or_else(|| BuildError(format!("unknown object `{name}`")))
    };
    match ast {
        TermAst::Gen(name) => {
            pres.gen(name).map_err(|_| BuildError(format!("unknown generator `{name}`")))
        }
        TermAst::Indexed(name, idx) => {
            let expr = idx_to_expr(idx)?;
            pres.fam(name, expr).map_err(|_| BuildError(format!("unknown family `{name}`")))
        }
        TermAst::Id(obj) => Ok(MorTerm::Id(lookup_obj(obj)?)),
        TermAst::Zero(dom, cod) => {
            Ok(MorTerm::Zero { dom: lookup_obj(dom)?, cod: lookup_obj(cod)? })
        }
        TermAst::Comp(l, r) => {
            let lt = resolve_term(l, pres, objects)?;
            let rt = resolve_term(r, pres, objects)?;
            prodsum_core::term::compose(lt, rt).map_err(|e| BuildError(e.to_string()))
        }
        TermAst::Add(l, r) => {
            let lt = resolve_term(l, pres, objects)?;
            let rt = resolve_term(r, pres, objects)?;
            prodsum_core::term::add_mor(lt, rt).map_err(|e| BuildError(e.to_string()))
        }
    }
}

pub const KNOWN_HYPOTHESES: [&str; 3] = ["lambda_is_iso", "invertible_f", "idempotent_homs"];

fn lattice_catalog_lookup(name: &str) -> Result<LatticeObj, BuildError> {
    if let Some(n) = name.strip_prefix("chain") {
        if let Ok(k) = n.parse::<u32>() {
            if (1..=6).contains(&k) {
                return Ok(LatticeObj::Chain(k));
            }
        }
    }
    if let Some(n) = name.strip_prefix("powerset") {
        if let Ok(k) = n.parse::<u8>() {
            if (1..=3).contains(&k) {
                return Ok(LatticeObj::Powerset(k));
            }
        }
    }
    if name == "diamond" {
        return Ok(LatticeObj::diamond());
    }
    berr(format!(
        "unknown lattice object `{name}`; use chain1..chain6, powerset1..powerset3, or diamond"
    ))
}

/// Resolve a whole file: declarations in order, hypotheses first so that
/// enrichment flags apply to every relation.
pub fn build_spec(spec: &SpecFile) -> Result<BuiltSpec, BuildError> {
    let mut hypotheses = Vec::new();
    for decl in &spec.decls {
        if let Decl::Hypothesis { flag } = decl {
            if !KNOWN_HYPOTHESES.contains(&flag.as_str()) {
                return berr(format!(
                    "unknown hypothesis `{flag}`; known flags: {}",
                    KNOWN_HYPOTHESES.join(", ")
                ));
            }
            hypotheses.push(flag.clone());
        }
    }

    let mut pres = Presentation::new("spec file");
    if hypotheses.iter().any(|h| h == "idempotent_homs") {
        pres.idempotent = true;
    }
    let mut objects: BTreeMap<String, ObjectRef> = BTreeMap::new();
    let mut goals = Vec::new();
    let mut finab: Option<ModelBinding<FinAb>> = None;
    let mut lattice: Option<BTreeMap<String, LatticeObj>> = None;
    let mut rel_count = 0usize;

    for decl in &spec.decls {
        match decl {
            Decl::Hypothesis { .. } => {}
            Decl::Object { name, construction } => {
                if objects.contains_key(name) {
                    return berr(format!("object `{name}` is declared twice"));
                }
                let obj = match construction {
                    None => ObjectRef::atomic(name.clone()),
                    Some((kind, parts)) => {
                        let part_refs = parts
                            .iter()
                            .map(|p| {
                                objects.get(p).cloned().ok_or_else(|| {
                                    BuildError(format!(
                                        "object `{name}` uses undeclared part `{p}`"
                                    ))
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        match kind {
                            Construction::Product => ObjectRef::product(name.clone(), part_refs),
                            Construction::Coproduct => {
                                ObjectRef::coproduct(name.clone(), part_refs)
                            }
                        }
                    }
                };
                objects.insert(name.clone(), obj);
            }
            Decl::Mor { name, index_var, dom, cod } => {
                let d = objects
                    .get(dom)
                    .cloned()
                    .ok_or_else(|| BuildError(format!("morphism `{name}`: unknown domain `{dom}`")))?;
                let c = objects.get(cod).cloned().ok_or_else(|| {
                    BuildError(format!("morphism `{name}`: unknown codomain `{cod}`"))
                })?;
                if index_var.is_some() {
                    pres.add_family(name.clone(), d, c);
                } else {
                    pres.add_gen(name.clone(), d, c);
                }
            }
            Decl::Rel { lhs, rhs, delta } => {
                rel_count += 1;
                let name = format!("rel-{rel_count}");
                let lt = resolve_term(lhs, &pres, &objects)
                    .map_err(|e| BuildError(format!("{name}: {e}")))?;
                let rt = resolve_term(rhs, &pres, &objects)
                    .map_err(|e| BuildError(format!("{name}: {e}")))?;
                let added = match delta {
                    None => pres.add_relation(name.clone(), lt, rt),
                    Some((i, j)) => {
                        pres.add_delta_relation(name.clone(), lt, rt, idx_to_expr(i)?, idx_to_expr(j)?)
                    }
                };
                added.map_err(|e| BuildError(e.to_string()))?;
            }
            Decl::Goal { lhs, rhs } => {
                let lt = resolve_term(lhs, &pres, &objects)?;
                let rt = resolve_term(rhs, &pres, &objects)?;
                goals.push(GoalDecl {
                    label: format!("{} = {}", print_term(lhs), print_term(rhs)),
                    lhs: lt,
                    rhs: rt,
                });
            }
            Decl::Model { kind: ModelDeclKind::Finab, bindings } => {
                let binding = finab.get_or_insert_with(ModelBinding::default);
                let model = FinAb;
                for (name, b) in bindings {
                    match b {
                        BindingAst::Vector(moduli) => {
                            if !objects.contains_key(name) {
                                return berr(format!(
                                    "finab binding `{name}` does not match a declared object"
                                ));
                            }
                            if moduli.iter().any(|&m| m == 0) {
                                return berr(format!("finab object `{name}`: modulus 0"));
                            }
                            if binding.objects.insert(name.clone(), FinAbObj::from_moduli(moduli)).is_some()
                            {
                                return berr(format!("finab binding `{name}` appears twice"));
                            }
                        }
                        BindingAst::Matrix(rows) => {
                            let term = pres.gen(name).map_err(|_| {
                                BuildError(format!(
                                    "finab binding `{name}` does not match a declared morphism"
                                ))
                            })?;
                            let d =
                                prodsum_core::model::resolve_carrier(&model, binding, &term.dom())
                                    .map_err(|e| {
                                        BuildError(format!("finab morphism `{name}`: {e}"))
                                    })?;
                            let c =
                                prodsum_core::model::resolve_carrier(&model, binding, &term.cod())
                                    .map_err(|e| {
                                        BuildError(format!("finab morphism `{name}`: {e}"))
                                    })?;
                            let mor = FinAbMor::new(d, c, rows.clone())
                                .map_err(|e| BuildError(format!("finab morphism `{name}`: {e}")))?;
                            if binding.gens.insert(name.clone(), mor).is_some() {
                                return berr(format!("finab binding `{name}` appears twice"));
                            }
                        }
                        BindingAst::Name(_) => {
                            return berr(format!(
                                "finab binding `{name}` must be a moduli vector or an entry matrix"
                            ))
                        }
                    }
                }
            }
            Decl::Model { kind: ModelDeclKind::Lattice, bindings } => {
                let table = lattice.get_or_insert_with(BTreeMap::new);
                for (name, b) in bindings {
                    match b {
                        BindingAst::Name(cat) => {
                            if !objects.contains_key(name) {
                                return berr(format!(
                                    "lattice binding `{name}` does not match a declared object"
                                ));
                            }
                            if table.insert(name.clone(), lattice_catalog_lookup(cat)?).is_some() {
                                return berr(format!("lattice binding `{name}` appears twice"));
                            }
                        }
                        _ => {
                            return berr(format!(
                                "lattice binding `{name}` must name a catalog object"
                            ))
                        }
                    }
                }
            }
        }
    }

    Ok(BuiltSpec { presentation: pres, objects, goals, hypotheses, finab, lattice })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(text: &str) -> SpecFile {
        let spec = parse_spec(text).expect("parse");
        let printed = print_spec(&spec);
        let again = parse_spec(&printed).expect("reparse");
        assert_eq!(spec, again, "printed form:\n{printed}");
        spec
    }

    #[test]
    fn declarations_parse_and_roundtrip() {
        let spec = roundtrip(
            "object A;\n\
             object AB = product(A, A);\n\
             mor f : A -> AB;\n\
             mor p[n] : AB -> A;\n\
             rel p[n].f = id(A) when delta(n, 0);\n\
             hypothesis idempotent_homs;\n\
             goal p[0].f + p[0].f = p[0].f;\n",
        );
        assert_eq!(spec.decls.len(), 7);
    }

    #[test]
    fn empty_file_is_empty_spec() {
        assert_eq!(parse_spec("").unwrap(), SpecFile { decls: vec![] });
        assert_eq!(parse_spec("  # only a comment\n").unwrap(), SpecFile { decls: vec![] });
    }

    #[test]
    fn missing_codomain_errors_at_the_semicolon() {
        let err = parse_spec("mor f : A -> ;").unwrap_err();
        assert_eq!((err.line, err.col), (1, 14));
        assert!(err.expected.contains("codomain"));
    }

    #[test]
    fn unknown_keyword_rejected_with_position() {
        let err = parse_spec("object A;\nfrobnicate B;\n").unwrap_err();
        assert_eq!((err.line, err.col), (2, 1));
        assert!(err.expected.contains("declaration keyword"));
    }

    #[test]
    fn index_grammar_covers_the_affine_forms() {
        let spec = roundtrip(
            "object A;\nmor s[n] : A -> A;\nrel s[2n].s[n+1] = s[2n+1].s[7];\n",
        );
        let Decl::Rel { lhs, .. } = &spec.decls[2] else { panic!("rel expected") };
        let TermAst::Comp(l, _) = lhs else { panic!("composition expected") };
        assert_eq!(
            **l,
            TermAst::Indexed("s".into(), IdxAst::Affine { coeff: 2, var: "n".into(), offset: 0 })
        );
        let err = parse_spec("object A;\nmor s[n] : A -> A;\nrel s[3n] = s[0];\n").unwrap_err();
        assert!(err.expected.contains("coefficient"));
    }

    #[test]
    fn precedence_groups_composition_before_addition() {
        let spec = parse_spec("object A;\nmor f : A -> A;\nmor g : A -> A;\ngoal f + g.f = f;\n")
            .unwrap();
        let Decl::Goal { lhs, .. } = &spec.decls[3] else { panic!("goal expected") };
        assert_eq!(
            *lhs,
            TermAst::Add(
                Box::new(TermAst::Gen("f".into())),
                Box::new(TermAst::Comp(
                    Box::new(TermAst::Gen("g".into())),
                    Box::new(TermAst::Gen("f".into()))
                ))
            )
        );
        roundtrip("object A;\nmor f : A -> A;\nmor g : A -> A;\ngoal (f + g).f = f.(g.f);\n");
    }

    #[test]
    fn model_bindings_parse_vectors_matrices_and_names() {
        let spec = roundtrip(
            "object A;\nobject B;\nmor f : A -> B;\n\
             model finab A = [2], B = [2, 3], f = [[1], [0]];\n\
             model lattice A = chain2, B = diamond;\n",
        );
        let Decl::Model { kind: ModelDeclKind::Finab, bindings } = &spec.decls[3] else {
            panic!("finab model expected")
        };
        assert_eq!(bindings[2].1, BindingAst::Matrix(vec![vec![1], vec![0]]));
    }

    #[test]
    fn build_wires_relations_goals_and_bindings() {
        let spec = parse_spec(
            "object A;\nobject P;\nmor s[n] : A -> P;\nmor p[n] : P -> A;\n\
             rel p[n].s[m] = id(A) when delta(n, m);\n\
             model finab A = [2], P = [2];\n\
             goal p[0].s[0] = id(A);\n",
        )
        .unwrap();
        let built = build_spec(&spec).unwrap();
        assert_eq!(built.presentation.relations.len(), 1);
        assert_eq!(built.goals.len(), 1);
        assert_eq!(built.goals[0].label, "p[0].s[0] = id(A)");
        let binding = built.finab.as_ref().unwrap();
        assert_eq!(binding.objects.len(), 2);
    }

    #[test]
    fn build_rejects_unknown_names() {
        let bad = parse_spec("goal f = f;").unwrap();
        let err = build_spec(&bad).err().unwrap();
        assert!(err.0.contains("unknown generator"));
        let bad = parse_spec("object A;\nmor f : A -> Missing;\n").unwrap();
        assert!(build_spec(&bad).err().unwrap().0.contains("unknown codomain"));
        let bad = parse_spec("hypothesis turbo;").unwrap();
        assert!(build_spec(&bad).err().unwrap().0.contains("unknown hypothesis"));
    }
}
