//! Expression parsing and the `extreg` command line.
//!
//! Expression grammar (whitespace is ignored, `*` is mandatory):
//!
//! ```text
//! expr  := ['+' | '-'] term (('+' | '-') term)*
//! term  := coeff | [coeff '*'] var ('*' var)*
//! coeff := integer | integer '/' integer
//! var   := identifier declared in the algebra
//! ```
//!
//! Products are wedge products taken left to right, so `x1*x1` is zero and
//! `y1*x1` is `-x1*y1`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;
use thiserror::Error;

use crate::extcore::{wedge_monomials, AlgebraContext, AlgebraError, Element, Monomial};
use crate::grmod::{
    annihilator, minimal_generators, resolve_bounded, Degree, ModuleError, DENSE_COLUMN_BUDGET,
};
use crate::peeva::{self, render_counts, FamilyError, SizeGuard};
use crate::scalars::{FieldKind, FieldSpec, Fp, Rational, Scalar, ScalarError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_FIELD: i32 = 3;
pub const EXIT_SIZE_GUARD: i32 = 4;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "EXTREG_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("malformed coefficient '{0}'")]
    MalformedCoefficient(String),
    #[error("zero denominator in '{0}'")]
    ZeroDenominator(String),
    #[error("unexpected '{token}' at offset {offset}")]
    Unexpected { token: String, offset: usize },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Slash,
    Star,
    Plus,
    Minus,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Int(s) => s.clone(),
            Tok::Slash => "/".into(),
            Tok::Star => "*".into(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '*' => {
                out.push((Tok::Star, pos));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, pos));
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, pos));
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push((Tok::Minus, pos));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|x| x.1).collect();
                if !word.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ParseError::MalformedCoefficient(word));
                }
                out.push((Tok::Int(word), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push((
                    Tok::Ident(chars[start..i].iter().map(|x| x.1).collect()),
                    pos,
                ));
            }
            other => {
                return Err(ParseError::Unexpected {
                    token: other.to_string(),
                    offset: pos,
                })
            }
        }
    }
    Ok(out)
}

struct ExprParser<'a, S: Scalar> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: &'a Arc<AlgebraContext>,
    _scalar: std::marker::PhantomData<S>,
}

impl<'a, S: Scalar> ExprParser<'a, S> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unexpected(&self, t: &(Tok, usize)) -> ParseError {
        ParseError::Unexpected {
            token: t.0.text(),
            offset: t.1,
        }
    }

    fn coefficient(&mut self, num: String) -> Result<S, ParseError> {
        let spec = self.ctx.field();
        let n: BigInt = num
            .parse()
            .map_err(|_| ParseError::MalformedCoefficient(num.clone()))?;
        if self.peek() != Some(&Tok::Slash) {
            return Ok(S::from_ratio(&spec, &n, &BigInt::from(1)).expect("unit denominator"));
        }
        self.next();
        match self.next() {
            Some((Tok::Int(den), _)) => {
                let d: BigInt = den
                    .parse()
                    .map_err(|_| ParseError::MalformedCoefficient(format!("{num}/{den}")))?;
                S::from_ratio(&spec, &n, &d)
                    .map_err(|_| ParseError::ZeroDenominator(format!("{num}/{den}")))
            }
            Some(t) => Err(ParseError::MalformedCoefficient(format!(
                "{num}/{}",
                t.0.text()
            ))),
            None => Err(ParseError::MalformedCoefficient(format!("{num}/"))),
        }
    }

    fn variable(&mut self) -> Result<usize, ParseError> {
        match self.next() {
            Some((Tok::Ident(name), _)) => self
                .ctx
                .var_index(&name)
                .ok_or(ParseError::UnknownVariable(name)),
            Some(t) => Err(self.unexpected(&t)),
            None => Err(ParseError::UnexpectedEnd),
        }
    }

    fn term(&mut self, negate: bool) -> Result<Option<(Monomial, S)>, ParseError> {
        let spec = self.ctx.field();
        let mut coeff = S::one(&spec);
        let mut mono = Some(Monomial::ONE);
        let mut sign = 1i8;
        let mut need_var = true;
        match self.peek().cloned() {
            Some(Tok::Int(num)) => {
                self.next();
                coeff = self.coefficient(num)?;
                if self.peek() == Some(&Tok::Star) {
                    self.next();
                } else {
                    need_var = false;
                }
            }
            Some(_) => {}
            None => return Err(ParseError::UnexpectedEnd),
        }
        if need_var {
            loop {
                let v = self.variable()?;
                if let Some(m) = mono {
                    mono = wedge_monomials(m, Monomial::var(v)).map(|(s, p)| {
                        sign *= s;
                        p
                    });
                }
                if self.peek() == Some(&Tok::Star) {
                    self.next();
                } else {
                    break;
                }
            }
        }
        if sign < 0 {
            coeff = -coeff;
        }
        if negate {
            coeff = -coeff;
        }
        Ok(mono.map(|m| (m, coeff)))
    }

    fn expr(&mut self) -> Result<Element<S>, ParseError> {
        if self.toks.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut terms = Vec::new();
        let mut negate = match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                true
            }
            Some(Tok::Plus) => {
                self.next();
                false
            }
            _ => false,
        };
        loop {
            terms.extend(self.term(negate)?);
            match self.next() {
                None => break,
                Some((Tok::Plus, _)) => negate = false,
                Some((Tok::Minus, _)) => negate = true,
                Some(t) => return Err(self.unexpected(&t)),
            }
        }
        Ok(Element::from_terms(self.ctx, terms))
    }
}

/// Parses `text` into an element of the algebra `ctx`.
pub fn parse_element<S: Scalar>(
    text: &str,
    ctx: &Arc<AlgebraContext>,
) -> Result<Element<S>, ParseError> {
    let toks = tokenize(text)?;
    ExprParser {
        toks,
        pos: 0,
        ctx,
        _scalar: std::marker::PhantomData,
    }
    .expr()
}

/// Source text together with the element it denotes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedExpression<S: Scalar> {
    pub source: String,
    pub element: Element<S>,
}

impl<S: Scalar> ParsedExpression<S> {
    pub fn parse(text: &str, ctx: &Arc<AlgebraContext>) -> Result<Self, ParseError> {
        Ok(ParsedExpression {
            source: text.to_string(),
            element: parse_element(text, ctx)?,
        })
    }
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "extreg",
    about = "Exact computations in exterior algebras",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Ordered, comma-separated variable names
    #[arg(long, global = true, value_delimiter = ',')]
    vars: Vec<String>,
    /// Coefficient field: Q or Fp with p prime (F2, F5, ...)
    #[arg(long, global = true, default_value = "Q")]
    field: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Permit more than 12 variables (prime fields only)
    #[arg(long, global = true)]
    allow_large: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wedge product of two expressions
    Wedge {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Left annihilator of a homogeneous element
    Ann {
        #[arg(long)]
        elem: String,
        #[arg(long)]
        dmax: usize,
    },
    /// Betti table of E/I, truncated to a window
    Betti {
        /// Comma-separated generators of I
        #[arg(long, value_delimiter = ',')]
        ideal: Vec<String>,
        #[arg(long)]
        imax: usize,
        #[arg(long)]
        jmax: Degree,
    },
    /// Check the regularity bound for the family x1*y1 + ... + xn*yn
    Verify {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Also check the characteristic-dependent syzygy degrees
        #[arg(long)]
        remark: bool,
        /// Report syzygy degrees over each listed prime field
        #[arg(long, value_delimiter = ',')]
        scan: Vec<u64>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Field(ScalarError),
    #[error("{0}")]
    SizeGuard(String),
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Module(ModuleError),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Field(_) => EXIT_FIELD,
            CliError::SizeGuard(_) => EXIT_SIZE_GUARD,
            _ => EXIT_PARSE,
        }
    }
}

impl From<ModuleError> for CliError {
    fn from(e: ModuleError) -> Self {
        match e {
            ModuleError::Algebra(a) => CliError::Algebra(a),
            other => CliError::Module(other),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::SizeGuard { .. } => CliError::SizeGuard(e.to_string()),
            FamilyError::Field(f) => CliError::Field(f),
            FamilyError::Module(m) => m.into(),
            FamilyError::OutOfRange(_) => CliError::Usage(e.to_string()),
        }
    }
}

/// Applies `EXTREG_THREADS` to the global worker pool, if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool may already exist when embedded; keep it then
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Runs the command line; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(e.to_string()),
                _ => {
                    let text = e.to_string();
                    let first = text.lines().next().unwrap_or("invalid arguments");
                    Outcome {
                        code: EXIT_PARSE,
                        stdout: String::new(),
                        stderr: format!("{}\n", first.trim()),
                    }
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => Outcome::fail(e.code(), e),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let field: FieldSpec = cli.global.field.parse().map_err(CliError::Field)?;
    match field.kind() {
        FieldKind::Rationals => dispatch_in::<Rational>(cli, field),
        FieldKind::PrimeField => dispatch_in::<Fp>(cli, field),
    }
}

fn guard(cli: &Cli) -> SizeGuard {
    SizeGuard {
        allow_large: cli.global.allow_large,
    }
}

fn declared_context(cli: &Cli, field: FieldSpec) -> Result<Arc<AlgebraContext>, CliError> {
    if cli.global.vars.is_empty() {
        return Err(CliError::Usage(
            "--vars is required for this command".into(),
        ));
    }
    let ctx = AlgebraContext::new(cli.global.vars.iter().map(|v| v.trim()), field)?;
    guard(cli).check(ctx.n_vars(), field)?;
    Ok(ctx)
}

fn render_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn dispatch_in<S: Scalar>(cli: &Cli, field: FieldSpec) -> Result<Outcome, CliError> {
    let format = cli.global.format;
    match &cli.command {
        Command::Wedge { a, b } => {
            let ctx = declared_context(cli, field)?;
            let ea = parse_element::<S>(a, &ctx)?;
            let eb = parse_element::<S>(b, &ctx)?;
            let prod = ea.wedge(&eb)?;
            Ok(Outcome::ok(match format {
                Format::Table => format!("{prod}\n"),
                Format::Json => render_json(&json!({
                    "schema": 1,
                    "field": field.to_string(),
                    "a": ea.to_string(),
                    "b": eb.to_string(),
                    "result": prod.to_string(),
                })),
            }))
        }
        Command::Ann { elem, dmax } => {
            let ctx = declared_context(cli, field)?;
            let g = parse_element::<S>(elem, &ctx)?;
            let ann = annihilator(&g, *dmax)?;
            let gens = minimal_generators(&ann)?;
            let dims = ann.dims();
            let counts = gens.counts();
            let reps: BTreeMap<Degree, Vec<String>> = gens
                .by_degree
                .iter()
                .filter(|(_, g)| g.count > 0)
                .map(|(d, g)| {
                    (
                        *d,
                        g.representatives.iter().map(|r| r[0].to_string()).collect(),
                    )
                })
                .collect();
            Ok(Outcome::ok(match format {
                Format::Table => {
                    let mut out = format!("left annihilator of {g} over {field}\n");
                    out.push_str("degree dim min_gens\n");
                    for (d, dim) in &dims {
                        let c = counts.get(d).map_or(".".to_string(), |c| c.to_string());
                        out.push_str(&format!("{d:>6} {dim:>3} {c:>8}\n"));
                    }
                    for (d, rs) in &reps {
                        for r in rs {
                            out.push_str(&format!("generator in degree {d}: {r}\n"));
                        }
                    }
                    out
                }
                Format::Json => render_json(&json!({
                    "schema": 1,
                    "field": field.to_string(),
                    "element": g.to_string(),
                    "d_max": dmax,
                    "dims": dims,
                    "min_gen_degrees": counts,
                    "representatives": reps,
                })),
            }))
        }
        Command::Betti { ideal, imax, jmax } => {
            let ctx = declared_context(cli, field)?;
            let gens = ideal
                .iter()
                .map(|t| parse_element::<S>(t, &ctx))
                .collect::<Result<Vec<_>, _>>()?;
            let budget = (!cli.global.allow_large).then_some(DENSE_COLUMN_BUDGET);
            let res = resolve_bounded(&ctx, &gens, *imax, *jmax, budget)?;
            if let Some(i) = res.skipped_from {
                return Err(CliError::SizeGuard(format!(
                    "size guard: homological degree {i} needs more than {DENSE_COLUMN_BUDGET} dense columns in one degree (pass --allow-large to override)"
                )));
            }
            let table = res.table;
            Ok(Outcome::ok(match format {
                Format::Table => {
                    let mut out = table.render();
                    out.push_str(&format!("window: i <= {imax}, j <= {jmax}\n"));
                    if let Ok(r) = table.regularity_lower_bound() {
                        out.push_str(&format!("reg >= {r}\n"));
                    }
                    out
                }
                Format::Json => render_json(&table.to_json()),
            }))
        }
        Command::Verify {
            family,
            n,
            remark,
            scan,
        } => {
            if family != "peeva" {
                return Err(CliError::Usage(format!(
                    "unknown family '{family}' (expected peeva)"
                )));
            }
            let g = guard(cli);
            let report = peeva::verify_theorem::<S>(*n, field, g)?;
            let remark_report = if *remark {
                Some(peeva::verify_remark::<S>(*n, field, g)?)
            } else {
                None
            };
            let rows = if scan.is_empty() {
                None
            } else {
                Some(peeva::characteristic_scan(*n, scan, g)?)
            };
            let pass = report.pass() && remark_report.as_ref().and_then(|r| r.holds) != Some(false);
            let stdout = match format {
                Format::Table => {
                    let mut out = report.render();
                    if let Some(r) = &remark_report {
                        out.push_str(&r.render());
                    }
                    if let Some(rows) = &rows {
                        out.push_str(
                            "characteristic scan (minimal generators of 0:(f) by degree):\n",
                        );
                        for row in rows {
                            out.push_str(&format!(
                                "  p = {}: {}\n",
                                row.p,
                                render_counts(&row.min_gen_degrees)
                            ));
                        }
                    }
                    out
                }
                Format::Json => {
                    let mut doc = report.to_json();
                    let obj = doc.as_object_mut().expect("object");
                    if let Some(r) = &remark_report {
                        obj.insert("remark".into(), r.to_json());
                    }
                    if let Some(rows) = &rows {
                        obj.insert(
                            "scan".into(),
                            serde_json::to_value(rows).expect("serializable"),
                        );
                    }
                    obj.insert("pass".into(), pass.into());
                    render_json(&doc)
                }
            };
            Ok(Outcome {
                code: if pass {
                    EXIT_OK
                } else {
                    EXIT_VERIFICATION_FAILED
                },
                stdout,
                stderr: String::new(),
            })
        }
    }
}
