//! The quadric family `f_n = x1*y1 + … + xn*yn` and end-to-end checks that
//! `E/(f_n)` has a minimal first syzygy in degree `n`, hence regularity at
//! least `n`.
//!
//! Variables are ordered `x1, …, xn, y1, …, yn`; `x_i` has index `i - 1`
//! and `y_i` has index `n + i - 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::extcore::{AlgebraContext, Element, Monomial};
use crate::grmod::{
    annihilator, minimal_generators, resolve_bounded, BettiTable, Degree, ModuleError,
    DENSE_COLUMN_BUDGET,
};
use crate::scalars::{FieldKind, FieldSpec, Fp, Rational, Scalar, ScalarError};

/// Largest family size accepted.
pub const MAX_FAMILY_N: usize = 32;
/// Variable count allowed without an explicit override.
pub const DEFAULT_MAX_VARS: usize = 12;
/// Homological bound of the Betti window used by the family checks.
pub const DEFAULT_I_MAX: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("n must be between 1 and {MAX_FAMILY_N}, got {0}")]
    OutOfRange(usize),
    #[error("size guard: {n_vars} variables over {field} exceeds the limit of {limit}{hint}")]
    SizeGuard {
        n_vars: usize,
        limit: usize,
        field: FieldSpec,
        hint: &'static str,
    },
    #[error(transparent)]
    Field(#[from] ScalarError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// Size policy for dense computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SizeGuard {
    pub allow_large: bool,
}

impl SizeGuard {
    pub fn check(&self, n_vars: usize, field: FieldSpec) -> Result<(), FamilyError> {
        if n_vars <= DEFAULT_MAX_VARS {
            return Ok(());
        }
        let rationals = field.kind() == FieldKind::Rationals;
        if self.allow_large && !rationals {
            return Ok(());
        }
        Err(FamilyError::SizeGuard {
            n_vars,
            limit: DEFAULT_MAX_VARS,
            field,
            hint: if rationals {
                " (larger algebras are only supported over prime fields)"
            } else {
                " (pass --allow-large to override)"
            },
        })
    }
}

/// Default Betti window `(i_max, j_max)` for `f_n`.
pub fn default_window(n: usize) -> (usize, Degree) {
    (DEFAULT_I_MAX, n as Degree + 4)
}

#[derive(Debug, Clone)]
pub struct FamilyInstance<S: Scalar> {
    pub n: usize,
    pub context: Arc<AlgebraContext>,
    pub f: Element<S>,
    /// The witness `x1 ∧ … ∧ xn`.
    pub s: Element<S>,
}

pub fn family_context(n: usize, field: FieldSpec) -> Result<Arc<AlgebraContext>, FamilyError> {
    if n == 0 || n > MAX_FAMILY_N {
        return Err(FamilyError::OutOfRange(n));
    }
    let names = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=n).map(|i| format!("y{i}")));
    Ok(AlgebraContext::new(names, field).expect("family names are valid"))
}

pub fn build_family<S: Scalar>(
    n: usize,
    field: FieldSpec,
) -> Result<FamilyInstance<S>, FamilyError> {
    if !S::supports(&field) {
        return Err(ScalarError::Unsupported(field).into());
    }
    let ctx = family_context(n, field)?;
    let one = S::one(&field);
    let f = Element::from_terms(
        &ctx,
        (0..n).map(|i| {
            let m = Monomial::from_indices(&[i, n + i]).expect("distinct");
            (m, one.clone())
        }),
    );
    let xs: Vec<usize> = (0..n).collect();
    let s = Element::monomial(&ctx, Monomial::from_indices(&xs).expect("distinct"), one);
    Ok(FamilyInstance {
        n,
        context: ctx,
        f,
        s,
    })
}

/// `s ∧ f = 0`.
pub fn check_witness<S: Scalar>(inst: &FamilyInstance<S>) -> bool {
    annihilates(&inst.s, &inst.f)
}

/// Whether `e ∧ f = 0`.
pub fn annihilates<S: Scalar>(e: &Element<S>, f: &Element<S>) -> bool {
    e.wedge(f).map(|p| p.is_zero()).unwrap_or(false)
}

fn support(counts: &BTreeMap<Degree, usize>) -> BTreeSet<Degree> {
    counts
        .iter()
        .filter(|(_, c)| **c > 0)
        .map(|(d, _)| *d)
        .collect()
}

/// Minimal-generator counts of `0:(f)` in degrees `0..=d_max`, keeping only
/// degrees that actually carry generators.
fn annihilator_generator_degrees<S: Scalar>(
    f: &Element<S>,
    d_max: usize,
) -> Result<BTreeMap<Degree, usize>, FamilyError> {
    let ann = annihilator(f, d_max)?;
    Ok(minimal_generators(&ann)?
        .counts()
        .into_iter()
        .filter(|(_, c)| *c > 0)
        .collect())
}

/// Outcome of checking the regularity bound for one `(n, field)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub n: usize,
    pub field: FieldSpec,
    pub witness_ok: bool,
    /// Minimal generators of `0:(f)` through degree `n`, by degree.
    pub min_gen_degrees: BTreeMap<Degree, usize>,
    pub has_degree_n_generator: bool,
    pub reg_lower_bound: Degree,
    /// Betti window actually computed; the homological bound drops below
    /// the default when the next step exceeds the dense size budget.
    pub window: (usize, Degree),
    /// `β_{2,j}` of `E/(f)` equals the annihilator generator count in
    /// degree `j - 2` wherever both were computed.
    pub routes_agree: bool,
    pub betti: BettiTable,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.witness_ok
            && self.has_degree_n_generator
            && self.reg_lower_bound >= self.n as Degree
            && self.routes_agree
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: u32,
            n: usize,
            field: String,
            witness_ok: bool,
            min_gen_degrees: &'a BTreeMap<Degree, usize>,
            has_degree_n_generator: bool,
            reg_lower_bound: Degree,
            window: [i64; 2],
            routes_agree: bool,
            betti: serde_json::Value,
            pass: bool,
        }
        serde_json::to_value(Doc {
            schema: 1,
            n: self.n,
            field: self.field.to_string(),
            witness_ok: self.witness_ok,
            min_gen_degrees: &self.min_gen_degrees,
            has_degree_n_generator: self.has_degree_n_generator,
            reg_lower_bound: self.reg_lower_bound,
            window: [self.window.0 as i64, self.window.1],
            routes_agree: self.routes_agree,
            betti: self.betti.to_json(),
            pass: self.pass(),
        })
        .expect("serializable")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let (f, s) = match self.n {
            1 => ("x1*y1".to_string(), "x1".to_string()),
            2 => ("x1*y1 + x2*y2".to_string(), "x1*x2".to_string()),
            n => (format!("x1*y1 + ... + x{n}*y{n}"), format!("x1*...*x{n}")),
        };
        let _ = writeln!(out, "family: f = {f} over {}", self.field);
        let _ = writeln!(out, "witness {s} annihilates f: {}", self.witness_ok);
        let _ = writeln!(
            out,
            "minimal generators of 0:(f) by degree: {}",
            render_counts(&self.min_gen_degrees)
        );
        let _ = writeln!(
            out,
            "minimal generator in degree {}: {}",
            self.n, self.has_degree_n_generator
        );
        let _ = writeln!(out, "Betti table of E/(f):");
        out.push_str(&self.betti.render());
        let _ = writeln!(
            out,
            "window: i <= {}, j <= {}",
            self.window.0, self.window.1
        );
        if self.window.0 < DEFAULT_I_MAX {
            let _ = writeln!(
                out,
                "(homological degree {} skipped: dense size budget; pass --allow-large to compute it)",
                self.window.0 + 1
            );
        }
        let _ = writeln!(
            out,
            "annihilator and resolution agree: {}",
            self.routes_agree
        );
        let _ = writeln!(out, "reg >= {}", self.reg_lower_bound);
        let _ = writeln!(out, "{}", if self.pass() { "PASS" } else { "FAIL" });
        out
    }
}

pub(crate) fn render_counts(counts: &BTreeMap<Degree, usize>) -> String {
    if counts.is_empty() {
        return "{}".to_string();
    }
    let parts: Vec<String> = counts.iter().map(|(d, c)| format!("{d}: {c}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Checks the regularity bound for `f_n` over the field of `S`.
pub fn verify_theorem<S: Scalar>(
    n: usize,
    field: FieldSpec,
    guard: SizeGuard,
) -> Result<VerificationReport, FamilyError> {
    let inst = build_family::<S>(n, field)?;
    guard.check(2 * n, field)?;
    let witness_ok = check_witness(&inst);
    let min_gen_degrees = annihilator_generator_degrees(&inst.f, n)?;
    let has_degree_n_generator = min_gen_degrees.get(&(n as Degree)).copied().unwrap_or(0) > 0;

    let (i_max, j_max) = default_window(n);
    let budget = (!guard.allow_large).then_some(DENSE_COLUMN_BUDGET);
    let betti = resolve_bounded(
        &inst.context,
        std::slice::from_ref(&inst.f),
        i_max,
        j_max,
        budget,
    )?
    .table;
    let window = betti.window();
    let reg_lower_bound = betti.regularity_lower_bound()?;
    // first syzygies of (f) live in F_2 = ⊕ E(-j); the generator of F_1
    // sits in degree 2, so β_{2,j} counts annihilator generators of degree j - 2
    let routes_agree = (0..=n as Degree)
        .all(|d| betti.beta(2, d + 2) == min_gen_degrees.get(&d).copied().unwrap_or(0));

    Ok(VerificationReport {
        n,
        field,
        witness_ok,
        min_gen_degrees,
        has_degree_n_generator,
        reg_lower_bound,
        window,
        routes_agree,
        betti,
    })
}

/// What [`verify_remark`] asserts for a given characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RemarkMode {
    /// All minimal generators of `0:(f)` sit in degree `n`.
    CharZero,
    /// `f ∧ f = 0`, so `f` itself is a degree-2 syzygy.
    CharTwo,
    /// Data only.
    Exploratory,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemarkReport {
    pub n: usize,
    pub field: FieldSpec,
    pub mode: RemarkMode,
    /// Minimal generators of `0:(f)` over all degrees.
    pub min_gen_degrees: BTreeMap<Degree, usize>,
    pub f_squared_zero: bool,
    /// `None` in exploratory mode.
    pub holds: Option<bool>,
}

impl RemarkReport {
    pub fn support(&self) -> BTreeSet<Degree> {
        support(&self.min_gen_degrees)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: u32,
            n: usize,
            field: String,
            mode: RemarkMode,
            min_gen_degrees: &'a BTreeMap<Degree, usize>,
            f_squared_zero: bool,
            holds: Option<bool>,
        }
        serde_json::to_value(Doc {
            schema: 1,
            n: self.n,
            field: self.field.to_string(),
            mode: self.mode,
            min_gen_degrees: &self.min_gen_degrees,
            f_squared_zero: self.f_squared_zero,
            holds: self.holds,
        })
        .expect("serializable")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mode = match self.mode {
            RemarkMode::CharZero => "characteristic 0: all minimal syzygies in degree n",
            RemarkMode::CharTwo => "characteristic 2: f^2 = 0 gives a degree-2 syzygy",
            RemarkMode::Exploratory => "positive characteristic: exploratory",
        };
        let _ = writeln!(out, "syzygy degree check ({mode})");
        let _ = writeln!(
            out,
            "minimal generators of 0:(f), all degrees: {}",
            render_counts(&self.min_gen_degrees)
        );
        let _ = writeln!(out, "f^2 = 0: {}", self.f_squared_zero);
        let verdict = match self.holds {
            Some(true) => "holds",
            Some(false) => "FAILS",
            None => "not asserted",
        };
        let _ = writeln!(out, "syzygy degree check: {verdict}");
        out
    }
}

/// Checks the characteristic-dependent behaviour of the syzygies of `f_n`.
///
/// The annihilator is computed in every degree, so the characteristic-zero
/// check covers all first syzygies rather than only those of degree ≤ n.
pub fn verify_remark<S: Scalar>(
    n: usize,
    field: FieldSpec,
    guard: SizeGuard,
) -> Result<RemarkReport, FamilyError> {
    let inst = build_family::<S>(n, field)?;
    guard.check(2 * n, field)?;
    let min_gen_degrees = annihilator_generator_degrees(&inst.f, 2 * n)?;
    let f_squared_zero = annihilates(&inst.f, &inst.f);
    let supp = support(&min_gen_degrees);
    let (mode, holds) = match field.characteristic() {
        0 => (
            RemarkMode::CharZero,
            Some(supp == BTreeSet::from([n as Degree])),
        ),
        2 => (
            RemarkMode::CharTwo,
            Some(f_squared_zero && supp.contains(&2)),
        ),
        _ => (RemarkMode::Exploratory, None),
    };
    Ok(RemarkReport {
        n,
        field,
        mode,
        min_gen_degrees,
        f_squared_zero,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub p: u32,
    pub min_gen_degrees: BTreeMap<Degree, usize>,
}

/// Minimal-generator degrees of `0:(f_n)` over `F_p` for each prime given.
pub fn characteristic_scan(
    n: usize,
    primes: &[u64],
    guard: SizeGuard,
) -> Result<Vec<ScanRow>, FamilyError> {
    let fields = primes
        .iter()
        .map(|&p| FieldSpec::prime_field(p))
        .collect::<Result<Vec<_>, _>>()?;
    fields
        .into_iter()
        .map(|field| {
            let inst = build_family::<Fp>(n, field)?;
            guard.check(2 * n, field)?;
            Ok(ScanRow {
                p: field.characteristic(),
                min_gen_degrees: annihilator_generator_degrees(&inst.f, 2 * n)?,
            })
        })
        .collect()
}

/// [`verify_theorem`] with the scalar type chosen from `field`.
pub fn verify_theorem_in(
    n: usize,
    field: FieldSpec,
    guard: SizeGuard,
) -> Result<VerificationReport, FamilyError> {
    match field.kind() {
        FieldKind::Rationals => verify_theorem::<Rational>(n, field, guard),
        FieldKind::PrimeField => verify_theorem::<Fp>(n, field, guard),
    }
}

/// [`verify_remark`] with the scalar type chosen from `field`.
pub fn verify_remark_in(
    n: usize,
    field: FieldSpec,
    guard: SizeGuard,
) -> Result<RemarkReport, FamilyError> {
    match field.kind() {
        FieldKind::Rationals => verify_remark::<Rational>(n, field, guard),
        FieldKind::PrimeField => verify_remark::<Fp>(n, field, guard),
    }
}
