//! The exterior algebra on N ordered generators.
//!
//! A monomial is a set of generator indices stored as a 64-bit mask. The
//! canonical form of `x_{i1} ∧ … ∧ x_{id}` lists indices in ascending order,
//! and the product of two disjoint monomials carries the parity of the
//! number of inversions between them. Overlapping monomials multiply to
//! zero in every characteristic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::scalars::{FieldSpec, Scalar};

pub const MAX_VARS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("number of variables must be between 1 and {MAX_VARS}, got {0}")]
    VariableCount(usize),
    #[error("duplicate variable name '{0}'")]
    DuplicateVariable(String),
    #[error("invalid variable name '{0}'")]
    InvalidVariable(String),
    #[error("elements live in different algebras")]
    ContextMismatch,
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },
}

/// Binomial coefficients C(n, k) for 0 <= n, k <= 64.
fn binomial_table() -> &'static [[u64; 65]; 65] {
    static TABLE: OnceLock<Box<[[u64; 65]; 65]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; 65]; 65]);
        for n in 0..=64 {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1].saturating_add(t[n - 1][k]);
            }
        }
        t
    })
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n || n > 64 {
        return 0;
    }
    binomial_table()[n][k]
}

/// `C(n, k)` with a signed lower index; zero outside `0..=n`.
pub fn binomial_signed(n: usize, k: i64) -> u64 {
    if k < 0 {
        0
    } else {
        binomial(n, k as usize)
    }
}

/// A squarefree product of generators, as a bitmask over generator indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_mask(mask: u64) -> Self {
        Monomial(mask)
    }

    pub fn var(i: usize) -> Self {
        assert!(i < MAX_VARS);
        Monomial(1u64 << i)
    }

    /// Builds a monomial from distinct indices; `None` on a repeat.
    pub fn from_indices(indices: &[usize]) -> Option<Self> {
        let mut mask = 0u64;
        for &i in indices {
            assert!(i < MAX_VARS);
            let bit = 1u64 << i;
            if mask & bit != 0 {
                return None;
            }
            mask |= bit;
        }
        Some(Monomial(mask))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    /// Indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    /// Position of this monomial within `basis(_, degree)`; ascending masks
    /// of fixed popcount are in colexicographic order.
    pub fn rank(self) -> usize {
        self.indices()
            .enumerate()
            .map(|(t, pos)| binomial(pos, t + 1) as usize)
            .sum()
    }
}

/// Product of two monomials in canonical form, `None` when they share a
/// generator.
pub fn wedge_monomials(a: Monomial, b: Monomial) -> Option<(i8, Monomial)> {
    if a.0 & b.0 != 0 {
        return None;
    }
    let mut inversions = 0u32;
    for j in b.indices() {
        // generators of `a` sitting above j must move past it
        inversions += if j == 63 {
            0
        } else {
            (a.0 >> (j + 1)).count_ones()
        };
    }
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Some((sign, Monomial(a.0 | b.0)))
}

/// All degree-`d` monomials in `n` generators, ascending as masks.
pub fn monomials(n: usize, d: usize) -> Vec<Monomial> {
    assert!(n <= MAX_VARS);
    if d > n {
        return Vec::new();
    }
    if d == 0 {
        return vec![Monomial::ONE];
    }
    let mut out = Vec::with_capacity(binomial(n, d) as usize);
    let limit: u128 = 1u128 << n;
    let mut v: u128 = (1u128 << d) - 1;
    while v < limit {
        out.push(Monomial(v as u64));
        // Gosper's hack
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Ordered generators and coefficient field of an exterior algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraContext {
    names: Vec<String>,
    field: FieldSpec,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl AlgebraContext {
    pub fn new<I, T>(names: I, field: FieldSpec) -> Result<Arc<Self>, AlgebraError>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_VARS {
            return Err(AlgebraError::VariableCount(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_identifier(n) {
                return Err(AlgebraError::InvalidVariable(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(AlgebraError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Arc::new(AlgebraContext { names, field }))
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `dim E_d`.
    pub fn dim(&self, d: usize) -> usize {
        binomial(self.n_vars(), d) as usize
    }

    pub fn basis(&self, d: usize) -> Vec<Monomial> {
        monomials(self.n_vars(), d)
    }

    fn render_monomial(&self, m: Monomial, out: &mut String) {
        for (k, i) in m.indices().enumerate() {
            if k > 0 {
                out.push('*');
            }
            out.push_str(&self.names[i]);
        }
    }
}

/// Monomial basis of `E_d`, ascending as masks.
pub fn basis(ctx: &AlgebraContext, d: usize) -> Vec<Monomial> {
    ctx.basis(d)
}

/// An element of the exterior algebra: a finite sum of monomials with
/// nonzero coefficients.
#[derive(Clone)]
pub struct Element<S: Scalar> {
    ctx: Arc<AlgebraContext>,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> PartialEq for Element<S> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx) && self.terms == other.terms
    }
}

impl<S: Scalar> Eq for Element<S> {}

impl<S: Scalar> fmt::Debug for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self)
    }
}

impl<S: Scalar> Element<S> {
    pub fn zero(ctx: &Arc<AlgebraContext>) -> Self {
        assert!(
            S::supports(&ctx.field),
            "scalar type does not match field {}",
            ctx.field
        );
        Element {
            ctx: Arc::clone(ctx),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<AlgebraContext>) -> Self {
        Self::monomial(ctx, Monomial::ONE, S::one(&ctx.field))
    }

    pub fn monomial(ctx: &Arc<AlgebraContext>, m: Monomial, c: S) -> Self {
        let mut e = Self::zero(ctx);
        assert!(m.mask().checked_shr(ctx.n_vars() as u32).unwrap_or(0) == 0);
        if !c.is_zero() {
            e.terms.insert(m, c);
        }
        e
    }

    /// The generator with index `i`.
    pub fn var(ctx: &Arc<AlgebraContext>, i: usize) -> Self {
        assert!(i < ctx.n_vars());
        Self::monomial(ctx, Monomial::var(i), S::one(&ctx.field))
    }

    /// Sums the given terms, dropping anything that cancels.
    pub fn from_terms<I>(ctx: &Arc<AlgebraContext>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, S)>,
    {
        let mut e = Self::zero(ctx);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn context(&self) -> &Arc<AlgebraContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, S> {
        &self.terms
    }

    pub fn coefficient(&self, m: Monomial) -> S {
        self.terms
            .get(&m)
            .cloned()
            .unwrap_or_else(|| S::zero(&self.ctx.field))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.add_ref(&c);
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn same_context(&self, other: &Self) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(AlgebraError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Element {
            ctx: Arc::clone(&self.ctx),
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        Element {
            ctx: Arc::clone(&self.ctx),
            terms: self.terms.iter().map(|(m, a)| (*m, a.mul_ref(c))).collect(),
        }
    }

    /// `self ∧ other`.
    pub fn wedge(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_context(other)?;
        let mut out = Self::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, m)) = wedge_monomials(*ma, *mb) {
                    let c = ca.mul_ref(cb);
                    out.add_term(m, if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `m ∧ self` for a single monomial, skipping the generic double loop.
    pub fn left_mul_monomial(&self, m: Monomial) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (mb, cb) in &self.terms {
            if let Some((sign, p)) = wedge_monomials(m, *mb) {
                let c = if sign < 0 { -cb.clone() } else { cb.clone() };
                out.terms.insert(p, c);
            }
        }
        out
    }

    /// The degree-`d` part.
    pub fn graded_component(&self, d: usize) -> Self {
        Element {
            ctx: Arc::clone(&self.ctx),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Degree of a nonzero homogeneous element; `None` for zero.
    pub fn homogeneous_degree(&self) -> Result<Option<usize>, AlgebraError> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Ok(None);
        };
        let d = first.degree();
        if it.all(|m| m.degree() == d) {
            Ok(Some(d))
        } else {
            Err(AlgebraError::Inhomogeneous)
        }
    }

    /// Coordinates of the degree-`d` component in `basis(ctx, d)`.
    pub fn coordinates(&self, d: usize) -> Vec<S> {
        let mut v = vec![S::zero(&self.ctx.field); self.ctx.dim(d)];
        for (m, c) in &self.terms {
            if m.degree() == d {
                v[m.rank()] = c.clone();
            }
        }
        v
    }

    /// Inverse of [`Element::coordinates`].
    pub fn from_coordinates(ctx: &Arc<AlgebraContext>, d: usize, coords: &[S]) -> Self {
        let basis = ctx.basis(d);
        assert_eq!(basis.len(), coords.len());
        let mut e = Self::zero(ctx);
        for (m, c) in basis.into_iter().zip(coords) {
            if !c.is_zero() {
                e.terms.insert(m, c.clone());
            }
        }
        e
    }
}

impl<S: Scalar> fmt::Display for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = if negative { -c.clone() } else { c.clone() };
            match (k, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if *m == Monomial::ONE {
                out.push_str(&magnitude.to_string());
            } else {
                if !magnitude.is_one() {
                    out.push_str(&magnitude.to_string());
                    out.push('*');
                }
                self.ctx.render_monomial(*m, &mut out);
            }
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Fp, Rational};

    fn ctx4() -> Arc<AlgebraContext> {
        AlgebraContext::new(["x1", "x2", "y1", "y2"], FieldSpec::rationals()).unwrap()
    }

    fn m(ix: &[usize]) -> Monomial {
        Monomial::from_indices(ix).unwrap()
    }

    /// Sign of sorting the concatenation by adjacent swaps.
    fn bubble_sign(a: &[usize], b: &[usize]) -> Option<i8> {
        let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
        let mut swaps = 0;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] == v[j + 1] {
                    return None;
                }
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    swaps += 1;
                }
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(if swaps % 2 == 0 { 1 } else { -1 })
    }

    #[test]
    fn wedge_monomial_examples() {
        assert_eq!(wedge_monomials(m(&[0]), m(&[0])), None);
        assert_eq!(wedge_monomials(m(&[1]), m(&[0])), Some((-1, m(&[0, 1]))));
        assert_eq!(bubble_sign(&[0, 2], &[1]), Some(-1));
        assert_eq!(
            wedge_monomials(m(&[0, 2]), m(&[1])),
            Some((-1, m(&[0, 1, 2])))
        );
    }

    #[test]
    fn wedge_sign_matches_bubble_sort() {
        let all: Vec<Monomial> = (0..=5).flat_map(|d| monomials(5, d)).collect();
        for a in &all {
            for b in &all {
                let ia: Vec<usize> = a.indices().collect();
                let ib: Vec<usize> = b.indices().collect();
                let got = wedge_monomials(*a, *b).map(|(s, _)| s);
                assert_eq!(got, bubble_sign(&ia, &ib), "{ia:?} {ib:?}");
            }
        }
        // high bit edge
        assert_eq!(
            wedge_monomials(Monomial::var(63), Monomial::var(0)),
            Some((-1, Monomial::from_mask(1 | 1 << 63)))
        );
    }

    #[test]
    fn f_squared() {
        let ctx = ctx4();
        let f = Element::<Rational>::from_terms(
            &ctx,
            [
                (m(&[0, 2]), Rational::from_integer(1.into())),
                (m(&[1, 3]), Rational::from_integer(1.into())),
            ],
        );
        let s = Element::<Rational>::monomial(&ctx, m(&[0, 1]), Rational::from_integer(1.into()));
        assert!(s.wedge(&f).unwrap().is_zero());
        let ff = f.wedge(&f).unwrap();
        assert_eq!(ff.len(), 1);
        assert_eq!(
            ff.coefficient(m(&[0, 1, 2, 3])),
            Rational::from_integer((-2).into())
        );
        assert_eq!(f.to_string(), "x1*y1 + x2*y2");
    }

    #[test]
    fn f_squared_vanishes_in_char_two() {
        let f2 = FieldSpec::prime_field(2).unwrap();
        let ctx = AlgebraContext::new(["x1", "x2", "x3", "y1", "y2", "y3"], f2).unwrap();
        let one = Fp::one(&f2);
        let f = Element::from_terms(&ctx, (0..3).map(|i| (m(&[i, i + 3]), one)));
        assert!(f.wedge(&f).unwrap().is_zero());
    }

    #[test]
    fn graded_components() {
        let ctx = ctx4();
        let one = Rational::from_integer(1.into());
        let f = Element::from_terms(&ctx, [(m(&[0, 2]), one.clone()), (m(&[1, 3]), one.clone())]);
        assert_eq!(f.graded_component(2), f);
        assert!(f.graded_component(1).is_zero());
        let g = Element::from_terms(&ctx, [(m(&[0]), one.clone()), (m(&[0, 2]), one.clone())]);
        assert_eq!(g.graded_component(2).to_string(), "x1*y1");
        assert_eq!(g.homogeneous_degree(), Err(AlgebraError::Inhomogeneous));
        assert_eq!(f.homogeneous_degree(), Ok(Some(2)));
    }

    #[test]
    fn basis_sizes_and_ranks() {
        let ctx = ctx4();
        assert_eq!(basis(&ctx, 0), vec![Monomial::ONE]);
        assert_eq!(basis(&ctx, 2).len(), 6);
        assert!(basis(&ctx, 5).is_empty());
        for n in 0..=12 {
            for d in 0..=n {
                let b = monomials(n, d);
                assert_eq!(b.len() as u64, binomial(n, d));
                assert!(b.windows(2).all(|w| w[0] < w[1]));
                for (i, mono) in b.iter().enumerate() {
                    assert_eq!(mono.degree(), d);
                    assert_eq!(mono.rank(), i);
                }
            }
        }
        assert_eq!(monomials(64, 1).len(), 64);
        assert_eq!(monomials(64, 64), vec![Monomial::from_mask(u64::MAX)]);
    }

    #[test]
    fn context_validation() {
        let q = FieldSpec::rationals();
        assert!(AlgebraContext::new(Vec::<String>::new(), q).is_err());
        assert_eq!(
            AlgebraContext::new(["a", "a"], q).unwrap_err(),
            AlgebraError::DuplicateVariable("a".into())
        );
        assert!(AlgebraContext::new(["1a"], q).is_err());
        let many: Vec<String> = (0..65).map(|i| format!("v{i}")).collect();
        assert_eq!(
            AlgebraContext::new(many, q).unwrap_err(),
            AlgebraError::VariableCount(65)
        );
    }

    #[test]
    fn rendering() {
        let ctx = ctx4();
        let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let e = Element::from_terms(
            &ctx,
            [
                (Monomial::ONE, q(-1, 2)),
                (m(&[0, 3]), q(2, 3)),
                (m(&[1, 2]), q(-1, 1)),
            ],
        );
        assert_eq!(e.to_string(), "-1/2 - x2*y1 + 2/3*x1*y2");
        assert_eq!(Element::<Rational>::zero(&ctx).to_string(), "0");
    }

    #[test]
    fn context_mismatch() {
        let a = Element::<Rational>::var(&ctx4(), 0);
        let other = AlgebraContext::new(["a", "b"], FieldSpec::rationals()).unwrap();
        let b = Element::<Rational>::var(&other, 0);
        assert_eq!(a.wedge(&b), Err(AlgebraError::ContextMismatch));
    }
}
