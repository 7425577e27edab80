//! Shared helpers for the integration suites: seeded random inputs and an
//! independent brute-force annihilator oracle.
//!
//! The oracle deliberately avoids the crate's monomial encoding, sign rule
//! and elimination: monomials are sorted index lists, signs come from
//! counting transpositions of a bubble sort, and ranks come from a plain
//! fraction-based Gaussian elimination.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::Rng;

use extreg::{AlgebraContext, Element, FieldSpec, Monomial, Scalar};

pub fn context(n_vars: usize, field: FieldSpec) -> Arc<AlgebraContext> {
    AlgebraContext::new((1..=n_vars).map(|i| format!("e{i}")), field).unwrap()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Random homogeneous element of degree `k` with small integer coefficients;
/// nonzero unless `allow_zero`.
pub fn random_homogeneous<S: Scalar>(
    rng: &mut StdRng,
    ctx: &Arc<AlgebraContext>,
    k: usize,
    allow_zero: bool,
) -> Element<S> {
    let spec = ctx.field();
    let monos = subsets(ctx.n_vars(), k);
    loop {
        let density: f64 = rng.gen_range(0.2..1.0);
        let mut terms: Vec<(Monomial, S)> = Vec::new();
        for m in &monos {
            if rng.gen_bool(density) {
                let c = rng.gen_range(-4i64..=4);
                terms.push((Monomial::from_indices(m).unwrap(), S::from_i64(&spec, c)));
            }
        }
        let e = Element::from_terms(ctx, terms);
        if allow_zero || !e.is_zero() {
            return e;
        }
    }
}

/// Random element mixing degrees `0..=n_vars`.
pub fn random_element<S: Scalar>(rng: &mut StdRng, ctx: &Arc<AlgebraContext>) -> Element<S> {
    let spec = ctx.field();
    let n = ctx.n_vars();
    let len = rng.gen_range(0..6);
    let terms: Vec<(Monomial, S)> = (0..len)
        .map(|_| {
            let mask: u64 = rng.gen_range(0..(1u64 << n));
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=5);
            let c = S::from_ratio(&spec, &BigInt::from(num), &BigInt::from(den))
                .unwrap_or_else(|_| S::from_i64(&spec, num));
            (Monomial::from_mask(mask), c)
        })
        .collect();
    Element::from_terms(ctx, terms)
}

pub fn random_field(rng: &mut StdRng) -> FieldSpec {
    match rng.gen_range(0..4) {
        0 => FieldSpec::rationals(),
        1 => FieldSpec::prime_field(2).unwrap(),
        2 => FieldSpec::prime_field(3).unwrap(),
        _ => FieldSpec::prime_field(7).unwrap(),
    }
}

/// A random field the scalar type `S` can represent.
pub fn random_field_for<S: Scalar>(rng: &mut StdRng) -> FieldSpec {
    loop {
        let f = random_field(rng);
        if S::supports(&f) {
            return f;
        }
    }
}

// ---------------------------------------------------------------------------
// Oracle

/// Arithmetic of the oracle: exact fractions, optionally reduced mod `p`.
#[derive(Clone, Copy)]
pub struct OracleField {
    p: Option<i64>,
}

impl OracleField {
    pub fn new(spec: FieldSpec) -> Self {
        OracleField {
            p: spec.modulus().map(i64::from),
        }
    }

    fn norm(&self, v: BigRational) -> BigRational {
        match self.p {
            None => v,
            Some(p) => {
                // numerator * denominator^(p-2) mod p
                let p = BigInt::from(p);
                let num = ((v.numer() % &p) + &p) % &p;
                let den = ((v.denom() % &p) + &p) % &p;
                let inv = den.modpow(&(&p - BigInt::from(2)), &p);
                BigRational::from_integer((num * inv) % &p)
            }
        }
    }

    fn inv(&self, v: &BigRational) -> BigRational {
        match self.p {
            None => v.recip(),
            Some(p) => {
                let p = BigInt::from(p);
                BigRational::from_integer(v.numer().modpow(&(&p - BigInt::from(2)), &p))
            }
        }
    }
}

/// Sign of sorting the concatenation `a ++ b`, or `None` if they overlap.
pub fn bubble_sign(a: &[usize], b: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// Rank by fraction-based Gaussian elimination.
pub fn oracle_rank(field: OracleField, mut rows: Vec<Vec<BigRational>>) -> usize {
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(pr) = (rank..rows.len()).find(|&r| !Zero::is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = field.inv(&rows[rank][col]);
        let pivot: Vec<BigRational> = rows[rank].iter().map(|x| field.norm(x * &inv)).collect();
        for r in 0..rows.len() {
            if r != rank && !Zero::is_zero(&rows[r][col]) {
                let factor = rows[r][col].clone();
                for c in 0..n_cols {
                    let v = &rows[r][c] - &factor * &pivot[c];
                    rows[r][c] = field.norm(v);
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// `dim {e ∈ E_d : e ∧ f = 0}` for each `d` in `0..=n_vars`, where `f` is
/// given by its integer-valued terms (sorted index list, coefficient).
pub fn oracle_annihilator_dims(
    n_vars: usize,
    spec: FieldSpec,
    f: &[(Vec<usize>, BigRational)],
) -> BTreeMap<usize, usize> {
    let field = OracleField::new(spec);
    let k = f.first().map_or(0, |(m, _)| m.len());
    let mut out = BTreeMap::new();
    for d in 0..=n_vars {
        let source = subsets(n_vars, d);
        let target: BTreeMap<Vec<usize>, usize> = if d + k <= n_vars {
            subsets(n_vars, d + k)
                .into_iter()
                .enumerate()
                .map(|(i, m)| (m, i))
                .collect()
        } else {
            BTreeMap::new()
        };
        // one row per source monomial: the image e_m ∧ f
        let rows: Vec<Vec<BigRational>> = source
            .iter()
            .map(|m| {
                let mut row = vec![<BigRational as Zero>::zero(); target.len()];
                for (t, c) in f {
                    if let Some((sign, merged)) = bubble_sign(m, t) {
                        let idx = target[&merged];
                        let v = &row[idx] + c * BigRational::from_integer(sign.into());
                        row[idx] = field.norm(v);
                    }
                }
                row
            })
            .collect();
        let rank = if target.is_empty() {
            0
        } else {
            oracle_rank(field, rows)
        };
        out.insert(d, source.len() - rank);
    }
    out
}

/// Terms of `e` as sorted index lists with rational coefficients, read from
/// the rendered coefficient so the oracle never touches crate arithmetic.
pub fn oracle_terms<S: Scalar>(e: &Element<S>) -> Vec<(Vec<usize>, BigRational)> {
    e.terms()
        .iter()
        .map(|(m, c)| {
            let mut idx = Vec::new();
            for i in 0..64 {
                if m.mask() >> i & 1 == 1 {
                    idx.push(i);
                }
            }
            let text = c.to_string();
            let v: BigRational = text.parse().unwrap();
            (idx, v)
        })
        .collect()
}
