//! Graded free modules over the exterior algebra, annihilators, minimal
//! generators and truncated minimal free resolutions.
//!
//! Modules are left modules. A homomorphism `F -> G` between free modules is
//! stored column-wise: the image of the k-th source generator is a vector
//! of algebra elements over the target generators, and a general element
//! `(e_k)` maps to `sum_k e_k ∧ column_k`. With this convention the kernel
//! of the single-entry map `(g)` is the left annihilator `{e : e ∧ g = 0}`.
//!
//! Everything is computed one internal degree at a time with dense exact
//! linear algebra, up to a caller-chosen degree bound `j_max`. Because
//! resolutions over the exterior algebra are infinite, the resulting Betti
//! tables are windows and the regularity they yield is a lower bound.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactla::{kernel_basis, EchelonBasis, Matrix};
use crate::extcore::{
    binomial_signed, monomials, wedge_monomials, AlgebraContext, AlgebraError, Element, Monomial,
};
use crate::scalars::Scalar;

/// Internal (polynomial) degree.
pub type Degree = i64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("the zero element is not allowed here")]
    ZeroElement,
    #[error("generator {0} has a nonzero constant term, so the ideal is the whole algebra")]
    UnitIdeal(String),
    #[error("map entry ({source_gen}, {target_gen}) is not homogeneous of degree {expected}")]
    NonHomogeneousEntry {
        source_gen: usize,
        target_gen: usize,
        expected: Degree,
    },
    #[error("map has {got} columns/entries, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("degree data is not contiguous: degree {0} is missing")]
    NonContiguous(Degree),
    #[error("degree data starts at {first} but the ambient module is nonzero below it")]
    MissingLowDegrees { first: Degree },
    #[error("Betti table is empty")]
    EmptyTable,
    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: Degree, max: usize },
}

/// A graded free module `⊕_k E(-a_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeModule {
    ctx: Arc<AlgebraContext>,
    twists: Vec<Degree>,
}

/// A vector of algebra elements, one per generator of a free module.
pub type ModuleElement<S> = Vec<Element<S>>;

impl FreeModule {
    pub fn new(ctx: &Arc<AlgebraContext>, twists: Vec<Degree>) -> Self {
        FreeModule {
            ctx: Arc::clone(ctx),
            twists,
        }
    }

    /// The algebra itself, generated in degree 0.
    pub fn cyclic(ctx: &Arc<AlgebraContext>) -> Self {
        Self::new(ctx, vec![0])
    }

    pub fn context(&self) -> &Arc<AlgebraContext> {
        &self.ctx
    }

    pub fn twists(&self) -> &[Degree] {
        &self.twists
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn min_twist(&self) -> Option<Degree> {
        self.twists.iter().copied().min()
    }

    pub fn max_twist(&self) -> Option<Degree> {
        self.twists.iter().copied().max()
    }

    /// Highest degree in which the module is nonzero.
    pub fn top_degree(&self) -> Option<Degree> {
        self.max_twist().map(|a| a + self.ctx.n_vars() as Degree)
    }

    fn component_dim(&self, k: usize, d: Degree) -> usize {
        binomial_signed(self.ctx.n_vars(), d - self.twists[k]) as usize
    }

    pub fn dim(&self, d: Degree) -> usize {
        (0..self.rank()).map(|k| self.component_dim(k, d)).sum()
    }

    /// Start of each generator's block in the degree-`d` coordinates.
    pub fn offsets(&self, d: Degree) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.rank());
        let mut acc = 0;
        for k in 0..self.rank() {
            out.push(acc);
            acc += self.component_dim(k, d);
        }
        out
    }

    fn check_vector<S: Scalar>(&self, v: &[Element<S>]) -> Result<(), ModuleError> {
        if v.len() != self.rank() {
            return Err(ModuleError::ShapeMismatch {
                expected: self.rank(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Coordinates of the degree-`d` part of `v`.
    pub fn coordinates<S: Scalar>(
        &self,
        v: &[Element<S>],
        d: Degree,
    ) -> Result<Vec<S>, ModuleError> {
        self.check_vector(v)?;
        let spec = self.ctx.field();
        let offsets = self.offsets(d);
        let mut out = vec![S::zero(&spec); self.dim(d)];
        for (k, e) in v.iter().enumerate() {
            let local = d - self.twists[k];
            for (m, c) in e.terms() {
                if m.degree() as Degree == local {
                    out[offsets[k] + m.rank()] = c.clone();
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`FreeModule::coordinates`].
    pub fn vector_from_coordinates<S: Scalar>(&self, d: Degree, coords: &[S]) -> ModuleElement<S> {
        assert_eq!(coords.len(), self.dim(d));
        let offsets = self.offsets(d);
        (0..self.rank())
            .map(|k| {
                let local = d - self.twists[k];
                if local < 0 {
                    return Element::zero(&self.ctx);
                }
                let basis = monomials(self.ctx.n_vars(), local as usize);
                let block = &coords[offsets[k]..offsets[k] + basis.len()];
                Element::from_terms(&self.ctx, basis.into_iter().zip(block.iter().cloned()))
            })
            .collect()
    }

    /// For each degree-`d` coordinate and each variable `v`, where `x_v ∧ -`
    /// sends it in degree `d + 1` (with sign), or `None` if it vanishes.
    fn variable_action(&self, d: Degree) -> Vec<Vec<Option<(bool, usize)>>> {
        let n = self.ctx.n_vars();
        let src = self.offsets(d);
        let dst = self.offsets(d + 1);
        let mut out = Vec::with_capacity(self.dim(d));
        for k in 0..self.rank() {
            let local = d - self.twists[k];
            if local < 0 {
                continue;
            }
            for m in monomials(n, local as usize) {
                debug_assert_eq!(out.len(), src[k] + m.rank());
                out.push(
                    (0..n)
                        .map(|v| {
                            wedge_monomials(Monomial::var(v), m)
                                .map(|(sign, p)| (sign < 0, dst[k] + p.rank()))
                        })
                        .collect(),
                );
            }
        }
        out
    }
}

/// Degree-`d` coordinates of `x_v ∧ w` for every variable `v`.
fn variable_multiples<S: Scalar>(
    action: &[Vec<Option<(bool, usize)>>],
    n_vars: usize,
    target_dim: usize,
    w: &[S],
    zero: &S,
) -> Vec<Vec<S>> {
    let mut out = vec![vec![zero.clone(); target_dim]; n_vars];
    for (i, c) in w.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (v, slot) in action[i].iter().enumerate() {
            if let Some((neg, j)) = slot {
                out[v][*j] = if *neg { -c.clone() } else { c.clone() };
            }
        }
    }
    out
}

/// A homogeneous (degree-preserving) map of graded free modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMap<S: Scalar> {
    source: FreeModule,
    target: FreeModule,
    columns: Vec<ModuleElement<S>>,
}

impl<S: Scalar> ModuleMap<S> {
    /// `columns[k][l]` must be zero or homogeneous of degree
    /// `source.twists[k] - target.twists[l]`.
    pub fn new(
        source: FreeModule,
        target: FreeModule,
        columns: Vec<ModuleElement<S>>,
    ) -> Result<Self, ModuleError> {
        if columns.len() != source.rank() {
            return Err(ModuleError::ShapeMismatch {
                expected: source.rank(),
                got: columns.len(),
            });
        }
        for (k, col) in columns.iter().enumerate() {
            target.check_vector(col)?;
            for (l, e) in col.iter().enumerate() {
                let expected = source.twists[k] - target.twists[l];
                let ok = expected >= 0 && e.is_homogeneous_of(expected as usize);
                if !e.is_zero() && !ok {
                    return Err(ModuleError::NonHomogeneousEntry {
                        source_gen: k,
                        target_gen: l,
                        expected,
                    });
                }
            }
        }
        Ok(ModuleMap {
            source,
            target,
            columns,
        })
    }

    pub fn source(&self) -> &FreeModule {
        &self.source
    }

    pub fn target(&self) -> &FreeModule {
        &self.target
    }

    pub fn columns(&self) -> &[ModuleElement<S>] {
        &self.columns
    }

    /// No entry is a nonzero scalar.
    pub fn is_minimal(&self) -> bool {
        self.columns
            .iter()
            .flatten()
            .all(|e| e.graded_component(0).is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().flatten().all(Element::is_zero)
    }

    /// Image of a source vector.
    pub fn apply(&self, v: &[Element<S>]) -> Result<ModuleElement<S>, ModuleError> {
        self.source.check_vector(v)?;
        let ctx = self.target.context();
        let mut out = vec![Element::zero(ctx); self.target.rank()];
        for (e, col) in v.iter().zip(&self.columns) {
            if e.is_zero() {
                continue;
            }
            for (l, entry) in col.iter().enumerate() {
                out[l] = out[l].add(&e.wedge(entry)?)?;
            }
        }
        Ok(out)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ModuleMap<S>) -> Result<ModuleMap<S>, ModuleError> {
        if next.source != self.target {
            return Err(ModuleError::ShapeMismatch {
                expected: self.target.rank(),
                got: next.source.rank(),
            });
        }
        let columns = self
            .columns
            .iter()
            .map(|c| next.apply(c))
            .collect::<Result<_, _>>()?;
        ModuleMap::new(self.source.clone(), next.target.clone(), columns)
    }

    /// Matrix of the map in internal degree `d`, in the modules' coordinates.
    pub fn matrix(&self, d: Degree) -> Matrix<S> {
        let ctx = self.source.context();
        let spec = ctx.field();
        let n = ctx.n_vars();
        let rows = self.target.dim(d);
        let tgt_offsets = self.target.offsets(d);
        let mut cols: Vec<Vec<S>> = Vec::with_capacity(self.source.dim(d));
        for (k, col) in self.columns.iter().enumerate() {
            let local = d - self.source.twists[k];
            if local < 0 {
                continue;
            }
            for m in monomials(n, local as usize) {
                let mut v = vec![S::zero(&spec); rows];
                for (l, entry) in col.iter().enumerate() {
                    for (t, c) in entry.terms() {
                        if let Some((sign, p)) = wedge_monomials(m, *t) {
                            let slot = &mut v[tgt_offsets[l] + p.rank()];
                            *slot = if sign < 0 {
                                slot.clone() - c.clone()
                            } else {
                                slot.add_ref(c)
                            };
                        }
                    }
                }
                cols.push(v);
            }
        }
        Matrix::from_columns(spec, rows, &cols)
    }
}

/// A graded submodule of a free module, given by a basis of each graded
/// piece (as columns of coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSubmodule<S: Scalar> {
    ambient: FreeModule,
    degree_bases: BTreeMap<Degree, Matrix<S>>,
}

impl<S: Scalar> GradedSubmodule<S> {
    pub fn new(ambient: FreeModule, degree_bases: BTreeMap<Degree, Matrix<S>>) -> Self {
        GradedSubmodule {
            ambient,
            degree_bases,
        }
    }

    pub fn ambient(&self) -> &FreeModule {
        &self.ambient
    }

    pub fn degree_bases(&self) -> &BTreeMap<Degree, Matrix<S>> {
        &self.degree_bases
    }

    pub fn dim(&self, d: Degree) -> usize {
        self.degree_bases.get(&d).map_or(0, Matrix::n_cols)
    }

    pub fn dims(&self) -> BTreeMap<Degree, usize> {
        self.degree_bases
            .iter()
            .map(|(d, m)| (*d, m.n_cols()))
            .collect()
    }

    /// Checks that `x_v ∧ b` lies in the next piece for every variable and
    /// basis vector, wherever both pieces are present.
    pub fn is_closed(&self) -> bool {
        let ctx = self.ambient.context();
        let spec = ctx.field();
        let zero = S::zero(&spec);
        self.degree_bases.iter().all(|(&d, basis)| {
            let Some(next) = self.degree_bases.get(&(d + 1)) else {
                return true;
            };
            let mut span = EchelonBasis::new(spec, next.n_rows());
            for c in next.columns() {
                span.insert(c);
            }
            let action = self.ambient.variable_action(d);
            basis.columns().iter().all(|b| {
                variable_multiples(&action, ctx.n_vars(), next.n_rows(), b, &zero)
                    .iter()
                    .all(|w| span.contains(w))
            })
        })
    }
}

/// Minimal generators found in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorsInDegree<S: Scalar> {
    pub count: usize,
    pub representatives: Vec<ModuleElement<S>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalGenerators<S: Scalar> {
    pub by_degree: BTreeMap<Degree, GeneratorsInDegree<S>>,
}

impl<S: Scalar> MinimalGenerators<S> {
    pub fn counts(&self) -> BTreeMap<Degree, usize> {
        self.by_degree.iter().map(|(d, g)| (*d, g.count)).collect()
    }

    /// Degrees with at least one minimal generator.
    pub fn support(&self) -> BTreeSet<Degree> {
        self.by_degree
            .iter()
            .filter(|(_, g)| g.count > 0)
            .map(|(d, _)| *d)
            .collect()
    }

    pub fn total(&self) -> usize {
        self.by_degree.values().map(|g| g.count).sum()
    }
}

/// Minimal generators of `sub`, degree by degree.
///
/// In degree `d` the generators complete `span{x_v ∧ b : b ∈ sub_{d-1}}` to a
/// basis of `sub_d`; the count is the difference of the dimensions. Degrees
/// below the lowest nonzero piece are omitted.
pub fn minimal_generators<S: Scalar>(
    sub: &GradedSubmodule<S>,
) -> Result<MinimalGenerators<S>, ModuleError> {
    let bases = &sub.degree_bases;
    let Some((&first, _)) = bases.iter().next() else {
        return Ok(MinimalGenerators {
            by_degree: BTreeMap::new(),
        });
    };
    let last = *bases.keys().next_back().unwrap();
    if let Some(missing) = (first..=last).find(|d| !bases.contains_key(d)) {
        return Err(ModuleError::NonContiguous(missing));
    }
    let Some(lowest) = bases.iter().find(|(_, m)| m.n_cols() > 0).map(|(d, _)| *d) else {
        return Ok(MinimalGenerators {
            by_degree: BTreeMap::new(),
        });
    };
    if lowest == first {
        if let Some(min_twist) = sub.ambient.min_twist() {
            if first > min_twist {
                return Err(ModuleError::MissingLowDegrees { first });
            }
        }
    }

    let ctx = sub.ambient.context();
    let spec = ctx.field();
    let n = ctx.n_vars();
    let degrees: Vec<Degree> = (lowest..=last).collect();
    let per_degree: Vec<GeneratorsInDegree<S>> = degrees
        .par_iter()
        .map(|&d| {
            let zero = S::zero(&spec);
            let basis = &bases[&d];
            let target_dim = basis.n_rows();
            let sub_dim = basis.n_cols();
            let mut span = EchelonBasis::new(spec, target_dim);
            if d > lowest {
                let action = sub.ambient.variable_action(d - 1);
                let prev = &bases[&(d - 1)];
                'fill: for j in 0..prev.n_cols() {
                    let b = prev.column(j);
                    for w in variable_multiples(&action, n, target_dim, &b, &zero) {
                        if span.rank() == sub_dim {
                            break 'fill;
                        }
                        span.insert(w);
                    }
                }
            }
            let mut reps = Vec::new();
            for j in 0..sub_dim {
                if span.rank() == sub_dim {
                    break;
                }
                let c = basis.column(j);
                if span.insert(c.clone()) {
                    reps.push(sub.ambient.vector_from_coordinates(d, &c));
                }
            }
            GeneratorsInDegree {
                count: reps.len(),
                representatives: reps,
            }
        })
        .collect();
    Ok(MinimalGenerators {
        by_degree: degrees.into_iter().zip(per_degree).collect(),
    })
}

/// Matrix of `E_d -> E_{d+m}`, `e ↦ e ∧ g`, for `g` homogeneous of degree `m`.
pub fn mult_map_matrix<S: Scalar>(g: &Element<S>, d: usize) -> Result<Matrix<S>, ModuleError> {
    let ctx = g.context();
    let n = ctx.n_vars();
    if d > n {
        return Err(ModuleError::DegreeOutOfRange {
            degree: d as Degree,
            max: n,
        });
    }
    let m = g.homogeneous_degree()?.ok_or(ModuleError::ZeroElement)?;
    let e = FreeModule::cyclic(ctx);
    let map = ModuleMap::new(
        FreeModule::new(ctx, vec![m as Degree]),
        e,
        vec![vec![g.clone()]],
    )?;
    // source generator sits in degree m, so internal degree d + m carries E_d
    Ok(map.matrix((d + m) as Degree))
}

/// The left annihilator `{e : e ∧ g = 0}` in degrees `0..=d_max`, as a
/// submodule of the algebra.
pub fn annihilator<S: Scalar>(
    g: &Element<S>,
    d_max: usize,
) -> Result<GradedSubmodule<S>, ModuleError> {
    if g.is_zero() {
        return Err(ModuleError::ZeroElement);
    }
    g.homogeneous_degree()?;
    let ctx = g.context();
    let spec = ctx.field();
    let top = d_max.min(ctx.n_vars());
    let bases: Vec<(Degree, Matrix<S>)> = (0..=top)
        .into_par_iter()
        .map(|d| {
            let m = mult_map_matrix(g, d)?;
            let ker = kernel_basis(&m);
            Ok((d as Degree, Matrix::from_columns(spec, ctx.dim(d), &ker)))
        })
        .collect::<Result<_, ModuleError>>()?;
    Ok(GradedSubmodule::new(
        FreeModule::cyclic(ctx),
        bases.into_iter().collect(),
    ))
}

/// Kernel of `phi` in every degree from the lowest source twist up to `j_max`.
pub fn kernel_submodule<S: Scalar>(phi: &ModuleMap<S>, j_max: Degree) -> GradedSubmodule<S> {
    let source = &phi.source;
    let spec = source.context().field();
    let bases: BTreeMap<Degree, Matrix<S>> = match source.min_twist() {
        None => BTreeMap::new(),
        Some(lo) => (lo..=j_max)
            .into_par_iter()
            .map(|d| {
                let ker = kernel_basis(&phi.matrix(d));
                (d, Matrix::from_columns(spec, source.dim(d), &ker))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect(),
    };
    GradedSubmodule::new(source.clone(), bases)
}

/// Image of `phi` in every degree from the lowest source twist up to
/// `j_max`, as a submodule of its target.
pub fn image_submodule<S: Scalar>(phi: &ModuleMap<S>, j_max: Degree) -> GradedSubmodule<S> {
    let target = &phi.target;
    let spec = target.context().field();
    let lo = target.min_twist().unwrap_or(0);
    let bases: BTreeMap<Degree, Matrix<S>> = (lo..=j_max)
        .into_par_iter()
        .map(|d| {
            let m = phi.matrix(d);
            let mut span = EchelonBasis::new(spec, m.n_rows());
            let kept: Vec<Vec<S>> = m
                .columns()
                .into_iter()
                .filter(|c| span.insert(c.clone()))
                .collect();
            (d, Matrix::from_columns(spec, m.n_rows(), &kept))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    GradedSubmodule::new(target.clone(), bases)
}

/// Builds the map from a free module on the minimal generators of `sub`.
fn generator_map<S: Scalar>(sub: &GradedSubmodule<S>) -> Result<ModuleMap<S>, ModuleError> {
    let gens = minimal_generators(sub)?;
    let mut twists = Vec::new();
    let mut columns = Vec::new();
    for (d, g) in gens.by_degree {
        for rep in g.representatives {
            twists.push(d);
            columns.push(rep);
        }
    }
    ModuleMap::new(
        FreeModule::new(sub.ambient.context(), twists),
        sub.ambient.clone(),
        columns,
    )
}

/// One step of a minimal resolution.
#[derive(Debug, Clone)]
pub struct SyzygyStep<S: Scalar> {
    /// `ψ: F_new -> phi.source`, mapping onto `ker(phi)` through `j_max`.
    pub map: ModuleMap<S>,
    pub kernel: GradedSubmodule<S>,
    /// The window reached the top degree of `phi.source`, so nothing was
    /// cut off; when false an empty `map` only means "nothing up to `j_max`".
    pub window_complete: bool,
}

/// Minimal generators of `ker(phi)` up to degree `j_max`.
pub fn syzygy_step<S: Scalar>(
    phi: &ModuleMap<S>,
    j_max: Degree,
) -> Result<SyzygyStep<S>, ModuleError> {
    let kernel = kernel_submodule(phi, j_max);
    let map = generator_map(&kernel)?;
    let window_complete = phi.source.top_degree().is_none_or(|top| j_max >= top);
    Ok(SyzygyStep {
        map,
        kernel,
        window_complete,
    })
}

/// Validated, deduplicated homogeneous generators of a proper ideal.
fn clean_generators<S: Scalar>(
    ctx: &Arc<AlgebraContext>,
    gens: &[Element<S>],
) -> Result<Vec<Element<S>>, ModuleError> {
    let mut out: Vec<Element<S>> = Vec::new();
    for g in gens {
        if g.context() != ctx {
            return Err(AlgebraError::ContextMismatch.into());
        }
        match g.homogeneous_degree()? {
            None => continue,
            Some(0) => return Err(ModuleError::UnitIdeal(g.to_string())),
            Some(_) => {}
        }
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// The first map of the minimal resolution of `E/I`: a free module on the
/// minimal generators of `I` mapping onto `I ⊆ E`, through degree `j_max`.
pub fn ideal_presentation<S: Scalar>(
    ctx: &Arc<AlgebraContext>,
    gens: &[Element<S>],
    j_max: Degree,
) -> Result<ModuleMap<S>, ModuleError> {
    let gens = clean_generators(ctx, gens)?;
    let twists = gens
        .iter()
        .map(|g| g.homogeneous_degree().map(|d| d.unwrap_or(0) as Degree))
        .collect::<Result<Vec<_>, _>>()?;
    let given = ModuleMap::new(
        FreeModule::new(ctx, twists),
        FreeModule::cyclic(ctx),
        gens.into_iter().map(|g| vec![g]).collect(),
    )?;
    generator_map(&image_submodule(&given, j_max))
}

/// Default cap on the degree-wise dimension of a module whose kernel is
/// computed densely (see [`resolve_bounded`]).
pub const DENSE_COLUMN_BUDGET: usize = 10_000;

/// A truncated minimal free resolution `… -> F_2 -> F_1 -> F_0 = E`.
#[derive(Debug, Clone)]
pub struct Resolution<S: Scalar> {
    /// `maps[i]` is `F_{i+1} -> F_i`.
    pub maps: Vec<ModuleMap<S>>,
    pub table: BettiTable,
    /// Homological degree that was requested but skipped because the dense
    /// computation would have exceeded the column budget. The table's window
    /// then stops one step earlier.
    pub skipped_from: Option<usize>,
}

/// Minimal free resolution of `E/I` for `I` generated by `gens`, through
/// homological degree `i_max` and internal degree `j_max`.
pub fn resolve<S: Scalar>(
    ctx: &Arc<AlgebraContext>,
    gens: &[Element<S>],
    i_max: usize,
    j_max: Degree,
) -> Result<Resolution<S>, ModuleError> {
    resolve_bounded(ctx, gens, i_max, j_max, None)
}

/// Like [`resolve`], but stops before any syzygy step whose source module
/// exceeds `max_columns` coordinates in some degree `≤ j_max`.
pub fn resolve_bounded<S: Scalar>(
    ctx: &Arc<AlgebraContext>,
    gens: &[Element<S>],
    i_max: usize,
    j_max: Degree,
    max_columns: Option<usize>,
) -> Result<Resolution<S>, ModuleError> {
    let mut table = BettiTable::new(i_max, j_max);
    let mut maps = Vec::new();
    if j_max >= 0 {
        table.entries.insert((0, 0), 1);
    }
    let gens = clean_generators(ctx, gens)?;
    if i_max == 0 || gens.is_empty() {
        return Ok(Resolution {
            maps,
            table,
            skipped_from: None,
        });
    }
    let mut skipped_from = None;
    let mut phi = ideal_presentation(ctx, &gens, j_max)?;
    for i in 1..=i_max {
        if i > 1 {
            let widest = phi.source.min_twist().map_or(0, |lo| {
                (lo..=j_max).map(|d| phi.source.dim(d)).max().unwrap_or(0)
            });
            if max_columns.is_some_and(|cap| widest > cap) {
                skipped_from = Some(i);
                table.window.0 = i - 1;
                break;
            }
            phi = syzygy_step(&phi, j_max)?.map;
        }
        if phi.source.rank() == 0 {
            break;
        }
        for &t in phi.source.twists() {
            *table.entries.entry((i, t)).or_insert(0) += 1;
        }
        maps.push(phi.clone());
    }
    Ok(Resolution {
        maps,
        table,
        skipped_from,
    })
}

pub fn betti_table<S: Scalar>(
    ctx: &Arc<AlgebraContext>,
    gens: &[Element<S>],
    i_max: usize,
    j_max: Degree,
) -> Result<BettiTable, ModuleError> {
    Ok(resolve(ctx, gens, i_max, j_max)?.table)
}

/// Graded Betti numbers `β_{i,j}` observed inside a window `i ≤ i_max`,
/// `j ≤ j_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    entries: BTreeMap<(usize, Degree), usize>,
    window: (usize, Degree),
}

#[derive(Serialize)]
struct BettiEntryJson {
    i: usize,
    j: Degree,
    beta: usize,
}

#[derive(Serialize)]
struct BettiJson {
    schema: u32,
    window: [i64; 2],
    entries: Vec<BettiEntryJson>,
    reg_lower_bound: Option<Degree>,
}

impl BettiTable {
    pub fn new(i_max: usize, j_max: Degree) -> Self {
        BettiTable {
            entries: BTreeMap::new(),
            window: (i_max, j_max),
        }
    }

    /// Builds a table from explicit `(i, j, β)` triples; zero counts are dropped.
    pub fn from_entries<I>(window: (usize, Degree), entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, Degree, usize)>,
    {
        BettiTable {
            entries: entries
                .into_iter()
                .filter(|e| e.2 > 0)
                .map(|(i, j, b)| ((i, j), b))
                .collect(),
            window,
        }
    }

    pub fn window(&self) -> (usize, Degree) {
        self.window
    }

    pub fn beta(&self, i: usize, j: Degree) -> usize {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    /// `(i, j, β)` triples in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Degree, usize)> + '_ {
        self.entries.iter().map(|(&(i, j), &b)| (i, j, b))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `max(j - i)` over nonzero entries. The table is a window of an
    /// infinite resolution, so this only bounds the regularity from below.
    pub fn regularity_lower_bound(&self) -> Result<Degree, ModuleError> {
        self.entries
            .keys()
            .map(|&(i, j)| j - i as Degree)
            .max()
            .ok_or(ModuleError::EmptyTable)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = BettiJson {
            schema: 1,
            window: [self.window.0 as i64, self.window.1],
            entries: self
                .entries()
                .map(|(i, j, beta)| BettiEntryJson { i, j, beta })
                .collect(),
            reg_lower_bound: self.regularity_lower_bound().ok(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    /// Diagonal layout: column `i`, row `j - i`, dots for zeros, with a
    /// totals row on top.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if self.entries.is_empty() {
            out.push_str("(empty)\n");
            return out;
        }
        let max_i = self.entries.keys().map(|k| k.0).max().unwrap();
        let rows: BTreeSet<Degree> = self.entries.keys().map(|&(i, j)| j - i as Degree).collect();
        let (lo, hi) = (*rows.first().unwrap(), *rows.last().unwrap());
        let totals: Vec<usize> = (0..=max_i)
            .map(|i| self.entries().filter(|e| e.0 == i).map(|e| e.2).sum())
            .collect();
        let cell = |i: usize, r: Degree| match self.beta(i, r + i as Degree) {
            0 => ".".to_string(),
            b => b.to_string(),
        };
        let widths: Vec<usize> = (0..=max_i)
            .map(|i| {
                (lo..=hi)
                    .map(|r| cell(i, r).len())
                    .chain([i.to_string().len(), totals[i].to_string().len()])
                    .max()
                    .unwrap()
            })
            .collect();
        let label_width = (lo..=hi)
            .map(|r| format!("{r}:").len())
            .chain(["total:".len()])
            .max()
            .unwrap();
        let mut line = |label: &str, cells: Vec<String>| {
            let mut s = format!("{label:>label_width$}");
            for (c, w) in cells.iter().zip(&widths) {
                let _ = write!(s, " {c:>w$}");
            }
            out.push_str(s.trim_end());
            out.push('\n');
        };
        line("", (0..=max_i).map(|i| i.to_string()).collect());
        line("total:", totals.iter().map(usize::to_string).collect());
        for r in lo..=hi {
            line(&format!("{r}:"), (0..=max_i).map(|i| cell(i, r)).collect());
        }
        out
    }
}
