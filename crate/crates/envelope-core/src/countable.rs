//! Finitely-describable countably infinite conditioning structures.
//!
//! A [`ProfileModel`] describes a countable partition of conditioning cells
//! by finitely many ingredients: named cells with explicit prior mass and
//! strategy row, and infinite profiles whose strategy values along the tail
//! are certified per column by a [`TailSpec`] (declared exceptional cells
//! with exact values, plus liminf/limsup/inf/sup of the sequence).  The prior
//! lives on an algebra of profile groups; finite sets of cells are null, so
//! diffuse group weight can only be caught by events covering whole tails.
//!
//! Every operation below computes the exact latent value whenever the
//! certificates determine it and fails with `NotDescribable` otherwise; no
//! answer is ever approximated silently.  Conglomerability checks run on the
//! finite quotient whose atoms are named cells, declared exceptional cells,
//! and one tail direction per prior group and column.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{AtomSpace, Event, Subalgebra};
use crate::assessment::{validate_full_conditional, LayeredConditional, Violation};
use crate::envelopes::{CaseTag, EnvelopeResult};
use crate::rational::{q0, q1, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountableError {
    #[error("model is malformed: {0}")]
    BadModel(String),
    #[error("not describable: {0}")]
    NotDescribable(String),
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    #[error("candidate joint is inconsistent: {0}")]
    InconsistentCandidate(String),
    #[error("describable quotient too large to enumerate")]
    QuotientTooLarge,
    #[error("too many diffuse-weight allocations to enumerate")]
    AllocationTooLarge,
    #[error("conditioning event contains no cells")]
    EmptyConditioning,
}

/// Certificate for one bounded rational sequence: the strategy values of one
/// column along one profile's cells.  Finitely many declared exceptional
/// cells carry exact values; the rest of the sequence is pinned by its
/// liminf, limsup, infimum, and supremum, with attainment flags.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSpec {
    pub exceptions: BTreeMap<u64, Q>,
    pub liminf: Q,
    pub limsup: Q,
    pub inf_value: Q,
    pub sup_value: Q,
    pub inf_attained: bool,
    pub sup_attained: bool,
}

impl TailSpec {
    /// The constant sequence, with no exceptional cells.
    pub fn constant(v: Q) -> Self {
        TailSpec {
            exceptions: BTreeMap::new(),
            liminf: v.clone(),
            limsup: v.clone(),
            inf_value: v.clone(),
            sup_value: v,
            inf_attained: true,
            sup_attained: true,
        }
    }

    fn validate(&self, at: &str) -> Result<(), CountableError> {
        let bad = |msg: String| Err(CountableError::BadModel(format!("{at}: {msg}")));
        if self.inf_value < q0() || self.sup_value > q1() {
            return bad("values must lie in [0,1]".into());
        }
        if !(self.inf_value <= self.liminf
            && self.liminf <= self.limsup
            && self.limsup <= self.sup_value)
        {
            return bad("need inf <= liminf <= limsup <= sup".into());
        }
        for (i, v) in &self.exceptions {
            if v < &self.inf_value || v > &self.sup_value {
                return bad(format!("exception {i} lies outside [inf, sup]"));
            }
        }
        // A value strictly below the liminf occurs at finitely many cells, so
        // the infimum is attained there and at least one such cell must be
        // declared; otherwise restrictions could never account for it.
        if self.inf_value < self.liminf
            && !(self.inf_attained && self.exceptions.values().any(|v| *v == self.inf_value))
        {
            return bad("infimum below liminf requires a declared attaining exception".into());
        }
        if self.sup_value > self.limsup
            && !(self.sup_attained && self.exceptions.values().any(|v| *v == self.sup_value))
        {
            return bad("supremum above limsup requires a declared attaining exception".into());
        }
        Ok(())
    }

    /// Certificate of the pointwise complement 1 − x_i.
    fn complemented(&self) -> TailSpec {
        TailSpec {
            exceptions: self
                .exceptions
                .iter()
                .map(|(i, v)| (*i, q1() - v))
                .collect(),
            liminf: q1() - &self.limsup,
            limsup: q1() - &self.liminf,
            inf_value: q1() - &self.sup_value,
            sup_value: q1() - &self.inf_value,
            inf_attained: self.sup_attained,
            sup_attained: self.inf_attained,
        }
    }
}

/// A distinguished single cell with explicit prior mass and strategy row.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedAtom {
    pub label: String,
    pub mass: Q,
    pub row: Vec<Q>,
}

/// One infinite class of cells, certified per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub label: String,
    pub sigma: Vec<TailSpec>,
}

/// A countable conditioning partition in finite form.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileModel {
    n_cols: usize,
    named: Vec<NamedAtom>,
    profiles: Vec<Profile>,
    cells: Subalgebra,
    diffuse_weight: Vec<Q>,
    /// Per profile, the sorted declared exceptional indices (shared by all
    /// columns of that profile).
    exception_index: Vec<Vec<u64>>,
}

impl ProfileModel {
    pub fn new(
        n_cols: usize,
        named: Vec<NamedAtom>,
        profiles: Vec<Profile>,
        cells: Subalgebra,
        diffuse_weight: Vec<Q>,
    ) -> Result<Self, CountableError> {
        let bad = |msg: String| Err(CountableError::BadModel(msg));
        if n_cols == 0 || n_cols > 32 {
            return bad(format!("{n_cols} columns (supported range: 1..=32)"));
        }
        if profiles.is_empty() {
            return bad("at least one profile is required".into());
        }
        let mut labels = std::collections::BTreeSet::new();
        for a in &named {
            if !labels.insert(a.label.clone()) {
                return bad(format!("duplicate label {:?}", a.label));
            }
            if a.mass < q0() {
                return bad(format!("named cell {:?} has negative mass", a.label));
            }
            if a.row.len() != n_cols {
                return bad(format!("named cell {:?} row has wrong width", a.label));
            }
            if a.row.iter().any(|v| v < &q0()) || a.row.iter().sum::<Q>() != q1() {
                return bad(format!("named cell {:?} row is not a probability", a.label));
            }
        }
        let mut exception_index = Vec::with_capacity(profiles.len());
        for p in &profiles {
            if !labels.insert(p.label.clone()) {
                return bad(format!("duplicate label {:?}", p.label));
            }
            if p.sigma.len() != n_cols {
                return bad(format!("profile {:?} needs one tail spec per column", p.label));
            }
            let keys: Vec<u64> = p.sigma[0].exceptions.keys().copied().collect();
            for (j, s) in p.sigma.iter().enumerate() {
                s.validate(&format!("profile {:?}, column {}", p.label, j + 1))?;
                if s.exceptions.keys().copied().collect::<Vec<_>>() != keys {
                    return bad(format!(
                        "profile {:?}: exception indices differ across columns",
                        p.label
                    ));
                }
            }
            for key in &keys {
                let total: Q = p.sigma.iter().map(|s| s.exceptions[key].clone()).sum();
                if total != q1() {
                    return bad(format!(
                        "profile {:?}: exception {key} values sum to {total}, not 1",
                        p.label
                    ));
                }
            }
            let lsum: Q = p.sigma.iter().map(|s| s.liminf.clone()).sum();
            let usum: Q = p.sigma.iter().map(|s| s.limsup.clone()).sum();
            if lsum > q1() || usum < q1() {
                return bad(format!(
                    "profile {:?}: column liminfs must sum to at most 1 and limsups to at least 1",
                    p.label
                ));
            }
            exception_index.push(keys);
        }
        if cells.n_universe() != profiles.len() {
            return bad("prior subalgebra must partition the profile set".into());
        }
        if diffuse_weight.len() != cells.n_blocks() {
            return bad("one diffuse weight per prior block is required".into());
        }
        if diffuse_weight.iter().any(|w| w < &q0()) {
            return bad("negative diffuse weight".into());
        }
        let total: Q =
            named.iter().map(|a| a.mass.clone()).sum::<Q>() + diffuse_weight.iter().sum::<Q>();
        if total != q1() {
            return bad(format!("named masses and diffuse weights sum to {total}, not 1"));
        }
        Ok(ProfileModel { n_cols, named, profiles, cells, diffuse_weight, exception_index })
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn named(&self) -> &[NamedAtom] {
        &self.named
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn cells(&self) -> &Subalgebra {
        &self.cells
    }

    pub fn diffuse_weight(&self, b: usize) -> &Q {
        &self.diffuse_weight[b]
    }

    pub fn exception_indices(&self, p: usize) -> &[u64] {
        &self.exception_index[p]
    }

    pub fn named_index(&self, label: &str) -> Option<usize> {
        self.named.iter().position(|a| a.label == label)
    }

    pub fn profile_index(&self, label: &str) -> Option<usize> {
        self.profiles.iter().position(|p| p.label == label)
    }

    fn full_mask(&self) -> u32 {
        full_mask(self.n_cols)
    }

    /// Exact spread of the event columns at a named cell.
    fn named_sigma(&self, c: usize, mask: u32) -> Q {
        (0..self.n_cols)
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| self.named[c].row[j].clone())
            .sum()
    }

    /// Exact strategy value at a declared exceptional cell.
    fn exception_sigma(&self, p: usize, t: usize, mask: u32) -> Q {
        let key = self.exception_index[p][t];
        (0..self.n_cols)
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| self.profiles[p].sigma[j].exceptions[&key].clone())
            .sum()
    }
}

fn full_mask(n_cols: usize) -> u32 {
    if n_cols == 32 {
        u32::MAX
    } else {
        (1u32 << n_cols) - 1
    }
}

/// An event over a profile model, as column masks per slot: one mask per
/// named cell, one per profile tail (applying to every non-exceptional cell
/// of the profile), and one per declared exceptional cell.  Closed under the
/// Boolean operations, so every finite combination of columns, profiles,
/// named cells, and declared exceptional cells is representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CEvent {
    n_cols: usize,
    named: Vec<u32>,
    tails: Vec<u32>,
    exceptions: Vec<Vec<u32>>,
}

impl CEvent {
    pub fn empty(model: &ProfileModel) -> Self {
        CEvent {
            n_cols: model.n_cols,
            named: vec![0; model.named.len()],
            tails: vec![0; model.profiles.len()],
            exceptions: model.exception_index.iter().map(|k| vec![0; k.len()]).collect(),
        }
    }

    pub fn full(model: &ProfileModel) -> Self {
        CEvent::empty(model).complement()
    }

    /// All atoms of column `j` (0-based), across every cell.
    pub fn column(model: &ProfileModel, j: usize) -> Self {
        let mut e = CEvent::empty(model);
        let bit = 1u32 << j;
        assert!(j < model.n_cols, "column index out of range");
        for m in e.named.iter_mut().chain(e.tails.iter_mut()) {
            *m = bit;
        }
        for exc in &mut e.exceptions {
            for m in exc.iter_mut() {
                *m = bit;
            }
        }
        e
    }

    /// The whole named cell `c`.
    pub fn named_cell(model: &ProfileModel, c: usize) -> Self {
        let mut e = CEvent::empty(model);
        e.named[c] = model.full_mask();
        e
    }

    /// Every cell of profile `p`, declared exceptional cells included.
    pub fn profile_event(model: &ProfileModel, p: usize) -> Self {
        let mut e = CEvent::tail_only(model, p);
        for m in &mut e.exceptions[p] {
            *m = model.full_mask();
        }
        e
    }

    /// The non-exceptional cells of profile `p`.
    pub fn tail_only(model: &ProfileModel, p: usize) -> Self {
        let mut e = CEvent::empty(model);
        e.tails[p] = model.full_mask();
        e
    }

    /// The single declared exceptional cell at position `t` of profile `p`.
    pub fn exception_cell(model: &ProfileModel, p: usize, t: usize) -> Self {
        let mut e = CEvent::empty(model);
        e.exceptions[p][t] = model.full_mask();
        e
    }

    /// Union of whole profiles forming prior block `b`.
    pub fn block_event(model: &ProfileModel, b: usize) -> Self {
        let mut e = CEvent::empty(model);
        for &p in model.cells.block(b) {
            e = e.or(&CEvent::profile_event(model, p));
        }
        e
    }

    pub fn is_empty(&self) -> bool {
        self.named.iter().all(|m| *m == 0)
            && self.tails.iter().all(|m| *m == 0)
            && self.exceptions.iter().all(|v| v.iter().all(|m| *m == 0))
    }

    fn zip(&self, other: &CEvent, op: impl Fn(u32, u32) -> u32) -> CEvent {
        assert_eq!(self.n_cols, other.n_cols, "events over different models");
        CEvent {
            n_cols: self.n_cols,
            named: self.named.iter().zip(&other.named).map(|(a, b)| op(*a, *b)).collect(),
            tails: self.tails.iter().zip(&other.tails).map(|(a, b)| op(*a, *b)).collect(),
            exceptions: self
                .exceptions
                .iter()
                .zip(&other.exceptions)
                .map(|(x, y)| x.iter().zip(y).map(|(a, b)| op(*a, *b)).collect())
                .collect(),
        }
    }

    pub fn and(&self, other: &CEvent) -> CEvent {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &CEvent) -> CEvent {
        self.zip(other, |a, b| a | b)
    }

    pub fn minus(&self, other: &CEvent) -> CEvent {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> CEvent {
        let full = full_mask(self.n_cols);
        self.zip(self, |a, _| !a & full)
    }

    pub fn is_subset(&self, other: &CEvent) -> bool {
        self.and(other) == *self
    }
}

/// How a column mask resolves against per-column tail certificates.
enum MaskKind {
    Zero,
    Full,
    Single(usize),
    CoSingle(usize),
    Mixed,
}

fn mask_kind(mask: u32, n_cols: usize) -> MaskKind {
    let ones = mask.count_ones() as usize;
    if ones == 0 {
        MaskKind::Zero
    } else if ones == n_cols {
        MaskKind::Full
    } else if ones == 1 {
        MaskKind::Single(mask.trailing_zeros() as usize)
    } else if ones == n_cols - 1 {
        MaskKind::CoSingle((!mask & full_mask(n_cols)).trailing_zeros() as usize)
    } else {
        MaskKind::Mixed
    }
}

/// Certificate of the trace i ↦ σ(masked columns | H_i) along one profile,
/// as if every cell (declared ones included) carried the tail mask.
struct ResolvedTrace {
    inf: Q,
    liminf: Q,
    limsup: Q,
    sup: Q,
}

fn resolve_trace(model: &ProfileModel, p: usize, mask: u32) -> Result<ResolvedTrace, CountableError> {
    match mask_kind(mask, model.n_cols) {
        MaskKind::Zero => Ok(ResolvedTrace { inf: q0(), liminf: q0(), limsup: q0(), sup: q0() }),
        MaskKind::Full => Ok(ResolvedTrace { inf: q1(), liminf: q1(), limsup: q1(), sup: q1() }),
        MaskKind::Single(j) => {
            let s = &model.profiles[p].sigma[j];
            Ok(ResolvedTrace {
                inf: s.inf_value.clone(),
                liminf: s.liminf.clone(),
                limsup: s.limsup.clone(),
                sup: s.sup_value.clone(),
            })
        }
        MaskKind::CoSingle(j) => {
            let s = model.profiles[p].sigma[j].complemented();
            Ok(ResolvedTrace {
                inf: s.inf_value,
                liminf: s.liminf,
                limsup: s.limsup,
                sup: s.sup_value,
            })
        }
        MaskKind::Mixed => Err(CountableError::NotDescribable(format!(
            "the strategy trace of a {}-of-{}-column event along profile {:?} is not certified",
            mask.count_ones(),
            model.n_cols,
            model.profiles[p].label,
        ))),
    }
}

fn require_cell_union(model: &ProfileModel, k: &CEvent, role: &str) -> Result<(), CountableError> {
    let full = model.full_mask();
    let whole = |m: u32| m == 0 || m == full;
    let ok = k.named.iter().all(|m| whole(*m))
        && k.tails.iter().all(|m| whole(*m))
        && k.exceptions.iter().all(|v| v.iter().all(|m| whole(*m)));
    if ok {
        Ok(())
    } else {
        Err(CountableError::NotDescribable(format!(
            "{role} must be a union of whole conditioning cells"
        )))
    }
}

/// True when the prior assigns `k` a mass: `k` is a cell union whose tails
/// are uniform within every prior block.
fn is_prior_measurable(model: &ProfileModel, k: &CEvent) -> bool {
    if require_cell_union(model, k, "event").is_err() {
        return false;
    }
    (0..model.cells.n_blocks()).all(|b| {
        let mut flags = model.cells.block(b).iter().map(|&p| k.tails[p] != 0);
        let first = flags.next().expect("blocks are nonempty");
        flags.all(|f| f == first)
    })
}

/// Prior mass of a measurable cell union.
fn prior_mass(model: &ProfileModel, k: &CEvent) -> Q {
    let mut total = q0();
    for (c, a) in model.named.iter().enumerate() {
        if k.named[c] != 0 {
            total += &a.mass;
        }
    }
    for b in 0..model.cells.n_blocks() {
        if k.tails[model.cells.block(b)[0]] != 0 {
            total += &model.diffuse_weight[b];
        }
    }
    total
}

/// Two-sided enclosure [lo, hi] of a quantity known only by bounds.
type Bracket = (Q, Q);

/// Sound interval for the infimum (and supremum) of σ(f|·) over the cells of
/// one profile inside `k`; None when no cell of the profile lies in `k`.
///
/// Exceptional cells inside `k` contribute exact values.  The non-declared
/// cells contribute their resolved-trace range: exactly the liminf when the
/// trace infimum equals it, and the window [inf, liminf] otherwise (the
/// attaining cells are declared, but whether other sub-liminf cells exist is
/// not certified).
fn profile_range(
    model: &ProfileModel,
    f: &CEvent,
    k: &CEvent,
    p: usize,
) -> Result<Option<(Bracket, Bracket)>, CountableError> {
    let mut exact: Vec<Q> = Vec::new();
    for t in 0..model.exception_index[p].len() {
        if k.exceptions[p][t] != 0 {
            exact.push(model.exception_sigma(p, t, f.exceptions[p][t]));
        }
    }
    let tail_in = k.tails[p] != 0;
    if !tail_in && exact.is_empty() {
        return Ok(None);
    }
    let (mut inf_lo, mut inf_hi, mut sup_lo, mut sup_hi) = (None, None, None, None);
    let keep_min = |slot: &mut Option<Q>, v: Q| match slot {
        Some(cur) if *cur <= v => {}
        _ => *slot = Some(v),
    };
    let keep_max = |slot: &mut Option<Q>, v: Q| match slot {
        Some(cur) if *cur >= v => {}
        _ => *slot = Some(v),
    };
    for v in &exact {
        keep_min(&mut inf_lo, v.clone());
        keep_min(&mut inf_hi, v.clone());
        keep_max(&mut sup_lo, v.clone());
        keep_max(&mut sup_hi, v.clone());
    }
    if tail_in {
        let r = resolve_trace(model, p, f.tails[p])?;
        if r.inf == r.liminf {
            keep_min(&mut inf_lo, r.liminf.clone());
            keep_min(&mut inf_hi, r.liminf.clone());
        } else {
            keep_min(&mut inf_lo, r.inf.clone());
            keep_min(&mut inf_hi, r.liminf.clone());
        }
        if r.sup == r.limsup {
            keep_max(&mut sup_lo, r.limsup.clone());
            keep_max(&mut sup_hi, r.limsup.clone());
        } else {
            keep_max(&mut sup_lo, r.limsup.clone());
            keep_max(&mut sup_hi, r.sup.clone());
        }
    }
    Ok(Some((
        (inf_lo.expect("some cell in k"), inf_hi.expect("some cell in k")),
        (sup_lo.expect("some cell in k"), sup_hi.expect("some cell in k")),
    )))
}

/// Sound intervals for inf and sup of σ(f|·) over all cells of the union `k`.
fn inf_sup_bounds(
    model: &ProfileModel,
    f: &CEvent,
    k: &CEvent,
) -> Result<(Bracket, Bracket), CountableError> {
    require_cell_union(model, k, "conditioning event")?;
    let mut inf: Option<(Q, Q)> = None;
    let mut sup: Option<(Q, Q)> = None;
    let fold_min = |iv: (Q, Q), slot: &mut Option<(Q, Q)>| match slot {
        None => *slot = Some(iv),
        Some((lo, hi)) => {
            if iv.0 < *lo {
                *lo = iv.0;
            }
            if iv.1 < *hi {
                *hi = iv.1;
            }
        }
    };
    let fold_max = |iv: (Q, Q), slot: &mut Option<(Q, Q)>| match slot {
        None => *slot = Some(iv),
        Some((lo, hi)) => {
            if iv.0 > *lo {
                *lo = iv.0;
            }
            if iv.1 > *hi {
                *hi = iv.1;
            }
        }
    };
    for (c, _) in model.named.iter().enumerate() {
        if k.named[c] != 0 {
            let v = model.named_sigma(c, f.named[c]);
            fold_min((v.clone(), v.clone()), &mut inf);
            fold_max((v.clone(), v), &mut sup);
        }
    }
    for p in 0..model.profiles.len() {
        if let Some((iv, sv)) = profile_range(model, f, k, p)? {
            fold_min(iv, &mut inf);
            fold_max(sv, &mut sup);
        }
    }
    match (inf, sup) {
        (Some(i), Some(s)) => Ok((i, s)),
        _ => Err(CountableError::EmptyConditioning),
    }
}

/// Exact infimum and supremum of σ(f|·) over the cells of `k`.
pub fn profile_inf_sup(
    model: &ProfileModel,
    f: &CEvent,
    k: &CEvent,
) -> Result<(Q, Q), CountableError> {
    let ((ilo, ihi), (slo, shi)) = inf_sup_bounds(model, f, k)?;
    if ilo != ihi {
        return Err(CountableError::NotDescribable(
            "the infimum over the conditioning cells depends on undeclared cells".into(),
        ));
    }
    if slo != shi {
        return Err(CountableError::NotDescribable(
            "the supremum over the conditioning cells depends on undeclared cells".into(),
        ));
    }
    Ok((ilo, slo))
}

/// Lower and upper Stieltjes sums of σ(f|·) against the prior: named cells
/// contribute exactly, each diffuse block its weight times the worst (best)
/// essential value over the block's profiles.  Finite cell sets are null, so
/// the essential values are the liminf and limsup of the traces.
fn stieltjes_pair(model: &ProfileModel, f: &CEvent) -> Result<(Q, Q), CountableError> {
    let mut lower = q0();
    let mut upper = q0();
    for (c, a) in model.named.iter().enumerate() {
        let v = model.named_sigma(c, f.named[c]);
        lower += &a.mass * &v;
        upper += &a.mass * &v;
    }
    for b in 0..model.cells.n_blocks() {
        let w = &model.diffuse_weight[b];
        if w.is_zero() {
            continue;
        }
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        for &p in model.cells.block(b) {
            let r = resolve_trace(model, p, f.tails[p])?;
            lo = Some(match lo {
                Some(cur) if cur <= r.liminf => cur,
                _ => r.liminf,
            });
            hi = Some(match hi {
                Some(cur) if cur >= r.limsup => cur,
                _ => r.limsup,
            });
        }
        lower += w * lo.expect("blocks are nonempty");
        upper += w * hi.expect("blocks are nonempty");
    }
    Ok((lower, upper))
}

fn integral_result(lower: Q, upper: Q, tag: CaseTag) -> EnvelopeResult {
    assert!(lower <= upper, "lower bound exceeds upper bound");
    EnvelopeResult {
        lower,
        upper,
        case_tag: tag,
        dual_case_tag: tag,
        index_sets: None,
        aux_l: None,
        aux_u: None,
        enclosing: None,
    }
}

/// Joint envelope of the strongly conglomerable extensions: the lower and
/// upper Stieltjes sums of the strategy against the prior.
pub fn sc_envelope(model: &ProfileModel, f: &CEvent) -> Result<EnvelopeResult, CountableError> {
    let (lower, upper) = stieltjes_pair(model, f)?;
    Ok(integral_result(lower, upper, CaseTag::EssentialIntegral))
}

/// Joint envelope of all coherent extensions: diffuse weight is caught from
/// below only by events covering every tail of a block in full, and escapes
/// from above into any block with some tail direction left open.
pub fn joint_bounds_countable(
    model: &ProfileModel,
    f: &CEvent,
) -> Result<EnvelopeResult, CountableError> {
    let full = model.full_mask();
    let mut lower = q0();
    let mut upper = q0();
    for (c, a) in model.named.iter().enumerate() {
        let v = model.named_sigma(c, f.named[c]);
        lower += &a.mass * &v;
        upper += &a.mass * &v;
    }
    for b in 0..model.cells.n_blocks() {
        let block = model.cells.block(b);
        if block.iter().all(|&p| f.tails[p] == full) {
            lower += &model.diffuse_weight[b];
        }
        if block.iter().any(|&p| f.tails[p] != 0) {
            upper += &model.diffuse_weight[b];
        }
    }
    let result = integral_result(lower, upper, CaseTag::PartitionSupremum);
    if let Ok(sc) = sc_envelope(model, f) {
        assert!(
            result.lower <= sc.lower && sc.upper <= result.upper,
            "conglomerable bounds must sit inside the joint bounds",
        );
    }
    Ok(result)
}

/// Envelope of the fully disintegrable extensions at `f | k` for a prior
/// algebra event `k`: the integral ratio when `k` has positive mass, and the
/// band between the cell infima of `f` and of its complement when `k` is
/// null.
pub fn fd_envelope_countable(
    model: &ProfileModel,
    f: &CEvent,
    k: &CEvent,
) -> Result<EnvelopeResult, CountableError> {
    if k.is_empty() {
        return Err(CountableError::EmptyConditioning);
    }
    if !is_prior_measurable(model, k) {
        return Err(CountableError::NotDescribable(
            "conditioning event must belong to the prior algebra".into(),
        ));
    }
    if f.and(k) == *k {
        return Ok(integral_result(q1(), q1(), CaseTag::Tautology));
    }
    let pk = prior_mass(model, k);
    if !pk.is_zero() {
        let g = f.and(k);
        let (lower, upper) = stieltjes_pair(model, &g)?;
        if lower != upper {
            return Err(CountableError::NotIntegrable(
                "the strategy values of the restricted event have no common integral".into(),
            ));
        }
        let v = lower / pk;
        return Ok(integral_result(v.clone(), v, CaseTag::PositiveRatio));
    }
    let lower = profile_inf_sup(model, f, k)?.0;
    let upper = q1() - profile_inf_sup(model, &f.complement(), k)?.0;
    Ok(integral_result(lower, upper, CaseTag::NullCellInfimum))
}

/// Lower envelope of the fully strongly conglomerable extensions at `f | k`:
/// the minimum of the fully disintegrable lower bound over the vertices of
/// the diffuse-weight allocation polytope, certified by the attaining
/// allocation (one chosen profile per prior block).
pub fn fsc_lower(
    model: &ProfileModel,
    f: &CEvent,
    k: &CEvent,
) -> Result<(Q, Vec<usize>), CountableError> {
    if k.is_empty() {
        return Err(CountableError::EmptyConditioning);
    }
    require_cell_union(model, k, "conditioning event")?;
    let mut combos: usize = 1;
    for b in 0..model.cells.n_blocks() {
        combos = combos.saturating_mul(model.cells.block(b).len());
        if combos > 4096 {
            return Err(CountableError::AllocationTooLarge);
        }
    }
    let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
    for b in 0..model.cells.n_blocks() {
        choices = choices
            .into_iter()
            .flat_map(|prefix| {
                model.cells.block(b).iter().map(move |&p| {
                    let mut next = prefix.clone();
                    next.push(p);
                    next
                })
            })
            .collect();
    }
    let mut best: Option<(Q, Vec<usize>)> = None;
    for choice in choices {
        let mut weight = vec![q0(); model.profiles.len()];
        for (b, &p) in choice.iter().enumerate() {
            weight[p] += &model.diffuse_weight[b];
        }
        let refined = ProfileModel::new(
            model.n_cols,
            model.named.clone(),
            model.profiles.clone(),
            Subalgebra::discrete(model.profiles.len()),
            weight,
        )
        .expect("reallocating weights preserves model validity");
        match fd_envelope_countable(&refined, f, k) {
            Ok(r) => {
                if best.as_ref().is_none_or(|(v, _)| r.lower < *v) {
                    best = Some((r.lower, choice));
                }
            }
            // No fully disintegrable extension exists at this vertex; it
            // contributes nothing to the minimum.
            Err(CountableError::NotIntegrable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| {
        CountableError::NotIntegrable(
            "no diffuse-weight allocation admits a fully disintegrable extension".into(),
        )
    })
}

/// The finite quotient on which candidate joints live: one row per named
/// cell, per declared exceptional cell, and per prior block (its common tail
/// at infinity), with one atom per row and column.
pub struct Quotient {
    space: AtomSpace,
    exc_base: Vec<usize>,
    block_base: usize,
}

impl Quotient {
    pub fn new(model: &ProfileModel) -> Self {
        let n_named = model.named.len();
        let mut exc_base = Vec::with_capacity(model.profiles.len());
        let mut next = n_named;
        for p in 0..model.profiles.len() {
            exc_base.push(next);
            next += model.exception_index[p].len();
        }
        let block_base = next;
        let n_rows = block_base + model.cells.n_blocks();
        Quotient { space: AtomSpace::full(n_rows, model.n_cols), exc_base, block_base }
    }

    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn n_atoms(&self) -> usize {
        self.space.n_atoms()
    }

    /// Row of named cell `c`.
    pub fn named_row(&self, c: usize) -> usize {
        c
    }

    /// Row of the `t`-th declared exceptional cell of profile `p`.
    pub fn exception_row(&self, p: usize, t: usize) -> usize {
        self.exc_base[p] + t
    }

    /// Row of the common tail of prior block `b`.
    pub fn block_row(&self, b: usize) -> usize {
        self.block_base + b
    }

    fn atom(&self, row: usize, col: usize) -> usize {
        self.space.atom_id(row, col).expect("full quotient space")
    }

    /// The quotient image of a describable event whose tail masks are
    /// uniform within every prior block.
    pub fn event(&self, model: &ProfileModel, ce: &CEvent) -> Result<Event, CountableError> {
        let mut e = self.space.empty_event();
        let mut add = |row: usize, mask: u32| {
            for j in 0..model.n_cols {
                if mask >> j & 1 == 1 {
                    e.insert(self.atom(row, j));
                }
            }
        };
        for (c, &mask) in ce.named.iter().enumerate() {
            add(c, mask);
        }
        for p in 0..model.profiles.len() {
            for (t, &mask) in ce.exceptions[p].iter().enumerate() {
                add(self.exc_base[p] + t, mask);
            }
        }
        for b in 0..model.cells.n_blocks() {
            let block = model.cells.block(b);
            let mask = ce.tails[block[0]];
            if block.iter().any(|&p| ce.tails[p] != mask) {
                return Err(CountableError::NotDescribable(
                    "tail masks differ within a prior block; the event has no quotient image"
                        .into(),
                ));
            }
            add(self.block_base + b, mask);
        }
        Ok(e)
    }
}

/// One certified failure of a conglomerability sandwich.
#[derive(Debug, Clone, PartialEq)]
pub struct CongViolation {
    pub f: CEvent,
    pub b: CEvent,
    /// Conditioning event of the full variant; None for the joint check.
    pub k: Option<CEvent>,
    pub lower_bound: Q,
    pub upper_bound: Q,
    pub actual: Q,
}

/// Outcome of a conglomerability check over the describable quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct CongReport {
    pub conglomerable: bool,
    pub violations: Vec<CongViolation>,
    /// Pairs whose sandwich could not be decided because the certified
    /// infimum or supremum interval straddles the candidate value.
    pub indeterminate: usize,
}

/// Sound sandwich test shared by both conglomerability checks.  Returns a
/// violation when the candidate value certainly escapes the bounds, bumps
/// the indeterminate counter when the certificates cannot decide.
#[allow(clippy::too_many_arguments)]
fn sandwich_check(
    scale: &Q,
    inf: &(Q, Q),
    sup: &(Q, Q),
    actual: &Q,
    f: &CEvent,
    b: &CEvent,
    k: Option<&CEvent>,
    violations: &mut Vec<CongViolation>,
    indeterminate: &mut usize,
) {
    let floor_sound = scale * &inf.0;
    let floor_claim = scale * &inf.1;
    let ceil_claim = scale * &sup.0;
    let ceil_sound = scale * &sup.1;
    if *actual < floor_sound || *actual > ceil_sound {
        violations.push(CongViolation {
            f: f.clone(),
            b: b.clone(),
            k: k.cloned(),
            lower_bound: floor_sound,
            upper_bound: ceil_sound,
            actual: actual.clone(),
        });
    } else if *actual < floor_claim || *actual > ceil_claim {
        *indeterminate += 1;
    }
}

const MAX_CONG_PAIRS: usize = 1 << 18;

/// Column masks whose traces resolve against tail certificates.
fn resolvable_masks(n_cols: usize) -> Vec<u32> {
    let full = full_mask(n_cols);
    let mut out = vec![0u32, full];
    for j in 0..n_cols {
        let bit = 1u32 << j;
        if !out.contains(&bit) {
            out.push(bit);
        }
        let co = full & !bit;
        if !out.contains(&co) {
            out.push(co);
        }
    }
    out.sort_unstable();
    out
}

/// Describable events for the conglomerability checks: per prior block a
/// resolvable column mask on its tails, and any mask on named and declared
/// exceptional cells.
fn describable_events(model: &ProfileModel) -> Result<Vec<CEvent>, CountableError> {
    let n_point_slots = model.named.len()
        + model.exception_index.iter().map(|k| k.len()).sum::<usize>();
    let n_blocks = model.cells.n_blocks();
    let masks = resolvable_masks(model.n_cols);
    let mut total: usize = 1;
    for _ in 0..n_point_slots {
        total = total.saturating_mul(1usize << model.n_cols.min(63));
        if total > MAX_CONG_PAIRS {
            return Err(CountableError::QuotientTooLarge);
        }
    }
    for _ in 0..n_blocks {
        total = total.saturating_mul(masks.len());
        if total > MAX_CONG_PAIRS {
            return Err(CountableError::QuotientTooLarge);
        }
    }
    let all: Vec<u32> = (0..=model.full_mask()).collect();
    let mut stack = vec![CEvent::empty(model)];
    for s in 0..n_point_slots + n_blocks {
        let options: &[u32] = if s < n_point_slots { &all } else { &masks };
        let mut next = Vec::with_capacity(stack.len() * options.len());
        for base in &stack {
            for &mask in options {
                let mut e = base.clone();
                set_slot(model, &mut e, s, mask);
                next.push(e);
            }
        }
        stack = next;
    }
    Ok(stack)
}

fn set_slot(model: &ProfileModel, e: &mut CEvent, slot: usize, mask: u32) {
    let n_named = model.named.len();
    if slot < n_named {
        e.named[slot] = mask;
        return;
    }
    let mut idx = slot - n_named;
    for p in 0..model.profiles.len() {
        let len = model.exception_index[p].len();
        if idx < len {
            e.exceptions[p][idx] = mask;
            return;
        }
        idx -= len;
    }
    let b = idx;
    for &p in model.cells.block(b) {
        e.tails[p] = mask;
    }
}

/// Cell unions measurable for the prior: any set of named cells, declared
/// exceptional cells, and whole block tails.
fn measurable_unions(model: &ProfileModel, include_empty: bool) -> Result<Vec<CEvent>, CountableError> {
    let n_slots = model.named.len()
        + model
            .exception_index
            .iter()
            .map(|k| k.len())
            .sum::<usize>()
        + model.cells.n_blocks();
    if n_slots > 16 {
        return Err(CountableError::QuotientTooLarge);
    }
    let full = model.full_mask();
    let mut out = Vec::with_capacity(1 << n_slots);
    for bits in 0u32..(1u32 << n_slots) {
        if bits == 0 && !include_empty {
            continue;
        }
        let mut e = CEvent::empty(model);
        for s in 0..n_slots {
            if bits >> s & 1 == 1 {
                set_slot(model, &mut e, s, full);
            }
        }
        out.push(e);
    }
    Ok(out)
}

fn validate_candidate_masses(
    model: &ProfileModel,
    qt: &Quotient,
    mass_of: impl Fn(usize) -> Q,
) -> Result<(), CountableError> {
    let bad = |msg: String| Err(CountableError::InconsistentCandidate(msg));
    let mut total = q0();
    for a in 0..qt.n_atoms() {
        let m = mass_of(a);
        if m < q0() {
            return bad(format!("negative mass at quotient atom {a}"));
        }
        total += m;
    }
    if total != q1() {
        return bad(format!("quotient masses sum to {total}, not 1"));
    }
    for (c, atom) in model.named.iter().enumerate() {
        for j in 0..model.n_cols {
            let got = mass_of(qt.atom(c, j));
            let want = &atom.mass * &atom.row[j];
            if got != want {
                return bad(format!(
                    "named cell {:?}, column {}: mass {got} differs from the pinned {want}",
                    atom.label,
                    j + 1
                ));
            }
        }
    }
    for p in 0..model.profiles.len() {
        for t in 0..model.exception_index[p].len() {
            for j in 0..model.n_cols {
                let got = mass_of(qt.atom(qt.exc_base[p] + t, j));
                if !got.is_zero() {
                    return bad(format!(
                        "exceptional cell {} of profile {:?} must be null, found mass {got}",
                        model.exception_index[p][t], model.profiles[p].label
                    ));
                }
            }
        }
    }
    for b in 0..model.cells.n_blocks() {
        let sum: Q = (0..model.n_cols)
            .map(|j| mass_of(qt.atom(qt.block_base + b, j)))
            .sum();
        if sum != model.diffuse_weight[b] {
            return bad(format!(
                "block {b} tail masses sum to {sum}, not the diffuse weight {}",
                model.diffuse_weight[b]
            ));
        }
    }
    Ok(())
}

/// Checks the unconditional conglomerability sandwich for a candidate joint,
/// given as one mass per quotient atom: for every describable F and every
/// prior-measurable B, the candidate mass of F∧B must lie between π(B) times
/// the infimum and supremum of σ(F|·) over the cells of B.
pub fn check_strong_conglomerability(
    model: &ProfileModel,
    candidate: &[Q],
) -> Result<CongReport, CountableError> {
    let qt = Quotient::new(model);
    if candidate.len() != qt.n_atoms() {
        return Err(CountableError::InconsistentCandidate(format!(
            "{} masses for {} quotient atoms",
            candidate.len(),
            qt.n_atoms()
        )));
    }
    validate_candidate_masses(model, &qt, |a| candidate[a].clone())?;
    let events = describable_events(model)?;
    let unions = measurable_unions(model, false)?;
    if events.len().saturating_mul(unions.len()) > MAX_CONG_PAIRS {
        return Err(CountableError::QuotientTooLarge);
    }
    let mut violations = Vec::new();
    let mut indeterminate = 0usize;
    for b in &unions {
        let pb = prior_mass(model, b);
        let qb = qt.event(model, b)?;
        for f in &events {
            let (inf, sup) = inf_sup_bounds(model, f, b)?;
            let fb = qt.event(model, f)?.and(&qb);
            let actual: Q = fb.atoms().map(|a| &candidate[a]).sum();
            sandwich_check(
                &pb,
                &inf,
                &sup,
                &actual,
                f,
                b,
                None,
                &mut violations,
                &mut indeterminate,
            );
        }
    }
    Ok(CongReport { conglomerable: violations.is_empty(), violations, indeterminate })
}

/// Checks the conditional conglomerability sandwich for a candidate full
/// conditional probability on the quotient: for every prior-measurable K,
/// every measurable B ⊆ K, and every describable F, the candidate must
/// satisfy Q(B|K)·inf ≤ Q(F∧B|K) ≤ Q(B|K)·sup with the extrema of σ(F|·)
/// taken over the cells of B.
pub fn check_full_strong_conglomerability(
    model: &ProfileModel,
    candidate: &LayeredConditional,
) -> Result<CongReport, CountableError> {
    let qt = Quotient::new(model);
    match validate_full_conditional(candidate) {
        Ok(()) => {}
        // Structure was already validated; only the exhaustive axiom sweep
        // is skipped beyond this size.
        Err(Violation::TooLargeForExhaustiveCheck { .. }) => {}
        Err(v) => {
            return Err(CountableError::InconsistentCandidate(format!(
                "candidate is not a full conditional probability: {v:?}"
            )))
        }
    }
    if candidate.n_atoms != qt.n_atoms() {
        return Err(CountableError::InconsistentCandidate(format!(
            "candidate is over {} atoms, quotient has {}",
            candidate.n_atoms,
            qt.n_atoms()
        )));
    }
    let omega = qt.space.omega();
    let top = |a: usize| -> Q {
        let e = Event::from_atoms(qt.n_atoms(), &[a]);
        candidate
            .evaluate(&e, &omega)
            .expect("validated candidate evaluates everywhere")
    };
    validate_candidate_masses(model, &qt, top)?;
    let events = describable_events(model)?;
    let unions = measurable_unions(model, false)?;
    let pair_count = unions.len() * (unions.len() + 1) / 2;
    if events.len().saturating_mul(pair_count) > MAX_CONG_PAIRS {
        return Err(CountableError::QuotientTooLarge);
    }
    let mut violations = Vec::new();
    let mut indeterminate = 0usize;
    for k in &unions {
        let qk = qt.event(model, k)?;
        for b in &unions {
            if !b.is_subset(k) {
                continue;
            }
            let qb = qt.event(model, b)?;
            let scale = candidate
                .evaluate(&qb, &qk)
                .expect("validated candidate evaluates everywhere");
            for f in &events {
                let (inf, sup) = inf_sup_bounds(model, f, b)?;
                let fb = qt.event(model, f)?.and(&qb);
                let actual = candidate
                    .evaluate(&fb, &qk)
                    .expect("validated candidate evaluates everywhere");
                sandwich_check(
                    &scale,
                    &inf,
                    &sup,
                    &actual,
                    f,
                    b,
                    Some(k),
                    &mut violations,
                    &mut indeterminate,
                );
            }
        }
    }
    Ok(CongReport { conglomerable: violations.is_empty(), violations, indeterminate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AtomSpace;
    use crate::assessment::{strategy_from_model, Prior, StatisticalModel};
    use crate::capacity::{choquet, inner_measure};
    use crate::envelopes::{fsc_envelope, fully_dis_envelope, sc_envelope_finite, EnvelopeError};
    use crate::rational::q;

    fn spec(
        exceptions: &[(u64, Q)],
        liminf: Q,
        limsup: Q,
        inf: Q,
        sup: Q,
        inf_attained: bool,
        sup_attained: bool,
    ) -> TailSpec {
        TailSpec {
            exceptions: exceptions.iter().cloned().collect(),
            liminf,
            limsup,
            inf_value: inf,
            sup_value: sup,
            inf_attained,
            sup_attained,
        }
    }

    /// Two profiles whose strategies agree in the limit (both columns tend
    /// to 1/2) but whose extremes differ, each declaring one exceptional
    /// cell; all diffuse weight sits on the first profile's group.
    fn ultrafilter() -> ProfileModel {
        let odds = Profile {
            label: "odds".into(),
            sigma: vec![
                spec(&[(1, q1())], q(1, 2), q(1, 2), q(1, 2), q1(), false, true),
                spec(&[(1, q0())], q(1, 2), q(1, 2), q0(), q(1, 2), true, false),
            ],
        };
        let evens = Profile {
            label: "evens".into(),
            sigma: vec![
                spec(&[(2, q(3, 4))], q(1, 2), q(1, 2), q(1, 2), q(3, 4), false, true),
                spec(&[(2, q(1, 4))], q(1, 2), q(1, 2), q(1, 4), q(1, 2), true, false),
            ],
        };
        ProfileModel::new(
            2,
            vec![],
            vec![odds, evens],
            Subalgebra::new(2, vec![vec![0], vec![1]]).unwrap(),
            vec![q1(), q0()],
        )
        .unwrap()
    }

    /// One diffuse group holding two profiles with opposite constant
    /// strategies: the first column is certain along one direction and
    /// impossible along the other.
    fn diverging() -> ProfileModel {
        let up = Profile {
            label: "up".into(),
            sigma: vec![TailSpec::constant(q1()), TailSpec::constant(q0())],
        };
        let down = Profile {
            label: "down".into(),
            sigma: vec![TailSpec::constant(q0()), TailSpec::constant(q1())],
        };
        ProfileModel::new(
            2,
            vec![],
            vec![up, down],
            Subalgebra::new(2, vec![vec![0, 1]]).unwrap(),
            vec![q1()],
        )
        .unwrap()
    }

    /// One diffuse group of two eventually constant profiles, the first with
    /// a single exceptional cell; finitely truncatable, so every envelope
    /// must match the finite module on the three-row truncation.
    fn eventually_constant() -> ProfileModel {
        let a = Profile {
            label: "a".into(),
            sigma: vec![
                spec(&[(0, q(1, 4))], q(1, 2), q(1, 2), q(1, 4), q(1, 2), true, true),
                spec(&[(0, q(3, 4))], q(1, 2), q(1, 2), q(1, 2), q(3, 4), true, true),
            ],
        };
        let b = Profile {
            label: "b".into(),
            sigma: vec![TailSpec::constant(q(2, 3)), TailSpec::constant(q(1, 3))],
        };
        ProfileModel::new(
            2,
            vec![],
            vec![a, b],
            Subalgebra::new(2, vec![vec![0, 1]]).unwrap(),
            vec![q1()],
        )
        .unwrap()
    }

    #[test]
    fn constant_spec_and_complement_round_trip() {
        let s = TailSpec::constant(q(1, 3));
        assert_eq!(s.complemented(), TailSpec::constant(q(2, 3)));
        let t = spec(&[(7, q(1, 4))], q(1, 2), q(1, 2), q(1, 4), q(1, 2), true, false);
        let c = t.complemented();
        assert_eq!(c.exceptions[&7], q(3, 4));
        assert_eq!(c.inf_value, q(1, 2));
        assert_eq!(c.sup_value, q(3, 4));
        assert!(c.sup_attained && !c.inf_attained);
        assert_eq!(c.complemented(), t);
    }

    #[test]
    fn model_validation_rejects_uncertified_extremes() {
        // Infimum below the liminf with no declared attaining cell.
        let bad = spec(&[], q(1, 2), q(1, 2), q(1, 4), q(1, 2), true, true);
        assert!(matches!(bad.validate("x"), Err(CountableError::BadModel(_))));
        // Exceptional value outside [inf, sup].
        let bad = spec(&[(1, q(9, 10))], q(1, 2), q(1, 2), q(1, 2), q(3, 4), true, true);
        assert!(matches!(bad.validate("x"), Err(CountableError::BadModel(_))));
        // Ordering violated.
        let bad = spec(&[], q(3, 4), q(1, 2), q0(), q1(), true, true);
        assert!(matches!(bad.validate("x"), Err(CountableError::BadModel(_))));

        // Exception values across columns must sum to 1.
        let p = Profile {
            label: "p".into(),
            sigma: vec![
                spec(&[(1, q(1, 2))], q(1, 2), q(1, 2), q(1, 2), q(1, 2), true, true),
                spec(&[(1, q(1, 4))], q(1, 2), q(1, 2), q(1, 4), q(1, 2), true, true),
            ],
        };
        let r = ProfileModel::new(
            2,
            vec![],
            vec![p],
            Subalgebra::discrete(1),
            vec![q1()],
        );
        assert!(matches!(r, Err(CountableError::BadModel(_))));

        // Column liminfs summing above 1.
        let p = Profile {
            label: "p".into(),
            sigma: vec![TailSpec::constant(q(2, 3)), TailSpec::constant(q(2, 3))],
        };
        let r = ProfileModel::new(2, vec![], vec![p], Subalgebra::discrete(1), vec![q1()]);
        assert!(matches!(r, Err(CountableError::BadModel(_))));

        // Named masses and diffuse weights must sum to 1.
        let p = Profile {
            label: "p".into(),
            sigma: vec![TailSpec::constant(q1()), TailSpec::constant(q0())],
        };
        let r = ProfileModel::new(2, vec![], vec![p], Subalgebra::discrete(1), vec![q(1, 2)]);
        assert!(matches!(r, Err(CountableError::BadModel(_))));
    }

    #[test]
    fn profile_extrema_combine_declared_cells_and_tail_certificates() {
        let m = ultrafilter();
        let e1 = CEvent::column(&m, 0);
        let e2 = CEvent::column(&m, 1);
        let odds = CEvent::profile_event(&m, 0);
        let evens = CEvent::profile_event(&m, 1);
        // Declared cell at value 1 does not move the infimum 1/2; it is the
        // supremum witness.
        assert_eq!(profile_inf_sup(&m, &e1, &odds).unwrap(), (q(1, 2), q1()));
        assert_eq!(profile_inf_sup(&m, &e2, &odds).unwrap(), (q0(), q(1, 2)));
        assert_eq!(profile_inf_sup(&m, &e1, &evens).unwrap(), (q(1, 2), q(3, 4)));
        assert_eq!(profile_inf_sup(&m, &e2, &evens).unwrap(), (q(1, 4), q(1, 2)));
        // Without the declared witness cell the infimum of the second
        // column along `evens` depends on undeclared cells.
        let tail = CEvent::tail_only(&m, 1);
        assert!(matches!(
            profile_inf_sup(&m, &e2, &tail),
            Err(CountableError::NotDescribable(_))
        ));
    }

    #[test]
    fn null_group_band_spans_cell_infima() {
        let m = ultrafilter();
        let e1 = CEvent::column(&m, 0);
        let evens = CEvent::profile_event(&m, 1);
        let r = fd_envelope_countable(&m, &e1, &evens).unwrap();
        assert_eq!((r.lower, r.upper), (q(1, 2), q(3, 4)));
        assert_eq!(r.case_tag, CaseTag::NullCellInfimum);
        // Dual query mirrors the band.
        let r2 = fd_envelope_countable(&m, &e1.complement(), &evens).unwrap();
        assert_eq!((r2.lower, r2.upper), (q(1, 4), q(1, 2)));
        // Covering events are certain.
        let taut = fd_envelope_countable(&m, &CEvent::full(&m), &evens).unwrap();
        assert_eq!((taut.lower, taut.upper), (q1(), q1()));
        assert_eq!(taut.case_tag, CaseTag::Tautology);
        // A single declared cell conditions to its exact strategy value.
        let exc = CEvent::exception_cell(&m, 0, 0);
        let r3 = fd_envelope_countable(&m, &e1, &exc).unwrap();
        assert_eq!((r3.lower, r3.upper), (q1(), q1()));
        // The non-declared part of a group alone is not in the prior
        // algebra's describable fragment for the second column.
        let tail = CEvent::tail_only(&m, 1);
        assert!(matches!(
            fd_envelope_countable(&m, &e1, &tail),
            Err(CountableError::NotDescribable(_))
        ));
    }

    #[test]
    fn diverging_tails_make_conglomerable_envelope_vacuous() {
        let m = diverging();
        let e1 = CEvent::column(&m, 0);
        let sc = sc_envelope(&m, &e1).unwrap();
        assert_eq!((sc.lower.clone(), sc.upper.clone()), (q0(), q1()));
        assert_eq!(sc.case_tag, CaseTag::EssentialIntegral);
        // No common integral: no fully disintegrable extension reaches Ω.
        assert!(matches!(
            fd_envelope_countable(&m, &e1, &CEvent::full(&m)),
            Err(CountableError::NotIntegrable(_))
        ));
        // The joint coherent bounds coincide with the conglomerable ones.
        let joint = joint_bounds_countable(&m, &e1).unwrap();
        assert_eq!((joint.lower, joint.upper), (q0(), q1()));
        // The group carries weight 1 but inner prior mass 0 in each
        // direction, which is how the diffuse weight escapes the sums.
        let v = inner_measure(m.cells(), &[q1()]).unwrap();
        assert_eq!(v.value(0b01), &q0());
        assert_eq!(v.value(0b10), &q0());
        assert_eq!(v.value(0b11), &q1());
        // The lower Stieltjes sum is the Choquet integral against it.
        assert_eq!(choquet(&[q1(), q0()], &v), sc.lower);
    }

    #[test]
    fn allocation_minimum_certifies_its_vertex() {
        let m = diverging();
        let e1 = CEvent::column(&m, 0);
        let omega = CEvent::full(&m);
        let (lo, alloc) = fsc_lower(&m, &e1, &omega).unwrap();
        assert_eq!(lo, q0());
        assert_eq!(alloc, vec![1]);
        let (hi_of_compl, alloc2) = fsc_lower(&m, &e1.complement(), &omega).unwrap();
        assert_eq!(hi_of_compl, q0());
        assert_eq!(alloc2, vec![0]);
        // Covering events are certain at every vertex.
        let (one, _) = fsc_lower(&m, &omega, &omega).unwrap();
        assert_eq!(one, q1());
        // A union certain along every direction is certain too, even when
        // it is a proper subevent of Ω.
        let covering = e1.or(&CEvent::profile_event(&m, 1));
        let (v, _) = fsc_lower(&m, &covering, &omega).unwrap();
        assert_eq!(v, q1());
    }

    #[test]
    fn single_profile_blocks_reduce_allocation_to_the_plain_bound() {
        let m = ultrafilter();
        let e1 = CEvent::column(&m, 0);
        let evens = CEvent::profile_event(&m, 1);
        let fd = fd_envelope_countable(&m, &e1, &evens).unwrap();
        let (lo, alloc) = fsc_lower(&m, &e1, &evens).unwrap();
        assert_eq!(lo, fd.lower);
        assert_eq!(alloc, vec![0, 1]);
    }

    #[test]
    fn eventually_constant_model_matches_finite_truncation() {
        let m = eventually_constant();
        let e1 = CEvent::column(&m, 0);
        let omega = CEvent::full(&m);
        let exc = CEvent::exception_cell(&m, 0, 0);

        // Finite three-row truncation: the declared cell and one row per
        // eventually-constant tail, the group's weight on the tail block.
        let space = AtomSpace::full(3, 2);
        let rows = vec![
            vec![q(1, 4), q(3, 4)],
            vec![q(1, 2), q(1, 2)],
            vec![q(2, 3), q(1, 3)],
        ];
        let model = StatisticalModel::new(&space, rows).unwrap();
        let strategy = strategy_from_model(&space, &model);
        let prior = Prior::new(
            Subalgebra::new(3, vec![vec![0], vec![1, 2]]).unwrap(),
            vec![q0(), q1()],
        )
        .unwrap();
        let fe1 = space.parse_event("E1").unwrap();
        let fomega = space.omega();
        let fexc = crate::assessment::rows_event(&space, &[0]);

        let sc_c = sc_envelope(&m, &e1).unwrap();
        let sc_f = sc_envelope_finite(&space, &prior, &strategy, &fe1);
        assert_eq!((sc_c.lower, sc_c.upper), (q(1, 2), q(2, 3)));
        assert_eq!((sc_f.lower, sc_f.upper), (q(1, 2), q(2, 3)));

        assert!(matches!(
            fd_envelope_countable(&m, &e1, &omega),
            Err(CountableError::NotIntegrable(_))
        ));
        assert!(matches!(
            fully_dis_envelope(&space, &prior, &strategy, &fe1, &fomega),
            Err(EnvelopeError::NotIntegrable(_))
        ));

        let fd_c = fd_envelope_countable(&m, &e1, &exc).unwrap();
        let fd_f = fully_dis_envelope(&space, &prior, &strategy, &fe1, &fexc).unwrap();
        assert_eq!((fd_c.lower, fd_c.upper), (q(1, 4), q(1, 4)));
        assert_eq!((fd_f.lower, fd_f.upper), (q(1, 4), q(1, 4)));

        let (fsc_c, alloc) = fsc_lower(&m, &e1, &omega).unwrap();
        let fsc_f = fsc_envelope(&space, &prior, &strategy, &fe1, &fomega).unwrap();
        assert_eq!(fsc_c, q(1, 2));
        assert_eq!(alloc, vec![0]);
        assert_eq!(fsc_f.lower, q(1, 2));
        assert_eq!(fsc_f.upper, q(2, 3));
    }

    #[test]
    fn stieltjes_sums_weight_each_group_by_its_worst_tail() {
        // Two groups: one holding opposite constant profiles, one a single
        // half-half profile.
        let p0 = Profile {
            label: "one".into(),
            sigma: vec![TailSpec::constant(q1()), TailSpec::constant(q0())],
        };
        let p1 = Profile {
            label: "zero".into(),
            sigma: vec![TailSpec::constant(q0()), TailSpec::constant(q1())],
        };
        let p2 = Profile {
            label: "half".into(),
            sigma: vec![TailSpec::constant(q(1, 2)), TailSpec::constant(q(1, 2))],
        };
        let m = ProfileModel::new(
            2,
            vec![],
            vec![p0, p1, p2],
            Subalgebra::new(3, vec![vec![0, 1], vec![2]]).unwrap(),
            vec![q(3, 5), q(2, 5)],
        )
        .unwrap();
        let r = sc_envelope(&m, &CEvent::column(&m, 0)).unwrap();
        assert_eq!((r.lower, r.upper), (q(1, 5), q(4, 5)));
    }

    #[test]
    fn block_candidate_passes_conglomerability_sweep() {
        let m = diverging();
        let report = check_strong_conglomerability(&m, &[q1(), q0()]).unwrap();
        assert!(report.conglomerable);
        assert!(report.violations.is_empty());
        assert_eq!(report.indeterminate, 0);
        // The opposite corner of the tail simplex is just as acceptable.
        let report = check_strong_conglomerability(&m, &[q0(), q1()]).unwrap();
        assert!(report.conglomerable);
    }

    #[test]
    fn candidate_escaping_the_sandwich_is_certified() {
        let m = eventually_constant();
        // Quotient rows: declared cell (2 atoms), then the group tail.
        let qt = Quotient::new(&m);
        assert_eq!(qt.n_atoms(), 4);
        assert_eq!(qt.exception_row(0, 0), 0);
        assert_eq!(qt.block_row(0), 1);

        // All tail mass on the first column: σ(E1|·) never exceeds 2/3, so
        // the sweep must certify the escape.
        let report = check_strong_conglomerability(&m, &[q0(), q0(), q1(), q0()]).unwrap();
        assert!(!report.conglomerable);
        let v = report
            .violations
            .iter()
            .find(|v| v.actual == q1())
            .expect("the unit mass pair is certified");
        assert_eq!(v.lower_bound, q(1, 4));
        assert_eq!(v.upper_bound, q(2, 3));
        assert!(v.k.is_none());

        // Splitting the tail mass inside the certified window passes.
        let report =
            check_strong_conglomerability(&m, &[q0(), q0(), q(1, 2), q(1, 2)]).unwrap();
        assert!(report.conglomerable, "violations: {:?}", report.violations);

        // A value below the group liminf but above the declared infimum is
        // undecidable when the declared cell is cut out of B.
        let report =
            check_strong_conglomerability(&m, &[q0(), q0(), q(1, 3), q(2, 3)]).unwrap();
        assert!(report.conglomerable);
        assert!(report.indeterminate > 0);
    }

    #[test]
    fn inconsistent_candidates_are_rejected() {
        let m = eventually_constant();
        let wrong_len = check_strong_conglomerability(&m, &[q1()]);
        assert!(matches!(wrong_len, Err(CountableError::InconsistentCandidate(_))));
        // Mass on a declared cell (they are null under the prior).
        let r = check_strong_conglomerability(&m, &[q(1, 4), q0(), q(3, 4), q0()]);
        assert!(matches!(r, Err(CountableError::InconsistentCandidate(_))));
        // Negative and non-normalised masses.
        let r = check_strong_conglomerability(&m, &[q0(), q0(), q(-1, 4), q(5, 4)]);
        assert!(matches!(r, Err(CountableError::InconsistentCandidate(_))));
        let r = check_strong_conglomerability(&m, &[q0(), q0(), q(1, 4), q(1, 4)]);
        assert!(matches!(r, Err(CountableError::InconsistentCandidate(_))));
        // Group weight moved across blocks.
        let u = ultrafilter();
        let mut c = vec![q0(); 8];
        c[Quotient::new(&u).block_row(0) * 2] = q(1, 2);
        c[Quotient::new(&u).block_row(1) * 2] = q(1, 2);
        let r = check_strong_conglomerability(&u, &c);
        assert!(matches!(r, Err(CountableError::InconsistentCandidate(_))));
    }

    #[test]
    fn conditional_sweep_pins_null_declared_cells() {
        let m = eventually_constant();
        // Top layer on the tail, second layer on the declared cell.  The
        // declared cell's conditional row must match its exact strategy.
        let good = LayeredConditional::new(
            4,
            vec![
                vec![q0(), q0(), q(1, 2), q(1, 2)],
                vec![q(1, 4), q(3, 4), q0(), q0()],
            ],
        )
        .unwrap();
        let report = check_full_strong_conglomerability(&m, &good).unwrap();
        assert!(report.conglomerable, "violations: {:?}", report.violations);

        let bad = LayeredConditional::new(
            4,
            vec![
                vec![q0(), q0(), q(1, 2), q(1, 2)],
                vec![q(1, 2), q(1, 2), q0(), q0()],
            ],
        )
        .unwrap();
        let report = check_full_strong_conglomerability(&m, &bad).unwrap();
        assert!(!report.conglomerable);
        let v = report
            .violations
            .iter()
            .find(|v| v.k.is_some())
            .expect("a conditional pair is certified");
        assert_eq!(v.actual, q(1, 2));
        assert_eq!(v.lower_bound, q(1, 4));
        assert_eq!(v.upper_bound, q(1, 4));
    }

    #[test]
    fn allocation_enumeration_is_capped() {
        let profiles: Vec<Profile> = (0..26)
            .map(|i| Profile {
                label: format!("p{i}"),
                sigma: vec![TailSpec::constant(q1()), TailSpec::constant(q0())],
            })
            .collect();
        let blocks: Vec<Vec<usize>> = (0..13).map(|b| vec![2 * b, 2 * b + 1]).collect();
        let m = ProfileModel::new(
            2,
            vec![],
            profiles,
            Subalgebra::new(26, blocks).unwrap(),
            vec![q(1, 13); 13],
        )
        .unwrap();
        let f = CEvent::column(&m, 0);
        let omega = CEvent::full(&m);
        assert!(matches!(
            fsc_lower(&m, &f, &omega),
            Err(CountableError::AllocationTooLarge)
        ));
    }

    #[test]
    fn named_cells_enter_integrals_and_bands_exactly() {
        // One named cell with positive mass next to a diffuse group.
        let named = NamedAtom {
            label: "start".into(),
            mass: q(1, 3),
            row: vec![q(1, 4), q(3, 4)],
        };
        let p = Profile {
            label: "tail".into(),
            sigma: vec![TailSpec::constant(q(1, 2)), TailSpec::constant(q(1, 2))],
        };
        let m = ProfileModel::new(
            2,
            vec![named],
            vec![p],
            Subalgebra::discrete(1),
            vec![q(2, 3)],
        )
        .unwrap();
        let e1 = CEvent::column(&m, 0);
        let sc = sc_envelope(&m, &e1).unwrap();
        // 1/3 * 1/4 + 2/3 * 1/2 = 5/12 on both sides.
        assert_eq!((sc.lower.clone(), sc.upper.clone()), (q(5, 12), q(5, 12)));
        let fd = fd_envelope_countable(&m, &e1, &CEvent::full(&m)).unwrap();
        assert_eq!((fd.lower, fd.upper), (q(5, 12), q(5, 12)));
        assert_eq!(fd.case_tag, CaseTag::PositiveRatio);
        // Conditioning on the named cell returns its row value exactly.
        let k = CEvent::named_cell(&m, 0);
        let fd = fd_envelope_countable(&m, &e1, &k).unwrap();
        assert_eq!((fd.lower, fd.upper), (q(1, 4), q(1, 4)));
        // The joint coherent bounds strictly bracket the point integral:
        // the group's weight escapes any event missing part of its tail.
        let joint = joint_bounds_countable(&m, &e1).unwrap();
        assert_eq!((joint.lower, joint.upper), (q(1, 12), q(3, 4)));
    }
}
