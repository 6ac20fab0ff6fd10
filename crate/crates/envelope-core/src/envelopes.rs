//! Closed-form lower/upper envelopes for the classes of extensions of a prior
//! and strategy pair on a finite atom space.
//!
//! Four nested classes are covered, each through its own entry point:
//! every coherent extension (`conditional_envelope`), extensions of the
//! Stieltjes joint (`dis_extension_envelope`), fully disintegrable extensions
//! (`fully_dis_envelope`), and the conditional prior alone
//! (`conditional_prior_envelope`).  `fsc_envelope` relaxes full
//! disintegrability to full strong conglomerability by minimising over the
//! per-block allocation vertices of the prior.
//!
//! Multi-cell prior blocks model diffuse mass: no event strictly inside the
//! block can catch any of it, so the block contributes to a lower bound only
//! when the target event swallows the block whole.  Joint bounds therefore
//! follow the finite-partition supremum over the prior's subalgebra, and the
//! auxiliary constrained extrema are solved as exact LPs over per-block
//! sub-allocations.

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{AtomSpace, Event};
use crate::assessment::{Prior, Strategy};
use crate::capacity::{lower_stieltjes, upper_stieltjes, Capacity, CapacityError};
use crate::lp::RationalLP;
use crate::rational::{q0, q1, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("conditioning event is empty")]
    EmptyConditioning,
    #[error("strategy values differ on a positive-mass prior block: {0}")]
    NotIntegrable(String),
    #[error("event is not a union of prior blocks")]
    EventNotInPriorAlgebra,
    #[error("too many per-block allocations to enumerate")]
    AllocationTooLarge,
}

/// Which branch of the envelope characterisation produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// F covers K, so every extension assigns 1.
    Tautology,
    /// Ratio of joint (or integral) values at a positive-mass conditioning event.
    PositiveRatio,
    /// Minimum of strategy ratios over the cells meeting both F and its
    /// complement inside a joint-null K.
    NullCellMinimum,
    /// Infimum of strategy values over the cells under a prior-null K in the
    /// prior algebra.
    NullCellInfimum,
    /// Ratio at the smallest prior-algebra event enclosing K that keeps K at
    /// positive conditional mass.
    EnclosingRatio,
    /// Vacuous 0/1 bound at a prior-null conditioning event of the prior algebra.
    VacuousAtNull,
    /// Minimum over the per-block allocation vertices of the prior.
    AllocationMinimum,
    /// Lower/upper Stieltjes sums of the strategy against the prior blocks.
    EssentialIntegral,
    /// Finite-partition supremum over the prior subalgebra.
    PartitionSupremum,
    /// No branch produced a positive bound.
    VacuousZero,
}

/// Classification of cells by how they meet F and F^c inside K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub i3: Vec<usize>,
}

/// A two-sided envelope plus the evidence used to compute it.  `case_tag`
/// describes the branch taken for the lower bound; `dual_case_tag` the branch
/// taken for the complementary run that produced the upper bound.
#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    pub lower: Q,
    pub upper: Q,
    pub case_tag: CaseTag,
    pub dual_case_tag: CaseTag,
    pub index_sets: Option<IndexSets>,
    /// Constrained minimum L(F,K) when the ratio branch used it.
    pub aux_l: Option<Q>,
    /// Constrained maximum U(F^c,K) when the ratio branch used it.
    pub aux_u: Option<Q>,
    /// Enclosing prior-algebra event chosen by the search branch.
    pub enclosing: Option<Event>,
}

/// Outcome of one lower-bound run; two of these assemble an [`EnvelopeResult`].
struct Run {
    value: Q,
    tag: CaseTag,
    index_sets: Option<IndexSets>,
    aux_l: Option<Q>,
    aux_u: Option<Q>,
    enclosing: Option<Event>,
}

impl Run {
    fn plain(value: Q, tag: CaseTag) -> Self {
        Run { value, tag, index_sets: None, aux_l: None, aux_u: None, enclosing: None }
    }
}

fn assemble(lower: Run, complement: Run) -> EnvelopeResult {
    let upper = q1() - &complement.value;
    assert!(
        lower.value >= q0() && lower.value <= upper && upper <= q1(),
        "envelope bounds must satisfy 0 <= lower <= upper <= 1",
    );
    EnvelopeResult {
        lower: lower.value,
        upper,
        case_tag: lower.tag,
        dual_case_tag: complement.tag,
        index_sets: lower.index_sets,
        aux_l: lower.aux_l,
        aux_u: lower.aux_u,
        enclosing: lower.enclosing,
    }
}

/// Lower bound on the joint probability of `f` over all joints consistent
/// with the prior and strategy.
///
/// The finite-partition supremum is attained at the finest partition of the
/// prior subalgebra: merging blocks into a group G contributes pi(G) only when
/// the whole group event lies inside `f`, in which case every constituent
/// block already contributes its full share.  So the sum below equals the
/// supremum over all partitions (exercised against brute-force enumeration in
/// the tests).
pub fn lower_joint(space: &AtomSpace, prior: &Prior, strategy: &Strategy, f: &Event) -> Q {
    let mut total = q0();
    for b in 0..prior.n_blocks() {
        let mass = prior.block_mass(b);
        if mass.is_zero() {
            continue;
        }
        if prior.is_singleton_block(b) {
            let cell = prior.subalgebra().block(b)[0];
            total += mass * strategy.sigma(f, cell);
        } else if prior.block_event(space, b).is_subset(f) {
            total += mass;
        }
    }
    total
}

/// Upper joint bound, dual to [`lower_joint`].
pub fn upper_joint(space: &AtomSpace, prior: &Prior, strategy: &Strategy, f: &Event) -> Q {
    q1() - lower_joint(space, prior, strategy, &f.complement())
}

/// Partition the cells meeting `k` by whether they meet `f` and its
/// complement inside `k`.
pub fn index_sets(space: &AtomSpace, f: &Event, k: &Event) -> Result<IndexSets, EnvelopeError> {
    if k.is_empty() {
        return Err(EnvelopeError::EmptyConditioning);
    }
    let mut sets = IndexSets { i1: Vec::new(), i2: Vec::new(), i3: Vec::new() };
    for i in 0..space.n_rows() {
        let hk = space.row_event(i).expect("row index in range").and(k);
        if hk.is_empty() {
            continue;
        }
        let meets_f = hk.intersects(f);
        let meets_fc = !hk.is_subset(f);
        match (meets_f, meets_fc) {
            (true, false) => sets.i1.push(i),
            (true, true) => sets.i2.push(i),
            (false, true) => sets.i3.push(i),
            (false, false) => unreachable!("nonempty intersection meets f or its complement"),
        }
    }
    Ok(sets)
}

/// Extremum of the joint value of `objective` over joints consistent with the
/// prior and strategy, subject to pinning the joint value of `pinned`.
///
/// The feasible joints decompose per block: singleton blocks contribute the
/// fixed strategy mixture, multi-cell blocks a free sub-allocation of their
/// mass over the block's atoms.  Solved as an exact LP so the shape matches
/// the constrained extrema of the characterisation even when, as on
/// singleton-block instances, the polytope is a single point.
fn constrained_joint_extremum(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    objective: &Event,
    pinned: &Event,
    pinned_value: &Q,
    maximize: bool,
) -> Q {
    // Constant contribution of the singleton blocks to any event.
    let singleton_part = |g: &Event| -> Q {
        let mut s = q0();
        for b in 0..prior.n_blocks() {
            if prior.is_singleton_block(b) {
                let cell = prior.subalgebra().block(b)[0];
                s += prior.block_mass(b) * strategy.sigma(g, cell);
            }
        }
        s
    };

    let mut vars: Vec<usize> = Vec::new();
    let mut block_rows: Vec<(Vec<usize>, Q)> = Vec::new();
    for b in 0..prior.n_blocks() {
        if prior.is_singleton_block(b) {
            continue;
        }
        let ev = prior.block_event(space, b);
        let first = vars.len();
        for a in ev.atoms() {
            vars.push(a);
        }
        block_rows.push(((first..vars.len()).collect(), prior.block_mass(b).clone()));
    }

    let mut lp = RationalLP::new(vars.len());
    for (ids, mass) in &block_rows {
        let terms: Vec<(usize, Q)> = ids.iter().map(|&v| (v, q1())).collect();
        lp.eq(&terms, mass.clone());
    }
    let pin_terms: Vec<(usize, Q)> = vars
        .iter()
        .enumerate()
        .filter(|&(_, &a)| pinned.contains(a))
        .map(|(v, _)| (v, q1()))
        .collect();
    lp.eq(&pin_terms, pinned_value - singleton_part(pinned));

    let obj_terms: Vec<(usize, Q)> = vars
        .iter()
        .enumerate()
        .filter(|&(_, &a)| objective.contains(a))
        .map(|(v, _)| (v, q1()))
        .collect();
    let outcome = if maximize { lp.maximize(&obj_terms) } else { lp.minimize(&obj_terms) };
    let (value, _) = outcome
        .optimal()
        .expect("pinning a joint bound at its own extremum keeps the polytope nonempty");
    value + singleton_part(objective)
}

/// Case-(ii) bound shared by the coherent and joint-extension envelopes: the
/// minimum strategy ratio over cells that split K between F and its
/// complement, provided no cell lies entirely on the complement side.
fn null_mass_minimum(
    space: &AtomSpace,
    strategy: &Strategy,
    f: &Event,
    k: &Event,
) -> Result<Run, EnvelopeError> {
    let sets = index_sets(space, f, k)?;
    let fk = f.and(k);
    let mut bound: Option<Q> = None;
    let applicable = !sets.i2.is_empty() && sets.i3.is_empty();
    if applicable {
        for &i in &sets.i2 {
            let den = strategy.sigma(k, i);
            if den.is_zero() {
                bound = None;
                break;
            }
            let ratio = strategy.sigma(&fk, i) / den;
            bound = Some(match bound {
                Some(b) if b <= ratio => b,
                _ => ratio,
            });
        }
    }
    let mut run = match bound {
        Some(v) => Run::plain(v, CaseTag::NullCellMinimum),
        None => Run::plain(q0(), CaseTag::VacuousZero),
    };
    run.index_sets = Some(sets);
    Ok(run)
}

fn coherent_lower(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    f: &Event,
    k: &Event,
) -> Result<Run, EnvelopeError> {
    let fk = f.and(k);
    if fk == *k {
        return Ok(Run::plain(q1(), CaseTag::Tautology));
    }
    let pk = lower_joint(space, prior, strategy, k);
    if pk.is_zero() {
        return null_mass_minimum(space, strategy, f, k);
    }
    let fck = k.minus(f);
    let a = lower_joint(space, prior, strategy, &fk);
    let fck_upper = upper_joint(space, prior, strategy, &fck);
    let u = constrained_joint_extremum(space, prior, strategy, &fck, &fk, &a, true);
    let l = constrained_joint_extremum(space, prior, strategy, &fk, &fck, &fck_upper, false);
    // Positive lower joint mass of K rules out 0/0 in both ratios.
    let den1 = &a + &u;
    let den2 = &l + &fck_upper;
    assert!(!den1.is_zero() && !den2.is_zero(), "ratio denominators vanish only when K is joint-null");
    let t1 = &a / den1;
    let t2 = &l / den2;
    let mut run = Run::plain(if t1 <= t2 { t1 } else { t2 }, CaseTag::PositiveRatio);
    run.aux_l = Some(l);
    run.aux_u = Some(u);
    Ok(run)
}

/// Envelope of all coherent extensions of the prior and strategy at `f | k`.
pub fn conditional_envelope(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    f: &Event,
    k: &Event,
) -> Result<EnvelopeResult, EnvelopeError> {
    if k.is_empty() {
        return Err(EnvelopeError::EmptyConditioning);
    }
    let lo = coherent_lower(space, prior, strategy, f, k)?;
    let co = coherent_lower(space, prior, strategy, &f.complement(), k)?;
    Ok(assemble(lo, co))
}

/// Stieltjes integral of the strategy values of `f` against the prior, when
/// the lower and upper sums agree.
pub fn disintegrable_joint(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    f: &Event,
) -> Result<Q, EnvelopeError> {
    debug_assert_eq!(prior.subalgebra().n_universe(), space.n_rows());
    let values: Vec<Q> = (0..space.n_rows()).map(|i| strategy.sigma(f, i)).collect();
    let lo = lower_stieltjes(&values, prior.subalgebra(), masses(prior));
    let hi = upper_stieltjes(&values, prior.subalgebra(), masses(prior));
    if lo != hi {
        return Err(EnvelopeError::NotIntegrable(
            "lower and upper Stieltjes sums differ".to_string(),
        ));
    }
    Ok(lo)
}

fn masses(prior: &Prior) -> &[Q] {
    prior.masses()
}

/// Envelope of all coherent extensions of the assessment enlarged with the
/// Stieltjes joint.  Requires the joint to exist for every event, which on a
/// finite instance means every positive-mass block is a single cell.
pub fn dis_extension_envelope(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    f: &Event,
    k: &Event,
) -> Result<EnvelopeResult, EnvelopeError> {
    if k.is_empty() {
        return Err(EnvelopeError::EmptyConditioning);
    }
    for b in 0..prior.n_blocks() {
        if !prior.is_singleton_block(b) && !prior.block_mass(b).is_zero() {
            // A multi-cell block with positive mass makes some event
            // non-integrable (any single atom under one of its cells), so the
            // enlarged assessment is not defined.
            return Err(EnvelopeError::NotIntegrable(format!(
                "block {b} carries positive mass over several cells"
            )));
        }
    }
    let lo = dis_lower(space, prior, strategy, f, k)?;
    let co = dis_lower(space, prior, strategy, &f.complement(), k)?;
    Ok(assemble(lo, co))
}

fn dis_lower(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    f: &Event,
    k: &Event,
) -> Result<Run, EnvelopeError> {
    let fk = f.and(k);
    if fk == *k {
        return Ok(Run::plain(q1(), CaseTag::Tautology));
    }
    let pd_fk = disintegrable_joint(space, prior, strategy, &fk)?;
    let pd_fck = disintegrable_joint(space, prior, strategy, &k.minus(f))?;
    let pd_k = &pd_fk + &pd_fck;
    if pd_k.is_zero() {
        null_mass_minimum(space, strategy, f, k)
    } else {
        Ok(Run::plain(pd_fk / pd_k, CaseTag::PositiveRatio))
    }
}

/// Envelope of the conditional prior at `f | k` for events of the prior algebra.
pub fn conditional_prior_envelope(
    space: &AtomSpace,
    prior: &Prior,
    f: &Event,
    k: &Event,
) -> Result<EnvelopeResult, EnvelopeError> {
    if k.is_empty() {
        return Err(EnvelopeError::EmptyConditioning);
    }
    if prior.event_mass(space, f).is_none() {
        return Err(EnvelopeError::EventNotInPriorAlgebra);
    }
    let pk = prior.event_mass(space, k).ok_or(EnvelopeError::EventNotInPriorAlgebra)?;
    let lower_of = |g: &Event| -> Run {
        if pk.is_zero() {
            if k.is_subset(g) {
                Run::plain(q1(), CaseTag::Tautology)
            } else {
                Run::plain(q0(), CaseTag::VacuousAtNull)
            }
        } else {
            let num = prior
                .event_mass(space, &g.and(k))
                .expect("intersection of prior-algebra events stays in the algebra");
            Run::plain(num / &pk, CaseTag::PositiveRatio)
        }
    };
    Ok(assemble(lower_of(f), lower_of(&f.complement())))
}

/// The conditional prior lower envelope at `k` as a capacity over the prior
/// blocks.  Totally monotone for every `k` (a ratio of additive measures at
/// positive mass, a vacuous unanimity bound at null mass).
pub fn conditional_prior_capacity(
    space: &AtomSpace,
    prior: &Prior,
    k: &Event,
) -> Result<Capacity, EnvelopeError> {
    if k.is_empty() {
        return Err(EnvelopeError::EmptyConditioning);
    }
    if prior.event_mass(space, k).is_none() {
        return Err(EnvelopeError::EventNotInPriorAlgebra);
    }
    let n = prior.n_blocks();
    assert!(n <= 20, "conditional prior capacity over more than 20 blocks");
    let mut values = Vec::with_capacity(1 << n);
    for mask in 0u32..(1u32 << n) {
        let mut g = space.empty_event();
        for b in 0..n {
            if mask >> b & 1 == 1 {
                g = g.or(&prior.block_event(space, b));
            }
        }
        values.push(conditional_prior_envelope(space, prior, &g, k)?.lower);
    }
    Capacity::new(n, values).map_err(capacity_bug)
}

fn capacity_bug(e: CapacityError) -> EnvelopeError {
    panic!("conditional prior lower envelope is a normalized capacity: {e}");
}

/// How a fully disintegrable computation views the prior: either the declared
/// block structure (diffuse multi-cell blocks), or an allocation that pins
/// each block's mass to one chosen cell, refining the measurable events from
/// block unions to row unions.
enum PriorView<'a> {
    Diffuse,
    Atomic(&'a [usize]),
}

impl PriorView<'_> {
    /// Mass of `k` when `k` is measurable under this view, else None.
    fn mass(&self, space: &AtomSpace, prior: &Prior, k: &Event) -> Option<Q> {
        match self {
            PriorView::Diffuse => prior.event_mass(space, k),
            PriorView::Atomic(choice) => {
                if !is_row_union(space, k) {
                    return None;
                }
                let mut total = q0();
                for b in 0..prior.n_blocks() {
                    let row = space.row_event(choice[b]).expect("chosen cell in range");
                    if row.is_subset(k) {
                        total += prior.block_mass(b);
                    }
                }
                Some(total)
            }
        }
    }

    /// Integral of the strategy values of `g` against the viewed prior.
    fn integral(
        &self,
        space: &AtomSpace,
        prior: &Prior,
        strategy: &Strategy,
        g: &Event,
    ) -> Result<Q, EnvelopeError> {
        match self {
            PriorView::Diffuse => disintegrable_joint(space, prior, strategy, g),
            PriorView::Atomic(choice) => {
                let mut total = q0();
                for b in 0..prior.n_blocks() {
                    let mass = prior.block_mass(b);
                    if !mass.is_zero() {
                        total += mass * strategy.sigma(g, choice[b]);
                    }
                }
                Ok(total)
            }
        }
    }

    /// Smallest measurable event containing `k`.
    fn enclosing(&self, space: &AtomSpace, prior: &Prior, k: &Event) -> Event {
        let mut a = space.empty_event();
        match self {
            PriorView::Diffuse => {
                for b in 0..prior.n_blocks() {
                    let ev = prior.block_event(space, b);
                    if ev.intersects(k) {
                        a = a.or(&ev);
                    }
                }
            }
            PriorView::Atomic(_) => {
                for i in 0..space.n_rows() {
                    let row = space.row_event(i).expect("row in range");
                    if row.intersects(k) {
                        a = a.or(&row);
                    }
                }
            }
        }
        a
    }
}

fn is_row_union(space: &AtomSpace, k: &Event) -> bool {
    for i in 0..space.n_rows() {
        let row = space.row_event(i).expect("row in range");
        if row.intersects(k) && !row.is_subset(k) {
            return false;
        }
    }
    true
}

/// Cells whose whole row lies under `k`.
fn cells_under(space: &AtomSpace, k: &Event) -> Vec<usize> {
    (0..space.n_rows())
        .filter(|&i| space.row_event(i).expect("row in range").is_subset(k))
        .collect()
}

/// Constrained extremum of `sum w_i a_i` over probability vectors `w` on the
/// cells under a null conditioning event, subject to `sum w_i b_i` sitting at
/// its own extremum.  These are the auxiliary L/U values of the fully
/// disintegrable characterisation, parameterised by the free conditional
/// prior over the cells.
fn pinned_simplex_extremum(a: &[Q], b: &[Q], pin_max_b: bool, minimize_a: bool) -> Q {
    let n = a.len();
    let pin = if pin_max_b { b.iter().max() } else { b.iter().min() }.expect("nonempty cells");
    let mut lp = RationalLP::new(n);
    let ones: Vec<(usize, Q)> = (0..n).map(|v| (v, q1())).collect();
    lp.eq(&ones, q1());
    let b_terms: Vec<(usize, Q)> = (0..n).map(|v| (v, b[v].clone())).collect();
    lp.eq(&b_terms, pin.clone());
    let a_terms: Vec<(usize, Q)> = (0..n).map(|v| (v, a[v].clone())).collect();
    let outcome = if minimize_a { lp.minimize(&a_terms) } else { lp.maximize(&a_terms) };
    outcome.optimal().expect("the extremum-pinned simplex face is nonempty").0
}

fn fd_lower(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    view: &PriorView,
    f: &Event,
    k: &Event,
) -> Result<Run, EnvelopeError> {
    let fk = f.and(k);
    if fk == *k {
        return Ok(Run::plain(q1(), CaseTag::Tautology));
    }
    if let Some(pk) = view.mass(space, prior, k) {
        if !pk.is_zero() {
            let num = view.integral(space, prior, strategy, &fk)?;
            return Ok(Run::plain(num / pk, CaseTag::PositiveRatio));
        }
        let cells = cells_under(space, k);
        assert!(!cells.is_empty(), "a nonempty measurable K contains a whole row");
        let value = cells
            .iter()
            .map(|&i| strategy.sigma(f, i))
            .min()
            .expect("nonempty cells");
        return Ok(Run::plain(value, CaseTag::NullCellInfimum));
    }

    // K is not measurable: condition through the smallest measurable event
    // containing it.  Conditional mass only shrinks when the enclosing event
    // grows, so the minimal one decides whether any positive branch exists.
    let a0 = view.enclosing(space, prior, k);
    let q = fd_lower(space, prior, strategy, view, k, &a0)?.value;
    if q.is_zero() {
        // K keeps zero conditional mass inside every enclosing measurable
        // event, so the pinned joint no longer separates this class from the
        // plain pinned-joint extensions: composing through the cells (C3)
        // bounds the conditional by the guarded per-cell ratio minimum, and
        // that bound is attained.  A bare zero here would claim values the
        // strategy rows already rule out.
        let mut run = null_mass_minimum(space, strategy, f, k)?;
        run.enclosing = Some(a0);
        return Ok(run);
    }
    let pa0 = view.mass(space, prior, &a0).expect("enclosing event is measurable");
    let fck = k.minus(f);
    let (value, aux_l, aux_u) = if !pa0.is_zero() {
        // All conditional values at a0 are points, so the two ratio terms of
        // the characterisation coincide and L/U degenerate to them.
        let x = view.integral(space, prior, strategy, &fk)?;
        let y = view.integral(space, prior, strategy, &fck)?;
        let den = &x + &y;
        assert!(!den.is_zero(), "positive conditional mass of K keeps the denominator positive");
        (&x / &den, x / &pa0, y / &pa0)
    } else {
        let cells = cells_under(space, &a0);
        let a: Vec<Q> = cells.iter().map(|&i| strategy.sigma(&fk, i)).collect();
        let b: Vec<Q> = cells.iter().map(|&i| strategy.sigma(&fck, i)).collect();
        let x = a.iter().min().expect("nonempty cells").clone();
        let y_max = b.iter().max().expect("nonempty cells").clone();
        let u = pinned_simplex_extremum(&b, &a, false, false);
        let l = pinned_simplex_extremum(&a, &b, true, true);
        let t1_den = &x + &u;
        let t2_den = &l + &y_max;
        assert!(
            !t1_den.is_zero() && !t2_den.is_zero(),
            "positive conditional mass of K keeps both denominators positive",
        );
        let t1 = &x / t1_den;
        let t2 = &l / t2_den;
        (if t1 <= t2 { t1 } else { t2 }, l, u)
    };
    let mut run = Run::plain(value, CaseTag::EnclosingRatio);
    run.aux_l = Some(aux_l);
    run.aux_u = Some(aux_u);
    run.enclosing = Some(a0);
    Ok(run)
}

/// Envelope of the fully disintegrable extensions at `f | k`.
pub fn fully_dis_envelope(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    f: &Event,
    k: &Event,
) -> Result<EnvelopeResult, EnvelopeError> {
    if k.is_empty() {
        return Err(EnvelopeError::EmptyConditioning);
    }
    let lo = fd_lower(space, prior, strategy, &PriorView::Diffuse, f, k)?;
    let co = fd_lower(space, prior, strategy, &PriorView::Diffuse, &f.complement(), k)?;
    Ok(assemble(lo, co))
}

/// Enumerate one chosen cell per block; singleton blocks have no choice.
fn allocations(prior: &Prior) -> Result<Vec<Vec<usize>>, EnvelopeError> {
    let mut combos: usize = 1;
    for b in 0..prior.n_blocks() {
        combos = combos.saturating_mul(prior.subalgebra().block(b).len());
        if combos > 4096 {
            return Err(EnvelopeError::AllocationTooLarge);
        }
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for b in 0..prior.n_blocks() {
        let cells = prior.subalgebra().block(b);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                cells.iter().map(move |&c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    Ok(out)
}

/// Envelope of the fully strongly conglomerable extensions at `f | k`,
/// computed as the minimum over the allocation vertices of the prior of the
/// fully disintegrable bound under the allocated (atomic) prior.
pub fn fsc_envelope(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    f: &Event,
    k: &Event,
) -> Result<EnvelopeResult, EnvelopeError> {
    if k.is_empty() {
        return Err(EnvelopeError::EmptyConditioning);
    }
    let allocs = allocations(prior)?;
    let lower_of = |g: &Event| -> Result<Run, EnvelopeError> {
        let mut best: Option<Q> = None;
        for choice in &allocs {
            let v = fd_lower(space, prior, strategy, &PriorView::Atomic(choice), g, k)?.value;
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        Ok(Run::plain(best.expect("at least one allocation"), CaseTag::AllocationMinimum))
    };
    Ok(assemble(lower_of(f)?, lower_of(&f.complement())?))
}

/// Joint envelope of the strongly conglomerable extensions on a finite
/// instance: the lower and upper Stieltjes sums of the strategy against the
/// prior blocks.
pub fn sc_envelope_finite(
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
    f: &Event,
) -> EnvelopeResult {
    let values: Vec<Q> = (0..space.n_rows()).map(|i| strategy.sigma(f, i)).collect();
    let lower = lower_stieltjes(&values, prior.subalgebra(), masses(prior));
    let upper = upper_stieltjes(&values, prior.subalgebra(), masses(prior));
    assert!(lower <= upper);
    EnvelopeResult {
        lower,
        upper,
        case_tag: CaseTag::EssentialIntegral,
        dual_case_tag: CaseTag::EssentialIntegral,
        index_sets: None,
        aux_l: None,
        aux_u: None,
        enclosing: None,
    }
}
