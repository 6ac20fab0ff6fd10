//! Coherence checking and extension intervals for finite conditional
//! assessments, by exact linear programming.
//!
//! An assessment is a list of entries P(F|K) = p. Checking coherence builds a
//! layered full conditional probability one layer at a time: each layer is a
//! probability vector over the atoms not yet supported, subject to the
//! homogeneous constraint y(F∧K) = p·y(K) for every entry whose conditioning
//! event has had zero mass so far. Taking a layer of maximal support at every
//! step is lossless, which turns the search into a single chain of LPs.
//!
//! Extension intervals for a target F|K run a parallel chain that descends
//! through layers avoiding K; at each state the achievable ratios with K
//! positive form a closed interval computed by two LPs in Charnes-Cooper
//! form, and the overall interval is the span of the per-state intervals.

// Error values deliberately carry the full certificate (bounded-gain vector or
// layer stack); boxing them would push unwrapping onto every caller.
#![allow(clippy::result_large_err)]

use crate::algebra::{AtomSpace, Event};
use crate::assessment::{LayeredConditional, Prior, StatisticalModel};
use crate::lp::{LpOutcome, RationalLP};
use crate::rational::{q0, q1, Q};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoherenceError {
    #[error("entry {0} has an empty conditioning event")]
    EmptyConditioningEntry(usize),
    #[error("entry {0} has a value outside [0,1]")]
    ValueOutOfRange(usize),
    #[error("entry {0} is over a different atom space")]
    SpaceMismatch(usize),
    #[error("target conditioning event is empty")]
    EmptyConditioning,
    #[error("assessment is incoherent (layer {0} infeasible)")]
    IncoherentBase(usize),
    #[error("value {v} lies outside the coherent interval [{lo}, {hi}]")]
    ValueOutsideInterval { v: Q, lo: Q, hi: Q },
}

/// A finite list of assessed conditional probabilities P(F|K) = value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalAssessment {
    n_atoms: usize,
    entries: Vec<(Event, Event, Q)>,
}

impl ConditionalAssessment {
    pub fn new(
        n_atoms: usize,
        entries: Vec<(Event, Event, Q)>,
    ) -> Result<Self, CoherenceError> {
        for (idx, (f, k, v)) in entries.iter().enumerate() {
            if f.n_atoms() != n_atoms || k.n_atoms() != n_atoms {
                return Err(CoherenceError::SpaceMismatch(idx));
            }
            if k.is_empty() {
                return Err(CoherenceError::EmptyConditioningEntry(idx));
            }
            if *v < q0() || *v > q1() {
                return Err(CoherenceError::ValueOutOfRange(idx));
            }
        }
        Ok(ConditionalAssessment { n_atoms, entries })
    }

    /// The entries pinning a prior and a statistical model: one P(B|Ω) = π(B)
    /// per block, and one P(atom|H_i) = λ value per atom of every cell (null
    /// cells included; the conditional constraint binds at mass zero too).
    pub fn from_prior_model(space: &AtomSpace, prior: &Prior, model: &StatisticalModel) -> Self {
        let omega = space.omega();
        let mut entries = Vec::new();
        for b in 0..prior.n_blocks() {
            entries.push((
                prior.block_event(space, b),
                omega.clone(),
                prior.block_mass(b).clone(),
            ));
        }
        for a in 0..space.n_atoms() {
            let (i, j) = space.atom_coords(a);
            entries.push((
                Event::from_atoms(space.n_atoms(), &[a]),
                space.row_event(i).expect("row in range"),
                model.value(i, j).clone(),
            ));
        }
        ConditionalAssessment {
            n_atoms: space.n_atoms(),
            entries,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn entries(&self) -> &[(Event, Event, Q)] {
        &self.entries
    }

    pub fn push(&mut self, f: Event, k: Event, v: Q) -> Result<(), CoherenceError> {
        let idx = self.entries.len();
        if f.n_atoms() != self.n_atoms || k.n_atoms() != self.n_atoms {
            return Err(CoherenceError::SpaceMismatch(idx));
        }
        if k.is_empty() {
            return Err(CoherenceError::EmptyConditioningEntry(idx));
        }
        if v < q0() || v > q1() {
            return Err(CoherenceError::ValueOutOfRange(idx));
        }
        self.entries.push((f, k, v));
        Ok(())
    }
}

/// Outcome of a coherence check.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub coherent: bool,
    /// A full conditional probability agreeing with every entry, when coherent.
    pub witness: Option<LayeredConditional>,
    /// Index of the first layer whose system is infeasible, when incoherent.
    pub infeasible_layer: Option<usize>,
}

/// Entry constraint y(F∧K) = p·y(K), restricted to the given atom list.
fn entry_constraint(
    vars: &[usize],
    f: &Event,
    k: &Event,
    p: &Q,
) -> Vec<(usize, Q)> {
    let fk = f.and(k);
    let mut terms = Vec::new();
    for (x, &a) in vars.iter().enumerate() {
        let mut c = q0();
        if fk.contains(a) {
            c += q1();
        }
        if k.contains(a) {
            c -= p;
        }
        if !c.is_zero() {
            terms.push((x, c));
        }
    }
    terms
}

fn sum_over(vars: &[usize], e: &Event) -> Vec<(usize, Q)> {
    vars.iter()
        .enumerate()
        .filter(|(_, &a)| e.contains(a))
        .map(|(x, _)| (x, q1()))
        .collect()
}

/// Repeatedly maximizes the mass of not-yet-positive variables and averages
/// the solutions; the result is a feasible point whose support contains the
/// support of every feasible point. None if the LP is infeasible.
fn max_support_solution(lp: &RationalLP) -> Option<Vec<Q>> {
    let n = lp.n_vars();
    let mut sols: Vec<Vec<Q>> = Vec::new();
    let mut positive = vec![false; n];
    loop {
        let zero_vars: Vec<(usize, Q)> = (0..n)
            .filter(|&x| !positive[x])
            .map(|x| (x, q1()))
            .collect();
        if zero_vars.is_empty() {
            break;
        }
        let (value, point) = match lp.maximize(&zero_vars) {
            LpOutcome::Optimal { value, point } => (value, point),
            LpOutcome::Infeasible => return None,
            LpOutcome::Unbounded => unreachable!("support LPs have bounded mass"),
        };
        if value.is_zero() {
            if sols.is_empty() {
                sols.push(point);
            }
            break;
        }
        for (x, v) in point.iter().enumerate() {
            if !v.is_zero() {
                positive[x] = true;
            }
        }
        sols.push(point);
    }
    let t = Q::new((sols.len() as i64).into(), 1.into());
    let mut avg = vec![q0(); n];
    for s in &sols {
        for (a, v) in avg.iter_mut().zip(s) {
            *a += v;
        }
    }
    for a in avg.iter_mut() {
        *a = &*a / &t;
    }
    Some(avg)
}

/// Widens a solution over `vars` to a full-width layer vector.
fn widen(n_atoms: usize, vars: &[usize], sol: &[Q]) -> Vec<Q> {
    let mut layer = vec![q0(); n_atoms];
    for (x, &a) in vars.iter().enumerate() {
        layer[a] = sol[x].clone();
    }
    layer
}

/// Builds a maximal-support layer at the state (uncovered entries, remaining
/// atoms), normalized to total mass 1 over the remaining atoms.
fn state_layer(
    a: &ConditionalAssessment,
    uncovered: &[usize],
    remaining: &[usize],
) -> Option<Vec<Q>> {
    let mut lp = RationalLP::new(remaining.len());
    for &i in uncovered {
        let (f, k, p) = &a.entries[i];
        lp.eq(&entry_constraint(remaining, f, k, p), q0());
    }
    let all: Vec<(usize, Q)> = (0..remaining.len()).map(|x| (x, q1())).collect();
    lp.eq(&all, q1());
    max_support_solution(&lp)
}

/// Checks de Finetti coherence by the greedy layer descent. On success the
/// witness extends every entry; on failure the first infeasible layer index
/// is reported.
pub fn check_coherence(a: &ConditionalAssessment) -> CoherenceReport {
    let n = a.n_atoms;
    let mut uncovered: Vec<usize> = (0..a.entries.len()).collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut layers: Vec<Vec<Q>> = Vec::new();
    while !uncovered.is_empty() {
        assert!(
            !remaining.is_empty(),
            "uncovered conditioning events lie inside the remaining atoms"
        );
        let Some(sol) = state_layer(a, &uncovered, &remaining) else {
            return CoherenceReport {
                coherent: false,
                witness: None,
                infeasible_layer: Some(layers.len()),
            };
        };
        let layer = widen(n, &remaining, &sol);
        uncovered.retain(|&i| {
            let (_, k, _) = &a.entries[i];
            k.atoms().all(|atom| layer[atom].is_zero())
        });
        remaining.retain(|&atom| layer[atom].is_zero());
        layers.push(layer);
    }
    if !remaining.is_empty() {
        let w = Q::new(1.into(), (remaining.len() as i64).into());
        let mut pad = vec![q0(); n];
        for &atom in &remaining {
            pad[atom] = w.clone();
        }
        layers.push(pad);
    }
    if layers.is_empty() {
        // No entries and no atoms is impossible; no entries alone gets a pad.
        layers.push(vec![Q::new(1.into(), (n as i64).into()); n]);
    }
    let witness = LayeredConditional::new(n, layers)
        .expect("descent layers have disjoint supports and unit mass");
    CoherenceReport {
        coherent: true,
        witness: Some(witness),
        infeasible_layer: None,
    }
}

/// One state of the target-conditioning chain: the constraint system over the
/// remaining atoms, kept for repeated objective solves.
struct ChainState {
    vars: Vec<usize>,
    /// Charnes-Cooper system: entry constraints plus y(K) = 1; present only
    /// when a first layer giving K positive mass is feasible here.
    ratio_lp: Option<RationalLP>,
    uncovered: Vec<usize>,
}

/// The full descent for one conditioning event K: states are generated by
/// repeatedly taking the maximal-support layer among those giving K zero
/// mass. Every coherent value of any P(F|K) is attained within some state.
pub struct OracleChain {
    n_atoms: usize,
    k: Event,
    states: Vec<ChainState>,
    /// Maximal K-avoiding layer leading from state t to state t+1.
    descent_layers: Vec<Vec<Q>>,
    assessment: ConditionalAssessment,
}

impl OracleChain {
    /// Builds the chain. The assessment must be coherent (run check_coherence
    /// first); an incoherent base makes the per-state systems meaningless.
    pub fn new(a: &ConditionalAssessment, k: &Event) -> Result<Self, CoherenceError> {
        if k.is_empty() {
            return Err(CoherenceError::EmptyConditioning);
        }
        if k.n_atoms() != a.n_atoms {
            return Err(CoherenceError::SpaceMismatch(usize::MAX));
        }
        let n = a.n_atoms;
        let mut uncovered: Vec<usize> = (0..a.entries.len()).collect();
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut states = Vec::new();
        let mut descent_layers = Vec::new();
        loop {
            // Ratio system at this state: entries + y(K) = 1.
            let mut lp = RationalLP::new(remaining.len());
            for &i in &uncovered {
                let (f, ke, p) = &a.entries[i];
                lp.eq(&entry_constraint(&remaining, f, ke, p), q0());
            }
            lp.eq(&sum_over(&remaining, k), q1());
            let ratio_lp = lp.is_feasible().then_some(lp);
            states.push(ChainState {
                vars: remaining.clone(),
                ratio_lp,
                uncovered: uncovered.clone(),
            });

            // Descend through the maximal layer avoiding K.
            let avoid: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&atom| !k.contains(atom))
                .collect();
            if avoid.is_empty() {
                break;
            }
            let mut lp = RationalLP::new(avoid.len());
            for &i in &uncovered {
                let (f, ke, p) = &a.entries[i];
                lp.eq(&entry_constraint(&avoid, f, ke, p), q0());
            }
            let all: Vec<(usize, Q)> = (0..avoid.len()).map(|x| (x, q1())).collect();
            lp.eq(&all, q1());
            let Some(sol) = max_support_solution(&lp) else {
                break;
            };
            let layer = widen(n, &avoid, &sol);
            uncovered.retain(|&i| {
                let (_, ke, _) = &a.entries[i];
                ke.atoms().all(|atom| layer[atom].is_zero())
            });
            remaining.retain(|&atom| layer[atom].is_zero());
            descent_layers.push(layer);
        }
        Ok(OracleChain {
            n_atoms: n,
            k: k.clone(),
            states,
            descent_layers,
            assessment: a.clone(),
        })
    }

    /// The closed interval of coherent values for F|K.
    pub fn interval(&self, f: &Event) -> (Q, Q) {
        let fk = f.and(&self.k);
        let mut bounds: Option<(Q, Q)> = None;
        for st in &self.states {
            let Some(lp) = &st.ratio_lp else { continue };
            let obj = sum_over(&st.vars, &fk);
            let (lo, _) = lp.minimize(&obj).optimal().expect("bounded ratio system");
            let (hi, _) = lp.maximize(&obj).optimal().expect("bounded ratio system");
            bounds = Some(match bounds {
                None => (lo, hi),
                Some((blo, bhi)) => (blo.min(lo), bhi.max(hi)),
            });
        }
        bounds.expect("a coherent assessment admits a layer giving K positive mass")
    }

    /// A full conditional probability extending the assessment with
    /// P(F|K) = v, built by pinning the ratio at the first state whose
    /// interval contains v and completing greedily.
    pub fn witness(&self, f: &Event, v: &Q) -> Result<LayeredConditional, CoherenceError> {
        let fk = f.and(&self.k);
        let n = self.n_atoms;
        for (t, st) in self.states.iter().enumerate() {
            let Some(lp) = &st.ratio_lp else { continue };
            let obj = sum_over(&st.vars, &fk);
            let (lo, _) = lp.minimize(&obj).optimal().expect("bounded ratio system");
            let (hi, _) = lp.maximize(&obj).optimal().expect("bounded ratio system");
            if *v < lo || *v > hi {
                continue;
            }
            // Pin the ratio and take a maximal-support solution. The system
            // is unbounded in total mass, so cap it just above the least
            // achievable total; mixing keeps every reachable support inside.
            let mut pinned = lp.clone();
            pinned.eq(&obj, v.clone());
            let all: Vec<(usize, Q)> = (0..st.vars.len()).map(|x| (x, q1())).collect();
            let (least_total, _) = pinned
                .minimize(&all)
                .optimal()
                .expect("pinned system feasible inside the interval");
            pinned.le(&all, least_total + q1());
            let sol = max_support_solution(&pinned).expect("pinned system feasible");
            let total: Q = sol.iter().sum();
            let scaled: Vec<Q> = sol.iter().map(|x| x / &total).collect();
            let layer = widen(n, &st.vars, &scaled);

            let mut layers: Vec<Vec<Q>> = self.descent_layers[..t].to_vec();
            layers.push(layer.clone());
            // Complete: remaining entries over remaining atoms, greedily.
            let mut uncovered: Vec<usize> = st
                .uncovered
                .iter()
                .copied()
                .filter(|&i| {
                    let (_, ke, _) = &self.assessment.entries[i];
                    ke.atoms().all(|atom| layer[atom].is_zero())
                })
                .collect();
            let mut remaining: Vec<usize> = st
                .vars
                .iter()
                .copied()
                .filter(|&atom| layer[atom].is_zero())
                .collect();
            while !uncovered.is_empty() {
                let sol = state_layer(&self.assessment, &uncovered, &remaining)
                    .expect("continuation of a pinned maximal-support layer is feasible");
                let l = widen(n, &remaining, &sol);
                uncovered.retain(|&i| {
                    let (_, ke, _) = &self.assessment.entries[i];
                    ke.atoms().all(|atom| l[atom].is_zero())
                });
                remaining.retain(|&atom| l[atom].is_zero());
                layers.push(l);
            }
            if !remaining.is_empty() {
                let w = Q::new(1.into(), (remaining.len() as i64).into());
                let mut pad = vec![q0(); n];
                for &atom in &remaining {
                    pad[atom] = w.clone();
                }
                layers.push(pad);
            }
            let witness = LayeredConditional::new(n, layers)
                .expect("chain layers have disjoint supports and unit mass");
            return Ok(witness);
        }
        let (lo, hi) = self.interval(f);
        Err(CoherenceError::ValueOutsideInterval {
            v: v.clone(),
            lo,
            hi,
        })
    }
}

/// The closed interval of values v for which adding P(F|K) = v keeps the
/// assessment coherent. Errors if the base itself is incoherent.
pub fn extension_interval(
    a: &ConditionalAssessment,
    f: &Event,
    k: &Event,
) -> Result<(Q, Q), CoherenceError> {
    let report = check_coherence(a);
    if !report.coherent {
        return Err(CoherenceError::IncoherentBase(
            report.infeasible_layer.unwrap_or(0),
        ));
    }
    let chain = OracleChain::new(a, k)?;
    Ok(chain.interval(f))
}

/// A full conditional probability extending the assessment with P(F|K) = v.
pub fn witness_extension(
    a: &ConditionalAssessment,
    f: &Event,
    k: &Event,
    v: &Q,
) -> Result<LayeredConditional, CoherenceError> {
    let report = check_coherence(a);
    if !report.coherent {
        return Err(CoherenceError::IncoherentBase(
            report.infeasible_layer.unwrap_or(0),
        ));
    }
    let chain = OracleChain::new(a, k)?;
    chain.witness(f, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assessment::{
        extends_assessment, strategy_from_model, validate_full_conditional,
    };
    use crate::rational::q;

    fn grid22() -> AtomSpace {
        AtomSpace::full(2, 2)
    }

    fn bayes22() -> (AtomSpace, Prior, StatisticalModel) {
        let space = grid22();
        let prior = Prior::uniform_singletons(2);
        let model = StatisticalModel::new(
            &space,
            vec![vec![q(1, 4), q(3, 4)], vec![q(3, 4), q(1, 4)]],
        )
        .unwrap();
        (space, prior, model)
    }

    #[test]
    fn total_probability_assessment_is_coherent() {
        let space = grid22();
        let e1 = space.col_event(0).unwrap();
        let h1 = space.row_event(0).unwrap();
        let h2 = space.row_event(1).unwrap();
        let omega = space.omega();
        let a = ConditionalAssessment::new(
            4,
            vec![
                (e1.clone(), omega.clone(), q(1, 2)),
                (e1.clone(), h1.clone(), q(1, 4)),
                (e1.clone(), h2, q(3, 4)),
                (h1, omega, q(1, 2)),
            ],
        )
        .unwrap();
        let report = check_coherence(&a);
        assert!(report.coherent);
        let w = report.witness.unwrap();
        assert_eq!(validate_full_conditional(&w), Ok(()));
        for (f, k, v) in a.entries() {
            assert_eq!(w.evaluate(f, k).unwrap(), *v);
        }
    }

    #[test]
    fn duplicate_pair_with_different_values_is_incoherent() {
        let space = grid22();
        let e1 = space.col_event(0).unwrap();
        let omega = space.omega();
        let a = ConditionalAssessment::new(
            4,
            vec![
                (e1.clone(), omega.clone(), q(3, 10)),
                (e1, omega, q(2, 5)),
            ],
        )
        .unwrap();
        let report = check_coherence(&a);
        assert!(!report.coherent);
        assert!(report.infeasible_layer.is_some());
    }

    #[test]
    fn total_probability_bound_violation_is_incoherent() {
        let space = grid22();
        let e1 = space.col_event(0).unwrap();
        let h1 = space.row_event(0).unwrap();
        let omega = space.omega();
        // P(H1|Ω)=1 forces P(E1|Ω)=P(E1|H1)=1/4, not 9/10.
        let a = ConditionalAssessment::new(
            4,
            vec![
                (e1.clone(), h1.clone(), q(1, 4)),
                (e1, omega.clone(), q(9, 10)),
                (h1, omega, q(1, 1)),
            ],
        )
        .unwrap();
        assert!(!check_coherence(&a).coherent);
    }

    #[test]
    fn assessed_target_gives_degenerate_interval() {
        let space = grid22();
        let e1 = space.col_event(0).unwrap();
        let h1 = space.row_event(0).unwrap();
        let a =
            ConditionalAssessment::new(4, vec![(e1.clone(), h1.clone(), q(1, 4))]).unwrap();
        let (lo, hi) = extension_interval(&a, &e1, &h1).unwrap();
        assert_eq!(lo, q(1, 4));
        assert_eq!(hi, q(1, 4));
    }

    #[test]
    fn bayes_posterior_is_pinned_on_full_grid() {
        let (space, prior, model) = bayes22();
        let a = ConditionalAssessment::from_prior_model(&space, &prior, &model);
        let h1 = space.row_event(0).unwrap();
        let e1 = space.col_event(0).unwrap();
        let (lo, hi) = extension_interval(&a, &h1, &e1).unwrap();
        // (1/2·1/4)/(1/2·1/4 + 1/2·3/4) = 1/4; the joint is unique here.
        assert_eq!(lo, q(1, 4));
        assert_eq!(hi, q(1, 4));
        let omega = space.omega();
        let (lo, hi) = extension_interval(&a, &e1, &omega).unwrap();
        assert_eq!(lo, q(1, 2));
        assert_eq!(hi, q(1, 2));
    }

    #[test]
    fn null_cell_leaves_its_posterior_free() {
        let space = grid22();
        let prior = Prior::new(
            crate::algebra::Subalgebra::discrete(2),
            vec![q(1, 1), q0()],
        )
        .unwrap();
        let model = StatisticalModel::new(
            &space,
            vec![vec![q(1, 4), q(3, 4)], vec![q(3, 4), q(1, 4)]],
        )
        .unwrap();
        let a = ConditionalAssessment::from_prior_model(&space, &prior, &model);
        let h2 = space.row_event(1).unwrap();
        let omega = space.omega();
        let (lo, hi) = extension_interval(&a, &h2, &omega).unwrap();
        assert_eq!((lo, hi), (q0(), q0()));
        // Conditioning on the null cell still returns its strategy row.
        let e1 = space.col_event(0).unwrap();
        let (lo, hi) = extension_interval(&a, &e1, &h2).unwrap();
        assert_eq!((lo, hi), (q(3, 4), q(3, 4)));
    }

    #[test]
    fn incoherent_base_is_reported() {
        let space = grid22();
        let e1 = space.col_event(0).unwrap();
        let omega = space.omega();
        let a = ConditionalAssessment::new(
            4,
            vec![
                (e1.clone(), omega.clone(), q(3, 10)),
                (e1.clone(), omega.clone(), q(2, 5)),
            ],
        )
        .unwrap();
        assert!(matches!(
            extension_interval(&a, &e1, &omega),
            Err(CoherenceError::IncoherentBase(_))
        ));
    }

    #[test]
    fn witnesses_attain_endpoints_and_midpoints() {
        let (space, prior, model) = bayes22();
        let strategy = strategy_from_model(&space, &model);
        let a = ConditionalAssessment::from_prior_model(&space, &prior, &model);
        // A target left free by the assessment: one atom given a column.
        let f = space.atom_event(0, 0).unwrap();
        let k = space.col_event(0).unwrap();
        let (lo, hi) = extension_interval(&a, &f, &k).unwrap();
        assert_eq!((lo.clone(), hi.clone()), (q(1, 4), q(1, 4)));
        for v in [lo, hi] {
            let w = witness_extension(&a, &f, &k, &v).unwrap();
            assert_eq!(validate_full_conditional(&w), Ok(()));
            assert!(extends_assessment(&w, &space, &prior, &strategy));
            assert_eq!(w.evaluate(&f, &k).unwrap(), v);
        }
    }

    #[test]
    fn witness_on_free_target_with_null_prior() {
        let space = grid22();
        let prior = Prior::new(
            crate::algebra::Subalgebra::discrete(2),
            vec![q(1, 1), q0()],
        )
        .unwrap();
        let model = StatisticalModel::new(
            &space,
            vec![vec![q(1, 4), q(3, 4)], vec![q(3, 4), q(1, 4)]],
        )
        .unwrap();
        let strategy = strategy_from_model(&space, &model);
        let a = ConditionalAssessment::from_prior_model(&space, &prior, &model);
        // H2 is null, so conditioning on an event meeting H2 only through
        // deeper layers can leave room; target the atom (2,1) given E1.
        let f = space.atom_event(1, 0).unwrap();
        let k = space.col_event(0).unwrap();
        let (lo, hi) = extension_interval(&a, &f, &k).unwrap();
        assert_eq!((lo.clone(), hi.clone()), (q0(), q0()));
        let w = witness_extension(&a, &f, &k, &lo).unwrap();
        assert_eq!(validate_full_conditional(&w), Ok(()));
        assert!(extends_assessment(&w, &space, &prior, &strategy));
        assert_eq!(w.evaluate(&f, &k).unwrap(), lo);
        assert!(matches!(
            witness_extension(&a, &f, &k, &q(1, 2)),
            Err(CoherenceError::ValueOutsideInterval { .. })
        ));
        // The null cell's own conditioning is still decided: H2|H2 = 1.
        let h2 = space.row_event(1).unwrap();
        let (lo, hi) = extension_interval(&a, &h2, &h2).unwrap();
        assert_eq!((lo, hi), (q(1, 1), q(1, 1)));
    }

    #[test]
    fn diffuse_block_leaves_interval_open() {
        // Single two-cell block of mass 1: the per-cell split is free, so a
        // row's marginal ranges over [0,1] and a posterior ranges over the
        // per-cell ratios' span.
        let space = grid22();
        let prior = Prior::new(
            crate::algebra::Subalgebra::new(2, vec![vec![0, 1]]).unwrap(),
            vec![q1()],
        )
        .unwrap();
        let model = StatisticalModel::new(
            &space,
            vec![vec![q(1, 4), q(3, 4)], vec![q(3, 4), q(1, 4)]],
        )
        .unwrap();
        let a = ConditionalAssessment::from_prior_model(&space, &prior, &model);
        let h1 = space.row_event(0).unwrap();
        let omega = space.omega();
        let (lo, hi) = extension_interval(&a, &h1, &omega).unwrap();
        assert_eq!((lo, hi), (q0(), q(1, 1)));
        let e1 = space.col_event(0).unwrap();
        let (lo, hi) = extension_interval(&a, &h1, &e1).unwrap();
        // Posterior odds run from all-mass-on-H2 to all-mass-on-H1.
        assert_eq!((lo, hi), (q0(), q(1, 1)));
        let (lo, hi) = extension_interval(&a, &e1, &omega).unwrap();
        // Mixtures of 1/4 and 3/4.
        assert_eq!((lo, hi), (q(1, 4), q(3, 4)));
    }
}
