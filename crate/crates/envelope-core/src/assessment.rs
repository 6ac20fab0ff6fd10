//! Priors, statistical models, strategies, and full conditional probabilities.
//!
//! A prior lives on a subalgebra of conditioning cells (blocks of rows); a
//! statistical model gives one probability row per conditioning cell and
//! extends uniquely to a strategy on all events. Full conditional
//! probabilities are represented in layered form: an ordered list of
//! probability vectors with disjoint supports covering every atom.

use crate::algebra::{AtomSpace, Event, Subalgebra};
use crate::rational::{q0, q1, Q};
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AssessmentError {
    #[error("invalid prior: {0}")]
    BadPrior(String),
    #[error("invalid statistical model: {0}")]
    BadModel(String),
    #[error("invalid layered conditional: {0}")]
    BadLayers(String),
    #[error("conditioning event is empty")]
    EmptyConditioning,
}

/// A finitely additive prior on the algebra generated by blocks of
/// conditioning cells. Cells grouped into a multi-cell block carry no
/// individual mass; only the block total is assessed.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    sub: Subalgebra,
    mass: Vec<Q>,
}

impl Prior {
    pub fn new(sub: Subalgebra, mass: Vec<Q>) -> Result<Self, AssessmentError> {
        if mass.len() != sub.n_blocks() {
            return Err(AssessmentError::BadPrior(format!(
                "{} masses for {} blocks",
                mass.len(),
                sub.n_blocks()
            )));
        }
        if mass.iter().any(|m| m < &q0()) {
            return Err(AssessmentError::BadPrior("negative block mass".into()));
        }
        let total: Q = mass.iter().sum();
        if total != q1() {
            return Err(AssessmentError::BadPrior(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(Prior { sub, mass })
    }

    /// Uniform prior with one block per cell.
    pub fn uniform_singletons(n_rows: usize) -> Self {
        let w = Q::new(1.into(), (n_rows as i64).into());
        Prior::new(Subalgebra::discrete(n_rows), vec![w; n_rows]).expect("uniform is valid")
    }

    pub fn subalgebra(&self) -> &Subalgebra {
        &self.sub
    }

    pub fn n_blocks(&self) -> usize {
        self.sub.n_blocks()
    }

    pub fn block_mass(&self, b: usize) -> &Q {
        &self.mass[b]
    }

    /// Block masses in block order.
    pub fn masses(&self) -> &[Q] {
        &self.mass
    }

    pub fn is_singleton_block(&self, b: usize) -> bool {
        self.sub.block(b).len() == 1
    }

    /// The atoms lying under the rows of block b.
    pub fn block_event(&self, space: &AtomSpace, b: usize) -> Event {
        rows_event(space, self.sub.block(b))
    }

    /// Mass of an event, provided it is a union of whole blocks; None otherwise.
    pub fn event_mass(&self, space: &AtomSpace, f: &Event) -> Option<Q> {
        let mut total = q0();
        for b in 0..self.sub.n_blocks() {
            let be = self.block_event(space, b);
            if be.is_subset(f) {
                total += &self.mass[b];
            } else if be.intersects(f) {
                return None;
            }
        }
        Some(total)
    }
}

/// Union of whole conditioning rows as an atom event.
pub fn rows_event(space: &AtomSpace, rows: &[usize]) -> Event {
    let mut e = space.empty_event();
    for &i in rows {
        e = e.or(&space.row_event(i).expect("row in range"));
    }
    e
}

/// One probability row per conditioning cell over the compatible columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticalModel {
    rows: Vec<Vec<Q>>,
}

impl StatisticalModel {
    /// `rows[i][j]` is the chance of column j in cell i; entries at
    /// incompatible (i,j) must be zero.
    pub fn new(space: &AtomSpace, rows: Vec<Vec<Q>>) -> Result<Self, AssessmentError> {
        if rows.len() != space.n_rows() {
            return Err(AssessmentError::BadModel(format!(
                "{} rows for {} cells",
                rows.len(),
                space.n_rows()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != space.n_cols() {
                return Err(AssessmentError::BadModel(format!(
                    "row {} has {} entries for {} columns",
                    i + 1,
                    row.len(),
                    space.n_cols()
                )));
            }
            let mut sum = q0();
            for (j, v) in row.iter().enumerate() {
                if v < &q0() {
                    return Err(AssessmentError::BadModel(format!(
                        "negative entry at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
                if !space.compatible(i, j) && !v.is_zero() {
                    return Err(AssessmentError::BadModel(format!(
                        "positive mass on incompatible pair ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
                sum += v;
            }
            if sum != q1() {
                return Err(AssessmentError::BadModel(format!(
                    "row {} sums to {sum}, not 1",
                    i + 1
                )));
            }
        }
        Ok(StatisticalModel { rows })
    }

    pub fn value(&self, i: usize, j: usize) -> &Q {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }
}

/// The unique strategy extending a statistical model: per conditioning cell,
/// the model row pushed onto the atoms of that row.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    n_rows: usize,
    atom_row: Vec<usize>,
    atom_value: Vec<Q>,
}

pub fn strategy_from_model(space: &AtomSpace, model: &StatisticalModel) -> Strategy {
    let n = space.n_atoms();
    let mut atom_row = Vec::with_capacity(n);
    let mut atom_value = Vec::with_capacity(n);
    for a in 0..n {
        let (i, j) = space.atom_coords(a);
        atom_row.push(i);
        atom_value.push(model.value(i, j).clone());
    }
    Strategy {
        n_rows: space.n_rows(),
        atom_row,
        atom_value,
    }
}

impl Strategy {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// σ(F|H_i): total model mass of the atoms of cell i lying inside F.
    /// Additive in F with total mass 1, and 1 whenever F covers the cell.
    pub fn sigma(&self, f: &Event, i: usize) -> Q {
        let mut s = q0();
        for a in f.atoms() {
            if self.atom_row[a] == i {
                s += &self.atom_value[a];
            }
        }
        s
    }

    pub fn atom_value(&self, a: usize) -> &Q {
        &self.atom_value[a]
    }

    pub fn atom_cell(&self, a: usize) -> usize {
        self.atom_row[a]
    }
}

/// A full conditional probability on the finite algebra, as a finite sequence
/// of probability vectors with disjoint supports covering every atom.
///
/// evaluate(F|K) reads off P_k(F∧K)/P_k(K) at the first layer k giving K
/// positive mass; one exists for every nonempty K because supports cover
/// all atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredConditional {
    pub n_atoms: usize,
    pub layers: Vec<Vec<Q>>,
}

impl LayeredConditional {
    /// Validates the layer structure.
    pub fn new(n_atoms: usize, layers: Vec<Vec<Q>>) -> Result<Self, AssessmentError> {
        let p = LayeredConditional { n_atoms, layers };
        p.check_structure().map_err(|v| {
            AssessmentError::BadLayers(match v {
                Violation::BadLayer { layer, detail } => format!("layer {layer}: {detail}"),
                other => format!("{other:?}"),
            })
        })?;
        Ok(p)
    }

    /// No validation; for building deliberately broken structures in tests.
    pub fn raw(n_atoms: usize, layers: Vec<Vec<Q>>) -> Self {
        LayeredConditional { n_atoms, layers }
    }

    fn check_structure(&self) -> Result<(), Violation> {
        let mut covered = vec![false; self.n_atoms];
        for (k, layer) in self.layers.iter().enumerate() {
            if layer.len() != self.n_atoms {
                return Err(Violation::BadLayer {
                    layer: k,
                    detail: format!("{} entries for {} atoms", layer.len(), self.n_atoms),
                });
            }
            let mut sum = q0();
            for (a, v) in layer.iter().enumerate() {
                if v < &q0() {
                    return Err(Violation::BadLayer {
                        layer: k,
                        detail: format!("negative mass at atom {a}"),
                    });
                }
                if !v.is_zero() {
                    if covered[a] {
                        return Err(Violation::BadLayer {
                            layer: k,
                            detail: format!("atom {a} already supported by an earlier layer"),
                        });
                    }
                    covered[a] = true;
                }
                sum += v;
            }
            if sum != q1() {
                return Err(Violation::BadLayer {
                    layer: k,
                    detail: format!("mass sums to {sum}, not 1"),
                });
            }
        }
        if let Some(a) = covered.iter().position(|&c| !c) {
            return Err(Violation::Uncovered { atom: a });
        }
        Ok(())
    }

    fn layer_mass(&self, k: usize, e: &Event) -> Q {
        e.atoms().map(|a| &self.layers[k][a]).sum()
    }

    pub fn evaluate(&self, f: &Event, k: &Event) -> Result<Q, AssessmentError> {
        evaluate_layered(self, f, k)
    }
}

/// P(F|K) from the layered form. 1 whenever F covers K.
pub fn evaluate_layered(
    p: &LayeredConditional,
    f: &Event,
    k: &Event,
) -> Result<Q, AssessmentError> {
    if k.is_empty() {
        return Err(AssessmentError::EmptyConditioning);
    }
    for layer in 0..p.layers.len() {
        let den = p.layer_mass(layer, k);
        if !den.is_zero() {
            return Ok(p.layer_mass(layer, &f.and(k)) / den);
        }
    }
    // Unreachable on validated structures; raw ones may leave K uncovered.
    Err(AssessmentError::BadLayers(
        "no layer gives the conditioning event positive mass".into(),
    ))
}

/// A conditional probability given extensionally: one atom row per nonempty
/// conditioning event. Used to exercise the axiom checker on assignments
/// that no layered structure can produce.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    pub n_atoms: usize,
    pub rows: BTreeMap<Event, Vec<Q>>,
}

impl ConditionalTable {
    pub fn value(&self, f: &Event, k: &Event) -> Option<Q> {
        let row = self.rows.get(k)?;
        Some(f.atoms().map(|a| &row[a]).sum())
    }
}

/// First failed axiom, with the witnessing events.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A layer fails to be a probability vector, or overlaps an earlier
    /// support; this is the structural face of (C2).
    BadLayer { layer: usize, detail: String },
    Uncovered { atom: usize },
    MissingRow { k: Event },
    TooLargeForExhaustiveCheck { n_atoms: usize },
    /// P(K|K) != 1.
    C1 { k: Event },
    /// P(·|H) fails nonnegativity, normalization, or concentration on H.
    C2 { h: Event, detail: String },
    /// P(E∧F|H) != P(E|H)·P(F|E∧H); F is a single atom (additivity makes
    /// atom-level agreement equivalent to agreement for every F).
    C3 { e: Event, f: Event, h: Event },
}

const MAX_EXHAUSTIVE_ATOMS: usize = 12;

/// Exhaustively checks (C1), (C2), (C3) for the evaluations of a layered
/// structure over the whole finite algebra, after checking the layer
/// structure itself.
pub fn validate_full_conditional(p: &LayeredConditional) -> Result<(), Violation> {
    p.check_structure()?;
    if p.n_atoms > MAX_EXHAUSTIVE_ATOMS {
        return Err(Violation::TooLargeForExhaustiveCheck { n_atoms: p.n_atoms });
    }
    let table = layered_to_table(p);
    validate_conditional_table(&table)
}

/// Atom row per nonempty conditioning event, read off the layered form.
pub fn layered_to_table(p: &LayeredConditional) -> ConditionalTable {
    let n = p.n_atoms;
    let mut rows = BTreeMap::new();
    for mask in 1u64..(1u64 << n) {
        let k = event_from_mask(n, mask);
        let layer = (0..p.layers.len())
            .find(|&l| !p.layer_mass(l, &k).is_zero())
            .expect("structure validated: every event is covered");
        let den = p.layer_mass(layer, &k);
        let row: Vec<Q> = (0..n)
            .map(|a| {
                if k.contains(a) {
                    &p.layers[layer][a] / &den
                } else {
                    q0()
                }
            })
            .collect();
        rows.insert(k, row);
    }
    ConditionalTable { n_atoms: n, rows }
}

fn event_from_mask(n_atoms: usize, mask: u64) -> Event {
    let atoms: Vec<usize> = (0..n_atoms).filter(|a| mask & (1 << a) != 0).collect();
    Event::from_atoms(n_atoms, &atoms)
}

/// Exhaustive (C1)/(C2)/(C3) check of an extensional table. (C3) is checked
/// with F ranging over single atoms, which by finite additivity of both
/// sides is equivalent to checking every F.
pub fn validate_conditional_table(t: &ConditionalTable) -> Result<(), Violation> {
    let n = t.n_atoms;
    if n > MAX_EXHAUSTIVE_ATOMS {
        return Err(Violation::TooLargeForExhaustiveCheck { n_atoms: n });
    }
    // (C2): each row is a probability concentrated on its conditioning event.
    for mask in 1u64..(1u64 << n) {
        let k = event_from_mask(n, mask);
        let Some(row) = t.rows.get(&k) else {
            return Err(Violation::MissingRow { k });
        };
        if row.len() != n {
            return Err(Violation::C2 {
                h: k,
                detail: "row length mismatch".into(),
            });
        }
        let mut sum = q0();
        for (a, v) in row.iter().enumerate() {
            if v < &q0() {
                return Err(Violation::C2 {
                    h: k,
                    detail: format!("negative mass at atom {a}"),
                });
            }
            if !k.contains(a) && !v.is_zero() {
                return Err(Violation::C2 {
                    h: k,
                    detail: format!("mass outside the conditioning event at atom {a}"),
                });
            }
            sum += v;
        }
        if sum != q1() {
            // P(K|K) != 1 is the (C1) face of the same defect.
            if k.atoms().map(|a| &row[a]).sum::<Q>() != q1() {
                return Err(Violation::C1 { k });
            }
            return Err(Violation::C2 {
                h: k,
                detail: format!("total mass {sum}, not 1"),
            });
        }
    }
    // (C3): P(E∧f|H) = P(E|H)·P(f|E∧H) for every E, H and atom f.
    for hmask in 1u64..(1u64 << n) {
        let h = event_from_mask(n, hmask);
        let row_h = &t.rows[&h];
        for emask in 0u64..(1u64 << n) {
            let e = event_from_mask(n, emask);
            let eh = e.and(&h);
            if eh.is_empty() {
                continue;
            }
            let p_e_h: Q = eh.atoms().map(|a| &row_h[a]).sum();
            let row_eh = &t.rows[&eh];
            for f in 0..n {
                let lhs = if eh.contains(f) { row_h[f].clone() } else { q0() };
                let rhs = &p_e_h * &row_eh[f];
                if lhs != rhs {
                    return Err(Violation::C3 {
                        e,
                        f: Event::from_atoms(n, &[f]),
                        h,
                    });
                }
            }
        }
    }
    Ok(())
}

/// True iff P agrees with the prior on every block of its subalgebra and
/// with the strategy on every event given every cell, null cells included.
/// By additivity it is enough to match atom masses per cell row.
pub fn extends_assessment(
    p: &LayeredConditional,
    space: &AtomSpace,
    prior: &Prior,
    strategy: &Strategy,
) -> bool {
    let omega = space.omega();
    for b in 0..prior.n_blocks() {
        let be = prior.block_event(space, b);
        match p.evaluate(&be, &omega) {
            Ok(v) if v == *prior.block_mass(b) => {}
            _ => return false,
        }
    }
    for i in 0..space.n_rows() {
        let h = space.row_event(i).expect("row in range");
        for a in 0..space.n_atoms() {
            let ae = Event::from_atoms(space.n_atoms(), &[a]);
            match p.evaluate(&ae, &h) {
                Ok(v) if v == strategy.sigma(&ae, i) => {}
                _ => return false,
            }
        }
    }
    true
}

/// The product extension: layer 0 weights cell rows by the given cell
/// masses; each null cell then gets its own layer carrying its model row.
pub fn product_extension(
    space: &AtomSpace,
    cell_mass: &[Q],
    model: &StatisticalModel,
) -> Result<LayeredConditional, AssessmentError> {
    if cell_mass.len() != space.n_rows() {
        return Err(AssessmentError::BadPrior(format!(
            "{} cell masses for {} cells",
            cell_mass.len(),
            space.n_rows()
        )));
    }
    let n = space.n_atoms();
    let mut layer0 = vec![q0(); n];
    for (a, l0) in layer0.iter_mut().enumerate() {
        let (i, j) = space.atom_coords(a);
        *l0 = &cell_mass[i] * model.value(i, j);
    }
    let mut layers = vec![layer0];
    for (i, mass) in cell_mass.iter().enumerate() {
        if mass.is_zero() {
            let mut layer = vec![q0(); n];
            for (a, la) in layer.iter_mut().enumerate() {
                let (r, j) = space.atom_coords(a);
                if r == i {
                    *la = model.value(i, j).clone();
                }
            }
            layers.push(layer);
        }
    }
    LayeredConditional::new(n, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn grid22() -> AtomSpace {
        AtomSpace::full(2, 2)
    }

    fn model22() -> StatisticalModel {
        // λ(E1|H1)=1/4, λ(E1|H2)=3/4.
        StatisticalModel::new(
            &grid22(),
            vec![vec![q(1, 4), q(3, 4)], vec![q(3, 4), q(1, 4)]],
        )
        .unwrap()
    }

    #[test]
    fn prior_validation() {
        let sub = Subalgebra::discrete(2);
        assert!(Prior::new(sub.clone(), vec![q(1, 2), q(1, 2)]).is_ok());
        assert!(Prior::new(sub.clone(), vec![q(1, 2), q(1, 3)]).is_err());
        assert!(Prior::new(sub, vec![q(3, 2), q(-1, 2)]).is_err());
    }

    #[test]
    fn prior_event_mass() {
        let space = grid22();
        let prior = Prior::uniform_singletons(2);
        let h1 = space.row_event(0).unwrap();
        assert_eq!(prior.event_mass(&space, &h1), Some(q(1, 2)));
        assert_eq!(prior.event_mass(&space, &space.omega()), Some(q(1, 1)));
        let e1 = space.col_event(0).unwrap();
        assert_eq!(prior.event_mass(&space, &e1), None);
    }

    #[test]
    fn model_validation() {
        let space = grid22();
        assert!(StatisticalModel::new(
            &space,
            vec![vec![q(1, 4), q(3, 4)], vec![q(1, 2), q(1, 3)]]
        )
        .is_err());
        // Mass on an incompatible pair.
        let space2 = AtomSpace::build(2, 2, vec![true, true, true, false]).unwrap();
        assert!(
            StatisticalModel::new(&space2, vec![vec![q(1, 4), q(3, 4)], vec![q(1, 2), q(1, 2)]])
                .is_err()
        );
        assert!(
            StatisticalModel::new(&space2, vec![vec![q(1, 4), q(3, 4)], vec![q(1, 1), q0()]])
                .is_ok()
        );
    }

    #[test]
    fn strategy_values() {
        let space = grid22();
        let s = strategy_from_model(&space, &model22());
        assert_eq!(s.sigma(&space.omega(), 0), q(1, 1));
        assert_eq!(s.sigma(&space.omega(), 1), q(1, 1));
        let e1 = space.col_event(0).unwrap();
        assert_eq!(s.sigma(&e1, 0), q(1, 4));
        assert_eq!(s.sigma(&e1, 1), q(3, 4));
        // Mixed event: one atom from each row.
        let f = space
            .atom_event(0, 0)
            .unwrap()
            .or(&space.atom_event(1, 1).unwrap());
        assert_eq!(s.sigma(&f, 0), q(1, 4));
        assert_eq!(s.sigma(&f, 1), q(1, 4));
        // Additivity over a disjoint split.
        let g = space.atom_event(0, 1).unwrap();
        assert_eq!(
            s.sigma(&f.or(&g), 0),
            s.sigma(&f, 0) + s.sigma(&g, 0)
        );
    }

    #[test]
    fn evaluate_layered_basics() {
        let space = grid22();
        let uniform = LayeredConditional::new(4, vec![vec![q(1, 4); 4]]).unwrap();
        let omega = space.omega();
        let a = space.atom_event(0, 0).unwrap();
        assert_eq!(uniform.evaluate(&a, &omega).unwrap(), q(1, 4));
        assert_eq!(uniform.evaluate(&omega, &a).unwrap(), q(1, 1));
        assert_eq!(
            uniform.evaluate(&a, &space.empty_event()),
            Err(AssessmentError::EmptyConditioning)
        );
    }

    #[test]
    fn evaluate_descends_to_deeper_layers() {
        let space = grid22();
        // Layer 0 on H1, layer 1 on H2, both uniform.
        let l0 = vec![q(1, 2), q(1, 2), q0(), q0()];
        let l1 = vec![q0(), q0(), q(1, 2), q(1, 2)];
        let p = LayeredConditional::new(4, vec![l0, l1]).unwrap();
        let h2 = space.row_event(1).unwrap();
        let f = space.atom_event(1, 0).unwrap();
        assert_eq!(p.evaluate(&f, &h2).unwrap(), q(1, 2));
        assert_eq!(p.evaluate(&h2, &space.omega()).unwrap(), q0());
    }

    #[test]
    fn structure_validation_rejects_bad_layers() {
        assert!(LayeredConditional::new(2, vec![vec![q(1, 2), q(1, 3)]]).is_err());
        assert!(LayeredConditional::new(2, vec![vec![q(3, 2), q(-1, 2)]]).is_err());
        // Overlapping supports.
        assert!(LayeredConditional::new(
            2,
            vec![vec![q(1, 2), q(1, 2)], vec![q(1, 1), q0()]]
        )
        .is_err());
        // Uncovered atom.
        assert!(LayeredConditional::new(2, vec![vec![q(1, 1), q0()]]).is_err());
    }

    #[test]
    fn validate_passes_valid_structures() {
        let space = grid22();
        let p = product_extension(&space, &[q(1, 2), q(1, 2)], &model22()).unwrap();
        assert_eq!(validate_full_conditional(&p), Ok(()));
        // With a null cell and a deeper layer.
        let p = product_extension(&space, &[q(1, 1), q0()], &model22()).unwrap();
        assert_eq!(p.layers.len(), 2);
        assert_eq!(validate_full_conditional(&p), Ok(()));
    }

    #[test]
    fn validate_reports_tampered_mass() {
        let space = grid22();
        let mut p = product_extension(&space, &[q(1, 2), q(1, 2)], &model22()).unwrap();
        p.layers[0][0] = q(1, 2);
        match validate_full_conditional(&p) {
            Err(Violation::BadLayer { layer: 0, .. }) => {}
            other => panic!("expected a layer-mass violation, got {other:?}"),
        }
    }

    #[test]
    fn validate_reports_non_multiplicative_table() {
        // P(·|Ω) uniform on 4 atoms but P(·|{0,1}) = (3/4, 1/4): breaks (C3)
        // at E={0,1}, H=Ω, f=atom 0. No layered form produces this table.
        let p = LayeredConditional::new(4, vec![vec![q(1, 4); 4]]).unwrap();
        let mut t = layered_to_table(&p);
        let k = Event::from_atoms(4, &[0, 1]);
        t.rows.insert(k.clone(), vec![q(3, 4), q(1, 4), q0(), q0()]);
        match validate_conditional_table(&t) {
            Err(Violation::C3 { e, h, .. }) => {
                // The witness conditions the tampered row: E∧H = {0,1}.
                assert_eq!(e.and(&h), k);
            }
            other => panic!("expected a (C3) violation, got {other:?}"),
        }
    }

    #[test]
    fn extends_assessment_checks_blocks_and_rows() {
        let space = grid22();
        let model = model22();
        let prior = Prior::uniform_singletons(2);
        let strategy = strategy_from_model(&space, &model);
        let p = product_extension(&space, &[q(1, 2), q(1, 2)], &model).unwrap();
        assert!(extends_assessment(&p, &space, &prior, &strategy));
        // Perturbed prior marginal.
        let p2 = product_extension(&space, &[q(1, 3), q(2, 3)], &model).unwrap();
        assert!(!extends_assessment(&p2, &space, &prior, &strategy));
        // Perturbed σ row on a null cell: the conditional constraint still binds.
        let prior0 = Prior::new(Subalgebra::discrete(2), vec![q(1, 1), q0()]).unwrap();
        let p3 = product_extension(&space, &[q(1, 1), q0()], &model).unwrap();
        assert!(extends_assessment(&p3, &space, &prior0, &strategy));
        let other_model = StatisticalModel::new(
            &space,
            vec![vec![q(1, 4), q(3, 4)], vec![q(1, 2), q(1, 2)]],
        )
        .unwrap();
        let p4 = product_extension(&space, &[q(1, 1), q0()], &other_model).unwrap();
        assert!(!extends_assessment(&p4, &space, &prior0, &strategy));
    }

    #[test]
    fn gn_monotonicity_of_evaluations() {
        use crate::algebra::gn_implies;
        let space = grid22();
        let p = product_extension(&space, &[q(1, 3), q(2, 3)], &model22()).unwrap();
        let n = space.n_atoms();
        for em in 0..(1u64 << n) {
            for hm in 1..(1u64 << n) {
                for fm in 0..(1u64 << n) {
                    for km in 1..(1u64 << n) {
                        let e = super::event_from_mask(n, em);
                        let h = super::event_from_mask(n, hm);
                        let f = super::event_from_mask(n, fm);
                        let k = super::event_from_mask(n, km);
                        if gn_implies(&e, &h, &f, &k).unwrap() {
                            assert!(
                                p.evaluate(&e, &h).unwrap() <= p.evaluate(&f, &k).unwrap(),
                                "GN monotonicity failed"
                            );
                        }
                    }
                }
            }
        }
    }
}
