//! Capacities on small finite ground sets.
//!
//! Subsets are bitmasks over an ordered ground. Provides Möbius calculus,
//! n-monotonicity tests, duals, inner/outer measures of a partition-based
//! probability, core vertices of 2-monotone capacities, the Choquet integral,
//! and lower/upper Stieltjes integrals.

use crate::algebra::Subalgebra;
use crate::rational::{q0, q1, Q};
use num_traits::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CapacityError {
    #[error("not a capacity: {0}")]
    NotACapacity(String),
    #[error("ground set of {n} elements is too large for this operation")]
    GroundTooLarge { n: usize },
    #[error("capacity is not 2-monotone")]
    NotTwoMonotone,
    #[error("monotonicity order must be at least 2")]
    BadOrder,
}

/// Hard cap keeping subset tables affordable.
pub const MAX_GROUND: usize = 20;
/// Permutation enumeration cap for core vertices.
const MAX_CORE_GROUND: usize = 8;
/// Budget (in log2) for exhaustive n-tuple checks.
const EXHAUSTIVE_BITS: usize = 20;

/// A normalized monotone capacity: a set function with value(∅)=0,
/// value(ground)=1, monotone under inclusion. Indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    n_ground: usize,
    value: Vec<Q>,
}

impl Capacity {
    pub fn new(n_ground: usize, value: Vec<Q>) -> Result<Self, CapacityError> {
        if n_ground > MAX_GROUND {
            return Err(CapacityError::GroundTooLarge { n: n_ground });
        }
        if value.len() != 1 << n_ground {
            return Err(CapacityError::NotACapacity(format!(
                "{} values for 2^{n_ground} subsets",
                value.len()
            )));
        }
        if !value[0].is_zero() {
            return Err(CapacityError::NotACapacity("value(∅) != 0".into()));
        }
        if value[(1 << n_ground) - 1] != q1() {
            return Err(CapacityError::NotACapacity("value(ground) != 1".into()));
        }
        for s in 0..value.len() {
            for e in 0..n_ground {
                if s & (1 << e) == 0 && value[s] > value[s | (1 << e)] {
                    return Err(CapacityError::NotACapacity(format!(
                        "not monotone at subset {s:#b} plus element {e}"
                    )));
                }
            }
        }
        Ok(Capacity { n_ground, value })
    }

    /// Additive capacity from point masses (must sum to 1).
    pub fn additive(masses: &[Q]) -> Result<Self, CapacityError> {
        let n = masses.len();
        if n > MAX_GROUND {
            return Err(CapacityError::GroundTooLarge { n });
        }
        let mut value = vec![q0(); 1 << n];
        for s in 1usize..(1 << n) {
            let low = s & s.wrapping_neg();
            let e = low.trailing_zeros() as usize;
            value[s] = &value[s ^ low] + &masses[e];
        }
        Capacity::new(n, value)
    }

    pub fn n_ground(&self) -> usize {
        self.n_ground
    }

    pub fn value(&self, subset: usize) -> &Q {
        &self.value[subset]
    }

    pub fn full_mask(&self) -> usize {
        (1 << self.n_ground) - 1
    }
}

/// Möbius masses of a capacity; nonnegativity certifies total monotonicity.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusRepresentation {
    n_ground: usize,
    mass: Vec<Q>,
}

impl MobiusRepresentation {
    pub fn from_masses(n_ground: usize, mass: Vec<Q>) -> Result<Self, CapacityError> {
        if n_ground > MAX_GROUND {
            return Err(CapacityError::GroundTooLarge { n: n_ground });
        }
        if mass.len() != 1 << n_ground {
            return Err(CapacityError::NotACapacity(format!(
                "{} masses for 2^{n_ground} subsets",
                mass.len()
            )));
        }
        Ok(MobiusRepresentation { n_ground, mass })
    }

    pub fn mass(&self, subset: usize) -> &Q {
        &self.mass[subset]
    }

    pub fn n_ground(&self) -> usize {
        self.n_ground
    }

    pub fn all_nonnegative(&self) -> bool {
        self.mass.iter().all(|m| *m >= q0())
    }
}

/// m(S) = Σ_{T⊆S} (−1)^{|S∖T|} v(T), via the in-place subset transform.
pub fn mobius(v: &Capacity) -> MobiusRepresentation {
    let n = v.n_ground;
    let mut mass = v.value.clone();
    for e in 0..n {
        let bit = 1usize << e;
        for s in 0..mass.len() {
            if s & bit != 0 {
                let lower = mass[s ^ bit].clone();
                mass[s] -= lower;
            }
        }
    }
    MobiusRepresentation { n_ground: n, mass }
}

/// v(S) = Σ_{T⊆S} m(T); inverse of `mobius`.
pub fn unmobius(m: &MobiusRepresentation) -> Result<Capacity, CapacityError> {
    let n = m.n_ground;
    let mut value = m.mass.clone();
    for e in 0..n {
        let bit = 1usize << e;
        for s in 0..value.len() {
            if s & bit != 0 {
                let lower = value[s ^ bit].clone();
                value[s] += lower;
            }
        }
    }
    Capacity::new(n, value)
}

/// All Möbius masses nonnegative; implies n-monotone for every n.
pub fn is_totally_monotone(v: &Capacity) -> bool {
    mobius(v).all_nonnegative()
}

/// Checks v(⋁A_i) ≥ Σ_{∅≠I} (−1)^{|I|+1} v(⋀_{i∈I} A_i) over all n-tuples of
/// subsets. A nonnegative Möbius representation certifies the answer without
/// enumeration; otherwise the tuple space must fit the enumeration budget.
pub fn is_n_monotone(v: &Capacity, n: usize) -> Result<bool, CapacityError> {
    if n < 2 {
        return Err(CapacityError::BadOrder);
    }
    if is_totally_monotone(v) {
        return Ok(true);
    }
    if v.n_ground * n > EXHAUSTIVE_BITS {
        return Err(CapacityError::GroundTooLarge { n: v.n_ground });
    }
    let n_subsets = 1usize << v.n_ground;
    let mut tuple = vec![0usize; n];
    loop {
        let union = tuple.iter().fold(0usize, |u, &a| u | a);
        let mut rhs = q0();
        for sel in 1usize..(1 << n) {
            let mut inter = v.full_mask();
            for (i, &a) in tuple.iter().enumerate() {
                if sel & (1 << i) != 0 {
                    inter &= a;
                }
            }
            if sel.count_ones() % 2 == 1 {
                rhs += &v.value[inter];
            } else {
                rhs -= &v.value[inter];
            }
        }
        if v.value[union] < rhs {
            return Ok(false);
        }
        // Next tuple in mixed radix.
        let mut i = 0;
        loop {
            if i == n {
                return Ok(true);
            }
            tuple[i] += 1;
            if tuple[i] < n_subsets {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

/// ψ(E) = 1 − v(E^c); an involution fixing additive capacities.
pub fn dual(v: &Capacity) -> Capacity {
    let full = v.full_mask();
    let value: Vec<Q> = (0..=full).map(|s| q1() - &v.value[full ^ s]).collect();
    Capacity {
        n_ground: v.n_ground,
        value,
    }
}

/// Inner measure of a partition probability: π_*(E) = Σ of the masses of the
/// blocks contained in E. Totally monotone by construction.
pub fn inner_measure(sub: &Subalgebra, mass: &[Q]) -> Result<Capacity, CapacityError> {
    let n = sub.n_universe();
    if n > MAX_GROUND {
        return Err(CapacityError::GroundTooLarge { n });
    }
    assert_eq!(mass.len(), sub.n_blocks(), "one mass per block");
    let block_masks: Vec<usize> = sub
        .blocks()
        .iter()
        .map(|b| b.iter().fold(0usize, |m, &e| m | (1 << e)))
        .collect();
    let value: Vec<Q> = (0..(1usize << n))
        .map(|s| {
            block_masks
                .iter()
                .zip(mass)
                .filter(|(bm, _)| *bm & s == **bm)
                .map(|(_, m)| m)
                .sum()
        })
        .collect();
    Capacity::new(n, value)
}

/// Outer measure: dual of the inner measure; π^*(E) = 1 − π_*(E^c).
pub fn outer_measure(sub: &Subalgebra, mass: &[Q]) -> Result<Capacity, CapacityError> {
    Ok(dual(&inner_measure(sub, mass)?))
}

/// Vertices of the core {additive π̃ : π̃ ≥ v} of a 2-monotone capacity:
/// the marginal allocations vertex(τ)(τ_k) = v({τ_1..τ_k}) − v({τ_1..τ_{k−1}})
/// over all orderings τ, deduplicated.
pub fn core_vertices(v: &Capacity) -> Result<Vec<Vec<Q>>, CapacityError> {
    match is_n_monotone(v, 2) {
        Ok(true) => {}
        Ok(false) => return Err(CapacityError::NotTwoMonotone),
        Err(e) => return Err(e),
    }
    let n = v.n_ground;
    if n > MAX_CORE_GROUND {
        return Err(CapacityError::GroundTooLarge { n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    permute(&mut order, 0, &mut |perm| {
        let mut vertex = vec![q0(); n];
        let mut mask = 0usize;
        for &e in perm {
            let prev = v.value[mask].clone();
            mask |= 1 << e;
            vertex[e] = &v.value[mask] - prev;
        }
        if seen.insert(vertex.clone()) {
            out.push(vertex);
        }
    });
    Ok(out)
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Choquet integral of X against v, by the sort formula
/// Σ (x_(k) − x_(k+1)) v(top-k level set) + x_(min)·v(ground).
/// For 2-monotone v this is the minimum expectation over the core.
pub fn choquet(x: &[Q], v: &Capacity) -> Q {
    assert_eq!(x.len(), v.n_ground, "one value per ground element");
    if x.is_empty() {
        return q0();
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].cmp(&x[a]));
    let mut total = q0();
    let mut mask = 0usize;
    for w in idx.windows(2) {
        mask |= 1 << w[0];
        total += (&x[w[0]] - &x[w[1]]) * &v.value[mask];
    }
    total += &x[idx[x.len() - 1]] * &v.value[v.full_mask()];
    total
}

/// Lower Stieltjes integral of X against a partition probability: the finest
/// partition attains the sup over partitions, so it is the block sum of
/// cell infima. Coincides with choquet(X, inner_measure).
pub fn lower_stieltjes(x: &[Q], sub: &Subalgebra, mass: &[Q]) -> Q {
    assert_eq!(x.len(), sub.n_universe(), "one value per ground element");
    assert_eq!(mass.len(), sub.n_blocks(), "one mass per block");
    sub.blocks()
        .iter()
        .zip(mass)
        .map(|(b, m)| {
            let inf = b.iter().map(|&e| &x[e]).min().expect("blocks nonempty");
            inf * m
        })
        .sum()
}

/// Upper Stieltjes integral: block sum of cell suprema; the dual bound.
pub fn upper_stieltjes(x: &[Q], sub: &Subalgebra, mass: &[Q]) -> Q {
    assert_eq!(x.len(), sub.n_universe(), "one value per ground element");
    assert_eq!(mass.len(), sub.n_blocks(), "one mass per block");
    sub.blocks()
        .iter()
        .zip(mass)
        .map(|(b, m)| {
            let sup = b.iter().map(|&e| &x[e]).max().expect("blocks nonempty");
            sup * m
        })
        .sum()
}
