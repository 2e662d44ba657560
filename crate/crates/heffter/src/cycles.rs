//! Partial-sum base cycles, development into group-regular k-cycle systems,
//! pairwise cycle-system orthogonality, and super-orthogonality of Steiner
//! triple systems via near-1-factorizations.

pub mod sts;

use crate::designs::{HeffterSystem, OrderedBlock};
use crate::field::{Elem, FieldCtx};
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("block {0} is not simple in its stored order")]
    NotSimple(usize),
    #[error("block is not zero-sum (sum = {0})")]
    NotZeroSum(Elem),
    #[error("repeated vertex {0}")]
    RepeatedVertex(Elem),
    #[error("cycles need at least 3 vertices")]
    TooShort,
    #[error("base cycles are invalid: {0}")]
    BaseCyclesInvalid(String),
    #[error("the two systems live on different vertex sets")]
    VertexSetMismatch,
    #[error("not a Steiner triple system: {0}")]
    NotAnSts(String),
}

/// A k-cycle over a group, stored as a vertex sequence; equality of cycles as
/// graphs is taken up to rotation and reflection via `canonical`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cycle {
    vertices: Vec<Elem>,
}

impl Cycle {
    pub fn new(vertices: Vec<Elem>) -> Result<Cycle, CycleError> {
        if vertices.len() < 3 {
            return Err(CycleError::TooShort);
        }
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(CycleError::RepeatedVertex(w[0]));
            }
        }
        Ok(Cycle { vertices })
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Elem] {
        &self.vertices
    }

    /// The difference list: +-(c_{i+1} - c_i) with indices mod k; 2k entries.
    pub fn delta(&self, ctx: &FieldCtx) -> Vec<Elem> {
        let k = self.vertices.len();
        let mut out = Vec::with_capacity(2 * k);
        for i in 0..k {
            let d = ctx.sub(self.vertices[(i + 1) % k], self.vertices[i]);
            out.push(d);
            out.push(ctx.neg(d));
        }
        out
    }

    /// Edges as normalized (min, max) code pairs.
    pub fn edges(&self) -> Vec<(u64, u64)> {
        let k = self.vertices.len();
        (0..k)
            .map(|i| {
                let a = self.vertices[i].0;
                let b = self.vertices[(i + 1) % k].0;
                (a.min(b), a.max(b))
            })
            .collect()
    }

    /// Canonical vertex sequence: least vertex first, lesser neighbor second.
    pub fn canonical(&self) -> Cycle {
        let k = self.vertices.len();
        let start = (0..k)
            .min_by_key(|&i| self.vertices[i])
            .expect("nonempty cycle");
        let fwd = self.vertices[(start + 1) % k];
        let bwd = self.vertices[(start + k - 1) % k];
        let mut out = Vec::with_capacity(k);
        if fwd <= bwd {
            for i in 0..k {
                out.push(self.vertices[(start + i) % k]);
            }
        } else {
            for i in 0..k {
                out.push(self.vertices[(start + k - i) % k]);
            }
        }
        Cycle { vertices: out }
    }

    pub fn translate(&self, ctx: &FieldCtx, g: Elem) -> Cycle {
        Cycle {
            vertices: self.vertices.iter().map(|&x| ctx.add(x, g)).collect(),
        }
    }
}

/// The partial-sum cycle of a simple zero-sum ordered block:
/// c_i = b_0 + ... + b_i. Its difference list is B union -B.
pub fn partial_sum_cycle(ctx: &FieldCtx, block: &OrderedBlock) -> Result<Cycle, CycleError> {
    let sum = block.sum(ctx);
    if sum != Elem(0) {
        return Err(CycleError::NotZeroSum(sum));
    }
    let sums = block.partial_sums(ctx);
    {
        let mut seen = sums.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(CycleError::NotSimple(0));
        }
    }
    let cycle = Cycle { vertices: sums };
    #[cfg(debug_assertions)]
    {
        let mut delta = cycle.delta(ctx);
        let mut expected: Vec<Elem> = block
            .elements()
            .iter()
            .flat_map(|&b| [b, ctx.neg(b)])
            .collect();
        delta.sort_unstable();
        expected.sort_unstable();
        debug_assert_eq!(delta, expected, "delta(C) must equal B union -B");
    }
    Ok(cycle)
}

/// One partial-sum cycle per block of a simple Heffter system.
pub fn base_cycles(ctx: &FieldCtx, system: &HeffterSystem) -> Result<Vec<Cycle>, CycleError> {
    system
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| partial_sum_cycle(ctx, b).map_err(|e| match e {
            CycleError::NotSimple(_) => CycleError::NotSimple(i),
            other => other,
        }))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCycleReport {
    /// nonzero group elements never hit by a difference
    pub missing: Vec<Elem>,
    /// group elements hit more than once
    pub repeated: Vec<Elem>,
}

impl BaseCycleReport {
    pub fn valid(&self) -> bool {
        self.missing.is_empty() && self.repeated.is_empty()
    }
}

/// Do the difference lists of the cycles tile the nonzero group elements
/// exactly once each?
pub fn verify_base_cycles(ctx: &FieldCtx, cycles: &[Cycle]) -> BaseCycleReport {
    let q = ctx.q() as usize;
    let mut count = vec![0u32; q];
    for c in cycles {
        for d in c.delta(ctx) {
            count[d.0 as usize] += 1;
        }
    }
    let missing = (1..q)
        .filter(|&i| count[i] == 0)
        .map(|i| Elem(i as u64))
        .collect();
    let repeated = (1..q)
        .filter(|&i| count[i] > 1)
        .map(|i| Elem(i as u64))
        .collect();
    BaseCycleReport { missing, repeated }
}

/// All translates of the base cycles, with the edge-partition property of the
/// complete graph checked exactly (edge count and no duplicate edge).
pub fn develop_cycle_system(ctx: &FieldCtx, base: &[Cycle]) -> Result<Vec<Cycle>, CycleError> {
    let report = verify_base_cycles(ctx, base);
    if !report.valid() {
        return Err(CycleError::BaseCyclesInvalid(format!(
            "{} differences missing, {} repeated",
            report.missing.len(),
            report.repeated.len()
        )));
    }
    let q = ctx.q();
    let mut out = Vec::with_capacity(base.len() * q as usize);
    for c in base {
        for g in 0..q {
            out.push(c.translate(ctx, Elem(g)));
        }
    }
    // edge partition of K_q
    let total_edges: usize = out.iter().map(|c| c.k()).sum();
    let expected = (q * (q - 1) / 2) as usize;
    if total_edges != expected {
        return Err(CycleError::BaseCyclesInvalid(format!(
            "{total_edges} edges, complete graph has {expected}"
        )));
    }
    let mut seen = vec![false; (q * q) as usize];
    for c in &out {
        for (a, b) in c.edges() {
            let key = (a * q + b) as usize;
            if seen[key] {
                return Err(CycleError::BaseCyclesInvalid(format!(
                    "edge {{{a},{b}}} covered twice"
                )));
            }
            seen[key] = true;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalityWitness {
    pub orthogonal: bool,
    /// Indices (cycle of the first system, cycle of the second) sharing >= 2
    /// edges, when not orthogonal.
    pub witness: Option<(usize, usize)>,
}

fn vertex_set(cycles: &[Cycle]) -> Vec<u64> {
    let mut v: Vec<u64> = cycles
        .iter()
        .flat_map(|c| c.vertices().iter().map(|e| e.0))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Orthogonality of two materialized cycle systems: every cycle pair shares
/// at most one edge. Implemented with an edge-to-cycle index on the second
/// system and a per-cycle shared-count scan, never the quartic all-pairs
/// comparison. Cycles of the first system are scanned in parallel; the
/// verdict is a conjunction so the result does not depend on thread count.
pub fn systems_orthogonal(
    a: &[Cycle],
    b: &[Cycle],
) -> Result<OrthogonalityWitness, CycleError> {
    if vertex_set(a) != vertex_set(b) {
        return Err(CycleError::VertexSetMismatch);
    }
    let mut index: HashMap<(u64, u64), u32> = HashMap::new();
    for (j, c) in b.iter().enumerate() {
        for e in c.edges() {
            index.insert(e, j as u32);
        }
    }
    let hit = |(i, c): (usize, &Cycle)| -> Option<(usize, usize)> {
        let mut counts: HashMap<u32, u32> = HashMap::new();
        for e in c.edges() {
            if let Some(&j) = index.get(&e) {
                let n = counts.entry(j).or_insert(0);
                *n += 1;
                if *n >= 2 {
                    return Some((i, j as usize));
                }
            }
        }
        None
    };
    let found = a
        .par_iter()
        .enumerate()
        .filter_map(hit)
        .min(); // deterministic witness: least pair
    Ok(OrthogonalityWitness {
        orthogonal: found.is_none(),
        witness: found,
    })
}

/// Orthogonality from the compact base-cycle form: by regularity it suffices
/// to check each base cycle of the first system against all translates of the
/// second system's base cycles. Equivalence with the materialized check is
/// asserted in tests.
pub fn systems_orthogonal_base(
    ctx: &FieldCtx,
    a_base: &[Cycle],
    b_base: &[Cycle],
) -> Result<OrthogonalityWitness, CycleError> {
    let q = ctx.q();
    let mut index: HashMap<(u64, u64), u32> = HashMap::new();
    for (j, c) in b_base.iter().enumerate() {
        for g in 0..q {
            let t = c.translate(ctx, Elem(g));
            for e in t.edges() {
                index.insert(e, (j as u64 * q + g) as u32);
            }
        }
    }
    for (i, c) in a_base.iter().enumerate() {
        let mut counts: HashMap<u32, u32> = HashMap::new();
        for e in c.edges() {
            if let Some(&j) = index.get(&e) {
                let n = counts.entry(j).or_insert(0);
                *n += 1;
                if *n >= 2 {
                    return Ok(OrthogonalityWitness {
                        orthogonal: false,
                        witness: Some((i, j as usize)),
                    });
                }
            }
        }
    }
    Ok(OrthogonalityWitness {
        orthogonal: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::OrderedBlock;
    use crate::field::FieldCtx;

    fn ctx71() -> FieldCtx {
        FieldCtx::build(71, 1, None, None).unwrap()
    }

    #[test]
    fn partial_sums_of_printed_rows() {
        let ctx = ctx71();
        let b = OrderedBlock::from_codes(&[1, 24, 25, 43, 49]).unwrap();
        let c = partial_sum_cycle(&ctx, &b).unwrap();
        assert_eq!(
            c.vertices(),
            &[Elem(1), Elem(25), Elem(50), Elem(22), Elem(0)]
        );

        let b2 = OrderedBlock::from_codes(&[45, 15, 60, 18, 4]).unwrap();
        let c2 = partial_sum_cycle(&ctx, &b2).unwrap();
        assert_eq!(
            c2.vertices(),
            &[Elem(45), Elem(60), Elem(49), Elem(67), Elem(0)]
        );

        let ctx41 = FieldCtx::build(41, 1, None, None).unwrap();
        let b3 = OrderedBlock::from_codes(&[1, 2, 38]).unwrap();
        let c3 = partial_sum_cycle(&ctx41, &b3).unwrap();
        assert_eq!(c3.vertices(), &[Elem(1), Elem(3), Elem(0)]);
    }

    #[test]
    fn non_simple_rejected() {
        let ctx = ctx71();
        // 1 + 70 = 0 interior partial sum collides with the final 0
        let b = OrderedBlock::from_codes(&[1, 70, 35, 36, 0]);
        // 0 cannot be in a block anyway; use a genuinely non-simple ordering:
        // partial sums of (2, 69, 1, 3, 67): 2, 0, 1, 4, 0 -> repeated 0
        drop(b);
        let b = OrderedBlock::from_codes(&[2, 69, 1, 3, 67]).unwrap();
        assert!(matches!(
            partial_sum_cycle(&ctx, &b),
            Err(CycleError::NotSimple(_))
        ));
    }

    #[test]
    fn canonical_form_invariance() {
        let c = Cycle::new(vec![Elem(5), Elem(2), Elem(9), Elem(4)]).unwrap();
        let r = Cycle::new(vec![Elem(9), Elem(4), Elem(5), Elem(2)]).unwrap();
        let m = Cycle::new(vec![Elem(4), Elem(9), Elem(2), Elem(5)]).unwrap();
        assert_eq!(c.canonical(), r.canonical());
        assert_eq!(c.canonical(), m.canonical());
        assert_eq!(c.canonical().vertices()[0], Elem(2));
    }
}
