//! Data model and verifier for Heffter systems, orthogonality, Heffter
//! spaces/configurations/nets, simplicity, density, feasibility bounds, and
//! the Heffter-array view of an orthogonal pair.

use crate::field::{Elem, FieldCtx, FieldError, HalfSet};
use num_rational::Ratio;
use std::collections::HashMap;
use thiserror::Error;

pub type Rational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("the two systems live on different half-sets")]
    MismatchedHalfSets,
    #[error("systems are not orthogonal: block {p_block} and block {q_block} share {} elements", shared.len())]
    NotOrthogonal {
        p_block: usize,
        q_block: usize,
        shared: Vec<Elem>,
    },
    #[error("Heffter array condition ({condition}) violated: {detail}")]
    ArrayConditionViolated { condition: char, detail: String },
    #[error("block is not zero-sum (sum = {0})")]
    NotZeroSum(Elem),
    #[error("repeated element {0}")]
    RepeatedElement(Elem),
    #[error("not a valid Heffter space: {0}")]
    InvalidSpace(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An ordered block of pairwise distinct group elements. The ordering carries
/// the simplicity information: a block is *simple* when its running partial
/// sums are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedBlock {
    elements: Vec<Elem>,
}

impl OrderedBlock {
    pub fn new(elements: Vec<Elem>) -> Result<OrderedBlock, DesignError> {
        let mut sorted: Vec<Elem> = elements.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(DesignError::RepeatedElement(w[0]));
            }
        }
        Ok(OrderedBlock { elements })
    }

    pub fn from_codes(codes: &[u64]) -> Result<OrderedBlock, DesignError> {
        OrderedBlock::new(codes.iter().map(|&c| Elem(c)).collect())
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sorted(&self) -> Vec<Elem> {
        let mut v = self.elements.clone();
        v.sort_unstable();
        v
    }

    pub fn sum(&self, ctx: &FieldCtx) -> Elem {
        self.elements
            .iter()
            .fold(Elem(0), |acc, &x| ctx.add(acc, x))
    }

    pub fn is_zero_sum(&self, ctx: &FieldCtx) -> bool {
        self.sum(ctx) == Elem(0)
    }

    pub fn partial_sums(&self, ctx: &FieldCtx) -> Vec<Elem> {
        let mut acc = Elem(0);
        self.elements
            .iter()
            .map(|&x| {
                acc = ctx.add(acc, x);
                acc
            })
            .collect()
    }

    pub fn is_simple(&self, ctx: &FieldCtx) -> bool {
        let sums = self.partial_sums(ctx);
        let mut seen = sums.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// The same block scaled by c, preserving the element order.
    pub fn scaled(&self, ctx: &FieldCtx, c: Elem) -> OrderedBlock {
        OrderedBlock {
            elements: self.elements.iter().map(|&x| ctx.mul(x, c)).collect(),
        }
    }
}

/// A Heffter system: a partition of a half-set into zero-sum ordered blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeffterSystem {
    pub halfset: HalfSet,
    pub blocks: Vec<OrderedBlock>,
}

impl HeffterSystem {
    pub fn new(halfset: HalfSet, blocks: Vec<OrderedBlock>) -> HeffterSystem {
        HeffterSystem { halfset, blocks }
    }

    pub fn order(&self) -> usize {
        self.halfset.len()
    }
}

/// One parallel class of a Heffter space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceClass {
    pub name: String,
    pub blocks: Vec<OrderedBlock>,
}

/// A resolved partial linear space whose parallel classes are Heffter systems
/// on a common half-set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeffterSpace {
    pub halfset: HalfSet,
    pub classes: Vec<SpaceClass>,
}

impl HeffterSpace {
    pub fn new(halfset: HalfSet, classes: Vec<SpaceClass>) -> HeffterSpace {
        HeffterSpace { halfset, classes }
    }

    pub fn order(&self) -> usize {
        self.halfset.len()
    }

    pub fn degree(&self) -> usize {
        self.classes.len()
    }

    pub fn class_system(&self, i: usize) -> HeffterSystem {
        HeffterSystem {
            halfset: self.halfset.clone(),
            blocks: self.classes[i].blocks.clone(),
        }
    }

    /// Block size of class i when constant, else None.
    pub fn class_size(&self, i: usize) -> Option<usize> {
        let mut sizes = self.classes[i].blocks.iter().map(|b| b.len());
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ReportKind {
    System,
    Space,
    Configuration,
    Net,
}

impl std::fmt::Display for ReportKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ReportKind::System => "system",
            ReportKind::Space => "space",
            ReportKind::Configuration => "configuration",
            ReportKind::Net => "net",
        };
        f.write_str(s)
    }
}

/// A located verification failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    HalfSet { detail: String },
    RepeatedInBlock { class: usize, block: usize, elem: Elem },
    ForeignPoint { class: usize, block: usize, elem: Elem },
    NotZeroSum { class: usize, block: usize, sum: Elem },
    PointCoveredTwice { class: usize, elem: Elem },
    PointMissing { class: usize, elem: Elem },
    PairCoveredTwice {
        a: Elem,
        b: Elem,
        first: (usize, usize),
        second: (usize, usize),
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::HalfSet { detail } => write!(f, "half-set: {detail}"),
            Violation::RepeatedInBlock { class, block, elem } => {
                write!(f, "class {class} block {block}: repeated element {elem}")
            }
            Violation::ForeignPoint { class, block, elem } => {
                write!(f, "class {class} block {block}: {elem} is not a point")
            }
            Violation::NotZeroSum { class, block, sum } => {
                write!(f, "class {class} block {block}: sum {sum} != 0")
            }
            Violation::PointCoveredTwice { class, elem } => {
                write!(f, "class {class}: point {elem} covered twice")
            }
            Violation::PointMissing { class, elem } => {
                write!(f, "class {class}: point {elem} not covered")
            }
            Violation::PairCoveredTwice { a, b, first, second } => write!(
                f,
                "pair {{{a},{b}}} lies in class {} block {} and class {} block {}",
                first.0, first.1, second.0, second.1
            ),
        }
    }
}

/// Verification result with located failures and the measured parameters.
#[derive(Clone, Debug)]
pub struct DesignReport {
    pub kind: ReportKind,
    pub v: usize,
    pub r: usize,
    /// Per-class block-size profile as (size, count), ascending by size.
    pub profiles: Vec<Vec<(usize, usize)>>,
    pub density: Option<Rational>,
    pub violations: Vec<Violation>,
}

impl DesignReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Per-class size when constant within the class.
    pub fn class_sizes(&self) -> Option<Vec<usize>> {
        self.profiles
            .iter()
            .map(|p| (p.len() == 1).then(|| p[0].0))
            .collect()
    }

    /// Flat key=value lines, one report per block.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("valid={}\n", self.valid()));
        out.push_str(&format!("kind={}\n", self.kind));
        out.push_str(&format!("v={}\n", self.v));
        out.push_str(&format!("r={}\n", self.r));
        let sizes: Vec<String> = self
            .profiles
            .iter()
            .map(|p| {
                if p.len() == 1 {
                    p[0].0.to_string()
                } else {
                    let parts: Vec<String> =
                        p.iter().map(|(s, c)| format!("{s}x{c}")).collect();
                    parts.join("|")
                }
            })
            .collect();
        out.push_str(&format!("sizes={}\n", sizes.join(",")));
        match self.density {
            Some(d) => out.push_str(&format!("density={}/{}\n", d.numer(), d.denom())),
            None => out.push_str("density=\n"),
        }
        out.push_str(&format!("violations={}\n", self.violations.len()));
        for v in &self.violations {
            out.push_str(&format!("violation={v}\n"));
        }
        out
    }
}

fn size_profile(blocks: &[OrderedBlock]) -> Vec<(usize, usize)> {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    let mut sizes: Vec<usize> = blocks.iter().map(|b| b.len()).collect();
    sizes.sort_unstable();
    for s in sizes {
        match counts.last_mut() {
            Some(last) if last.0 == s => last.1 += 1,
            _ => counts.push((s, 1)),
        }
    }
    counts
}

fn check_class(
    ctx: &FieldCtx,
    halfset: &HalfSet,
    blocks: &[OrderedBlock],
    class: usize,
    violations: &mut Vec<Violation>,
) {
    let mut covered: HashMap<Elem, usize> = HashMap::new();
    for (bi, block) in blocks.iter().enumerate() {
        let mut sorted = block.sorted();
        sorted.dedup();
        if sorted.len() != block.len() {
            let mut s = block.sorted();
            for w in s.windows(2) {
                if w[0] == w[1] {
                    violations.push(Violation::RepeatedInBlock {
                        class,
                        block: bi,
                        elem: w[0],
                    });
                    break;
                }
            }
            s.clear();
        }
        for &x in block.elements() {
            if !halfset.contains(x) {
                violations.push(Violation::ForeignPoint {
                    class,
                    block: bi,
                    elem: x,
                });
            }
            *covered.entry(x).or_insert(0) += 1;
        }
        let sum = block.sum(ctx);
        if sum != Elem(0) {
            violations.push(Violation::NotZeroSum {
                class,
                block: bi,
                sum,
            });
        }
    }
    for &x in halfset.elements() {
        match covered.get(&x).copied().unwrap_or(0) {
            0 => violations.push(Violation::PointMissing { class, elem: x }),
            1 => {}
            _ => violations.push(Violation::PointCoveredTwice { class, elem: x }),
        }
    }
}

/// Does P partition the half-set V into zero-sum blocks?
pub fn verify_heffter_system(
    ctx: &FieldCtx,
    halfset: &HalfSet,
    blocks: &[OrderedBlock],
) -> DesignReport {
    let mut violations = Vec::new();
    if let Err(e) = ctx.validate_halfset(halfset.elements()) {
        violations.push(Violation::HalfSet {
            detail: e.to_string(),
        });
    }
    check_class(ctx, halfset, blocks, 0, &mut violations);
    DesignReport {
        kind: ReportKind::System,
        v: halfset.len(),
        r: 1,
        profiles: vec![size_profile(blocks)],
        density: None,
        violations,
    }
}

/// Result of a pairwise orthogonality check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalityCheck {
    pub orthogonal: bool,
    /// On failure: (P block index, Q block index, shared elements).
    pub witness: Option<(usize, usize, Vec<Elem>)>,
}

/// Do every block of P and every block of Q meet in at most one element?
pub fn verify_orthogonality(
    p: &HeffterSystem,
    q: &HeffterSystem,
) -> Result<OrthogonalityCheck, DesignError> {
    if p.halfset != q.halfset {
        return Err(DesignError::MismatchedHalfSets);
    }
    for (i, bp) in p.blocks.iter().enumerate() {
        let sp = bp.sorted();
        for (j, bq) in q.blocks.iter().enumerate() {
            let shared: Vec<Elem> = bq
                .elements()
                .iter()
                .copied()
                .filter(|x| sp.binary_search(x).is_ok())
                .collect();
            if shared.len() > 1 {
                return Ok(OrthogonalityCheck {
                    orthogonal: false,
                    witness: Some((i, j, shared)),
                });
            }
        }
    }
    Ok(OrthogonalityCheck {
        orthogonal: true,
        witness: None,
    })
}

/// Full verification of a Heffter space: half-set, per-class Heffter systems,
/// and the global partial-linear-space property. Classifies the result as
/// space / configuration / net.
pub fn verify_heffter_space(ctx: &FieldCtx, space: &HeffterSpace) -> DesignReport {
    let mut violations = Vec::new();
    if let Err(e) = ctx.validate_halfset(space.halfset.elements()) {
        violations.push(Violation::HalfSet {
            detail: e.to_string(),
        });
    }
    for (ci, class) in space.classes.iter().enumerate() {
        check_class(ctx, &space.halfset, &class.blocks, ci, &mut violations);
    }
    // PLS: every 2-subset of points in at most one block across all classes
    let mut pair_owner: HashMap<(Elem, Elem), (usize, usize)> = HashMap::new();
    'pls: for (ci, class) in space.classes.iter().enumerate() {
        for (bi, block) in class.blocks.iter().enumerate() {
            let s = block.sorted();
            for ai in 0..s.len() {
                for bi2 in ai + 1..s.len() {
                    let key = (s[ai], s[bi2]);
                    if let Some(&first) = pair_owner.get(&key) {
                        violations.push(Violation::PairCoveredTwice {
                            a: key.0,
                            b: key.1,
                            first,
                            second: (ci, bi),
                        });
                        break 'pls;
                    }
                    pair_owner.insert(key, (ci, bi));
                }
            }
        }
    }

    let profiles: Vec<Vec<(usize, usize)>> = space
        .classes
        .iter()
        .map(|c| size_profile(&c.blocks))
        .collect();
    let v = space.halfset.len();
    let constant_sizes: Option<Vec<usize>> = profiles
        .iter()
        .map(|p| (p.len() == 1).then(|| p[0].0))
        .collect();
    let kind = match &constant_sizes {
        Some(sizes) if !sizes.is_empty() && sizes.iter().all(|&k| k == sizes[0]) => {
            if v == sizes[0] * sizes[0] {
                ReportKind::Net
            } else {
                ReportKind::Configuration
            }
        }
        _ => ReportKind::Space,
    };
    let density = if violations.is_empty() {
        constant_sizes.as_ref().and_then(|sizes| {
            let sum: usize = sizes.iter().sum();
            let r = sizes.len();
            (v > 1).then(|| Rational::new((sum - r) as i64, (v - 1) as i64))
        })
    } else {
        None
    };
    DesignReport {
        kind,
        v,
        r: space.classes.len(),
        profiles,
        density,
        violations,
    }
}

/// Density of a valid Heffter space: (k_1 + ... + k_r - r) / (v - 1), reduced.
/// The value is cross-checked against the edge count of the collinearity
/// graph; a disagreement (impossible for a valid space) is an error.
pub fn density(ctx: &FieldCtx, space: &HeffterSpace) -> Result<Rational, DesignError> {
    let report = verify_heffter_space(ctx, space);
    if !report.valid() {
        return Err(DesignError::InvalidSpace(
            report
                .violations
                .first()
                .map(|v| v.to_string())
                .unwrap_or_default(),
        ));
    }
    let v = space.halfset.len() as i64;
    // edge count of the collinearity graph: every block of size k contributes
    // C(k,2) pairs, all distinct by the PLS property
    let mut edges: i64 = 0;
    for class in &space.classes {
        for b in &class.blocks {
            let k = b.len() as i64;
            edges += k * (k - 1) / 2;
        }
    }
    let graph_density = Rational::new(edges, v * (v - 1) / 2);
    if let Some(formula) = report.density {
        if formula != graph_density {
            return Err(DesignError::InvalidSpace(format!(
                "density formula {formula} disagrees with collinearity graph {graph_density}"
            )));
        }
    }
    Ok(graph_density)
}

/// Degrees of every vertex in the collinearity graph of a space.
pub fn collinearity_degrees(space: &HeffterSpace) -> HashMap<Elem, usize> {
    let mut deg: HashMap<Elem, usize> = space
        .halfset
        .elements()
        .iter()
        .map(|&x| (x, 0))
        .collect();
    for class in &space.classes {
        for b in &class.blocks {
            let k = b.len();
            for &x in b.elements() {
                if let Some(d) = deg.get_mut(&x) {
                    *d += k - 1;
                }
            }
        }
    }
    deg
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    TightLinear,
    Infeasible,
}

/// The collinearity bound: k_1 + ... + k_r - r <= v - 1, with equality forcing
/// a linear space.
pub fn check_upper_bound(v: usize, sizes: &[usize]) -> Feasibility {
    let sum: usize = sizes.iter().sum();
    let lhs = sum - sizes.len();
    match lhs.cmp(&(v - 1)) {
        std::cmp::Ordering::Greater => Feasibility::Infeasible,
        std::cmp::Ordering::Equal => Feasibility::TightLinear,
        std::cmp::Ordering::Less => Feasibility::Feasible,
    }
}

/// An abstract abelian group of odd order given by its invariant factors
/// d_1 | d_2 | ... | d_m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> AbelianGroup {
        assert!(!factors.is_empty());
        for w in factors.windows(2) {
            assert!(w[1] % w[0] == 0, "invariant factors must divide in turn");
        }
        AbelianGroup { factors }
    }

    pub fn cyclic(m: u64) -> AbelianGroup {
        AbelianGroup::new(vec![m])
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// The exponent: the largest invariant factor. Element orders are exactly
    /// its divisors.
    pub fn exponent(&self) -> u64 {
        *self.factors.last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearVerdict {
    NotExcluded,
    /// Some element order does not divide r - 1.
    Excluded { element_order: u64 },
}

/// Can a linear Heffter space of degree r over G exist? Required: r - 1 is a
/// multiple of every element order of G.
pub fn check_linear_feasibility(group: &AbelianGroup, r: u64) -> LinearVerdict {
    let e = group.exponent();
    let rm1 = r.saturating_sub(1);
    if rm1 % e == 0 {
        return LinearVerdict::NotExcluded;
    }
    // smallest element order witnessing the obstruction
    let mut witness = e;
    let mut d = 1;
    while d * d <= e {
        if e % d == 0 {
            if rm1 % d != 0 {
                witness = witness.min(d);
            }
            let other = e / d;
            if rm1 % other != 0 {
                witness = witness.min(other);
            }
        }
        d += 1;
    }
    LinearVerdict::Excluded {
        element_order: witness,
    }
}

/// Find an ordering of a zero-sum block whose partial sums are pairwise
/// distinct. The first element is fixed to the least code (legal because
/// simplicity of a zero-sum block is invariant under rotating the order);
/// remaining elements are tried ascending, so the result is deterministic.
pub fn order_for_simplicity(
    ctx: &FieldCtx,
    block: &[Elem],
) -> Result<Option<OrderedBlock>, DesignError> {
    let mut sorted = block.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(DesignError::RepeatedElement(w[0]));
        }
    }
    let total = sorted.iter().fold(Elem(0), |acc, &x| ctx.add(acc, x));
    if total != Elem(0) {
        return Err(DesignError::NotZeroSum(total));
    }
    let k = sorted.len();
    let mut order: Vec<Elem> = vec![sorted[0]];
    let mut used = vec![false; k];
    used[0] = true;
    let mut sums: Vec<Elem> = vec![sorted[0]];

    fn backtrack(
        ctx: &FieldCtx,
        sorted: &[Elem],
        used: &mut [bool],
        order: &mut Vec<Elem>,
        sums: &mut Vec<Elem>,
    ) -> bool {
        let k = sorted.len();
        if order.len() == k {
            return true;
        }
        let last_slot = order.len() == k - 1;
        for i in 1..k {
            if used[i] {
                continue;
            }
            let s = ctx.add(*sums.last().unwrap(), sorted[i]);
            // all partial sums distinct; the final sum is 0, so interior sums
            // must be nonzero
            let ok = if last_slot {
                s == Elem(0) && !sums.contains(&Elem(0))
            } else {
                s != Elem(0) && !sums.contains(&s)
            };
            if ok {
                used[i] = true;
                order.push(sorted[i]);
                sums.push(s);
                if backtrack(ctx, sorted, used, order, sums) {
                    return true;
                }
                sums.pop();
                order.pop();
                used[i] = false;
            }
        }
        false
    }

    if sorted[0] == Elem(0) {
        // zero cannot appear in a block of distinct nonzero partial sums
        // unless it is the final element of the sum sequence
        return Ok(None);
    }
    if backtrack(ctx, &sorted, &mut used, &mut order, &mut sums) {
        Ok(Some(OrderedBlock { elements: order }))
    } else {
        Ok(None)
    }
}

/// A partially filled matrix displaying a pair of orthogonal systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeffterArray {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<Option<Elem>>,
}

impl HeffterArray {
    pub fn new(rows: usize, cols: usize, cells: Vec<Option<Elem>>) -> HeffterArray {
        assert_eq!(cells.len(), rows * cols);
        HeffterArray { rows, cols, cells }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Elem> {
        self.cells[i * self.cols + j]
    }

    pub fn cells(&self) -> &[Option<Elem>] {
        &self.cells
    }
}

impl std::fmt::Display for HeffterArray {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let width = self
            .cells
            .iter()
            .flatten()
            .map(|e| e.to_string().len())
            .max()
            .unwrap_or(1);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| match self.get(i, j) {
                    Some(e) => format!("{:>width$}", e.to_string()),
                    None => format!("{:>width$}", "."),
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Display an orthogonal pair (P, Q) as a Heffter array: cell (i, j) holds the
/// unique common element of P's block i and Q's block j, when it exists.
pub fn array_from_pair(
    p: &HeffterSystem,
    q: &HeffterSystem,
) -> Result<HeffterArray, DesignError> {
    if p.halfset != q.halfset {
        return Err(DesignError::MismatchedHalfSets);
    }
    let rows = p.blocks.len();
    let cols = q.blocks.len();
    let mut cells = vec![None; rows * cols];
    for (i, bp) in p.blocks.iter().enumerate() {
        let sp = bp.sorted();
        for (j, bq) in q.blocks.iter().enumerate() {
            let shared: Vec<Elem> = bq
                .elements()
                .iter()
                .copied()
                .filter(|x| sp.binary_search(x).is_ok())
                .collect();
            match shared.len() {
                0 => {}
                1 => cells[i * cols + j] = Some(shared[0]),
                _ => {
                    return Err(DesignError::NotOrthogonal {
                        p_block: i,
                        q_block: j,
                        shared,
                    })
                }
            }
        }
    }
    Ok(HeffterArray { rows, cols, cells })
}

/// Rebuild the orthogonal pair from an array, checking the Heffter array
/// conditions (a)-(d). Rows give P (filled cells in column order), columns
/// give Q (filled cells in row order).
pub fn pair_from_array(
    ctx: &FieldCtx,
    a: &HeffterArray,
) -> Result<(HeffterSystem, HeffterSystem), DesignError> {
    let row_blocks: Vec<Vec<Elem>> = (0..a.rows)
        .map(|i| (0..a.cols).filter_map(|j| a.get(i, j)).collect())
        .collect();
    let col_blocks: Vec<Vec<Elem>> = (0..a.cols)
        .map(|j| (0..a.rows).filter_map(|i| a.get(i, j)).collect())
        .collect();

    let h = row_blocks.first().map(|b| b.len()).unwrap_or(0);
    if let Some(i) = row_blocks.iter().position(|b| b.len() != h) {
        return Err(DesignError::ArrayConditionViolated {
            condition: 'a',
            detail: format!("row {i} has {} filled cells, expected {h}", row_blocks[i].len()),
        });
    }
    let k = col_blocks.first().map(|b| b.len()).unwrap_or(0);
    if let Some(j) = col_blocks.iter().position(|b| b.len() != k) {
        return Err(DesignError::ArrayConditionViolated {
            condition: 'b',
            detail: format!("column {j} has {} filled cells, expected {k}", col_blocks[j].len()),
        });
    }
    let entries: Vec<Elem> = a.cells.iter().flatten().copied().collect();
    let halfset = ctx
        .validate_halfset(&entries)
        .map_err(|e| DesignError::ArrayConditionViolated {
            condition: 'c',
            detail: e.to_string(),
        })?;
    for (i, b) in row_blocks.iter().enumerate() {
        let sum = b.iter().fold(Elem(0), |acc, &x| ctx.add(acc, x));
        if sum != Elem(0) {
            return Err(DesignError::ArrayConditionViolated {
                condition: 'd',
                detail: format!("row {i} sums to {sum}"),
            });
        }
    }
    for (j, b) in col_blocks.iter().enumerate() {
        let sum = b.iter().fold(Elem(0), |acc, &x| ctx.add(acc, x));
        if sum != Elem(0) {
            return Err(DesignError::ArrayConditionViolated {
                condition: 'd',
                detail: format!("column {j} sums to {sum}"),
            });
        }
    }
    let mk = |blocks: Vec<Vec<Elem>>| HeffterSystem {
        halfset: halfset.clone(),
        blocks: blocks
            .into_iter()
            .map(|b| OrderedBlock { elements: b })
            .collect(),
    };
    Ok((mk(row_blocks), mk(col_blocks)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    pub const EX13_V: [u64; 20] = [
        1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 13, 15, 19, 21, 23, 24, 25, 27, 29, 33,
    ];
    pub const EX13_P1: [[u64; 4]; 5] = [
        [1, 3, 4, 33],
        [2, 5, 13, 21],
        [6, 23, 24, 29],
        [7, 9, 10, 15],
        [11, 19, 25, 27],
    ];
    pub const EX13_P2: [[u64; 4]; 5] = [
        [1, 2, 9, 29],
        [3, 6, 13, 19],
        [4, 5, 7, 25],
        [10, 21, 24, 27],
        [11, 15, 23, 33],
    ];
    pub const EX13_P3: [[u64; 4]; 5] = [
        [1, 6, 7, 27],
        [2, 4, 11, 24],
        [3, 5, 10, 23],
        [9, 19, 21, 33],
        [13, 15, 25, 29],
    ];

    fn ctx41() -> FieldCtx {
        FieldCtx::build(41, 1, None, None).unwrap()
    }

    fn system(ctx: &FieldCtx, blocks: &[[u64; 4]; 5]) -> HeffterSystem {
        let halfset = ctx
            .validate_halfset(&EX13_V.map(Elem))
            .unwrap();
        let blocks = blocks
            .iter()
            .map(|b| OrderedBlock::from_codes(b).unwrap())
            .collect();
        HeffterSystem::new(halfset, blocks)
    }

    #[test]
    fn example_systems_verify() {
        let ctx = ctx41();
        for blocks in [&EX13_P1, &EX13_P2, &EX13_P3] {
            let s = system(&ctx, blocks);
            let report = verify_heffter_system(&ctx, &s.halfset, &s.blocks);
            assert!(report.valid(), "{}", report.summary());
            assert_eq!(report.v, 20);
            assert_eq!(report.profiles[0], vec![(4, 5)]);
        }
    }

    #[test]
    fn tampered_block_caught() {
        let ctx = ctx41();
        let mut blocks = EX13_P1;
        blocks[0] = [1, 3, 4, 32];
        let halfset = ctx.validate_halfset(&EX13_V.map(Elem)).unwrap();
        let obs: Vec<OrderedBlock> = blocks
            .iter()
            .map(|b| OrderedBlock::from_codes(b).unwrap())
            .collect();
        let report = verify_heffter_system(&ctx, &halfset, &obs);
        assert!(!report.valid());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotZeroSum { block: 0, sum, .. } if *sum == Elem(40))));
    }

    #[test]
    fn orthogonality_pairs() {
        let ctx = ctx41();
        let p1 = system(&ctx, &EX13_P1);
        let p2 = system(&ctx, &EX13_P2);
        let p3 = system(&ctx, &EX13_P3);
        assert!(verify_orthogonality(&p1, &p2).unwrap().orthogonal);
        assert!(verify_orthogonality(&p1, &p3).unwrap().orthogonal);
        assert!(verify_orthogonality(&p2, &p3).unwrap().orthogonal);
        let self_check = verify_orthogonality(&p1, &p1).unwrap();
        assert!(!self_check.orthogonal);
        let (i, j, shared) = self_check.witness.unwrap();
        assert_eq!(i, j);
        assert_eq!(shared.len(), 4);
    }

    #[test]
    fn space_classification() {
        let ctx = ctx41();
        let halfset = ctx.validate_halfset(&EX13_V.map(Elem)).unwrap();
        let classes = [&EX13_P1, &EX13_P2, &EX13_P3]
            .iter()
            .enumerate()
            .map(|(i, blocks)| SpaceClass {
                name: format!("P{}", i + 1),
                blocks: blocks
                    .iter()
                    .map(|b| OrderedBlock::from_codes(b).unwrap())
                    .collect(),
            })
            .collect();
        let space = HeffterSpace::new(halfset, classes);
        let report = verify_heffter_space(&ctx, &space);
        assert!(report.valid(), "{}", report.summary());
        assert_eq!(report.kind, ReportKind::Configuration);
        assert_eq!(report.v, 20);
        assert_eq!(report.r, 3);
        assert_eq!(report.density, Some(Rational::new(9, 19)));

        // single class: still a valid (20,4;1) space/configuration
        let single = HeffterSpace::new(space.halfset.clone(), vec![space.classes[0].clone()]);
        let single_report = verify_heffter_space(&ctx, &single);
        assert!(single_report.valid());
        assert_eq!(single_report.r, 1);
        assert_eq!(single_report.kind, ReportKind::Configuration);

        // collinearity graph is regular of degree sum(k_i - 1)
        let expected: usize = 3 * (4 - 1);
        for (_, d) in collinearity_degrees(&space) {
            assert_eq!(d, expected);
        }
        // r(k-1) <= v-1
        assert!(report.r * 3 <= report.v - 1);
    }

    #[test]
    fn upper_bound_cases() {
        // equality r(k-1) = v-1 forces a linear space
        assert_eq!(check_upper_bound(19, &[4; 6]), Feasibility::TightLinear);
        assert_eq!(check_upper_bound(20, &[4; 6]), Feasibility::Feasible);
        assert_eq!(check_upper_bound(20, &[4; 7]), Feasibility::Infeasible);
        assert_eq!(check_upper_bound(35, &[5; 5]), Feasibility::Feasible);
        assert_eq!(check_upper_bound(35, &[5, 5, 5, 5, 5, 7]), Feasibility::Feasible);
    }

    #[test]
    fn linear_feasibility() {
        // cyclic of order 2v+1: excluded for every 2 <= r <= v
        let g = AbelianGroup::cyclic(41);
        for r in 2..=20 {
            assert!(matches!(
                check_linear_feasibility(&g, r),
                LinearVerdict::Excluded { .. }
            ));
        }
        // an element of order 5 with r = 7: 5 does not divide 6
        let g2 = AbelianGroup::new(vec![5, 15]);
        assert_eq!(
            check_linear_feasibility(&g2, 7),
            LinearVerdict::Excluded { element_order: 5 }
        );
        // (Z_7)^m with r = 1 (mod 7) is not excluded
        let g3 = AbelianGroup::new(vec![7, 7, 7]);
        assert_eq!(check_linear_feasibility(&g3, 8), LinearVerdict::NotExcluded);
        assert_eq!(check_linear_feasibility(&g3, 15), LinearVerdict::NotExcluded);
        assert!(matches!(
            check_linear_feasibility(&g3, 9),
            LinearVerdict::Excluded { element_order: 7 }
        ));
    }

    #[test]
    fn simplicity_ordering() {
        let ctx = FieldCtx::build(71, 1, None, None).unwrap();
        let b = [Elem(1), Elem(24), Elem(25), Elem(43), Elem(49)];
        let ordered = order_for_simplicity(&ctx, &b).unwrap().unwrap();
        assert_eq!(
            ordered.elements(),
            &[Elem(1), Elem(24), Elem(25), Elem(43), Elem(49)]
        );
        assert_eq!(
            ordered.partial_sums(&ctx),
            vec![Elem(1), Elem(25), Elem(50), Elem(22), Elem(0)]
        );

        let ctx41 = ctx41();
        let t = [Elem(1), Elem(2), Elem(38)];
        let ordered = order_for_simplicity(&ctx41, &t).unwrap().unwrap();
        assert_eq!(ordered.elements(), &[Elem(1), Elem(2), Elem(38)]);
        assert_eq!(
            ordered.partial_sums(&ctx41),
            vec![Elem(1), Elem(3), Elem(0)]
        );

        // zero-sum triples of distinct nonzero elements are simple in any order
        for a in 1..41u64 {
            for b in a + 1..41 {
                let c = (2 * 41 - a - b) % 41;
                if c == 0 || c == a || c == b || c < b {
                    continue;
                }
                let block = OrderedBlock::from_codes(&[a, b, c]).unwrap();
                assert!(block.is_simple(&ctx41));
            }
        }

        let bad = [Elem(1), Elem(2), Elem(3)];
        assert!(matches!(
            order_for_simplicity(&ctx41, &bad),
            Err(DesignError::NotZeroSum(_))
        ));
    }

    #[test]
    fn arrays_round_trip() {
        let ctx = ctx41();
        let p1 = system(&ctx, &EX13_P1);
        let p2 = system(&ctx, &EX13_P2);
        let a = array_from_pair(&p1, &p2).unwrap();
        assert_eq!(a.rows, 5);
        assert_eq!(a.cols, 5);
        // first printed H(5;4): row 0 is 1 3 4 . 33
        assert_eq!(a.get(0, 0), Some(Elem(1)));
        assert_eq!(a.get(0, 1), Some(Elem(3)));
        assert_eq!(a.get(0, 3), None);
        assert_eq!(a.get(0, 4), Some(Elem(33)));

        let (p, q) = pair_from_array(&ctx, &a).unwrap();
        let sets = |s: &HeffterSystem| -> Vec<Vec<Elem>> {
            s.blocks.iter().map(|b| b.sorted()).collect()
        };
        assert_eq!(sets(&p), sets(&p1));
        assert_eq!(sets(&q), sets(&p2));
        let a2 = array_from_pair(&p, &q).unwrap();
        assert_eq!(a, a2);

        assert!(matches!(
            array_from_pair(&p1, &p1),
            Err(DesignError::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn array_conditions_cited() {
        let ctx = ctx41();
        let p1 = system(&ctx, &EX13_P1);
        let p2 = system(&ctx, &EX13_P2);
        let a = array_from_pair(&p1, &p2).unwrap();
        // blank out one filled cell: breaks (a) first
        let mut cells = a.cells().to_vec();
        let idx = cells.iter().position(|c| c.is_some()).unwrap();
        cells[idx] = None;
        let broken = HeffterArray::new(5, 5, cells);
        match pair_from_array(&ctx, &broken) {
            Err(DesignError::ArrayConditionViolated { condition, .. }) => {
                assert_eq!(condition, 'a')
            }
            other => panic!("expected condition violation, got {other:?}"),
        }
    }
}
