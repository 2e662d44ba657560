//! Backtracking and greedy searchers for Heffter rulers and Heffter
//! difference packings, inequivalent-ruler enumeration, net seeds, and the
//! Weil-type threshold calculator.

use crate::construct::{check_net_seed, NetSeed};
use crate::field::{Elem, FieldCtx, FieldError};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("rulers need q = 3 (mod 4); here q = {0}")]
    WrongCongruence(u64),
    #[error("{k} does not divide the half-set size {v}")]
    NoDivisibility { k: u64, v: u64 },
    #[error("element {0} is not a nonzero square")]
    ElementNotSquare(Elem),
    #[error("repeated element {0}")]
    RepeatedElement(Elem),
    #[error("q = {0} is not of the form 18n^2+1 with n odd")]
    WrongForm(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A bit set over Z_m, used for difference lists in exponent space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffSet {
    words: Vec<u64>,
    m: u64,
}

impl DiffSet {
    pub fn new(m: u64) -> DiffSet {
        DiffSet {
            words: vec![0; (m as usize + 63) / 64],
            m,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn test(&self, i: u64) -> bool {
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: u64) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn clear(&mut self, i: u64) {
        self.words[(i / 64) as usize] &= !(1 << (i % 64));
    }

    pub fn intersects(&self, other: &DiffSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &DiffSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn iter_set(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.m).filter(|&i| self.test(i))
    }
}

/// An ordered tuple of nonzero squares meant to satisfy the Heffter ruler
/// conditions: Golomb difference list, resolvable residues, zero sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ruler {
    elements: Vec<Elem>,
}

impl Ruler {
    pub fn new(elements: Vec<Elem>) -> Ruler {
        Ruler { elements }
    }

    pub fn from_codes(codes: &[u64]) -> Ruler {
        Ruler {
            elements: codes.iter().map(|&c| Elem(c)).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn sorted_codes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.elements.iter().map(|e| e.0).collect();
        v.sort_unstable();
        v
    }

    /// phi-image: half of the discrete log of each element, in element order.
    pub fn phi(&self, ctx: &FieldCtx) -> Result<Vec<u64>, SearchError> {
        self.elements
            .iter()
            .map(|&x| {
                if !ctx.is_square(x) {
                    return Err(SearchError::ElementNotSquare(x));
                }
                Ok(ctx.dlog(x).unwrap() / 2)
            })
            .collect()
    }

    /// The difference list as a set over Z_v; errors if a difference repeats.
    pub fn delta_set(&self, ctx: &FieldCtx) -> Result<DiffSet, SearchError> {
        let v = ctx.half_order();
        let phi = self.phi(ctx)?;
        let mut set = DiffSet::new(v);
        for i in 0..phi.len() {
            for j in 0..phi.len() {
                if i == j {
                    continue;
                }
                let d = (phi[i] + v - phi[j]) % v;
                if set.test(d) {
                    return Err(SearchError::RepeatedElement(ctx.g_pow(2 * d)));
                }
                set.set(d);
            }
        }
        Ok(set)
    }

    /// Lexicographically least sorted code sequence over the scaling orbit
    /// { B*t : t a nonzero square }.
    pub fn canonical_form(&self, ctx: &FieldCtx) -> Vec<u64> {
        let v = ctx.half_order();
        let g2 = ctx.pow(ctx.generator(), 2);
        let mut best: Option<Vec<u64>> = None;
        let mut t = Elem(1);
        for _ in 0..v {
            let mut scaled: Vec<u64> = self.elements.iter().map(|&x| ctx.mul(x, t).0).collect();
            scaled.sort_unstable();
            if best.as_ref().map_or(true, |b| &scaled < b) {
                best = Some(scaled);
            }
            t = ctx.mul(t, g2);
        }
        best.unwrap()
    }
}

/// Named failures of the ruler conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RulerDefect {
    /// (H1) a repeated difference, reported as its exponent in Z_v.
    RepeatedDifference(u64),
    /// (H2) residues mod k not complete; the missing residue.
    ResidueMissing(u64),
    /// (H3) the sum of the block.
    NotZeroSum(Elem),
    /// The given ordering has a repeated partial sum.
    NotSimple,
}

impl std::fmt::Display for RulerDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RulerDefect::RepeatedDifference(d) => write!(f, "H1: repeated difference {d} in Z_v"),
            RulerDefect::ResidueMissing(r) => write!(f, "H2: residue {r} (mod k) not hit"),
            RulerDefect::NotZeroSum(s) => write!(f, "H3: sum = {s} != 0"),
            RulerDefect::NotSimple => write!(f, "ordering is not simple"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RulerReport {
    pub golomb: bool,
    pub resolvable: bool,
    pub zero_sum: bool,
    pub simple: bool,
    pub defects: Vec<RulerDefect>,
}

impl RulerReport {
    /// (H1) and (H2) and (H3); simplicity of the stored order is reported but
    /// is a property of the ordering, not of the ruler set.
    pub fn is_heffter_ruler(&self) -> bool {
        self.golomb && self.resolvable && self.zero_sum
    }
}

/// Verify the Heffter ruler conditions (H1)-(H3) plus simplicity of the given
/// ordering.
pub fn verify_ruler(
    ctx: &FieldCtx,
    k: usize,
    elements: &[Elem],
) -> Result<RulerReport, SearchError> {
    let q = ctx.q();
    if q % 4 != 3 {
        return Err(SearchError::WrongCongruence(q));
    }
    let v = ctx.half_order();
    if k == 0 || v % k as u64 != 0 {
        return Err(SearchError::NoDivisibility { k: k as u64, v });
    }
    assert_eq!(elements.len(), k, "ruler length must equal k");
    for &x in elements {
        if !ctx.is_square(x) {
            return Err(SearchError::ElementNotSquare(x));
        }
    }
    {
        let mut sorted: Vec<Elem> = elements.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(SearchError::RepeatedElement(w[0]));
            }
        }
    }
    let mut defects = Vec::new();
    let phi: Vec<u64> = elements
        .iter()
        .map(|&x| ctx.dlog(x).unwrap() / 2)
        .collect();

    // H1: Golomb in Z_v via the difference table
    let mut golomb = true;
    let mut seen = DiffSet::new(v);
    'h1: for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let d = (phi[i] + v - phi[j]) % v;
            if seen.test(d) {
                golomb = false;
                defects.push(RulerDefect::RepeatedDifference(d));
                break 'h1;
            }
            seen.set(d);
        }
    }

    // H2: phi(B) hits every residue class mod k
    let mut hit = vec![false; k];
    for &m in &phi {
        hit[(m % k as u64) as usize] = true;
    }
    let resolvable = hit.iter().all(|&h| h);
    if let Some(r) = hit.iter().position(|&h| !h) {
        defects.push(RulerDefect::ResidueMissing(r as u64));
    }

    // H3: zero sum in the field
    let sum = elements.iter().fold(Elem(0), |acc, &x| ctx.add(acc, x));
    let zero_sum = sum == Elem(0);
    if !zero_sum {
        defects.push(RulerDefect::NotZeroSum(sum));
    }

    // simplicity of the given order
    let mut sums = Vec::with_capacity(k);
    let mut acc = Elem(0);
    for &x in elements {
        acc = ctx.add(acc, x);
        sums.push(acc);
    }
    sums.sort_unstable();
    let simple = sums.windows(2).all(|w| w[0] != w[1]);
    if !simple {
        defects.push(RulerDefect::NotSimple);
    }

    Ok(RulerReport {
        golomb,
        resolvable,
        zero_sum,
        simple,
        defects,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SearchMode {
    First,
    All,
}

/// Exhaustive backtracking search for Heffter rulers, normalized so that the
/// element in the coset C^{2k}_0 is 1. Candidates are tried in increasing
/// discrete-log order, so the result list is deterministic. Returned rulers
/// are stored ascending by code.
pub fn search_rulers(
    ctx: &FieldCtx,
    k: usize,
    mode: SearchMode,
) -> Result<Vec<Ruler>, SearchError> {
    let q = ctx.q();
    if q % 4 != 3 {
        return Err(SearchError::WrongCongruence(q));
    }
    let v = ctx.half_order();
    let ku = k as u64;
    if k < 3 || v % ku != 0 {
        return Err(SearchError::NoDivisibility { k: ku, v });
    }

    // phi-values per coset position i: m = i (mod k), ascending
    let coset: Vec<Vec<u64>> = (0..ku)
        .map(|i| (0..v).filter(|m| m % ku == i).collect())
        .collect();

    struct State<'a> {
        ctx: &'a FieldCtx,
        v: u64,
        k: usize,
        phis: Vec<u64>,
        sum: Elem,
        diffs: DiffSet,
        found: Vec<Ruler>,
        stop_after_first: bool,
    }

    impl State<'_> {
        fn try_add(&mut self, m: u64) -> Option<Vec<u64>> {
            let mut added = Vec::with_capacity(2 * self.phis.len());
            for &m0 in &self.phis {
                for d in [(m + self.v - m0) % self.v, (m0 + self.v - m) % self.v] {
                    if self.diffs.test(d) {
                        for &u in &added {
                            self.diffs.clear(u);
                        }
                        return None;
                    }
                    self.diffs.set(d);
                    added.push(d);
                }
            }
            self.phis.push(m);
            self.sum = self.ctx.add(self.sum, self.ctx.g_pow(2 * m));
            Some(added)
        }

        fn undo(&mut self, m: u64, added: Vec<u64>) {
            self.phis.pop();
            self.sum = self.ctx.sub(self.sum, self.ctx.g_pow(2 * m));
            for u in added {
                self.diffs.clear(u);
            }
        }

        fn record(&mut self) {
            let mut elems: Vec<Elem> = self.phis.iter().map(|&m| self.ctx.g_pow(2 * m)).collect();
            elems.sort_unstable();
            self.found.push(Ruler::new(elems));
        }

        fn recurse(&mut self, coset: &[Vec<u64>]) -> bool {
            let depth = self.phis.len();
            if depth == self.k - 1 {
                // the last element is forced by the zero-sum condition
                let x = self.ctx.neg(self.sum);
                if x == Elem(0) || !self.ctx.is_square(x) {
                    return false;
                }
                let m = self.ctx.dlog(x).unwrap() / 2;
                if m % self.k as u64 != (self.k - 1) as u64 {
                    return false;
                }
                if let Some(added) = self.try_add(m) {
                    self.record();
                    let stop = self.stop_after_first;
                    self.undo(m, added);
                    return stop;
                }
                return false;
            }
            let ms: &[u64] = &coset[depth];
            for i in 0..ms.len() {
                let m = ms[i];
                if let Some(added) = self.try_add(m) {
                    let stop = self.recurse(coset);
                    self.undo(m, added);
                    if stop {
                        return true;
                    }
                }
            }
            false
        }
    }

    let mut st = State {
        ctx,
        v,
        k,
        phis: Vec::new(),
        sum: Elem(0),
        diffs: DiffSet::new(v),
        found: Vec::new(),
        stop_after_first: mode == SearchMode::First,
    };
    let added = st.try_add(0).expect("first element has no differences");
    st.recurse(&coset);
    st.undo(0, added);
    Ok(st.found)
}

/// Multiplicative-orbit classification of all rulers of a given size.
#[derive(Clone, Debug)]
pub struct InequivalentRulers {
    /// One canonical representative per orbit, ascending by canonical form.
    pub representatives: Vec<Ruler>,
    /// Number of normalized rulers found by the raw search.
    pub normalized_count: usize,
}

impl InequivalentRulers {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }
}

/// Group every ruler into its scaling orbit {B*t} and return canonical
/// representatives (least sorted code sequence per orbit).
pub fn enumerate_inequivalent_rulers(
    ctx: &FieldCtx,
    k: usize,
) -> Result<InequivalentRulers, SearchError> {
    let all = search_rulers(ctx, k, SearchMode::All)?;
    let mut canon: Vec<Vec<u64>> = all.iter().map(|r| r.canonical_form(ctx)).collect();
    canon.sort_unstable();
    canon.dedup();
    Ok(InequivalentRulers {
        representatives: canon
            .into_iter()
            .map(|codes| Ruler::from_codes(&codes))
            .collect(),
        normalized_count: all.len(),
    })
}

/// A family of Heffter rulers over one field with pairwise-disjoint
/// difference lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferencePacking {
    pub rulers: Vec<Ruler>,
}

#[derive(Clone, Debug)]
pub struct PackingReport {
    pub ruler_reports: Vec<RulerReport>,
    /// Indices and shared difference exponent of an overlapping pair, if any.
    pub overlap: Option<(usize, usize, u64)>,
    /// A ruler whose own difference list repeats, if any.
    pub internal_repeat: Option<usize>,
}

impl PackingReport {
    pub fn valid(&self) -> bool {
        self.overlap.is_none()
            && self.internal_repeat.is_none()
            && self.ruler_reports.iter().all(|r| r.is_heffter_ruler())
    }

    pub fn simple(&self) -> bool {
        self.ruler_reports.iter().all(|r| r.simple)
    }
}

pub fn verify_packing(
    ctx: &FieldCtx,
    packing: &DifferencePacking,
) -> Result<PackingReport, SearchError> {
    let mut ruler_reports = Vec::new();
    let mut sets: Vec<Option<DiffSet>> = Vec::new();
    let mut internal_repeat = None;
    for (i, r) in packing.rulers.iter().enumerate() {
        ruler_reports.push(verify_ruler(ctx, r.k(), r.elements())?);
        match r.delta_set(ctx) {
            Ok(s) => sets.push(Some(s)),
            Err(_) => {
                internal_repeat.get_or_insert(i);
                sets.push(None);
            }
        }
    }
    let mut overlap = None;
    'outer: for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if let (Some(a), Some(b)) = (&sets[i], &sets[j]) {
                if a.intersects(b) {
                    let d = a.iter_set().find(|&d| b.test(d)).unwrap();
                    overlap = Some((i, j, d));
                    break 'outer;
                }
            }
        }
    }
    Ok(PackingReport {
        ruler_reports,
        overlap,
        internal_repeat,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PackingMode {
    Exhaustive,
    Greedy { seed: Option<u64> },
}

/// Search for a (F_q, k; n) Heffter difference packing.
///
/// Exhaustive mode backtracks over complete ruler lists with pairwise
/// disjoint differences; up to a global scaling every packing contains a
/// canonical orbit representative, so the first member ranges over those.
/// Greedy mode follows the constructive proof strategy: build a (k-2)-subset
/// coset by coset, then solve for the final pair.
pub fn search_packing(
    ctx: &FieldCtx,
    k: usize,
    n: usize,
    mode: PackingMode,
) -> Result<Option<DifferencePacking>, SearchError> {
    match mode {
        PackingMode::Exhaustive => search_packing_exhaustive(ctx, k, n),
        PackingMode::Greedy { seed } => search_packing_greedy(ctx, k, n, seed),
    }
}

fn search_packing_exhaustive(
    ctx: &FieldCtx,
    k: usize,
    n: usize,
) -> Result<Option<DifferencePacking>, SearchError> {
    if n == 0 {
        return Ok(Some(DifferencePacking { rulers: Vec::new() }));
    }
    let normalized = search_rulers(ctx, k, SearchMode::All)?;
    if normalized.is_empty() {
        return Ok(None);
    }
    // every ruler is a normalized ruler scaled by a square
    let v = ctx.half_order();
    let g2 = ctx.pow(ctx.generator(), 2);
    let mut all_codes: Vec<Vec<u64>> = Vec::new();
    for r in &normalized {
        let mut t = Elem(1);
        for _ in 0..v {
            let mut codes: Vec<u64> = r.elements().iter().map(|&x| ctx.mul(x, t).0).collect();
            codes.sort_unstable();
            all_codes.push(codes);
            t = ctx.mul(t, g2);
        }
    }
    all_codes.sort_unstable();
    all_codes.dedup();
    let all: Vec<(Ruler, DiffSet)> = all_codes
        .iter()
        .map(|codes| {
            let r = Ruler::from_codes(codes);
            let d = r.delta_set(ctx).expect("search output is Golomb");
            (r, d)
        })
        .collect();
    let mut reps: Vec<Vec<u64>> = normalized.iter().map(|r| r.canonical_form(ctx)).collect();
    reps.sort_unstable();
    reps.dedup();

    // DFS: first member is a canonical representative, later members walk the
    // full ruler list in increasing index order
    fn extend(
        all: &[(Ruler, DiffSet)],
        chosen: &mut Vec<usize>,
        union: &DiffSet,
        n: usize,
        start: usize,
    ) -> bool {
        if chosen.len() == n {
            return true;
        }
        for idx in start..all.len() {
            if chosen.contains(&idx) {
                continue;
            }
            let (_, d) = &all[idx];
            if union.intersects(d) {
                continue;
            }
            let mut u2 = union.clone();
            u2.union_with(d);
            chosen.push(idx);
            if extend(all, chosen, &u2, n, idx + 1) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    for rep in &reps {
        let first = all_codes.binary_search(rep).expect("rep is a ruler");
        let mut chosen = vec![first];
        let union = all[first].1.clone();
        if extend(&all, &mut chosen, &union, n, 0) {
            let rulers = chosen.into_iter().map(|i| all[i].0.clone()).collect();
            return Ok(Some(DifferencePacking { rulers }));
        }
    }
    Ok(None)
}

fn shuffled(mut items: Vec<u64>, seed: Option<u64>, salt: u64) -> Vec<u64> {
    if let Some(s) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ salt.wrapping_mul(0x9e3779b97f4a7c15));
        items.shuffle(&mut rng);
    }
    items
}

/// One greedy ruler following the constructive proof: b_i in C^{2k}_{2i} for
/// i <= k-3 avoiding known differences and zero range sums, then the closing
/// pair {x, -x-s} found through the explicit inequality list (R4)-(R6).
fn greedy_ruler(
    ctx: &FieldCtx,
    k: usize,
    forbidden: &DiffSet,
    seed: Option<u64>,
    salt: u64,
) -> Option<Ruler> {
    let v = ctx.half_order();
    let ku = k as u64;
    let forb_elems: Vec<Elem> = forbidden.iter_set().map(|d| ctx.g_pow(2 * d)).collect();

    struct G<'a> {
        ctx: &'a FieldCtx,
        v: u64,
        k: usize,
        forbidden: &'a DiffSet,
        forb_elems: &'a [Elem],
        b: Vec<Elem>,
        phis: Vec<u64>,
        own_diffs: DiffSet,
        prefix_sums: Vec<Elem>,
    }

    impl G<'_> {
        /// Membership rule for b_j: not a known difference value, no fresh
        /// difference collision, and no zero range sum.
        fn admissible(&self, m: u64) -> bool {
            let x = self.ctx.g_pow(2 * m);
            if self.forb_elems.contains(&x) || self.own_diffs.test(m) {
                return false;
            }
            let mut new_ds = Vec::with_capacity(2 * self.phis.len());
            for &m0 in &self.phis {
                let d1 = (m + self.v - m0) % self.v;
                let d2 = (m0 + self.v - m) % self.v;
                if self.own_diffs.test(d1)
                    || self.own_diffs.test(d2)
                    || self.forbidden.test(d1)
                    || self.forbidden.test(d2)
                {
                    return false;
                }
                new_ds.push(d1);
                new_ds.push(d2);
            }
            new_ds.sort_unstable();
            if new_ds.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
            let last = *self.prefix_sums.last().unwrap_or(&Elem(0));
            let new_sum = self.ctx.add(last, x);
            if new_sum == Elem(0) || self.prefix_sums.contains(&new_sum) {
                return false;
            }
            true
        }

        fn push(&mut self, m: u64) {
            let x = self.ctx.g_pow(2 * m);
            for &m0 in &self.phis {
                self.own_diffs.set((m + self.v - m0) % self.v);
                self.own_diffs.set((m0 + self.v - m) % self.v);
            }
            self.phis.push(m);
            let last = *self.prefix_sums.last().unwrap_or(&Elem(0));
            self.prefix_sums.push(self.ctx.add(last, x));
            self.b.push(x);
        }

        fn pop(&mut self) {
            let m = self.phis.pop().unwrap();
            self.b.pop();
            self.prefix_sums.pop();
            for &m0 in &self.phis {
                self.own_diffs.clear((m + self.v - m0) % self.v);
                self.own_diffs.clear((m0 + self.v - m) % self.v);
            }
        }

        /// Closing step: x in C^{2k}_{2(k-2)} with -x-s in C^{2k}_{2(k-1)} and
        /// the (R6) inequalities.
        fn close(&self, candidates: &[u64]) -> Option<(Elem, Elem)> {
            let ctx = self.ctx;
            let ku = self.k as u64;
            let s = *self.prefix_sums.last().unwrap();
            for &m in candidates {
                let x = ctx.g_pow(2 * m);
                let y = ctx.neg(ctx.add(x, s));
                if y == Elem(0) || !ctx.is_square(y) {
                    continue;
                }
                let my = ctx.dlog(y).unwrap() / 2;
                if my % ku != ku - 1 {
                    continue; // (R5)
                }
                let xs = ctx.add(x, s);
                if self.r6_holds(x, xs) {
                    return Some((x, y));
                }
            }
            None
        }

        fn r6_holds(&self, x: Elem, xs: Elem) -> bool {
            let ctx = self.ctx;
            let b = &self.b;
            for &bi in b {
                for &bj in b {
                    // (R6,1) b_i x != -b_j (x+s)
                    if ctx.add(ctx.mul(bi, x), ctx.mul(bj, xs)) == Elem(0) {
                        return false;
                    }
                }
            }
            let xxs = ctx.mul(x, xs);
            let x2 = ctx.mul(x, x);
            let xs2 = ctx.mul(xs, xs);
            for (i, &bi) in b.iter().enumerate() {
                for &bj in &b[i..] {
                    let bij = ctx.mul(bi, bj);
                    // (R6,2) x(x+s) != -b_i b_j
                    if ctx.add(xxs, bij) == Elem(0) {
                        return false;
                    }
                    // (R6,3) x^2 != b_i b_j and (R6,4) (x+s)^2 != b_i b_j
                    if x2 == bij || xs2 == bij {
                        return false;
                    }
                }
                // (R6,5) x^2 != -b_i(x+s) and (R6,6) (x+s)^2 != b_i x
                if ctx.add(x2, ctx.mul(bi, xs)) == Elem(0) || xs2 == ctx.mul(bi, x) {
                    return false;
                }
            }
            let deltas: Vec<Elem> = self
                .own_diffs
                .iter_set()
                .chain(self.forbidden.iter_set())
                .map(|d| ctx.g_pow(2 * d))
                .collect();
            for &delta in &deltas {
                // (R6,9) x+s != -delta x
                if ctx.add(xs, ctx.mul(delta, x)) == Elem(0) {
                    return false;
                }
                for &bi in b {
                    // (R6,7) x != b_i delta
                    if x == ctx.mul(bi, delta) {
                        return false;
                    }
                    // (R6,8) x+s != -b_i delta
                    if ctx.add(xs, ctx.mul(bi, delta)) == Elem(0) {
                        return false;
                    }
                }
            }
            // (R6,10) x+s != any prefix sum of B*
            !self.prefix_sums.contains(&xs)
        }
    }

    let coset_candidates: Vec<Vec<u64>> = (0..ku)
        .map(|i| {
            let ms: Vec<u64> = (0..v).filter(|m| m % ku == i).collect();
            shuffled(ms, seed, salt.wrapping_add(i))
        })
        .collect();

    fn build(g: &mut G<'_>, cands: &[Vec<u64>]) -> Option<(Elem, Elem)> {
        let depth = g.phis.len();
        if depth == g.k - 2 {
            return g.close(&cands[g.k - 2]);
        }
        let ms = cands[depth].clone();
        for m in ms {
            if g.admissible(m) {
                g.push(m);
                if let Some(pair) = build(g, cands) {
                    return Some(pair);
                }
                g.pop();
            }
        }
        None
    }

    let mut g = G {
        ctx,
        v,
        k,
        forbidden,
        forb_elems: &forb_elems,
        b: Vec::new(),
        phis: Vec::new(),
        own_diffs: DiffSet::new(v),
        prefix_sums: Vec::new(),
    };
    let (x, y) = build(&mut g, &coset_candidates)?;
    let mut elements = g.b.clone();
    elements.push(x);
    elements.push(y);
    Some(Ruler::new(elements))
}

fn search_packing_greedy(
    ctx: &FieldCtx,
    k: usize,
    n: usize,
    seed: Option<u64>,
) -> Result<Option<DifferencePacking>, SearchError> {
    let q = ctx.q();
    if q % 4 != 3 {
        return Err(SearchError::WrongCongruence(q));
    }
    let v = ctx.half_order();
    if k < 3 || v % k as u64 != 0 {
        return Err(SearchError::NoDivisibility { k: k as u64, v });
    }
    let mut rulers: Vec<Ruler> = Vec::new();
    let mut union = DiffSet::new(v);
    for i in 0..n {
        let r = match greedy_ruler(ctx, k, &union, seed, i as u64) {
            Some(r) => r,
            None => return Ok(None),
        };
        let report = verify_ruler(ctx, k, r.elements())?;
        if !report.is_heffter_ruler() || !report.simple {
            return Ok(None);
        }
        let d = r
            .delta_set(ctx)
            .expect("greedy output has distinct differences");
        if union.intersects(&d) {
            return Ok(None);
        }
        union.union_with(&d);
        rulers.push(r);
    }
    Ok(Some(DifferencePacking { rulers }))
}

/// The Weil-type threshold Q(e, t) and the simplified bound 8k^5 n, compared
/// exactly with integer square-root bracketing.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct WeilBound {
    pub e: u64,
    pub t: u64,
    /// floor of Q(e, t)
    pub q_floor: u128,
    /// 8 k^5 n
    pub simple_bound: u128,
    /// exact comparison Q(e, t) < 8 k^5 n
    pub q_below_simple: bool,
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128 + 2;
    while x > 0 && x * x > n {
        x -= 1;
    }
    x
}

/// Exact test Q(e, t) < m with
/// Q(e, t) = [ (e-1)^2 + sqrt((e-1)^4 + 4e(et+2)) ]^2 / 4.
pub fn weil_q_below(e: u64, t: u64, m: u128) -> bool {
    let a = ((e - 1) as u128) * ((e - 1) as u128);
    let d = a * a + 4 * (e as u128) * ((e as u128) * (t as u128) + 2);
    // Q < m  <=>  a^2 + d + 2a sqrt(d) < 4m  <=>  4 a^2 d < (4m - a^2 - d)^2
    let four_m = 4 * m;
    let rest = a * a + d;
    if four_m <= rest {
        return false;
    }
    let rhs = four_m - rest;
    4 * a * a * d < rhs * rhs
}

/// floor(Q(e, t)), exact.
pub fn weil_q_floor(e: u64, t: u64) -> u128 {
    let a = ((e - 1) as u128) * ((e - 1) as u128);
    let d = a * a + 4 * (e as u128) * ((e as u128) * (t as u128) + 2);
    let four_q_floor = a * a + d + isqrt_u128(4 * a * a * d);
    four_q_floor / 4
}

/// Q(2k, k^2 (k-1) n) against 8 k^5 n.
pub fn weil_threshold(k: u64, n: u64) -> WeilBound {
    let e = 2 * k;
    let t = k * k * (k - 1) * n;
    let simple_bound = 8u128 * (k as u128).pow(5) * n as u128;
    WeilBound {
        e,
        t,
        q_floor: weil_q_floor(e, t),
        simple_bound,
        q_below_simple: weil_q_below(e, t, simple_bound),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetSeedStrategy {
    /// Complete lexicographic backtracking (prefix free, final three solved).
    Backtrack,
    /// Seeded random sampling of the free prefix.
    Randomized { seed: u64, max_iters: u64 },
}

/// Search for a net seed over GF(q), q = 18n^2+1 with n odd: a tuple Y with
/// y_i in the i-th coset of C^{3n}, y_0 = 1, zero sum, and both twisted sums
/// sigma and sigma' null. Any returned seed is re-verified. n = 1 is rejected
/// (returns None; the two twisted sums force y_1 = y_2 there).
pub fn search_net_seed(
    ctx: &FieldCtx,
    strategy: NetSeedStrategy,
) -> Result<Option<NetSeed>, SearchError> {
    let q = ctx.q();
    if (q - 1) % 18 != 0 {
        return Err(SearchError::WrongForm(q));
    }
    let n2 = (q - 1) / 18;
    let n = isqrt_u128(n2 as u128) as u64;
    if n * n != n2 || n % 2 == 0 {
        return Err(SearchError::WrongForm(q));
    }
    if n == 1 {
        return Ok(None);
    }
    let w = 3 * n;
    let x = ctx.g_pow((q - 1) / w);

    // coset members of C^{3n}_i by dlog residue, ascending by dlog
    let members: Vec<Vec<Elem>> = (0..w)
        .map(|i| (0..q - 1).filter(|m| m % w == i).map(|m| ctx.g_pow(m)).collect())
        .collect();

    let free_hi = (w - 3) as usize;
    let xi: Vec<Elem> = (0..w).map(|i| ctx.pow(x, i)).collect();
    let xin: Vec<Elem> = xi.iter().map(|&e| ctx.inv(e).unwrap()).collect();

    let (a, b, c) = (free_hi, free_hi + 1, free_hi + 2);
    let m3 = [
        [Elem(1), Elem(1), Elem(1)],
        [xi[a], xi[b], xi[c]],
        [xin[a], xin[b], xin[c]],
    ];
    let det = det3(ctx, &m3);
    assert!(
        det != Elem(0),
        "closing system is singular at q = {q}; unsupported"
    );
    let inv = inv3(ctx, &m3, det);

    let check_and_build = |prefix: &[Elem]| -> Option<NetSeed> {
        let mut sum = Elem(0);
        let mut sig = Elem(0);
        let mut sigp = Elem(0);
        for (i, &y) in prefix.iter().enumerate() {
            sum = ctx.add(sum, y);
            sig = ctx.add(sig, ctx.mul(xi[i], y));
            sigp = ctx.add(sigp, ctx.mul(xin[i], y));
        }
        let rhs = [ctx.neg(sum), ctx.neg(sig), ctx.neg(sigp)];
        let mut tail = [Elem(0); 3];
        for (r, out_r) in tail.iter_mut().enumerate() {
            let mut acc = Elem(0);
            for (cc, &rhs_c) in rhs.iter().enumerate() {
                acc = ctx.add(acc, ctx.mul(inv[r][cc], rhs_c));
            }
            *out_r = acc;
        }
        for (off, &y) in tail.iter().enumerate() {
            if y == Elem(0) || ctx.dlog(y).unwrap() % w != (free_hi + off) as u64 {
                return None;
            }
        }
        let mut y: Vec<Elem> = prefix.to_vec();
        y.extend_from_slice(&tail);
        let seed = NetSeed { x, y };
        check_net_seed(ctx, &seed).ok()?;
        Some(seed)
    };

    match strategy {
        NetSeedStrategy::Backtrack => {
            let sizes: Vec<usize> = (1..free_hi).map(|i| members[i].len()).collect();
            let mut idx = vec![0usize; sizes.len()];
            let mut prefix: Vec<Elem> = vec![Elem(1); free_hi];
            loop {
                for (i, &ix) in idx.iter().enumerate() {
                    prefix[i + 1] = members[i + 1][ix];
                }
                if let Some(seed) = check_and_build(&prefix) {
                    return Ok(Some(seed));
                }
                let mut pos = idx.len();
                loop {
                    if pos == 0 {
                        return Ok(None);
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < sizes[pos] {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        NetSeedStrategy::Randomized { seed, max_iters } => {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut prefix: Vec<Elem> = vec![Elem(1); free_hi];
            for _ in 0..max_iters {
                for i in 1..free_hi {
                    prefix[i] = members[i][rng.gen_range(0..members[i].len())];
                }
                if let Some(s) = check_and_build(&prefix) {
                    return Ok(Some(s));
                }
            }
            Ok(None)
        }
    }
}

fn det3(ctx: &FieldCtx, m: &[[Elem; 3]; 3]) -> Elem {
    let t1 = ctx.mul(
        m[0][0],
        ctx.sub(ctx.mul(m[1][1], m[2][2]), ctx.mul(m[1][2], m[2][1])),
    );
    let t2 = ctx.mul(
        m[0][1],
        ctx.sub(ctx.mul(m[1][0], m[2][2]), ctx.mul(m[1][2], m[2][0])),
    );
    let t3 = ctx.mul(
        m[0][2],
        ctx.sub(ctx.mul(m[1][0], m[2][1]), ctx.mul(m[1][1], m[2][0])),
    );
    ctx.add(ctx.sub(t1, t2), t3)
}

fn inv3(ctx: &FieldCtx, m: &[[Elem; 3]; 3], det: Elem) -> [[Elem; 3]; 3] {
    let di = ctx.inv(det).expect("nonzero determinant");
    let cof = |r1: usize, c1: usize, r2: usize, c2: usize| {
        ctx.sub(ctx.mul(m[r1][c1], m[r2][c2]), ctx.mul(m[r1][c2], m[r2][c1]))
    };
    let adj = [
        [cof(1, 1, 2, 2), ctx.neg(cof(0, 1, 2, 2)), cof(0, 1, 1, 2)],
        [
            ctx.neg(cof(1, 0, 2, 2)),
            cof(0, 0, 2, 2),
            ctx.neg(cof(0, 0, 1, 2)),
        ],
        [cof(1, 0, 2, 1), ctx.neg(cof(0, 0, 2, 1)), cof(0, 0, 1, 1)],
    ];
    let mut out = [[Elem(0); 3]; 3];
    for (r, row) in adj.iter().enumerate() {
        for (c, &val) in row.iter().enumerate() {
            out[r][c] = ctx.mul(val, di);
        }
    }
    out
}
