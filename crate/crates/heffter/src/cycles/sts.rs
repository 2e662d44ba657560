//! Steiner triple systems: validation, exhaustive and randomized generation,
//! near-1-factorizations, and the two equivalent formulations of
//! super-orthogonality.

use super::CycleError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const NO_THIRD: u16 = u16::MAX;

/// A Steiner triple system on points 0..v: every pair of points lies in
/// exactly one triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sts {
    v: usize,
    triples: Vec<[u8; 3]>,
    /// third[a*v + b] completes the pair {a, b}.
    third: Vec<u16>,
}

impl Sts {
    pub fn new(v: usize, mut triples: Vec<[u8; 3]>) -> Result<Sts, CycleError> {
        for t in &mut triples {
            t.sort_unstable();
        }
        triples.sort_unstable();
        let mut third = vec![NO_THIRD; v * v];
        for t in &triples {
            let [a, b, c] = *t;
            if a == b || b == c {
                return Err(CycleError::NotAnSts(format!("degenerate triple {t:?}")));
            }
            if c as usize >= v {
                return Err(CycleError::NotAnSts(format!("point {c} out of range")));
            }
            for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
                let idx = x as usize * v + y as usize;
                if third[idx] != NO_THIRD {
                    return Err(CycleError::NotAnSts(format!(
                        "pair {{{x},{y}}} covered twice"
                    )));
                }
                third[idx] = z as u16;
                third[y as usize * v + x as usize] = z as u16;
            }
        }
        for a in 0..v {
            for b in a + 1..v {
                if third[a * v + b] == NO_THIRD {
                    return Err(CycleError::NotAnSts(format!("pair {{{a},{b}}} uncovered")));
                }
            }
        }
        Ok(Sts { v, triples, third })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn triples(&self) -> &[[u8; 3]] {
        &self.triples
    }

    /// The point completing the pair {a, b} into a triple.
    pub fn third(&self, a: u8, b: u8) -> u8 {
        self.third[a as usize * self.v + b as usize] as u8
    }

    /// The near-1-factor N(x): all pairs {y, z} with {x, y, z} a triple.
    pub fn near_factor(&self, x: u8) -> Vec<(u8, u8)> {
        let mut out = Vec::with_capacity((self.v - 1) / 2);
        for t in &self.triples {
            if t.contains(&x) {
                let rest: Vec<u8> = t.iter().copied().filter(|&p| p != x).collect();
                out.push((rest[0], rest[1]));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn contains_triple(&self, t: &[u8; 3]) -> bool {
        let mut s = *t;
        s.sort_unstable();
        self.triples.binary_search(&s).is_ok()
    }

    pub fn is_disjoint(&self, other: &Sts) -> bool {
        self.triples.iter().all(|t| !other.contains_triple(t))
    }
}

/// Both formulations of super-orthogonality, computed independently.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SuperOrthReport {
    /// no common triple
    pub disjoint: bool,
    /// distinct pairs through a common point never complete to the same point
    /// in the other system
    pub implication: bool,
    /// every near-1-factor of one meets every near-1-factor of the other in
    /// at most one pair
    pub factor_bound: bool,
}

impl SuperOrthReport {
    pub fn super_orthogonal(&self) -> bool {
        self.disjoint && self.implication
    }
}

/// Check super-orthogonality of two Steiner triple systems on the same point
/// set. The implication form and the near-1-factor form are both evaluated;
/// they are equivalent, which the test suites assert on every checked pair.
pub fn sts_super_orthogonal(a: &Sts, b: &Sts) -> Result<SuperOrthReport, CycleError> {
    if a.v != b.v {
        return Err(CycleError::VertexSetMismatch);
    }
    let v = a.v;
    let disjoint = a.is_disjoint(b);

    // formulation 1: {u,v,p},{x,y,p} in A and {u,v,w},{x,y,z} in B => w != z
    let mut implication = true;
    'imp: for p in 0..v as u8 {
        let pairs = a.near_factor(p);
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let w = b.third(pairs[i].0, pairs[i].1);
                let z = b.third(pairs[j].0, pairs[j].1);
                if w == z {
                    implication = false;
                    break 'imp;
                }
            }
        }
    }

    // formulation 2: |N_a(p) intersect N_b(c)| <= 1 for all points p, c
    let pair_id = |x: u8, y: u8| -> usize {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        lo as usize * v + hi as usize
    };
    let words = (v * v + 63) / 64;
    let mask = |s: &Sts, x: u8| -> Vec<u64> {
        let mut m = vec![0u64; words];
        for (p, q) in s.near_factor(x) {
            let id = pair_id(p, q);
            m[id / 64] |= 1 << (id % 64);
        }
        m
    };
    let a_masks: Vec<Vec<u64>> = (0..v as u8).map(|x| mask(a, x)).collect();
    let b_masks: Vec<Vec<u64>> = (0..v as u8).map(|x| mask(b, x)).collect();
    let mut factor_bound = true;
    'fac: for am in &a_masks {
        for bm in &b_masks {
            let shared: u32 = am
                .iter()
                .zip(bm)
                .map(|(x, y)| (x & y).count_ones())
                .sum();
            if shared > 1 {
                factor_bound = false;
                break 'fac;
            }
        }
    }

    Ok(SuperOrthReport {
        disjoint,
        implication,
        factor_bound,
    })
}

/// Every Steiner triple system on the labeled point set 0..v, by backtracking
/// over the least uncovered pair. (840 systems at v = 9.)
pub fn enumerate_all(v: usize) -> Vec<Sts> {
    assert!(v % 6 == 1 || v % 6 == 3, "admissible orders only");
    let mut covered = vec![false; v * v];
    let mut triples: Vec<[u8; 3]> = Vec::new();
    let mut out: Vec<Sts> = Vec::new();
    let target = v * (v - 1) / 6;

    fn rec(
        v: usize,
        target: usize,
        covered: &mut Vec<bool>,
        triples: &mut Vec<[u8; 3]>,
        out: &mut Vec<Sts>,
    ) {
        if triples.len() == target {
            out.push(Sts::new(v, triples.clone()).expect("construction maintains the invariant"));
            return;
        }
        // least uncovered pair (a, b)
        let mut pair = None;
        'find: for a in 0..v {
            for b in a + 1..v {
                if !covered[a * v + b] {
                    pair = Some((a, b));
                    break 'find;
                }
            }
        }
        let (a, b) = pair.expect("incomplete system has an uncovered pair");
        // any completion c > b (a smaller c would leave a lexicographically
        // smaller uncovered pair, contradicting minimality of (a, b))
        for c in b + 1..v {
            if covered[a * v + c] || covered[b * v + c] {
                continue;
            }
            for (x, y) in [(a, b), (a, c), (b, c)] {
                covered[x * v + y] = true;
            }
            triples.push([a as u8, b as u8, c as u8]);
            rec(v, target, covered, triples, out);
            triples.pop();
            for (x, y) in [(a, b), (a, c), (b, c)] {
                covered[x * v + y] = false;
            }
        }
    }

    rec(v, target, &mut covered, &mut triples, &mut out);
    out
}

/// A random Steiner triple system by hill climbing: repeatedly pick a live
/// point and two of its uncovered partners; either the third pair is free and
/// a triple is added, or the triple covering it is swapped out.
pub fn random_sts(v: usize, rng: &mut ChaCha8Rng) -> Sts {
    assert!(v % 6 == 1 || v % 6 == 3, "admissible orders only");
    let target = v * (v - 1) / 6;
    loop {
        let mut third: Vec<u16> = vec![NO_THIRD; v * v];
        let mut count = 0usize;
        let mut steps = 0u64;
        let budget = 200_000u64;
        while count < target && steps < budget {
            steps += 1;
            let x = rng.gen_range(0..v);
            let free: Vec<usize> = (0..v)
                .filter(|&y| y != x && third[x * v + y] == NO_THIRD)
                .collect();
            if free.len() < 2 {
                continue;
            }
            let yi = rng.gen_range(0..free.len());
            let mut zi = rng.gen_range(0..free.len() - 1);
            if zi >= yi {
                zi += 1;
            }
            let (y, z) = (free[yi], free[zi]);
            let add = |third: &mut Vec<u16>, a: usize, b: usize, c: usize| {
                third[a * v + b] = c as u16;
                third[b * v + a] = c as u16;
                third[a * v + c] = b as u16;
                third[c * v + a] = b as u16;
                third[b * v + c] = a as u16;
                third[c * v + b] = a as u16;
            };
            if third[y * v + z] == NO_THIRD {
                add(&mut third, x, y, z);
                count += 1;
            } else {
                // swap: remove the triple {y, z, w}, insert {x, y, z}
                let w = third[y * v + z] as usize;
                for (p, q) in [(y, z), (y, w), (z, w)] {
                    third[p * v + q] = NO_THIRD;
                    third[q * v + p] = NO_THIRD;
                }
                add(&mut third, x, y, z);
            }
        }
        if count == target {
            let mut triples = Vec::with_capacity(target);
            for a in 0..v {
                for b in a + 1..v {
                    let c = third[a * v + b] as usize;
                    if c > b {
                        triples.push([a as u8, b as u8, c as u8]);
                    }
                }
            }
            if let Ok(s) = Sts::new(v, triples) {
                return s;
            }
        }
        // rare stall: restart with fresh state
    }
}

/// All cyclic Steiner triple systems on Z_v arising from difference families:
/// partitions of {1..(v-1)/2} into triples {a,b,c} with a+b=c or a+b+c=v,
/// developed modulo v.
pub fn cyclic_sts(v: usize) -> Vec<Sts> {
    let half = (v - 1) / 2;
    if half % 3 != 0 {
        return Vec::new();
    }
    let mut used = vec![false; half + 1];
    let mut bases: Vec<(usize, usize)> = Vec::new(); // base block {0, a, a+b}
    let mut out: Vec<Sts> = Vec::new();

    fn rec(
        v: usize,
        half: usize,
        used: &mut Vec<bool>,
        bases: &mut Vec<(usize, usize)>,
        out: &mut Vec<Sts>,
    ) {
        let a = match (1..=half).find(|&d| !used[d]) {
            Some(d) => d,
            None => {
                // develop the base blocks
                let mut triples = Vec::with_capacity(v * bases.len());
                for &(x, y) in bases.iter() {
                    for g in 0..v {
                        triples.push([
                            g as u8,
                            ((x + g) % v) as u8,
                            ((y + g) % v) as u8,
                        ]);
                    }
                }
                if let Ok(s) = Sts::new(v, triples) {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
                return;
            }
        };
        for b in a + 1..=half {
            if used[b] {
                continue;
            }
            for c in b + 1..=half {
                if used[c] {
                    continue;
                }
                if a + b == c || a + b + c == v {
                    used[a] = true;
                    used[b] = true;
                    used[c] = true;
                    // orient so the differences of {0, a, a+b} are {a, b, c}
                    bases.push((a, a + b));
                    rec(v, half, used, bases, out);
                    bases.pop();
                    used[a] = false;
                    used[b] = false;
                    used[c] = false;
                }
            }
        }
    }

    rec(v, half, &mut used, &mut bases, &mut out);
    out
}

/// Find a verified super-orthogonal pair of STS(v). Cyclic systems are tried
/// pairwise first (deterministic); if none qualify, random systems are
/// hill-climbed against the first cyclic system.
pub fn find_super_orthogonal_pair(v: usize, seed: u64) -> Option<(Sts, Sts)> {
    let cyc = cyclic_sts(v);
    for i in 0..cyc.len() {
        for j in i + 1..cyc.len() {
            let rep = sts_super_orthogonal(&cyc[i], &cyc[j]).expect("same order");
            if rep.super_orthogonal() {
                return Some((cyc[i].clone(), cyc[j].clone()));
            }
        }
    }
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = cyc
        .first()
        .cloned()
        .unwrap_or_else(|| random_sts(v, &mut rng));
    for _ in 0..100_000 {
        let cand = random_sts(v, &mut rng);
        let rep = sts_super_orthogonal(&first, &cand).expect("same order");
        if rep.super_orthogonal() {
            return Some((first, cand));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn fano_plane_valid() {
        let fano = Sts::new(
            7,
            vec![
                [0, 1, 2],
                [0, 3, 4],
                [0, 5, 6],
                [1, 3, 5],
                [1, 4, 6],
                [2, 3, 6],
                [2, 4, 5],
            ],
        )
        .unwrap();
        assert_eq!(fano.third(0, 1), 2);
        assert_eq!(fano.near_factor(0), vec![(1, 2), (3, 4), (5, 6)]);
        let rep = sts_super_orthogonal(&fano, &fano).unwrap();
        assert!(!rep.disjoint);
        assert!(!rep.super_orthogonal());
    }

    #[test]
    fn invalid_sts_rejected() {
        assert!(matches!(
            Sts::new(7, vec![[0, 1, 2]; 7]),
            Err(CycleError::NotAnSts(_))
        ));
    }

    #[test]
    fn sts7_count() {
        // 30 labeled Steiner triple systems on 7 points
        assert_eq!(enumerate_all(7).len(), 30);
    }

    #[test]
    fn random_sts_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for v in [7, 9, 13] {
            let s = random_sts(v, &mut rng);
            assert_eq!(s.v(), v);
            assert_eq!(s.triples().len(), v * (v - 1) / 6);
        }
    }

    #[test]
    fn cyclic_sts_exist_at_19() {
        let all = cyclic_sts(19);
        assert!(!all.is_empty());
        for s in &all {
            assert_eq!(s.triples().len(), 57);
        }
    }
}
