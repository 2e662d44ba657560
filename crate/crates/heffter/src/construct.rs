//! Deterministic constructions: partial-partition spaces from coset families,
//! development of Heffter difference packings into spaces, root-of-unity nets
//! over GF(18n^2+1), and the slope-labeled net over GF(3^5).

use crate::designs::{verify_heffter_space, DesignError, HeffterSpace, OrderedBlock, SpaceClass};
use crate::field::{Elem, FieldCtx, FieldError};
use crate::search::{verify_packing, DifferencePacking, SearchError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("sizes {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("product of sizes is {product}, expected the half-set size {expected}")]
    WrongProduct { product: u64, expected: u64 },
    #[error("construction needs q = 3 (mod 4); here q = {0}")]
    WrongCongruence(u64),
    #[error("invalid difference packing: {0}")]
    InvalidPacking(String),
    #[error("extension needs a constant block size; found sizes {0:?}")]
    NotConstantBlockSize(Vec<usize>),
    #[error("net seed invariant violated: {0}")]
    SeedInvariantViolated(SeedDefect),
    #[error("slope identity violated at slope {0}")]
    IdentityViolated(Slope),
    #[error("labeling defect: {0}")]
    LabelingDefect(String),
    #[error("constructed object failed verification: {0}")]
    OutputInvalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// greatest common divisor
fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn verified(ctx: &FieldCtx, space: HeffterSpace) -> Result<HeffterSpace, ConstructError> {
    let report = verify_heffter_space(ctx, &space);
    if report.valid() {
        Ok(space)
    } else {
        Err(ConstructError::OutputInvalid(
            report
                .violations
                .first()
                .map(|v| v.to_string())
                .unwrap_or_default(),
        ))
    }
}

/// The coset construction: for pairwise coprime odd sizes with product
/// (q-1)/2, each class consists of the cosets of the k_i-th roots of unity
/// inside the nonzero squares.
pub fn partial_partition_space(
    ctx: &FieldCtx,
    sizes: &[u64],
) -> Result<HeffterSpace, ConstructError> {
    let q = ctx.q();
    if q % 4 != 3 {
        return Err(ConstructError::WrongCongruence(q));
    }
    let v = ctx.half_order();
    for (i, &a) in sizes.iter().enumerate() {
        for &b in &sizes[i + 1..] {
            if gcd(a, b) != 1 {
                return Err(ConstructError::NotCoprime(a, b));
            }
        }
    }
    let product: u64 = sizes.iter().product();
    if product != v {
        return Err(ConstructError::WrongProduct {
            product,
            expected: v,
        });
    }
    let halfset = ctx.squares_halfset()?;
    let w = ctx.pow(ctx.generator(), 2); // generates the squares
    let mut classes = Vec::with_capacity(sizes.len());
    for (ci, &k) in sizes.iter().enumerate() {
        // k-th roots of unity, enumerated as powers of g^((q-1)/k)
        let root = ctx.g_pow((q - 1) / k);
        let subgroup: Vec<Elem> = (0..k).map(|j| ctx.pow(root, j)).collect();
        let mut blocks = Vec::with_capacity((v / k) as usize);
        let mut rep = Elem(1);
        for _ in 0..v / k {
            let block: Vec<Elem> = subgroup.iter().map(|&s| ctx.mul(s, rep)).collect();
            blocks.push(OrderedBlock::new(block)?);
            rep = ctx.mul(rep, w);
        }
        classes.push(SpaceClass {
            name: format!("P{}", ci + 1),
            blocks,
        });
    }
    verified(ctx, HeffterSpace::new(halfset, classes))
}

/// Develop a verified Heffter difference packing into a Heffter space.
///
/// For a ruler of size k: the subgroup S of index k in the squares is
/// enumerated as powers of g^(2k); the transversal T is the first k powers of
/// g^2; class (ruler, t) holds the blocks B*s*t for s in S. Each block keeps
/// the order of the ruler sorted ascending by code, scaled; if that sorted
/// ordering is simple the whole space is simple.
pub fn develop_packing(
    ctx: &FieldCtx,
    packing: &DifferencePacking,
) -> Result<HeffterSpace, ConstructError> {
    let q = ctx.q();
    if q % 4 != 3 {
        return Err(ConstructError::WrongCongruence(q));
    }
    let report = verify_packing(ctx, packing)?;
    if !report.valid() {
        let detail = if let Some((i, j, d)) = report.overlap {
            format!("rulers {i} and {j} share the difference exponent {d}")
        } else if let Some(i) = report.internal_repeat {
            format!("ruler {i} has a repeated difference")
        } else {
            let bad = report
                .ruler_reports
                .iter()
                .position(|r| !r.is_heffter_ruler())
                .unwrap();
            format!(
                "ruler {bad} fails: {}",
                report.ruler_reports[bad]
                    .defects
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            )
        };
        return Err(ConstructError::InvalidPacking(detail));
    }

    let v = ctx.half_order();
    let halfset = ctx.squares_halfset()?;
    let g2 = ctx.pow(ctx.generator(), 2);
    let mut classes = Vec::new();
    let mut class_no = 0usize;
    for ruler in &packing.rulers {
        let k = ruler.k() as u64;
        let base = OrderedBlock::new({
            let mut e = ruler.elements().to_vec();
            e.sort_unstable();
            e
        })?;
        let s_gen = ctx.pow(ctx.generator(), 2 * k);
        let subgroup: Vec<Elem> = (0..v / k).map(|j| ctx.pow(s_gen, j)).collect();
        let mut t = Elem(1);
        for _ in 0..k {
            class_no += 1;
            let blocks: Vec<OrderedBlock> = subgroup
                .iter()
                .map(|&s| base.scaled(ctx, ctx.mul(s, t)))
                .collect();
            classes.push(SpaceClass {
                name: format!("P{class_no}"),
                blocks,
            });
            t = ctx.mul(t, g2);
        }
    }
    verified(ctx, HeffterSpace::new(halfset, classes))
}

/// Append the parallel class of cosets of the index-k subgroup of the squares
/// to a constant-size-k space developed from a packing. The result is still a
/// partial linear space (re-verified).
pub fn extend_with_cosets(
    ctx: &FieldCtx,
    space: &HeffterSpace,
) -> Result<HeffterSpace, ConstructError> {
    let sizes: Vec<usize> = space
        .classes
        .iter()
        .flat_map(|c| c.blocks.iter().map(|b| b.len()))
        .collect();
    let k = match sizes.first() {
        Some(&k) if sizes.iter().all(|&s| s == k) => k as u64,
        _ => {
            let mut distinct = sizes;
            distinct.sort_unstable();
            distinct.dedup();
            return Err(ConstructError::NotConstantBlockSize(distinct));
        }
    };
    let v = ctx.half_order();
    let g2 = ctx.pow(ctx.generator(), 2);
    let s_gen = ctx.pow(ctx.generator(), 2 * k);
    let subgroup: Vec<Elem> = (0..v / k).map(|j| ctx.pow(s_gen, j)).collect();
    let mut blocks = Vec::with_capacity(k as usize);
    let mut t = Elem(1);
    for _ in 0..k {
        let block: Vec<Elem> = subgroup.iter().map(|&s| ctx.mul(s, t)).collect();
        blocks.push(OrderedBlock::new(block)?);
        t = ctx.mul(t, g2);
    }
    let mut classes = space.classes.clone();
    classes.push(SpaceClass {
        name: "C".into(),
        blocks,
    });
    verified(ctx, HeffterSpace::new(space.halfset.clone(), classes))
}

/// Seed data for the (9n^2, 3n; 4) net construction: a primitive 3n-th root
/// of unity x and a zero-sum coset transversal Y with both twisted sums null.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetSeed {
    pub x: Elem,
    pub y: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedDefect {
    WrongForm { q: u64 },
    XOrder { expected: u64, found: u64 },
    NotTransversal,
    YSum(Elem),
    Sigma(Elem),
    SigmaPrime(Elem),
}

impl std::fmt::Display for SeedDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedDefect::WrongForm { q } => {
                write!(f, "q = {q} is not 18n^2+1 with n odd matching |Y|")
            }
            SeedDefect::XOrder { expected, found } => {
                write!(f, "x has order {found}, expected {expected}")
            }
            SeedDefect::NotTransversal => {
                write!(f, "Y does not hit every coset of C^(3n) exactly once")
            }
            SeedDefect::YSum(s) => write!(f, "sum of Y is {s}, not zero"),
            SeedDefect::Sigma(s) => write!(f, "sigma = {s}, not zero"),
            SeedDefect::SigmaPrime(s) => write!(f, "sigma' = {s}, not zero"),
        }
    }
}

/// Validate all net seed invariants; returns n on success.
pub fn check_net_seed(ctx: &FieldCtx, seed: &NetSeed) -> Result<u64, ConstructError> {
    let q = ctx.q();
    let w = seed.y.len() as u64; // 3n
    let n = w / 3;
    if n == 0 || 3 * n != w || n % 2 == 0 || 18 * n * n + 1 != q {
        return Err(ConstructError::SeedInvariantViolated(SeedDefect::WrongForm {
            q,
        }));
    }
    if seed.x == Elem(0) || ctx.order_of(seed.x) != w {
        return Err(ConstructError::SeedInvariantViolated(SeedDefect::XOrder {
            expected: w,
            found: if seed.x == Elem(0) {
                0
            } else {
                ctx.order_of(seed.x)
            },
        }));
    }
    let mut hit = vec![false; w as usize];
    for &y in &seed.y {
        if y == Elem(0) {
            return Err(ConstructError::SeedInvariantViolated(
                SeedDefect::NotTransversal,
            ));
        }
        let r = (ctx.dlog(y).unwrap() % w) as usize;
        if hit[r] {
            return Err(ConstructError::SeedInvariantViolated(
                SeedDefect::NotTransversal,
            ));
        }
        hit[r] = true;
    }
    let ysum = seed.y.iter().fold(Elem(0), |acc, &y| ctx.add(acc, y));
    if ysum != Elem(0) {
        return Err(ConstructError::SeedInvariantViolated(SeedDefect::YSum(
            ysum,
        )));
    }
    let mut sigma = Elem(0);
    let mut sigma_p = Elem(0);
    for (i, &y) in seed.y.iter().enumerate() {
        sigma = ctx.add(sigma, ctx.mul(ctx.pow(seed.x, i as u64), y));
        let xi_inv = ctx.inv(ctx.pow(seed.x, i as u64)).unwrap();
        sigma_p = ctx.add(sigma_p, ctx.mul(xi_inv, y));
    }
    if sigma != Elem(0) {
        return Err(ConstructError::SeedInvariantViolated(SeedDefect::Sigma(
            sigma,
        )));
    }
    if sigma_p != Elem(0) {
        return Err(ConstructError::SeedInvariantViolated(
            SeedDefect::SigmaPrime(sigma_p),
        ));
    }
    Ok(n)
}

/// The labeling matrix (x^i y_j), row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMatrix {
    pub size: usize,
    entries: Vec<Elem>,
}

impl LabelMatrix {
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Plain text: one row per line, space-separated element codes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.size {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Coefficient-vector display, constant term first, matching the printed
    /// form of extension-field matrices.
    pub fn to_coeff_text(&self, ctx: &FieldCtx) -> String {
        let mut out = String::new();
        for i in 0..self.size {
            let row: Vec<String> = self.row(i).iter().map(|&e| ctx.coeff_string(e)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn label_matrix(ctx: &FieldCtx, x: Elem, y: &[Elem]) -> LabelMatrix {
    let size = y.len();
    let mut entries = Vec::with_capacity(size * size);
    let mut xi = Elem(1);
    for _ in 0..size {
        for &yj in y {
            entries.push(ctx.mul(xi, yj));
        }
        xi = ctx.mul(xi, x);
    }
    LabelMatrix { size, entries }
}

/// Build the (9n^2, 3n; 4) Heffter net from a validated seed. The four
/// parallel classes are the rows, right diagonals, left diagonals, and
/// columns of the labeling matrix (x^i y_j).
pub fn net_via_roots(
    ctx: &FieldCtx,
    seed: &NetSeed,
) -> Result<(HeffterSpace, LabelMatrix), ConstructError> {
    check_net_seed(ctx, seed)?;
    let w = seed.y.len();
    let m = label_matrix(ctx, seed.x, &seed.y);

    let rows: Vec<OrderedBlock> = (0..w)
        .map(|i| OrderedBlock::new(m.row(i).to_vec()))
        .collect::<Result<_, _>>()?;
    let rdiag: Vec<OrderedBlock> = (0..w)
        .map(|j| OrderedBlock::new((0..w).map(|i| m.get(i, (j + i) % w)).collect()))
        .collect::<Result<_, _>>()?;
    let ldiag: Vec<OrderedBlock> = (0..w)
        .map(|j| OrderedBlock::new((0..w).map(|i| m.get(i, (j + w - i) % w)).collect()))
        .collect::<Result<_, _>>()?;
    let cols: Vec<OrderedBlock> = (0..w)
        .map(|j| OrderedBlock::new((0..w).map(|i| m.get(i, j)).collect()))
        .collect::<Result<_, _>>()?;

    let mut points: Vec<Elem> = m.entries.clone();
    points.sort_unstable();
    let halfset = ctx.validate_halfset(&points)?;
    let classes = vec![
        SpaceClass {
            name: "rows".into(),
            blocks: rows,
        },
        SpaceClass {
            name: "rdiag".into(),
            blocks: rdiag,
        },
        SpaceClass {
            name: "ldiag".into(),
            blocks: ldiag,
        },
        SpaceClass {
            name: "cols".into(),
            blocks: cols,
        },
    ];
    let space = verified(ctx, HeffterSpace::new(halfset, classes))?;
    Ok((space, m))
}

/// A line slope of AG(2,11): finite or infinite.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slope {
    Finite(u64),
    Infinity,
}

impl std::fmt::Display for Slope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Slope::Finite(s) => write!(f, "{s}"),
            Slope::Infinity => write!(f, "inf"),
        }
    }
}

/// The GF(3^5) slope labeling: x = g^22 (an 11th root of unity), an 11-tuple
/// Y of powers of g hitting every coset of C^11, and the slope set S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeLabeling {
    pub y: Vec<Elem>,
    pub slopes: Vec<Slope>,
}

/// Build the (121, 11; r) Heffter net over GF(3^5) whose classes are the
/// images of the AG(2,11) line classes with slopes in S under
/// f(i,j) = x^i y_j.
pub fn net_ag2_11(
    ctx: &FieldCtx,
    labeling: &SlopeLabeling,
) -> Result<(HeffterSpace, LabelMatrix), ConstructError> {
    if ctx.q() != 243 {
        return Err(ConstructError::LabelingDefect(format!(
            "slope labeling lives over GF(3^5); here q = {}",
            ctx.q()
        )));
    }
    if labeling.y.len() != 11 {
        return Err(ConstructError::LabelingDefect(format!(
            "Y must have 11 entries, found {}",
            labeling.y.len()
        )));
    }
    let x = ctx.pow(ctx.generator(), 22);
    let y = &labeling.y;

    // Y is a transversal of the cosets of C^11: dlogs distinct mod 11
    let mut hit = [false; 11];
    for &yj in y {
        if yj == Elem(0) {
            return Err(ConstructError::LabelingDefect("zero entry in Y".into()));
        }
        let r = (ctx.dlog(yj).unwrap() % 11) as usize;
        if hit[r] {
            return Err(ConstructError::LabelingDefect(
                "Y dlogs collide mod 11".into(),
            ));
        }
        hit[r] = true;
    }

    // slope identities: sum_i x^i y_{si} = 0 for finite s != 0 in S,
    // sum of Y = 0 for the infinite slope, zero-sum of <x> for slope 0
    for &slope in &labeling.slopes {
        let ok = match slope {
            Slope::Infinity => y.iter().fold(Elem(0), |acc, &e| ctx.add(acc, e)) == Elem(0),
            Slope::Finite(0) => {
                (0..11).fold(Elem(0), |acc, i| ctx.add(acc, ctx.pow(x, i))) == Elem(0)
            }
            Slope::Finite(s) => {
                let mut acc = Elem(0);
                for i in 0..11u64 {
                    let idx = (s * i % 11) as usize;
                    acc = ctx.add(acc, ctx.mul(ctx.pow(x, i), y[idx]));
                }
                acc == Elem(0)
            }
        };
        if !ok {
            return Err(ConstructError::IdentityViolated(slope));
        }
    }

    let m = label_matrix(ctx, x, y);
    let mut classes = Vec::with_capacity(labeling.slopes.len());
    for &slope in &labeling.slopes {
        let blocks: Vec<OrderedBlock> = match slope {
            Slope::Infinity => (0..11)
                .map(|i| OrderedBlock::new(m.row(i).to_vec()))
                .collect::<Result<_, _>>()?,
            Slope::Finite(s) => (0..11u64)
                .map(|j| {
                    OrderedBlock::new(
                        (0..11u64)
                            .map(|i| m.get(i as usize, ((s * i + j) % 11) as usize))
                            .collect(),
                    )
                })
                .collect::<Result<_, _>>()?,
        };
        classes.push(SpaceClass {
            name: format!("P{slope}"),
            blocks,
        });
    }
    let mut points: Vec<Elem> = m.entries.clone();
    points.sort_unstable();
    let halfset = ctx.validate_halfset(&points)?;
    let space = verified(ctx, HeffterSpace::new(halfset, classes))?;
    Ok((space, m))
}

/// Published seeds and labelings, pinned to the canonical field contexts.
pub mod builtin {
    use super::{NetSeed, Slope, SlopeLabeling};
    use crate::field::{Elem, FieldCtx};

    /// GF(3^5) with the primitive modulus z^5 + 2z^4 + 1; the canonical
    /// generator is the root z, satisfying g^5 = g^4 + 2.
    pub fn gf243() -> FieldCtx {
        FieldCtx::build(3, 5, Some(&[1, 0, 0, 0, 2, 1]), None).expect("pinned modulus is primitive")
    }

    /// The (81, 9; 4) net seed over Z_163: x = 40.
    pub fn net_seed_163(_ctx: &FieldCtx) -> NetSeed {
        NetSeed {
            x: Elem(40),
            y: [1u64, 2, 160, 142, 119, 84, 36, 128, 143]
                .iter()
                .map(|&c| Elem(c))
                .collect(),
        }
    }

    /// The (441, 21; 4) net seed over Z_883: x = 729, Y = (2^0..2^13, ...).
    pub fn net_seed_883(ctx: &FieldCtx) -> NetSeed {
        let mut y: Vec<Elem> = Vec::with_capacity(21);
        let mut p = Elem(1);
        for _ in 0..14 {
            y.push(p);
            p = ctx.mul(p, Elem(2));
        }
        y.extend([490u64, 97, 60, 72, 483, 680, 278].iter().map(|&c| Elem(c)));
        NetSeed { x: Elem(729), y }
    }

    /// The (729, 27; 4) net seed over Z_1459: x = 1080, Y = (3^0..3^19, ...).
    pub fn net_seed_1459(ctx: &FieldCtx) -> NetSeed {
        let mut y: Vec<Elem> = Vec::with_capacity(27);
        let mut p = Elem(1);
        for _ in 0..20 {
            y.push(p);
            p = ctx.mul(p, Elem(3));
        }
        y.extend(
            [546u64, 597, 652, 1307, 1386, 467, 1338]
                .iter()
                .map(|&c| Elem(c)),
        );
        NetSeed { x: Elem(1080), y }
    }

    /// The published slope labeling of the (121, 11; 9) net over GF(3^5):
    /// Y = (g^0, g^1, g^18, g^3, g^81, g^27, g^54, g^162, g^6, g^9, g^2) and
    /// S = {0, 1, 2, 3, 5, 7, 9, 10, inf}.
    pub fn ag211_labeling(ctx: &FieldCtx) -> SlopeLabeling {
        let g = ctx.generator();
        let exps = [0u64, 1, 18, 3, 81, 27, 54, 162, 6, 9, 2];
        SlopeLabeling {
            y: exps.iter().map(|&e| ctx.pow(g, e)).collect(),
            slopes: [0u64, 1, 2, 3, 5, 7, 9, 10]
                .iter()
                .map(|&s| Slope::Finite(s))
                .chain(std::iter::once(Slope::Infinity))
                .collect(),
        }
    }
}
