//! Exact arithmetic in GF(p^n) with full discrete-log tables, cyclotomic
//! classes, roots of unity, and half-sets.
//!
//! Every element is identified by its *code*: the coefficient vector
//! (c0, ..., c_{n-1}) of the element in the basis {1, z, ..., z^{n-1}} is
//! packed as `sum c_i * p^i`, constant term least significant. For prime
//! fields the code is the residue itself.

use thiserror::Error;

/// A field element, identified by its canonical code in `[0, q)`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Elem(pub u64);

impl std::fmt::Display for Elem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not irreducible over GF({0})")]
    NotIrreducible(u64),
    #[error("modulus is not primitive (its root does not generate the multiplicative group)")]
    NotPrimitivePolynomial,
    #[error("element {0} is not primitive in GF({1})")]
    NotPrimitiveElement(u64, u64),
    #[error("bad modulus: expected a monic polynomial of degree {expected} over GF({p})")]
    BadModulus { expected: u32, p: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete logarithm of zero")]
    ZeroArgument,
    #[error("element code {0} is out of range for a field of order {1}")]
    CodeOutOfRange(u64, u64),
    #[error("{0} does not divide the multiplicative group order {1}")]
    NotADivisor(u64, u64),
    #[error("class index {0} out of range [0, {1})")]
    IndexOutOfRange(u64, u64),
    #[error("not a half-set: contains the opposed pair {{{0}, {1}}}")]
    NotAHalfSet(Elem, Elem),
    #[error("not a half-set: {0}")]
    HalfSetDefect(String),
    #[error("squares form a half-set only for q = 3 (mod 4); here q = {0}")]
    WrongCongruence(u64),
    #[error("half-sets require an odd group order >= 7; here q = {0}")]
    GroupTooSmall(u64),
    #[error("{0} does not generate the group of nonzero squares (order {1} expected)")]
    NotASquareGenerator(u64, u64),
}

/// Parameters of a finite field GF(p^n) together with its canonical
/// primitive element and primitive modulus polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub n: u32,
    pub q: u64,
    /// Coefficients constant term first; length n+1, monic.
    pub modulus: Vec<u64>,
    pub generator: Elem,
}

/// An immutable finite-field context: spec plus exp/log tables.
///
/// Construction is single-threaded; after that the context is read-only and
/// safe to share across threads.
#[derive(Debug)]
pub struct FieldCtx {
    spec: FieldSpec,
    /// exp[m] = g^m for m in [0, q-1).
    exp: Vec<Elem>,
    /// log[code] = m with g^m = code; log[0] is a sentinel.
    log: Vec<u64>,
    /// Prime factors of q - 1, ascending, without multiplicity.
    unit_order_primes: Vec<u64>,
}

const LOG_SENTINEL: u64 = u64::MAX;

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn factor_primes(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

// ---------------------------------------------------------------------------
// Polynomial arithmetic over GF(p), used only while constructing a context.
// Coefficients constant term first, no trailing zeros.

fn poly_trim(c: &mut Vec<u64>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // m is monic of degree >= 1
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let dr = r.len() - 1;
        let shift = dr - dm;
        for i in 0..=dm {
            let sub = (m[i] * lead) % p;
            let idx = shift + i;
            r[idx] = (r[idx] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = poly_rem(a, m, p);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mulmod(&base, &base, m, p);
        }
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // make b monic for poly_rem
        let lead = *b.last().unwrap();
        let inv = mod_inv(lead, p);
        let monic: Vec<u64> = b.iter().map(|&c| (c * inv) % p).collect();
        let r = poly_rem(&a, &monic, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    mod_pow(a, p - 2, p)
}

fn mod_pow(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (a % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    a = acc as u64;
    a
}

/// Is `f` (monic, degree n, constant-first) irreducible over GF(p)?
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let n = (f.len() - 1) as u64;
    if n == 1 {
        return true;
    }
    // x^(p^n) = x (mod f), and gcd(x^(p^(n/r)) - x, f) = 1 for prime r | n.
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    for _ in 0..n {
        xp = poly_powmod(&xp, p, f, p);
    }
    let mut diff = xp.clone();
    // diff = x^(p^n) - x
    while diff.len() < 2 {
        diff.push(0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    for r in factor_primes(n) {
        let d = n / r;
        let mut xpd = x.clone();
        for _ in 0..d {
            xpd = poly_powmod(&xpd, p, f, p);
        }
        let mut diff = xpd;
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        let g = poly_gcd(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Does the root of `f` generate the full multiplicative group of GF(p^n)?
fn poly_root_is_primitive(f: &[u64], p: u64, q: u64) -> bool {
    let x = vec![0u64, 1];
    let e = q - 1;
    if poly_powmod(&x, e, f, p) != vec![1] {
        return false;
    }
    for r in factor_primes(e) {
        if poly_powmod(&x, e / r, f, p) == vec![1] {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------

impl FieldCtx {
    /// Build GF(p^n). `modulus` (constant term first, monic, degree n) and
    /// `generator` may be supplied to pin published data exactly; omitted, the
    /// lexicographically least primitive polynomial and the least primitive
    /// element are chosen.
    pub fn build(
        p: u64,
        n: u32,
        modulus: Option<&[u64]>,
        generator: Option<u64>,
    ) -> Result<FieldCtx, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        assert!(n >= 1, "extension degree must be >= 1");
        let q = p
            .checked_pow(n)
            .filter(|&q| q < (1 << 40))
            .expect("field order out of supported range");

        let modulus = match modulus {
            Some(m) => {
                let m: Vec<u64> = m.iter().map(|&c| c % p).collect();
                if m.len() != n as usize + 1 || m.last() != Some(&1) {
                    return Err(FieldError::BadModulus { expected: n, p });
                }
                if n == 1 {
                    // degree-1 moduli are always irreducible; primitivity of
                    // the root is checked through the generator below
                } else {
                    if !poly_is_irreducible(&m, p) {
                        return Err(FieldError::NotIrreducible(p));
                    }
                    if !poly_root_is_primitive(&m, p, q) {
                        return Err(FieldError::NotPrimitivePolynomial);
                    }
                }
                m
            }
            None if n == 1 => {
                // chosen after the generator; placeholder replaced below
                Vec::new()
            }
            None => {
                Self::least_primitive_modulus(p, n, q).ok_or(FieldError::NotPrimitivePolynomial)?
            }
        };

        if n == 1 {
            let g = match generator {
                Some(g) => {
                    let g = g % p;
                    if !residue_is_primitive(g, p) {
                        return Err(FieldError::NotPrimitiveElement(g, q));
                    }
                    g
                }
                None => (2..p)
                    .find(|&c| residue_is_primitive(c, p))
                    .expect("every prime field has a primitive root"),
            };
            let modulus = if modulus.is_empty() {
                vec![(p - g) % p, 1]
            } else {
                modulus
            };
            let mut ctx = Self::from_tables_prime(p, q, modulus, g);
            ctx.unit_order_primes = factor_primes(q - 1);
            Ok(ctx)
        } else {
            let mut ctx = Self::from_modulus_ext(p, n, q, modulus)?;
            ctx.unit_order_primes = factor_primes(q - 1);
            if let Some(gcode) = generator {
                if gcode >= q {
                    return Err(FieldError::CodeOutOfRange(gcode, q));
                }
                let g = Elem(gcode);
                if gcode == 0 || ctx.order_of(g) != q - 1 {
                    return Err(FieldError::NotPrimitiveElement(gcode, q));
                }
                if g != ctx.spec.generator {
                    ctx.rebase_generator(g);
                }
            }
            Ok(ctx)
        }
    }

    fn least_primitive_modulus(p: u64, n: u32, q: u64) -> Option<Vec<u64>> {
        // lexicographically least on (c0, c1, ..., c_{n-1}), constant first
        let mut coeffs = vec![0u64; n as usize];
        loop {
            let mut f = coeffs.clone();
            f.push(1);
            if f[0] != 0 && poly_is_irreducible(&f, p) && poly_root_is_primitive(&f, p, q) {
                return Some(f);
            }
            // next tuple in lex order: last coordinate varies fastest
            let mut i = n as usize;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
            }
        }
    }

    fn from_tables_prime(p: u64, q: u64, modulus: Vec<u64>, g: u64) -> FieldCtx {
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![LOG_SENTINEL; q as usize];
        let mut cur = 1u64;
        for m in 0..(q - 1) {
            exp.push(Elem(cur));
            log[cur as usize] = m;
            cur = cur * g % p;
        }
        debug_assert_eq!(cur, 1);
        FieldCtx {
            spec: FieldSpec {
                p,
                n: 1,
                q,
                modulus,
                generator: Elem(g),
            },
            exp,
            log,
            unit_order_primes: Vec::new(),
        }
    }

    fn from_modulus_ext(p: u64, n: u32, q: u64, modulus: Vec<u64>) -> Result<FieldCtx, FieldError> {
        // The root z of a primitive modulus is itself primitive, and no
        // constant (code < p) can generate a group of order q-1 > p-1, so z is
        // also the least primitive element by code.
        let g_vec = vec![0u64, 1];
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![LOG_SENTINEL; q as usize];
        let mut cur = vec![1u64];
        for m in 0..(q - 1) {
            let code = poly_to_code(&cur, p);
            exp.push(Elem(code));
            if log[code as usize] != LOG_SENTINEL {
                return Err(FieldError::NotPrimitivePolynomial);
            }
            log[code as usize] = m;
            cur = poly_mulmod(&cur, &g_vec, &modulus, p);
        }
        if cur != vec![1] {
            return Err(FieldError::NotPrimitivePolynomial);
        }
        Ok(FieldCtx {
            spec: FieldSpec {
                p,
                n,
                q,
                modulus,
                generator: Elem(p),
            },
            exp,
            log,
            unit_order_primes: Vec::new(),
        })
    }

    /// Re-index the exp/log tables on a different primitive element.
    fn rebase_generator(&mut self, g: Elem) {
        let q = self.spec.q;
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![LOG_SENTINEL; q as usize];
        let mut cur = Elem(1);
        for m in 0..(q - 1) {
            exp.push(cur);
            log[cur.0 as usize] = m;
            cur = self.mul(cur, g);
        }
        self.exp = exp;
        self.log = log;
        self.spec.generator = g;
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn q(&self) -> u64 {
        self.spec.q
    }

    /// Size of a half-set: (q - 1) / 2.
    pub fn half_order(&self) -> u64 {
        (self.spec.q - 1) / 2
    }

    pub fn generator(&self) -> Elem {
        self.spec.generator
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    pub fn one(&self) -> Elem {
        Elem(1)
    }

    pub fn elem(&self, code: u64) -> Result<Elem, FieldError> {
        if code < self.spec.q {
            Ok(Elem(code))
        } else {
            Err(FieldError::CodeOutOfRange(code, self.spec.q))
        }
    }

    /// Coefficient vector of an element, constant term first, length n.
    pub fn coeffs(&self, a: Elem) -> Vec<u64> {
        let mut c = a.0;
        let mut out = Vec::with_capacity(self.spec.n as usize);
        for _ in 0..self.spec.n {
            out.push(c % self.spec.p);
            c /= self.spec.p;
        }
        out
    }

    /// Coefficient digits concatenated, constant term first, e.g. "10000".
    pub fn coeff_string(&self, a: Elem) -> String {
        self.coeffs(a).iter().map(|d| d.to_string()).collect()
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.spec.p;
        if self.spec.n == 1 {
            return Elem((a.0 + b.0) % p);
        }
        let mut x = a.0;
        let mut y = b.0;
        let mut out = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.spec.n {
            out += (x % p + y % p) % p * mult;
            x /= p;
            y /= p;
            mult *= p;
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.spec.p;
        if self.spec.n == 1 {
            return Elem((p - a.0) % p);
        }
        let mut x = a.0;
        let mut out = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.spec.n {
            out += (p - x % p) % p * mult;
            x /= p;
            mult *= p;
        }
        Elem(out)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem(0);
        }
        let e = self.spec.q - 1;
        let m = (self.log[a.0 as usize] + self.log[b.0 as usize]) % e;
        self.exp[m as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let e = self.spec.q - 1;
        let m = (e - self.log[a.0 as usize]) % e;
        Ok(self.exp[m as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if a.0 == 0 {
            return if e == 0 { Elem(1) } else { Elem(0) };
        }
        let m = self.log[a.0 as usize] as u128 * e as u128 % (self.spec.q - 1) as u128;
        self.exp[m as usize]
    }

    /// a^e for signed e (negative exponents use the inverse; a must be nonzero
    /// when e < 0).
    pub fn pow_signed(&self, a: Elem, e: i64) -> Result<Elem, FieldError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Discrete logarithm with respect to the canonical generator.
    pub fn dlog(&self, a: Elem) -> Result<u64, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroArgument);
        }
        Ok(self.log[a.0 as usize])
    }

    /// g^m, m taken mod q-1.
    pub fn g_pow(&self, m: u64) -> Elem {
        self.exp[(m % (self.spec.q - 1)) as usize]
    }

    pub fn order_of(&self, a: Elem) -> u64 {
        assert!(a.0 != 0, "order of zero is undefined");
        let mut e = self.spec.q - 1;
        let primes = if self.unit_order_primes.is_empty() {
            factor_primes(e)
        } else {
            self.unit_order_primes.clone()
        };
        for r in primes {
            while e % r == 0 && self.pow(a, e / r) == Elem(1) {
                e /= r;
            }
        }
        e
    }

    pub fn is_square(&self, a: Elem) -> bool {
        a.0 != 0 && self.log[a.0 as usize] % 2 == 0
    }

    /// The cyclotomic class C^e_i = { g^(i+ej) : 0 <= j < (q-1)/e }, in power
    /// enumeration order.
    pub fn cyclotomic_class(&self, e: u64, i: u64) -> Result<Vec<Elem>, FieldError> {
        let m = self.spec.q - 1;
        if e == 0 || m % e != 0 {
            return Err(FieldError::NotADivisor(e, m));
        }
        if i >= e {
            return Err(FieldError::IndexOutOfRange(i, e));
        }
        let size = m / e;
        let mut out = Vec::with_capacity(size as usize);
        for j in 0..size {
            out.push(self.exp[(i + e * j) as usize]);
        }
        Ok(out)
    }

    /// All nonzero squares, ascending by code.
    pub fn squares(&self) -> Vec<Elem> {
        let mut v: Vec<Elem> = (0..self.half_order())
            .map(|m| self.exp[(2 * m) as usize])
            .collect();
        v.sort_unstable();
        v
    }

    /// The half-set of nonzero squares; only valid when q = 3 (mod 4).
    pub fn squares_halfset(&self) -> Result<HalfSet, FieldError> {
        if self.spec.q < 7 {
            return Err(FieldError::GroupTooSmall(self.spec.q));
        }
        if self.spec.q % 4 != 3 {
            return Err(FieldError::WrongCongruence(self.spec.q));
        }
        Ok(HalfSet {
            elements: self.squares(),
            q: self.spec.q,
        })
    }

    /// Validate an explicit half-set: no opposed pair, full coverage.
    pub fn validate_halfset(&self, v: &[Elem]) -> Result<HalfSet, FieldError> {
        if self.spec.q < 7 || self.spec.q % 2 == 0 {
            return Err(FieldError::GroupTooSmall(self.spec.q));
        }
        let mut seen = vec![false; self.spec.q as usize];
        for &x in v {
            if x.0 == 0 {
                return Err(FieldError::HalfSetDefect("contains zero".into()));
            }
            if x.0 >= self.spec.q {
                return Err(FieldError::CodeOutOfRange(x.0, self.spec.q));
            }
            if seen[x.0 as usize] {
                return Err(FieldError::HalfSetDefect(format!("repeated element {x}")));
            }
            let neg = self.neg(x);
            if seen[neg.0 as usize] {
                return Err(FieldError::NotAHalfSet(neg, x));
            }
            seen[x.0 as usize] = true;
        }
        if v.len() as u64 != self.half_order() {
            return Err(FieldError::HalfSetDefect(format!(
                "size {} does not cover the {} nonzero pairs",
                v.len(),
                self.half_order()
            )));
        }
        let mut elements = v.to_vec();
        elements.sort_unstable();
        Ok(HalfSet {
            elements,
            q: self.spec.q,
        })
    }

    /// Certificate header line for this field.
    pub fn header_line(&self) -> String {
        let coeffs: Vec<String> = self.spec.modulus.iter().map(|c| c.to_string()).collect();
        format!(
            "field p={} n={} q={} modulus={} generator={}",
            self.spec.p,
            self.spec.n,
            self.spec.q,
            coeffs.join(","),
            self.spec.generator.0
        )
    }
}

fn poly_to_code(c: &[u64], p: u64) -> u64 {
    let mut code = 0u64;
    for &ci in c.iter().rev() {
        code = code * p + ci;
    }
    code
}

fn residue_is_primitive(g: u64, p: u64) -> bool {
    if g == 0 || p == 2 {
        return g == 1 && p == 2;
    }
    let e = p - 1;
    for r in factor_primes(e) {
        if mod_pow(g, e / r, p) == 1 {
            return false;
        }
    }
    true
}

/// A validated half-set: V with V and -V disjoint and jointly covering the
/// nonzero elements. Stored ascending by code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSet {
    elements: Vec<Elem>,
    q: u64,
}

impl HalfSet {
    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.elements.binary_search(&x).is_ok()
    }
}

/// Discrete logarithm on the group of nonzero squares, with an explicit base.
///
/// The canonical base is g^2 for the field generator g; published data
/// sometimes indexes the squares by a different generator of the square group
/// (for instance 3 in Z_71), so any element of order (q-1)/2 is accepted.
pub struct SquareLog {
    base: Elem,
    log: Vec<u64>,
    order: u64,
}

impl SquareLog {
    pub fn new(ctx: &FieldCtx, base: Elem) -> Result<SquareLog, FieldError> {
        let v = ctx.half_order();
        if base.0 == 0 || ctx.order_of(base) != v {
            return Err(FieldError::NotASquareGenerator(base.0, v));
        }
        let mut log = vec![LOG_SENTINEL; ctx.q() as usize];
        let mut cur = Elem(1);
        for m in 0..v {
            log[cur.0 as usize] = m;
            cur = ctx.mul(cur, base);
        }
        Ok(SquareLog {
            base,
            log,
            order: v,
        })
    }

    /// The canonical square logarithm phi with phi(g^(2m)) = m.
    pub fn canonical(ctx: &FieldCtx) -> SquareLog {
        let g2 = ctx.pow(ctx.generator(), 2);
        SquareLog::new(ctx, g2).expect("g^2 always generates the squares")
    }

    pub fn base(&self) -> Elem {
        self.base
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// phi(x); None when x is not a nonzero square.
    pub fn phi(&self, x: Elem) -> Option<u64> {
        let m = *self.log.get(x.0 as usize)?;
        (m != LOG_SENTINEL).then_some(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf243_primitive_relation() {
        // modulus z^5 + 2z^4 + 1, root g: g^5 = g^4 + 2
        let ctx = FieldCtx::build(3, 5, Some(&[1, 0, 0, 0, 2, 1]), None).unwrap();
        assert_eq!(ctx.q(), 243);
        let g = ctx.generator();
        assert_eq!(g, Elem(3)); // the root z itself
        let lhs = ctx.pow(g, 5);
        let rhs = ctx.add(ctx.pow(g, 4), Elem(2));
        assert_eq!(lhs, rhs);
        assert_eq!(ctx.pow(g, 242), Elem(1));
        assert_eq!(ctx.coeff_string(Elem(1)), "10000");
        assert_eq!(ctx.coeff_string(g), "01000");
    }

    #[test]
    fn z71_generators() {
        let ctx = FieldCtx::build(71, 1, None, None).unwrap();
        // 3 generates the index-2 subgroup (the squares), not the whole group
        assert_eq!(ctx.order_of(Elem(3)), 35);
        assert_eq!(ctx.order_of(ctx.generator()), 70);
        assert_eq!(ctx.generator(), Elem(7));
        assert_eq!(ctx.pow(Elem(3), 18), Elem(43));
        assert_eq!(ctx.pow(Elem(3), 34), Elem(24));
        assert_eq!(ctx.pow(Elem(3), 21), Elem(25));
        assert_eq!(ctx.pow(Elem(3), 27), Elem(49));
    }

    #[test]
    fn not_prime_rejected() {
        assert_eq!(
            FieldCtx::build(4, 1, None, None).unwrap_err(),
            FieldError::NotPrime(4)
        );
    }

    #[test]
    fn dlog_values() {
        let ctx = FieldCtx::build(3, 5, Some(&[1, 0, 0, 0, 2, 1]), None).unwrap();
        let g = ctx.generator();
        assert_eq!(ctx.dlog(ctx.pow(g, 18)).unwrap(), 18);
        assert_eq!(ctx.dlog(Elem(1)).unwrap(), 0);
        assert_eq!(ctx.dlog(Elem(0)), Err(FieldError::ZeroArgument));

        // paper indexing of the Z_71 squares by base 3: 3^21 = 25
        let ctx71 = FieldCtx::build(71, 1, None, None).unwrap();
        let phi3 = SquareLog::new(&ctx71, Elem(3)).unwrap();
        assert_eq!(phi3.phi(Elem(25)), Some(21));
        assert_eq!(phi3.phi(Elem(7)), None); // 7 is not a square
    }

    #[test]
    fn cyclotomic_classes() {
        let ctx7 = FieldCtx::build(7, 1, None, None).unwrap();
        let mut sq = ctx7.cyclotomic_class(2, 0).unwrap();
        sq.sort_unstable();
        assert_eq!(sq, vec![Elem(1), Elem(2), Elem(4)]);

        let ctx71 = FieldCtx::build(71, 1, None, None).unwrap();
        let c0 = ctx71.cyclotomic_class(2, 0).unwrap();
        assert_eq!(c0.len(), 35);
        for &a in &c0 {
            for &b in &c0 {
                assert!(ctx71.is_square(ctx71.mul(a, b)));
            }
        }

        let ctx243 = FieldCtx::build(3, 5, Some(&[1, 0, 0, 0, 2, 1]), None).unwrap();
        let x = ctx243.pow(ctx243.generator(), 22);
        let c = ctx243.cyclotomic_class(22, 0).unwrap();
        assert_eq!(c.len(), 11);
        let mut roots: Vec<Elem> = (0..11).map(|i| ctx243.pow(x, i)).collect();
        let mut c_sorted = c.clone();
        roots.sort_unstable();
        c_sorted.sort_unstable();
        assert_eq!(c_sorted, roots);

        assert!(matches!(
            ctx7.cyclotomic_class(4, 0),
            Err(FieldError::NotADivisor(4, 6))
        ));
        assert!(matches!(
            ctx7.cyclotomic_class(2, 2),
            Err(FieldError::IndexOutOfRange(2, 2))
        ));
    }

    #[test]
    fn classes_partition_units() {
        for (p, n, modulus) in [(71u64, 1u32, None), (3, 5, Some([1u64, 0, 0, 0, 2, 1].as_slice()))] {
            let ctx = FieldCtx::build(p, n, modulus, None).unwrap();
            let m = ctx.q() - 1;
            for e in 1..=m {
                if m % e != 0 {
                    continue;
                }
                let mut seen = vec![false; ctx.q() as usize];
                let mut total = 0usize;
                for i in 0..e {
                    for x in ctx.cyclotomic_class(e, i).unwrap() {
                        assert!(!seen[x.0 as usize]);
                        seen[x.0 as usize] = true;
                        total += 1;
                    }
                }
                assert_eq!(total as u64, m);
            }
        }
    }

    #[test]
    fn subgroup_cosets_zero_sum() {
        // every coset of a nontrivial multiplicative subgroup sums to zero
        for (p, n, modulus) in [
            (7u64, 1u32, None),
            (41, 1, None),
            (71, 1, None),
            (163, 1, None),
            (1459, 1, None),
            (3, 5, Some([1u64, 0, 0, 0, 2, 1].as_slice())),
        ] {
            let ctx = FieldCtx::build(p, n, modulus, None).unwrap();
            let m = ctx.q() - 1;
            for e in 1..m {
                if m % e != 0 {
                    continue;
                }
                for i in 0..e {
                    let sum = ctx
                        .cyclotomic_class(e, i)
                        .unwrap()
                        .into_iter()
                        .fold(Elem(0), |acc, x| ctx.add(acc, x));
                    assert_eq!(sum, Elem(0), "q={} e={} i={}", ctx.q(), e, i);
                }
            }
        }
    }

    #[test]
    fn dlog_is_homomorphism() {
        let ctx = FieldCtx::build(3, 5, Some(&[1, 0, 0, 0, 2, 1]), None).unwrap();
        let m = ctx.q() - 1;
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..500 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let x = ctx.g_pow(state % m);
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let y = ctx.g_pow(state % m);
            let lhs = ctx.dlog(ctx.mul(x, y)).unwrap();
            let rhs = (ctx.dlog(x).unwrap() + ctx.dlog(y).unwrap()) % m;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn halfset_validation() {
        let ctx41 = FieldCtx::build(41, 1, None, None).unwrap();
        let v: Vec<Elem> = [1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 13, 15, 19, 21, 23, 24, 25, 27, 29, 33]
            .iter()
            .map(|&c| Elem(c))
            .collect();
        let hs = ctx41.validate_halfset(&v).unwrap();
        assert_eq!(hs.len(), 20);

        let bad = [Elem(1), Elem(2), Elem(40)];
        match ctx41.validate_halfset(&bad) {
            Err(FieldError::NotAHalfSet(a, b)) => {
                assert_eq!((a, b), (Elem(1), Elem(40)));
            }
            other => panic!("expected NotAHalfSet, got {other:?}"),
        }

        let ctx71 = FieldCtx::build(71, 1, None, None).unwrap();
        let hs71 = ctx71.squares_halfset().unwrap();
        assert_eq!(hs71.len(), 35);
        ctx71.validate_halfset(hs71.elements()).unwrap();

        // q = 1 (mod 4): squares are not a half-set
        assert!(matches!(
            ctx41.squares_halfset(),
            Err(FieldError::WrongCongruence(41))
        ));
    }

    #[test]
    fn header_line_format() {
        let ctx = FieldCtx::build(71, 1, None, None).unwrap();
        assert_eq!(
            ctx.header_line(),
            "field p=71 n=1 q=71 modulus=64,1 generator=7"
        );
    }

    #[test]
    fn explicit_generator_override() {
        // a second primitive element of GF(243): g^7 has order 242/gcd(7,242)=242
        let ctx = FieldCtx::build(3, 5, Some(&[1, 0, 0, 0, 2, 1]), None).unwrap();
        let g2 = ctx.pow(ctx.generator(), 7);
        let ctx2 = FieldCtx::build(3, 5, Some(&[1, 0, 0, 0, 2, 1]), Some(g2.0)).unwrap();
        assert_eq!(ctx2.generator(), g2);
        assert_eq!(ctx2.dlog(g2).unwrap(), 1);
        // arithmetic agrees regardless of the table base
        for a in [3u64, 17, 100, 242] {
            for b in [5u64, 81, 121] {
                assert_eq!(ctx.mul(Elem(a), Elem(b)), ctx2.mul(Elem(a), Elem(b)));
            }
        }
    }
}
