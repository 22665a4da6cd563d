//! Exact arithmetic in F_{q^n}, q = p^r, n = 2t.
//!
//! Elements are stored as discrete logarithms with respect to a fixed
//! primitive element, and addition goes through a Zech-logarithm table. This
//! makes multiplication, inversion and every Frobenius power a single modular
//! multiplication on the exponent, which is what the enumeration-heavy code in
//! the rest of the crate spends its time on.
//!
//! The *canonical index* of an element is its coordinate vector over F_p in
//! the power basis of a root of the modulus, read as a base-p integer with the
//! constant coordinate least significant. Canonical order means ascending
//! canonical index; all enumeration and tie-breaking uses it.

mod fp_poly;

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use fp_poly::prime_factors;

/// Upper bound on p^D for table-driven arithmetic.
pub const MAX_FIELD_ORDER: u64 = 1 << 23;

const ZERO_LOG: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u32,
    pub r: u32,
    pub t: u32,
}

impl FieldParams {
    pub fn new(p: u32, r: u32, t: u32) -> Result<Self> {
        let params = FieldParams { p, r, t };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p as u64) {
            return Err(Error::InvalidParams(format!("p = {} is not prime", self.p)));
        }
        if self.r == 0 {
            return Err(Error::InvalidParams("r must be at least 1".into()));
        }
        if self.t < 3 {
            return Err(Error::InvalidParams(format!("t = {} must be at least 3", self.t)));
        }
        let order = (self.p as u128).checked_pow(self.degree());
        match order {
            Some(o) if o <= MAX_FIELD_ORDER as u128 => Ok(()),
            _ => Err(Error::FieldTooLarge { p: self.p, degree: self.degree() }),
        }
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.r)
    }

    pub fn n(&self) -> u32 {
        2 * self.t
    }

    /// Absolute degree D = r n of F_{q^n} over F_p.
    pub fn degree(&self) -> u32 {
        self.r * self.n()
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.degree())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// An element of F_{q^n}, valid only together with the [`FieldContext`] that
/// produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(ZERO_LOG);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == ZERO_LOG
    }
}

/// Canonical JSON descriptor of a context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextDescriptor {
    pub p: u32,
    pub r: u32,
    pub t: u32,
    /// Monic modulus, coefficients low to high (length D + 1).
    pub modulus: Vec<u32>,
    /// Coordinates of the primitive element, low to high.
    pub generator: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldContext {
    params: FieldParams,
    modulus: Vec<u32>,
    generator_index: u32,
    /// m1 = p^D - 1, the order of the multiplicative group.
    m1: u32,
    /// log -> canonical index
    exp: Vec<u32>,
    /// canonical index -> log (ZERO_LOG for 0)
    log: Vec<u32>,
    /// k -> log(1 + g^k)
    zech: Vec<u32>,
    /// q^i mod m1 for 0 <= i < n
    q_pow: Vec<u64>,
    /// p^j mod m1 for 0 <= j < D
    p_pow: Vec<u64>,
    /// p^i for 0 <= i < D, for index <-> coordinate conversion
    place: Vec<u32>,
}

impl FieldContext {
    /// Builds the context using the lexicographically smallest monic
    /// irreducible of degree D (coefficients compared low-degree-first).
    pub fn new(params: FieldParams) -> Result<Self> {
        params.validate()?;
        let modulus = smallest_irreducible(params.p, params.degree());
        Self::with_modulus(params, modulus)
    }

    /// Builds the context from a given modulus, which is re-certified.
    pub fn with_modulus(params: FieldParams, modulus: Vec<u32>) -> Result<Self> {
        params.validate()?;
        let p = params.p;
        let dd = params.degree() as usize;
        if modulus.len() != dd + 1 || modulus[dd] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParams("modulus must be monic of degree D over F_p".into()));
        }
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidParams("modulus is not irreducible".into()));
        }
        let order = params.order();
        let m1 = (order - 1) as u32;
        let place: Vec<u32> = (0..dd).map(|i| p.pow(i as u32)).collect();

        let generator_index = find_generator(p, &modulus, order, &place);
        let gen_digits = index_to_digits(generator_index, p, dd);

        let mut exp = vec![0u32; m1 as usize];
        let mut log = vec![ZERO_LOG; order as usize];
        let mut cur: Vec<u32> = vec![0; dd];
        cur[0] = 1;
        for k in 0..m1 {
            let idx = digits_to_index(&cur, &place);
            exp[k as usize] = idx;
            log[idx as usize] = k;
            cur = mul_digits(&cur, &gen_digits, &modulus, p);
        }
        debug_assert!(cur[0] == 1 && cur[1..].iter().all(|&c| c == 0));

        let zech = (0..m1)
            .map(|k| {
                let idx = exp[k as usize];
                let d0 = idx % p;
                let plus_one = idx - d0 + (d0 + 1) % p;
                log[plus_one as usize]
            })
            .collect();

        let q = params.q();
        let q_pow = (0..params.n())
            .map(|i| pow_mod_u64(q, i as u64, m1 as u64))
            .collect();
        let p_pow = (0..params.degree())
            .map(|j| pow_mod_u64(p as u64, j as u64, m1 as u64))
            .collect();

        Ok(FieldContext { params, modulus, generator_index, m1, exp, log, zech, q_pow, p_pow, place })
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn q(&self) -> u64 {
        self.params.q()
    }

    pub fn n(&self) -> u32 {
        self.params.n()
    }

    pub fn t(&self) -> u32 {
        self.params.t
    }

    pub fn degree(&self) -> u32 {
        self.params.degree()
    }

    pub fn order(&self) -> u64 {
        self.m1 as u64 + 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        FieldElement(if self.m1 == 1 { 0 } else { 1 })
    }

    pub fn descriptor(&self) -> ContextDescriptor {
        ContextDescriptor {
            p: self.params.p,
            r: self.params.r,
            t: self.params.t,
            modulus: self.modulus.clone(),
            generator: index_to_digits(self.generator_index, self.params.p, self.degree() as usize),
        }
    }

    /// Rebuilds a context from a descriptor and checks that the generator
    /// matches.
    pub fn from_descriptor(desc: &ContextDescriptor) -> Result<Self> {
        let params = FieldParams::new(desc.p, desc.r, desc.t)?;
        let ctx = Self::with_modulus(params, desc.modulus.clone())?;
        if ctx.descriptor() != *desc {
            return Err(Error::InvalidParams("descriptor generator does not match".into()));
        }
        Ok(ctx)
    }

    // ---- encodings -------------------------------------------------------

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement(0)
    }

    #[inline]
    pub fn neg_one(&self) -> FieldElement {
        if self.params.p == 2 {
            self.one()
        } else {
            FieldElement(self.m1 / 2)
        }
    }

    pub fn from_index(&self, idx: u64) -> Result<FieldElement> {
        if idx >= self.order() {
            return Err(Error::BadCoordinates(format!("index {idx} out of range")));
        }
        Ok(FieldElement(self.log[idx as usize]))
    }

    #[inline]
    pub fn index(&self, e: FieldElement) -> u32 {
        if e.is_zero() {
            0
        } else {
            self.exp[e.0 as usize]
        }
    }

    /// Discrete logarithm to the base of [`generator`](Self::generator).
    #[inline]
    pub fn log(&self, e: FieldElement) -> Option<u32> {
        (!e.is_zero()).then_some(e.0)
    }

    #[inline]
    pub fn from_log(&self, k: u64) -> FieldElement {
        FieldElement((k % self.m1 as u64) as u32)
    }

    pub fn coords(&self, e: FieldElement) -> Vec<u32> {
        index_to_digits(self.index(e), self.params.p, self.degree() as usize)
    }

    /// Writes the F_p coordinates of `e` into `out` (length D).
    #[inline]
    pub fn write_coords(&self, e: FieldElement, out: &mut [u32]) {
        let mut idx = self.index(e);
        let p = self.params.p;
        for slot in out.iter_mut() {
            *slot = idx % p;
            idx /= p;
        }
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElement> {
        if coords.len() != self.degree() as usize {
            return Err(Error::BadCoordinates(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        if coords.iter().any(|&c| c >= self.params.p) {
            return Err(Error::BadCoordinates("coordinate out of range".into()));
        }
        Ok(FieldElement(self.log[digits_to_index(coords, &self.place) as usize]))
    }

    /// Embeds an integer via F_p.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let p = self.params.p as i64;
        FieldElement(self.log[v.rem_euclid(p) as usize])
    }

    pub fn cmp_canonical(&self, a: FieldElement, b: FieldElement) -> Ordering {
        self.index(a).cmp(&self.index(b))
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.log.iter().map(|&l| FieldElement(l))
    }

    /// All nonzero elements in canonical order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.log[1..].iter().map(|&l| FieldElement(l))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(self.log[rng.gen_range(0..self.order()) as usize])
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.m1))
    }

    // ---- arithmetic ------------------------------------------------------

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let k = if b.0 >= a.0 { b.0 - a.0 } else { b.0 + self.m1 - a.0 };
        let z = self.zech[k as usize];
        if z == ZERO_LOG {
            return FieldElement::ZERO;
        }
        let s = a.0 + z;
        FieldElement(if s >= self.m1 { s - self.m1 } else { s })
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.is_zero() || self.params.p == 2 {
            return a;
        }
        let s = a.0 + self.m1 / 2;
        FieldElement(if s >= self.m1 { s - self.m1 } else { s })
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let s = a.0 + b.0;
        FieldElement(if s >= self.m1 { s - self.m1 } else { s })
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement(if a.0 == 0 { 0 } else { self.m1 - a.0 }))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^k for a signed exponent; 0^k is an error for k < 0.
    pub fn pow(&self, a: FieldElement, k: i128) -> Result<FieldElement> {
        if a.is_zero() {
            return match k.cmp(&0) {
                Ordering::Greater => Ok(FieldElement::ZERO),
                Ordering::Equal => Ok(self.one()),
                Ordering::Less => Err(Error::DivisionByZero),
            };
        }
        let e = k.rem_euclid(self.m1 as i128) as u64;
        Ok(FieldElement(((a.0 as u64 * e) % self.m1 as u64) as u32))
    }

    /// a^k for k >= 0.
    #[inline]
    pub fn pow_u(&self, a: FieldElement, k: u64) -> FieldElement {
        if a.is_zero() {
            return if k == 0 { self.one() } else { FieldElement::ZERO };
        }
        let e = k % self.m1 as u64;
        FieldElement(((a.0 as u64 * e) % self.m1 as u64) as u32)
    }

    /// a^(sum_j c_j q^(e_j)), exponents e_j reduced mod n. Handy for the
    /// many expressions of the shape h^(1 - q^(5s)).
    pub fn qpow(&self, a: FieldElement, terms: &[(i64, i64)]) -> Result<FieldElement> {
        let q = self.q() as i128;
        let n = self.n() as i64;
        let total: i128 = terms
            .iter()
            .map(|&(c, e)| c as i128 * q.pow(e.rem_euclid(n) as u32))
            .sum();
        self.pow(a, total)
    }

    /// e^(q^i), i taken mod n.
    #[inline]
    pub fn frobenius(&self, e: FieldElement, i: i64) -> FieldElement {
        if e.is_zero() {
            return e;
        }
        let k = self.q_pow[i.rem_euclid(self.n() as i64) as usize];
        FieldElement(((e.0 as u64 * k) % self.m1 as u64) as u32)
    }

    /// e^(p^j), j taken mod D.
    #[inline]
    pub fn p_automorphism(&self, e: FieldElement, j: i64) -> FieldElement {
        if e.is_zero() {
            return e;
        }
        let k = self.p_pow[j.rem_euclid(self.degree() as i64) as usize];
        FieldElement(((e.0 as u64 * k) % self.m1 as u64) as u32)
    }

    fn check_divisor(&self, d: u32) -> Result<()> {
        if d == 0 || self.n() % d != 0 {
            Err(Error::NotADivisor { d, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Size of the multiplicative group of the subfield F_{q^d}.
    fn sub_m1(&self, d: u32) -> u64 {
        self.q().pow(d) - 1
    }

    /// Relative norm N_{q^n/q^d}(e) = e^((q^n-1)/(q^d-1)).
    pub fn norm(&self, e: FieldElement, d: u32) -> Result<FieldElement> {
        self.check_divisor(d)?;
        let exponent = self.m1 as u64 / self.sub_m1(d);
        Ok(self.pow_u(e, exponent))
    }

    /// Relative trace Tr_{q^n/q^d}(e) = sum_k e^(q^(dk)).
    pub fn trace(&self, e: FieldElement, d: u32) -> Result<FieldElement> {
        self.check_divisor(d)?;
        let mut acc = self.zero();
        for k in 0..self.n() / d {
            acc = self.add(acc, self.frobenius(e, (d * k) as i64));
        }
        Ok(acc)
    }

    pub fn is_in_subfield(&self, e: FieldElement, d: u32) -> bool {
        if e.is_zero() {
            return true;
        }
        let step = self.m1 as u64 / gcd(self.m1 as u64, self.sub_m1(gcd(d as u64, self.n() as u64) as u32));
        e.0 as u64 % step == 0
    }

    /// All e with N_{q^n/q^d}(e) = target, in canonical order.
    pub fn norm_fiber(&self, target: FieldElement, d: u32) -> Result<Vec<FieldElement>> {
        self.check_divisor(d)?;
        let exponent = self.m1 as u64 / self.sub_m1(d);
        Ok(self.power_preimage(exponent, target))
    }

    /// All x with x^exponent = target, in canonical order.
    pub fn power_preimage(&self, exponent: u64, target: FieldElement) -> Vec<FieldElement> {
        if target.is_zero() {
            return if exponent > 0 { vec![FieldElement::ZERO] } else { Vec::new() };
        }
        let m1 = self.m1 as u64;
        let e = exponent % m1;
        let g = gcd(e, m1);
        let l = target.0 as u64;
        if l % g != 0 {
            return Vec::new();
        }
        let modulus = m1 / g;
        let x0 = if modulus == 1 {
            0
        } else {
            (l / g) % modulus * mod_inverse(e / g % modulus, modulus) % modulus
        };
        let mut out: Vec<FieldElement> =
            (0..g).map(|k| FieldElement(((x0 + k * modulus) % m1) as u32)).collect();
        out.sort_by_key(|&x| self.index(x));
        out
    }

    /// The q^d elements of F_{q^d}, in canonical order.
    pub fn subfield_elements(&self, d: u32) -> Result<Vec<FieldElement>> {
        self.check_divisor(d)?;
        let step = self.m1 as u64 / self.sub_m1(d);
        let mut out: Vec<FieldElement> = std::iter::once(FieldElement::ZERO)
            .chain((0..self.sub_m1(d)).map(|k| FieldElement((k * step) as u32)))
            .collect();
        out.sort_by_key(|&x| self.index(x));
        Ok(out)
    }

    /// Square roots, canonical order (empty if `a` is a non-square).
    pub fn sqrt_all(&self, a: FieldElement) -> Vec<FieldElement> {
        let mut roots = self.power_preimage(2, a);
        roots.dedup();
        roots
    }
}

fn pow_mod_u64(base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u128;
    let mut b = (base % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    result as u64
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quo = old_r / r;
        (old_r, r) = (r, old_r - quo * r);
        (old_s, s) = (s, old_s - quo * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

fn index_to_digits(mut idx: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = idx % p;
        idx /= p;
    }
    out
}

fn digits_to_index(digits: &[u32], place: &[u32]) -> u32 {
    digits.iter().zip(place).map(|(&d, &w)| d * w).sum()
}

fn mul_digits(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let dd = a.len();
    let mut prod = fp_poly::mul_mod(&fp_poly::trim(a.to_vec()), &fp_poly::trim(b.to_vec()), modulus, p);
    prod.resize(dd, 0);
    prod
}

fn smallest_irreducible(p: u32, d: u32) -> Vec<u32> {
    // Enumerate (c_0, ..., c_{d-1}) lexicographically with c_0 most
    // significant; c_0 = 0 is always reducible (divisible by x) unless d = 1.
    let d = d as usize;
    let mut coeffs = vec![0u32; d];
    loop {
        let mut candidate = coeffs.clone();
        candidate.push(1);
        if (d == 1 || candidate[0] != 0) && fp_poly::is_irreducible(&candidate, p) {
            return candidate;
        }
        // increment with position d-1 fastest
        let mut i = d;
        loop {
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            assert!(i > 0, "an irreducible polynomial of every degree exists");
        }
    }
}

fn find_generator(p: u32, modulus: &[u32], order: u64, place: &[u32]) -> u32 {
    let m1 = order - 1;
    let factors = prime_factors(m1);
    let dd = place.len();
    for idx in 2..order as u32 {
        let digits = fp_poly::trim(index_to_digits(idx, p, dd));
        let primitive = factors.iter().all(|&l| {
            let pw = fp_poly::pow_mod(&digits, (m1 / l) as u128, modulus, p);
            pw != vec![1]
        });
        if primitive {
            return idx;
        }
    }
    // F_2 has m1 = 1 and 1 is primitive, but D >= 6 here
    1
}
