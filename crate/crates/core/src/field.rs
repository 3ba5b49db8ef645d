//! Arithmetic in GF(p^k) for q = p^k <= 2^16.
//!
//! Elements are stored as the integer code `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! of their coefficient vector over the defining modulus, so the code order
//! is the canonical element order (0 first, 1 second). Multiplication goes
//! through exp/log tables built from a primitive element found at
//! construction time.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_FIELD_ORDER: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the supported maximum {MAX_FIELD_ORDER}")]
    TooLarge { p: u32, k: u32 },
    #[error("modulus {0:?} is not a monic irreducible polynomial of the requested degree")]
    BadModulus(Vec<u32>),
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("value {value} is not an element of a field of order {order}")]
    NotInField { value: u64, order: u32 },
    #[error("cannot inject {labels} labels into a field of order {order}")]
    AlphabetTooLarge { labels: usize, order: u32 },
    #[error("alphabet injection is not injective: {0}")]
    NotInjective(String),
}

/// An element of some GF(q); only meaningful together with its [`FieldSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The field GF(p^k) with a fixed monic irreducible modulus.
#[derive(Clone)]
pub struct FieldSpec {
    t: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.k == other.t.k && self.t.modulus == other.t.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}, modulus {:?})", self.t.p, self.t.k, self.t.modulus)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some((p, k))` when `n = p^k` for a prime `p` and `k >= 1`.
pub fn prime_power(n: u64) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n && !n.is_multiple_of(p) {
        p += 1;
    }
    if !n.is_multiple_of(p) {
        p = n;
    }
    let (mut m, mut k) = (n, 0u32);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1 && p <= u32::MAX as u64).then_some((p as u32, k))
}

// --- polynomials over GF(p), low-to-high coefficients -------------------------

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is prime and small; Fermat.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p) as u64;
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let factor = r[r.len() - 1] as u64 * lead_inv % p as u64;
        for (i, &c) in m.iter().enumerate() {
            let sub = factor * c as u64 % p as u64;
            r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    poly_rem(&prod.into_iter().map(|c| c as u32).collect::<Vec<_>>(), m, p)
}

fn digits(code: u32, p: u32, k: u32) -> Vec<u32> {
    let mut c = code;
    (0..k)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Exhaustive factor search: no monic polynomial of degree `1..=k/2` divides `m`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        for code in 0..p.pow(d as u32) {
            let mut f = digits(code, p, d as u32);
            f.push(1);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// GF(p^k) with the least monic irreducible modulus, ordering candidates by
    /// their non-leading coefficients read from degree `k-1` down to 0.
    pub fn new(p: u32, k: u32) -> Result<Self, FieldError> {
        Self::check_params(p, k)?;
        let modulus = (0..p.pow(k))
            .map(|code| {
                let mut m = digits(code, p, k);
                m.push(1);
                m
            })
            .find(|m| is_irreducible(m, p))
            .expect("an irreducible polynomial of every degree exists");
        Ok(Self::build(p, k, modulus))
    }

    /// GF(p^k) over a caller-supplied modulus (coefficients `c_0..c_k`).
    pub fn with_modulus(p: u32, k: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        Self::check_params(p, k)?;
        let ok = modulus.len() == k as usize + 1
            && modulus.last() == Some(&1)
            && modulus.iter().all(|&c| c < p)
            && is_irreducible(&modulus, p);
        if !ok {
            return Err(FieldError::BadModulus(modulus));
        }
        Ok(Self::build(p, k, modulus))
    }

    /// Smallest field with at least `n` elements (at least GF(2)).
    pub fn smallest_with_order_at_least(n: usize) -> Result<Self, FieldError> {
        let mut q = n.max(2) as u64;
        loop {
            if q > MAX_FIELD_ORDER as u64 {
                return Err(FieldError::AlphabetTooLarge { labels: n, order: MAX_FIELD_ORDER });
            }
            if let Some((p, k)) = prime_power(q) {
                return Self::new(p, k);
            }
            q += 1;
        }
    }

    fn check_params(p: u32, k: u32) -> Result<(), FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        match p.checked_pow(k) {
            Some(q) if q <= MAX_FIELD_ORDER => Ok(()),
            _ => Err(FieldError::TooLarge { p, k }),
        }
    }

    fn build(p: u32, k: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(k);
        let order = (q - 1) as usize;
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![0u32; q as usize];
        // Search for a primitive element by walking its powers.
        'candidates: for g in 1..q {
            exp.clear();
            let gd = poly_trim(digits(g, p, k));
            let mut cur = vec![1u32];
            for i in 0..order {
                let code = undigits(&cur, p);
                if i > 0 && code == 1 {
                    continue 'candidates;
                }
                exp.push(code);
                cur = poly_mulmod(&cur, &gd, &modulus, p);
            }
            break;
        }
        debug_assert_eq!(exp.len(), order);
        for (i, &c) in exp.iter().enumerate() {
            log[c as usize] = i as u32;
        }
        Self { t: Arc::new(Tables { p, k, q, modulus, exp, log }) }
    }

    pub fn characteristic(&self) -> u32 {
        self.t.p
    }

    pub fn degree(&self) -> u32 {
        self.t.k
    }

    pub fn order(&self) -> u32 {
        self.t.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn element(&self, code: u64) -> Result<FieldElement, FieldError> {
        if code < self.t.q as u64 {
            Ok(FieldElement(code as u32))
        } else {
            Err(FieldError::NotInField { value: code, order: self.t.q })
        }
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.t.k as usize || coeffs.iter().any(|&c| c >= self.t.p) {
            return Err(FieldError::NotInField { value: u64::MAX, order: self.t.q });
        }
        Ok(FieldElement(undigits(coeffs, self.t.p)))
    }

    /// Exactly `k` coefficients, lowest degree first.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0, self.t.p, self.t.k)
    }

    /// Residue for prime fields, polynomial in `x` otherwise (e.g. `x^2+2x+1`).
    pub fn format(&self, a: FieldElement) -> String {
        if self.t.k == 1 {
            return a.0.to_string();
        }
        let cs = self.coefficients(a);
        let parts: Vec<String> = cs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".into(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// All `q` elements in code order; `[0, 1, ...]`.
    pub fn all_elements(&self) -> Vec<FieldElement> {
        (0..self.t.q).map(FieldElement).collect()
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (p, k) = (self.t.p, self.t.k);
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if k == 1 {
            return FieldElement((a.0 + b.0) % p);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        for _ in 0..k {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let (p, k) = (self.t.p, self.t.k);
        if p == 2 {
            return a;
        }
        if k == 1 {
            return FieldElement((p - a.0) % p);
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        for _ in 0..k {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        let order = self.t.q - 1;
        let l = (self.t.log[a.0 as usize] as u64 + self.t.log[b.0 as usize] as u64) % order as u64;
        FieldElement(self.t.exp[l as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::InverseOfZero);
        }
        let order = self.t.q - 1;
        Ok(FieldElement(self.t.exp[((order - self.t.log[a.0 as usize]) % order) as usize]))
    }

    pub fn pow(&self, a: FieldElement, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement(1);
        }
        if a.0 == 0 {
            return FieldElement(0);
        }
        let order = (self.t.q - 1) as u64;
        let l = (self.t.log[a.0 as usize] as u64 % order) * (n % order) % order;
        FieldElement(self.t.exp[l as usize])
    }

    /// Copy of this field with a damaged exponent table. Only for exercising
    /// the self-test's fault detection.
    #[doc(hidden)]
    pub fn corrupted_for_fault_injection(&self) -> FieldSpec {
        let mut exp = self.t.exp.clone();
        exp[0] = (exp[0] + 1) % self.t.q;
        FieldSpec {
            t: Arc::new(Tables {
                p: self.t.p,
                k: self.t.k,
                q: self.t.q,
                modulus: self.t.modulus.clone(),
                exp,
                log: self.t.log.clone(),
            }),
        }
    }
}

/// Wire form `{"p": p, "k": k, "modulus": [c0..ck]}`; modulus optional on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpecJson {
    pub p: u32,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl From<&FieldSpec> for FieldSpecJson {
    fn from(f: &FieldSpec) -> Self {
        FieldSpecJson { p: f.characteristic(), k: f.degree(), modulus: Some(f.modulus().to_vec()) }
    }
}

impl TryFrom<FieldSpecJson> for FieldSpec {
    type Error = FieldError;

    fn try_from(j: FieldSpecJson) -> Result<Self, FieldError> {
        match j.modulus {
            Some(m) => FieldSpec::with_modulus(j.p, j.k, m),
            None => FieldSpec::new(j.p, j.k),
        }
    }
}

/// An injective map from an alphabet of opaque labels into a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetInjection {
    field: FieldSpec,
    images: Vec<FieldElement>,
    preimage: Vec<u32>,
}

impl AlphabetInjection {
    /// `images[i]` is the image of the `i`-th label.
    pub fn new(field: FieldSpec, images: Vec<FieldElement>) -> Result<Self, FieldError> {
        let q = field.order();
        if images.len() > q as usize {
            return Err(FieldError::AlphabetTooLarge { labels: images.len(), order: q });
        }
        let mut preimage = vec![u32::MAX; q as usize];
        for (i, img) in images.iter().enumerate() {
            if img.0 >= q {
                return Err(FieldError::NotInField { value: img.0 as u64, order: q });
            }
            if preimage[img.0 as usize] != u32::MAX {
                return Err(FieldError::NotInjective(format!(
                    "labels {} and {i} share the image {}",
                    preimage[img.0 as usize],
                    field.format(*img)
                )));
            }
            preimage[img.0 as usize] = i as u32;
        }
        Ok(Self { field, images, preimage })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn images(&self) -> &[FieldElement] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, label: usize) -> FieldElement {
        self.images[label]
    }

    pub fn preimage(&self, a: FieldElement) -> Option<usize> {
        match self.preimage.get(a.0 as usize) {
            Some(&i) if i != u32::MAX => Some(i as usize),
            _ => None,
        }
    }
}

/// The `i`-th label goes to the `i`-th element of [`FieldSpec::all_elements`].
pub fn inject_alphabet<S: AsRef<str>>(labels: &[S], field: &FieldSpec) -> Result<AlphabetInjection, FieldError> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_ref()) {
            return Err(FieldError::NotInjective(format!("label {:?} repeated", l.as_ref())));
        }
    }
    if labels.len() > field.order() as usize {
        return Err(FieldError::AlphabetTooLarge { labels: labels.len(), order: field.order() });
    }
    AlphabetInjection::new(field.clone(), (0..labels.len() as u32).map(FieldElement).collect())
}
