//! Finite fields F_q and Galois rings GR(p^k, f) = (Z/p^k)[x]/(modulus).
//!
//! Both are served by one arithmetic engine: a field is the Galois ring with
//! p-adic precision k = 1. Ring contexts are interned, so a `GaloisRing` is a
//! copyable pointer and equality of contexts is pointer equality.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use super::ring::Ring;
use crate::error::{Error, Result};

const MAX_DEGREE: usize = 8;
const TABLE_LIMIT: u64 = 1024;

/// Built-in irreducible moduli (low-to-high coefficients, monic) for
/// p in {2,3,5,7} and f <= 3. The same integer coefficients serve as the
/// fixed lift to Z/p^k.
fn builtin_modulus(p: u64, f: usize) -> Option<Vec<u64>> {
    let m = match (p, f) {
        (_, 1) => vec![0, 1],
        (2, 2) => vec![1, 1, 1],
        (3, 2) => vec![1, 0, 1],
        (5, 2) => vec![2, 0, 1],
        (7, 2) => vec![1, 0, 1],
        (2, 3) => vec![1, 1, 0, 1],
        (3, 3) => vec![1, 2, 0, 1],
        (5, 3) => vec![1, 1, 0, 1],
        (7, 3) => vec![1, 1, 0, 1],
        _ => return None,
    };
    Some(m)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Brute-force irreducibility of a monic polynomial over Z/p: no monic
/// factor of degree <= deg/2.
fn irreducible_mod_p(p: u64, modulus: &[u64]) -> bool {
    let deg = modulus.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut factor = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                factor.push(x % p);
                x /= p;
            }
            factor.push(1);
            if poly_rem_mod_p(p, modulus, &factor).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_mod_p(p: u64, num: &[u64], den: &[u64]) -> Vec<u64> {
    let mut r: Vec<u64> = num.iter().map(|c| c % p).collect();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = r[r.len() - 1];
        let shift = r.len() - 1 - dd;
        for (i, &c) in den.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (lead * c) % p) % p;
        }
        r.pop();
    }
    r
}

/// F_q with q = p^f, presented as (Z/p)[x]/(modulus).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub f: usize,
    pub modulus: Vec<u64>,
}

impl FieldDescriptor {
    pub fn new(p: u64, f: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let modulus = builtin_modulus(p, f).ok_or_else(|| {
            Error::InvalidInput(format!("no built-in modulus for p = {p}, f = {f}"))
        })?;
        Ok(Self { p, f, modulus })
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if modulus.len() < 2 || modulus.len() - 1 > MAX_DEGREE || modulus[modulus.len() - 1] % p != 1 {
            return Err(Error::InvalidInput("modulus must be monic of degree 1..=8".into()));
        }
        let modulus: Vec<u64> = modulus.into_iter().map(|c| c % p).collect();
        if !irreducible_mod_p(p, &modulus) {
            return Err(Error::InvalidInput(format!("modulus {modulus:?} is reducible mod {p}")));
        }
        Ok(Self { f: modulus.len() - 1, p, modulus })
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    pub fn ring(&self) -> GaloisRing {
        GaloisRing::intern(GaloisRingDescriptor {
            p: self.p,
            k: 1,
            f: self.f,
            modulus: self.modulus.clone(),
        })
    }
}

/// GR(p^k, f): unramified extension of Z/p^k of degree f.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GaloisRingDescriptor {
    pub p: u64,
    pub k: u32,
    pub f: usize,
    pub modulus: Vec<u64>,
}

impl GaloisRingDescriptor {
    pub fn new(p: u64, k: u32, f: usize) -> Result<Self> {
        let field = FieldDescriptor::new(p, f)?;
        Self::lift_of(&field, k)
    }

    pub fn lift_of(field: &FieldDescriptor, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("p-adic precision k must be >= 1".into()));
        }
        let size = (field.p as u128).pow(k * field.f as u32);
        if size > u32::MAX as u128 {
            return Err(Error::TooLarge(format!("GR({}^{k}, {}) has too many elements", field.p, field.f)));
        }
        Ok(Self {
            p: field.p,
            k,
            f: field.f,
            modulus: field.modulus.clone(),
        })
    }

    pub fn residue_field(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            f: self.f,
            modulus: self.modulus.iter().map(|c| c % self.p).collect(),
        }
    }

    pub fn ring(&self) -> GaloisRing {
        GaloisRing::intern(self.clone())
    }
}

struct Tables {
    desc: GaloisRingDescriptor,
    pk: u64,
    size: u64,
    mul: Option<Vec<u32>>,
    inv: Option<Vec<u32>>,
}

/// Arithmetic context for GR(p^k, f); k = 1 is the field F_q.
#[derive(Clone, Copy)]
pub struct GaloisRing {
    t: &'static Tables,
}

impl PartialEq for GaloisRing {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.t, other.t)
    }
}

impl Eq for GaloisRing {}

impl std::hash::Hash for GaloisRing {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.t as *const Tables as usize).hash(state)
    }
}

impl fmt::Debug for GaloisRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn registry() -> &'static Mutex<HashMap<GaloisRingDescriptor, &'static Tables>> {
    static REG: OnceLock<Mutex<HashMap<GaloisRingDescriptor, &'static Tables>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

impl GaloisRing {
    fn intern(desc: GaloisRingDescriptor) -> Self {
        if let Some(t) = registry().lock().expect("ring registry poisoned").get(&desc) {
            return GaloisRing { t };
        }
        let pk = desc.p.pow(desc.k);
        let size = pk.pow(desc.f as u32);
        let tables: &'static Tables = Box::leak(Box::new(Tables {
            desc: desc.clone(),
            pk,
            size,
            mul: None,
            inv: None,
        }));
        let ring = GaloisRing { t: tables };
        let full = if size <= TABLE_LIMIT {
            let n = size as usize;
            let mut mul = vec![0u32; n * n];
            for a in 0..n {
                for b in a..n {
                    let c = ring.mul_raw(a as u32, b as u32);
                    mul[a * n + b] = c;
                    mul[b * n + a] = c;
                }
            }
            let inv: Vec<u32> = (0..n as u32)
                .map(|a| ring.inv_raw(a).unwrap_or(u32::MAX))
                .collect();
            Box::leak(Box::new(Tables {
                desc: desc.clone(),
                pk,
                size,
                mul: Some(mul),
                inv: Some(inv),
            }))
        } else {
            tables
        };
        let mut reg = registry().lock().expect("ring registry poisoned");
        let t = *reg.entry(desc).or_insert(full);
        GaloisRing { t }
    }

    /// F_q as a ring context.
    pub fn field(p: u64, f: usize) -> Result<Self> {
        Ok(FieldDescriptor::new(p, f)?.ring())
    }

    /// GR(p^k, f) as a ring context.
    pub fn galois(p: u64, k: u32, f: usize) -> Result<Self> {
        Ok(GaloisRingDescriptor::new(p, k, f)?.ring())
    }

    pub fn descriptor(&self) -> &GaloisRingDescriptor {
        &self.t.desc
    }

    pub fn p(&self) -> u64 {
        self.t.desc.p
    }

    pub fn k(&self) -> u32 {
        self.t.desc.k
    }

    pub fn degree(&self) -> usize {
        self.t.desc.f
    }

    /// Residue-field cardinality q = p^f.
    pub fn q(&self) -> u64 {
        self.t.desc.p.pow(self.t.desc.f as u32)
    }

    /// p^k, the order of the prime subring Z/p^k.
    pub fn prime_ring_order(&self) -> u64 {
        self.p().pow(self.k())
    }

    pub fn size(&self) -> u64 {
        self.t.size
    }

    pub fn residue_field(&self) -> GaloisRing {
        self.t.desc.residue_field().ring()
    }

    /// The Galois ring with the same residue field at p-adic precision k.
    pub fn with_precision(&self, k: u32) -> Result<GaloisRing> {
        Ok(GaloisRingDescriptor::lift_of(&self.t.desc.residue_field(), k)?.ring())
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.t.size as u32
    }

    pub fn digits(&self, a: u32) -> [u64; MAX_DEGREE] {
        let mut d = [0u64; MAX_DEGREE];
        let mut x = a as u64;
        for slot in d.iter_mut().take(self.t.desc.f) {
            *slot = x % self.t.pk;
            x /= self.t.pk;
        }
        d
    }

    pub fn from_digits(&self, d: &[u64]) -> u32 {
        let mut x = 0u64;
        for &c in d.iter().take(self.t.desc.f).rev() {
            x = x * self.t.pk + c % self.t.pk;
        }
        x as u32
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let f = self.t.desc.f;
        let pk = self.t.pk;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..f {
            if da[i] == 0 {
                continue;
            }
            for j in 0..f {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % pk;
            }
        }
        let m = &self.t.desc.modulus;
        for top in (f..2 * f).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &mc) in m.iter().take(f).enumerate() {
                let s = top - f + i;
                prod[s] = (prod[s] + pk - (c * mc) % pk) % pk;
            }
        }
        self.from_digits(&prod[..f])
    }

    fn inv_raw(&self, a: u32) -> Option<u32> {
        let p = self.t.desc.p;
        let d = self.digits(a);
        if d.iter().all(|c| c % p == 0) {
            return None;
        }
        let q = self.q();
        if self.t.desc.k == 1 {
            return Some(self.pow_raw(a, q - 2));
        }
        let field = self.residue_field();
        let r = self.residue(a);
        let r_inv = field.inv(&r)?;
        let mut x = self.naive_lift(&field, r_inv);
        let two = self.from_int(2);
        for _ in 0..self.t.desc.k {
            let ax = self.mul_raw(a, x);
            x = self.mul_raw(x, self.sub(&two, &ax));
        }
        Some(x)
    }

    fn pow_raw(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// Reduction modulo the maximal ideal (p): GR(p^k, f) -> F_q.
    pub fn residue(&self, a: u32) -> u32 {
        let p = self.t.desc.p;
        let d = self.digits(a);
        let r: Vec<u64> = d.iter().map(|c| c % p).collect();
        self.residue_field().from_digits(&r)
    }

    /// Canonical set-theoretic section of `residue`: digits in [0, p).
    pub fn naive_lift(&self, field: &GaloisRing, x: u32) -> u32 {
        debug_assert_eq!(field.p(), self.p());
        self.from_digits(&field.digits(x)[..self.t.desc.f])
    }

    /// A generator of the cyclic group F_q^* (only meaningful for fields).
    pub fn primitive_element(&self) -> u32 {
        let q = self.q();
        let order = q - 1;
        let prime_factors: Vec<u64> = (2..=order).filter(|&d| order % d == 0 && is_prime(d)).collect();
        for a in 1..self.size() as u32 {
            if prime_factors
                .iter()
                .all(|&l| self.pow(&a, order / l) != self.one())
            {
                return a;
            }
        }
        self.one()
    }

    /// The nonzero elements of the residue field, i.e. F_q^*.
    pub fn units_of_field(&self) -> Vec<u32> {
        (1..self.size() as u32).collect()
    }
}

impl Ring for GaloisRing {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn from_int(&self, n: i64) -> u32 {
        let pk = self.t.pk as i64;
        (n.rem_euclid(pk)) as u32
    }

    fn add(&self, a: &u32, b: &u32) -> u32 {
        if self.t.desc.f == 1 {
            return ((*a as u64 + *b as u64) % self.t.pk) as u32;
        }
        let da = self.digits(*a);
        let db = self.digits(*b);
        let mut s = [0u64; MAX_DEGREE];
        for i in 0..self.t.desc.f {
            s[i] = (da[i] + db[i]) % self.t.pk;
        }
        self.from_digits(&s)
    }

    fn neg(&self, a: &u32) -> u32 {
        let pk = self.t.pk;
        if self.t.desc.f == 1 {
            return ((pk - *a as u64) % pk) as u32;
        }
        let da = self.digits(*a);
        let mut s = [0u64; MAX_DEGREE];
        for i in 0..self.t.desc.f {
            s[i] = (pk - da[i]) % pk;
        }
        self.from_digits(&s)
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        match &self.t.mul {
            Some(table) => table[*a as usize * self.t.size as usize + *b as usize],
            None => self.mul_raw(*a, *b),
        }
    }

    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn equal(&self, a: &u32, b: &u32) -> bool {
        a == b
    }

    fn inv(&self, a: &u32) -> Option<u32> {
        match &self.t.inv {
            Some(table) => {
                let v = table[*a as usize];
                (v != u32::MAX).then_some(v)
            }
            None => self.inv_raw(*a),
        }
    }

    fn is_field(&self) -> bool {
        self.t.desc.k == 1
    }

    fn name(&self) -> String {
        let d = &self.t.desc;
        if d.k == 1 {
            format!("F_{}", self.q())
        } else {
            format!("GR({},{})", self.t.pk, d.f)
        }
    }

    fn render(&self, a: &u32) -> String {
        if self.t.desc.f == 1 {
            return a.to_string();
        }
        let d = self.digits(*a);
        let parts: Vec<String> = d[..self.t.desc.f].iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}
