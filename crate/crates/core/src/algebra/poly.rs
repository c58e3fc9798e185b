//! Univariate polynomials over a Galois ring; over a field this is A = F_q[t].

use super::galois::GaloisRing;
use super::ring::Ring;
use crate::error::{Error, Result};

/// Coefficients low-to-high with no trailing zeros; the zero polynomial is empty.
pub type Poly = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    pub base: GaloisRing,
}

pub fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

impl PolyRing {
    pub fn new(base: GaloisRing) -> Self {
        Self { base }
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self, a: &Poly) -> Option<usize> {
        (!a.is_empty()).then(|| a.len() - 1)
    }

    pub fn constant(&self, c: u32) -> Poly {
        trim(vec![c])
    }

    /// The monomial c·t^d.
    pub fn monomial(&self, c: u32, d: usize) -> Poly {
        let mut v = vec![0; d + 1];
        v[d] = c;
        trim(v)
    }

    pub fn t(&self) -> Poly {
        self.monomial(1, 1)
    }

    pub fn leading(&self, a: &Poly) -> u32 {
        a.last().copied().unwrap_or(0)
    }

    pub fn scale(&self, a: &Poly, c: u32) -> Poly {
        trim(a.iter().map(|x| self.base.mul(x, &c)).collect())
    }

    pub fn eval(&self, a: &Poly, x: u32) -> u32 {
        a.iter()
            .rev()
            .fold(0, |acc, c| self.base.add(&self.base.mul(&acc, &x), c))
    }

    /// Division with remainder by a divisor whose leading coefficient is a unit.
    pub fn divrem(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        let r = &self.base;
        let db = self
            .degree(b)
            .ok_or_else(|| Error::InvalidInput("division by zero polynomial".into()))?;
        let lead_inv = r
            .inv(&self.leading(b))
            .ok_or_else(|| Error::NotAUnit("leading coefficient of divisor".into()))?;
        let mut rem = a.clone();
        if rem.len() <= db {
            return Ok((Vec::new(), rem));
        }
        let mut quo = vec![0u32; rem.len() - db];
        while rem.len() > db {
            let top = rem.len() - 1;
            let c = r.mul(&rem[top], &lead_inv);
            let shift = top - db;
            quo[shift] = c;
            for (i, bc) in b.iter().enumerate() {
                rem[shift + i] = r.sub(&rem[shift + i], &r.mul(&c, bc));
            }
            rem.pop();
            rem = trim(rem);
        }
        Ok((trim(quo), rem))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(self.divrem(a, b)?.1)
    }

    /// Monic gcd; the base ring must be a field.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_empty() {
            let r = self.rem(&x, &y).expect("gcd over a field");
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        match a.last() {
            None => Vec::new(),
            Some(l) => {
                let li = self.base.inv(l).expect("monic: leading coefficient must be a unit");
                self.scale(a, li)
            }
        }
    }

    /// Enumerates every polynomial of degree < `bound` (including zero), in
    /// a fixed order: index i has base-|R| digits as coefficients.
    pub fn all_below_degree(&self, bound: usize) -> Vec<Poly> {
        let size = self.base.size();
        let count = size.pow(bound as u32);
        (0..count)
            .map(|mut idx| {
                let mut v = Vec::with_capacity(bound);
                for _ in 0..bound {
                    v.push((idx % size) as u32);
                    idx /= size;
                }
                trim(v)
            })
            .collect()
    }

    /// Parses strings like `1+t^2`, `t^3+t+1`, `2*t+1`, `0`. Coefficients are
    /// element indices of the base ring.
    pub fn parse(&self, s: &str) -> Result<Poly> {
        let bad = || Error::InvalidInput(format!("cannot parse polynomial '{s}'"));
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(bad());
        }
        let mut acc: Poly = Vec::new();
        for term in cleaned.split('+') {
            if term.is_empty() {
                return Err(bad());
            }
            let (coef, power) = match term.split_once('t') {
                None => (term.parse::<i64>().map_err(|_| bad())?, 0usize),
                Some((c, rest)) => {
                    let c = c.trim_end_matches('*');
                    let coef = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| bad())? };
                    let power = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                    };
                    (coef, power)
                }
            };
            if coef < 0 || coef as u64 >= self.base.size() {
                return Err(bad());
            }
            acc = self.add(&acc, &self.monomial(coef as u32, power));
        }
        Ok(acc)
    }
}

impl Ring for PolyRing {
    type Elem = Poly;

    fn zero(&self) -> Poly {
        Vec::new()
    }

    fn one(&self) -> Poly {
        vec![1]
    }

    fn from_int(&self, n: i64) -> Poly {
        trim(vec![self.base.from_int(n)])
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.len().max(b.len());
        let r = &self.base;
        trim(
            (0..n)
                .map(|i| {
                    let x = a.get(i).copied().unwrap_or(0);
                    let y = b.get(i).copied().unwrap_or(0);
                    r.add(&x, &y)
                })
                .collect(),
        )
    }

    fn neg(&self, a: &Poly) -> Poly {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let r = &self.base;
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = r.add(&out[i + j], &r.mul(x, y));
            }
        }
        trim(out)
    }

    fn is_zero(&self, a: &Poly) -> bool {
        a.is_empty()
    }

    fn equal(&self, a: &Poly, b: &Poly) -> bool {
        a == b
    }

    fn inv(&self, a: &Poly) -> Option<Poly> {
        if a.len() == 1 {
            self.base.inv(&a[0]).map(|x| vec![x])
        } else {
            None
        }
    }

    fn is_field(&self) -> bool {
        false
    }

    fn name(&self) -> String {
        format!("{}[t]", self.base.name())
    }

    fn render(&self, a: &Poly) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, c) in a.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let coef = self.base.render(c);
            let term = match (i, coef.as_str()) {
                (0, _) => coef,
                (1, "1") => "t".into(),
                (1, _) => format!("{coef}*t"),
                (_, "1") => format!("t^{i}"),
                _ => format!("{coef}*t^{i}"),
            };
            terms.push(term);
        }
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> PolyRing {
        PolyRing::new(GaloisRing::field(2, 1).unwrap())
    }

    #[test]
    fn parse_and_render() {
        let r = f2();
        let g = r.parse("t^3+t+1").unwrap();
        assert_eq!(g, vec![1, 1, 0, 1]);
        assert_eq!(r.render(&g), "1+t+t^3");
        assert_eq!(r.parse(&r.render(&g)).unwrap(), g);
        assert!(r.parse("t^").is_err());
    }

    #[test]
    fn divrem_reconstructs() {
        let r = PolyRing::new(GaloisRing::field(3, 1).unwrap());
        let a = r.parse("2*t^5+t^2+1").unwrap();
        let b = r.parse("t^2+2").unwrap();
        let (q, rem) = r.divrem(&a, &b).unwrap();
        assert!(rem.len() < b.len());
        assert_eq!(r.add(&r.mul(&q, &b), &rem), a);
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let r = f2();
        let a = r.parse("t^3+t+1").unwrap();
        let b = r.parse("t^2+1").unwrap();
        assert_eq!(r.gcd(&a, &b), vec![1]);
        let c = r.mul(&a, &b);
        assert_eq!(r.gcd(&c, &b), b);
    }

    #[test]
    fn enumeration_counts() {
        let r = f2();
        assert_eq!(r.all_below_degree(3).len(), 8);
        assert_eq!(r.all_below_degree(0), vec![Vec::<u32>::new()]);
    }
}
