//! Rational functions in t.
//!
//! Over a field F_q this is the global field K = F_q(t), stored in lowest
//! terms with a monic denominator. Over a Galois ring GR(p^k, f) with k > 1
//! it is the localisation GR[t]_S at polynomials with nonzero residue: a
//! local ring with maximal ideal (p) and residue field F_q(t).

use super::galois::GaloisRing;
use super::poly::{trim, Poly, PolyRing};
use super::ring::Ring;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frac {
    pub num: Poly,
    pub den: Poly,
}

impl Frac {
    pub fn from_poly(num: Poly) -> Self {
        Frac { num, den: vec![1] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FracRing {
    pub polys: PolyRing,
}

impl FracRing {
    pub fn new(base: GaloisRing) -> Self {
        Self {
            polys: PolyRing::new(base),
        }
    }

    pub fn base(&self) -> GaloisRing {
        self.polys.base
    }

    fn residue_nonzero(&self, a: &Poly) -> bool {
        let b = self.base();
        a.iter().any(|c| b.residue(*c) != 0)
    }

    pub fn make(&self, num: Poly, den: Poly) -> Frac {
        assert!(self.residue_nonzero(&den), "denominator must have nonzero residue");
        self.normalize(Frac { num, den })
    }

    fn normalize(&self, x: Frac) -> Frac {
        let pr = &self.polys;
        if x.num.is_empty() {
            return Frac { num: Vec::new(), den: vec![1] };
        }
        if self.base().is_field() {
            let g = pr.gcd(&x.num, &x.den);
            let (num, _) = pr.divrem(&x.num, &g).expect("gcd divides");
            let (den, _) = pr.divrem(&x.den, &g).expect("gcd divides");
            let li = self.base().inv(&pr.leading(&den)).expect("nonzero leading");
            return Frac {
                num: pr.scale(&num, li),
                den: pr.scale(&den, li),
            };
        }
        // Local case: strip common powers of t and absorb unit constant denominators.
        let shift = x
            .num
            .iter()
            .take_while(|c| **c == 0)
            .count()
            .min(x.den.iter().take_while(|c| **c == 0).count());
        let num = trim(x.num[shift..].to_vec());
        let den = trim(x.den[shift..].to_vec());
        if den.len() == 1 {
            if let Some(di) = self.base().inv(&den[0]) {
                return Frac {
                    num: pr.scale(&num, di),
                    den: vec![1],
                };
            }
        }
        Frac { num, den }
    }

    pub fn from_poly(&self, p: Poly) -> Frac {
        Frac::from_poly(p)
    }

    /// Coefficientwise reduction GR[t]_S -> F_q(t).
    pub fn residue(&self, x: &Frac) -> Frac {
        let b = self.base();
        let field = FracRing::new(b.residue_field());
        let red = |p: &Poly| trim(p.iter().map(|c| b.residue(*c)).collect());
        field.make(red(&x.num), red(&x.den))
    }

    /// Coefficientwise canonical lift F_q(t) -> GR[t]_S (a section of `residue`).
    pub fn naive_lift(&self, field: &FracRing, x: &Frac) -> Frac {
        let b = self.base();
        let lift = |p: &Poly| trim(p.iter().map(|c| b.naive_lift(&field.base(), *c)).collect());
        self.make(lift(&x.num), lift(&x.den))
    }
}

impl Ring for FracRing {
    type Elem = Frac;

    fn zero(&self) -> Frac {
        Frac { num: Vec::new(), den: vec![1] }
    }

    fn one(&self) -> Frac {
        Frac { num: vec![1], den: vec![1] }
    }

    fn from_int(&self, n: i64) -> Frac {
        Frac::from_poly(self.polys.from_int(n))
    }

    fn add(&self, a: &Frac, b: &Frac) -> Frac {
        let pr = &self.polys;
        if a.den == b.den {
            return self.normalize(Frac {
                num: pr.add(&a.num, &b.num),
                den: a.den.clone(),
            });
        }
        self.normalize(Frac {
            num: pr.add(&pr.mul(&a.num, &b.den), &pr.mul(&b.num, &a.den)),
            den: pr.mul(&a.den, &b.den),
        })
    }

    fn neg(&self, a: &Frac) -> Frac {
        Frac {
            num: self.polys.neg(&a.num),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &Frac, b: &Frac) -> Frac {
        if a.num.is_empty() || b.num.is_empty() {
            return self.zero();
        }
        let pr = &self.polys;
        self.normalize(Frac {
            num: pr.mul(&a.num, &b.num),
            den: pr.mul(&a.den, &b.den),
        })
    }

    fn is_zero(&self, a: &Frac) -> bool {
        a.num.is_empty()
    }

    fn equal(&self, a: &Frac, b: &Frac) -> bool {
        let pr = &self.polys;
        pr.mul(&a.num, &b.den) == pr.mul(&b.num, &a.den)
    }

    fn inv(&self, a: &Frac) -> Option<Frac> {
        if !self.residue_nonzero(&a.num) {
            return None;
        }
        Some(self.normalize(Frac {
            num: a.den.clone(),
            den: a.num.clone(),
        }))
    }

    fn is_field(&self) -> bool {
        self.base().is_field()
    }

    fn name(&self) -> String {
        format!("{}(t)", self.base().name())
    }

    fn render(&self, a: &Frac) -> String {
        let n = self.polys.render(&a.num);
        if a.den == vec![1] {
            n
        } else {
            format!("({n})/({})", self.polys.render(&a.den))
        }
    }

    fn from_function_field(&self, x: &Frac) -> Option<Frac> {
        self.base().is_field().then(|| x.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic_reduces() {
        let k = FracRing::new(GaloisRing::field(2, 1).unwrap());
        let pr = k.polys;
        let x = k.make(pr.parse("t^2+1").unwrap(), pr.parse("t+1").unwrap());
        assert_eq!(x, Frac::from_poly(pr.parse("t+1").unwrap()));
        let y = k.inv(&x).unwrap();
        assert_eq!(k.mul(&x, &y), k.one());
    }

    #[test]
    fn local_ring_units() {
        let r = FracRing::new(GaloisRing::galois(2, 2, 1).unwrap());
        let two = r.from_int(2);
        assert!(r.inv(&two).is_none());
        let x = Frac::from_poly(vec![2, 1]);
        let xi = r.inv(&x).unwrap();
        assert!(r.equal(&r.mul(&x, &xi), &r.one()));
    }

    #[test]
    fn residue_is_homomorphism_on_samples() {
        let base = GaloisRing::galois(3, 2, 1).unwrap();
        let r = FracRing::new(base);
        let k = FracRing::new(base.residue_field());
        let a = r.make(vec![4, 1, 3], vec![1, 3]);
        let b = r.make(vec![2, 7], vec![5, 0, 1]);
        assert!(k.equal(&r.residue(&r.mul(&a, &b)), &k.mul(&r.residue(&a), &r.residue(&b))));
        assert!(k.equal(&r.residue(&r.add(&a, &b)), &k.add(&r.residue(&a), &r.residue(&b))));
        let x = k.make(vec![1, 2], vec![2, 0, 1]);
        assert!(k.equal(&r.residue(&r.naive_lift(&k, &x)), &x));
    }
}
