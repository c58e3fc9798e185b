//! 2×2 matrices over any ring of the crate.

use serde::Serialize;

use super::frac::Frac;
use super::galois::GaloisRing;
use super::poly::Poly;
use super::ring::Ring;
use super::series::{Series, SeriesRing};
use crate::error::{Error, Result};

/// The matrix (a b; c d).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Mat2<E> {
    pub a: E,
    pub b: E,
    pub c: E,
    pub d: E,
}

/// Element of G(K_∞) with truncated-series entries.
pub type Matrix2 = Mat2<Series<GaloisRing>>;
/// Element of G(K), K = F_q(t), with exact entries.
pub type KMat = Mat2<Frac>;
/// Element of M_2(A), A = F_q[t].
pub type PolyMat = Mat2<Poly>;

impl<E: Clone> Mat2<E> {
    pub fn new(a: E, b: E, c: E, d: E) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn map<F, T>(&self, f: F) -> Mat2<T>
    where
        F: Fn(&E) -> T,
    {
        Mat2 {
            a: f(&self.a),
            b: f(&self.b),
            c: f(&self.c),
            d: f(&self.d),
        }
    }

    pub fn try_map<F, T>(&self, f: F) -> Result<Mat2<T>>
    where
        F: Fn(&E) -> Result<T>,
    {
        Ok(Mat2 {
            a: f(&self.a)?,
            b: f(&self.b)?,
            c: f(&self.c)?,
            d: f(&self.d)?,
        })
    }

    pub fn entries(&self) -> [&E; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

pub fn identity<R: Ring>(r: &R) -> Mat2<R::Elem> {
    Mat2::new(r.one(), r.zero(), r.zero(), r.one())
}

pub fn diag<R: Ring>(r: &R, x: R::Elem, y: R::Elem) -> Mat2<R::Elem> {
    Mat2::new(x, r.zero(), r.zero(), y)
}

pub fn mul<R: Ring>(r: &R, x: &Mat2<R::Elem>, y: &Mat2<R::Elem>) -> Mat2<R::Elem> {
    let dot = |p: &R::Elem, q: &R::Elem, s: &R::Elem, t: &R::Elem| r.add(&r.mul(p, q), &r.mul(s, t));
    Mat2 {
        a: dot(&x.a, &y.a, &x.b, &y.c),
        b: dot(&x.a, &y.b, &x.b, &y.d),
        c: dot(&x.c, &y.a, &x.d, &y.c),
        d: dot(&x.c, &y.b, &x.d, &y.d),
    }
}

pub fn det<R: Ring>(r: &R, x: &Mat2<R::Elem>) -> R::Elem {
    r.sub(&r.mul(&x.a, &x.d), &r.mul(&x.b, &x.c))
}

pub fn scalar_mul<R: Ring>(r: &R, s: &R::Elem, x: &Mat2<R::Elem>) -> Mat2<R::Elem> {
    x.map(|e| r.mul(s, e))
}

/// Adjugate (d −b; −c a), so that x · adj(x) = det(x) · 1.
pub fn adjugate<R: Ring>(r: &R, x: &Mat2<R::Elem>) -> Mat2<R::Elem> {
    Mat2::new(x.d.clone(), r.neg(&x.b), r.neg(&x.c), x.a.clone())
}

/// Inverse, requiring the determinant to be a unit of the ring.
pub fn inverse<R: Ring>(r: &R, x: &Mat2<R::Elem>) -> Result<Mat2<R::Elem>> {
    let dt = det(r, x);
    let di = r
        .inv(&dt)
        .ok_or_else(|| Error::NotAUnit(format!("determinant {}", r.render(&dt))))?;
    Ok(scalar_mul(r, &di, &adjugate(r, x)))
}

pub fn equal<R: Ring>(r: &R, x: &Mat2<R::Elem>, y: &Mat2<R::Elem>) -> bool {
    r.equal(&x.a, &y.a) && r.equal(&x.b, &y.b) && r.equal(&x.c, &y.c) && r.equal(&x.d, &y.d)
}

pub fn render<R: Ring>(r: &R, x: &Mat2<R::Elem>) -> String {
    format!(
        "[[{},{}],[{},{}]]",
        r.render(&x.a),
        r.render(&x.b),
        r.render(&x.c),
        r.render(&x.d)
    )
}

/// Converts an exact element of G(K) to series entries at the working precision.
pub fn kmat_to_series(s: &SeriesRing<GaloisRing>, g: &KMat) -> Result<Matrix2> {
    g.try_map(|x| s.from_frac(x))
}

pub fn polymat_to_series(s: &SeriesRing<GaloisRing>, g: &PolyMat) -> Matrix2 {
    g.map(|x| s.from_poly(x))
}

pub fn polymat_to_kmat(g: &PolyMat) -> KMat {
    g.map(|x| Frac::from_poly(x.clone()))
}

/// Decides membership in GL₂(O_∞): integral entries and unit determinant,
/// certified at the stored precision.
pub fn in_gl2_integral(s: &SeriesRing<GaloisRing>, g: &Matrix2) -> Result<bool> {
    for e in g.entries() {
        match e.valuation() {
            Some(v) if v < 0 => return Ok(false),
            Some(_) => {}
            None => {
                if let Some(p) = e.prec {
                    if p < 0 {
                        return Err(Error::PrecisionExhausted(
                            "entry not known to be integral".into(),
                        ));
                    }
                }
            }
        }
    }
    let dt = det(s, g);
    match dt.valuation() {
        Some(v) => Ok(v == 0),
        None => Err(Error::PrecisionExhausted("determinant not certified nonzero".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::PolyRing;

    #[test]
    fn poly_inverse_when_det_constant() {
        let pr = PolyRing::new(GaloisRing::field(2, 1).unwrap());
        let g = Mat2::new(vec![1], vec![1], vec![1], vec![0]);
        let gi = inverse(&pr, &g).unwrap();
        assert_eq!(mul(&pr, &g, &gi), identity(&pr));
        let h = Mat2::new(pr.t(), vec![], vec![], vec![1]);
        assert!(inverse(&pr, &h).is_err());
    }

    #[test]
    fn integral_membership() {
        let s = SeriesRing::new(GaloisRing::field(3, 1).unwrap(), 10);
        let id = identity(&s);
        assert!(in_gl2_integral(&s, &id).unwrap());
        let g = diag(&s, s.pi(), s.one());
        assert!(!in_gl2_integral(&s, &g).unwrap());
        let h = Mat2::new(s.one(), s.monomial(1, -1), s.zero(), s.one());
        assert!(!in_gl2_integral(&s, &h).unwrap());
    }
}
