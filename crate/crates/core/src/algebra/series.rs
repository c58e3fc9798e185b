//! Truncated Laurent series in the uniformizer π = 1/t.
//!
//! A series is either exact (finitely many terms, known completely) or known
//! modulo π^N for an absolute precision N. "Zero up to precision" (no nonzero
//! coefficient below N) is a distinct state from the exact zero.

use super::frac::Frac;
use super::galois::GaloisRing;
use super::poly::Poly;
use super::ring::Ring;
use crate::error::{Error, Result};

/// Default relative π-adic working precision.
pub const DEFAULT_PRECISION: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries<E> {
    /// Exponent of `coeffs[0]`; the valuation when the leading coefficient is nonzero.
    pub start: i64,
    pub coeffs: Vec<E>,
    /// Absolute precision: the series is known modulo π^prec. `None` = exact.
    pub prec: Option<i64>,
}

impl<E> TruncatedSeries<E> {
    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Position of the first nonzero coefficient, if one is known.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.prec.is_none() && self.coeffs.is_empty()
    }

    pub fn is_zero_up_to_precision(&self) -> bool {
        self.prec.is_some() && self.coeffs.is_empty()
    }

    /// Relative precision (number of known coefficients from the valuation on).
    pub fn relative_precision(&self) -> Option<i64> {
        self.prec.map(|p| p - self.start)
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// Arithmetic context: coefficient ring plus the working relative precision
/// used when an exact operand produces an infinite expansion (inversion).
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRing<R: Ring> {
    pub base: R,
    pub working: usize,
}

pub type Series<R> = TruncatedSeries<<R as Ring>::Elem>;

impl<R: Ring> SeriesRing<R> {
    pub fn new(base: R, working: usize) -> Self {
        Self { base, working }
    }

    fn normalize(&self, start: i64, coeffs: Vec<R::Elem>, prec: Option<i64>) -> Series<R> {
        let lead = coeffs.iter().take_while(|c| self.base.is_zero(c)).count();
        let mut coeffs = coeffs[lead..].to_vec();
        let mut start = start + lead as i64;
        match prec {
            None => {
                while coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
                    coeffs.pop();
                }
                if coeffs.is_empty() {
                    start = 0;
                }
            }
            Some(p) => {
                let keep = (p - start).max(0) as usize;
                coeffs.truncate(keep);
                if coeffs.is_empty() {
                    start = p;
                }
            }
        }
        TruncatedSeries { start, coeffs, prec }
    }

    /// Exact Laurent polynomial Σ coeffs[i] π^(start+i).
    pub fn exact(&self, start: i64, coeffs: Vec<R::Elem>) -> Series<R> {
        self.normalize(start, coeffs, None)
    }

    /// Series known modulo π^prec.
    pub fn with_precision(&self, start: i64, mut coeffs: Vec<R::Elem>, prec: i64) -> Series<R> {
        let need = (prec - start).max(0) as usize;
        coeffs.resize(need.max(coeffs.len()), self.base.zero());
        self.normalize(start, coeffs, Some(prec))
    }

    pub fn zero(&self) -> Series<R> {
        self.exact(0, Vec::new())
    }

    pub fn one(&self) -> Series<R> {
        self.exact(0, vec![self.base.one()])
    }

    pub fn monomial(&self, c: R::Elem, e: i64) -> Series<R> {
        self.exact(e, vec![c])
    }

    /// The uniformizer π.
    pub fn pi(&self) -> Series<R> {
        self.monomial(self.base.one(), 1)
    }

    /// Element of A = R[t] viewed in R((π)) via t = π^(-1). Always exact.
    pub fn from_poly_in_t(&self, p: &[R::Elem]) -> Series<R> {
        if p.is_empty() {
            return self.zero();
        }
        let d = p.len() as i64 - 1;
        self.exact(-d, p.iter().rev().cloned().collect())
    }

    /// Coefficient of π^e, failing when e is beyond the known precision.
    pub fn coefficient(&self, x: &Series<R>, e: i64) -> Result<R::Elem> {
        if let Some(p) = x.prec {
            if e >= p {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient of pi^{e} requested, series known mod pi^{p}"
                )));
            }
        }
        if e < x.start {
            return Ok(self.base.zero());
        }
        Ok(x.coeffs
            .get((e - x.start) as usize)
            .cloned()
            .unwrap_or_else(|| self.base.zero()))
    }

    pub fn add(&self, x: &Series<R>, y: &Series<R>) -> Series<R> {
        let prec = min_prec(x.prec, y.prec);
        let end_of = |s: &Series<R>| s.start + s.coeffs.len() as i64;
        let lo = x.start.min(y.start);
        let hi = match prec {
            Some(p) => p,
            None => end_of(x).max(end_of(y)),
        };
        let get = |s: &Series<R>, e: i64| -> R::Elem {
            if e < s.start || e >= end_of(s) {
                self.base.zero()
            } else {
                s.coeffs[(e - s.start) as usize].clone()
            }
        };
        let coeffs = (lo..hi.max(lo))
            .map(|e| self.base.add(&get(x, e), &get(y, e)))
            .collect();
        self.normalize(lo, coeffs, prec)
    }

    pub fn neg(&self, x: &Series<R>) -> Series<R> {
        TruncatedSeries {
            start: x.start,
            coeffs: x.coeffs.iter().map(|c| self.base.neg(c)).collect(),
            prec: x.prec,
        }
    }

    pub fn sub(&self, x: &Series<R>, y: &Series<R>) -> Series<R> {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &Series<R>, y: &Series<R>) -> Series<R> {
        if x.is_exact_zero() || y.is_exact_zero() {
            return self.zero();
        }
        let prec = min_prec(x.prec.map(|p| p + y.start), y.prec.map(|p| p + x.start));
        let start = x.start + y.start;
        let full = x.coeffs.len() + y.coeffs.len();
        let len = match prec {
            Some(p) => (p - start).max(0) as usize,
            None => full.saturating_sub(1),
        };
        let mut out = vec![self.base.zero(); len];
        for (i, a) in x.coeffs.iter().enumerate() {
            if i >= len || self.base.is_zero(a) {
                continue;
            }
            for (j, b) in y.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = self.base.add(&out[i + j], &self.base.mul(a, b));
            }
        }
        self.normalize(start, out, prec)
    }

    pub fn scale(&self, x: &Series<R>, c: &R::Elem) -> Series<R> {
        let coeffs = x.coeffs.iter().map(|a| self.base.mul(a, c)).collect();
        self.normalize(x.start, coeffs, x.prec)
    }

    /// Multiplicative inverse. The leading known coefficient must be a unit.
    pub fn inv(&self, x: &Series<R>) -> Result<Series<R>> {
        let v = match x.valuation() {
            Some(v) => v,
            None if x.is_exact() => return Err(Error::NotAUnit("exact zero".into())),
            None => {
                return Err(Error::PrecisionExhausted(format!(
                    "cannot certify a nonzero leading term: zero mod pi^{}",
                    x.start
                )))
            }
        };
        let c0_inv = self
            .base
            .inv(&x.coeffs[0])
            .ok_or_else(|| Error::NotAUnit(format!("leading coefficient {}", self.base.render(&x.coeffs[0]))))?;
        if x.is_exact() && x.coeffs.len() == 1 {
            return Ok(self.monomial(c0_inv, -v));
        }
        let rel = match x.prec {
            Some(p) => (p - v) as usize,
            None => self.working,
        };
        let mut b = Vec::with_capacity(rel);
        b.push(c0_inv.clone());
        for i in 1..rel {
            let mut acc = self.base.zero();
            for j in 1..=i.min(x.coeffs.len() - 1) {
                acc = self.base.add(&acc, &self.base.mul(&x.coeffs[j], &b[i - j]));
            }
            b.push(self.base.neg(&self.base.mul(&c0_inv, &acc)));
        }
        Ok(self.normalize(-v, b, Some(-v + rel as i64)))
    }

    pub fn div(&self, x: &Series<R>, y: &Series<R>) -> Result<Series<R>> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// Discards everything from π^n on: the class of x in K_∞ / π^n O_∞, as an
    /// exact Laurent polynomial supported in [val, n).
    pub fn reduce_mod(&self, x: &Series<R>, n: i64) -> Result<Series<R>> {
        if let Some(p) = x.prec {
            if p < n {
                return Err(Error::PrecisionExhausted(format!(
                    "reduction mod pi^{n} needs precision {n}, have {p}"
                )));
            }
        }
        let keep = (n - x.start).max(0) as usize;
        let coeffs = x.coeffs.iter().take(keep).cloned().collect();
        Ok(self.exact(x.start, coeffs))
    }

    pub fn power(&self, x: &Series<R>, mut e: u64) -> Series<R> {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Decides x == y where possible: `Some(false)` on a certified difference,
    /// `Some(true)` if the difference is exactly zero, `None` when they agree
    /// up to the available precision only.
    pub fn compare(&self, x: &Series<R>, y: &Series<R>) -> Option<bool> {
        let d = self.sub(x, y);
        if d.is_exact_zero() {
            Some(true)
        } else if d.valuation().is_some() {
            Some(false)
        } else {
            None
        }
    }

    pub fn render(&self, x: &Series<R>) -> String {
        let mut terms = Vec::new();
        for (i, c) in x.coeffs.iter().enumerate() {
            if self.base.is_zero(c) {
                continue;
            }
            let e = x.start + i as i64;
            let coef = self.base.render(c);
            terms.push(match e {
                0 => coef,
                _ if coef == "1" => format!("pi^{e}"),
                _ => format!("{coef}*pi^{e}"),
            });
        }
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        match x.prec {
            None => body,
            Some(p) => format!("{body} + O(pi^{p})"),
        }
    }
}

impl SeriesRing<GaloisRing> {
    /// Expansion at ∞ of an element of K = F_q(t).
    pub fn from_frac(&self, x: &Frac) -> Result<Series<GaloisRing>> {
        let num = self.from_poly_in_t(&x.num);
        if x.den == vec![1] {
            return Ok(num);
        }
        let den = self.from_poly_in_t(&x.den);
        self.div(&num, &den)
    }

    pub fn from_poly(&self, p: &Poly) -> Series<GaloisRing> {
        self.from_poly_in_t(p)
    }

    /// Coefficientwise reduction GR(p^k,f)((π)) -> F_q((π)); precision is kept.
    pub fn residue(&self, x: &Series<GaloisRing>) -> (SeriesRing<GaloisRing>, Series<GaloisRing>) {
        let field = SeriesRing::new(self.base.residue_field(), self.working);
        let coeffs = x.coeffs.iter().map(|c| self.base.residue(*c)).collect();
        let s = field.normalize(x.start, coeffs, x.prec);
        (field, s)
    }

    /// Coefficientwise canonical lift F_q((π)) -> GR(p^k,f)((π)).
    pub fn naive_lift(&self, field: &GaloisRing, x: &Series<GaloisRing>) -> Series<GaloisRing> {
        let coeffs = x.coeffs.iter().map(|c| self.base.naive_lift(field, *c)).collect();
        self.normalize(x.start, coeffs, x.prec)
    }
}

impl<R: Ring> Ring for SeriesRing<R> {
    type Elem = Series<R>;

    fn zero(&self) -> Self::Elem {
        SeriesRing::zero(self)
    }

    fn one(&self) -> Self::Elem {
        SeriesRing::one(self)
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.exact(0, vec![self.base.from_int(n)])
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        SeriesRing::add(self, a, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        SeriesRing::neg(self, a)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        SeriesRing::mul(self, a, b)
    }

    /// True unless a nonzero coefficient is known; zero-up-to-precision
    /// counts as zero here.
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.is_empty()
    }

    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        SeriesRing::inv(self, a).ok()
    }

    fn is_field(&self) -> bool {
        self.base.is_field()
    }

    fn name(&self) -> String {
        format!("{}((pi))", self.base.name())
    }

    fn render(&self, a: &Self::Elem) -> String {
        SeriesRing::render(self, a)
    }
}
