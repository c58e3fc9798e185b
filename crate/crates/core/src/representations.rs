//! Homogeneous polynomial representations V_n and their duals.
//!
//! `ρ_n(g)` sends `X^j Y^(n−j)` to `(aX+bY)^j (cX+dY)^(n−j)` where
//! `(a b; c d) = g^(−1)`. The dual uses the contragredient convention
//! `⟨g·φ, P⟩ = ⟨φ, ρ_n(g^(−1)) P⟩`, so the matrix of `ρ*_n(g)` is the
//! transpose of the substitution matrix of g itself; no inversion is needed.

use serde::{Deserialize, Serialize};

use crate::algebra::linalg::EchelonBasis;
use crate::algebra::mat2::{self, Mat2};
use crate::algebra::{Frac, FracRing, GaloisRing, PolyRing, Ring, Series, SeriesRing};
use crate::error::{Error, Result};

/// Square matrix as a list of rows.
pub type Matrix<E> = Vec<Vec<E>>;

/// Homogeneous polynomial of degree n; `coeffs[j]` multiplies X^j Y^(n−j).
#[derive(Clone, Debug, PartialEq)]
pub struct HomPoly<E> {
    pub n: usize,
    pub coeffs: Vec<E>,
}

/// Linear form on V_n; `coeffs[j]` is its value on X^j Y^(n−j).
#[derive(Clone, Debug, PartialEq)]
pub struct DualVec<E> {
    pub n: usize,
    pub coeffs: Vec<E>,
}

impl<E: Clone> HomPoly<E> {
    pub fn monomial<R: Ring<Elem = E>>(r: &R, n: usize, j: usize) -> Self {
        let mut coeffs = vec![r.zero(); n + 1];
        coeffs[j] = r.one();
        HomPoly { n, coeffs }
    }

    pub fn zero<R: Ring<Elem = E>>(r: &R, n: usize) -> Self {
        HomPoly {
            n,
            coeffs: vec![r.zero(); n + 1],
        }
    }
}

impl<E: Clone> DualVec<E> {
    pub fn zero<R: Ring<Elem = E>>(r: &R, n: usize) -> Self {
        DualVec {
            n,
            coeffs: vec![r.zero(); n + 1],
        }
    }

    pub fn is_zero<R: Ring<Elem = E>>(&self, r: &R) -> bool {
        self.coeffs.iter().all(|c| r.is_zero(c))
    }

    pub fn add<R: Ring<Elem = E>>(&self, r: &R, other: &Self) -> Self {
        DualVec {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| r.add(a, b)).collect(),
        }
    }

    pub fn neg<R: Ring<Elem = E>>(&self, r: &R) -> Self {
        DualVec {
            n: self.n,
            coeffs: self.coeffs.iter().map(|a| r.neg(a)).collect(),
        }
    }

    pub fn scale<R: Ring<Elem = E>>(&self, r: &R, c: &E) -> Self {
        DualVec {
            n: self.n,
            coeffs: self.coeffs.iter().map(|a| r.mul(a, c)).collect(),
        }
    }
}

/// ⟨φ, P⟩.
pub fn evaluate<R: Ring>(r: &R, phi: &DualVec<R::Elem>, p: &HomPoly<R::Elem>) -> R::Elem {
    phi.coeffs
        .iter()
        .zip(&p.coeffs)
        .fold(r.zero(), |acc, (a, b)| r.add(&acc, &r.mul(a, b)))
}

/// Determinant twist: either det^l or a character ξ of K_∞^* that is trivial
/// on 1 + πO_∞, given by ξ(generator of F_q^*) and ξ(π).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistData {
    DetPower(u32),
    Character { on_generator: u32, on_pi: u32 },
}

/// Rings over F_q in which a determinant can be split as π^v · c · (1-unit).
pub trait FqAlgebra: Ring {
    fn residue_field(&self) -> GaloisRing;
    fn embed_fq(&self, c: u32) -> Self::Elem;
    /// (v, c) with x = π^v · c · (1 + O(π)), or None when undecidable.
    fn valuation_and_lead(&self, x: &Self::Elem) -> Option<(i64, u32)>;
}

impl FqAlgebra for GaloisRing {
    fn residue_field(&self) -> GaloisRing {
        GaloisRing::residue_field(self)
    }

    fn embed_fq(&self, c: u32) -> u32 {
        self.naive_lift(&GaloisRing::residue_field(self), c)
    }

    fn valuation_and_lead(&self, x: &u32) -> Option<(i64, u32)> {
        (*x != 0).then(|| (0, self.residue(*x)))
    }
}

impl FqAlgebra for FracRing {
    fn residue_field(&self) -> GaloisRing {
        self.base().residue_field()
    }

    fn embed_fq(&self, c: u32) -> Frac {
        let b = self.base();
        self.from_poly(crate::algebra::poly::trim(vec![b.naive_lift(&b.residue_field(), c)]))
    }

    fn valuation_and_lead(&self, x: &Frac) -> Option<(i64, u32)> {
        if x.num.is_empty() || !self.base().is_field() {
            return None;
        }
        let b = self.base();
        let v = x.den.len() as i64 - x.num.len() as i64;
        let lead = b.mul(x.num.last()?, &b.inv(x.den.last()?)?);
        Some((v, lead))
    }
}

impl FqAlgebra for SeriesRing<GaloisRing> {
    fn residue_field(&self) -> GaloisRing {
        self.base.residue_field()
    }

    fn embed_fq(&self, c: u32) -> Series<GaloisRing> {
        self.monomial(self.base.naive_lift(&self.base.residue_field(), c), 0)
    }

    fn valuation_and_lead(&self, x: &Series<GaloisRing>) -> Option<(i64, u32)> {
        let v = x.valuation()?;
        let c = self.base.residue(x.coeffs[0]);
        (c != 0).then_some((v, c))
    }
}

/// Discrete logarithm in F_q^* to the base of the primitive element.
fn discrete_log(f: &GaloisRing, x: u32) -> u64 {
    let g = f.primitive_element();
    let mut acc = f.one();
    for k in 0..f.q() {
        if acc == x {
            return k;
        }
        acc = f.mul(&acc, &g);
    }
    unreachable!("{x} is not a unit")
}

/// The scalar by which a twist multiplies ρ_n(g), given det g.
pub fn twist_scalar<R: FqAlgebra>(r: &R, twist: &TwistData, det: &R::Elem) -> Result<R::Elem> {
    match twist {
        TwistData::DetPower(l) => Ok(r.pow(det, *l as u64)),
        TwistData::Character { on_generator, on_pi } => {
            let f = r.residue_field();
            let (v, c) = r
                .valuation_and_lead(det)
                .ok_or_else(|| Error::PrecisionExhausted("determinant leading term".into()))?;
            let pi_part = if v >= 0 {
                f.pow(on_pi, v as u64)
            } else {
                f.inv(&f.pow(on_pi, (-v) as u64)).ok_or(Error::NotInvertible)?
            };
            let unit_part = f.pow(on_generator, discrete_log(&f, c));
            Ok(r.embed_fq(f.mul(&pi_part, &unit_part)))
        }
    }
}

fn poly_mul<R: Ring>(r: &R, x: &[R::Elem], y: &[R::Elem]) -> Vec<R::Elem> {
    let mut out = vec![r.zero(); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        if r.is_zero(a) {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            out[i + j] = r.add(&out[i + j], &r.mul(a, b));
        }
    }
    out
}

/// Matrix (rows indexed by output monomial) of P(X, Y) ↦ P(aX+bY, cX+dY).
pub fn substitution_matrix<R: Ring>(r: &R, m: &Mat2<R::Elem>, n: usize) -> Matrix<R::Elem> {
    let lin1 = vec![m.b.clone(), m.a.clone()];
    let lin2 = vec![m.d.clone(), m.c.clone()];
    let mut pow1 = vec![vec![r.one()]];
    let mut pow2 = vec![vec![r.one()]];
    for k in 0..n {
        pow1.push(poly_mul(r, &pow1[k], &lin1));
        pow2.push(poly_mul(r, &pow2[k], &lin2));
    }
    let mut mat = vec![vec![r.zero(); n + 1]; n + 1];
    for j in 0..=n {
        let col = poly_mul(r, &pow1[j], &pow2[n - j]);
        for (i, c) in col.into_iter().enumerate() {
            mat[i][j] = c;
        }
    }
    mat
}

pub fn mat_mul<R: Ring>(r: &R, x: &Matrix<R::Elem>, y: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let inner = y.len();
    let cols = y.first().map_or(0, |row| row.len());
    x.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(r.zero(), |acc, k| r.add(&acc, &r.mul(&row[k], &y[k][j]))))
                .collect()
        })
        .collect()
}

pub fn apply<R: Ring>(r: &R, m: &Matrix<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(r.zero(), |acc, (a, b)| r.add(&acc, &r.mul(a, b))))
        .collect()
}

fn transpose<E: Clone>(m: &Matrix<E>) -> Matrix<E> {
    let n = m.len();
    let k = m.first().map_or(0, |r| r.len());
    (0..k).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect()
}

/// Matrix of ρ_n(g), optionally twisted.
pub fn rho_matrix<R: FqAlgebra>(
    r: &R,
    g: &Mat2<R::Elem>,
    n: usize,
    twist: Option<&TwistData>,
) -> Result<Matrix<R::Elem>> {
    let inv = mat2::inverse(r, g)?;
    let mut m = substitution_matrix(r, &inv, n);
    if let Some(t) = twist {
        let s = twist_scalar(r, t, &mat2::det(r, g))?;
        m = m.into_iter().map(|row| row.iter().map(|x| r.mul(x, &s)).collect()).collect();
    }
    Ok(m)
}

/// Matrix of ρ*_n(g) in the dual monomial basis: the transpose of ρ_n(g^(−1)).
pub fn rho_dual_matrix<R: FqAlgebra>(
    r: &R,
    g: &Mat2<R::Elem>,
    n: usize,
    twist: Option<&TwistData>,
) -> Result<Matrix<R::Elem>> {
    let mut m = transpose(&substitution_matrix(r, g, n));
    if let Some(t) = twist {
        let s = twist_scalar(r, t, &mat2::det(r, g))?;
        let s_inv = r
            .inv(&s)
            .ok_or_else(|| Error::NotAUnit("twist value".into()))?;
        m = m.into_iter().map(|row| row.iter().map(|x| r.mul(x, &s_inv)).collect()).collect();
    }
    Ok(m)
}

pub fn rho_apply<R: FqAlgebra>(
    r: &R,
    g: &Mat2<R::Elem>,
    p: &HomPoly<R::Elem>,
    twist: Option<&TwistData>,
) -> Result<HomPoly<R::Elem>> {
    let m = rho_matrix(r, g, p.n, twist)?;
    Ok(HomPoly {
        n: p.n,
        coeffs: apply(r, &m, &p.coeffs),
    })
}

pub fn rho_dual_apply<R: FqAlgebra>(
    r: &R,
    g: &Mat2<R::Elem>,
    phi: &DualVec<R::Elem>,
    twist: Option<&TwistData>,
) -> Result<DualVec<R::Elem>> {
    let m = rho_dual_matrix(r, g, phi.n, twist)?;
    Ok(DualVec {
        n: phi.n,
        coeffs: apply(r, &m, &phi.coeffs),
    })
}

/// Whether n ∈ 𝒟 = {m, m·p^r − 1 : 0 < m < p, r > 0}.
pub fn dee_contains(n: u64, p: u64) -> bool {
    if n == 0 {
        return false;
    }
    if n < p {
        return true;
    }
    let mut pr = p;
    while pr <= n + 1 {
        if (n + 1) % pr == 0 {
            let m = (n + 1) / pr;
            if m > 0 && m < p {
                return true;
            }
        }
        pr = match pr.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    false
}

/// True when no binomial C(n, i), 0 ≤ i ≤ n, vanishes mod p (Pascal's rule).
pub fn binomials_all_nonzero(n: u64, p: u64) -> bool {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = (row[i - 1] + row[i]) % p;
        }
        row = next;
    }
    row.iter().all(|&c| c % p != 0)
}

/// α(n) = max{β ∈ 𝒟 : β ≤ n}; α(0) = 0 by convention (V_0 is generated by 1).
pub fn alpha(n: u64, p: u64) -> u64 {
    if n < p {
        return n;
    }
    // Elements of D at least p have the form m·p^k − 1 with 1 ≤ m < p.
    let mut best = p - 1;
    let mut pk = p;
    while pk <= n + 1 {
        let m = ((n + 1) / pk).min(p - 1);
        best = best.max(m * pk - 1);
        pk = match pk.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    best
}

/// The matrices γ_a, δ_a of the cyclicity argument, with their inverses
/// γ_a^(−1) = (a 1; 1 0) and δ_a^(−1) = (a 1; 0 1).
#[derive(Clone, Debug)]
pub struct ProofMatrices<E> {
    pub gamma_inv: Mat2<E>,
    pub delta_inv: Mat2<E>,
    pub gamma: Mat2<E>,
    pub delta: Mat2<E>,
}

pub fn proof_matrices<R: Ring>(r: &R, a: &R::Elem) -> Result<ProofMatrices<R::Elem>> {
    let gamma_inv = Mat2::new(a.clone(), r.one(), r.one(), r.zero());
    let delta_inv = Mat2::new(a.clone(), r.one(), r.zero(), r.one());
    let gamma = mat2::inverse(r, &gamma_inv)?;
    let delta = mat2::inverse(r, &delta_inv)
        .map_err(|_| Error::NotAUnit(format!("delta_a needs a unit, got {}", r.render(a))))?;
    Ok(ProofMatrices {
        gamma_inv,
        delta_inv,
        gamma,
        delta,
    })
}

/// Outcome of the cyclicity closure over L = F_q(t).
#[derive(Clone, Debug)]
pub struct Closure {
    pub n: usize,
    pub alpha: usize,
    pub dimension: usize,
    /// Spanning vectors, each the image of the generator under `words[i]`.
    pub basis: Vec<Vec<Frac>>,
    /// Words in the generator list, applied right to left (last index first).
    pub words: Vec<Vec<usize>>,
    /// The generators as matrices of ρ_n, in word-index order.
    pub generators: Vec<Matrix<Frac>>,
    pub generator_labels: Vec<String>,
}

impl Closure {
    pub fn is_full(&self) -> bool {
        self.dimension == self.n + 1
    }
}

/// Default sample values: F_q^* together with 1 ± π and π ± 1, as elements of
/// K = F_q(t) (π = 1/t).
pub fn default_samples(field: &GaloisRing) -> Vec<Frac> {
    let k = FracRing::new(*field);
    let pr = PolyRing::new(*field);
    let mut out: Vec<Frac> = field.units_of_field().into_iter().map(|c| k.from_poly(vec![c])).collect();
    let t = pr.t();
    let one = pr.one();
    let pi = k.make(one.clone(), t.clone());
    for x in [k.add(&k.one(), &pi), k.sub(&k.one(), &pi), k.add(&pi, &k.one()), k.sub(&pi, &k.one())] {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Applies a word (indices into `gens`, rightmost applied first) to v.
pub fn apply_word<R: Ring>(r: &R, gens: &[Matrix<R::Elem>], word: &[usize], v: &[R::Elem]) -> Vec<R::Elem> {
    word.iter().rev().fold(v.to_vec(), |acc, &i| apply(r, &gens[i], &acc))
}

/// Span of the orbit of `start` under ρ_n(γ_a), ρ_n(δ_a), a ∈ samples, grown
/// to a fixed point.
pub fn closure_from(field: &GaloisRing, n: usize, samples: &[Frac], start: Vec<Frac>) -> Result<Closure> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample set".into()));
    }
    let k = FracRing::new(*field);
    let mut generators = Vec::new();
    let mut labels = Vec::new();
    for a in samples {
        let pm = proof_matrices(&k, a)?;
        generators.push(substitution_matrix(&k, &pm.gamma_inv, n));
        labels.push(format!("gamma[{}]", k.render(a)));
        generators.push(substitution_matrix(&k, &pm.delta_inv, n));
        labels.push(format!("delta[{}]", k.render(a)));
    }
    let mut span = EchelonBasis::new(k, n + 1);
    let mut basis = Vec::new();
    let mut words: Vec<Vec<usize>> = Vec::new();
    if span.insert(&start) {
        basis.push(start);
        words.push(Vec::new());
    }
    let mut next = 0;
    while next < basis.len() && !span.is_full() {
        let v = basis[next].clone();
        let w = words[next].clone();
        next += 1;
        for (gi, g) in generators.iter().enumerate() {
            let img = apply(&k, g, &v);
            if span.insert(&img) {
                let mut word = vec![gi];
                word.extend(&w);
                basis.push(img);
                words.push(word);
            }
        }
    }
    Ok(Closure {
        n,
        alpha: alpha(n as u64, field.p()) as usize,
        dimension: span.rank(),
        basis,
        words,
        generators,
        generator_labels: labels,
    })
}

/// Cyclicity closure started from the generator X^α Y^(n−α). Twists act by
/// scalars and do not change spans, so they are accepted and ignored.
pub fn cyclicity_closure(
    field: &GaloisRing,
    n: usize,
    _twist: Option<&TwistData>,
    samples: Option<&[Frac]>,
) -> Result<Closure> {
    let k = FracRing::new(*field);
    let defaults = default_samples(field);
    let samples = samples.unwrap_or(&defaults);
    let a = alpha(n as u64, field.p()) as usize;
    let start = HomPoly::monomial(&k, n, a).coeffs;
    closure_from(field, n, samples, start)
}

/// Random element of GL₂(K) with polynomial entries of degree < len.
fn random_kmat<G: rand::Rng>(k: &FracRing, rng: &mut G, len: usize) -> Mat2<Frac> {
    let q = k.base().q() as u32;
    loop {
        let mut e = || k.from_poly(crate::algebra::poly::trim((0..len).map(|_| rng.gen_range(0..q)).collect()));
        let g = Mat2::new(e(), e(), e(), e());
        if !k.is_zero(&mat2::det(k, &g)) {
            return g;
        }
    }
}

/// Checks that span{X^(pj) Y^(n−pj)} is ρ_n-stable for sampled g ∈ GL₂(K).
/// Returns (invariant, dimension).
pub fn subrep_probe(p: u64, n: usize, samples: usize, seed: u64) -> Result<(bool, usize)> {
    use rand::SeedableRng;
    if n == 0 || n as u64 % p != 0 {
        return Err(Error::NotApplicable(format!("p = {p} does not divide n = {n}")));
    }
    let field = GaloisRing::field(p, 1)?;
    let k = FracRing::new(field);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut invariant = true;
    for _ in 0..samples {
        let g = random_kmat(&k, &mut rng, 3);
        let m = rho_matrix(&k, &g, n, None)?;
        for j in (0..=n).step_by(p as usize) {
            for (i, row) in m.iter().enumerate() {
                if i as u64 % p != 0 && !k.is_zero(&row[j]) {
                    invariant = false;
                }
            }
        }
    }
    Ok((invariant, n / p as usize + 1))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeVerdict {
    NoProperSubspace,
    ProperSubspace { basis: Vec<Vec<u32>> },
}

/// All of GL₂(F_q).
pub fn enumerate_gl2(f: &GaloisRing) -> Vec<Mat2<u32>> {
    let els: Vec<u32> = f.elements().collect();
    let mut out = Vec::new();
    for &a in &els {
        for &b in &els {
            for &c in &els {
                for &d in &els {
                    let g = Mat2::new(a, b, c, d);
                    if mat2::det(f, &g) != 0 {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive search for a proper ρ_n-stable subspace of V_n(F_q) under
/// G(F_q). Every nonzero stable subspace contains a cyclic one, so checking
/// the cyclic subspace of every projective point is a complete test.
pub fn irreducibility_probe(f: &GaloisRing, n: usize, twist: Option<&TwistData>) -> Result<ProbeVerdict> {
    let q = f.q();
    if q > 4 {
        return Err(Error::TooLarge(format!("q = {q} > 4")));
    }
    let points = (q as f64).powi(n as i32 + 1);
    if points > (1u64 << 20) as f64 {
        return Err(Error::TooLarge(format!("q^(n+1) = {points} vectors")));
    }
    let group = enumerate_gl2(f);
    let prim = f.primitive_element();
    let gens_mats = [
        Mat2::new(prim, 0, 0, 1),
        Mat2::new(1, 1, 0, 1),
        Mat2::new(0, 1, 1, 0),
    ];
    // The three generators generate the enumerated group.
    let mut reached = std::collections::HashSet::from([Mat2::new(1u32, 0, 0, 1)]);
    let mut frontier = vec![Mat2::new(1u32, 0, 0, 1)];
    while let Some(x) = frontier.pop() {
        for g in &gens_mats {
            let y = mat2::mul(f, g, &x);
            if reached.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    debug_assert_eq!(reached.len(), group.len());
    let gens: Vec<Matrix<u32>> = gens_mats
        .iter()
        .map(|g| rho_matrix(f, g, n, twist))
        .collect::<Result<_>>()?;
    let dim = n + 1;
    let total = q.pow(dim as u32);
    for code in 1..total {
        let mut v = Vec::with_capacity(dim);
        let mut c = code;
        for _ in 0..dim {
            v.push((c % q) as u32);
            c /= q;
        }
        // Projective representative: first nonzero coordinate equal to 1.
        if v.iter().find(|x| **x != 0) != Some(&1) {
            continue;
        }
        let mut span = EchelonBasis::new(*f, dim);
        span.insert(&v);
        let mut queue = vec![v];
        while let Some(w) = queue.pop() {
            for g in &gens {
                let img = apply(f, g, &w);
                if span.insert(&img) {
                    queue.push(img);
                }
            }
            if span.is_full() {
                break;
            }
        }
        if !span.is_full() {
            return Ok(ProbeVerdict::ProperSubspace { basis: span.basis() });
        }
    }
    Ok(ProbeVerdict::NoProperSubspace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64) -> GaloisRing {
        GaloisRing::field(p, 1).unwrap()
    }

    /// Binomial coefficient mod p via exact big arithmetic.
    fn binom_mod(n: u64, i: u64, p: u64) -> u64 {
        let mut c = num_bigint::BigUint::from(1u32);
        for k in 0..i {
            c = c * (n - k) / (k + 1);
        }
        (c % p).try_into().unwrap()
    }

    #[test]
    fn dee_small_cases() {
        assert!(dee_contains(1, 2) && dee_contains(1, 7));
        assert!(dee_contains(3, 2));
        assert!(!dee_contains(2, 2));
        assert!((0..=3).all(|i| binom_mod(3, i, 2) == 1));
        assert_eq!(binom_mod(2, 1, 2), 0);
        for p in [2, 3, 5, 7] {
            for n in 1..=60 {
                let direct = (0..=n).all(|i| binom_mod(n, i, p) != 0);
                assert_eq!(dee_contains(n, p), direct, "n={n} p={p}");
                assert_eq!(binomials_all_nonzero(n, p), direct);
            }
        }
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(4, 3), 2);
        assert_eq!(alpha(10, 2), 7);
        for p in [2, 3, 5, 7] {
            for n in 1..=500 {
                let a = alpha(n, p);
                assert!(dee_contains(a, p) && a <= n && 2 * a >= n);
                assert_eq!(a == n, dee_contains(n, p));
            }
        }
    }

    #[test]
    fn rho_basics() {
        let k = FracRing::new(f(2));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_kmat(&k, &mut rng, 3);
        let p0 = HomPoly { n: 0, coeffs: vec![k.one()] };
        assert_eq!(rho_apply(&k, &g, &p0, None).unwrap(), p0);
        let id = mat2::identity(&k);
        let p = HomPoly { n: 3, coeffs: (0..4).map(|i| k.from_int(i)).collect() };
        assert_eq!(rho_apply(&k, &id, &p, None).unwrap(), p);
        // p = 2: X² ↦ (aX + bY)² = a²X² + b²Y² with (a b; c d) = g^(−1).
        let inv = mat2::inverse(&k, &g).unwrap();
        let img = rho_apply(&k, &g, &HomPoly::monomial(&k, 2, 2), None).unwrap();
        assert_eq!(img.coeffs[2], k.mul(&inv.a, &inv.a));
        assert_eq!(img.coeffs[0], k.mul(&inv.b, &inv.b));
        assert!(k.is_zero(&img.coeffs[1]));
    }

    #[test]
    fn rho_is_a_homomorphism_and_dual_pairs() {
        for p in [2, 3] {
            let k = FracRing::new(f(p));
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for n in [1usize, 2, 4] {
                for _ in 0..20 {
                    let g = random_kmat(&k, &mut rng, 2);
                    let h = random_kmat(&k, &mut rng, 2);
                    let gh = mat2::mul(&k, &g, &h);
                    let lhs = rho_matrix(&k, &gh, n, None).unwrap();
                    let rhs = mat_mul(&k, &rho_matrix(&k, &g, n, None).unwrap(), &rho_matrix(&k, &h, n, None).unwrap());
                    assert_eq!(lhs, rhs);
                    let dl = rho_dual_matrix(&k, &gh, n, None).unwrap();
                    let dr = mat_mul(&k, &rho_dual_matrix(&k, &g, n, None).unwrap(), &rho_dual_matrix(&k, &h, n, None).unwrap());
                    assert_eq!(dl, dr);
                    let phi = DualVec { n, coeffs: (0..=n).map(|_| k.from_int(rng.gen_range(0..p as i64))).collect() };
                    let pp = HomPoly { n, coeffs: (0..=n).map(|_| k.from_int(rng.gen_range(0..p as i64))).collect() };
                    let gphi = rho_dual_apply(&k, &g, &phi, None).unwrap();
                    let ginv = mat2::inverse(&k, &g).unwrap();
                    let lhs = evaluate(&k, &gphi, &pp);
                    let rhs = evaluate(&k, &phi, &rho_apply(&k, &ginv, &pp, None).unwrap());
                    assert_eq!(lhs, rhs);
                    let id = mat2::identity(&k);
                    assert_eq!(rho_dual_apply(&k, &id, &phi, None).unwrap(), phi);
                }
            }
        }
    }

    #[test]
    fn twists_scale_by_determinant() {
        let k = FracRing::new(f(3));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = random_kmat(&k, &mut rng, 2);
            let plain = rho_matrix(&k, &g, 2, None).unwrap();
            let tw = rho_matrix(&k, &g, 2, Some(&TwistData::DetPower(2))).unwrap();
            let d2 = k.pow(&mat2::det(&k, &g), 2);
            for (r1, r2) in plain.iter().zip(&tw) {
                for (a, b) in r1.iter().zip(r2) {
                    assert_eq!(k.mul(a, &d2), *b);
                }
            }
            let h = random_kmat(&k, &mut rng, 2);
            let xi = TwistData::Character { on_generator: 2, on_pi: 2 };
            let gh = mat2::mul(&k, &g, &h);
            let lhs = rho_matrix(&k, &gh, 2, Some(&xi)).unwrap();
            let rhs = mat_mul(&k, &rho_matrix(&k, &g, 2, Some(&xi)).unwrap(), &rho_matrix(&k, &h, 2, Some(&xi)).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    /// Direct expansion oracle: Σ C(α,i) a^i X^(n−α+i) Y^(α−i) and Σ C(α,i) a^i X^i Y^(n−i).
    #[test]
    fn proof_matrix_expansions() {
        let k = FracRing::new(f(3));
        let (n, al) = (4usize, 2usize);
        assert_eq!(alpha(4, 3), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_kmat(&k, &mut rng, 2).a;
            if k.is_zero(&a) {
                continue;
            }
            let pm = proof_matrices(&k, &a).unwrap();
            let gen = HomPoly::monomial(&k, n, al);
            let gi = rho_apply(&k, &pm.gamma, &gen, None).unwrap();
            let di = rho_apply(&k, &pm.delta, &gen, None).unwrap();
            let mut e1 = vec![k.zero(); n + 1];
            let mut e2 = vec![k.zero(); n + 1];
            for i in 0..=al {
                let c = k.mul(&k.from_int(binom_mod(al as u64, i as u64, 3) as i64), &k.pow(&a, i as u64));
                e1[n - al + i] = k.add(&e1[n - al + i], &c);
                e2[i] = k.add(&e2[i], &c);
            }
            assert_eq!(gi.coeffs, e1);
            assert_eq!(di.coeffs, e2);
        }
        let one = k.one();
        let pm = proof_matrices(&k, &one).unwrap();
        assert_eq!(pm.gamma_inv, Mat2::new(k.one(), k.one(), k.one(), k.zero()));
        assert!(proof_matrices(&k, &k.zero()).is_err());
    }

    /// Oracle: rank of the images of the generator under all words of length ≤ 3.
    fn word_oracle_rank(p: u64, n: usize) -> usize {
        let field = f(p);
        let k = FracRing::new(field);
        let cl = cyclicity_closure(&field, n, None, None).unwrap();
        let start = HomPoly::monomial(&k, n, alpha(n as u64, p) as usize).coeffs;
        let mut vecs = vec![start.clone()];
        let mut layer = vec![start];
        for _ in 0..3 {
            let mut next = Vec::new();
            for v in &layer {
                for g in &cl.generators {
                    next.push(apply(&k, g, v));
                }
            }
            vecs.extend(next.iter().cloned());
            layer = next;
        }
        crate::algebra::linalg::rank(&k, &vecs, n + 1)
    }

    #[test]
    fn cyclicity_examples() {
        let c = cyclicity_closure(&f(2), 0, None, None).unwrap();
        assert_eq!(c.dimension, 1);
        let c = cyclicity_closure(&f(2), 3, None, None).unwrap();
        assert_eq!((c.alpha, c.dimension), (3, 4));
        assert_eq!(word_oracle_rank(2, 3), 4);
        let c = cyclicity_closure(&f(3), 4, None, None).unwrap();
        assert_eq!((c.alpha, c.dimension), (2, 5));
        assert_eq!(word_oracle_rank(3, 4), 5);
        // Spanning words replay to the stored basis.
        let k = FracRing::new(f(3));
        for (w, b) in c.words.iter().zip(&c.basis) {
            let start = HomPoly::monomial(&k, 4, 2).coeffs;
            assert_eq!(&apply_word(&k, &c.generators, w, &start), b);
        }
    }

    #[test]
    fn frobenius_subrepresentation() {
        assert_eq!(subrep_probe(2, 2, 10, 1).unwrap(), (true, 2));
        assert_eq!(subrep_probe(3, 3, 10, 1).unwrap(), (true, 2));
        assert!(matches!(subrep_probe(2, 3, 10, 1), Err(Error::NotApplicable(_))));
        let field = f(2);
        let k = FracRing::new(field);
        let c = closure_from(&field, 4, &default_samples(&field), HomPoly::monomial(&k, 4, 4).coeffs).unwrap();
        assert!(c.dimension <= 3);
    }

    #[test]
    fn irreducibility() {
        assert_eq!(enumerate_gl2(&f(2)).len(), 6);
        assert_eq!(irreducibility_probe(&f(2), 1, None).unwrap(), ProbeVerdict::NoProperSubspace);
        match irreducibility_probe(&f(2), 2, None).unwrap() {
            ProbeVerdict::ProperSubspace { basis } => {
                let k = f(2);
                let mut span = EchelonBasis::new(k, 3);
                for b in &basis {
                    span.insert(b);
                }
                assert!(span.contains(&[1, 0, 0]) || span.contains(&[0, 0, 1]));
            }
            v => panic!("unexpected {v:?}"),
        }
        for n in 0..3 {
            assert_eq!(irreducibility_probe(&f(3), n, None).unwrap(), ProbeVerdict::NoProperSubspace);
        }
        assert!(irreducibility_probe(&f(5), 1, None).is_err());
    }
}
