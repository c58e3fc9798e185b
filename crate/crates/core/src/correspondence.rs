//! Executable forms of the maps relating invariant harmonic cocycles,
//! G(K)-invariant Hom spaces out of Sp_n, automorphic evaluators, and their
//! lifts to characteristic zero.
//!
//! The class set X is a finite list; every shipped configuration has a
//! single class, and automorphic functions exist only as evaluators
//! (x, g_∞, h) ↦ ⟨φ_x, sp_n(g_∞)h⟩ with a support certificate.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;

use crate::algebra::linalg;
use crate::algebra::mat2::{self, Matrix2, PolyMat};
use crate::algebra::{Frac, FracRing, GaloisRing, Integers, Ring, Series, SeriesRing};
use crate::cocycles::{
    build_system, dual_apply, invariant_space, rho_star_poly, verify_on_ball, CoefficientRing, EdgeFunction,
    InvariantCocycle, InvariantSpace, SpaceOptions, Variant,
};
use crate::error::{Error, Result};
use crate::quotient::{act_poly_edge, ArithmeticGroup, QuotientGraph};
use crate::representations::{self, apply_word, Closure, DualVec, HomPoly, Matrix};
use crate::special_rep::{pairing, StepFunction};
use crate::tree::{Tree, TreeEdge};

/// The finite set X with its arithmetic groups Γ_x.
#[derive(Clone, Debug)]
pub struct ClassSet {
    pub classes: Vec<(String, ArithmeticGroup)>,
}

impl ClassSet {
    pub fn singleton(group: ArithmeticGroup) -> Self {
        ClassSet {
            classes: vec![("x0".into(), group)],
        }
    }

    pub fn new(classes: Vec<(String, ArithmeticGroup)>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidInput("empty class set".into()));
        }
        Ok(ClassSet { classes })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Flat G(K)-level data: (class index, edge orbit, value on the orbit
/// representative).
pub type GlobalData<E> = Vec<(usize, usize, DualVec<E>)>;

/// One Γ_x-invariant cocycle per class.
#[derive(Clone, Debug)]
pub struct GlobalCocycle<'a, R: Ring> {
    pub components: Vec<InvariantCocycle<'a, R>>,
}

impl<'a, R: CoefficientRing> GlobalCocycle<'a, R> {
    pub fn degree(&self) -> usize {
        self.components[0].n
    }

    pub fn ring(&self) -> &R {
        &self.components[0].ring
    }

    /// Exact equality of the stored orbit values.
    pub fn equals(&self, other: &Self) -> bool {
        let r = self.ring();
        self.components.len() == other.components.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| {
                let keys: BTreeSet<usize> = a.values.keys().chain(b.values.keys()).copied().collect();
                keys.iter().all(|o| match (a.orbit_value(*o), b.orbit_value(*o)) {
                    (Ok(x), Ok(y)) => x.coeffs.iter().zip(&y.coeffs).all(|(s, t)| r.equal(s, t)),
                    _ => false,
                })
            })
    }

    /// Re-checks ρ*_n(γ⁻¹)φ_x(γe) = φ_x(e) for sampled γ ∈ Γ_x and edges e
    /// near the standard vertex.
    pub fn check_invariance<G: Rng>(&self, rng: &mut G, samples: usize) -> Result<()> {
        for (x, f) in self.components.iter().enumerate() {
            let qg = f.qg;
            let tree = &qg.tree;
            let pr = qg.group.polys();
            let (_, edges) = tree.ball(&tree.standard_vertex(), 2)?;
            let mut pool: Vec<PolyMat> = Vec::new();
            for e in &edges {
                pool.push(qg.locate_edge(e)?.1);
            }
            for v in qg.explored_vertices() {
                pool.extend(v.stabilizer.iter().take(4).cloned());
            }
            for _ in 0..samples {
                let a = &pool[rng.gen_range(0..pool.len())];
                let b = &pool[rng.gen_range(0..pool.len())];
                let c = &pool[rng.gen_range(0..pool.len())];
                let gamma = mat2::mul(&pr, &mat2::mul(&pr, a, &crate::quotient::poly_inverse(&pr, b)), c);
                if crate::quotient::max_degree(&pr, &gamma) > 6 {
                    continue;
                }
                let e = &edges[rng.gen_range(0..edges.len())];
                let moved = act_poly_edge(tree, &gamma, e)?;
                let lhs = match f.value_at(&moved) {
                    Ok(v) => v,
                    Err(Error::OutOfExploredRegion(_)) => continue,
                    Err(err) => return Err(err),
                };
                let rhs = dual_apply(&f.ring, &rho_star_poly(&f.ring, &gamma, f.n)?, &f.value_at(e)?);
                if !lhs.add(&f.ring, &rhs.neg(&f.ring)).is_zero(&f.ring) {
                    return Err(Error::InvarianceViolation(format!(
                        "class {x}: gamma = {} on edge {} -> {}",
                        crate::quotient::render_polymat(&pr, &gamma),
                        e.origin.id(),
                        e.terminus.id()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Splits X-indexed data into its Γ_x-invariant components.
pub fn phi_decompose<'a, R: CoefficientRing>(
    graphs: &[&'a QuotientGraph],
    ring: &R,
    n: usize,
    data: &GlobalData<R::Elem>,
) -> Result<GlobalCocycle<'a, R>> {
    if graphs.is_empty() {
        return Err(Error::InvalidInput("empty class set".into()));
    }
    let mut components: Vec<InvariantCocycle<'a, R>> =
        graphs.iter().map(|qg| InvariantCocycle::zero(qg, ring.clone(), n)).collect();
    for (x, o, v) in data {
        let c = components
            .get_mut(*x)
            .ok_or_else(|| Error::InvalidInput(format!("class index {x} out of range")))?;
        if *o >= c.qg.edges.len() {
            return Err(Error::InvalidInput(format!("edge orbit {o} out of range")));
        }
        c.values.insert(*o, v.clone());
    }
    Ok(GlobalCocycle { components })
}

/// Inverse of [`phi_decompose`].
pub fn phi_compose<R: CoefficientRing>(g: &GlobalCocycle<'_, R>) -> GlobalData<R::Elem> {
    let mut out = Vec::new();
    for (x, c) in g.components.iter().enumerate() {
        for (o, v) in &c.values {
            out.push((x, *o, v.clone()));
        }
    }
    out
}

/// The invariant cocycle of a basis vector computed over F_q(t), with its
/// values expanded in K_∞ so that GL₂(K_∞) can act on coefficients.
pub fn expand_at_infinity<'a>(
    qg: &'a QuotientGraph,
    space: &InvariantSpace<FracRing>,
    vector: &[Frac],
    series: &SeriesRing<GaloisRing>,
) -> Result<InvariantCocycle<'a, SeriesRing<GaloisRing>>> {
    let f = space.cocycle(qg, vector);
    let mut values = BTreeMap::new();
    for (o, v) in f.values {
        let coeffs = v.coeffs.iter().map(|c| series.from_frac(c)).collect::<Result<Vec<Series<GaloisRing>>>>()?;
        values.insert(o, DualVec { n: v.n, coeffs });
    }
    Ok(InvariantCocycle {
        qg,
        ring: series.clone(),
        n: f.n,
        values,
    })
}

/// The standard edge Λ₀ → Λ₁, whose stabiliser times the centre is the
/// compact-open descriptor of support certificates.
pub fn standard_edge(tree: &Tree) -> TreeEdge {
    TreeEdge::new(tree.standard_vertex(), tree.lambda(1))
}

/// (x, g_∞, h) ↦ ⟨φ_x, sp_n(g_∞)h⟩.
#[derive(Clone, Debug)]
pub struct AutomorphicEvaluator<'a, R: Ring> {
    pub global: GlobalCocycle<'a, R>,
    pub weight: usize,
}

impl<'a, R: CoefficientRing> AutomorphicEvaluator<'a, R> {
    pub fn new(global: GlobalCocycle<'a, R>) -> Self {
        let weight = global.degree() + 2;
        AutomorphicEvaluator { global, weight }
    }

    pub fn tree(&self, x: usize) -> &'a Tree {
        &self.global.components[x].qg.tree
    }

    pub fn evaluate(&self, x: usize, g: &Matrix2, h: &StepFunction<R>) -> Result<R::Elem> {
        let f = self
            .global
            .components
            .get(x)
            .ok_or_else(|| Error::InvalidInput(format!("class index {x} out of range")))?;
        pairing(f, &h.sp_apply(&f.qg.tree, g)?)
    }
}

pub fn theta_evaluate<R: CoefficientRing>(
    w: &AutomorphicEvaluator<'_, R>,
    x: usize,
    g: &Matrix2,
    h: &StepFunction<R>,
) -> Result<R::Elem> {
    w.evaluate(x, g, h)
}

/// φ_x(e)(λ) := Θ(x, 1, λ·1_{U(e)}) on every orbit the evaluator stores.
pub fn hom_to_cocycle<'a, R: CoefficientRing>(w: &AutomorphicEvaluator<'a, R>) -> Result<GlobalCocycle<'a, R>> {
    let mut components = Vec::new();
    for (x, f) in w.global.components.iter().enumerate() {
        let qg = f.qg;
        let id = mat2::identity(&qg.tree.series);
        let r = &f.ring;
        let mut out = InvariantCocycle::zero(qg, r.clone(), f.n);
        for &o in f.values.keys() {
            let e = &qg.edges[o].rep;
            let mut coeffs = Vec::with_capacity(f.n + 1);
            for j in 0..=f.n {
                let h = StepFunction::from_indicator(r.clone(), e, HomPoly::monomial(r, f.n, j));
                coeffs.push(w.evaluate(x, &id, &h)?);
            }
            out.values.insert(o, DualVec { n: f.n, coeffs });
        }
        components.push(out);
    }
    Ok(GlobalCocycle { components })
}

/// Certified support region: edges γ·rep(O) for the listed orbits, i.e.
/// g_∞ ∈ Γ_x·S·𝔎_∞·Z(K_∞) with 𝔎_∞ the stabiliser of the standard edge.
#[derive(Clone, Debug, Serialize)]
pub struct SupportCertificate {
    pub descriptor: String,
    /// (class, edge orbit, representative edge id).
    pub cosets: Vec<(usize, usize, String)>,
}

impl SupportCertificate {
    pub fn orbits(&self, x: usize) -> BTreeSet<usize> {
        self.cosets.iter().filter(|c| c.0 == x).map(|c| c.1).collect()
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }
}

pub fn support_certificate<R: CoefficientRing>(w: &AutomorphicEvaluator<'_, R>) -> Result<SupportCertificate> {
    let mut cosets = Vec::new();
    for (x, f) in w.global.components.iter().enumerate() {
        for ed in &f.qg.edges {
            match f.orbit_value(ed.id) {
                Ok(v) if !v.is_zero(&f.ring) => {
                    cosets.push((x, ed.id, format!("{} -> {}", ed.rep.origin.id(), ed.rep.terminus.id())));
                }
                Ok(_) | Err(Error::OutOfExploredRegion(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(SupportCertificate {
        descriptor: "Stab(Λ0 -> Λ1)·Z(K_∞)".into(),
        cosets,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportVerification {
    pub samples: usize,
    pub inside: usize,
    pub outside: usize,
    /// Samples whose edge falls in no orbit known to the quotient.
    pub unlocated: usize,
    pub violations: usize,
}

/// Samples g_∞, and for those with g_∞·e₀ outside the certified orbits
/// checks that Θ(x, g_∞, λ·1_{U(e₀)}) vanishes for every monomial λ.
pub fn verify_support<R: CoefficientRing, G: Rng>(
    w: &AutomorphicEvaluator<'_, R>,
    cert: &SupportCertificate,
    rng: &mut G,
    samples: usize,
) -> Result<SupportVerification> {
    let mut rep = SupportVerification {
        samples,
        inside: 0,
        outside: 0,
        unlocated: 0,
        violations: 0,
    };
    for _ in 0..samples {
        let x = rng.gen_range(0..w.global.components.len());
        let f = &w.global.components[x];
        let tree = &f.qg.tree;
        let e0 = standard_edge(tree);
        let g = tree.random_gl2(rng, 1, 8);
        let moved = tree.act_edge(&g, &e0)?;
        let o = match f.qg.locate_edge(&moved) {
            Ok((o, ..)) => o,
            Err(Error::OutOfExploredRegion(_)) => {
                rep.unlocated += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if cert.orbits(x).contains(&o) {
            rep.inside += 1;
            continue;
        }
        rep.outside += 1;
        for j in 0..=f.n {
            let h = StepFunction::from_indicator(f.ring.clone(), &e0, HomPoly::monomial(&f.ring, f.n, j));
            if !f.ring.is_zero(&w.evaluate(x, &g, &h)?) {
                rep.violations += 1;
                break;
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct InfinityReport {
    /// Always a sampling witness, never a proof.
    pub kind: String,
    pub stabilizer_samples: usize,
    /// Rank of the span of sp_n(k)u over the samples, when the ring is a field.
    pub q_rank: Option<usize>,
    pub checks: usize,
    pub failures: usize,
}

/// I + π^N·X with X integral, N minimal with all `edges` fixed.
fn edge_fixer<G: Rng>(tree: &Tree, rng: &mut G, edges: &[TreeEdge]) -> Result<Matrix2> {
    let s = &tree.series;
    let x = tree.random_integral(rng, 6);
    for n in 1..48 {
        let k = mat2::Mat2::new(
            s.add(&s.one(), &s.mul(&s.monomial(1, n), &x.a)),
            s.mul(&s.monomial(1, n), &x.b),
            s.mul(&s.monomial(1, n), &x.c),
            s.add(&s.one(), &s.mul(&s.monomial(1, n), &x.d)),
        );
        let mut fixes = true;
        for e in edges {
            if tree.act_edge(&k, e)? != *e {
                fixes = false;
                break;
            }
        }
        if fixes {
            return Ok(k);
        }
    }
    Err(Error::PrecisionExhausted("no stabiliser element found".into()))
}

/// Sampling check of the 𝔎_∞-condition for the function generated by u:
/// ε(sp_n(k)u) agrees with g ↦ Θ(g·k, u) on sampled g, for k fixing every
/// edge of u's presentation.
pub fn verify_infinity_condition<R: CoefficientRing, G: Rng>(
    w: &AutomorphicEvaluator<'_, R>,
    x: usize,
    u: &StepFunction<R>,
    rng: &mut G,
    samples: usize,
) -> Result<InfinityReport> {
    let tree = w.tree(x);
    let r = w.global.ring();
    let edges: Vec<TreeEdge> = u.terms.iter().map(|t| t.0.clone()).collect();
    let mut spans = vec![u.normal_form(tree)];
    let mut report = InfinityReport {
        kind: "sampling witness".into(),
        stabilizer_samples: samples,
        q_rank: None,
        checks: 0,
        failures: 0,
    };
    for _ in 0..samples {
        let k = edge_fixer(tree, rng, &edges)?;
        let ku = u.sp_apply(tree, &k)?;
        spans.push(ku.normal_form(tree));
        for _ in 0..2 {
            let g = tree.random_gl2(rng, 1, 8);
            let lhs = w.evaluate(x, &g, &ku)?;
            let rhs = w.evaluate(x, &mat2::mul(&tree.series, &g, &k), u)?;
            report.checks += 1;
            if !r.equal(&lhs, &rhs) {
                report.failures += 1;
            }
        }
    }
    if r.is_field() {
        let mut index: BTreeMap<TreeEdge, usize> = BTreeMap::new();
        for nf in &spans {
            for (e, _) in nf {
                let len = index.len();
                index.entry(e.clone()).or_insert(len);
            }
        }
        let d = u.n + 1;
        let rows: Vec<Vec<R::Elem>> = spans
            .iter()
            .map(|nf| {
                let mut row = vec![r.zero(); index.len() * d];
                for (e, v) in nf {
                    let i = index[e];
                    row[i * d..(i + 1) * d].clone_from_slice(v);
                }
                row
            })
            .collect();
        report.q_rank = Some(linalg::rank(r, &rows, index.len() * d));
    }
    Ok(report)
}

/// A Hom V_n(L) → M as its values on the monomial basis X^j Y^(n−j).
#[derive(Clone, Debug, PartialEq)]
pub struct HomData<E> {
    pub n: usize,
    pub images: Vec<Vec<E>>,
}

/// Target module M = L^dim with the action of each closure generator.
#[derive(Clone, Debug)]
pub struct TargetModule<E> {
    pub dim: usize,
    pub generators: Vec<Matrix<E>>,
}

/// The image of the generator X^α Y^(n−α).
#[derive(Clone, Debug, PartialEq)]
pub struct DualizedImage<E> {
    pub n: usize,
    pub alpha: usize,
    pub image: Vec<E>,
}

impl TargetModule<Frac> {
    /// V_n(L) ⊗ L^copies with G acting on the first factor: the module
    /// receiving v ↦ v ⊗ c for c in a cocycle space of that dimension.
    pub fn copies_of_vn(closure: &Closure, copies: usize) -> Self {
        let d = closure.n + 1;
        let k = FracRing::new(GaloisRing::field(2, 1).expect("F_2"));
        let generators = closure
            .generators
            .iter()
            .map(|g| {
                let mut m = vec![vec![k.zero(); d * copies]; d * copies];
                for c in 0..copies {
                    for i in 0..d {
                        for j in 0..d {
                            m[c * d + i][c * d + j] = g[i][j].clone();
                        }
                    }
                }
                m
            })
            .collect();
        TargetModule {
            dim: d * copies,
            generators,
        }
    }
}

/// v ↦ v ⊗ c into V_n ⊗ L^copies.
pub fn tensor_hom(k: &FracRing, n: usize, c: &[Frac]) -> HomData<Frac> {
    let d = n + 1;
    let images = (0..d)
        .map(|j| {
            let mut out = vec![k.zero(); d * c.len()];
            for (s, cs) in c.iter().enumerate() {
                out[s * d + j] = cs.clone();
            }
            out
        })
        .collect();
    HomData { n, images }
}

pub fn restrict_to_generator<E: Clone>(hom: &HomData<E>, p: u64) -> DualizedImage<E> {
    let alpha = representations::alpha(hom.n as u64, p) as usize;
    DualizedImage {
        n: hom.n,
        alpha,
        image: hom.images[alpha].clone(),
    }
}

/// Coordinates c with X^j Y^(n−j) = Σ_i c_ij·basis_i, for every j.
fn closure_coordinates(k: &FracRing, closure: &Closure) -> Result<Vec<Vec<Frac>>> {
    if !closure.is_full() {
        return Err(Error::ClosureIncomplete {
            dimension: closure.dimension,
            expected: closure.n + 1,
        });
    }
    let d = closure.n + 1;
    let a: Vec<Vec<Frac>> = (0..d).map(|row| closure.basis.iter().map(|b| b[row].clone()).collect()).collect();
    (0..d)
        .map(|j| linalg::solve_square(k, &a, &HomPoly::monomial(k, closure.n, j).coeffs))
        .collect()
}

fn combine<R: Ring>(r: &R, coords: &[Vec<R::Elem>], images: &[Vec<R::Elem>], dim: usize) -> Vec<Vec<R::Elem>> {
    coords
        .iter()
        .map(|c| {
            let mut out = vec![r.zero(); dim];
            for (ci, m) in c.iter().zip(images) {
                for (o, x) in out.iter_mut().zip(m) {
                    *o = r.add(o, &r.mul(ci, x));
                }
            }
            out
        })
        .collect()
}

/// Rebuilds the Hom from the generator image by replaying the closure's
/// spanning words in the target module.
pub fn extend_from_generator(
    k: &FracRing,
    image: &DualizedImage<Frac>,
    closure: &Closure,
    target: &TargetModule<Frac>,
) -> Result<HomData<Frac>> {
    if closure.n != image.n || closure.alpha != image.alpha {
        return Err(Error::InvalidInput("closure and image disagree on (n, α)".into()));
    }
    let coords = closure_coordinates(k, closure)?;
    let images: Vec<Vec<Frac>> = closure
        .words
        .iter()
        .map(|w| apply_word(k, &target.generators, w, &image.image))
        .collect();
    Ok(HomData {
        n: image.n,
        images: combine(k, &coords, &images, target.dim),
    })
}

/// A lift of a Hom over F_q(t) to the localisation GR(p^k)[t]_S.
#[derive(Clone, Debug)]
pub struct LiftedHom {
    pub ring: FracRing,
    pub hom: HomData<Frac>,
    /// Whether the coefficientwise reduction returns the input exactly.
    pub residual_ok: bool,
}

fn lift_matrix(big: &FracRing, small: &FracRing, m: &Matrix<Frac>) -> Matrix<Frac> {
    m.iter().map(|row| row.iter().map(|x| big.naive_lift(small, x)).collect()).collect()
}

/// Lifts the generator image coefficientwise and extends through the
/// lifted spanning words. Only the reduction is claimed to be equivariant.
pub fn lift_hom(
    k: &FracRing,
    hom: &HomData<Frac>,
    closure: &Closure,
    target: &TargetModule<Frac>,
    precision: u32,
) -> Result<LiftedHom> {
    let field = k.base();
    let big = FracRing::new(field.with_precision(precision)?);
    let image = restrict_to_generator(hom, field.p());
    let lifted_image: Vec<Frac> = image.image.iter().map(|x| big.naive_lift(k, x)).collect();
    lift_with_image(k, &big, hom, closure, target, &lifted_image)
}

/// As [`lift_hom`] but with a caller-chosen lift of the generator image.
pub fn lift_with_image(
    k: &FracRing,
    big: &FracRing,
    hom: &HomData<Frac>,
    closure: &Closure,
    target: &TargetModule<Frac>,
    lifted_image: &[Frac],
) -> Result<LiftedHom> {
    let coords = closure_coordinates(k, closure)?;
    let gens: Vec<Matrix<Frac>> = target.generators.iter().map(|g| lift_matrix(big, k, g)).collect();
    let images: Vec<Vec<Frac>> = closure.words.iter().map(|w| apply_word(big, &gens, w, lifted_image)).collect();
    let big_coords: Vec<Vec<Frac>> = coords
        .iter()
        .map(|c| c.iter().map(|x| big.naive_lift(k, x)).collect())
        .collect();
    let lifted = HomData {
        n: hom.n,
        images: combine(big, &big_coords, &images, target.dim),
    };
    let residual_ok = reduce_hom(big, &lifted) == *hom;
    Ok(LiftedHom {
        ring: *big,
        hom: lifted,
        residual_ok,
    })
}

pub fn reduce_hom(big: &FracRing, hom: &HomData<Frac>) -> HomData<Frac> {
    HomData {
        n: hom.n,
        images: hom.images.iter().map(|v| v.iter().map(|x| big.residue(x)).collect()).collect(),
    }
}

/// Weight-2 comparison of the invariant space over Z with the one over F_p.
#[derive(Clone, Debug, Serialize)]
pub struct Weight2Report {
    pub gamma: String,
    pub p: u64,
    pub variant: String,
    pub free_rank: usize,
    pub invariant_factors: Vec<String>,
    /// Invariant factors divisible by p.
    pub offending_torsion: Vec<String>,
    pub fp_dim: usize,
    pub reduced_rank: usize,
    pub reduction_surjective: bool,
    /// The F_p constraint rows are the reduction of the Z rows.
    pub systems_agree: bool,
    /// H_!(Z) reduced into H_!!(F_p): (image rank, target dimension, contained).
    pub cusp_reduction: (usize, usize, bool),
    pub cusp_reduction_surjective: bool,
}

fn reduce_int(p: u64, x: &num_bigint::BigInt) -> u32 {
    use num_traits::ToPrimitive;
    let m = num_bigint::BigInt::from(p);
    (((x % &m) + &m) % &m).to_u32().expect("small residue")
}

pub fn weight2_integral(qg: &QuotientGraph, variant: Variant) -> Result<Weight2Report> {
    let field = qg.tree.field;
    if field.degree() != 1 {
        return Err(Error::NotApplicable("weight-2 integral report needs q = p".into()));
    }
    let p = field.p();
    let opts = SpaceOptions {
        variant,
        extra_levels: 0,
    };
    let z = invariant_space(qg, 2, &Integers, &opts)?;
    let fp = invariant_space(qg, 2, &field, &opts)?;
    let zs = build_system(qg, &Integers, 2, &opts)?;
    let fs = build_system(qg, &field, 2, &opts)?;
    // Rows vanishing mod p are dropped by the F_p builder.
    let reduced_rows: Vec<Vec<u32>> = zs
        .rows
        .iter()
        .map(|a| a.iter().map(|x| reduce_int(p, x)).collect::<Vec<_>>())
        .filter(|a| a.iter().any(|&x| x != 0))
        .collect();
    let fp_rows: Vec<&Vec<u32>> = fs.rows.iter().filter(|a| a.iter().any(|&x| x != 0)).collect();
    let systems_agree = zs.blocks == fs.blocks
        && reduced_rows.len() == fp_rows.len()
        && reduced_rows.iter().zip(&fp_rows).all(|(a, b)| a == *b);
    let reduce = |basis: &[Vec<num_bigint::BigInt>]| -> Vec<Vec<u32>> {
        basis.iter().map(|v| v.iter().map(|x| reduce_int(p, x)).collect()).collect()
    };
    let ncols = fp.system.ncols();
    let reduced = reduce(&z.basis);
    let reduced_rank = linalg::rank(&field, &reduced, ncols);
    let factors = z.invariant_factors.clone().unwrap_or_default();
    let offending: Vec<String> = factors
        .iter()
        .filter(|f| reduce_int(p, f) == 0)
        .map(|f| f.to_string())
        .collect();
    let cusp_reduction = {
        let shriek = invariant_space(qg, 2, &Integers, &SpaceOptions { variant: Variant::FiniteSupport, extra_levels: 0 })?;
        let double = invariant_space(qg, 2, &field, &SpaceOptions { variant: Variant::CuspVanishing, extra_levels: 0 })?;
        let img = reduce(&shriek.basis);
        let image_rank = linalg::rank(&field, &img, ncols);
        let mut joint = double.basis.clone();
        joint.extend(img.iter().cloned());
        let contained = linalg::rank(&field, &joint, ncols) == double.dimension();
        (image_rank, double.dimension(), contained)
    };
    Ok(Weight2Report {
        gamma: qg.group.name(),
        p,
        variant: variant.name().into(),
        free_rank: z.dimension(),
        invariant_factors: factors.iter().map(|f| f.to_string()).collect(),
        offending_torsion: offending,
        fp_dim: fp.dimension(),
        reduced_rank,
        reduction_surjective: reduced_rank == fp.dimension(),
        systems_agree,
        cusp_reduction_surjective: cusp_reduction.0 == cusp_reduction.1,
        cusp_reduction,
    })
}

/// Round trip cocycle → evaluator → cocycle for every basis vector of a
/// weight-2 space over F_q; returns the number of exact matches.
pub fn roundtrip_weight2(qg: &QuotientGraph, opts: &SpaceOptions) -> Result<(usize, usize)> {
    let field = qg.tree.field;
    let space = invariant_space(qg, 2, &field, opts)?;
    let mut ok = 0;
    for v in &space.basis {
        let f = space.cocycle(qg, v);
        let g = phi_decompose(&[qg], &field, 0, &phi_compose(&GlobalCocycle { components: vec![f] }))?;
        let w = AutomorphicEvaluator::new(g.clone());
        if hom_to_cocycle(&w)?.equals(&g) && verify_on_ball(qg, &g.components[0], 2)?.is_none() {
            ok += 1;
        }
    }
    Ok((ok, space.dimension()))
}
