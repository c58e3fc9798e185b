//! Sp_n(L): locally constant V_n(L)-valued functions on P¹(K_∞) modulo
//! constants, presented as finite sums Σ λ_i·1_{U(e_i)}.
//!
//! The right action z ↦ zg on ends is realised as z ↦ g⁻¹·z, so
//! sp_n(g)(λ·1_{U(e)}) = ρ_n(g)λ·1_{U(g·e)}.
//!
//! Normal form: subtract the value at ∞, then describe the remaining
//! function by its values on the maximal balls B(c) (ends below a vertex c)
//! on which it is constant, inside the smallest ball carrying its support.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::mat2::{self, Matrix2, PolyMat};
use crate::algebra::{GaloisRing, Ring};
use crate::cocycles::{CoefficientRing, EdgeFunction};
use crate::error::{Error, Result};
use crate::representations::{self, substitution_matrix, HomPoly, Matrix};
use crate::tree::{BoundaryPoint, Tree, TreeEdge, TreeVertex};

#[derive(Clone, Debug)]
pub struct StepFunction<R: Ring> {
    pub ring: R,
    pub n: usize,
    pub terms: Vec<(TreeEdge, HomPoly<R::Elem>)>,
}

/// One piece of the normal form: the value on U(edge), edge ascending.
pub type Piece<E> = (TreeEdge, Vec<E>);

enum Block<E> {
    Const(Vec<E>),
    Split(Vec<Piece<E>>),
}

impl<R: CoefficientRing> StepFunction<R> {
    pub fn zero(ring: R, n: usize) -> Self {
        StepFunction { ring, n, terms: Vec::new() }
    }

    pub fn from_indicator(ring: R, e: &TreeEdge, lambda: HomPoly<R::Elem>) -> Self {
        let n = lambda.n;
        StepFunction {
            ring,
            n,
            terms: vec![(e.clone(), lambda)],
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        StepFunction {
            ring: self.ring.clone(),
            n: self.n,
            terms,
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let r = &self.ring;
        StepFunction {
            ring: r.clone(),
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, l)| {
                    (
                        e.clone(),
                        HomPoly {
                            n: l.n,
                            coeffs: l.coeffs.iter().map(|x| r.mul(x, c)).collect(),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.ring.from_int(-1))
    }

    fn vec_zero(&self) -> Vec<R::Elem> {
        vec![self.ring.zero(); self.n + 1]
    }

    fn vec_add(&self, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
        a.iter().zip(b).map(|(x, y)| self.ring.add(x, y)).collect()
    }

    fn vec_sub(&self, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
        a.iter().zip(b).map(|(x, y)| self.ring.sub(x, y)).collect()
    }

    fn vec_is_zero(&self, a: &[R::Elem]) -> bool {
        a.iter().all(|x| self.ring.is_zero(x))
    }

    fn vec_eq(&self, a: &[R::Elem], b: &[R::Elem]) -> bool {
        a.iter().zip(b).all(|(x, y)| self.ring.equal(x, y))
    }

    /// The value at an end, before quotienting by constants.
    pub fn value_at_end(&self, tree: &Tree, z: &BoundaryPoint) -> Result<Vec<R::Elem>> {
        let mut acc = self.vec_zero();
        for (e, l) in &self.terms {
            if tree.boundary_in_u(z, e)? {
                acc = self.vec_add(&acc, &l.coeffs);
            }
        }
        Ok(acc)
    }

    /// Canonical representative of the class; empty exactly for the zero class.
    pub fn normal_form(&self, tree: &Tree) -> Vec<Piece<R::Elem>> {
        // (upper vertex x, lower vertex y, term is x→y, λ): U(x→y) = B(y).
        let mut split = Vec::new();
        let mut at_infinity = self.vec_zero();
        for (e, l) in &self.terms {
            if self.vec_is_zero(&l.coeffs) {
                continue;
            }
            let (c, flipped) = e.canonical();
            if flipped {
                at_infinity = self.vec_add(&at_infinity, &l.coeffs);
            }
            split.push((c.origin, c.terminus, !flipped, l.coeffs.clone()));
        }
        if split.is_empty() {
            return Vec::new();
        }
        let top = split
            .iter()
            .skip(1)
            .fold(split[0].0.clone(), |acc, (x, ..)| tree.meet(&acc, x));
        let mut candidates = BTreeSet::new();
        for (x, ..) in &split {
            for level in top.n..=x.n {
                candidates.insert(tree.ancestor(x, level));
            }
        }
        let constant_on = |w: &TreeVertex| -> Vec<R::Elem> {
            let mut acc = self.vec_sub(&self.vec_zero(), &at_infinity);
            for (_, y, down, l) in &split {
                if tree.is_below(w, y) == *down {
                    acc = self.vec_add(&acc, l);
                }
            }
            acc
        };
        fn walk<R: CoefficientRing>(
            h: &StepFunction<R>,
            tree: &Tree,
            w: &TreeVertex,
            candidates: &BTreeSet<TreeVertex>,
            constant_on: &dyn Fn(&TreeVertex) -> Vec<R::Elem>,
        ) -> Block<R::Elem> {
            if !candidates.contains(w) {
                return Block::Const(constant_on(w));
            }
            let kids = tree.children(w);
            let blocks: Vec<Block<R::Elem>> = kids.iter().map(|c| walk(h, tree, c, candidates, constant_on)).collect();
            if let Block::Const(first) = &blocks[0] {
                if blocks.iter().all(|b| matches!(b, Block::Const(v) if h.vec_eq(v, first))) {
                    return Block::Const(first.clone());
                }
            }
            let mut pieces = Vec::new();
            for (c, b) in kids.into_iter().zip(blocks) {
                match b {
                    Block::Const(v) => {
                        if !h.vec_is_zero(&v) {
                            pieces.push((TreeEdge::new(w.clone(), c), v));
                        }
                    }
                    Block::Split(p) => pieces.extend(p),
                }
            }
            Block::Split(pieces)
        }
        let mut pieces = match walk(self, tree, &top, &candidates, &constant_on) {
            Block::Const(v) if self.vec_is_zero(&v) => Vec::new(),
            Block::Const(v) => vec![(TreeEdge::new(tree.parent(&top), top.clone()), v)],
            Block::Split(p) => p,
        };
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        pieces
    }

    /// The class as a normalised step function.
    pub fn normalized(&self, tree: &Tree) -> Self {
        StepFunction {
            ring: self.ring.clone(),
            n: self.n,
            terms: self
                .normal_form(tree)
                .into_iter()
                .map(|(e, v)| (e, HomPoly { n: self.n, coeffs: v }))
                .collect(),
        }
    }

    pub fn is_zero_class(&self, tree: &Tree) -> bool {
        self.normal_form(tree).is_empty()
    }

    /// Equality of classes by normal forms.
    pub fn same_class(&self, tree: &Tree, other: &Self) -> bool {
        self.add(&other.neg()).is_zero_class(tree)
    }

    /// Equality of classes through a common refinement: on every outward
    /// boundary edge of the subtree spanned by both presentations the two
    /// functions differ by the same constant.
    pub fn same_class_by_refinement(&self, tree: &Tree, other: &Self) -> bool {
        let mut verts: Vec<TreeVertex> = Vec::new();
        for (e, _) in self.terms.iter().chain(other.terms.iter()) {
            verts.push(e.origin.clone());
            verts.push(e.terminus.clone());
        }
        if verts.is_empty() {
            return true;
        }
        let mut span: BTreeSet<TreeVertex> = BTreeSet::new();
        for v in &verts {
            span.extend(tree.path(&verts[0], v));
        }
        let side = |h: &Self, v: &TreeVertex| -> Vec<R::Elem> {
            let mut acc = h.vec_zero();
            for (e, l) in &h.terms {
                if tree.distance(v, &e.terminus) < tree.distance(v, &e.origin) {
                    acc = h.vec_add(&acc, &l.coeffs);
                }
            }
            acc
        };
        let mut diff: Option<Vec<R::Elem>> = None;
        for v in &span {
            if !tree.neighbors(v).iter().any(|w| !span.contains(w)) {
                continue;
            }
            let d = self.vec_sub(&side(self, v), &side(other, v));
            match &diff {
                None => diff = Some(d),
                Some(prev) => {
                    if !self.vec_eq(prev, &d) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Replaces λ·1_{U(e)} by Σ λ·1_{U(e′)} over the q onward edges.
    pub fn refine(&self, tree: &Tree, e: &TreeEdge) -> Result<Self> {
        let idx = self
            .terms
            .iter()
            .position(|(f, _)| f == e)
            .ok_or_else(|| Error::EdgeNotPresent(format!("{} -> {}", e.origin.id(), e.terminus.id())))?;
        let mut terms = self.terms.clone();
        let (_, lambda) = terms.remove(idx);
        for f in tree.onward_edges(e) {
            terms.push((f, lambda.clone()));
        }
        Ok(StepFunction {
            ring: self.ring.clone(),
            n: self.n,
            terms,
        })
    }

    fn act_with(&self, tree: &Tree, g: &Matrix2, rho: &Matrix<R::Elem>) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, l) in &self.terms {
            let coeffs = representations::apply(&self.ring, rho, &l.coeffs);
            terms.push((tree.act_edge(g, e)?, HomPoly { n: self.n, coeffs }));
        }
        Ok(StepFunction {
            ring: self.ring.clone(),
            n: self.n,
            terms,
        })
    }

    /// sp_n(g)h : z ↦ ρ_n(g) h(zg).
    pub fn sp_apply(&self, tree: &Tree, g: &Matrix2) -> Result<Self> {
        let rho = rho_series(&self.ring, tree, g, self.n)?;
        self.act_with(tree, g, &rho)
    }

    /// sp_n(γ) for γ ∈ GL₂(A), usable over rings containing only F_q(t).
    pub fn sp_apply_poly(&self, tree: &Tree, g: &PolyMat) -> Result<Self> {
        let rho = rho_poly(&self.ring, tree, g, self.n)?;
        self.act_with(tree, &mat2::polymat_to_series(&tree.series, g), &rho)
    }
}

fn identity<R: Ring>(r: &R, n: usize) -> Matrix<R::Elem> {
    (0..=n)
        .map(|i| (0..=n).map(|j| if i == j { r.one() } else { r.zero() }).collect())
        .collect()
}

/// Matrix of ρ_n(g) for g ∈ GL₂(K_∞).
pub fn rho_series<R: CoefficientRing>(r: &R, tree: &Tree, g: &Matrix2, n: usize) -> Result<Matrix<R::Elem>> {
    if n == 0 {
        return Ok(identity(r, 0));
    }
    let inv = mat2::inverse(&tree.series, g)?;
    let m = inv.try_map(|x| {
        r.embed_series(x)
            .ok_or_else(|| Error::RingMismatch(format!("{} does not contain K_∞", r.name())))
    })?;
    Ok(substitution_matrix(r, &m, n))
}

/// Matrix of ρ_n(γ) for γ ∈ GL₂(A).
pub fn rho_poly<R: CoefficientRing>(r: &R, tree: &Tree, g: &PolyMat, n: usize) -> Result<Matrix<R::Elem>> {
    if n == 0 {
        return Ok(identity(r, 0));
    }
    let pr = crate::algebra::PolyRing::new(tree.field);
    let inv = mat2::inverse(&pr, g)?;
    let m = inv.try_map(|x| {
        r.embed_poly(x)
            .ok_or_else(|| Error::RingMismatch(format!("{} does not contain F_q[t]", r.name())))
    })?;
    Ok(substitution_matrix(r, &m, n))
}

/// ⟨f, h⟩ = Σ_i f(e_i)(λ_i).
pub fn pairing<F: EdgeFunction>(f: &F, h: &StepFunction<F::R>) -> Result<<F::R as Ring>::Elem>
where
    F::R: CoefficientRing,
{
    if f.degree() != h.n {
        return Err(Error::IncompatibleWeight {
            weight: f.degree() + 2,
            degree: h.n,
        });
    }
    let r = f.ring();
    let mut acc = r.zero();
    for (e, l) in &h.terms {
        let v = f.value_at(e)?;
        acc = r.add(&acc, &representations::evaluate(r, &v, l));
    }
    Ok(acc)
}

/// Refinement test: whether ⟨f, λ·1_{U(e)}⟩ = ⟨f, refine(λ·1_{U(e)})⟩ for
/// every listed edge and every monomial λ.
pub fn refinement_invariant<F: EdgeFunction>(tree: &Tree, f: &F, edges: &[TreeEdge]) -> Result<bool>
where
    F::R: CoefficientRing,
{
    let r = f.ring();
    for e in edges {
        for j in 0..=f.degree() {
            let h = StepFunction::from_indicator(r.clone(), e, HomPoly::monomial(r, f.degree(), j));
            let a = pairing(f, &h)?;
            let b = pairing(f, &h.refine(tree, e)?)?;
            if !r.equal(&a, &b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub n: i64,
    pub start: i64,
    pub coeffs: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub origin: VertexJson,
    pub terminus: VertexJson,
    /// Coefficients of X^j Y^(n−j), j = 0..=n.
    pub lambda: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFunctionJson {
    pub schema: String,
    pub q: u64,
    pub n: usize,
    pub terms: Vec<TermJson>,
}

fn vertex_json(v: &TreeVertex) -> VertexJson {
    VertexJson {
        n: v.n,
        start: v.u.start,
        coeffs: v.u.coeffs.clone(),
    }
}

impl StepFunction<GaloisRing> {
    pub fn to_json(&self, tree: &Tree) -> StepFunctionJson {
        StepFunctionJson {
            schema: crate::quotient::SCHEMA.into(),
            q: tree.q(),
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, l)| TermJson {
                    origin: vertex_json(&e.origin),
                    terminus: vertex_json(&e.terminus),
                    lambda: l.coeffs.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(tree: &Tree, j: &StepFunctionJson) -> Result<Self> {
        if j.q != tree.q() {
            return Err(Error::RingMismatch(format!("step function over F_{}, tree over F_{}", j.q, tree.q())));
        }
        let vertex = |v: &VertexJson| tree.vertex_from_coeffs(v.n, v.start, v.coeffs.clone());
        let mut terms = Vec::new();
        for t in &j.terms {
            if t.lambda.len() != j.n + 1 || t.lambda.iter().any(|&c| c as u64 >= tree.q()) {
                return Err(Error::InvalidInput("malformed coefficient array".into()));
            }
            let e = tree.edge(vertex(&t.origin), vertex(&t.terminus))?;
            terms.push((e, HomPoly { n: j.n, coeffs: t.lambda.clone() }));
        }
        Ok(StepFunction {
            ring: tree.field,
            n: j.n,
            terms,
        })
    }
}
