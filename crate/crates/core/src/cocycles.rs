//! Harmonic cocycles on the tree, the action of GL₂(K_∞) on them, and exact
//! computation of the Γ-invariant spaces through the quotient graph.
//!
//! A Γ-invariant cocycle is determined by one value x_O ∈ V_n^* per edge
//! orbit O: on e = γ·rep(O) it takes the value ρ*_n(γ)x_O. The unknowns are
//! the finite-part edge orbits, the first cusp edges and optionally a few
//! further ray levels; values deeper in a cusp follow from harmonicity at
//! the ray vertices.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::linalg;
use crate::algebra::mat2::{Matrix2, PolyMat};
use crate::algebra::{smith_normal_form, Frac, FracRing, GaloisRing, Integers, Poly, Ring, Series, SeriesRing};
use crate::error::{Error, Result};
use crate::quotient::{self, QuotientGraph, SCHEMA};
use crate::representations::{self, substitution_matrix, DualVec, Matrix};
use crate::tree::{Tree, TreeEdge, TreeVertex};

/// Coefficient rings for cocycle values. For n > 0 the ring must contain
/// the entries of the acting matrices.
pub trait CoefficientRing: Ring {
    /// 0 for Z, p^k for GR(p^k, f) and rings built on it.
    fn characteristic(&self) -> u64;

    fn embed_poly(&self, _p: &Poly) -> Option<Self::Elem> {
        None
    }

    fn embed_series(&self, _x: &Series<GaloisRing>) -> Option<Self::Elem> {
        None
    }

    /// Basis of {x : M x = 0} and, for Z, the invariant factors of M.
    fn kernel(&self, rows: &[Vec<Self::Elem>], ncols: usize) -> Result<(Vec<Vec<Self::Elem>>, Option<Vec<BigInt>>)> {
        if !self.is_field() {
            return Err(Error::RingMismatch(format!("no kernel routine over {}", self.name())));
        }
        Ok((linalg::kernel_over_field(self, rows, ncols), None))
    }
}

impl CoefficientRing for GaloisRing {
    fn characteristic(&self) -> u64 {
        self.prime_ring_order()
    }
}

impl CoefficientRing for Integers {
    fn characteristic(&self) -> u64 {
        0
    }

    fn kernel(&self, rows: &[Vec<BigInt>], ncols: usize) -> Result<(Vec<Vec<BigInt>>, Option<Vec<BigInt>>)> {
        let rows: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
        if rows.is_empty() {
            let id = crate::algebra::smith::identity(ncols);
            return Ok((id, Some(Vec::new())));
        }
        let snf = smith_normal_form(&rows);
        let rank = snf.rank();
        let basis = (rank..ncols).map(|j| (0..ncols).map(|i| snf.v[i][j].clone()).collect()).collect();
        Ok((basis, Some(snf.invariant_factors())))
    }
}

impl CoefficientRing for FracRing {
    fn characteristic(&self) -> u64 {
        self.base().prime_ring_order()
    }

    fn embed_poly(&self, p: &Poly) -> Option<Frac> {
        self.from_function_field(&Frac::from_poly(p.clone()))
    }
}

impl CoefficientRing for SeriesRing<GaloisRing> {
    fn characteristic(&self) -> u64 {
        self.base.prime_ring_order()
    }

    fn embed_poly(&self, p: &Poly) -> Option<Series<GaloisRing>> {
        Some(self.from_poly(p))
    }

    fn embed_series(&self, x: &Series<GaloisRing>) -> Option<Series<GaloisRing>> {
        Some(x.clone())
    }
}

fn transpose<E: Clone>(m: &Matrix<E>) -> Matrix<E> {
    let k = m.first().map_or(0, |r| r.len());
    (0..k).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn identity_matrix<R: Ring>(r: &R, n: usize) -> Matrix<R::Elem> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { r.one() } else { r.zero() }).collect())
        .collect()
}

fn mat_add<R: Ring>(r: &R, x: &Matrix<R::Elem>, y: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.iter().zip(b).map(|(u, v)| r.add(u, v)).collect())
        .collect()
}

fn mat_neg<R: Ring>(r: &R, x: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    x.iter().map(|row| row.iter().map(|u| r.neg(u)).collect()).collect()
}

fn rho_star_of<R: Ring>(r: &R, g: &crate::algebra::Mat2<R::Elem>, n: usize) -> Matrix<R::Elem> {
    transpose(&substitution_matrix(r, g, n))
}

/// Matrix of ρ*_n(γ) for γ ∈ GL₂(A).
pub fn rho_star_poly<R: CoefficientRing>(r: &R, g: &PolyMat, n: usize) -> Result<Matrix<R::Elem>> {
    if n == 0 {
        return Ok(identity_matrix(r, 1));
    }
    let m = g.try_map(|x| {
        r.embed_poly(x)
            .ok_or_else(|| Error::RingMismatch(format!("{} does not contain F_q[t]", r.name())))
    })?;
    Ok(rho_star_of(r, &m, n))
}

/// Matrix of ρ*_n(g) for g ∈ GL₂(K_∞).
pub fn rho_star_series<R: CoefficientRing>(r: &R, g: &Matrix2, n: usize) -> Result<Matrix<R::Elem>> {
    if n == 0 {
        return Ok(identity_matrix(r, 1));
    }
    let m = g.try_map(|x| {
        r.embed_series(x)
            .ok_or_else(|| Error::RingMismatch(format!("{} does not contain K_∞", r.name())))
    })?;
    Ok(rho_star_of(r, &m, n))
}

pub fn dual_apply<R: Ring>(r: &R, m: &Matrix<R::Elem>, v: &DualVec<R::Elem>) -> DualVec<R::Elem> {
    DualVec {
        n: v.n,
        coeffs: representations::apply(r, m, &v.coeffs),
    }
}

/// Anything that assigns a V_n^* value to every (reachable) oriented edge.
pub trait EdgeFunction {
    type R: Ring;
    fn ring(&self) -> &Self::R;
    /// Degree n of the dual coefficient module; the weight is n + 2.
    fn degree(&self) -> usize;
    fn value_at(&self, e: &TreeEdge) -> Result<DualVec<<Self::R as Ring>::Elem>>;
}

/// Vertex sums Σ_{e(0)=v} f(e); returns the first vertex where it fails.
pub fn harmonic_defect<F: EdgeFunction>(tree: &Tree, f: &F, vertices: &[TreeVertex]) -> Result<Option<TreeVertex>> {
    let r = f.ring();
    for v in vertices {
        let mut acc = DualVec::zero(r, f.degree());
        for e in tree.edges_from(v) {
            acc = acc.add(r, &f.value_at(&e)?);
        }
        if !acc.is_zero(r) {
            return Ok(Some(v.clone()));
        }
    }
    Ok(None)
}

/// A finitely supported antisymmetric edge function on the tree.
#[derive(Clone, Debug)]
pub struct HarmonicCocycle<R: Ring> {
    pub ring: R,
    pub n: usize,
    /// Values on ascending edges; descending values follow by antisymmetry.
    values: BTreeMap<TreeEdge, Vec<R::Elem>>,
}

impl<R: CoefficientRing> HarmonicCocycle<R> {
    pub fn zero(ring: R, weight: usize) -> Result<Self> {
        if weight < 2 {
            return Err(Error::InvalidInput(format!("weight {weight} < 2")));
        }
        Ok(HarmonicCocycle {
            ring,
            n: weight - 2,
            values: BTreeMap::new(),
        })
    }

    pub fn weight(&self) -> usize {
        self.n + 2
    }

    pub fn set(&mut self, e: &TreeEdge, v: DualVec<R::Elem>) {
        let (c, flipped) = e.canonical();
        let v = if flipped { v.neg(&self.ring) } else { v };
        if v.is_zero(&self.ring) {
            self.values.remove(&c);
        } else {
            self.values.insert(c, v.coeffs);
        }
    }

    pub fn add_to(&mut self, e: &TreeEdge, v: &DualVec<R::Elem>) {
        let cur = self.value(e);
        self.set(e, cur.add(&self.ring, v));
    }

    pub fn value(&self, e: &TreeEdge) -> DualVec<R::Elem> {
        let (c, flipped) = e.canonical();
        match self.values.get(&c) {
            None => DualVec::zero(&self.ring, self.n),
            Some(v) => {
                let d = DualVec { n: self.n, coeffs: v.clone() };
                if flipped {
                    d.neg(&self.ring)
                } else {
                    d
                }
            }
        }
    }

    /// Support edges in ascending orientation.
    pub fn support(&self) -> Vec<TreeEdge> {
        self.values.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks the vertex-sum condition; `Err(v)` names a failing vertex.
    pub fn is_harmonic(&self, tree: &Tree, vertices: &[TreeVertex]) -> std::result::Result<(), TreeVertex> {
        match harmonic_defect(tree, self, vertices).expect("explicit values never fail") {
            None => Ok(()),
            Some(v) => Err(v),
        }
    }

    /// g(f)(e) = ρ*_n(g) f(g⁻¹e), computed by pushing the support forward.
    pub fn gamma_action(&self, tree: &Tree, g: &Matrix2) -> Result<Self> {
        let rho = rho_star_series(&self.ring, g, self.n)?;
        let mut out = HarmonicCocycle {
            ring: self.ring.clone(),
            n: self.n,
            values: BTreeMap::new(),
        };
        for (e, v) in &self.values {
            let img = tree.act_edge(g, e)?;
            let val = dual_apply(&self.ring, &rho, &DualVec { n: self.n, coeffs: v.clone() });
            out.set(&img, val);
        }
        Ok(out)
    }

    pub fn equals(&self, other: &Self) -> bool {
        let keys: BTreeSet<&TreeEdge> = self.values.keys().chain(other.values.keys()).collect();
        keys.into_iter().all(|e| {
            let a = self.value(e);
            let b = other.value(e);
            a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| self.ring.equal(x, y))
        })
    }
}

impl<R: CoefficientRing> EdgeFunction for HarmonicCocycle<R> {
    type R = R;

    fn ring(&self) -> &R {
        &self.ring
    }

    fn degree(&self) -> usize {
        self.n
    }

    fn value_at(&self, e: &TreeEdge) -> Result<DualVec<R::Elem>> {
        Ok(self.value(e))
    }
}

/// Which invariant space to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// All Γ-invariant harmonic cocycles.
    Plain,
    /// Finite support modulo Γ.
    FiniteSupport,
    /// Zero on every cusp ray, first edges included.
    CuspVanishing,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Plain => "H",
            Variant::FiniteSupport => "H_!",
            Variant::CuspVanishing => "H_!!",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "H" | "plain" => Ok(Variant::Plain),
            "H_!" | "finite" => Ok(Variant::FiniteSupport),
            "H_!!" | "cusp" => Ok(Variant::CuspVanishing),
            _ => Err(Error::InvalidInput(format!("unknown variant '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceOptions {
    pub variant: Variant,
    /// Ray levels beyond the first edge kept as explicit unknowns.
    pub extra_levels: usize,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        SpaceOptions {
            variant: Variant::Plain,
            extra_levels: 0,
        }
    }
}

/// The constraint system on the edge-orbit unknowns.
#[derive(Clone, Debug)]
pub struct CocycleSystem<R: Ring> {
    pub ring: R,
    pub n: usize,
    /// Edge orbit of each unknown block of n + 1 coordinates.
    pub blocks: Vec<usize>,
    pub rows: Vec<Vec<R::Elem>>,
    pub labels: Vec<String>,
}

impl<R: Ring> CocycleSystem<R> {
    pub fn ncols(&self) -> usize {
        self.blocks.len() * (self.n + 1)
    }

    pub fn block_of(&self, orbit: usize) -> Option<usize> {
        self.blocks.iter().position(|&b| b == orbit)
    }

    fn push_block_rows(&mut self, terms: &BTreeMap<usize, Matrix<R::Elem>>, label: &str) {
        let d = self.n + 1;
        for i in 0..d {
            let mut row = vec![self.ring.zero(); self.ncols()];
            for (&b, m) in terms {
                for j in 0..d {
                    row[b * d + j] = self.ring.add(&row[b * d + j], &m[i][j]);
                }
            }
            if row.iter().any(|x| !self.ring.is_zero(x)) {
                self.rows.push(row);
                self.labels.push(label.to_string());
            }
        }
    }
}

fn require_explored(qg: &QuotientGraph) -> Result<()> {
    let dangling = qg.dangling_edges();
    if !dangling.is_empty() {
        return Err(Error::DepthTooSmall(format!(
            "depth {} leaves edge orbits {:?} between the finite part and unexplored orbits",
            qg.depth, dangling
        )));
    }
    Ok(())
}

/// Assembles stabilizer-invariance and harmonicity constraints.
pub fn build_system<R: CoefficientRing>(qg: &QuotientGraph, ring: &R, weight: usize, opts: &SpaceOptions) -> Result<CocycleSystem<R>> {
    if weight < 2 {
        return Err(Error::InvalidInput(format!("weight {weight} < 2")));
    }
    let n = weight - 2;
    if n > 0 && ring.embed_poly(&vec![0, 1]).is_none() {
        return Err(Error::RingMismatch(format!(
            "weight {weight} needs coefficients containing F_q(t), got {}",
            ring.name()
        )));
    }
    require_explored(qg)?;
    let mut blocks: Vec<usize> = qg.finite_edges.clone();
    for c in &qg.cusps {
        if opts.extra_levels >= c.vertices.len() {
            return Err(Error::DepthTooSmall(format!(
                "cusp {} has {} ray vertices, {} extra levels requested",
                c.id,
                c.vertices.len(),
                opts.extra_levels
            )));
        }
        blocks.extend(c.edges[..=opts.extra_levels].iter().copied());
    }
    let mut sys = CocycleSystem {
        ring: ring.clone(),
        n,
        blocks,
        rows: Vec::new(),
        labels: Vec::new(),
    };
    let id = identity_matrix(ring, n + 1);
    for b in 0..sys.blocks.len() {
        let o = sys.blocks[b];
        for s in &qg.edges[o].stabilizer {
            let m = mat_add(ring, &rho_star_poly(ring, s, n)?, &mat_neg(ring, &id));
            sys.push_block_rows(&BTreeMap::from([(b, m)]), &format!("stab e{o}"));
        }
    }
    let mut harmonic_at: Vec<(usize, Option<usize>)> = qg.finite_vertices.iter().map(|&v| (v, None)).collect();
    for c in &qg.cusps {
        for k in 0..opts.extra_levels {
            harmonic_at.push((c.vertices[k], None));
        }
        if opts.variant == Variant::FiniteSupport {
            // The edge leaving the last kept level carries the value 0.
            harmonic_at.push((c.vertices[opts.extra_levels], Some(c.edges[opts.extra_levels + 1])));
        }
    }
    for (v, vanishing) in harmonic_at {
        let mut terms: BTreeMap<usize, Matrix<R::Elem>> = BTreeMap::new();
        for inc in &qg.vertices[v].incident {
            let Some(b) = sys.block_of(inc.edge_orbit) else {
                if Some(inc.edge_orbit) == vanishing {
                    continue;
                }
                return Err(Error::DepthTooSmall(format!("edge orbit {} at vertex orbit {v} has no unknown", inc.edge_orbit)));
            };
            let mut m = rho_star_poly(ring, &inc.witness, n)?;
            if inc.reversed {
                m = mat_neg(ring, &m);
            }
            let entry = terms.entry(b).or_insert_with(|| vec![vec![ring.zero(); n + 1]; n + 1]);
            *entry = mat_add(ring, entry, &m);
        }
        sys.push_block_rows(&terms, &format!("harmonic v{v}"));
    }
    if opts.variant == Variant::CuspVanishing {
        for c in &qg.cusps {
            let b = sys.block_of(c.first_edge).expect("first edges are unknowns");
            sys.push_block_rows(&BTreeMap::from([(b, id.clone())]), &format!("cusp {}", c.id));
        }
    }
    Ok(sys)
}

/// A computed space of Γ-invariant cocycles.
#[derive(Clone, Debug)]
pub struct InvariantSpace<R: Ring> {
    pub gamma: String,
    pub q: u64,
    pub weight: usize,
    pub depth: usize,
    pub options: SpaceOptions,
    pub system: CocycleSystem<R>,
    pub basis: Vec<Vec<R::Elem>>,
    /// Nonzero invariant factors of the constraint matrix (Z only).
    pub invariant_factors: Option<Vec<BigInt>>,
}

impl<R: CoefficientRing> InvariantSpace<R> {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn ring(&self) -> &R {
        &self.system.ring
    }

    /// Value of a basis vector on the representative of an unknown orbit.
    pub fn orbit_value(&self, vector: &[R::Elem], orbit: usize) -> Option<DualVec<R::Elem>> {
        let d = self.system.n + 1;
        self.system.block_of(orbit).map(|b| DualVec {
            n: self.system.n,
            coeffs: vector[b * d..(b + 1) * d].to_vec(),
        })
    }

    /// The Γ-invariant cocycle attached to a coordinate vector.
    pub fn cocycle<'a>(&self, qg: &'a QuotientGraph, vector: &[R::Elem]) -> InvariantCocycle<'a, R> {
        let values = self
            .system
            .blocks
            .iter()
            .map(|&o| (o, self.orbit_value(vector, o).expect("block present")))
            .collect();
        InvariantCocycle {
            qg,
            ring: self.ring().clone(),
            n: self.system.n,
            values,
        }
    }

    pub fn to_json(&self) -> Value {
        let r = self.ring();
        let basis: Vec<Value> = self
            .basis
            .iter()
            .map(|v| {
                Value::Array(
                    self.system
                        .blocks
                        .iter()
                        .map(|&o| {
                            let dv = self.orbit_value(v, o).expect("block present");
                            json!({"orbit_id": o, "dual_coords": dv.coeffs.iter().map(|c| r.render(c)).collect::<Vec<_>>()})
                        })
                        .collect(),
                )
            })
            .collect();
        let mut out = json!({
            "schema": SCHEMA,
            "kind": "invariant_space",
            "gamma": self.gamma,
            "q": self.q,
            "weight": self.weight,
            "ring": r.name(),
            "variant": self.options.variant.name(),
            "extra_levels": self.options.extra_levels,
            "depth": self.depth,
            "dimension": self.dimension(),
            "basis": basis,
        });
        if let Some(f) = &self.invariant_factors {
            out["invariant_factors"] = json!(f.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        }
        out
    }
}

/// Solves the invariant-space system exactly over `ring`.
pub fn invariant_space<R: CoefficientRing>(qg: &QuotientGraph, weight: usize, ring: &R, opts: &SpaceOptions) -> Result<InvariantSpace<R>> {
    let system = build_system(qg, ring, weight, opts)?;
    let (basis, invariant_factors) = ring.kernel(&system.rows, system.ncols())?;
    Ok(InvariantSpace {
        gamma: qg.group.name(),
        q: qg.tree.q(),
        weight,
        depth: qg.depth,
        options: *opts,
        system,
        basis,
        invariant_factors,
    })
}

/// Value of an invariant cocycle on any edge whose orbit is known, either
/// stored or reached by harmonic propagation along a cusp ray.
#[derive(Clone, Debug)]
pub struct InvariantCocycle<'a, R: Ring> {
    pub qg: &'a QuotientGraph,
    pub ring: R,
    pub n: usize,
    pub values: BTreeMap<usize, DualVec<R::Elem>>,
}

impl<'a, R: CoefficientRing> InvariantCocycle<'a, R> {
    pub fn zero(qg: &'a QuotientGraph, ring: R, n: usize) -> Self {
        InvariantCocycle {
            qg,
            ring,
            n,
            values: BTreeMap::new(),
        }
    }

    /// Value on the stored representative of an edge orbit.
    pub fn orbit_value(&self, orbit: usize) -> Result<DualVec<R::Elem>> {
        if let Some(v) = self.values.get(&orbit) {
            return Ok(v.clone());
        }
        if let Some((c, k)) = self.qg.ray_position(orbit) {
            if k == 0 {
                return Ok(DualVec::zero(&self.ring, self.n));
            }
            let cusp = &self.qg.cusps[c];
            let below = self.orbit_value(cusp.edges[k - 1])?;
            let v = &self.qg.vertices[cusp.vertices[k - 1]];
            let r = &self.ring;
            let mut acc = DualVec::zero(r, self.n);
            let mut up = None;
            for inc in &v.incident {
                if inc.reversed {
                    acc = acc.add(r, &dual_apply(r, &rho_star_poly(r, &inc.witness, self.n)?, &below));
                } else {
                    up = Some(inc.witness.clone());
                }
            }
            let up = up.expect("ray vertex has an upper edge");
            let up_inv = quotient::poly_inverse(&self.qg.group.polys(), &up);
            return Ok(dual_apply(r, &rho_star_poly(r, &up_inv, self.n)?, &acc));
        }
        if self.qg.finite_edges.contains(&orbit) {
            return Ok(DualVec::zero(&self.ring, self.n));
        }
        Err(Error::OutOfExploredRegion(format!("edge orbit {orbit} carries no value")))
    }

    /// Same value through a caller-chosen witness: e = γ·rep(orbit), or
    /// e = −γ·rep(orbit) when `reversed`.
    pub fn value_via(&self, orbit: usize, gamma: &PolyMat, reversed: bool) -> Result<DualVec<R::Elem>> {
        let v = dual_apply(&self.ring, &rho_star_poly(&self.ring, gamma, self.n)?, &self.orbit_value(orbit)?);
        Ok(if reversed { v.neg(&self.ring) } else { v })
    }
}

impl<'a, R: CoefficientRing> EdgeFunction for InvariantCocycle<'a, R> {
    type R = R;

    fn ring(&self) -> &R {
        &self.ring
    }

    fn degree(&self) -> usize {
        self.n
    }

    fn value_at(&self, e: &TreeEdge) -> Result<DualVec<R::Elem>> {
        let (o, g, rev) = self.qg.locate_edge(e)?;
        self.value_via(o, &g, rev)
    }
}

/// Value of an invariant cocycle on an arbitrary tree edge.
pub fn invariant_extend<R: CoefficientRing>(f: &InvariantCocycle<'_, R>, e: &TreeEdge) -> Result<DualVec<R::Elem>> {
    f.value_at(e)
}

/// Outcome of [`support_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct SupportReport {
    pub ok: bool,
    /// (basis index, edge orbit) pairs violating the bound.
    pub violations: Vec<(usize, usize)>,
    pub propagated_levels: usize,
}

/// Checks that basis vectors vanish beyond the first cusp edges. Stored ray
/// unknowns past e_i must be zero and, in positive characteristic or for the
/// finite-support variants, so must the values propagated `levels` steps
/// further up each ray.
pub fn support_check<R: CoefficientRing>(qg: &QuotientGraph, space: &InvariantSpace<R>, levels: usize) -> Result<SupportReport> {
    let propagate = space.ring().characteristic() != 0 || space.options.variant != Variant::Plain;
    let mut violations = Vec::new();
    for (i, v) in space.basis.iter().enumerate() {
        let f = space.cocycle(qg, v);
        for c in &qg.cusps {
            let top = if propagate {
                (space.options.extra_levels + levels).min(c.edges.len() - 1)
            } else {
                space.options.extra_levels
            };
            for k in 1..=top {
                if !f.orbit_value(c.edges[k])?.is_zero(space.ring()) {
                    violations.push((i, c.edges[k]));
                }
            }
        }
    }
    Ok(SupportReport {
        ok: violations.is_empty(),
        violations,
        propagated_levels: levels,
    })
}

/// For each basis vector and cusp, the highest ray level (0 = first edge)
/// among the first `levels` + 1 with a nonzero value.
pub fn ray_support_levels<R: CoefficientRing>(qg: &QuotientGraph, space: &InvariantSpace<R>, levels: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for v in &space.basis {
        let f = space.cocycle(qg, v);
        for c in &qg.cusps {
            let mut last = 0;
            for k in 0..=levels.min(c.edges.len() - 1) {
                if !f.orbit_value(c.edges[k])?.is_zero(space.ring()) {
                    last = k;
                }
            }
            out.push(last);
        }
    }
    Ok(out)
}

/// Re-checks a basis vector through the tree itself: harmonicity at every
/// vertex of the ball of radius `radius` around Λ₀ and antisymmetry, with
/// all values obtained by orbit lookup rather than from the system rows.
pub fn verify_on_ball<R: CoefficientRing>(qg: &QuotientGraph, f: &InvariantCocycle<'_, R>, radius: usize) -> Result<Option<String>> {
    let tree = &qg.tree;
    let (vs, es) = tree.ball(&tree.standard_vertex(), radius + 1)?;
    let inner: Vec<TreeVertex> = vs
        .into_iter()
        .filter(|v| tree.distance(&tree.standard_vertex(), v) as usize <= radius)
        .collect();
    if let Some(v) = harmonic_defect(tree, f, &inner)? {
        return Ok(Some(format!("not harmonic at {}", v.id())));
    }
    for e in es {
        let a = f.value_at(&e)?;
        let b = f.value_at(&e.reverse())?;
        if !a.add(&f.ring, &b).is_zero(&f.ring) {
            return Ok(Some(format!("not antisymmetric on {} -> {}", e.origin.id(), e.terminus.id())));
        }
    }
    Ok(None)
}
