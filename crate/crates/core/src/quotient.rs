//! Congruence subgroups Γ ⊆ GL₂(F_q[t]) and the quotient graph Γ\τ.
//!
//! Every vertex is GL₂(A)-equivalent to exactly one Λ_m = (−m, 0), m ≥ 0,
//! whose stabilizer S_m is GL₂(F_q) for m = 0 and {(a b; 0 d) : deg b ≤ m}
//! for m ≥ 1. With g_v·v = Λ_m, two vertices v, w over the same Λ_m are
//! Γ-equivalent iff g_w^(−1) s g_v ∈ Γ for some s ∈ S_m, and membership
//! only depends on s modulo the level, so the search is finite and exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::algebra::mat2::{self, Mat2, PolyMat};
use crate::algebra::{GaloisRing, Poly, PolyRing, Ring};
use crate::error::{Error, Result};
use crate::tree::{Tree, TreeEdge, TreeVertex};

/// JSON schema tag shared by all machine-readable outputs.
pub const SCHEMA: &str = "cocycle-forge/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Full,
    Gamma0,
    Gamma1,
    GammaFull,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArithmeticGroup {
    pub kind: GroupKind,
    /// Monic level; `[1]` for the full group.
    pub level: Poly,
    pub field: GaloisRing,
}

impl ArithmeticGroup {
    pub fn full(field: GaloisRing) -> Self {
        ArithmeticGroup {
            kind: GroupKind::Full,
            level: vec![1],
            field,
        }
    }

    pub fn congruence(field: GaloisRing, kind: GroupKind, level: Poly) -> Result<Self> {
        let pr = PolyRing::new(field);
        if kind == GroupKind::Full {
            return Ok(Self::full(field));
        }
        match pr.degree(&level) {
            Some(d) if d >= 1 && pr.leading(&level) == 1 => {}
            _ => {
                return Err(Error::InvalidInput(format!(
                    "level must be monic and nonconstant, got {}",
                    pr.render(&level)
                )))
            }
        }
        Ok(ArithmeticGroup { kind, level, field })
    }

    /// Parses `full`, `gamma0:<poly>`, `gamma1:<poly>` or `gammaFull:<poly>`.
    pub fn parse(field: GaloisRing, s: &str) -> Result<Self> {
        let pr = PolyRing::new(field);
        let (kind, rest) = match s.split_once(':') {
            None if s == "full" => return Ok(Self::full(field)),
            None => return Err(Error::InvalidInput(format!("unknown group '{s}'"))),
            Some(("gamma0", r)) => (GroupKind::Gamma0, r),
            Some(("gamma1", r)) => (GroupKind::Gamma1, r),
            Some(("gammaFull", r)) => (GroupKind::GammaFull, r),
            Some(_) => return Err(Error::InvalidInput(format!("unknown group '{s}'"))),
        };
        Self::congruence(field, kind, pr.parse(rest)?)
    }

    pub fn name(&self) -> String {
        let pr = PolyRing::new(self.field);
        let lv = pr.render(&self.level);
        match self.kind {
            GroupKind::Full => "full".into(),
            GroupKind::Gamma0 => format!("gamma0:{lv}"),
            GroupKind::Gamma1 => format!("gamma1:{lv}"),
            GroupKind::GammaFull => format!("gammaFull:{lv}"),
        }
    }

    pub fn polys(&self) -> PolyRing {
        PolyRing::new(self.field)
    }

    pub fn level_degree(&self) -> usize {
        self.polys().degree(&self.level).unwrap_or(0)
    }

    /// Exact congruence test. Fails with `NotInvertible` unless det γ ∈ F_q^*.
    pub fn contains(&self, g: &PolyMat) -> Result<bool> {
        let pr = self.polys();
        let det = mat2::det(&pr, g);
        if pr.degree(&det) != Some(0) {
            return Err(Error::NotInvertible);
        }
        let red = |x: &Poly| pr.rem(x, &self.level).expect("monic level");
        let one = pr.one();
        let is_one = |x: &Poly| red(&pr.sub(x, &one)).is_empty();
        Ok(match self.kind {
            GroupKind::Full => true,
            GroupKind::Gamma0 => red(&g.c).is_empty(),
            GroupKind::Gamma1 => red(&g.c).is_empty() && is_one(&g.a) && is_one(&g.d),
            GroupKind::GammaFull => {
                red(&g.b).is_empty() && red(&g.c).is_empty() && is_one(&g.a) && is_one(&g.d)
            }
        })
    }
}

pub fn group_member(g: &PolyMat, group: &ArithmeticGroup) -> Result<bool> {
    group.contains(g)
}

pub fn poly_inverse(pr: &PolyRing, g: &PolyMat) -> PolyMat {
    mat2::inverse(pr, g).expect("element of GL2(A)")
}

pub fn max_degree(pr: &PolyRing, g: &PolyMat) -> usize {
    g.entries().iter().filter_map(|x| pr.degree(x)).max().unwrap_or(0)
}

pub fn render_polymat(pr: &PolyRing, g: &PolyMat) -> String {
    mat2::render(pr, g)
}

/// Acts by an element of GL₂(A) on a vertex.
pub fn act_poly(tree: &Tree, g: &PolyMat, v: &TreeVertex) -> Result<TreeVertex> {
    tree.act_vertex(&mat2::polymat_to_series(&tree.series, g), v)
}

pub fn act_poly_edge(tree: &Tree, g: &PolyMat, e: &TreeEdge) -> Result<TreeEdge> {
    Ok(TreeEdge::new(act_poly(tree, g, &e.origin)?, act_poly(tree, g, &e.terminus)?))
}

/// g ∈ GL₂(A) together with m such that g·v = Λ_m.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub m: i64,
    pub g: PolyMat,
}

/// Brings v to the standard ray by translations (1 b; 0 1) and the swap
/// (0 1; 1 0). Each swap lowers the level by 2·val(u) ≥ 2.
pub fn reduce_to_standard(tree: &Tree, v: &TreeVertex) -> Result<Reduction> {
    let pr = PolyRing::new(tree.field);
    let f = &tree.field;
    let swap = Mat2::new(pr.zero(), pr.one(), pr.one(), pr.zero());
    let mut g = mat2::identity(&pr);
    let mut x = v.clone();
    loop {
        // Polynomial part: coefficients of π^k, k ≤ 0, i.e. of t^(−k).
        let mut poly = Vec::new();
        for (i, c) in x.u.coeffs.iter().enumerate() {
            let k = x.u.start + i as i64;
            if k > 0 {
                break;
            }
            let deg = (-k) as usize;
            if poly.len() <= deg {
                poly.resize(deg + 1, 0);
            }
            poly[deg] = f.neg(c);
        }
        let poly = crate::algebra::poly::trim(poly);
        if !poly.is_empty() {
            let tr = Mat2::new(pr.one(), poly, pr.zero(), pr.one());
            x = act_poly(tree, &tr, &x)?;
            g = mat2::mul(&pr, &tr, &g);
        }
        if x.u.coeffs.is_empty() && x.n <= 0 {
            return Ok(Reduction { m: -x.n, g });
        }
        x = act_poly(tree, &swap, &x)?;
        g = mat2::mul(&pr, &swap, &g);
    }
}

/// Elements of S_m with the off-diagonal entry restricted to degree < cap
/// (all of S_m when cap ≥ m + 1). For m = 0 this is GL₂(F_q).
pub fn standard_stabilizer(field: &GaloisRing, m: i64, cap: Option<usize>) -> Vec<PolyMat> {
    let pr = PolyRing::new(*field);
    let units = field.units_of_field();
    let c = |x: u32| crate::algebra::poly::trim(vec![x]);
    if m == 0 {
        return crate::representations::enumerate_gl2(field)
            .into_iter()
            .map(|g| Mat2::new(c(g.a), c(g.b), c(g.c), c(g.d)))
            .collect();
    }
    let bound = match cap {
        Some(k) => k.min(m as usize + 1),
        None => m as usize + 1,
    };
    let bs = pr.all_below_degree(bound);
    let mut out = Vec::with_capacity(units.len() * units.len() * bs.len());
    for &a in &units {
        for &d in &units {
            for b in &bs {
                out.push(Mat2::new(vec![a], b.clone(), pr.zero(), vec![d]));
            }
        }
    }
    out
}

/// γ ∈ Γ with γ·v = w given the two reductions, if one exists.
fn witness_from_reductions(
    group: &ArithmeticGroup,
    rv: &Reduction,
    rw: &Reduction,
) -> Result<Option<PolyMat>> {
    if rv.m != rw.m {
        return Ok(None);
    }
    let pr = group.polys();
    let gw_inv = poly_inverse(&pr, &rw.g);
    let cap = group.level_degree();
    for s in standard_stabilizer(&group.field, rv.m, Some(cap)) {
        let gamma = mat2::mul(&pr, &gw_inv, &mat2::mul(&pr, &s, &rv.g));
        if group.contains(&gamma)? {
            return Ok(Some(gamma));
        }
    }
    Ok(None)
}

/// A witness γ ∈ Γ with γ·v = w, or `None` when v and w are inequivalent
/// (an exact answer). `degree_bound` is a sanity cap on witness entries.
pub fn equiv_witness(
    tree: &Tree,
    v: &TreeVertex,
    w: &TreeVertex,
    group: &ArithmeticGroup,
    degree_bound: Option<usize>,
) -> Result<Option<PolyMat>> {
    let rv = reduce_to_standard(tree, v)?;
    let rw = reduce_to_standard(tree, w)?;
    let found = witness_from_reductions(group, &rv, &rw)?;
    if let (Some(g), Some(bound)) = (&found, degree_bound) {
        let needed = max_degree(&group.polys(), g);
        if needed > bound {
            return Err(Error::DegreeBoundTooSmall {
                bound,
                needed,
                context: format!("{} ~ {}", v.id(), w.id()),
            });
        }
    }
    Ok(found)
}

/// The stabilizer Γ_v, listed in full.
pub fn stabilizer(tree: &Tree, v: &TreeVertex, group: &ArithmeticGroup) -> Result<Vec<PolyMat>> {
    let red = reduce_to_standard(tree, v)?;
    stabilizer_from_reduction(group, &red)
}

fn stabilizer_from_reduction(group: &ArithmeticGroup, red: &Reduction) -> Result<Vec<PolyMat>> {
    let pr = group.polys();
    let gi = poly_inverse(&pr, &red.g);
    let mut out = Vec::new();
    for s in standard_stabilizer(&group.field, red.m, None) {
        let x = mat2::mul(&pr, &gi, &mat2::mul(&pr, &s, &red.g));
        if group.contains(&x)? {
            out.push(x);
        }
    }
    Ok(out)
}

/// One of the q + 1 edges at an orbit representative, expressed through the
/// stored edge-orbit representative: edge = ±witness·rep.
#[derive(Clone, Debug)]
pub struct Incident {
    pub edge: TreeEdge,
    pub edge_orbit: usize,
    pub witness: PolyMat,
    /// True when edge = −(witness·rep).
    pub reversed: bool,
    pub neighbor_orbit: usize,
}

#[derive(Clone, Debug)]
pub struct VertexOrbit {
    pub id: usize,
    pub rep: TreeVertex,
    pub m: i64,
    pub reduction: PolyMat,
    /// Quotient distance from the orbit of Λ_0; `None` beyond the explored depth.
    pub depth: Option<usize>,
    pub stabilizer: Vec<PolyMat>,
    /// Filled for explored orbits, in tree-neighbor order.
    pub incident: Vec<Incident>,
}

impl VertexOrbit {
    pub fn explored(&self) -> bool {
        self.depth.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct EdgeOrbit {
    pub id: usize,
    /// Stored orientation: from level m to level m + 1 over the standard ray.
    pub rep: TreeEdge,
    pub origin_orbit: usize,
    pub terminus_orbit: usize,
    pub stabilizer: Vec<PolyMat>,
    /// Witness γ with γ·rep = −rep; never present for subgroups of GL₂(A),
    /// which preserve the ray coordinate m.
    pub reversal: Option<PolyMat>,
}

#[derive(Clone, Debug)]
pub struct Cusp {
    pub id: usize,
    pub first_edge: usize,
    /// Ray vertex orbits from the start of the ray up to the frontier.
    pub vertices: Vec<usize>,
    /// Edge orbits along the ray: `edges[0]` is the first edge, `edges[k]`
    /// leaves `vertices[k-1]` upwards.
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct QuotientGraph {
    pub tree: Tree,
    pub group: ArithmeticGroup,
    pub depth: usize,
    pub persistence: usize,
    pub vertices: Vec<VertexOrbit>,
    pub edges: Vec<EdgeOrbit>,
    pub cusps: Vec<Cusp>,
    pub finite_vertices: Vec<usize>,
    pub finite_edges: Vec<usize>,
    /// Explored frontier orbits not absorbed into a detected cusp.
    pub unresolved: Vec<usize>,
    vertex_cache: HashMap<TreeVertex, (usize, PolyMat)>,
}

#[derive(Clone, Debug)]
pub struct QuotientOptions {
    /// Levels a ray pattern must persist before it is declared a cusp.
    pub persistence: usize,
    pub degree_bound: Option<usize>,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions {
            persistence: 3,
            degree_bound: None,
        }
    }
}

pub const MAX_DEPTH: usize = 8;

struct Builder<'a> {
    tree: &'a Tree,
    group: &'a ArithmeticGroup,
    pr: PolyRing,
    vertices: Vec<VertexOrbit>,
    by_level: BTreeMap<i64, Vec<usize>>,
    cache: HashMap<TreeVertex, (usize, PolyMat)>,
    edges: Vec<EdgeOrbit>,
    edge_index: HashMap<(usize, TreeVertex), usize>,
    degree_bound: Option<usize>,
}

impl<'a> Builder<'a> {
    /// Orbit of x and δ ∈ Γ with δ·rep = x; creates the orbit when new.
    fn classify(&mut self, x: &TreeVertex) -> Result<(usize, PolyMat)> {
        if let Some(hit) = self.cache.get(x) {
            return Ok(hit.clone());
        }
        let rx = reduce_to_standard(self.tree, x)?;
        let candidates = self.by_level.get(&rx.m).cloned().unwrap_or_default();
        for id in candidates {
            let rr = Reduction {
                m: self.vertices[id].m,
                g: self.vertices[id].reduction.clone(),
            };
            if let Some(delta) = witness_from_reductions(self.group, &rr, &rx)? {
                if let Some(bound) = self.degree_bound {
                    let needed = max_degree(&self.pr, &delta);
                    if needed > bound {
                        return Err(Error::DegreeBoundTooSmall {
                            bound,
                            needed,
                            context: format!("{} ~ {}", self.vertices[id].rep.id(), x.id()),
                        });
                    }
                }
                self.cache.insert(x.clone(), (id, delta.clone()));
                return Ok((id, delta));
            }
        }
        let id = self.vertices.len();
        self.vertices.push(VertexOrbit {
            id,
            rep: x.clone(),
            m: rx.m,
            reduction: rx.g,
            depth: None,
            stabilizer: Vec::new(),
            incident: Vec::new(),
        });
        self.by_level.entry(rx.m).or_default().push(id);
        let ident = mat2::identity(&self.pr);
        self.cache.insert(x.clone(), (id, ident.clone()));
        Ok((id, ident))
    }

    fn ensure_stabilizer(&mut self, id: usize) -> Result<()> {
        if self.vertices[id].stabilizer.is_empty() {
            let red = Reduction {
                m: self.vertices[id].m,
                g: self.vertices[id].reduction.clone(),
            };
            self.vertices[id].stabilizer = stabilizer_from_reduction(self.group, &red)?;
        }
        Ok(())
    }

    /// For y adjacent to rep(o) one level up the ray: the least vertex z in
    /// the Γ_rep-orbit of y and s with s·z = y.
    fn canonical_up(&mut self, o: usize, y: &TreeVertex) -> Result<(TreeVertex, PolyMat)> {
        self.ensure_stabilizer(o)?;
        let mut best: Option<(TreeVertex, PolyMat)> = None;
        for s in &self.vertices[o].stabilizer {
            let z = act_poly(self.tree, s, y)?;
            if best.as_ref().map_or(true, |(b, _)| z < *b) {
                best = Some((z, s.clone()));
            }
        }
        let (z, s) = best.expect("stabilizer contains the identity");
        Ok((z, poly_inverse(&self.pr, &s)))
    }

    fn edge_orbit(&mut self, o: usize, z: &TreeVertex) -> Result<usize> {
        if let Some(&id) = self.edge_index.get(&(o, z.clone())) {
            return Ok(id);
        }
        self.ensure_stabilizer(o)?;
        let mut stab = Vec::new();
        for s in &self.vertices[o].stabilizer {
            if act_poly(self.tree, s, z)? == *z {
                stab.push(s.clone());
            }
        }
        let (t_orbit, _) = self.classify(z)?;
        let id = self.edges.len();
        self.edges.push(EdgeOrbit {
            id,
            rep: TreeEdge::new(self.vertices[o].rep.clone(), z.clone()),
            origin_orbit: o,
            terminus_orbit: t_orbit,
            stabilizer: stab,
            reversal: None,
        });
        self.edge_index.insert((o, z.clone()), id);
        Ok(id)
    }

    fn incident_edges(&mut self, o: usize) -> Result<Vec<Incident>> {
        let r = self.vertices[o].rep.clone();
        let m = self.vertices[o].m;
        let mut out = Vec::new();
        for w in self.tree.neighbors(&r) {
            let (wo, delta) = self.classify(&w)?;
            let mw = self.vertices[wo].m;
            let edge = TreeEdge::new(r.clone(), w.clone());
            if mw == m + 1 {
                let (z, s) = self.canonical_up(o, &w)?;
                let id = self.edge_orbit(o, &z)?;
                out.push(Incident {
                    edge,
                    edge_orbit: id,
                    witness: s,
                    reversed: false,
                    neighbor_orbit: wo,
                });
            } else {
                debug_assert_eq!(mw, m - 1);
                let dinv = poly_inverse(&self.pr, &delta);
                let y = act_poly(self.tree, &dinv, &r)?;
                let (z, s) = self.canonical_up(wo, &y)?;
                let id = self.edge_orbit(wo, &z)?;
                out.push(Incident {
                    edge,
                    edge_orbit: id,
                    witness: mat2::mul(&self.pr, &delta, &s),
                    reversed: true,
                    neighbor_orbit: wo,
                });
            }
        }
        Ok(out)
    }
}

/// Builds Γ\τ over the orbits meeting the ball of radius `depth` around Λ_0.
pub fn quotient_graph(tree: &Tree, group: &ArithmeticGroup, depth: usize, opts: &QuotientOptions) -> Result<QuotientGraph> {
    if depth > MAX_DEPTH {
        return Err(Error::TooLarge(format!("depth {depth} exceeds {MAX_DEPTH}")));
    }
    if tree.field != group.field {
        return Err(Error::RingMismatch("tree and group over different fields".into()));
    }
    let mut b = Builder {
        tree,
        group,
        pr: group.polys(),
        vertices: Vec::new(),
        by_level: BTreeMap::new(),
        cache: HashMap::new(),
        edges: Vec::new(),
        edge_index: HashMap::new(),
        degree_bound: opts.degree_bound,
    };
    let origin = tree.standard_vertex();
    let (mut ball, _) = tree.ball_unbounded(&origin, depth);
    ball.sort();
    b.classify(&origin)?;
    for v in &ball {
        let d = tree.distance(&origin, v) as usize;
        let (o, _) = b.classify(v)?;
        let slot = &mut b.vertices[o].depth;
        *slot = Some(slot.map_or(d, |x| x.min(d)));
    }
    let explored: Vec<usize> = (0..b.vertices.len()).filter(|&i| b.vertices[i].explored()).collect();
    for &o in &explored {
        b.ensure_stabilizer(o)?;
        let inc = b.incident_edges(o)?;
        b.vertices[o].incident = inc;
    }

    let ray_like = |v: &VertexOrbit| -> bool {
        if v.m < 1 || !v.explored() {
            return false;
        }
        let lower: BTreeSet<usize> = v
            .incident
            .iter()
            .filter(|i| i.reversed)
            .map(|i| i.edge_orbit)
            .collect();
        lower.len() == 1
    };
    let mut cusps = Vec::new();
    let mut on_ray = vec![false; b.vertices.len()];
    let mut unresolved = Vec::new();
    for &f in &explored {
        if b.vertices[f].depth != Some(depth) {
            continue;
        }
        if !ray_like(&b.vertices[f]) {
            unresolved.push(f);
            continue;
        }
        let mut chain = vec![f];
        let mut cur = f;
        let first_edge = loop {
            let low = b.vertices[cur]
                .incident
                .iter()
                .find(|i| i.reversed)
                .expect("ray vertex has a lower edge")
                .clone();
            let u = low.neighbor_orbit;
            if ray_like(&b.vertices[u]) && !chain.contains(&u) {
                chain.push(u);
                cur = u;
            } else {
                break low.edge_orbit;
            }
        };
        if chain.len() < opts.persistence.max(1) {
            unresolved.push(f);
            continue;
        }
        chain.reverse();
        let mut edges = vec![first_edge];
        for &v in &chain {
            let up = b.vertices[v]
                .incident
                .iter()
                .find(|i| !i.reversed)
                .expect("ray vertex has an upper edge");
            edges.push(up.edge_orbit);
        }
        for &v in &chain {
            on_ray[v] = true;
        }
        cusps.push(Cusp {
            id: cusps.len(),
            first_edge,
            vertices: chain,
            edges,
        });
    }
    let finite_vertices: Vec<usize> = explored.iter().copied().filter(|&v| !on_ray[v]).collect();
    let finite_set: BTreeSet<usize> = finite_vertices.iter().copied().collect();
    let finite_edges: Vec<usize> = b
        .edges
        .iter()
        .filter(|e| finite_set.contains(&e.origin_orbit) && finite_set.contains(&e.terminus_orbit))
        .map(|e| e.id)
        .collect();
    Ok(QuotientGraph {
        tree: tree.clone(),
        group: group.clone(),
        depth,
        persistence: opts.persistence,
        vertices: b.vertices,
        edges: b.edges,
        cusps,
        finite_vertices,
        finite_edges,
        unresolved,
        vertex_cache: b.cache,
    })
}

impl QuotientGraph {
    pub fn explored_vertices(&self) -> impl Iterator<Item = &VertexOrbit> {
        self.vertices.iter().filter(|v| v.explored())
    }

    pub fn is_finite_vertex(&self, v: usize) -> bool {
        self.finite_vertices.contains(&v)
    }

    pub fn first_edges(&self) -> Vec<usize> {
        self.cusps.iter().map(|c| c.first_edge).collect()
    }

    /// Cusp and position along its ray for ray edges (0 = first edge).
    pub fn ray_position(&self, edge: usize) -> Option<(usize, usize)> {
        self.cusps
            .iter()
            .find_map(|c| c.edges.iter().position(|&e| e == edge).map(|k| (c.id, k)))
    }

    /// Edges leaving finite-part vertices that lead neither into the finite
    /// part nor onto a detected ray.
    pub fn dangling_edges(&self) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for &v in &self.finite_vertices {
            for i in &self.vertices[v].incident {
                if !self.finite_edges.contains(&i.edge_orbit) && !self.first_edges().contains(&i.edge_orbit) {
                    out.insert(i.edge_orbit);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Orbit of an arbitrary vertex and δ ∈ Γ with δ·rep = x. Only orbits
    /// already known to the graph are returned.
    pub fn locate_vertex(&self, x: &TreeVertex) -> Result<(usize, PolyMat)> {
        if let Some(hit) = self.vertex_cache.get(x) {
            return Ok(hit.clone());
        }
        let rx = reduce_to_standard(&self.tree, x)?;
        for v in self.vertices.iter().filter(|v| v.m == rx.m) {
            let rr = Reduction { m: v.m, g: v.reduction.clone() };
            if let Some(delta) = witness_from_reductions(&self.group, &rr, &rx)? {
                return Ok((v.id, delta));
            }
        }
        Err(Error::OutOfExploredRegion(format!("vertex {} lies in no known orbit", x.id())))
    }

    /// Edge orbit of an arbitrary edge e with γ ∈ Γ such that
    /// e = γ·rep (or e = −γ·rep when the flag is set).
    pub fn locate_edge(&self, e: &TreeEdge) -> Result<(usize, PolyMat, bool)> {
        let pr = self.group.polys();
        let (lo, hi, reversed) = {
            let (o1, _) = self.locate_vertex(&e.origin)?;
            let (o2, _) = self.locate_vertex(&e.terminus)?;
            if self.vertices[o1].m < self.vertices[o2].m {
                (e.origin.clone(), e.terminus.clone(), false)
            } else {
                (e.terminus.clone(), e.origin.clone(), true)
            }
        };
        let (o, delta) = self.locate_vertex(&lo)?;
        let y = act_poly(&self.tree, &poly_inverse(&pr, &delta), &hi)?;
        let rep = &self.vertices[o];
        if rep.stabilizer.is_empty() {
            return Err(Error::OutOfExploredRegion(format!("orbit {o} has no stabilizer data")));
        }
        for ed in self.edges.iter().filter(|x| x.origin_orbit == o) {
            for s in &rep.stabilizer {
                if act_poly(&self.tree, s, &ed.rep.terminus)? == y {
                    return Ok((ed.id, mat2::mul(&pr, &delta, s), reversed));
                }
            }
        }
        Err(Error::OutOfExploredRegion(format!(
            "edge {} -> {} lies in no known orbit",
            e.origin.id(),
            e.terminus.id()
        )))
    }

    /// E − V + C over the finite part.
    pub fn betti1(&self) -> i64 {
        let idx: HashMap<usize, usize> = self.finite_vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..idx.len()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for &e in &self.finite_edges {
            let a = idx[&self.edges[e].origin_orbit];
            let b = idx[&self.edges[e].terminus_orbit];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let comps = (0..idx.len()).filter(|&i| find(&mut parent, i) == i).count();
        self.finite_edges.len() as i64 - self.finite_vertices.len() as i64 + comps as i64
    }

    /// Re-checks every stored witness: membership in Γ and the mapping equation.
    pub fn verify(&self) -> Result<()> {
        for v in self.explored_vertices() {
            for s in &v.stabilizer {
                if !self.group.contains(s)? || act_poly(&self.tree, s, &v.rep)? != v.rep {
                    return Err(Error::InvarianceViolation(format!("bad stabilizer element at orbit {}", v.id)));
                }
            }
            for inc in &v.incident {
                if !self.group.contains(&inc.witness)? {
                    return Err(Error::InvarianceViolation(format!("witness outside the group at orbit {}", v.id)));
                }
                let rep = &self.edges[inc.edge_orbit].rep;
                let mut img = act_poly_edge(&self.tree, &inc.witness, rep)?;
                if inc.reversed {
                    img = img.reverse();
                }
                if img != inc.edge {
                    return Err(Error::InvarianceViolation(format!(
                        "witness does not map the representative at orbit {}",
                        v.id
                    )));
                }
            }
        }
        Ok(())
    }

    fn cusp_of_vertex(&self, v: usize) -> Option<usize> {
        self.cusps.iter().find(|c| c.vertices.contains(&v)).map(|c| c.id)
    }

    pub fn to_json(&self) -> Value {
        let pr = self.group.polys();
        let vertices: Vec<Value> = self
            .explored_vertices()
            .map(|v| {
                json!({
                    "id": v.id,
                    "rep": v.rep.id(),
                    "m": v.m,
                    "depth": v.depth,
                    "stabilizer_order": v.stabilizer.len(),
                    "finite": self.is_finite_vertex(v.id),
                    "cusp": self.cusp_of_vertex(v.id),
                    "incident": v.incident.iter().map(|i| json!({
                        "edge_orbit": i.edge_orbit,
                        "neighbor_orbit": i.neighbor_orbit,
                        "reversed": i.reversed,
                        "witness": render_polymat(&pr, &i.witness),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| {
                json!({
                    "id": e.id,
                    "origin": e.origin_orbit,
                    "terminus": e.terminus_orbit,
                    "rep": [e.rep.origin.id(), e.rep.terminus.id()],
                    "stabilizer_order": e.stabilizer.len(),
                    "reversal": e.reversal.as_ref().map(|g| render_polymat(&pr, g)),
                    "finite": self.finite_edges.contains(&e.id),
                    "first_edge_of": self.cusps.iter().find(|c| c.first_edge == e.id).map(|c| c.id),
                })
            })
            .collect();
        let cusps: Vec<Value> = self
            .cusps
            .iter()
            .map(|c| json!({"id": c.id, "first_edge": c.first_edge, "ray_vertices": c.vertices, "ray_edges": c.edges}))
            .collect();
        json!({
            "schema": SCHEMA,
            "kind": "quotient",
            "gamma": self.group.name(),
            "q": self.tree.q(),
            "depth": self.depth,
            "vertices": vertices,
            "edges": edges,
            "cusps": cusps,
            "finite_vertices": self.finite_vertices,
            "finite_edges": self.finite_edges,
            "unresolved": self.unresolved,
            "betti1": self.betti1(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph \"{}\" {{\n", self.group.name());
        let shown: BTreeSet<usize> = self.explored_vertices().map(|v| v.id).collect();
        for v in self.explored_vertices() {
            let cusp = self.cusp_of_vertex(v.id).map(|c| format!(" cusp={c}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "  \"o{}\" [label=\"{} m={} |stab|={}{}\"];",
                v.id,
                v.rep.id(),
                v.m,
                v.stabilizer.len(),
                cusp
            );
        }
        for e in &self.edges {
            if !shown.contains(&e.origin_orbit) || !shown.contains(&e.terminus_orbit) {
                continue;
            }
            let style = if self.first_edges().contains(&e.id) { ", style=bold" } else { "" };
            let _ = writeln!(
                out,
                "  \"o{}\" -- \"o{}\" [dir=forward, label=\"e{} |stab|={} rev=false\"{}];",
                e.origin_orbit,
                e.terminus_orbit,
                e.id,
                e.stabilizer.len(),
                style
            );
        }
        out.push_str("}\n");
        out
    }
}

pub fn betti1(qg: &QuotientGraph) -> i64 {
    qg.betti1()
}
