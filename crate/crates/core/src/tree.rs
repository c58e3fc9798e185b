//! The Bruhat–Tits tree of GL₂(K_∞), K_∞ = F_q((π)).
//!
//! A vertex is the homothety class of the lattice spanned by the columns of
//! `[[π^n, u], [0, 1]]`, written `(n, u)` with `u` an exact Laurent polynomial
//! supported in `[val(u), n)`. Moving to level n−1 forgets the π^(n−1)
//! coefficient of u; moving to level n+1 appends a coefficient c·π^n. The
//! end ∞ is the limit of (n, 0) as n → −∞ and a finite end z is the limit of
//! (n, z mod π^n) as n → +∞.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::algebra::mat2::{self, Matrix2};
use crate::algebra::{GaloisRing, Series, SeriesRing, TruncatedSeries, DEFAULT_PRECISION};
use crate::error::{Error, Result};

/// Default radius cap for [`Tree::ball`].
pub const MAX_BALL_RADIUS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeVertex {
    pub n: i64,
    /// Exact, reduced modulo π^n.
    pub u: TruncatedSeries<u32>,
}

impl TreeVertex {
    /// Ordering key: level first, then the coefficient list of u.
    fn key(&self) -> (i64, i64, &[u32]) {
        (self.n, self.u.start, &self.u.coeffs)
    }

    /// Stable textual id "v:n:u" where u is `0` or `<start>h<hex coeffs>`.
    pub fn id(&self) -> String {
        if self.u.coeffs.is_empty() {
            return format!("v:{}:0", self.n);
        }
        let digits: Vec<String> = self.u.coeffs.iter().map(|c| format!("{c:x}")).collect();
        format!("v:{}:{}h{}", self.n, self.u.start, digits.join("."))
    }
}

impl Ord for TreeVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for TreeVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeEdge {
    pub origin: TreeVertex,
    pub terminus: TreeVertex,
}

impl TreeEdge {
    pub fn new(origin: TreeVertex, terminus: TreeVertex) -> Self {
        TreeEdge { origin, terminus }
    }

    pub fn reverse(&self) -> TreeEdge {
        TreeEdge::new(self.terminus.clone(), self.origin.clone())
    }

    /// True when the edge goes up one level.
    pub fn is_ascending(&self) -> bool {
        self.terminus.n == self.origin.n + 1
    }

    /// The level-increasing orientation and whether `self` had to be reversed.
    pub fn canonical(&self) -> (TreeEdge, bool) {
        if self.is_ascending() {
            (self.clone(), false)
        } else {
            (self.reverse(), true)
        }
    }
}

/// A point of P¹(K_∞), seen as an end of the tree.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryPoint {
    Infinity,
    Finite(Series<GaloisRing>),
}

/// Tree over a fixed residue field F_q, with the series context used for
/// all matrix arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct Tree {
    pub field: GaloisRing,
    pub series: SeriesRing<GaloisRing>,
}

impl Tree {
    pub fn new(field: GaloisRing) -> Self {
        Self::with_precision(field, DEFAULT_PRECISION)
    }

    pub fn with_precision(field: GaloisRing, precision: usize) -> Self {
        assert!(field.k() == 1, "the tree is defined over a residue field");
        Tree {
            series: SeriesRing::new(field, precision),
            field,
        }
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    /// Builds (n, u mod π^n).
    pub fn vertex(&self, n: i64, u: &Series<GaloisRing>) -> Result<TreeVertex> {
        Ok(TreeVertex {
            n,
            u: self.series.reduce_mod(u, n)?,
        })
    }

    /// (n, Σ coeffs[i] π^(start+i)) reduced.
    pub fn vertex_from_coeffs(&self, n: i64, start: i64, coeffs: Vec<u32>) -> TreeVertex {
        let u = self.series.exact(start, coeffs);
        self.vertex(n, &u).expect("exact input")
    }

    pub fn standard_vertex(&self) -> TreeVertex {
        self.vertex_from_coeffs(0, 0, vec![])
    }

    /// The vertex Λ_m = (−m, 0) of the standard apartment.
    pub fn lambda(&self, m: i64) -> TreeVertex {
        self.vertex_from_coeffs(-m, 0, vec![])
    }

    pub fn parent(&self, v: &TreeVertex) -> TreeVertex {
        self.vertex(v.n - 1, &v.u).expect("exact input")
    }

    /// The q vertices one level up.
    pub fn children(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        self.field
            .elements()
            .map(|c| {
                let step = self.series.monomial(c, v.n);
                TreeVertex {
                    n: v.n + 1,
                    u: self.series.add(&v.u, &step),
                }
            })
            .collect()
    }

    /// Parent first, then children in field-element order.
    pub fn neighbors(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        let mut out = vec![self.parent(v)];
        out.extend(self.children(v));
        out
    }

    /// Outgoing edges at v, in the order of [`Tree::neighbors`].
    pub fn edges_from(&self, v: &TreeVertex) -> Vec<TreeEdge> {
        self.neighbors(v)
            .into_iter()
            .map(|w| TreeEdge::new(v.clone(), w))
            .collect()
    }

    /// The q edges leaving e(1) other than −e.
    pub fn onward_edges(&self, e: &TreeEdge) -> Vec<TreeEdge> {
        self.edges_from(&e.terminus)
            .into_iter()
            .filter(|f| f.terminus != e.origin)
            .collect()
    }

    pub fn adjacent(&self, v: &TreeVertex, w: &TreeVertex) -> bool {
        match w.n - v.n {
            1 => self.parent(w) == *v,
            -1 => self.parent(v) == *w,
            _ => false,
        }
    }

    pub fn edge(&self, origin: TreeVertex, terminus: TreeVertex) -> Result<TreeEdge> {
        if !self.adjacent(&origin, &terminus) {
            return Err(Error::InvalidInput(format!(
                "{} and {} are not adjacent",
                origin.id(),
                terminus.id()
            )));
        }
        Ok(TreeEdge::new(origin, terminus))
    }

    /// Level of the last common vertex on the paths from v and w towards ∞.
    fn meet_level(&self, v: &TreeVertex, w: &TreeVertex) -> i64 {
        let m = v.n.min(w.n);
        let d = self.series.sub(&v.u, &w.u);
        match d.valuation() {
            Some(k) => k.min(m),
            None => m,
        }
    }

    /// Whether w lies in the subtree hanging below y (w = y allowed).
    pub fn is_below(&self, w: &TreeVertex, y: &TreeVertex) -> bool {
        w.n >= y.n && self.meet_level(w, y) == y.n
    }

    /// The ancestor of v at the given level (v itself when level ≥ v.n).
    pub fn ancestor(&self, v: &TreeVertex, level: i64) -> TreeVertex {
        if level >= v.n {
            return v.clone();
        }
        self.vertex(level, &v.u).expect("exact input")
    }

    /// The last common vertex on the paths from v and w towards ∞.
    pub fn meet(&self, v: &TreeVertex, w: &TreeVertex) -> TreeVertex {
        self.ancestor(v, self.meet_level(v, w))
    }

    pub fn distance(&self, v: &TreeVertex, w: &TreeVertex) -> u64 {
        let k = self.meet_level(v, w);
        ((v.n - k) + (w.n - k)) as u64
    }

    /// Vertices of the geodesic from v to w, both included.
    pub fn path(&self, v: &TreeVertex, w: &TreeVertex) -> Vec<TreeVertex> {
        let k = self.meet_level(v, w);
        let mut up = Vec::new();
        let mut x = v.clone();
        while x.n > k {
            up.push(x.clone());
            x = self.parent(&x);
        }
        up.push(x);
        let mut down = Vec::new();
        let mut y = w.clone();
        while y.n > k {
            down.push(y.clone());
            y = self.parent(&y);
        }
        up.extend(down.into_iter().rev());
        up
    }

    /// All vertices within `radius` of `center` and all oriented edges between
    /// them, in breadth-first order.
    pub fn ball(&self, center: &TreeVertex, radius: usize) -> Result<(Vec<TreeVertex>, Vec<TreeEdge>)> {
        if radius > MAX_BALL_RADIUS {
            return Err(Error::TooLarge(format!(
                "ball radius {radius} exceeds the maximum {MAX_BALL_RADIUS}"
            )));
        }
        Ok(self.ball_unbounded(center, radius))
    }

    pub fn ball_unbounded(&self, center: &TreeVertex, radius: usize) -> (Vec<TreeVertex>, Vec<TreeEdge>) {
        let mut dist: HashMap<TreeVertex, usize> = HashMap::new();
        let mut order = vec![center.clone()];
        let mut edges = Vec::new();
        dist.insert(center.clone(), 0);
        let mut queue = VecDeque::from([center.clone()]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[&v];
            if dv == radius {
                continue;
            }
            for w in self.neighbors(&v) {
                if dist.contains_key(&w) {
                    continue;
                }
                dist.insert(w.clone(), dv + 1);
                edges.push(TreeEdge::new(v.clone(), w.clone()));
                edges.push(TreeEdge::new(w.clone(), v.clone()));
                order.push(w.clone());
                queue.push_back(w);
            }
        }
        (order, edges)
    }

    pub fn vertex_matrix(&self, v: &TreeVertex) -> Matrix2 {
        let s = &self.series;
        mat2::Mat2::new(s.monomial(1, v.n), v.u.clone(), s.zero(), s.one())
    }

    /// Class of the column lattice of M: reduce M to `[[π^n, u], [0, 1]]` by
    /// integral column operations and scaling.
    pub fn vertex_normal_form(&self, m: &Matrix2) -> Result<TreeVertex> {
        let s = &self.series;
        let (d, b) = match (m.c.valuation(), m.d.valuation()) {
            (None, None) => {
                return Err(if m.c.is_exact() && m.d.is_exact() {
                    Error::NotInvertible
                } else {
                    Error::PrecisionExhausted("bottom row not certified nonzero".into())
                })
            }
            (Some(vc), Some(vd)) => {
                if vd <= vc {
                    (&m.d, &m.b)
                } else {
                    (&m.c, &m.a)
                }
            }
            (None, Some(vd)) => {
                if m.c.is_exact() || m.c.start >= vd {
                    (&m.d, &m.b)
                } else {
                    return Err(Error::PrecisionExhausted("cannot choose a pivot column".into()));
                }
            }
            (Some(vc), None) => {
                if m.d.is_exact() || m.d.start >= vc {
                    (&m.c, &m.a)
                } else {
                    return Err(Error::PrecisionExhausted("cannot choose a pivot column".into()));
                }
            }
        };
        let det = mat2::det(s, m);
        let vdet = det.valuation().ok_or_else(|| {
            if det.is_exact() {
                Error::NotInvertible
            } else {
                Error::PrecisionExhausted("determinant not certified nonzero".into())
            }
        })?;
        let vd = d.valuation().expect("pivot has a valuation");
        let n = vdet - 2 * vd;
        let u = s.div(b, d)?;
        self.vertex(n, &u)
    }

    pub fn act_vertex(&self, g: &Matrix2, v: &TreeVertex) -> Result<TreeVertex> {
        let m = mat2::mul(&self.series, g, &self.vertex_matrix(v));
        self.vertex_normal_form(&m)
    }

    pub fn act_edge(&self, g: &Matrix2, e: &TreeEdge) -> Result<TreeEdge> {
        Ok(TreeEdge::new(
            self.act_vertex(g, &e.origin)?,
            self.act_vertex(g, &e.terminus)?,
        ))
    }

    /// Möbius action z ↦ (az + b)/(cz + d) on ends.
    pub fn act_boundary(&self, g: &Matrix2, z: &BoundaryPoint) -> Result<BoundaryPoint> {
        let s = &self.series;
        let (num, den) = match z {
            BoundaryPoint::Infinity => (g.a.clone(), g.c.clone()),
            BoundaryPoint::Finite(z) => (
                s.add(&s.mul(&g.a, z), &g.b),
                s.add(&s.mul(&g.c, z), &g.d),
            ),
        };
        if den.is_exact_zero() {
            return Ok(BoundaryPoint::Infinity);
        }
        if den.valuation().is_none() {
            return Err(Error::PrecisionExhausted(
                "cannot decide whether the image end is ∞".into(),
            ));
        }
        Ok(BoundaryPoint::Finite(s.div(&num, &den)?))
    }

    /// Whether the end b lies in U(e): the half-line from e(0) towards b
    /// passes through e(1).
    pub fn boundary_in_u(&self, b: &BoundaryPoint, e: &TreeEdge) -> Result<bool> {
        let s = &self.series;
        let (top, descending) = if e.is_ascending() {
            (&e.terminus, false)
        } else {
            (&e.origin, true)
        };
        let inside_top = match b {
            BoundaryPoint::Infinity => false,
            BoundaryPoint::Finite(z) => {
                let zr = s.reduce_mod(z, top.n)?;
                s.sub(&zr, &top.u).is_exact_zero()
            }
        };
        Ok(inside_top != descending)
    }

    /// An end lying in U(e).
    pub fn representative_end(&self, e: &TreeEdge) -> BoundaryPoint {
        if e.is_ascending() {
            BoundaryPoint::Finite(e.terminus.u.clone())
        } else {
            BoundaryPoint::Infinity
        }
    }

    /// The index (n, z mod π^(n+1)) of an unoriented edge between levels n and n+1.
    pub fn covering_index(&self, e: &TreeEdge) -> (i64, TruncatedSeries<u32>) {
        let (c, _) = e.canonical();
        (c.origin.n, c.terminus.u)
    }

    pub fn edge_from_covering_index(&self, n: i64, z: &Series<GaloisRing>) -> Result<TreeEdge> {
        let top = self.vertex(n + 1, z)?;
        Ok(TreeEdge::new(self.parent(&top), top))
    }

    /// A random vertex reached by a non-backtracking-free random walk.
    pub fn random_vertex<G: rand::Rng>(&self, rng: &mut G, center: &TreeVertex, steps: usize) -> TreeVertex {
        let mut v = center.clone();
        for _ in 0..steps {
            let nb = self.neighbors(&v);
            v = nb[rng.gen_range(0..nb.len())].clone();
        }
        v
    }

    /// A random finite end with exact coefficients in [low, low + len).
    pub fn random_end<G: rand::Rng>(&self, rng: &mut G, low: i64, len: usize) -> BoundaryPoint {
        let q = self.q() as u32;
        let coeffs = (0..len).map(|_| rng.gen_range(0..q)).collect();
        BoundaryPoint::Finite(self.series.with_precision(low, coeffs, low + len as i64))
    }

    fn random_series<G: rand::Rng>(&self, rng: &mut G, low: i64, len: usize) -> Series<GaloisRing> {
        let q = self.q() as u32;
        let coeffs = (0..len).map(|_| rng.gen_range(0..q)).collect();
        self.series.exact(low, coeffs)
    }

    /// A random element of GL₂(O_∞) with polynomial-in-π entries.
    pub fn random_integral<G: rand::Rng>(&self, rng: &mut G, len: usize) -> Matrix2 {
        loop {
            let g = mat2::Mat2::new(
                self.random_series(rng, 0, len),
                self.random_series(rng, 0, len),
                self.random_series(rng, 0, len),
                self.random_series(rng, 0, len),
            );
            let d = mat2::det(&self.series, &g);
            if d.valuation() == Some(0) {
                return g;
            }
        }
    }

    /// A random invertible matrix with Laurent-polynomial entries.
    pub fn random_gl2<G: rand::Rng>(&self, rng: &mut G, spread: i64, len: usize) -> Matrix2 {
        loop {
            let mut entry = || {
                let low = rng.gen_range(-spread..=spread);
                self.random_series(rng, low, len)
            };
            let g = mat2::Mat2::new(entry(), entry(), entry(), entry());
            if !mat2::det(&self.series, &g).is_exact_zero() {
                return g;
            }
        }
    }

    /// DOT rendering of a set of oriented edges; each unoriented edge is drawn
    /// once, directed upwards in level.
    pub fn to_dot(&self, name: &str, vertices: &[TreeVertex], edges: &[TreeEdge]) -> String {
        let mut out = format!("graph \"{name}\" {{\n");
        for v in vertices {
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"({}, {})\"];",
                v.id(),
                v.n,
                self.series.render(&v.u)
            );
        }
        let mut seen = HashSet::new();
        for e in edges {
            let (c, _) = e.canonical();
            if seen.insert(c.clone()) {
                let _ = writeln!(
                    out,
                    "  \"{}\" -- \"{}\" [dir=forward];",
                    c.origin.id(),
                    c.terminus.id()
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Scalar matrix c·id.
pub fn scalar(tree: &Tree, c: &Series<GaloisRing>) -> Matrix2 {
    let s = &tree.series;
    mat2::Mat2::new(c.clone(), s.zero(), s.zero(), c.clone())
}

/// Renders a vertex as "(n, u)".
pub fn render_vertex(tree: &Tree, v: &TreeVertex) -> String {
    format!("({}, {})", v.n, tree.series.render(&v.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tree(p: u64, f: usize) -> Tree {
        Tree::new(GaloisRing::field(p, f).unwrap())
    }

    /// Lattice-neighbor oracle: the q+1 index-q superlattices of
    /// span(π^n e1, u e1 + e2), up to scaling, listed via their column bases.
    fn lattice_neighbors(t: &Tree, v: &TreeVertex) -> Vec<TreeVertex> {
        let s = &t.series;
        let m = t.vertex_matrix(v);
        let pi_inv = s.monomial(1, -1);
        let mut out = Vec::new();
        // Superlattices L + π^{-1}·ℓ for each line ℓ of L/πL.
        let lines: Vec<(u32, u32)> = std::iter::once((1, 0))
            .chain(t.field.elements().map(|c| (c, 1)))
            .collect();
        for (x, y) in lines {
            let col = (
                s.add(&s.scale(&m.a, &x), &s.scale(&m.b, &y)),
                s.add(&s.scale(&m.c, &x), &s.scale(&m.d, &y)),
            );
            let new = (s.mul(&col.0, &pi_inv), s.mul(&col.1, &pi_inv));
            let other = if y == 0 { (m.b.clone(), m.d.clone()) } else { (m.a.clone(), m.c.clone()) };
            let g = mat2::Mat2::new(new.0, other.0, new.1, other.1);
            out.push(t.vertex_normal_form(&g).unwrap());
        }
        out
    }

    #[test]
    fn standard_vertex_and_neighbors() {
        let t = tree(2, 1);
        let o = t.standard_vertex();
        assert_eq!(o.n, 0);
        assert!(o.u.is_exact_zero());
        let nb = t.neighbors(&o);
        assert_eq!(nb.len(), 3);
        let expect: HashSet<TreeVertex> = [
            t.vertex_from_coeffs(-1, 0, vec![]),
            t.vertex_from_coeffs(1, 0, vec![]),
            t.vertex_from_coeffs(1, 0, vec![1]),
        ]
        .into_iter()
        .collect();
        assert_eq!(nb.iter().cloned().collect::<HashSet<_>>(), expect);
        let oracle: HashSet<TreeVertex> = lattice_neighbors(&t, &o).into_iter().collect();
        assert_eq!(oracle, expect);
        assert_eq!(tree(3, 1).neighbors(&o).len(), 4);
    }

    #[test]
    fn neighbors_match_lattice_oracle() {
        for (p, f) in [(2, 1), (3, 1), (2, 2)] {
            let t = tree(p, f);
            let (vs, _) = t.ball(&t.standard_vertex(), 2).unwrap();
            for v in vs {
                let a: HashSet<_> = t.neighbors(&v).into_iter().collect();
                let b: HashSet<_> = lattice_neighbors(&t, &v).into_iter().collect();
                assert_eq!(a, b);
                assert_eq!(a.len() as u64, t.q() + 1);
            }
        }
    }

    #[test]
    fn adjacency_is_symmetric() {
        let t = tree(2, 1);
        let (vs, _) = t.ball(&t.standard_vertex(), 4).unwrap();
        for v in &vs {
            for w in t.neighbors(v) {
                assert!(t.neighbors(&w).contains(v));
            }
        }
    }

    #[test]
    fn normal_forms() {
        let t = tree(2, 1);
        let s = &t.series;
        let id = mat2::identity(s);
        assert_eq!(t.vertex_normal_form(&id).unwrap(), t.standard_vertex());
        let g = mat2::diag(s, s.pi(), s.one());
        assert_eq!(t.vertex_normal_form(&g).unwrap(), t.vertex_from_coeffs(1, 0, vec![]));
        assert_eq!(t.act_vertex(&g, &t.standard_vertex()).unwrap(), t.vertex_from_coeffs(1, 0, vec![]));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (vs, _) = t.ball(&t.standard_vertex(), 3).unwrap();
        for i in 0..200 {
            let v = &vs[i % vs.len()];
            let m = mat2::mul(s, &t.vertex_matrix(v), &t.random_integral(&mut rng, 4));
            assert_eq!(&t.vertex_normal_form(&m).unwrap(), v);
            let again = t.vertex_normal_form(&t.vertex_matrix(v)).unwrap();
            assert_eq!(&again, v);
        }
    }

    #[test]
    fn normal_form_needs_precision() {
        let t = tree(2, 1);
        let s = &t.series;
        let vague = s.with_precision(0, vec![], 3);
        let m = mat2::Mat2::new(s.one(), s.zero(), vague.clone(), vague);
        assert!(matches!(t.vertex_normal_form(&m), Err(Error::PrecisionExhausted(_))));
    }

    /// Distance oracle: breadth-first search.
    fn bfs_distance(t: &Tree, v: &TreeVertex, w: &TreeVertex) -> u64 {
        let mut seen = HashSet::from([v.clone()]);
        let mut frontier = vec![v.clone()];
        let mut d = 0;
        loop {
            if frontier.contains(w) {
                return d;
            }
            let mut next = Vec::new();
            for x in frontier {
                for y in t.neighbors(&x) {
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
            d += 1;
        }
    }

    #[test]
    fn distances() {
        let t = tree(2, 1);
        let o = t.standard_vertex();
        assert_eq!(t.distance(&o, &t.vertex_from_coeffs(1, 0, vec![])), 1);
        let w = t.vertex_from_coeffs(2, 1, vec![1]);
        assert_eq!(t.distance(&o, &w), 2);
        assert_eq!(bfs_distance(&t, &o, &w), 2);
        let a = t.lambda(2);
        let b = t.vertex_from_coeffs(2, 0, vec![]);
        assert_eq!(t.distance(&a, &b), 4);
        assert_eq!(bfs_distance(&t, &a, &b), 4);
        let (vs, _) = t.ball(&o, 3).unwrap();
        for v in vs.iter().step_by(3) {
            for w in vs.iter().step_by(5) {
                assert_eq!(t.distance(v, w), bfs_distance(&t, v, w));
                assert_eq!(t.path(v, w).len() as u64, t.distance(v, w) + 1);
            }
        }
    }

    #[test]
    fn ball_counts() {
        let t = tree(2, 1);
        let o = t.standard_vertex();
        let (v, e) = t.ball(&o, 1).unwrap();
        assert_eq!((v.len(), e.len()), (4, 6));
        assert_eq!(t.ball(&o, 3).unwrap().0.len(), 22);
        let (v, e) = t.ball(&o, 0).unwrap();
        assert_eq!((v.len(), e.len()), (1, 0));
        assert!(t.ball(&o, 9).is_err());
        let t3 = tree(3, 1);
        assert_eq!(t3.ball(&o, 2).unwrap().0.len(), 1 + 4 * 4);
    }

    #[test]
    fn action_axioms() {
        let t = tree(3, 1);
        let s = &t.series;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let o = t.standard_vertex();
        for _ in 0..100 {
            let g = t.random_gl2(&mut rng, 2, 3);
            let h = t.random_gl2(&mut rng, 2, 3);
            let v = t.random_vertex(&mut rng, &o, 4);
            let w = t.random_vertex(&mut rng, &o, 4);
            let gh = mat2::mul(s, &g, &h);
            let lhs = t.act_vertex(&gh, &v).unwrap();
            let rhs = t.act_vertex(&g, &t.act_vertex(&h, &v).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let gv = t.act_vertex(&g, &v).unwrap();
            let gw = t.act_vertex(&g, &w).unwrap();
            assert_eq!(t.distance(&gv, &gw), t.distance(&v, &w));
            assert_eq!(t.act_vertex(&mat2::identity(s), &v).unwrap(), v);
            let z = scalar(&t, &s.pi());
            assert_eq!(t.act_vertex(&z, &v).unwrap(), v);
        }
    }

    #[test]
    fn ends_and_u_sets() {
        let t = tree(2, 1);
        let o = t.standard_vertex();
        let down = TreeEdge::new(o.clone(), t.lambda(1));
        assert!(t.boundary_in_u(&BoundaryPoint::Infinity, &down).unwrap());
        let z = t.series.with_precision(0, vec![1, 0, 1], 6);
        let up = TreeEdge::new(o.clone(), t.vertex(1, &z).unwrap());
        assert!(t.boundary_in_u(&BoundaryPoint::Finite(z.clone()), &up).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (vs, _) = t.ball(&o, 3).unwrap();
        for v in &vs {
            for _ in 0..50 {
                let b = if rng.gen_bool(0.1) {
                    BoundaryPoint::Infinity
                } else {
                    t.random_end(&mut rng, -4, 12)
                };
                let hits = t
                    .edges_from(v)
                    .iter()
                    .filter(|e| t.boundary_in_u(&b, e).unwrap())
                    .count();
                assert_eq!(hits, 1);
                for e in t.edges_from(v) {
                    let a = t.boundary_in_u(&b, &e).unwrap();
                    assert_ne!(a, t.boundary_in_u(&b, &e.reverse()).unwrap());
                    let refined = t
                        .onward_edges(&e)
                        .iter()
                        .filter(|f| t.boundary_in_u(&b, f).unwrap())
                        .count();
                    assert_eq!(refined, a as usize);
                }
            }
        }
    }

    #[test]
    fn u_membership_needs_precision() {
        let t = tree(2, 1);
        let z = BoundaryPoint::Finite(t.series.with_precision(0, vec![1], 1));
        let e = TreeEdge::new(t.vertex_from_coeffs(3, 0, vec![1]), t.vertex_from_coeffs(4, 0, vec![1]));
        assert!(matches!(t.boundary_in_u(&z, &e), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn moebius_action_transports_u_sets() {
        let t = tree(2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let o = t.standard_vertex();
        for _ in 0..100 {
            let g = t.random_gl2(&mut rng, 1, 2);
            let v = t.random_vertex(&mut rng, &o, 3);
            let e = t.edges_from(&v)[rng.gen_range(0..3)].clone();
            let ge = t.act_edge(&g, &e).unwrap();
            let b = t.random_end(&mut rng, -6, 30);
            let gb = t.act_boundary(&g, &b).unwrap();
            assert_eq!(t.boundary_in_u(&b, &e).unwrap(), t.boundary_in_u(&gb, &ge).unwrap());
        }
    }

    #[test]
    fn covering_index_roundtrip() {
        let t = tree(3, 1);
        let (_, es) = t.ball(&t.standard_vertex(), 2).unwrap();
        for e in es {
            let (n, z) = t.covering_index(&e);
            assert_eq!(t.edge_from_covering_index(n, &z).unwrap(), e.canonical().0);
        }
    }

    #[test]
    fn dot_output() {
        let t = tree(2, 1);
        let (v, e) = t.ball(&t.standard_vertex(), 1).unwrap();
        let dot = t.to_dot("ball", &v, &e);
        assert_eq!(dot.matches("--").count(), 3);
        assert_eq!(dot.matches("label").count(), 4);
        assert!(dot.contains("\"v:0:0\""));
    }
}
