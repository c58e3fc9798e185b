//! Batch front end: every command prints TSV, JSON or DOT to stdout and is
//! deterministic for a fixed configuration and seed.
//!
//! Exit codes: 0 success, 2 precision or bound failure, 3 finding (a JSON
//! finding report is printed), 64 usage error, 1 anything else.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use cocycle_forge::algebra::mat2::{self, Mat2};
use cocycle_forge::algebra::{FracRing, GaloisRing, Integers, PolyRing, Ring};
use cocycle_forge::cocycles::{invariant_space, InvariantSpace, SpaceOptions, Variant};
use cocycle_forge::correspondence::{
    self, hom_to_cocycle, lift_hom, tensor_hom, AutomorphicEvaluator, GlobalCocycle, TargetModule,
};
use cocycle_forge::quotient::{quotient_graph, ArithmeticGroup, QuotientGraph, QuotientOptions, SCHEMA};
use cocycle_forge::representations::{self, HomPoly};
use cocycle_forge::special_rep::{pairing, refinement_invariant, StepFunction};
use cocycle_forge::tree::Tree;
use cocycle_forge::Error;

#[derive(Parser)]
#[command(name = "cocycle-forge", version, about = "Trees, quotients and harmonic cocycles over F_q(t)")]
struct Cli {
    /// key=value lines supplying defaults for flags; explicit flags win.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    /// Bruhat-Tits tree of PGL_2(K_∞)
    Tree(TreeCmd),
    #[command(subcommand)]
    /// Symmetric-power representations
    Rep(RepCmd),
    #[command(subcommand)]
    /// Quotient graph of the tree by an arithmetic group
    Quotient(QuotientCmd),
    #[command(subcommand)]
    /// Invariant harmonic cocycles
    Cocycles(CocyclesCmd),
    #[command(subcommand)]
    /// Pairing of cocycles with step functions
    Pairing(PairingCmd),
    #[command(subcommand)]
    /// Cocycles against automorphic data
    Corr(CorrCmd),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Tsv,
    Json,
    Dot,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Size of the constant field F_q.
    #[arg(long, default_value_t = 2)]
    q: u64,
}

#[derive(Args, Clone)]
struct GroupArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// full | gamma0:<poly> | gamma1:<poly> | gamma:<poly>
    #[arg(long, default_value = "full")]
    gamma: String,
    #[arg(long, default_value_t = 5)]
    depth: usize,
    #[arg(long)]
    degree_bound: Option<usize>,
}

#[derive(Subcommand)]
enum TreeCmd {
    /// The ball around the standard vertex.
    Ball {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Acts on a ball by a matrix with entries in F_q[t], or a seeded random one.
    Act {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// "[[a,b],[c,d]]" with polynomial entries such as 1+t^2.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Series precision N.
        #[arg(long, default_value_t = 24)]
        precision: usize,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// Membership in the set of degrees whose binomials all survive mod p.
    Dee {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        max_n: u64,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// α(n), the largest such degree not exceeding n.
    Alpha {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        max_n: u64,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Dimension of the closure of X^α Y^(n−α) (or of X^n with --from-top).
    Cyclicity {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: usize,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long)]
        from_top: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Sampled check that span{X^(pj) Y^(n−pj)} is stable when p | n.
    Probe {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum QuotientCmd {
    /// Orbit representatives, edges and cusps up to a depth
    Build {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Args, Clone)]
struct SpaceArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 2)]
    weight: usize,
    /// fq (or f2, f3, ...), z, or k for F_q(t).
    #[arg(long, default_value = "fq")]
    ring: String,
    /// H | H_! | H_!!
    #[arg(long, default_value = "H")]
    variant: String,
    #[arg(long, default_value_t = 0)]
    extra_levels: usize,
}

#[derive(Subcommand)]
enum CocyclesCmd {
    /// Dimension or rank of the invariant space
    Dim {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// An explicit basis of the invariant space
    Basis {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum PairingCmd {
    /// Pairs a weight-2 basis cocycle with seeded random step functions,
    /// before and after refining one edge.
    Demo {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum CorrCmd {
    /// Cocycle → evaluator → cocycle on every weight-2 basis element.
    Roundtrip {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lifts the basis homs v ↦ v ⊗ e_i to GR(p^k)[t] and reduces back.
    Lift {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 3)]
        weight: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Weight-2 invariant space over Z against F_p.
    Weight2 {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "H")]
        variant: String,
    },
}

enum Failure {
    Usage(String),
    Bound(String),
    Finding(Value),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PrecisionExhausted(_)
            | Error::DegreeBoundTooSmall { .. }
            | Error::DepthTooSmall(_)
            | Error::TooLarge(_)
            | Error::OutOfExploredRegion(_) => Failure::Bound(e.to_string()),
            Error::InvarianceViolation(_) => Failure::Finding(json!({
                "schema": SCHEMA,
                "kind": "finding",
                "error": e.to_string(),
            })),
            Error::InvalidInput(_) | Error::RingMismatch(_) | Error::NotApplicable(_) | Error::IncompatibleWeight { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Other(e.to_string()),
        }
    }
}

type Out = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn field_of(q: u64) -> Result<GaloisRing, Failure> {
    let p = (2..=q).find(|d| q % d == 0).ok_or_else(|| usage("q must be at least 2"))?;
    let mut f = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    if r != 1 {
        return Err(usage(format!("q = {q} is not a prime power")));
    }
    Ok(GaloisRing::field(p, f)?)
}

fn build_quotient(g: &GroupArgs) -> Result<QuotientGraph, Failure> {
    if g.field.q > 4 {
        return Err(usage("quotient commands need q ≤ 4"));
    }
    if g.depth > 8 {
        return Err(usage("depth must be at most 8"));
    }
    let field = field_of(g.field.q)?;
    let tree = Tree::new(field);
    let group = ArithmeticGroup::parse(field, &g.gamma)?;
    let opts = QuotientOptions {
        degree_bound: g.degree_bound,
        ..QuotientOptions::default()
    };
    Ok(quotient_graph(&tree, &group, g.depth, &opts)?)
}

fn tsv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    out
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn table(format: Format, header: &[&str], rows: Vec<Vec<String>>, kind: &str) -> Out {
    match format {
        Format::Tsv => Ok(tsv(header, &rows)),
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut m = serde_json::Map::new();
                    for (h, c) in header.iter().zip(r) {
                        let v = c.parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::from(c.clone()));
                        m.insert((*h).into(), v);
                    }
                    Value::Object(m)
                })
                .collect();
            Ok(to_json(&json!({"schema": SCHEMA, "kind": kind, "rows": items})))
        }
        Format::Dot => Err(usage("DOT output is only available for trees and quotients")),
    }
}

fn parse_polymat(pr: &PolyRing, s: &str) -> Result<mat2::PolyMat, Failure> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace() && *c != '[' && *c != ']').collect();
    let parts: Vec<&str> = cleaned.split(',').collect();
    if parts.len() != 4 {
        return Err(usage(format!("expected [[a,b],[c,d]], got '{s}'")));
    }
    let e = |i: usize| pr.parse(parts[i]);
    Ok(Mat2::new(e(0)?, e(1)?, e(2)?, e(3)?))
}

fn tree_cmd(cmd: &TreeCmd) -> Out {
    match cmd {
        TreeCmd::Ball { field, radius, format } => {
            let tree = Tree::new(field_of(field.q)?);
            let (vs, es) = tree.ball(&tree.standard_vertex(), *radius)?;
            match format {
                Format::Dot => Ok(tree.to_dot("ball", &vs, &es)),
                _ => {
                    let rows = vs
                        .iter()
                        .map(|v| {
                            vec![
                                v.id(),
                                v.n.to_string(),
                                tree.distance(&tree.standard_vertex(), v).to_string(),
                                tree.neighbors(v).len().to_string(),
                            ]
                        })
                        .collect();
                    table(*format, &["vertex", "level", "distance", "degree"], rows, "tree_ball")
                }
            }
        }
        TreeCmd::Act { field, radius, matrix, seed, precision, format } => {
            if *precision < 8 {
                return Err(usage("precision must be at least 8"));
            }
            let f = field_of(field.q)?;
            let tree = Tree::with_precision(f, *precision);
            let g = match matrix {
                Some(s) => {
                    let pr = PolyRing::new(f);
                    let m = parse_polymat(&pr, s)?;
                    if pr.is_zero(&mat2::det(&pr, &m)) {
                        return Err(usage("matrix is singular"));
                    }
                    mat2::polymat_to_series(&tree.series, &m)
                }
                None => tree.random_gl2(&mut ChaCha8Rng::seed_from_u64(*seed), 2, 8),
            };
            let (vs, es) = tree.ball(&tree.standard_vertex(), *radius)?;
            if *format == Format::Dot {
                let img_v = vs.iter().map(|v| tree.act_vertex(&g, v)).collect::<Result<Vec<_>, _>>()?;
                let img_e = es.iter().map(|e| tree.act_edge(&g, e)).collect::<Result<Vec<_>, _>>()?;
                return Ok(tree.to_dot("image", &img_v, &img_e));
            }
            let mut rows = Vec::new();
            for v in &vs {
                let w = tree.act_vertex(&g, v)?;
                rows.push(vec![v.id(), w.id()]);
            }
            table(*format, &["vertex", "image"], rows, "tree_act")
        }
    }
}

fn rep_cmd(cmd: &RepCmd) -> Out {
    match cmd {
        RepCmd::Dee { p, max_n, format } => {
            check_prime(*p)?;
            let rows = (0..=*max_n)
                .map(|n| vec![n.to_string(), p.to_string(), u8::from(representations::dee_contains(n, *p)).to_string()])
                .collect();
            table(*format, &["n", "p", "in_D"], rows, "dee")
        }
        RepCmd::Alpha { p, max_n, format } => {
            check_prime(*p)?;
            let rows = (0..=*max_n)
                .map(|n| vec![n.to_string(), p.to_string(), representations::alpha(n, *p).to_string()])
                .collect();
            table(*format, &["n", "p", "alpha"], rows, "alpha")
        }
        RepCmd::Cyclicity { p, f, max_n, from_top, format } => {
            let field = GaloisRing::field(*p, *f)?;
            let k = FracRing::new(field);
            let mut rows = Vec::new();
            for n in 0..=*max_n {
                let c = if *from_top {
                    let start = HomPoly::monomial(&k, n, n).coeffs;
                    representations::closure_from(&field, n, &representations::default_samples(&field), start)?
                } else {
                    representations::cyclicity_closure(&field, n, None, None)?
                };
                rows.push(vec![
                    n.to_string(),
                    p.to_string(),
                    u8::from(representations::dee_contains(n as u64, *p)).to_string(),
                    c.alpha.to_string(),
                    c.dimension.to_string(),
                ]);
            }
            table(*format, &["n", "p", "in_D", "alpha", "closure_dim"], rows, "cyclicity")
        }
        RepCmd::Probe { p, n, samples, seed, format } => {
            let (stable, dim) = representations::subrep_probe(*p, *n, *samples, *seed)?;
            table(
                *format,
                &["p", "n", "samples", "stable", "dimension"],
                vec![vec![p.to_string(), n.to_string(), samples.to_string(), u8::from(stable).to_string(), dim.to_string()]],
                "probe",
            )
        }
    }
}

fn check_prime(p: u64) -> Result<(), Failure> {
    if p < 2 || (2..p).any(|d| p % d == 0) {
        return Err(usage(format!("{p} is not prime")));
    }
    Ok(())
}

fn quotient_cmd(cmd: &QuotientCmd) -> Out {
    let QuotientCmd::Build { group, format } = cmd;
    let qg = build_quotient(group)?;
    match format {
        Format::Json => Ok(to_json(&qg.to_json())),
        Format::Dot => Ok(qg.to_dot()),
        Format::Tsv => {
            let rows = qg
                .explored_vertices()
                .map(|v| {
                    vec![
                        v.id.to_string(),
                        v.rep.id(),
                        v.m.to_string(),
                        v.stabilizer.len().to_string(),
                        u8::from(qg.is_finite_vertex(v.id)).to_string(),
                    ]
                })
                .collect();
            table(Format::Tsv, &["orbit", "rep", "m", "stabilizer_order", "finite"], rows, "quotient")
        }
    }
}

fn space_options(s: &SpaceArgs) -> Result<SpaceOptions, Failure> {
    Ok(SpaceOptions {
        variant: Variant::parse(&s.variant)?,
        extra_levels: s.extra_levels,
    })
}

enum AnySpace {
    Field(InvariantSpace<GaloisRing>),
    Z(InvariantSpace<Integers>),
    K(InvariantSpace<FracRing>),
}

impl AnySpace {
    fn json(&self) -> Value {
        match self {
            AnySpace::Field(s) => s.to_json(),
            AnySpace::Z(s) => s.to_json(),
            AnySpace::K(s) => s.to_json(),
        }
    }
}

fn compute_space(s: &SpaceArgs) -> Result<AnySpace, Failure> {
    if s.weight < 2 {
        return Err(usage("weight must be at least 2"));
    }
    let qg = build_quotient(&s.group)?;
    let opts = space_options(s)?;
    let field = qg.tree.field;
    let ring = s.ring.to_ascii_lowercase();
    Ok(match ring.as_str() {
        "z" => AnySpace::Z(invariant_space(&qg, s.weight, &Integers, &opts)?),
        "k" => AnySpace::K(invariant_space(&qg, s.weight, &FracRing::new(field), &opts)?),
        _ => {
            let q = ring.strip_prefix('f').ok_or_else(|| usage(format!("unknown ring '{}'", s.ring)))?;
            if q != "q" && q.parse::<u64>().ok() != Some(field.q()) {
                return Err(usage(format!("ring {} does not match q = {}", s.ring, field.q())));
            }
            AnySpace::Field(invariant_space(&qg, s.weight, &field, &opts)?)
        }
    })
}

fn cocycles_cmd(cmd: &CocyclesCmd) -> Out {
    match cmd {
        CocyclesCmd::Dim { space, format } => {
            let sp = compute_space(space)?;
            let j = sp.json();
            let factors = j
                .get("invariant_factors")
                .map(|f| f.as_array().map(|a| a.iter().filter_map(|x| x.as_str()).collect::<Vec<_>>().join(",")).unwrap_or_default())
                .unwrap_or_else(|| "-".into());
            let row = vec![
                space.group.field.q.to_string(),
                space.group.gamma.clone(),
                space.weight.to_string(),
                j["ring"].as_str().unwrap_or_default().to_string(),
                j["variant"].as_str().unwrap_or_default().to_string(),
                j["dimension"].to_string(),
                factors,
            ];
            table(*format, &["q", "gamma", "weight", "ring", "variant", "dimension", "invariant_factors"], vec![row], "dimension")
        }
        CocyclesCmd::Basis { space, format } => {
            let sp = compute_space(space)?;
            let j = sp.json();
            match format {
                Format::Json => Ok(to_json(&j)),
                Format::Tsv => {
                    let mut rows = Vec::new();
                    for (i, b) in j["basis"].as_array().into_iter().flatten().enumerate() {
                        for entry in b.as_array().into_iter().flatten() {
                            let coords: Vec<String> = entry["dual_coords"]
                                .as_array()
                                .into_iter()
                                .flatten()
                                .map(|c| c.as_str().unwrap_or_default().to_string())
                                .collect();
                            rows.push(vec![i.to_string(), entry["orbit_id"].to_string(), coords.join(";")]);
                        }
                    }
                    table(Format::Tsv, &["basis", "orbit", "dual_coords"], rows, "basis")
                }
                Format::Dot => Err(usage("DOT output is only available for trees and quotients")),
            }
        }
    }
}

fn pairing_cmd(cmd: &PairingCmd) -> Out {
    let PairingCmd::Demo { group, samples, seed, format } = cmd;
    let qg = build_quotient(group)?;
    let tree = &qg.tree;
    let field = tree.field;
    let space = invariant_space(&qg, 2, &field, &SpaceOptions::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
    let mut rows = Vec::new();
    for (b, v) in space.basis.iter().enumerate() {
        let f = space.cocycle(&qg, v);
        for i in 0..*samples {
            let mut h = StepFunction::zero(field, 0);
            for _ in 0..3 {
                let w = tree.random_vertex(&mut rng, &tree.standard_vertex(), 3);
                let es = tree.edges_from(&w);
                let e = es[rng.gen_range(0..es.len())].clone();
                let lambda = HomPoly { n: 0, coeffs: vec![rng.gen_range(0..field.q() as u32)] };
                h = h.add(&StepFunction::from_indicator(field, &e, lambda));
            }
            let e = h.terms[0].0.clone();
            let before = pairing(&f, &h)?;
            let after = pairing(&f, &h.refine(tree, &e)?)?;
            let invariant = refinement_invariant(tree, &f, &[e])?;
            rows.push(vec![
                b.to_string(),
                i.to_string(),
                h.terms.len().to_string(),
                before.to_string(),
                after.to_string(),
                u8::from(invariant).to_string(),
            ]);
        }
    }
    table(*format, &["basis", "sample", "terms", "pairing", "refined", "invariant"], rows, "pairing_demo")
}

fn corr_cmd(cmd: &CorrCmd) -> Out {
    match cmd {
        CorrCmd::Roundtrip { group, samples, seed } => {
            let qg = build_quotient(group)?;
            let tree = &qg.tree;
            let field = tree.field;
            let space = invariant_space(&qg, 2, &field, &SpaceOptions::default())?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut exact = 0;
            let mut checks = 0;
            let mut failures = 0;
            let mut skipped = 0;
            for v in &space.basis {
                let g = GlobalCocycle { components: vec![space.cocycle(&qg, v)] };
                let w = AutomorphicEvaluator::new(g.clone());
                if hom_to_cocycle(&w)?.equals(&g) {
                    exact += 1;
                }
                for _ in 0..*samples {
                    let a = tree.random_gl2(&mut rng, 1, 8);
                    let b = tree.random_gl2(&mut rng, 1, 8);
                    let e = correspondence::standard_edge(tree);
                    let h = StepFunction::from_indicator(field, &e, HomPoly { n: 0, coeffs: vec![1] });
                    let lhs = w.evaluate(0, &mat2::mul(&tree.series, &a, &b), &h);
                    let rhs = h.sp_apply(tree, &b).and_then(|hb| w.evaluate(0, &a, &hb));
                    match (lhs, rhs) {
                        (Ok(x), Ok(y)) => {
                            checks += 1;
                            if x != y {
                                failures += 1;
                            }
                        }
                        (Err(Error::OutOfExploredRegion(_)), _) | (_, Err(Error::OutOfExploredRegion(_))) => skipped += 1,
                        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
                    }
                }
            }
            let report = json!({
                "schema": SCHEMA,
                "kind": "corr_roundtrip",
                "gamma": qg.group.name(),
                "q": tree.q(),
                "basis_size": space.dimension(),
                "exact_round_trips": exact,
                "equivariance_checks": checks,
                "equivariance_failures": failures,
                "equivariance_skipped": skipped,
            });
            if exact != space.dimension() || failures > 0 {
                return Err(Failure::Finding(report));
            }
            Ok(to_json(&report))
        }
        CorrCmd::Lift { group, weight, k } => {
            if !(2..=3).contains(k) {
                return Err(usage("k must be 2 or 3"));
            }
            if *weight < 2 {
                return Err(usage("weight must be at least 2"));
            }
            let qg = build_quotient(group)?;
            let field = qg.tree.field;
            let kf = FracRing::new(field);
            let n = weight - 2;
            let space = invariant_space(&qg, *weight, &kf, &SpaceOptions::default())?;
            let d = space.dimension();
            let closure = representations::cyclicity_closure(&field, n, None, None)?;
            let target = TargetModule::copies_of_vn(&closure, d);
            let mut ok = 0;
            for i in 0..d {
                let c: Vec<_> = (0..d).map(|j| if i == j { kf.one() } else { kf.zero() }).collect();
                let hom = tensor_hom(&kf, n, &c);
                if lift_hom(&kf, &hom, &closure, &target, *k)?.residual_ok {
                    ok += 1;
                }
            }
            let report = json!({
                "schema": SCHEMA,
                "kind": "corr_lift",
                "gamma": qg.group.name(),
                "q": qg.tree.q(),
                "weight": weight,
                "k": k,
                "alpha": closure.alpha,
                "closure_dim": closure.dimension,
                "basis_homs": d,
                "reduce_lift_identity": ok,
            });
            if ok != d {
                return Err(Failure::Finding(report));
            }
            Ok(to_json(&report))
        }
        CorrCmd::Weight2 { group, variant } => {
            let qg = build_quotient(group)?;
            let report = correspondence::weight2_integral(&qg, Variant::parse(variant)?)?;
            let mut v = serde_json::to_value(&report).expect("serialisable");
            v["schema"] = json!(SCHEMA);
            v["kind"] = json!("weight2_integral");
            if !report.cusp_reduction_surjective {
                v["note"] = json!("reduction of H_!(Z) does not span H_!!(F_p) under the cusp-vanishing convention");
            }
            if !report.reduction_surjective {
                v["finding"] = json!("reduction mod p is not surjective");
                return Err(Failure::Finding(v));
            }
            Ok(to_json(&v))
        }
    }
}

/// Merges key=value defaults from --config into the argument list.
fn with_config(args: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(pos) = args.iter().position(|a| a == "--config") else {
        return Ok(args);
    };
    let path = args.get(pos + 1).ok_or_else(|| usage("--config needs a path"))?.clone();
    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
    let mut out: Vec<String> = args[..pos].iter().chain(&args[pos + 2..]).cloned().collect();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, v) = line.split_once('=').ok_or_else(|| usage(format!("bad config line '{line}'")))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        if !out.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
            out.push(flag);
            out.push(v.trim().to_string());
        }
    }
    Ok(out)
}

fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Tree(c) => tree_cmd(c),
        Command::Rep(c) => rep_cmd(c),
        Command::Quotient(c) => quotient_cmd(c),
        Command::Cocycles(c) => cocycles_cmd(c),
        Command::Pairing(c) => pairing_cmd(c),
        Command::Corr(c) => corr_cmd(c),
    }
}

fn main() -> ExitCode {
    let result = with_config(std::env::args().collect()).and_then(|args| match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            Ok(String::new())
        }
        Err(e) => Err(Failure::Usage(e.to_string())),
    });
    match result {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("{m}");
            ExitCode::from(64)
        }
        Err(Failure::Bound(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Finding(v)) => {
            let mut s = String::new();
            let _ = write!(s, "{}", to_json(&v));
            print!("{s}");
            eprintln!("finding reported");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
