//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Criteria marked best-effort still print their verdict but do not change
//! the exit status.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wordmap::coherence::{scatter, NormalizedCoords};
use wordmap::context::{ContextMatrix, Direction, SparseVector};
use wordmap::corpus::{tokenize_bytes, TokenizeConfig, Vocabulary};
use wordmap::graph::{knn_graph, NeighborGraph};
use wordmap::linalg::{eigenvalues, symmetric_eigen};
use wordmap::morphology::{
    induce_signatures, load_signatures, transform_corpus, MorphParams, Signature, PSEUDO_SEPARATOR,
};
use wordmap::pipeline::{run_all, PipelineConfig, REPORT_FILE};
use wordmap::spectral::normalized_laplacian;

const SPECTRAL_GRAPHS: usize = 200;
const SPECTRAL_EIG_TOL: f64 = 1e-10;
const SPECTRAL_PARALLEL_TOL: f64 = 1e-8;
const SPECTRAL_TRACE_TOL: f64 = 1e-9;
const SPECTRAL_RESIDUAL_TOL: f64 = 1e-8;
const SPECTRAL_BUDGET: Duration = Duration::from_secs(10);

const ORACLE_TOL: f64 = 1e-7;
/// Oracle roots are bisected to this width.
const ORACLE_ROOT_WIDTH: f64 = 1e-12;

const GRAPH_TRIALS: usize = 1000;
const GRAPH_BUDGET: Duration = Duration::from_secs(5);

const COHERENCE_TRIALS: usize = 1000;
const COHERENCE_TOL: f64 = 1e-12;

const SEP_TOP_K: usize = 1000;
const SEP_NEIGHBORS: usize = 20;
const SEP_COHERENT: [&str; 5] = ["ed", "ly", "'s", "al", "ment"];
const SEP_INCOHERENT: [&str; 2] = ["s", "NULL"];
const SEP_PAIRWISE: [&str; 4] = ["ed", "'s", "al", "ment"];
const SEP_BUDGET: Duration = Duration::from_secs(600);

struct Outcome {
    name: &'static str,
    pass: bool,
    best_effort: bool,
    detail: String,
}

impl Outcome {
    fn new(name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            name,
            pass,
            best_effort: false,
            detail: detail.into(),
        }
    }

    fn best_effort(mut self) -> Self {
        self.best_effort = true;
        self
    }
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus_path() -> PathBuf {
    repo_root().join("data/english-1m.txt")
}

// ---------------------------------------------------------------- spectral

fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    let p: f64 = rng.gen_range(0.0..0.35);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    edges.into_iter().collect()
}

fn laplacian(n: usize, edges: &[(usize, usize)]) -> (wordmap::linalg::SymmetricMatrix, Vec<f64>) {
    let (m, d) = NeighborGraph::unlabeled(n, edges)
        .and_then(|g| g.adjacency_and_degrees())
        .expect("valid graph");
    (normalized_laplacian(&m, &d).expect("connected graph"), d)
}

fn spectral_invariants() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut failures = Vec::new();
    let (mut worst_residual, mut worst_parallel, mut worst_trace) = (0.0f64, 0.0f64, 0.0f64);
    for trial in 0..SPECTRAL_GRAPHS {
        let n = rng.gen_range(3..=60);
        let edges = random_connected(&mut rng, n);
        let (l, d) = laplacian(n, &edges);
        let sys = match symmetric_eigen(&l) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("graph {trial}: {e}"));
                continue;
            }
        };
        if let Some(bad) = sys
            .values
            .iter()
            .find(|&&v| !(-SPECTRAL_EIG_TOL..=2.0 + SPECTRAL_EIG_TOL).contains(&v))
        {
            failures.push(format!("graph {trial}: eigenvalue {bad} outside [0, 2]"));
        }
        if sys.values[0] > SPECTRAL_EIG_TOL {
            failures.push(format!("graph {trial}: smallest eigenvalue {}", sys.values[0]));
        }
        let norm = d.iter().sum::<f64>().sqrt();
        let trivial: Vec<f64> = d.iter().map(|x| x.sqrt() / norm).collect();
        let dist = |sign: f64| {
            sys.vectors[0]
                .iter()
                .zip(&trivial)
                .map(|(a, b)| (a - sign * b).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let parallel = dist(1.0).min(dist(-1.0));
        worst_parallel = worst_parallel.max(parallel);
        if parallel > SPECTRAL_PARALLEL_TOL {
            failures.push(format!("graph {trial}: first eigenvector off D^1/2 1 by {parallel:e}"));
        }
        let trace_err = (sys.values.iter().sum::<f64>() - n as f64).abs();
        worst_trace = worst_trace.max(trace_err);
        if trace_err > SPECTRAL_TRACE_TOL {
            failures.push(format!("graph {trial}: eigenvalue sum off by {trace_err:e}"));
        }
        for i in 0..n {
            let r = sys.residual(&l, i);
            worst_residual = worst_residual.max(r);
            if r > SPECTRAL_RESIDUAL_TOL {
                failures.push(format!("graph {trial}: residual {r:e} for pair {i}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > SPECTRAL_BUDGET {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        "spectral invariants",
        failures.is_empty(),
        format!(
            "{SPECTRAL_GRAPHS} graphs in {elapsed:.2?}; worst residual {worst_residual:.1e}, \
             parallel {worst_parallel:.1e}, trace {worst_trace:.1e}{}",
            first_failure(&failures)
        ),
    )
}

fn first_failure(failures: &[String]) -> String {
    match failures.first() {
        Some(f) => format!("; {} failures, first: {f}", failures.len()),
        None => String::new(),
    }
}

// ------------------------------------------------------------- eigen oracle

/// Polynomial over Q, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
struct Poly(Vec<BigRational>);

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero) - other.0.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let mut rem = self.0.clone();
        let dd = divisor.degree();
        if self.0.len() < divisor.0.len() {
            return (Poly::new(Vec::new()), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.0.len() - dd];
        for k in (0..quot.len()).rev() {
            let coef = &rem[k + dd] / divisor.lead();
            for (j, dc) in divisor.0.iter().enumerate() {
                rem[k + j] -= &coef * dc;
            }
            quot[k] = coef;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    fn monic(&self) -> Poly {
        let lead = self.lead().clone();
        Poly::new(self.0.iter().map(|c| c / &lead).collect())
    }

    fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

/// det(λI − A) by Faddeev–LeVerrier, exact over Q.
fn char_poly(a: &[Vec<BigRational>]) -> Poly {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    if !a[i][l].is_zero() && !m[l][j].is_zero() {
                        s += &a[i][l] * &m[l][j];
                    }
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -tr / rat(k as i64);
    }
    Poly::new(coeffs)
}

/// Square-free factors with multiplicities (Yun).
fn square_free(f: &Poly) -> Vec<(Poly, usize)> {
    let fp = f.derivative();
    let a0 = f.gcd(&fp);
    let mut b = f.div_rem(&a0).0;
    let mut c = fp.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while !b.is_constant() {
        let a = b.gcd(&d);
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        if !a.is_constant() {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        seq.push(Poly::new(r.0.into_iter().map(|c| -c).collect()));
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &BigRational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| p.eval(x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Real roots of a square-free polynomial in `(lo, hi]`, ascending.
fn real_roots(p: &Poly, lo: BigRational, hi: BigRational) -> Vec<f64> {
    let seq = sturm_sequence(p);
    let count = |a: &BigRational, b: &BigRational| sign_changes(&seq, a) - sign_changes(&seq, b);
    let width = BigRational::new(
        BigInt::from((ORACLE_ROOT_WIDTH * 1e15) as i64),
        BigInt::from(1_000_000_000_000_000i64),
    );
    let two = rat(2);
    let mut roots = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        match count(&a, &b) {
            0 => {}
            1 => {
                let (mut a, mut b) = (a, b);
                while &b - &a > width {
                    let mid = (&a + &b) / &two;
                    if count(&a, &mid) == 1 {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                roots.push(to_f64(&((a + b) / &two)));
            }
            _ => {
                let mid = (&a + &b) / &two;
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn to_f64(x: &BigRational) -> f64 {
    // Scale to keep 60 bits of precision through the integer conversion.
    let scaled = (x * BigRational::from_integer(BigInt::from(1u64 << 60))).round();
    let int: i128 = scaled.to_integer().try_into().expect("root within range");
    int as f64 / (1u64 << 60) as f64
}

/// Eigenvalues of the normalized laplacian from the exact characteristic
/// polynomial of the similar matrix `I − D⁻¹M`.
fn oracle_spectrum(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut deg = vec![0i64; n];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    let mut a = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    for &(u, v) in edges {
        a[u][v] = -BigRational::new(BigInt::one(), BigInt::from(deg[u]));
        a[v][u] = -BigRational::new(BigInt::one(), BigInt::from(deg[v]));
    }
    let p = char_poly(&a);
    let mut out = Vec::new();
    for (factor, mult) in square_free(&p) {
        for r in real_roots(&factor, BigRational::new(BigInt::from(-1), BigInt::from(3)), rat(3)) {
            out.extend(std::iter::repeat_n(r, mult));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

const PAIRS6: usize = 15;

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            v.push((a, b));
        }
    }
    v
}

fn mask_edges(pairs: &[(usize, usize)], mask: u32) -> Vec<(usize, usize)> {
    pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p)
        .collect()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut reach = 1u32;
    loop {
        let before = reach;
        for &(a, b) in edges {
            if reach >> a & 1 == 1 || reach >> b & 1 == 1 {
                reach |= 1 << a | 1 << b;
            }
        }
        if reach == before {
            return reach == (1 << n) - 1;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Connected graphs to check: every labeled graph on 2..=5 vertices and one
/// representative per isomorphism class on 6 vertices.
type Graph = (usize, Vec<(usize, usize)>);

fn oracle_graphs() -> (Vec<Graph>, [usize; 5]) {
    let mut graphs = Vec::new();
    let mut counts = [0usize; 5];
    for n in 2..=5 {
        let pairs = pair_index(n);
        for mask in 0..1u32 << pairs.len() {
            let edges = mask_edges(&pairs, mask);
            if connected(n, &edges) {
                counts[n - 2] += 1;
                graphs.push((n, edges));
            }
        }
    }
    let pairs = pair_index(6);
    let mut pos = [[0usize; 6]; 6];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        pos[a][b] = i;
        pos[b][a] = i;
    }
    let perms = permutations(6);
    let mut seen = HashSet::new();
    for mask in 0..1u32 << PAIRS6 {
        let edges = mask_edges(&pairs, mask);
        if !connected(6, &edges) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| edges.iter().fold(0u32, |m, &(a, b)| m | 1 << pos[p[a]][p[b]]))
            .min()
            .expect("nonempty");
        if seen.insert(canon) {
            counts[4] += 1;
            graphs.push((6, edges));
        }
    }
    (graphs, counts)
}

fn eigen_oracle() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let close = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= ORACLE_TOL);

    type HandCase<'a> = (&'a str, usize, &'a [(usize, usize)], &'a [f64]);
    let hand: [HandCase; 3] = [
        ("P2", 2, &[(0, 1)], &[0.0, 2.0]),
        ("P3", 3, &[(0, 1), (1, 2)], &[0.0, 1.0, 2.0]),
        ("K3", 3, &[(0, 1), (1, 2), (0, 2)], &[0.0, 1.5, 1.5]),
    ];
    for (name, n, edges, want) in hand {
        let oracle = oracle_spectrum(n, edges);
        let solver = eigenvalues(&laplacian(n, edges).0).expect("solver");
        if !close(&oracle, want) || !close(&solver, want) {
            failures.push(format!("{name}: oracle {oracle:?}, solver {solver:?}"));
        }
    }

    let (graphs, counts) = oracle_graphs();
    // Connected labeled graphs on 2..=5 vertices, then unlabeled on 6.
    if counts != [1, 4, 38, 728, 112] {
        failures.push(format!("enumeration counts {counts:?}"));
    }
    let mut worst = 0.0f64;
    for (n, edges) in &graphs {
        let oracle = oracle_spectrum(*n, edges);
        let solver = match eigenvalues(&laplacian(*n, edges).0) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{edges:?}: {e}"));
                continue;
            }
        };
        if oracle.len() != *n {
            failures.push(format!("{edges:?}: oracle found {} roots", oracle.len()));
            continue;
        }
        let err = oracle.iter().zip(&solver).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
        if err > ORACLE_TOL {
            failures.push(format!("{edges:?}: oracle {oracle:?} vs solver {solver:?}"));
        }
    }
    Outcome::new(
        "eigen oracle",
        failures.is_empty(),
        format!(
            "{} graphs (+3 hand cases) in {:.2?}; worst deviation {worst:.1e}{}",
            graphs.len(),
            start.elapsed(),
            first_failure(&failures)
        ),
    )
}

// ------------------------------------------------------------------- graph

fn random_context(rng: &mut ChaCha8Rng, k: usize) -> ContextMatrix {
    let dim = rng.gen_range(2..=12);
    let density: f64 = rng.gen_range(0.1..0.8);
    let zero_rate: f64 = rng.gen_range(0.0..0.2);
    let rows = (0..k)
        .map(|_| {
            let dense: Vec<u64> = if rng.gen_bool(zero_rate) {
                vec![0; dim]
            } else {
                (0..dim)
                    .map(|_| if rng.gen_bool(density) { rng.gen_range(1..4) } else { 0 })
                    .collect()
            };
            SparseVector::from_dense(&dense)
        })
        .collect();
    ContextMatrix {
        direction: Direction::Left,
        word_ids: (0..k).collect(),
        words: (0..k).map(|i| format!("w{i}")).collect(),
        rows,
    }
}

fn graph_properties() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut failures = Vec::new();
    for trial in 0..GRAPH_TRIALS {
        let k = rng.gen_range(3..=40);
        let ctx = random_context(&mut rng, k);
        let n = rng.gen_range(1..k);
        let g = knn_graph(&ctx, n).expect("valid N");

        for v in 0..g.len() {
            if g.neighbors(v).iter().any(|&u| !g.has_edge(u, v)) {
                failures.push(format!("trial {trial}: asymmetric adjacency at {v}"));
            }
            let row = &ctx.rows[g.word_ids[v]];
            if !row.is_zero() && g.degree(v) < n.min(k - 1) {
                failures.push(format!("trial {trial}: vertex {v} has degree {} < {n}", g.degree(v)));
            }
        }
        for w in &g.removed {
            let id = ctx.words.iter().position(|x| x == w).expect("removed word exists");
            if !ctx.rows[id].is_zero() {
                failures.push(format!("trial {trial}: removed nonzero row {w}"));
            }
        }

        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng);
        let shuffled = ContextMatrix {
            direction: ctx.direction,
            word_ids: perm.iter().map(|&i| ctx.word_ids[i]).collect(),
            words: perm.iter().map(|&i| ctx.words[i].clone()).collect(),
            rows: perm.iter().map(|&i| ctx.rows[i].clone()).collect(),
        };
        let g2 = knn_graph(&shuffled, n).expect("valid N");
        if g2.word_edges() != g.word_edges() {
            failures.push(format!("trial {trial}: edge set depends on row order"));
        }
        let mut removed2 = g2.removed.clone();
        removed2.sort();
        let mut removed = g.removed.clone();
        removed.sort();
        if removed != removed2 {
            failures.push(format!("trial {trial}: removed set depends on row order"));
        }

        if n + 1 < k {
            let bigger: HashSet<(usize, usize)> = knn_graph(&ctx, n + 1).expect("valid N").word_edges().into_iter().collect();
            if g.word_edges().iter().any(|e| !bigger.contains(e)) {
                failures.push(format!("trial {trial}: edges lost going from N={n} to N={}", n + 1));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > GRAPH_BUDGET {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        "graph construction properties",
        failures.is_empty(),
        format!("{GRAPH_TRIALS} trials in {elapsed:.2?}{}", first_failure(&failures)),
    )
}

// --------------------------------------------------------------- coherence

fn coherence_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut failures = Vec::new();

    if scatter(&[(0.3, 0.7)]) != 0.0 {
        failures.push("single point scatter is not 0".to_string());
    }
    let two = scatter(&[(0.0, 0.0), (1.0, 1.0)]);
    if (two - std::f64::consts::FRAC_1_SQRT_2).abs() > COHERENCE_TOL {
        failures.push(format!("two-point scatter {two}"));
    }

    for trial in 0..COHERENCE_TRIALS {
        let len = rng.gen_range(2..50);
        let xs: Vec<f64> = (0..len).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let ys: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let labels: Vec<String> = (0..len).map(|i| format!("u{i}")).collect();
        let base = NormalizedCoords::from_points(labels.clone(), &xs, &ys).expect("finite");

        let pick: Vec<(f64, f64)> = base
            .points()
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let s = scatter(&pick);
        if !(0.0..=std::f64::consts::SQRT_2).contains(&s) {
            failures.push(format!("trial {trial}: scatter {s} outside [0, sqrt 2]"));
        }

        let (ax, bx) = (rng.gen_range(0.01..100.0), rng.gen_range(-50.0..50.0));
        let (ay, by) = (rng.gen_range(0.01..100.0), rng.gen_range(-50.0..50.0));
        let xs2: Vec<f64> = xs.iter().map(|x| ax * x + bx).collect();
        let ys2: Vec<f64> = ys.iter().map(|y| ay * y + by).collect();
        let moved = NormalizedCoords::from_points(labels, &xs2, &ys2).expect("finite");
        let err = base
            .points()
            .iter()
            .zip(moved.points())
            .map(|(p, q)| (p.0 - q.0).abs().max((p.1 - q.1).abs()))
            .fold(0.0, f64::max);
        if err > COHERENCE_TOL {
            failures.push(format!("trial {trial}: affine change moved a point by {err:e}"));
        }
    }
    Outcome::new(
        "coherence metric properties",
        failures.is_empty(),
        format!("{COHERENCE_TRIALS} trials{}", first_failure(&failures)),
    )
}

// -------------------------------------------------------------- morphology

fn morphology_properties() -> Outcome {
    let mut failures = Vec::new();

    let fixture = Vocabulary::from_entries(
        ["jump", "jumped", "jumping", "walk", "walked", "walking"]
            .iter()
            .map(|w| (w.to_string(), 1))
            .collect(),
    )
    .expect("fixture vocabulary");
    let a = induce_signatures(&fixture, &MorphParams::default());
    let want = Signature::parse("NULL.ed.ing").expect("valid name");
    if a.signatures() != [want.clone()] || a.stems_of(&want) != ["jump", "walk"] {
        failures.push(format!("fixture gave {:?}", a.signatures()));
    }

    let bytes = match fs::read(corpus_path()) {
        Ok(b) => b,
        Err(e) => return Outcome::new("morphology properties", false, format!("corpus: {e}")),
    };
    let tokens = tokenize_bytes(&bytes, &TokenizeConfig::default()).expect("utf-8 corpus");
    let vocab = Vocabulary::build(&tokens);
    let analysis = induce_signatures(&vocab, &MorphParams::default());

    for w in analysis.words() {
        let (stem, suffix, _) = analysis.split(w).expect("analyzed");
        if format!("{stem}{suffix}") != w {
            failures.push(format!("{stem} + {suffix} != {w}"));
        }
    }
    for sig in analysis.signatures() {
        if sig.suffixes().len() < 2 || analysis.stems_of(sig).len() < 2 {
            failures.push(format!("signature {sig} is not robust"));
        }
    }
    let mut buf = Vec::new();
    analysis.write_tsv(&mut buf).expect("write to memory");
    match load_signatures(&buf[..]) {
        Ok(back) if back == analysis => {}
        Ok(_) => failures.push("signature file does not reproduce the analysis".into()),
        Err(e) => failures.push(format!("signature file rejected: {e}")),
    }

    let once = transform_corpus(&tokens, &analysis, &vocab, 1000);
    let twice = transform_corpus(&once, &analysis, &vocab, 1000);
    if once != twice {
        failures.push("transform is not idempotent".into());
    }
    let pseudo = once
        .iter()
        .filter(|t| t.as_word().is_some_and(|w| w.contains(PSEUDO_SEPARATOR)))
        .count();
    Outcome::new(
        "morphology properties",
        failures.is_empty(),
        format!(
            "{} signatures, {} analyzed words, {pseudo} pseudo-word tokens{}",
            analysis.signatures().len(),
            analysis.word_count(),
            first_failure(&failures)
        ),
    )
}

// -------------------------------------------------- end-to-end on the corpus

fn pipeline_config(out_dir: &Path) -> PipelineConfig {
    let mut suffixes: Vec<String> = SEP_COHERENT.iter().map(|s| s.to_string()).collect();
    suffixes.extend(SEP_INCOHERENT.iter().map(|s| s.to_string()));
    PipelineConfig {
        corpus: Some(corpus_path()),
        out_dir: out_dir.to_path_buf(),
        top_k: SEP_TOP_K,
        neighbors: SEP_NEIGHBORS,
        suffixes,
        ..Default::default()
    }
}

struct Run {
    dir: tempfile::TempDir,
    elapsed: Duration,
    result: wordmap::Result<wordmap::pipeline::PipelineSummary>,
}

fn run_pipeline() -> Run {
    let dir = tempfile::tempdir().expect("temp dir");
    let start = Instant::now();
    let result = run_all(&pipeline_config(dir.path()));
    Run {
        elapsed: start.elapsed(),
        dir,
        result,
    }
}

fn suffix_separation(run: &Run) -> Outcome {
    let name = "suffix scatter separation";
    let summary = match &run.result {
        Ok(s) => s,
        Err(e) => return Outcome::new(name, false, format!("pipeline failed: {e}")).best_effort(),
    };
    let Some(report) = &summary.report else {
        return Outcome::new(name, false, "no report").best_effort();
    };
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for (side, pick) in [("left", 0usize), ("right", 1usize)] {
        let value = |suffix: &str| {
            report.get(suffix).and_then(|r| match pick {
                0 => r.left.map(|s| s.value),
                _ => r.right.map(|s| s.value),
            })
        };
        let mean = |set: &[&str]| -> Option<f64> {
            let vals: Option<Vec<f64>> = set.iter().map(|s| value(s)).collect();
            vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
        };
        match (mean(&SEP_COHERENT), mean(&SEP_INCOHERENT)) {
            (Some(c), Some(i)) => {
                lines.push(format!("{side}: coherent mean {c:.4} vs incoherent mean {i:.4}"));
                if c >= i {
                    failures.push(format!("{side}: coherent mean {c:.4} not below {i:.4}"));
                }
            }
            _ => failures.push(format!("{side}: a suffix is absent from the map")),
        }
        for good in SEP_PAIRWISE {
            for bad in SEP_INCOHERENT {
                if let (Some(g), Some(b)) = (value(good), value(bad)) {
                    if g >= b {
                        failures.push(format!("{side}: {good} {g:.4} >= {bad} {b:.4}"));
                    }
                }
            }
        }
    }
    if run.elapsed > SEP_BUDGET {
        failures.push(format!("took {:?}", run.elapsed));
    }
    let detail = format!(
        "end-to-end {:.1?}; {}{}",
        run.elapsed,
        lines.join("; "),
        if failures.is_empty() {
            String::new()
        } else {
            format!("; violations: {}", failures.join(", "))
        }
    );
    Outcome::new(name, failures.is_empty(), detail).best_effort()
}

fn corner_clusters(run: &Run) -> Outcome {
    let name = "corner clusters (manual review)";
    let doc = repo_root().join("docs/corner-clusters.md");
    let svg = repo_root().join("docs/plain-left.svg");
    let emb = run.dir.path().join("plain-left.embedding.tsv");
    let corners = fs::read_to_string(&emb)
        .ok()
        .and_then(|text| wordmap::spectral::SpectralEmbedding::read_tsv(text.as_bytes()).ok())
        .map(|e| {
            let mut by_x: Vec<(f64, &str)> = e.coords.iter().zip(&e.labels).map(|(c, l)| (c[1], l.as_str())).collect();
            by_x.sort_by(|a, b| a.0.total_cmp(&b.0));
            let lo: Vec<&str> = by_x.iter().take(5).map(|p| p.1).collect();
            let hi: Vec<&str> = by_x.iter().rev().take(5).map(|p| p.1).collect();
            format!("low L1: {}; high L1: {}", lo.join(" "), hi.join(" "))
        })
        .unwrap_or_else(|| "no embedding".into());
    let documented = doc.exists() && svg.exists();
    Outcome::new(
        name,
        documented,
        format!("write-up {} ({corners})", if documented { "present" } else { "missing" }),
    )
    .best_effort()
}

fn determinism(a: &Run, b: &Run) -> Outcome {
    let name = "determinism";
    if let (Err(e), _) | (_, Err(e)) = (&a.result, &b.result) {
        return Outcome::new(name, false, format!("pipeline failed: {e}"));
    }
    let mut compared = 0;
    let mut failures = Vec::new();
    let mut files: Vec<PathBuf> = fs::read_dir(a.dir.path())
        .expect("output dir")
        .map(|e| e.expect("entry").path())
        .collect();
    files.sort();
    for path in files {
        let file = path.file_name().expect("file name");
        let other = b.dir.path().join(file);
        match (fs::read(&path), fs::read(&other)) {
            (Ok(x), Ok(y)) if x == y => compared += 1,
            _ => failures.push(file.to_string_lossy().into_owned()),
        }
    }
    let required = ["plain-left.embedding.tsv", "morph-right.embedding.tsv", REPORT_FILE, "plot-morph-cross.svg"];
    for f in required {
        if !a.dir.path().join(f).exists() {
            failures.push(format!("{f} missing"));
        }
    }
    Outcome::new(
        name,
        failures.is_empty(),
        format!(
            "{compared} artifacts byte-identical across two runs{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; differing: {}", failures.join(", "))
            }
        ),
    )
}

fn main() {
    // `cargo test -- --list` and friends pass flags; there is nothing to list.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut outcomes = vec![
        spectral_invariants(),
        eigen_oracle(),
        graph_properties(),
        coherence_properties(),
        morphology_properties(),
    ];
    let first = run_pipeline();
    let second = run_pipeline();
    outcomes.push(suffix_separation(&first));
    outcomes.push(corner_clusters(&first));
    outcomes.push(determinism(&first, &second));

    let mut hard_failures = 0;
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let kind = if o.best_effort { " [best-effort]" } else { "" };
        println!("{tag} {}{kind}: {}", o.name, o.detail);
        if !o.pass && !o.best_effort {
            hard_failures += 1;
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria passed", outcomes.len());
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
