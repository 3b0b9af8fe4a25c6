//! Simple undirected graphs, vertex permutations, random pair generation and
//! the exhaustive isomorphism oracle used as ground truth.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Largest vertex count accepted by [`is_isomorphic_exact`].
pub const MAX_ORACLE_VERTICES: usize = 10;

/// Attempts allowed when rejection-sampling a non-isomorphic partner graph.
pub const NON_ISO_RETRY_BUDGET: usize = 10_000;

/// Simple undirected graph on vertices `0..n`. Edges are stored as `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    num_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.num_vertices, raw.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph { num_vertices: g.num_vertices, edges: g.edges.into_iter().collect() }
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for {num_vertices} vertices")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph { num_vertices, edges: set })
    }

    pub fn empty(num_vertices: usize) -> Self {
        Graph { num_vertices, edges: BTreeSet::new() }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in ascending `(u, v)` order with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.num_vertices;
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in &self.edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }

    /// Breadth-first reachability from vertex 0. The empty graph on zero vertices counts as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices;
        if n <= 1 {
            return true;
        }
        let adj = self.adjacency_matrix();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if adj[u][v] && !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == n
    }

    pub fn nonisolated_vertex_count(&self) -> usize {
        self.degrees().iter().filter(|&&d| d > 0).count()
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.num_vertices == other.num_vertices && self.edges.is_subset(&other.edges)
    }

    /// Serializes to the edge-list text format: `n m` then one `u v` per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.num_vertices, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing `n m` header".into() })?;
        let (n, m) = parse_pair(hline, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, text) in lines {
            edges.push(parse_pair(line, text)?);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: hline,
                message: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::new(n, edges).map_err(|e| Error::Parse { line: hline, message: e.to_string() })
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let bad = |message: String| Error::Parse { line, message };
    let mut it = text.split_ascii_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it.next().ok_or_else(|| bad(format!("expected two integers, got `{text}`")))?;
        tok.parse().map_err(|_| bad(format!("not a nonnegative integer: `{tok}`")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(bad(format!("trailing tokens in `{text}`")));
    }
    Ok((a, b))
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G(n={}, E=[", self.num_vertices)?;
        for (k, (u, v)) in self.edges().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "])")
    }
}

/// A bijection on `0..n`, stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!("{image:?} is not a bijection on 0..{n}")));
            }
        }
        Ok(Permutation(image))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Permutation(image)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn image(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (v, &pv) in self.0.iter().enumerate() {
            inv[pv] = v;
        }
        Permutation(inv)
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if current.len() == n {
                out.push(Permutation(current.clone()));
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    current.push(v);
                    rec(n, current, used, out);
                    current.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }
}

/// Relabels `g`: edge `{u, v}` becomes `{p(u), p(v)}`.
pub fn permute_graph(g: &Graph, p: &Permutation) -> Result<Graph> {
    if p.len() != g.num_vertices() {
        return Err(Error::PermutationLength { expected: g.num_vertices(), got: p.len() });
    }
    Graph::new(g.num_vertices(), g.edges().map(|(u, v)| (p.apply(u), p.apply(v))))
}

/// Exhaustive isomorphism test. Returns the lexicographically smallest `p`
/// with `permute_graph(g1, p) == g2`, or `None`.
///
/// Vertices of `g1` are assigned in order and candidate images are tried in
/// ascending order; a partial assignment is abandoned as soon as a degree or
/// adjacency constraint fails, so the first complete assignment is the
/// smallest witness.
pub fn is_isomorphic_exact(g1: &Graph, g2: &Graph) -> Result<Option<Permutation>> {
    let n = g1.num_vertices().max(g2.num_vertices());
    if n > MAX_ORACLE_VERTICES {
        return Err(Error::OracleTooLarge { n, max: MAX_ORACLE_VERTICES });
    }
    if g1.num_vertices() != g2.num_vertices() || g1.num_edges() != g2.num_edges() {
        return Ok(None);
    }
    let (d1, d2) = (g1.degrees(), g2.degrees());
    let mut s1 = d1.clone();
    let mut s2 = d2.clone();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return Ok(None);
    }

    let (a1, a2) = (g1.adjacency_matrix(), g2.adjacency_matrix());
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn search(
        v: usize,
        image: &mut [usize],
        used: &mut [bool],
        d: (&[usize], &[usize]),
        a: (&[Vec<bool>], &[Vec<bool>]),
    ) -> bool {
        let n = image.len();
        if v == n {
            return true;
        }
        for t in 0..n {
            if used[t] || d.0[v] != d.1[t] {
                continue;
            }
            if (0..v).any(|u| a.0[u][v] != a.1[image[u]][t]) {
                continue;
            }
            image[v] = t;
            used[t] = true;
            if search(v + 1, image, used, d, a) {
                return true;
            }
            used[t] = false;
        }
        false
    }

    if search(0, &mut image, &mut used, (&d1, &d2), (&a1, &a2)) {
        Ok(Some(Permutation(image)))
    } else {
        Ok(None)
    }
}

/// Number of automorphisms of `g` (brute force over all `n!` relabelings).
pub fn automorphism_count(g: &Graph) -> usize {
    Permutation::all(g.num_vertices()).iter().filter(|p| permute_graph(g, p).map(|h| &h == g).unwrap_or(false)).count()
}

pub fn complete_graph(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::new(n, edges).expect("complete graph is simple")
}

pub fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_feasible(n: usize, m: usize) -> Result<()> {
    if n == 0 || m + 1 < n || m > max_edges(n) {
        return Err(Error::InfeasibleGraph { n, m });
    }
    Ok(())
}

/// Connected simple graph with exactly `n` vertices and `m` edges.
///
/// A random spanning tree (each vertex, in shuffled order, attaches to a
/// uniformly chosen earlier one) plus `m - (n - 1)` distinct extra edges drawn
/// uniformly from the remaining vertex pairs.
pub fn random_connected_graph(n: usize, m: usize, seed: u64) -> Result<Graph> {
    random_connected_graph_with(n, m, &mut rng::from_seed(seed))
}

pub(crate) fn random_connected_graph_with(n: usize, m: usize, rng: &mut Rng) -> Result<Graph> {
    check_feasible(n, m)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        let child = order[k];
        edges.insert((parent.min(child), parent.max(child)));
    }
    let rest: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|e| !edges.contains(e)).collect();
    let extra = m - (n - 1);
    for i in index::sample(rng, rest.len(), extra).into_vec() {
        edges.insert(rest[i]);
    }
    Ok(Graph { num_vertices: n, edges })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairLabel {
    Isomorphic,
    NonIsomorphic,
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairLabel::Isomorphic => "isomorphic",
            PairLabel::NonIsomorphic => "non-isomorphic",
        })
    }
}

impl std::str::FromStr for PairLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isomorphic" => Ok(PairLabel::Isomorphic),
            "non-isomorphic" => Ok(PairLabel::NonIsomorphic),
            other => Err(Error::InvalidArgument(format!("unknown pair label `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphPair {
    pub g1: Graph,
    pub g2: Graph,
    pub intended_label: PairLabel,
    pub witness: Option<Permutation>,
    pub seed: u64,
}

/// Generates a pair of connected `(n, m)` graphs.
///
/// Isomorphic pairs are `(G, p(G))` with `p` recorded as the witness.
/// Non-isomorphic partners are rejection-sampled and certified by the oracle.
pub fn generate_pair(n: usize, m: usize, want_iso: bool, seed: u64) -> Result<GraphPair> {
    let mut rng = rng::from_seed(seed);
    let g1 = random_connected_graph_with(n, m, &mut rng)?;
    if want_iso {
        let p = Permutation::random(n, &mut rng);
        let g2 = permute_graph(&g1, &p)?;
        return Ok(GraphPair { g1, g2, intended_label: PairLabel::Isomorphic, witness: Some(p), seed });
    }
    for _ in 0..NON_ISO_RETRY_BUDGET {
        let candidate = random_connected_graph_with(n, m, &mut rng)?;
        if is_isomorphic_exact(&g1, &candidate)?.is_none() {
            return Ok(GraphPair { g1, g2: candidate, intended_label: PairLabel::NonIsomorphic, witness: None, seed });
        }
    }
    Err(Error::RetryBudgetExhausted { n, m, attempts: NON_ISO_RETRY_BUDGET })
}

/// `g` followed by successively smaller graphs, each missing one more edge,
/// removed in a seeded uniformly random order, ending at the empty edge set.
/// Vertex count is kept throughout.
pub fn edge_removal_sequence(g: &Graph, seed: u64) -> Vec<Graph> {
    let mut rng = rng::from_seed(seed);
    let mut order: Vec<(usize, usize)> = g.edges().collect();
    order.shuffle(&mut rng);
    let mut current = g.clone();
    let mut out = vec![current.clone()];
    for e in order {
        current.edges.remove(&e);
        out.push(current.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges.iter().copied()).unwrap()
    }

    fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    fn star(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (0, v))).unwrap()
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn triangle_vs_path() {
        assert_eq!(is_isomorphic_exact(&complete_graph(3), &path(3)).unwrap(), None);
    }

    #[test]
    fn relabeled_cycle_is_found() {
        let c4 = g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let p = Permutation::new(vec![2, 3, 0, 1]).unwrap();
        let c4b = permute_graph(&c4, &p).unwrap();
        let w = is_isomorphic_exact(&c4, &c4b).unwrap().unwrap();
        assert_eq!(permute_graph(&c4, &w).unwrap(), c4b);
    }

    #[test]
    fn star_vs_path_brute_force() {
        let (s, p) = (star(4), path(4));
        let brute = Permutation::all(4).iter().any(|q| permute_graph(&s, q).unwrap() == p);
        assert!(!brute);
        assert_eq!(is_isomorphic_exact(&s, &p).unwrap(), None);
    }

    #[test]
    fn witness_is_lexicographically_smallest() {
        let k3 = complete_graph(3);
        assert_eq!(is_isomorphic_exact(&k3, &k3).unwrap(), Some(Permutation::identity(3)));
        let p4 = path(4);
        let q = Permutation::new(vec![3, 2, 1, 0]).unwrap();
        let target = permute_graph(&p4, &q).unwrap();
        let expected = Permutation::all(4).into_iter().find(|r| permute_graph(&p4, r).unwrap() == target).unwrap();
        assert_eq!(is_isomorphic_exact(&p4, &target).unwrap(), Some(expected));
    }

    #[test]
    fn oracle_guard() {
        assert!(matches!(is_isomorphic_exact(&Graph::empty(11), &Graph::empty(11)), Err(Error::OracleTooLarge { .. })));
    }

    #[test]
    fn forced_shapes() {
        for seed in 0..20 {
            let t = random_connected_graph(4, 3, seed).unwrap();
            assert!(t.is_connected());
            assert_eq!(t.num_edges(), 3);
            assert_eq!(random_connected_graph(4, 6, seed).unwrap(), complete_graph(4));
        }
        let h = random_connected_graph(5, 5, 7).unwrap();
        assert_eq!(h.num_edges(), 5);
        assert!(h.is_connected());
        assert!(random_connected_graph(4, 2, 0).is_err());
        assert!(random_connected_graph(4, 7, 0).is_err());
    }

    #[test]
    fn random_graphs_are_deterministic() {
        assert_eq!(random_connected_graph(6, 8, 42).unwrap(), random_connected_graph(6, 8, 42).unwrap());
    }

    #[test]
    fn pairs() {
        let iso = generate_pair(4, 4, true, 3).unwrap();
        assert!(is_isomorphic_exact(&iso.g1, &iso.g2).unwrap().is_some());
        let w = iso.witness.as_ref().unwrap();
        assert_eq!(permute_graph(&iso.g1, w).unwrap(), iso.g2);

        let non = generate_pair(4, 5, false, 3);
        // (4,5) has a single connected class: K4 minus an edge.
        assert!(matches!(non, Err(Error::RetryBudgetExhausted { attempts: 10_000, .. })));

        let non = generate_pair(4, 4, false, 3).unwrap();
        assert_eq!(is_isomorphic_exact(&non.g1, &non.g2).unwrap(), None);
        assert_eq!(non.g1.num_edges(), non.g2.num_edges());
    }

    #[test]
    fn three_vertices_two_edges_has_one_class() {
        // Every connected (3, 2) graph is a path; enumerate them.
        let candidates = [(0, 1), (0, 2), (1, 2)];
        let mut classes: Vec<Graph> = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                let h = g(3, &[candidates[i], candidates[j]]);
                assert!(h.is_connected());
                if !classes.iter().any(|c| is_isomorphic_exact(c, &h).unwrap().is_some()) {
                    classes.push(h);
                }
            }
        }
        assert_eq!(classes.len(), 1);
        assert!(matches!(generate_pair(3, 2, false, 1), Err(Error::RetryBudgetExhausted { .. })));
    }

    #[test]
    fn permute_examples() {
        let p3 = g(3, &[(0, 1), (1, 2)]);
        assert_eq!(permute_graph(&p3, &Permutation::identity(3)).unwrap(), p3);
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(permute_graph(&p3, &p).unwrap(), g(3, &[(2, 0), (0, 1)]));
        let k4 = complete_graph(4);
        for q in Permutation::all(4) {
            assert_eq!(permute_graph(&k4, &q).unwrap(), k4);
        }
        assert!(matches!(
            permute_graph(&p3, &Permutation::identity(4)),
            Err(Error::PermutationLength { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn removal_sequence() {
        let k5 = complete_graph(5);
        assert_eq!(k5.num_edges(), 10);
        let seq = edge_removal_sequence(&k5, 9);
        assert_eq!(seq.len(), 11);
        for (k, w) in seq.windows(2).enumerate() {
            assert!(w[1].is_subgraph_of(&w[0]));
            assert_eq!(w[1].num_edges() + 1, w[0].num_edges());
            assert_eq!(w[1].num_vertices(), 5, "step {k}");
        }
        assert_eq!(seq[10].num_edges(), 0);
        assert_eq!(seq, edge_removal_sequence(&k5, 9));
    }

    #[test]
    fn automorphisms() {
        assert_eq!(automorphism_count(&complete_graph(3)), 6);
        assert_eq!(automorphism_count(&path(4)), 2);
        assert_eq!(automorphism_count(&star(4)), 6);
    }

    #[test]
    fn edge_list_format() {
        let h = g(4, &[(0, 1), (2, 1), (3, 0)]);
        let text = h.to_edge_list();
        assert_eq!(text, "4 3\n0 1\n0 3\n1 2\n");
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), h);
        assert!(matches!(Graph::parse_edge_list("3 2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(Graph::parse_edge_list("3 1\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(Graph::parse_edge_list("2 1\n0 0\n").is_err());
    }
}
