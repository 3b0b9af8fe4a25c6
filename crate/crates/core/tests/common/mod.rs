//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use isoqubo::graph::Graph;
use isoqubo::qubo::Formulation;
use num_complex::Complex64;

/// All permutations of `0..n`, by recursion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn edge_set(g: &Graph) -> BTreeSet<(usize, usize)> {
    g.edges().map(|(u, v)| (u.min(v), u.max(v))).collect()
}

fn image_set(g: &Graph, f: &[usize]) -> BTreeSet<(usize, usize)> {
    g.edges().map(|(u, v)| (f[u].min(f[v]), f[u].max(f[v]))).collect()
}

/// Brute-force isomorphism test over every vertex bijection.
pub fn brute_isomorphic(g1: &Graph, g2: &Graph) -> bool {
    g1.num_vertices() == g2.num_vertices()
        && g1.num_edges() == g2.num_edges()
        && permutations(g1.num_vertices()).iter().any(|f| image_set(g1, f) == edge_set(g2))
}

pub fn brute_automorphisms(g: &Graph) -> usize {
    let e = edge_set(g);
    permutations(g.num_vertices()).iter().filter(|f| image_set(g, f) == e).count()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|v| find(&mut parent, v) == root)
}

/// Union-find connectivity, independent of the library's BFS.
pub fn is_connected(g: &Graph) -> bool {
    g.num_vertices() == 0 || connected(g.num_vertices(), &g.edges().collect::<Vec<_>>())
}

/// One representative per isomorphism class of connected graphs on `n` vertices.
pub fn connected_class_representatives(n: usize) -> Vec<Graph> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for mask in 0u32..(1 << slots.len()) {
        let edges: Vec<(usize, usize)> =
            slots.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
        if !connected(n, &edges) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|f| {
                let mut img: Vec<(usize, usize)> =
                    edges.iter().map(|&(u, v)| (f[u].min(f[v]), f[u].max(f[v]))).collect();
                img.sort_unstable();
                img
            })
            .min()
            .expect("n ≥ 1");
        if seen.insert(canon) {
            reps.push(Graph::new(n, edges).unwrap());
        }
    }
    reps
}

/// Objective value computed straight from the penalty definitions with
/// integer weights. Variable `(v, i)` lives at `x[v * n + i]` and means
/// vertex `i` of `g1` maps to vertex `v` of `g2`.
pub fn direct_objective(f: Formulation, g1: &Graph, g2: &Graph, a: i64, b: i64, x: &[bool]) -> i64 {
    let n = g1.num_vertices();
    let at = |v: usize, i: usize| x[v * n + i] as i64;
    let mut one_hot = 0;
    for v in 0..n {
        let s: i64 = (0..n).map(|i| at(v, i)).sum();
        one_hot += (1 - s) * (1 - s);
    }
    for i in 0..n {
        let s: i64 = (0..n).map(|v| at(v, i)).sum();
        one_hot += (1 - s) * (1 - s);
    }
    let keep_diagonal = f != Formulation::Zick;
    let mut g2_onto_non_edges = 0;
    for (u, v) in g2.edges() {
        for i in 0..n {
            for j in 0..n {
                let bad = if i == j { keep_diagonal } else { !g1.has_edge(i, j) };
                if bad {
                    g2_onto_non_edges += at(u, i) * at(v, j);
                }
            }
        }
    }
    let mut g1_onto_non_edges = 0;
    for (i, j) in g1.edges() {
        for u in 0..n {
            for v in 0..n {
                let bad = if u == v { keep_diagonal } else { !g2.has_edge(u, v) };
                if bad {
                    g1_onto_non_edges += at(u, i) * at(v, j);
                }
            }
        }
    }
    match f {
        Formulation::Lucas | Formulation::Zick => a * one_hot + b * (g2_onto_non_edges + g1_onto_non_edges),
        Formulation::Calude => one_hot + g1_onto_non_edges,
    }
}

pub type Mat = Vec<Vec<Complex64>>;

pub fn identity(d: usize) -> Mat {
    (0..d)
        .map(|r| (0..d).map(|c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for r in 0..d {
        for k in 0..d {
            let x = a[r][k];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..d {
                out[r][c] += x * b[k][c];
            }
        }
    }
    out
}

pub fn matvec(a: &Mat, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (da, db) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); da * db]; da * db];
    for r in 0..da * db {
        for c in 0..da * db {
            out[r][c] = a[r / db][c / db] * b[r % db][c % db];
        }
    }
    out
}

/// `⊗` over qubits with qubit 0 as the rightmost (least significant) factor.
pub fn on_qubits(q: usize, single: impl Fn(usize) -> Mat) -> Mat {
    let mut out = vec![vec![Complex64::new(1.0, 0.0)]];
    for k in (0..q).rev() {
        out = kron(&out, &single(k));
    }
    out
}

/// Matrix exponential by scaling and squaring around a Taylor series.
pub fn expm(a: &Mat) -> Mat {
    let d = a.len();
    let norm: f64 = a.iter().map(|row| row.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.25 {
        s += 1;
    }
    let scale = f64::powi(2.0, s);
    let scaled: Mat = a.iter().map(|row| row.iter().map(|x| x / scale).collect()).collect();
    let mut result = identity(d);
    let mut term = identity(d);
    for k in 1..30 {
        term = matmul(&term, &scaled);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for r in 0..d {
            for c in 0..d {
                result[r][c] += term[r][c];
            }
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli_x() -> Mat {
    vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]
}

pub fn ry(theta: f64) -> Mat {
    let (s, co) = (theta / 2.0).sin_cos();
    vec![vec![c(co), c(-s)], vec![c(s), c(co)]]
}

fn projector_one() -> Mat {
    vec![vec![c(0.0), c(0.0)], vec![c(0.0), c(1.0)]]
}

/// `CZ = I - 2·|11⟩⟨11|` on qubits `a`, `b`.
pub fn cz(q: usize, a: usize, b: usize) -> Mat {
    let p = on_qubits(q, |k| if k == a || k == b { projector_one() } else { identity(2) });
    let mut out = identity(1 << q);
    for r in 0..out.len() {
        for col in 0..out.len() {
            out[r][col] -= p[r][col] * 2.0;
        }
    }
    out
}

/// QAOA state built from dense unitaries: `e^{iβ ΣX}` via [`expm`].
pub fn qaoa_dense(energies: &[f64], alphas: &[f64], betas: &[f64]) -> Vec<Complex64> {
    let d = energies.len();
    let q = d.trailing_zeros() as usize;
    let mut sum_x = vec![vec![c(0.0); d]; d];
    for k in 0..q {
        let xk = on_qubits(q, |j| if j == k { pauli_x() } else { identity(2) });
        for r in 0..d {
            for col in 0..d {
                sum_x[r][col] += xk[r][col];
            }
        }
    }
    let mut psi = vec![c(1.0 / (d as f64).sqrt()); d];
    for (&alpha, &beta) in alphas.iter().zip(betas) {
        for (amp, e) in psi.iter_mut().zip(energies) {
            *amp *= Complex64::from_polar(1.0, -alpha * e);
        }
        let gen: Mat = sum_x.iter().map(|row| row.iter().map(|x| x * Complex64::new(0.0, beta)).collect()).collect();
        psi = matvec(&expm(&gen), &psi);
    }
    psi
}

/// TwoLocal state from Kronecker-built rotation layers and CZ chains.
pub fn twolocal_dense(q: usize, reps: usize, theta: &[f64]) -> Vec<Complex64> {
    let d = 1 << q;
    let mut psi = vec![c(0.0); d];
    psi[0] = c(1.0);
    for r in 0..=reps {
        let layer = on_qubits(q, |k| ry(theta[r * q + k]));
        psi = matvec(&layer, &psi);
        if r < reps {
            for k in 0..q.saturating_sub(1) {
                psi = matvec(&cz(q, k, k + 1), &psi);
            }
        }
    }
    psi
}

pub fn max_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
