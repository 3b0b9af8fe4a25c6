//! Quadratic programs over `n²` binary variables encoding graph isomorphism.
//!
//! Variable `x[v][i]` lives at flat index `v * n + i`, where `v` is a vertex of
//! the second graph and `i` a vertex of the first. A bitstring is therefore an
//! `n × n` 0/1 matrix with rows indexed by `g2` and columns by `g1`; a
//! permutation matrix encodes the bijection `f(i) = v` from `g1` to `g2`.
//!
//! All coefficients are exact rationals. Squares are expanded with `x² = x`,
//! and the constant produced by the expansion is kept as the program offset,
//! so `evaluate` returns the Hamiltonian value itself (no empirical shift).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{permute_graph, Graph, Permutation};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Row/column one-hot penalties plus both edge-mismatch double sums.
    Lucas,
    /// Lucas with the edge couplings that overlap a one-hot penalty removed.
    Zick,
    /// One-hot penalties plus a penalty for every edge of `g1` sent to a non-edge of `g2`.
    Calude,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::Lucas, Formulation::Zick, Formulation::Calude];

    pub fn as_str(&self) -> &'static str {
        match self {
            Formulation::Lucas => "lucas",
            Formulation::Zick => "zick",
            Formulation::Calude => "calude",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lucas" => Ok(Formulation::Lucas),
            "zick" => Ok(Formulation::Zick),
            "calude" => Ok(Formulation::Calude),
            other => {
                Err(Error::InvalidArgument(format!("unknown formulation `{other}` (expected lucas, zick or calude)")))
            }
        }
    }
}

/// Penalty weights `A` (one-hot) and `B` (edge mismatch).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weights {
    pub a: Rational,
    pub b: Rational,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { a: Rational::one(), b: Rational::one() }
    }
}

impl Weights {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::InvalidArgument(format!("penalty weights must be positive, got A={a}, B={b}")));
        }
        Ok(Weights { a, b })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuboProgram {
    n: usize,
    formulation: Formulation,
    weights: Weights,
    offset: Rational,
    linear: Vec<Rational>,
    quadratic: BTreeMap<(usize, usize), Rational>,
    instance: Option<(Graph, Graph)>,
}

impl QuboProgram {
    /// Assembles a program from raw coefficients. Quadratic keys must satisfy `i < j < n²`.
    pub fn from_parts(
        n: usize,
        formulation: Formulation,
        weights: Weights,
        offset: Rational,
        linear: Vec<Rational>,
        quadratic: BTreeMap<(usize, usize), Rational>,
    ) -> Result<Self> {
        let q = n * n;
        if linear.len() != q {
            return Err(Error::InvalidArgument(format!("expected {q} linear coefficients, got {}", linear.len())));
        }
        if let Some(&(i, j)) = quadratic.keys().find(|&&(i, j)| i >= j || j >= q) {
            return Err(Error::InvalidArgument(format!("quadratic index ({i}, {j}) must satisfy i < j < {q}")));
        }
        Ok(QuboProgram { n, formulation, weights, offset, linear, quadratic, instance: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        self.n * self.n
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }

    pub fn offset(&self) -> Rational {
        self.offset
    }

    pub fn linear(&self) -> &[Rational] {
        &self.linear
    }

    /// Nonzero couplings keyed by `(i, j)` with `i < j`.
    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.quadratic
    }

    /// The graph pair the program was built from, when known.
    pub fn instance(&self) -> Option<(&Graph, &Graph)> {
        self.instance.as_ref().map(|(a, b)| (a, b))
    }

    /// Flat index of `x[v][i]`.
    pub fn var(&self, v: usize, i: usize) -> usize {
        v * self.n + i
    }

    /// Objective value `offset + Σ linear·x + Σ quad·x·x`, exactly.
    pub fn evaluate(&self, x: &Bitstring) -> Result<Rational> {
        if x.len() != self.num_vars() {
            return Err(Error::BitstringLength { expected: self.num_vars(), got: x.len() });
        }
        let mut e = self.offset;
        for (k, c) in self.linear.iter().enumerate() {
            if x.get(k) {
                e += c;
            }
        }
        for (&(i, j), c) in &self.quadratic {
            if x.get(i) && x.get(j) {
                e += c;
            }
        }
        Ok(e)
    }

    /// Spin form under `x = (1 - z) / 2`, i.e. spin `+1` is bit 0.
    pub fn to_ising(&self) -> IsingModel {
        let two = Rational::from_integer(2);
        let four = Rational::from_integer(4);
        let mut offset = self.offset;
        let mut h: Vec<Rational> = self.linear.iter().map(|l| -l / two).collect();
        for l in &self.linear {
            offset += l / two;
        }
        let mut j = BTreeMap::new();
        for (&(a, b), c) in &self.quadratic {
            offset += c / four;
            h[a] -= c / four;
            h[b] -= c / four;
            j.insert((a, b), c / four);
        }
        IsingModel { h, j, offset }
    }

    /// Serializes to the QUBO text format.
    ///
    /// ```text
    /// qubo <n> <q> <formulation> <offset>
    /// weights <A> <B>
    /// lin <k> <c>        (nonzero linear terms, ascending k)
    /// quad <i> <j> <c>   (nonzero couplings, i < j, ascending)
    /// ```
    ///
    /// Every coefficient is written as an exact `p/q` rational. Spin convention
    /// for the Ising form is `x = (1 - z) / 2`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "qubo {} {} {} {}\nweights {} {}\n",
            self.n,
            self.num_vars(),
            self.formulation,
            fmt_rational(&self.offset),
            fmt_rational(&self.weights.a),
            fmt_rational(&self.weights.b)
        );
        for (k, c) in self.linear.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            out.push_str(&format!("lin {k} {}\n", fmt_rational(c)));
        }
        for (&(i, j), c) in &self.quadratic {
            out.push_str(&format!("quad {i} {j} {}\n", fmt_rational(c)));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut header: Option<(usize, Formulation, Rational)> = None;
        let mut weights = Weights::default();
        let mut linear: Vec<Rational> = Vec::new();
        let mut quadratic = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let bad = |message: String| Error::Parse { line, message };
            let toks: Vec<&str> = raw.split_ascii_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad integer `{s}`")));
            match (toks[0], header.is_some()) {
                ("qubo", false) if toks.len() == 5 => {
                    let n = int(toks[1])?;
                    let q = int(toks[2])?;
                    if q != n * n {
                        return Err(bad(format!("q = {q} but n² = {}", n * n)));
                    }
                    let f = toks[3].parse().map_err(|e: Error| bad(e.to_string()))?;
                    header = Some((n, f, parse_rational(toks[4]).map_err(bad)?));
                    linear = vec![Rational::zero(); q];
                }
                ("weights", true) if toks.len() == 3 => {
                    let a = parse_rational(toks[1]).map_err(bad)?;
                    let b = parse_rational(toks[2]).map_err(bad)?;
                    weights = Weights::new(a, b).map_err(|e| bad(e.to_string()))?;
                }
                ("lin", true) if toks.len() == 3 => {
                    let k = int(toks[1])?;
                    let slot = linear.get_mut(k).ok_or_else(|| bad(format!("variable {k} out of range")))?;
                    *slot = parse_rational(toks[2]).map_err(bad)?;
                }
                ("quad", true) if toks.len() == 4 => {
                    let (i, j) = (int(toks[1])?, int(toks[2])?);
                    if i >= j || j >= linear.len() {
                        return Err(bad(format!("coupling ({i}, {j}) must satisfy i < j < q")));
                    }
                    quadratic.insert((i, j), parse_rational(toks[3]).map_err(bad)?);
                }
                _ => return Err(bad(format!("unexpected line `{raw}`"))),
            }
        }
        let (n, formulation, offset) =
            header.ok_or(Error::Parse { line: 1, message: "missing `qubo` header".into() })?;
        quadratic.retain(|_, c: &mut Rational| !c.is_zero());
        QuboProgram::from_parts(n, formulation, weights, offset, linear, quadratic)
    }
}

fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let bad = || format!("bad rational `{s}`");
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.parse().map_err(|_| bad())?;
            let q: i64 = q.parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad()),
    }
}

/// Collects expanded terms, folding `x_k · x_k` into the linear part.
struct Terms {
    n: usize,
    offset: Rational,
    linear: Vec<Rational>,
    quadratic: BTreeMap<(usize, usize), Rational>,
}

impl Terms {
    fn new(n: usize) -> Self {
        Terms { n, offset: Rational::zero(), linear: vec![Rational::zero(); n * n], quadratic: BTreeMap::new() }
    }

    fn var(&self, v: usize, i: usize) -> usize {
        v * self.n + i
    }

    fn product(&mut self, a: usize, b: usize, c: Rational) {
        if a == b {
            self.linear[a] += c;
        } else {
            *self.quadratic.entry((a.min(b), a.max(b))).or_insert_with(Rational::zero) += c;
        }
    }

    /// `scale · (1 - Σ_{k∈group} x_k)² = scale · (1 - Σ x_k + 2 Σ_{k<l} x_k x_l)`.
    fn one_hot(&mut self, group: &[usize], scale: Rational) {
        self.offset += scale;
        for (a, &k) in group.iter().enumerate() {
            self.linear[k] -= scale;
            for &l in &group[a + 1..] {
                self.product(k, l, scale * 2);
            }
        }
    }

    /// Both row (fixed `g2` vertex) and column (fixed `g1` vertex) one-hot families.
    fn one_hot_rows_and_columns(&mut self, scale: Rational) {
        let n = self.n;
        for v in 0..n {
            let row: Vec<usize> = (0..n).map(|i| self.var(v, i)).collect();
            self.one_hot(&row, scale);
        }
        for i in 0..n {
            let col: Vec<usize> = (0..n).map(|v| self.var(v, i)).collect();
            self.one_hot(&col, scale);
        }
    }

    /// For every edge `{u, v}` of `g2` and ordered `(i, j)` with `{i, j}` not an edge of `g1`:
    /// `x[u][i] · x[v][j]`. `i == j` pairs are included unless `skip_diagonal`.
    fn g2_edges_onto_g1_non_edges(&mut self, g1: &Graph, g2: &Graph, scale: Rational, skip_diagonal: bool) {
        let n = self.n;
        for (u, v) in g2.edges() {
            for i in 0..n {
                for j in 0..n {
                    if i == j && skip_diagonal {
                        continue;
                    }
                    if i == j || !g1.has_edge(i, j) {
                        self.product(self.var(u, i), self.var(v, j), scale);
                    }
                }
            }
        }
    }

    /// For every edge `{i, j}` of `g1` and ordered `(u, v)` with `{u, v}` not an edge of `g2`:
    /// `x[u][i] · x[v][j]`. `u == v` pairs are included unless `skip_diagonal`.
    fn g1_edges_onto_g2_non_edges(&mut self, g1: &Graph, g2: &Graph, scale: Rational, skip_diagonal: bool) {
        let n = self.n;
        for (i, j) in g1.edges() {
            for u in 0..n {
                for v in 0..n {
                    if u == v && skip_diagonal {
                        continue;
                    }
                    if u == v || !g2.has_edge(u, v) {
                        self.product(self.var(u, i), self.var(v, j), scale);
                    }
                }
            }
        }
    }

    fn finish(mut self, formulation: Formulation, weights: Weights, g1: &Graph, g2: &Graph) -> QuboProgram {
        self.quadratic.retain(|_, c| !c.is_zero());
        QuboProgram {
            n: self.n,
            formulation,
            weights,
            offset: self.offset,
            linear: self.linear,
            quadratic: self.quadratic,
            instance: Some((g1.clone(), g2.clone())),
        }
    }
}

fn common_order(g1: &Graph, g2: &Graph) -> Result<usize> {
    if g1.num_vertices() != g2.num_vertices() {
        return Err(Error::VertexCountMismatch(g1.num_vertices(), g2.num_vertices()));
    }
    if g1.num_vertices() == 0 {
        return Err(Error::InvalidArgument("graphs must have at least one vertex".into()));
    }
    Ok(g1.num_vertices())
}

pub fn build_lucas(g1: &Graph, g2: &Graph, weights: Weights) -> Result<QuboProgram> {
    let n = common_order(g1, g2)?;
    let w = Weights::new(weights.a, weights.b)?;
    let mut t = Terms::new(n);
    t.one_hot_rows_and_columns(w.a);
    t.g2_edges_onto_g1_non_edges(g1, g2, w.b, false);
    t.g1_edges_onto_g2_non_edges(g1, g2, w.b, false);
    Ok(t.finish(Formulation::Lucas, w, g1, g2))
}

/// Lucas without the `i == j` / `u == v` edge couplings, which coincide with
/// one-hot couplings and vanish on every permutation matrix.
pub fn build_zick(g1: &Graph, g2: &Graph, weights: Weights) -> Result<QuboProgram> {
    let n = common_order(g1, g2)?;
    let w = Weights::new(weights.a, weights.b)?;
    let mut t = Terms::new(n);
    t.one_hot_rows_and_columns(w.a);
    t.g2_edges_onto_g1_non_edges(g1, g2, w.b, true);
    t.g1_edges_onto_g2_non_edges(g1, g2, w.b, true);
    Ok(t.finish(Formulation::Zick, w, g1, g2))
}

/// `F(x) = H(x) + Σ_{ij∈E1} P_ij(x)` with unit weights. `P_ij` sums
/// `x[i'][i] · x[j'][j]` over ordered `(i', j')` whose pair is not an edge of
/// `g2` (including `i' == j'`).
pub fn build_calude(g1: &Graph, g2: &Graph) -> Result<QuboProgram> {
    let n = common_order(g1, g2)?;
    let mut t = Terms::new(n);
    t.one_hot_rows_and_columns(Rational::one());
    t.g1_edges_onto_g2_non_edges(g1, g2, Rational::one(), false);
    Ok(t.finish(Formulation::Calude, Weights::default(), g1, g2))
}

/// Dispatches on `formulation`; `weights` is ignored for Calude.
pub fn build(formulation: Formulation, g1: &Graph, g2: &Graph, weights: Weights) -> Result<QuboProgram> {
    match formulation {
        Formulation::Lucas => build_lucas(g1, g2, weights),
        Formulation::Zick => build_zick(g1, g2, weights),
        Formulation::Calude => build_calude(g1, g2),
    }
}

/// Assignment of `q` binary variables. Displayed with variable 0 leftmost.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn zeros(q: usize) -> Self {
        Bitstring(vec![false; q])
    }

    pub fn ones(q: usize) -> Self {
        Bitstring(vec![true; q])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    /// Bit `k` of `index` becomes variable `k`.
    pub fn from_index(index: u64, q: usize) -> Self {
        Bitstring((0..q).map(|k| (index >> k) & 1 == 1).collect())
    }

    /// The `n × n` permutation matrix of `f: g1 → g2`, i.e. `x[f(i)][i] = 1`.
    pub fn from_permutation(f: &Permutation) -> Self {
        let n = f.len();
        let mut bits = vec![false; n * n];
        for i in 0..n {
            bits[f.apply(i) * n + i] = true;
        }
        Bitstring(bits)
    }

    pub fn to_index(&self) -> u64 {
        self.0.iter().enumerate().fold(0, |acc, (k, &b)| acc | ((b as u64) << k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidArgument(format!("bitstring `{s}` contains `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedMapping {
    pub defined: bool,
    /// `f: g1 → g2` when the bitstring is a permutation matrix.
    pub mapping: Option<Permutation>,
    /// Whether `f` carries the edge set of `g1` exactly onto that of `g2`.
    pub edge_invariant: Option<bool>,
}

/// Partial decoder: defined exactly on permutation matrices.
pub fn decode(x: &Bitstring, n: usize, g1: &Graph, g2: &Graph) -> Result<DecodedMapping> {
    if x.len() != n * n {
        return Err(Error::BitstringLength { expected: n * n, got: x.len() });
    }
    let undefined = DecodedMapping { defined: false, mapping: None, edge_invariant: None };
    let mut image = vec![usize::MAX; n];
    for v in 0..n {
        let ones: Vec<usize> = (0..n).filter(|&i| x.get(v * n + i)).collect();
        if ones.len() != 1 {
            return Ok(undefined);
        }
        let i = ones[0];
        if image[i] != usize::MAX {
            return Ok(undefined);
        }
        image[i] = v;
    }
    let f = Permutation::new(image)?;
    let edge_invariant =
        g1.num_vertices() == n && g2.num_vertices() == n && permute_graph(g1, &f).map(|h| &h == g2).unwrap_or(false);
    Ok(DecodedMapping { defined: true, mapping: Some(f), edge_invariant: Some(edge_invariant) })
}

/// `E(z) = offset + Σ h_k z_k + Σ_{i<j} J_ij z_i z_j` over spins `z ∈ {+1, -1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    pub h: Vec<Rational>,
    pub j: BTreeMap<(usize, usize), Rational>,
    pub offset: Rational,
}

impl IsingModel {
    /// Energy of the spin configuration matching `x` (bit 0 ⇒ spin +1).
    pub fn energy(&self, x: &Bitstring) -> Result<Rational> {
        if x.len() != self.h.len() {
            return Err(Error::BitstringLength { expected: self.h.len(), got: x.len() });
        }
        let spin = |k: usize| if x.get(k) { -1 } else { 1 };
        let mut e = self.offset;
        for (k, h) in self.h.iter().enumerate() {
            e += h * spin(k);
        }
        for (&(a, b), c) in &self.j {
            e += c * (spin(a) * spin(b));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, is_isomorphic_exact};

    fn r(x: i64) -> Rational {
        Rational::from_integer(x)
    }

    fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    fn star(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (0, v))).unwrap()
    }

    fn all_programs(g1: &Graph, g2: &Graph) -> Vec<QuboProgram> {
        Formulation::ALL.iter().map(|&f| build(f, g1, g2, Weights::default()).unwrap()).collect()
    }

    #[test]
    fn all_zero_energy_is_two_a_n() {
        let (g1, g2) = (path(3), path(3));
        let w = Weights::new(r(3), r(5)).unwrap();
        for p in [build_lucas(&g1, &g2, w).unwrap(), build_zick(&g1, &g2, w).unwrap()] {
            assert_eq!(p.evaluate(&Bitstring::zeros(9)).unwrap(), r(2 * 3 * 3));
            assert_eq!(p.offset(), r(18));
        }
        let c = build_calude(&g1, &g2).unwrap();
        assert_eq!(c.evaluate(&Bitstring::zeros(9)).unwrap(), r(6));
        assert_eq!(c.num_vars(), 9);
    }

    #[test]
    fn identity_on_k2_is_zero() {
        let k2 = complete_graph(2);
        let x = Bitstring::from_permutation(&Permutation::identity(2));
        for p in all_programs(&k2, &k2) {
            assert_eq!(p.evaluate(&x).unwrap(), r(0), "{}", p.formulation());
        }
    }

    #[test]
    fn k3_every_permutation_is_zero() {
        let k3 = complete_graph(3);
        let p = build_calude(&k3, &k3).unwrap();
        for f in Permutation::all(3) {
            assert_eq!(p.evaluate(&Bitstring::from_permutation(&f)).unwrap(), r(0));
        }
    }

    #[test]
    fn calude_all_ones_on_k2() {
        // H: four squares (1 - 2)² = 4; P for edge 01: pairs (0,0),(1,1) are
        // non-edges of K2 → 2. Total 6.
        let k2 = complete_graph(2);
        let p = build_calude(&k2, &k2).unwrap();
        assert_eq!(p.evaluate(&Bitstring::ones(4)).unwrap(), r(6));
    }

    #[test]
    fn p4_vs_star_minimum_positive() {
        let (g1, g2) = (path(4), star(4));
        assert!(is_isomorphic_exact(&g1, &g2).unwrap().is_none());
        let p = build_lucas(&g1, &g2, Weights::default()).unwrap();
        let min = (0..1u64 << 16).map(|b| p.evaluate(&Bitstring::from_index(b, 16)).unwrap()).min().unwrap();
        assert!(min > r(0));
    }

    #[test]
    fn zick_couplings_subset_of_lucas() {
        let (g1, g2) = (path(4), star(4));
        let l = build_lucas(&g1, &g2, Weights::default()).unwrap();
        let z = build_zick(&g1, &g2, Weights::default()).unwrap();
        for (k, c) in z.quadratic() {
            assert!(l.quadratic().get(k).is_some_and(|d| d >= c));
        }
        assert_ne!(l.quadratic(), z.quadratic());
    }

    #[test]
    fn mismatched_orders_rejected() {
        assert!(matches!(build_calude(&path(3), &path(4)), Err(Error::VertexCountMismatch(3, 4))));
        assert!(build_lucas(&path(3), &path(3), Weights { a: r(0), b: r(1) }).is_err());
    }

    #[test]
    fn evaluate_checks_length() {
        let p = build_calude(&path(2), &path(2)).unwrap();
        assert!(matches!(p.evaluate(&Bitstring::zeros(3)), Err(Error::BitstringLength { expected: 4, got: 3 })));
    }

    #[test]
    fn decode_examples() {
        let g = path(3);
        let id = decode(&Bitstring::from_permutation(&Permutation::identity(3)), 3, &g, &g).unwrap();
        assert!(id.defined);
        assert_eq!(id.mapping, Some(Permutation::identity(3)));
        assert_eq!(id.edge_invariant, Some(true));
        let z = decode(&Bitstring::zeros(9), 3, &g, &g).unwrap();
        assert!(!z.defined && z.mapping.is_none() && z.edge_invariant.is_none());
        // 0->1 swaps an end with the middle: not an automorphism of P3.
        let f = Permutation::new(vec![1, 0, 2]).unwrap();
        let d = decode(&Bitstring::from_permutation(&f), 3, &g, &g).unwrap();
        assert_eq!(d.mapping, Some(f));
        assert_eq!(d.edge_invariant, Some(false));
    }

    #[test]
    fn ising_single_variable() {
        let p = QuboProgram::from_parts(1, Formulation::Calude, Weights::default(), r(0), vec![r(1)], BTreeMap::new())
            .unwrap();
        let m = p.to_ising();
        assert_eq!(m.h, vec![Rational::new(-1, 2)]);
        assert_eq!(m.offset, Rational::new(1, 2));
        assert_eq!(m.energy(&Bitstring::zeros(1)).unwrap(), r(0));
        assert_eq!(m.energy(&Bitstring::ones(1)).unwrap(), r(1));

        let zero =
            QuboProgram::from_parts(2, Formulation::Calude, Weights::default(), r(0), vec![r(0); 4], BTreeMap::new())
                .unwrap()
                .to_ising();
        assert!(zero.h.iter().all(|h| h.is_zero()) && zero.j.is_empty() && zero.offset.is_zero());
    }

    #[test]
    fn text_format_round_trip() {
        let p = build_lucas(&path(3), &star(3), Weights::new(Rational::new(3, 2), r(2)).unwrap()).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("qubo 3 9 lucas 9/1\nweights 3/2 2/1\n"));
        let back = QuboProgram::parse_text(&text).unwrap();
        assert_eq!(back.linear(), p.linear());
        assert_eq!(back.quadratic(), p.quadratic());
        assert_eq!(back.offset(), p.offset());
        assert_eq!(back.weights(), p.weights());
        assert!(back.instance().is_none());
        assert!(matches!(
            QuboProgram::parse_text("qubo 2 4 calude 0\nquad 2 1 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(QuboProgram::parse_text("qubo 2 5 calude 0\n"), Err(Error::Parse { line: 1, .. })));
    }
}
