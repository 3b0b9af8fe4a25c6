//! Exhaustive diagonalization of a QUBO program.
//!
//! Coefficients are scaled to integers by the least common denominator and the
//! sweep runs in `i64`, so the reported minimum and its argmin set are exact.
//! The index space is split into contiguous chunks that share their high bits;
//! each chunk starts from a directly evaluated energy and walks its low bits in
//! Gray-code order, one `O(q)` update per step.

use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qubo::{decode, Bitstring, DecodedMapping, QuboProgram, Rational};

/// Default limit on qubits for any `2^q` table.
pub const DEFAULT_QUBIT_CAP: usize = 16;

/// Hard ceiling reachable with the extended-scale flag (5-vertex pairs).
pub const EXTENDED_QUBIT_CAP: usize = 25;

/// At most this many ground states are listed in a [`SolveResult`].
pub const ARGMIN_LIST_CAP: usize = 1024;

/// Low bits walked per chunk; chunks number `2^(q - CHUNK_BITS)`.
const CHUNK_BITS: usize = 12;

pub fn check_qubit_cap(q: usize, cap: usize, bytes_per_entry: u128) -> Result<()> {
    if q > cap || q > EXTENDED_QUBIT_CAP {
        return Err(Error::QubitCapExceeded {
            q,
            cap: cap.min(EXTENDED_QUBIT_CAP),
            bytes: (1u128 << q) * bytes_per_entry,
        });
    }
    Ok(())
}

/// The program multiplied through by `scale` so that every coefficient is an integer.
#[derive(Clone, Debug)]
pub struct IntegerForm {
    pub scale: i64,
    pub offset: i64,
    pub linear: Vec<i64>,
    pub neighbors: Vec<Vec<(usize, i64)>>,
}

impl IntegerForm {
    pub fn new(p: &QuboProgram) -> Result<Self> {
        let coeffs =
            std::iter::once(p.offset()).chain(p.linear().iter().copied()).chain(p.quadratic().values().copied());
        let scale = coeffs.clone().fold(1i64, |acc, c| acc.lcm(c.denom()));
        let to_int =
            |c: Rational| -> Result<i64> { c.numer().checked_mul(scale / c.denom()).ok_or(Error::CoefficientOverflow) };
        // Every reachable energy is bounded by the sum of absolute coefficients.
        let mut bound: i64 = 0;
        for c in coeffs {
            bound = bound
                .checked_add(to_int(c)?.checked_abs().ok_or(Error::CoefficientOverflow)?)
                .ok_or(Error::CoefficientOverflow)?;
        }
        let q = p.num_vars();
        let linear = p.linear().iter().map(|&c| to_int(c)).collect::<Result<Vec<_>>>()?;
        let mut neighbors = vec![Vec::new(); q];
        for (&(i, j), &c) in p.quadratic() {
            let c = to_int(c)?;
            neighbors[i].push((j, c));
            neighbors[j].push((i, c));
        }
        Ok(IntegerForm { scale, offset: to_int(p.offset())?, linear, neighbors })
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    /// Scaled energy of the bitstring whose bit `k` is variable `k`.
    pub fn energy(&self, x: u64) -> i64 {
        let mut e = self.offset;
        for k in 0..self.num_vars() {
            if x >> k & 1 == 1 {
                e += self.linear[k];
                for &(j, c) in &self.neighbors[k] {
                    if j > k && x >> j & 1 == 1 {
                        e += c;
                    }
                }
            }
        }
        e
    }

    /// Energy change when bit `k` of `x` is flipped.
    fn flip_delta(&self, x: u64, k: usize) -> i64 {
        let mut d = self.linear[k];
        for &(j, c) in &self.neighbors[k] {
            if x >> j & 1 == 1 {
                d += c;
            }
        }
        if x >> k & 1 == 1 {
            -d
        } else {
            d
        }
    }
}

#[derive(Clone, Debug)]
struct MinStats {
    min: i64,
    count: u64,
    /// Smallest indices attaining `min`, at most `ARGMIN_LIST_CAP` after `finish`.
    argmin: Vec<u64>,
}

impl MinStats {
    fn empty() -> Self {
        MinStats { min: i64::MAX, count: 0, argmin: Vec::new() }
    }

    fn push(&mut self, x: u64, e: i64) {
        if e < self.min {
            self.min = e;
            self.count = 0;
            self.argmin.clear();
        }
        if e == self.min {
            self.count += 1;
            self.argmin.push(x);
            if self.argmin.len() > 2 * ARGMIN_LIST_CAP {
                self.argmin.sort_unstable();
                self.argmin.truncate(ARGMIN_LIST_CAP);
            }
        }
    }

    fn merge(mut self, other: MinStats) -> MinStats {
        if other.min < self.min {
            return other;
        }
        if other.min == self.min {
            self.count += other.count;
            self.argmin.extend(other.argmin);
        }
        self
    }

    fn finish(mut self) -> MinStats {
        self.argmin.sort_unstable();
        self.argmin.truncate(ARGMIN_LIST_CAP);
        self
    }
}

fn sweep_chunk(form: &IntegerForm, low_bits: usize, chunk: u64, mut out: Option<&mut [f64]>) -> MinStats {
    let base = chunk << low_bits;
    let inv_scale = 1.0 / form.scale as f64;
    let mut x = base;
    let mut e = form.energy(x);
    let mut stats = MinStats::empty();
    stats.push(x, e);
    if let Some(o) = out.as_deref_mut() {
        o[0] = e as f64 * inv_scale;
    }
    for step in 1u64..(1u64 << low_bits) {
        let k = step.trailing_zeros() as usize;
        e += form.flip_delta(x, k);
        x ^= 1 << k;
        stats.push(x, e);
        if let Some(o) = out.as_deref_mut() {
            o[(x - base) as usize] = e as f64 * inv_scale;
        }
    }
    stats
}

fn sweep(form: &IntegerForm, low_bits: usize, energies: Option<&mut [f64]>) -> MinStats {
    let q = form.num_vars();
    let low = low_bits.min(q);
    let chunks = 1u64 << (q - low);
    let stats: Vec<MinStats> = match energies {
        Some(buf) => buf
            .par_chunks_mut(1 << low)
            .enumerate()
            .map(|(c, slice)| sweep_chunk(form, low, c as u64, Some(slice)))
            .collect(),
        None => (0..chunks).into_par_iter().map(|c| sweep_chunk(form, low, c, None)).collect(),
    };
    stats.into_iter().fold(MinStats::empty(), MinStats::merge).finish()
}

/// Energies of all `2^q` basis states, indexed by bitstring value (bit `k` = variable `k`).
/// Entry 0 is the all-zeros state, whose energy is the program offset.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSpectrum {
    q: usize,
    energies: Vec<f64>,
}

impl DiagonalSpectrum {
    pub fn from_energies(energies: Vec<f64>) -> Result<Self> {
        let len = energies.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("spectrum length {len} is not a power of two")));
        }
        Ok(DiagonalSpectrum { q: len.trailing_zeros() as usize, energies })
    }

    pub fn num_qubits(&self) -> usize {
        self.q
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn offset(&self) -> f64 {
        self.energies[0]
    }

    pub fn min(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.energies.iter().sum::<f64>() / self.energies.len() as f64
    }
}

pub fn enumerate_spectrum(p: &QuboProgram, cap: usize) -> Result<DiagonalSpectrum> {
    enumerate_spectrum_chunked(p, cap, CHUNK_BITS)
}

/// As [`enumerate_spectrum`] with an explicit chunk size (`2^low_bits` entries per chunk).
pub fn enumerate_spectrum_chunked(p: &QuboProgram, cap: usize, low_bits: usize) -> Result<DiagonalSpectrum> {
    let q = p.num_vars();
    check_qubit_cap(q, cap, 8)?;
    let form = IntegerForm::new(p)?;
    let mut energies = vec![0.0; 1 << q];
    sweep(&form, low_bits.max(1), Some(&mut energies));
    Ok(DiagonalSpectrum { q, energies })
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub min_energy: f64,
    #[serde(serialize_with = "serialize_rational")]
    pub min_energy_exact: Rational,
    /// Ground states in ascending index order, at most [`ARGMIN_LIST_CAP`].
    pub argmin: Vec<Bitstring>,
    /// Total number of ground states, including any not listed.
    pub degeneracy: u64,
    pub truncated: bool,
    /// Decoding of each listed ground state; empty when the program has no graph instance.
    pub decoded: Vec<DecodedMapping>,
}

pub(crate) fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

/// Exact ground energy and ground states. Needs no `2^q` storage.
pub fn solve_exact(p: &QuboProgram, cap: usize) -> Result<SolveResult> {
    let q = p.num_vars();
    check_qubit_cap(q, cap, 0)?;
    let form = IntegerForm::new(p)?;
    let stats = sweep(&form, CHUNK_BITS, None);
    let min_energy_exact = Rational::new(stats.min, form.scale);
    let argmin: Vec<Bitstring> = stats.argmin.iter().map(|&x| Bitstring::from_index(x, q)).collect();
    let decoded = match p.instance() {
        Some((g1, g2)) => argmin.iter().map(|x| decode(x, p.n(), g1, g2)).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    debug_assert!(!min_energy_exact.is_zero() || stats.count > 0);
    Ok(SolveResult {
        min_energy: stats.min as f64 / form.scale as f64,
        min_energy_exact,
        truncated: stats.count > argmin.len() as u64,
        argmin,
        degeneracy: stats.count,
        decoded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, Graph};
    use crate::qubo::{build, build_calude, Formulation, Weights};
    use std::collections::BTreeMap;

    fn r(x: i64) -> Rational {
        Rational::from_integer(x)
    }

    fn single(offset: i64, lin: i64) -> QuboProgram {
        QuboProgram::from_parts(1, Formulation::Calude, Weights::default(), r(offset), vec![r(lin)], BTreeMap::new())
            .unwrap()
    }

    #[test]
    fn one_variable() {
        let s = enumerate_spectrum(&single(2, 3), 16).unwrap();
        assert_eq!(s.energies(), &[2.0, 5.0]);
        let z = solve_exact(&single(0, 0), 16).unwrap();
        assert_eq!(z.min_energy_exact, r(0));
        assert_eq!(z.degeneracy, 2);
        assert!(!z.truncated);
    }

    #[test]
    fn k3_has_six_ground_states() {
        let k3 = complete_graph(3);
        let p = build_calude(&k3, &k3).unwrap();
        let s = enumerate_spectrum(&p, 16).unwrap();
        assert_eq!(s.energies().iter().filter(|&&e| e == 0.0).count(), 6);
        let res = solve_exact(&p, 16).unwrap();
        assert_eq!(res.degeneracy, 6);
        assert!(res.decoded.iter().all(|d| d.edge_invariant == Some(true)));
    }

    #[test]
    fn gray_code_matches_direct_evaluation() {
        let g1 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let g2 = Graph::new(3, [(0, 2), (1, 2)]).unwrap();
        for f in Formulation::ALL {
            let w = Weights::new(Rational::new(3, 2), Rational::new(5, 3)).unwrap();
            let p = build(f, &g1, &g2, w).unwrap();
            let s = enumerate_spectrum(&p, 16).unwrap();
            for b in 0..1u64 << 9 {
                let exact = p.evaluate(&Bitstring::from_index(b, 9)).unwrap();
                let approx = *exact.numer() as f64 / *exact.denom() as f64;
                assert!((s.energies()[b as usize] - approx).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chunking_does_not_change_result() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = build_calude(&g, &g).unwrap();
        let reference = enumerate_spectrum_chunked(&p, 16, 16).unwrap();
        for low in [1, 3, 7, 12] {
            assert_eq!(enumerate_spectrum_chunked(&p, 16, low).unwrap(), reference);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let k5 = complete_graph(5);
        let p = build_calude(&k5, &k5).unwrap();
        let err = enumerate_spectrum(&p, 16).unwrap_err();
        assert!(matches!(err, Error::QubitCapExceeded { q: 25, cap: 16, .. }));
        assert!(err.to_string().contains("bytes"));
    }

    #[test]
    fn argmin_list_is_capped() {
        // 11 free variables, all energies zero: 2048 ground states.
        let p = QuboProgram::from_parts(1, Formulation::Calude, Weights::default(), r(0), vec![r(0)], BTreeMap::new())
            .unwrap();
        assert_eq!(solve_exact(&p, 16).unwrap().degeneracy, 2);
        let q = 16;
        let lin: Vec<Rational> = (0..q).map(|k| if k < 5 { r(1) } else { r(0) }).collect();
        let p =
            QuboProgram::from_parts(4, Formulation::Calude, Weights::default(), r(0), lin, BTreeMap::new()).unwrap();
        let res = solve_exact(&p, 16).unwrap();
        assert_eq!(res.degeneracy, 2048);
        assert!(res.truncated);
        assert_eq!(res.argmin.len(), ARGMIN_LIST_CAP);
        assert!(res.argmin.windows(2).all(|w| w[0].to_index() < w[1].to_index()));
        assert_eq!(res.argmin[0].to_index(), 0);
    }
}
