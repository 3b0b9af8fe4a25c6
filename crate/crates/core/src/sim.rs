//! Statevector simulation of the QAOA circuit over a diagonal cost Hamiltonian
//! and of the RY + CZ hardware-efficient ansatz.
//!
//! Qubit `k` is bit `k` of the amplitude index, matching variable `k` of the
//! QUBO program. Gate conventions:
//!
//! * phase layer: amplitude `b` picks up `exp(-i·α·E_b)`;
//! * mixer layer: `exp(-iβ·H_m)` with `H_m = -Σ X_j`, i.e. `exp(iβX)` =
//!   `[[cos β, i sin β], [i sin β, cos β]]` on every qubit;
//! * `RY(θ) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`;
//! * `CZ` negates amplitudes whose two bits are both 1.
//!
//! Gates mutate the state in place.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{check_qubit_cap, DiagonalSpectrum};
use crate::qubo::Bitstring;

/// Below this many amplitudes gates run sequentially.
const PAR_THRESHOLD: usize = 1 << 14;

type Gate = [[Complex64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    q: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `q` qubits.
    pub fn zero(q: usize, cap: usize) -> Result<Self> {
        check_qubit_cap(q, cap, 16)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << q];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { q, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(q: usize, index: u64, cap: usize) -> Result<Self> {
        let mut s = StateVector::zero(q, cap)?;
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Normalizes `amps`, which must have power-of-two length.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("{len} amplitudes is not a power of two")));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        Ok(StateVector { q: len.trailing_zeros() as usize, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn num_qubits(&self) -> usize {
        self.q
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, k: usize) -> Result<()> {
        if k >= self.q {
            return Err(Error::QubitIndex { index: k, q: self.q });
        }
        Ok(())
    }

    fn check_spectrum(&self, spec: &DiagonalSpectrum) -> Result<()> {
        if spec.num_qubits() != self.q {
            return Err(Error::DimensionMismatch { state: self.q, operator: spec.num_qubits() });
        }
        Ok(())
    }

    fn apply_1q(&mut self, k: usize, m: &Gate) {
        let stride = 1usize << k;
        let kernel = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_chunks_mut(stride << 1).for_each(kernel);
        } else {
            self.amps.chunks_mut(stride << 1).for_each(kernel);
        }
    }

    /// `exp(-i·alpha·H_o)` for the diagonal `H_o` given by `spec`.
    pub fn apply_phase(&mut self, spec: &DiagonalSpectrum, alpha: f64) -> Result<&mut Self> {
        self.check_spectrum(spec)?;
        let kernel = |(a, &e): (&mut Complex64, &f64)| *a *= Complex64::from_polar(1.0, -alpha * e);
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_iter_mut().zip(spec.energies().par_iter()).for_each(kernel);
        } else {
            self.amps.iter_mut().zip(spec.energies()).for_each(kernel);
        }
        Ok(self)
    }

    /// `exp(-i·beta·H_m)` with `H_m = -Σ_j X_j`.
    pub fn apply_mixer(&mut self, beta: f64) -> &mut Self {
        let (s, c) = beta.sin_cos();
        let diag = Complex64::new(c, 0.0);
        let off = Complex64::new(0.0, s);
        let m = [[diag, off], [off, diag]];
        for k in 0..self.q {
            self.apply_1q(k, &m);
        }
        self
    }

    pub fn apply_ry(&mut self, qubit: usize, angle: f64) -> Result<&mut Self> {
        self.check_qubit(qubit)?;
        let (s, c) = (angle / 2.0).sin_cos();
        let m = [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]];
        self.apply_1q(qubit, &m);
        Ok(self)
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<&mut Self> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::InvalidArgument(format!("CZ needs two distinct qubits, got {q1} twice")));
        }
        let mask = (1usize << q1) | (1usize << q2);
        for (b, a) in self.amps.iter_mut().enumerate() {
            if b & mask == mask {
                *a = -*a;
            }
        }
        Ok(self)
    }
}

/// `|+⟩^⊗q`.
pub fn plus_state(q: usize, cap: usize) -> Result<StateVector> {
    check_qubit_cap(q, cap, 16)?;
    let a = Complex64::new((-(q as f64) / 2.0).exp2(), 0.0);
    Ok(StateVector { q, amps: vec![a; 1 << q] })
}

/// `Σ_b |a_b|² E_b`.
pub fn expectation(s: &StateVector, spec: &DiagonalSpectrum) -> Result<f64> {
    s.check_spectrum(spec)?;
    Ok(s.amps.iter().zip(spec.energies()).map(|(a, e)| a.norm_sqr() * e).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != betas.len() {
            return Err(Error::InvalidArgument(format!(
                "need L ≥ 1 phase and mixer angles of equal count, got {} and {}",
                alphas.len(),
                betas.len()
            )));
        }
        Ok(QaoaParams { alphas, betas })
    }

    pub fn single(alpha: f64, beta: f64) -> Self {
        QaoaParams { alphas: vec![alpha], betas: vec![beta] }
    }

    /// Splits `[α_1..α_L, β_1..β_L]`.
    pub fn from_flat(theta: &[f64]) -> Result<Self> {
        if !theta.len().is_multiple_of(2) {
            return Err(Error::ParameterCount { expected: theta.len() + 1, got: theta.len() });
        }
        let (a, b) = theta.split_at(theta.len() / 2);
        QaoaParams::new(a.to_vec(), b.to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.alphas.iter().chain(&self.betas).copied().collect()
    }

    pub fn layers(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// `∏_k exp(-iβ_k H_m) exp(-iα_k H_o) |+⟩^⊗q`, layer 1 applied first.
pub fn qaoa_state(spec: &DiagonalSpectrum, params: &QaoaParams) -> Result<StateVector> {
    let mut s = plus_state(spec.num_qubits(), usize::MAX)?;
    for (&a, &b) in params.alphas.iter().zip(&params.betas) {
        s.apply_phase(spec, a)?;
        s.apply_mixer(b);
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entanglement {
    /// CZ on `(k, k+1)` for `k = 0..q-2`.
    Linear,
}

/// RY rotation layers interleaved with a CZ entangling pattern; `reps`
/// entangling blocks and one closing rotation layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzLayout {
    pub num_qubits: usize,
    pub reps: usize,
    pub entanglement: Entanglement,
}

impl AnsatzLayout {
    pub const DEFAULT_REPS: usize = 5;

    pub fn linear(num_qubits: usize, reps: usize) -> Self {
        AnsatzLayout { num_qubits, reps, entanglement: Entanglement::Linear }
    }

    pub fn param_count(&self) -> usize {
        self.num_qubits * (self.reps + 1)
    }

    fn entangling_pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        match self.entanglement {
            Entanglement::Linear => (0..self.num_qubits.saturating_sub(1)).map(|k| (k, k + 1)),
        }
    }
}

/// Prepares the ansatz state from `|0…0⟩`. `theta[r*q + k]` drives qubit `k`
/// in rotation layer `r`; layer `reps` is the closing layer.
pub fn twolocal_state(layout: &AnsatzLayout, theta: &[f64]) -> Result<StateVector> {
    if theta.len() != layout.param_count() {
        return Err(Error::ParameterCount { expected: layout.param_count(), got: theta.len() });
    }
    let q = layout.num_qubits;
    let mut s = StateVector::zero(q, usize::MAX)?;
    for (r, layer) in theta.chunks(q.max(1)).enumerate() {
        for (k, &angle) in layer.iter().enumerate() {
            s.apply_ry(k, angle)?;
        }
        if r < layout.reps {
            for (a, b) in layout.entangling_pairs() {
                s.apply_cz(a, b)?;
            }
        }
    }
    Ok(s)
}

/// The `k` most probable basis states, descending probability, ties by ascending index.
pub fn top_amplitudes(s: &StateVector, k: usize) -> Vec<(Bitstring, f64)> {
    let probs = s.probabilities();
    let k = k.min(probs.len());
    if k == 0 {
        return Vec::new();
    }
    let order = |a: &usize, b: &usize| probs[*b].total_cmp(&probs[*a]).then(a.cmp(b));
    let mut idx: Vec<usize> = (0..probs.len()).collect();
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, order);
        idx.truncate(k);
    }
    idx.sort_unstable_by(order);
    idx.into_iter().map(|i| (Bitstring::from_index(i as u64, s.q), probs[i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const CAP: usize = 16;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn plus_states() {
        let s = plus_state(1, CAP).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, Complex64::new(FRAC_1_SQRT_2, 0.0), 1e-15)));
        let s = plus_state(2, CAP).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, Complex64::new(0.5, 0.0), 1e-15)));
        for q in 1..=16 {
            assert!((plus_state(q, CAP).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
        assert!(plus_state(17, CAP).is_err());
    }

    #[test]
    fn phase_and_mixer_identities() {
        let spec = DiagonalSpectrum::from_energies(vec![0.0, 1.0, 3.0, -2.0]).unwrap();
        let mut s = plus_state(2, CAP).unwrap();
        s.apply_ry(0, 0.3).unwrap();
        let before = s.clone();
        s.apply_phase(&spec, 0.0).unwrap();
        s.apply_mixer(0.0);
        assert_eq!(s, before);

        let flat = DiagonalSpectrum::from_energies(vec![2.5; 4]).unwrap();
        s.apply_phase(&flat, 1.1).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-14);
        }

        let mut p = plus_state(3, CAP).unwrap();
        p.apply_mixer(0.77);
        assert!(p.probabilities().iter().all(|&x| (x - 0.125).abs() < 1e-14));

        let wrong = DiagonalSpectrum::from_energies(vec![0.0; 8]).unwrap();
        assert!(matches!(s.apply_phase(&wrong, 1.0), Err(Error::DimensionMismatch { state: 2, operator: 3 })));
    }

    #[test]
    fn single_qubit_qaoa_by_hand() {
        // |+⟩ → diag(1, e^{-iπ/2}) → [[c, is], [is, c]] with c = s = 1/√2.
        let spec = DiagonalSpectrum::from_energies(vec![0.0, 1.0]).unwrap();
        let s = qaoa_state(&spec, &QaoaParams::single(PI / 2.0, PI / 4.0)).unwrap();
        let h = FRAC_1_SQRT_2;
        let v0 = Complex64::new(h, 0.0);
        let v1 = Complex64::new(0.0, -h);
        let c = Complex64::new(h, 0.0);
        let i_s = Complex64::new(0.0, h);
        let expected = [c * v0 + i_s * v1, i_s * v0 + c * v1];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!(close(*a, e, 1e-14), "{a} vs {e}");
        }
    }

    #[test]
    fn qaoa_with_zero_mixer_keeps_uniform_probabilities() {
        let spec = DiagonalSpectrum::from_energies((0..8).map(|x| x as f64).collect()).unwrap();
        let s = qaoa_state(&spec, &QaoaParams::single(0.9, 0.0)).unwrap();
        assert!(s.probabilities().iter().all(|&p| (p - 0.125).abs() < 1e-14));
        let s = qaoa_state(&spec, &QaoaParams::single(0.0, 0.0)).unwrap();
        assert_eq!(s, plus_state(3, CAP).unwrap());
    }

    #[test]
    fn expectation_examples() {
        let spec = DiagonalSpectrum::from_energies(vec![1.0, 4.0, -2.0, 7.0]).unwrap();
        assert!((expectation(&plus_state(2, CAP).unwrap(), &spec).unwrap() - 2.5).abs() < 1e-14);
        for b in 0..4 {
            let s = StateVector::basis(2, b, CAP).unwrap();
            assert_eq!(expectation(&s, &spec).unwrap(), spec.energies()[b as usize]);
        }
        for beta in [0.1, 1.0, 2.5] {
            let s = qaoa_state(&spec, &QaoaParams::single(0.0, beta)).unwrap();
            assert!((expectation(&s, &spec).unwrap() - spec.mean()).abs() < 1e-12);
        }
    }

    #[test]
    fn ry_and_cz() {
        let mut s = StateVector::zero(1, CAP).unwrap();
        s.apply_ry(0, PI).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::new(1.0, 0.0), 1e-15));
        assert!(s.amplitudes()[0].norm() < 1e-15);

        let mut s = StateVector::basis(2, 0b11, CAP).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s.amplitudes()[3], Complex64::new(-1.0, 0.0));
        let mut s = StateVector::basis(2, 0b01, CAP).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s.amplitudes()[1], Complex64::new(1.0, 0.0));

        let mut s = plus_state(3, CAP).unwrap();
        s.apply_ry(1, 0.4).unwrap();
        let before = s.clone();
        s.apply_ry(2, 1.3).unwrap().apply_ry(2, -1.3).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!(close(*a, *b, 1e-12));
        }
        assert!(matches!(s.apply_ry(3, 0.1), Err(Error::QubitIndex { index: 3, q: 3 })));
        assert!(s.apply_cz(1, 1).is_err());
        assert!(s.apply_cz(0, 5).is_err());
    }

    #[test]
    fn twolocal_examples() {
        let layout = AnsatzLayout::linear(3, 5);
        assert_eq!(layout.param_count(), 18);
        let s = twolocal_state(&layout, &[0.0; 18]).unwrap();
        assert_eq!(s, StateVector::zero(3, CAP).unwrap());

        let s = twolocal_state(&AnsatzLayout::linear(1, 0), &[PI / 2.0]).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new((PI / 4.0).cos(), 0.0), 1e-15));
        assert!(close(s.amplitudes()[1], Complex64::new((PI / 4.0).sin(), 0.0), 1e-15));

        assert!(matches!(twolocal_state(&layout, &[0.0; 17]), Err(Error::ParameterCount { expected: 18, got: 17 })));
    }

    #[test]
    fn top_amplitude_ordering() {
        let s = StateVector::basis(3, 5, CAP).unwrap();
        let top = top_amplitudes(&s, 1);
        assert_eq!(top[0].0.to_index(), 5);
        assert_eq!(top[0].1, 1.0);

        let p = plus_state(4, CAP).unwrap();
        let top = top_amplitudes(&p, 3);
        assert_eq!(top.iter().map(|(b, _)| b.to_index()).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(top.iter().all(|(_, pr)| (pr - 1.0 / 16.0).abs() < 1e-15));

        let s = StateVector::from_amplitudes(vec![
            Complex64::new(0.1, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.7, 0.0),
        ])
        .unwrap();
        let top = top_amplitudes(&s, 4);
        assert_eq!(top.iter().map(|(b, _)| b.to_index()).collect::<Vec<_>>(), vec![3, 1, 2, 0]);
        assert!(top.iter().map(|(_, p)| p).sum::<f64>() <= 1.0 + 1e-10);
    }
}
