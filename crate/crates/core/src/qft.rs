//! Exact and approximate quantum Fourier transforms.
//!
//! Convention: `QFT|j⟩ = N^{-1/2} Σ_k ω^{jk} |k⟩` with `ω = e^{2πi/N}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::circuit::{Circuit, GateKind, ResourceEstimate};
use crate::error::{Error, Result};
use crate::estimator;
use crate::linear;
use crate::sim::{self, DenseMatrix, StateVector, SynthesisModel, UNITARY_CAP};
use crate::C64;

/// Layers `l < SYNTH_FROM` (Hadamard, controlled-S, controlled-T) are exact.
pub const SYNTH_FROM: usize = 3;
pub const MAX_DELTA: f64 = 0.1;

/// Dense QFT matrix.
pub fn exact_qft(n: usize) -> Result<DenseMatrix> {
    if n > UNITARY_CAP {
        return Err(Error::CapExceeded { what: "QFT matrix", qubits: n, cap: UNITARY_CAP });
    }
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    let roots: Vec<C64> =
        (0..dim).map(|t| C64::from_polar(scale, 2.0 * PI * t as f64 / dim as f64)).collect();
    Ok(DenseMatrix::from_fn(dim, |j, k| roots[(j * k) % dim]))
}

/// QFT applied to a state vector by FFT.
pub fn qft_state(state: &StateVector) -> StateVector {
    let dim = state.dim();
    let mut buf = state.amps().to_vec();
    // the inverse transform carries the e^{+2πi jk/N} kernel
    FftPlanner::new().plan_fft_inverse(dim).process(&mut buf);
    let scale = 1.0 / (dim as f64).sqrt();
    buf.iter_mut().for_each(|a| *a *= scale);
    StateVector::from_amplitudes(buf).expect("same dimension")
}

fn qft_gates(c: &mut Circuit, n: usize, delta: Option<f64>) {
    for j in 0..n {
        c.push(GateKind::H, &[j]);
        for l in 1..n - j {
            let angle = 2.0 * PI / 2f64.powi(l as i32 + 1);
            let synth = if l >= SYNTH_FROM { delta } else { None };
            c.push_rotation(GateKind::CPhase(angle), &[j + l, j], synth);
        }
    }
    for i in 0..n / 2 {
        c.push(GateKind::Swap, &[i, n - 1 - i]);
    }
}

fn ledger(n: usize, delta: f64) -> Result<ResourceEstimate> {
    Ok(ResourceEstimate::deterministic(
        estimator::qft_t_count(n, delta)?,
        estimator::qft_t_depth(n, delta)?,
    ))
}

/// Textbook QFT with every rotation exact. Only below three qubits is
/// this a Clifford+T circuit, so only then is the ledger filled in.
pub fn build_exact_qft(n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    qft_gates(&mut c, n, None);
    if n < SYNTH_FROM {
        c.set_ledger(ledger(n, MAX_DELTA)?);
    }
    Ok(c)
}

/// QFT whose rotations beyond the controlled-T layer are synthesized with
/// accuracy δ. Below three qubits nothing is synthesized and the exact
/// circuit is returned.
pub fn build_approx_qft(n: usize, delta: f64) -> Result<Circuit> {
    if !(delta > 0.0 && delta <= MAX_DELTA) {
        return Err(Error::OutOfRange(format!("δ = {delta} outside (0, {MAX_DELTA}]")));
    }
    let mut c = Circuit::new(n);
    qft_gates(&mut c, n, Some(delta));
    c.set_ledger(ledger(n, delta)?);
    Ok(c)
}

/// QFT gates on a sub-register, appended to an existing circuit.
pub(crate) fn append_qft(c: &mut Circuit, qubits: &[usize], delta: Option<f64>) {
    let n = qubits.len();
    let mut local = Circuit::new(n);
    qft_gates(&mut local, n, delta);
    for g in local.gates() {
        let qs: Vec<usize> = g.qubits.iter().map(|&q| qubits[q]).collect();
        c.push_rotation(g.kind, &qs, g.delta);
    }
}

/// `QFT|L⟩` in closed form: `√(3/(N²−1)) (1 + i cot(πk/N))` for `k ≥ 1`.
pub fn cotangent_amplitudes(n: usize) -> Vec<C64> {
    let size = 1usize << n;
    let nf = size as f64;
    let scale = (3.0 / (nf * nf - 1.0)).sqrt();
    (0..size)
        .map(|k| {
            if k == 0 {
                C64::new(0.0, 0.0)
            } else {
                let cot = 1.0 / (PI * k as f64 / nf).tan();
                C64::new(scale, scale * cot)
            }
        })
        .collect()
}

/// The same state written as `√(12/(N²−1)) Σ_k (ω^k − 1)^{-1}|k⟩`; equal to
/// [`cotangent_amplitudes`] up to a global sign.
pub fn cotangent_amplitudes_omega(n: usize) -> Vec<C64> {
    let size = 1usize << n;
    let nf = size as f64;
    let scale = (12.0 / (nf * nf - 1.0)).sqrt();
    (0..size)
        .map(|k| {
            if k == 0 {
                C64::new(0.0, 0.0)
            } else {
                let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / nf);
                scale / (w - 1.0)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorMeasurement {
    pub n: usize,
    pub delta: f64,
    pub seeds: usize,
    pub mean: f64,
    pub predicted: f64,
}

impl ErrorMeasurement {
    pub fn ratio(&self) -> f64 {
        self.mean / self.predicted
    }
}

fn perturbed(seed: u64, delta: f64) -> SynthesisModel {
    SynthesisModel::perturbed(seed).with_delta(delta)
}

/// Mean `‖QFT_δ|L⟩ − QFT|L⟩‖` over perturbed instances, with the
/// prediction `(n/2 − 4/3)δ`.
pub fn measure_state_error(n: usize, delta: f64, seeds: usize, base_seed: u64) -> Result<ErrorMeasurement> {
    if !(linear::MIN_QUBITS..=12).contains(&n) {
        return Err(Error::OutOfRange(format!("state error measured for n in [2, 12], got {n}")));
    }
    let circuit = build_approx_qft(n, if delta > 0.0 { delta.min(MAX_DELTA) } else { MAX_DELTA })?;
    let input = linear::linear_target(n)?;
    let exact = qft_state(&input);
    let dists = (0..seeds as u64)
        .into_par_iter()
        .map(|s| {
            let out = sim::run(&circuit, &input, &perturbed(base_seed.wrapping_add(s), delta))?;
            sim::distance_raw(&out, &exact)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ErrorMeasurement {
        n,
        delta,
        seeds,
        mean: dists.iter().sum::<f64>() / seeds.max(1) as f64,
        predicted: estimator::qft_state_error(n, delta),
    })
}

/// Which product the conjugation error compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Conjugation {
    /// `QFT · C · QFT`, the form the diagonal encoding circuit uses.
    Forward,
    /// `QFT · C · QFT†`.
    Adjoint,
}

/// Mean spectral-norm deviation of a perturbed QFT conjugation of the
/// unit-norm linear circulant, with the prediction `(2/3) n δ`.
pub fn measure_conjugation_error(
    n: usize,
    delta: f64,
    seeds: usize,
    base_seed: u64,
    form: Conjugation,
) -> Result<ErrorMeasurement> {
    if !(1..=8).contains(&n) {
        return Err(Error::OutOfRange(format!("conjugation error measured for n ≤ 8, got {n}")));
    }
    let c = crate::circulant::unit_circulant(n)?;
    let circuit = build_approx_qft(n, if delta > 0.0 { delta.min(MAX_DELTA) } else { MAX_DELTA })?;
    let conj = |u: &DenseMatrix| -> Result<DenseMatrix> {
        let right = match form {
            Conjugation::Forward => u.clone(),
            Conjugation::Adjoint => u.adjoint(),
        };
        u.mul(&c)?.mul(&right)
    };
    let exact = conj(&exact_qft(n)?)?;
    let dists = (0..seeds as u64)
        .map(|s| {
            let u = sim::unitary_of_with(&circuit, &perturbed(base_seed.wrapping_add(s), delta), UNITARY_CAP)?;
            sim::matrix_distance(&conj(&u)?, &exact)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ErrorMeasurement {
        n,
        delta,
        seeds,
        mean: dists.iter().sum::<f64>() / seeds.max(1) as f64,
        predicted: 2.0 / 3.0 * n as f64 * delta,
    })
}
