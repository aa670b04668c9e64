//! Exact preparation of the linear (sawtooth) state
//! `|L⟩ ∝ Σ_x ((N−1)/2 − x)|x⟩` as an LCU of single-qubit `Z` terms.
//!
//! Registers are laid out `[data (n) | select (a)]`. Data position `k`
//! means the data qubit of bit weight `2^k`.

use serde::Serialize;

use crate::circuit::{Circuit, GateKind, RegisterKind, ResourceEstimate};
use crate::error::{Error, Result};
use crate::estimator;
use crate::sim::{self, StateVector, SynthesisModel};
use crate::widgets::{self, Base, ExponentialSpec};

pub const MIN_QUBITS: usize = 2;
/// Largest register built directly (must be a power of two).
pub const MAX_DIRECT: usize = 16;
/// Largest register reached through reductions.
pub const MAX_QUBITS: usize = 12;

/// Normalised `|L⟩` on `n` qubits.
pub fn linear_target(n: usize) -> Result<StateVector> {
    let size = 1usize << n;
    let mid = (size as f64 - 1.0) / 2.0;
    StateVector::from_real(&(0..size).map(|x| mid - x as f64).collect::<Vec<_>>())
}

fn select_width(n: usize) -> usize {
    estimator::lcu_width(n)
}

/// Qubit holding data position `k` (bit weight `2^k`).
fn position(n: usize, k: usize) -> usize {
    n - 1 - k
}

/// Qubit holding bit `b` (weight `2^b`) of the select register.
fn select_bit(n: usize, a: usize, b: usize) -> usize {
    n + a - 1 - b
}

fn select_gates(c: &mut Circuit, n: usize, a: usize) {
    let mut layers = Vec::new();
    for b in 0..a {
        for p in (0..n).filter(|p| p & (1 << b) == 0) {
            layers.push([select_bit(n, a, b), position(n, p), position(n, p | (1 << b))]);
        }
    }
    for g in &layers {
        c.push(GateKind::CSwap, g);
    }
    c.push(GateKind::Z, &[position(n, 0)]);
    for g in layers.iter().rev() {
        c.push(GateKind::CSwap, g);
    }
}

/// `Σ_k |k⟩⟨k| ⊗ Z_k`: controlled-SWAP layers route data position `k` to
/// position 0, apply `Z`, and route back.
pub fn build_select_z(n: usize) -> Result<Circuit> {
    if n == 0 || !n.is_power_of_two() || n > MAX_DIRECT {
        return Err(Error::OutOfRange(format!(
            "SELECT needs a power-of-two register of at most {MAX_DIRECT}, got {n}"
        )));
    }
    let a = select_width(n);
    let mut c = Circuit::with_registers(&[
        ("data", n, RegisterKind::Data),
        ("select", a, RegisterKind::CleanAncilla),
    ])?;
    select_gates(&mut c, n, a);
    c.set_ledger(
        ResourceEstimate::deterministic(2.0 * (a * n) as f64, 4.0 * a as f64).with_ancilla(a, 0),
    );
    Ok(c)
}

/// Data qubits to flip after measuring the select register in outcome `s`.
pub fn correction_pattern(n: usize, s: usize) -> Vec<usize> {
    (0..n).filter(|&k| (s & k).count_ones() % 2 == 1).map(|k| position(n, k)).collect()
}

fn check_direct(n: usize) -> Result<()> {
    if n < MIN_QUBITS || !n.is_power_of_two() || n > MAX_DIRECT {
        return Err(Error::OutOfRange(format!(
            "direct linear state needs a power of two in [{MIN_QUBITS}, {MAX_DIRECT}], got {n}"
        )));
    }
    Ok(())
}

fn main_circuit(n: usize, corrected: bool) -> Result<Circuit> {
    check_direct(n)?;
    let a = select_width(n);
    let mut c = Circuit::with_registers(&[
        ("data", n, RegisterKind::Data),
        ("select", a, RegisterKind::CleanAncilla),
    ])?;
    let sel: Vec<usize> = (n..n + a).collect();
    // the injected state weights 2^{-s}; reversing gives weight ∝ 2^k on term k
    for &q in &sel {
        c.push(GateKind::X, &[q]);
    }
    for q in 0..n {
        c.push(GateKind::H, &[q]);
    }
    select_gates(&mut c, n, a);
    for &q in &sel {
        c.push(GateKind::H, &[q]);
    }
    if corrected {
        for b in 0..a {
            for k in (0..n).filter(|k| k & (1 << b) != 0) {
                c.push(GateKind::CX, &[select_bit(n, a, b), position(n, k)]);
            }
        }
        for &q in &sel {
            c.push(GateKind::H, &[q]);
        }
    }
    Ok(c)
}

/// Linear-state preparation: the injected exponential state, the LCU
/// circuit on the next power of two, then reductions down to `n`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearProgram {
    pub n: usize,
    /// Register the LCU circuit is built on.
    pub size: usize,
    #[serde(skip)]
    pub circuit: Circuit,
    pub exponential: ExponentialSpec,
    pub reductions: usize,
    pub ledger: ResourceEstimate,
    /// Ancilla total quoted for the construction.
    pub ancilla_reference: usize,
}

impl LinearProgram {
    /// Data in `|0…0⟩`, select register in the exponential state produced
    /// by the widgets.
    pub fn input_state(&self) -> Result<StateVector> {
        let prog = widgets::build_exponential(&self.exponential)?;
        let (sel, _) = prog.simulate()?;
        StateVector::zero(self.size).tensor(&sel)
    }

    /// Output of the LCU circuit over data and select registers.
    pub fn run_circuit(&self) -> Result<StateVector> {
        sim::run(&self.circuit, &self.input_state()?, &SynthesisModel::exact())
    }

    /// The `n`-qubit output and the probability that every reduction
    /// succeeded.
    pub fn simulate(&self) -> Result<(StateVector, f64)> {
        let out = self.run_circuit()?;
        let sel = self.circuit.qubits_of("select");
        let (mut state, p) = sim::project_out(&out, &sel, &vec![false; sel.len()])?;
        if (p - 1.0).abs() > 1e-9 {
            return Err(Error::NotLinearState(1.0 - p));
        }
        let mut prob = 1.0;
        for _ in 0..self.reductions {
            let (s, p) = reduce_linear(&state)?;
            state = s;
            prob *= p;
        }
        Ok((state, prob))
    }
}

/// Probability that one reduction from `n` qubits succeeds.
pub fn reduction_success(n: usize) -> f64 {
    let size = 2f64.powi(n as i32);
    1.0 - 3.0 / (size * size - 1.0)
}

pub fn build_linear(n: usize) -> Result<LinearProgram> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) && !(n.is_power_of_two() && n <= MAX_DIRECT && n >= MIN_QUBITS) {
        return Err(Error::OutOfRange(format!("linear state on {n} qubits")));
    }
    let size = n.next_power_of_two();
    let circuit = main_circuit(size, true)?;
    let a = select_width(size);
    let exponential = ExponentialSpec::new(a, Base::Half)?;
    let success: f64 = (n + 1..=size).map(reduction_success).product();
    let depth = estimator::linear_t_depth(n)?;
    let ledger = ResourceEstimate::repeated(estimator::linear_t_count(n)?, depth, success)
        .with_ancilla(a, exponential.ancilla_count());
    let mut circuit = circuit;
    circuit.set_ledger(ledger);
    Ok(LinearProgram {
        n,
        size,
        circuit,
        exponential,
        reductions: size - n,
        ledger,
        ancilla_reference: estimator::linear_ancilla_reference(n),
    })
}

/// The LCU circuit without the coherent correction, for checking every
/// measured select outcome.
pub fn build_linear_uncorrected(n: usize) -> Result<LinearProgram> {
    let mut p = build_linear(n)?;
    if p.reductions != 0 {
        return Err(Error::OutOfRange("uncorrected circuit needs a power of two".into()));
    }
    let ledger = p.ledger;
    p.circuit = main_circuit(n, false)?;
    p.circuit.set_ledger(ledger);
    Ok(p)
}

/// Hadamard on the least significant qubit of `|L⟩` on `n` qubits and
/// keep outcome 0, leaving `|L⟩` on `n − 1` qubits.
pub fn reduce_linear(state: &StateVector) -> Result<(StateVector, f64)> {
    let n = state.qubits();
    if n < MIN_QUBITS {
        return Err(Error::OutOfRange("reduction needs at least two qubits".into()));
    }
    let d = sim::distance(state, &linear_target(n)?)?;
    if d > 1e-9 {
        return Err(Error::NotLinearState(d));
    }
    let mut c = Circuit::new(n);
    c.push(GateKind::H, &[n - 1]);
    let out = sim::run(&c, state, &SynthesisModel::exact())?;
    sim::project_out(&out, &[n - 1], &[false])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn select_on_two_qubits() {
        let c = build_select_z(2).unwrap();
        let u = sim::unitary_of(&c).unwrap();
        // layout: data x1 x0, select k
        for x in 0..4usize {
            for k in 0..2usize {
                let idx = (x << 1) | k;
                let bit = (x >> k) & 1;
                let expected = if bit == 1 { -1.0 } else { 1.0 };
                assert!((u.get(idx, idx) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
        assert!(u.max_off_diagonal() < 1e-12);
        assert_eq!(build_select_z(4).unwrap().ledger().t_depth, 8.0);
        assert!(build_select_z(3).is_err());
    }

    #[test]
    fn select_is_controlled_z_for_every_term() {
        for n in [1usize, 2, 4, 8] {
            let c = build_select_z(n).unwrap();
            let a = select_width(n);
            let u = sim::unitary_of(&c).unwrap();
            for i in 0..u.dim() {
                let x = i >> a;
                let k = i & ((1 << a) - 1);
                let sign = if (x >> k) & 1 == 1 { -1.0 } else { 1.0 };
                for j in 0..u.dim() {
                    let expected = if i == j { sign } else { 0.0 };
                    assert!((u.get(i, j) - C64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linear_examples() {
        let t = linear_target(2).unwrap();
        let s5 = 5f64.sqrt();
        for (a, e) in t.amps().iter().zip([1.5, 0.5, -0.5, -1.5]) {
            assert!((a.re - e / s5).abs() < 1e-15);
        }
        let t3 = linear_target(3).unwrap();
        let diffs: Vec<f64> = t3.amps().windows(2).map(|w| w[1].re - w[0].re).collect();
        assert!(diffs.iter().all(|d| (d - diffs[0]).abs() < 1e-15));
        assert_eq!(build_linear(8).unwrap().ledger.expected_t_depth, 28.0);
    }

    #[test]
    fn linear_exact_for_powers_of_two() {
        for n in [2usize, 4, 8] {
            let p = build_linear(n).unwrap();
            let out = p.run_circuit().unwrap();
            let sel = p.circuit.qubits_of("select");
            let probs = sim::outcome_probabilities(&out, &sel).unwrap();
            assert!((probs[0] - 1.0).abs() < 1e-12);
            let (s, prob) = p.simulate().unwrap();
            assert_eq!(prob, 1.0);
            assert!(sim::distance_raw(&s, &linear_target(n).unwrap()).unwrap() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn every_outcome_is_correctable() {
        for n in [2usize, 4] {
            let p = build_linear_uncorrected(n).unwrap();
            let out = p.run_circuit().unwrap();
            let sel = p.circuit.qubits_of("select");
            let a = sel.len();
            for s in 0..(1usize << a) {
                let bits: Vec<bool> = (0..a).map(|i| (s >> (a - 1 - i)) & 1 == 1).collect();
                let (data, _) = sim::project_out(&out, &sel, &bits).unwrap();
                let mut fix = Circuit::new(n);
                for q in correction_pattern(n, s) {
                    fix.push(GateKind::X, &[q]);
                }
                let fixed = sim::run(&fix, &data, &SynthesisModel::exact()).unwrap();
                assert!(sim::distance(&fixed, &linear_target(n).unwrap()).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn reductions() {
        let (s, p) = reduce_linear(&linear_target(3).unwrap()).unwrap();
        assert!((1.0 - p - 3.0 / 63.0).abs() < 1e-12);
        assert!(sim::distance_raw(&s, &linear_target(2).unwrap()).unwrap() < 1e-12);
        let (s, _) = reduce_linear(&linear_target(2).unwrap()).unwrap();
        let expected = StateVector::from_real(&[1.0, -1.0]).unwrap();
        assert!(sim::distance_raw(&s, &expected).unwrap() < 1e-12);
        let probs: Vec<f64> = (2..10).map(reduction_success).collect();
        assert!(probs.windows(2).all(|w| w[1] > w[0]));
        assert!(reduce_linear(&StateVector::zero(3)).is_err());
    }

    #[test]
    fn non_power_of_two() {
        for n in [3usize, 5, 6] {
            let p = build_linear(n).unwrap();
            let (s, prob) = p.simulate().unwrap();
            assert!(sim::distance_raw(&s, &linear_target(n).unwrap()).unwrap() < 1e-12);
            assert!((prob - p.ledger.success_prob).abs() < 1e-12);
        }
        assert!(build_linear(1).is_err());
        assert!(build_linear(13).is_err());
        assert!(build_linear(16).is_ok());
    }
}
