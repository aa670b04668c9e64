//! Harmonic-sequence state preparation: the linear state on `n + m`
//! qubits, a QFT, and an amendment that separates the two cotangent
//! asymptotes so post-selecting the `m` ancillas leaves `≈ i|h⟩`.
//!
//! Main-circuit layout is `[ancilla (m) | data (n)]`, so basis index
//! `k = a·N + x` and the low-frequency cotangent branch sits at `a = 0`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::circuit::{Circuit, GateKind, RegisterKind, ResourceEstimate};
use crate::error::{Error, Result};
use crate::estimator;
use crate::linear;
use crate::qft;
use crate::sim::{self, StateVector, SynthesisModel};
use crate::C64;

pub use crate::estimator::{optimize_state, StatePlan};

/// Phase applied to the top ancilla before the combining Hadamard. Chosen
/// from `{1, −1, i, −i}` by [`scan_combine_phase`].
pub const COMBINE_PHASE: C64 = C64 { re: -1.0, im: 0.0 };

/// Above this many data amplitudes the success probability uses its
/// asymptotic expansion.
const EXACT_SUM_LIMIT: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Single,
    Combined,
}

/// `|h⟩ ∝ Σ_{x≥1} 1/x |x⟩`.
pub fn harmonic_target(n: usize) -> Result<StateVector> {
    let size = 1usize << n;
    StateVector::from_real(
        &(0..size).map(|x| if x == 0 { 0.0 } else { 1.0 / x as f64 }).collect::<Vec<_>>(),
    )
}

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

/// Largest `n + m` for the analytic targets; only `2^n` amplitudes are
/// stored, so `m` is limited by floating-point resolution alone.
pub const MAX_TOTAL_QUBITS: usize = 60;

fn check_qubits(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > sim::STATE_CAP || n + m > MAX_TOTAL_QUBITS {
        return Err(Error::OutOfRange(format!("n = {n}, m = {m}")));
    }
    Ok(())
}

/// The cotangent state the pipeline approximates.
pub fn cotangent_target(n: usize, m: usize, variant: Variant) -> Result<StateVector> {
    check_qubits(n, m)?;
    let q = 2f64.powi((n + m) as i32);
    let amps = (0..1usize << n)
        .map(|x| {
            let c = cot(PI * x as f64 / q);
            match (variant, x) {
                (Variant::Single, 0) => C64::new(0.0, 0.0),
                (Variant::Single, _) => C64::new(1.0, c),
                (Variant::Combined, 0) => C64::new(0.5, 0.0),
                (Variant::Combined, _) => C64::new(0.0, c),
            }
        })
        .collect();
    StateVector::normalized(amps)
}

/// The branch left on the all-ones ancilla outcome of the single variant.
pub fn second_asymptote_target(n: usize, m: usize) -> Result<StateVector> {
    check_qubits(n, m)?;
    let q = 2f64.powi((n + m) as i32);
    let amps = (0..1usize << n)
        .map(|z| if z == 0 { C64::new(-1.0, 0.0) } else { C64::new(1.0, -cot(PI * z as f64 / q)) })
        .collect();
    StateVector::normalized(amps)
}

/// `‖c − i h‖` for the chosen variant.
pub fn lemma_distance(n: usize, m: usize, variant: Variant) -> Result<f64> {
    let c = cotangent_target(n, m, variant)?;
    let ih = harmonic_target(n)?.scaled(C64::i());
    sim::distance_raw(&c, &ih)
}

/// Predicted `‖c − i h‖`.
pub fn lemma_fit(n: usize, m: usize, variant: Variant) -> f64 {
    let (n, m) = (n as f64, m as f64);
    match variant {
        Variant::Single => 6f64.sqrt() / 2f64.powf(n / 2.0 + m),
        Variant::Combined => 3f64.sqrt() / 2f64.powf(n + m + 0.5),
    }
}

/// Smallest `m` whose lemma distance is at most `epsilon`.
pub fn ancilla_threshold(n: usize, epsilon: f64, variant: Variant) -> Result<usize> {
    (0..=MAX_TOTAL_QUBITS.saturating_sub(n))
        .find_map(|m| match lemma_distance(n, m, variant) {
            Ok(d) if d <= epsilon => Some(Ok(m)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .unwrap_or_else(|| Err(Error::Infeasible(format!("no m reaches {epsilon:e} for n = {n}"))))
}

/// Probability that post-selecting the ancillas on zero succeeds.
pub fn success_probability(n: usize, m: usize, combine: bool) -> f64 {
    let nn = 1usize << n.min(62);
    let q = 2f64.powi((n + m) as i32);
    if nn > EXACT_SUM_LIMIT {
        let nf = 2f64.powi(n as i32);
        let pi2 = PI * PI;
        let base = 1.0 - 6.0 / (pi2 * nf) - 3.0 / (pi2 * nf * nf);
        return if combine {
            base - 4.0 * (nf - 1.0) / (q * q)
        } else {
            // single: the first asymptote alone carries half the mass
            0.5 * base + (nf - 1.0) / (q * q)
        };
    }
    let scale = 3.0 / (q * q - 1.0);
    let cot2: f64 = (1..nn).map(|z| cot(PI * z as f64 / q).powi(2)).sum();
    if combine {
        scale * (0.5 + 2.0 * cot2)
    } else {
        scale * ((nn - 1) as f64 + cot2)
    }
}

fn ancilla_qubits(m: usize) -> Vec<usize> {
    (0..m).collect()
}

fn data_qubits(n: usize, m: usize) -> Vec<usize> {
    (m..m + n).collect()
}

/// Steps that relocate the stray amplitude, reflect the second asymptote
/// onto the data range, and shift it into place.
fn amendment_gates(c: &mut Circuit, n: usize, m: usize) {
    let anc = ancilla_qubits(m);
    let data = data_qubits(n, m);
    // swap |M−1, 0⟩ with |M/2, 0⟩, negating what lands at |M−1, 0⟩
    if m == 1 {
        let mut pattern: Vec<(usize, bool)> = data.iter().map(|&d| (d, false)).collect();
        pattern.push((anc[0], true));
        c.phase_flip_pattern(&pattern);
    } else {
        for &a in &anc[2..] {
            c.push(GateKind::CX, &[anc[1], a]);
        }
        let mut controls = vec![(anc[0], true)];
        controls.extend(data.iter().map(|&d| (d, false)));
        controls.extend(anc[2..].iter().map(|&a| (a, false)));
        c.mcx_pattern(&controls, anc[1]);
        let mut pattern = controls.clone();
        pattern.push((anc[1], true));
        c.phase_flip_pattern(&pattern);
        for &a in anc[2..].iter().rev() {
            c.push(GateKind::CX, &[anc[1], a]);
        }
    }
    for &d in &data {
        c.push(GateKind::CX, &[anc[0], d]);
    }
    let mut inc = vec![anc[0]];
    inc.extend(&data);
    c.push(GateKind::Incrementer { controls: 1 }, &inc);
}

fn combine_gates(c: &mut Circuit, m: usize, phase: C64) {
    let anc = ancilla_qubits(m);
    for &a in &anc[1..] {
        c.push(GateKind::CX, &[anc[0], a]);
    }
    if phase != C64::new(1.0, 0.0) {
        c.push(GateKind::Phase(phase.arg()), &[anc[0]]);
    }
    c.push(GateKind::H, &[anc[0]]);
}

fn layout(n: usize, m: usize) -> Result<Circuit> {
    Circuit::with_registers(&[
        ("ancilla", m, RegisterKind::PersistentAncilla),
        ("data", n, RegisterKind::Data),
    ])
}

/// Amendment alone, for checking it is a signed permutation.
pub fn build_amendment(n: usize, m: usize) -> Result<Circuit> {
    if m == 0 {
        return Err(Error::OutOfRange("the amendment needs m ≥ 1".into()));
    }
    check_qubits(n, m)?;
    let mut c = layout(n, m)?;
    amendment_gates(&mut c, n, m);
    Ok(c)
}

/// QFT, amendment and optional combining step on `[ancilla | data]`.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicProgram {
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub combine: bool,
    #[serde(skip)]
    pub circuit: Circuit,
    pub ledger: ResourceEstimate,
}

#[derive(Clone, Debug)]
pub struct HarmonicOutcome {
    /// Data register after the ancillas read all zeros.
    pub state: StateVector,
    pub success_prob: f64,
    /// Data register on the all-ones outcome (single variant only).
    pub second: Option<(StateVector, f64)>,
    /// Probability that the linear-state reductions all succeeded.
    pub linear_success: f64,
}

fn build_with_phase(n: usize, m: usize, delta: f64, combine: bool, phase: C64) -> Result<HarmonicProgram> {
    if m == 0 {
        return Err(Error::OutOfRange("m = 0 leaves no room to separate the asymptotes".into()));
    }
    check_qubits(n, m)?;
    let q = n + m;
    let mut c = layout(n, m)?;
    let all: Vec<usize> = (0..q).collect();
    let qft_circuit = qft::build_approx_qft(q, delta)?;
    qft::append_qft(&mut c, &all, Some(delta));
    amendment_gates(&mut c, n, m);
    if combine {
        combine_gates(&mut c, m, phase);
    }
    let t_depth = estimator::linear_t_depth(q)?
        + qft_circuit.ledger().t_depth
        + estimator::mcx_t_depth(n)
        + estimator::incrementer_t_depth(n);
    let t_count = estimator::linear_t_count(q)?
        + qft_circuit.ledger().t_count
        + estimator::mcx_t_count(q - 1)
        + estimator::incrementer_t_depth(n);
    let p = success_probability(n, m, combine);
    let ledger = ResourceEstimate::repeated(t_count, t_depth, p)
        .with_ancilla(estimator::lcu_width(q) + estimator::linear_widget_ancilla(q), m);
    c.set_ledger(ledger);
    Ok(HarmonicProgram { n, m, delta, combine, circuit: c, ledger })
}

pub fn build_harmonic(n: usize, m: usize, delta: f64, combine: bool) -> Result<HarmonicProgram> {
    build_with_phase(n, m, delta, combine, COMBINE_PHASE)
}

impl HarmonicProgram {
    pub fn variant(&self) -> Variant {
        if self.combine {
            Variant::Combined
        } else {
            Variant::Single
        }
    }

    pub fn target(&self) -> Result<StateVector> {
        cotangent_target(self.n, self.m, self.variant())
    }

    /// Runs linear preparation, then the main circuit under `model`, then
    /// post-selects the ancillas.
    pub fn simulate(&self, model: &SynthesisModel) -> Result<HarmonicOutcome> {
        let q = self.n + self.m;
        let (lin, linear_success) = linear::build_linear(q)?.simulate()?;
        let out = sim::run(&self.circuit, &lin, model)?;
        let anc = ancilla_qubits(self.m);
        let (state, success_prob) = sim::project_out(&out, &anc, &vec![false; self.m])?;
        let second = if self.combine {
            None
        } else {
            Some(sim::project_out(&out, &anc, &vec![true; self.m])?)
        };
        Ok(HarmonicOutcome { state, success_prob, second, linear_success })
    }
}

/// Distance to `|c′⟩` at `n = 4, m = 2` for each candidate combining phase.
pub fn scan_combine_phase() -> Result<Vec<(C64, f64)>> {
    let candidates = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::i(), -C64::i()];
    let target = cotangent_target(4, 2, Variant::Combined)?;
    candidates
        .iter()
        .map(|&p| {
            let prog = build_with_phase(4, 2, 1e-3, true, p)?;
            let out = prog.simulate(&SynthesisModel::exact())?;
            Ok((p, sim::distance(&out.state, &target)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_examples() {
        let h = harmonic_target(2).unwrap();
        for (a, e) in h.amps().iter().zip([0.0, 6.0 / 7.0, 3.0 / 7.0, 2.0 / 7.0]) {
            assert!((a.re - e).abs() < 1e-15);
        }
        let h1 = harmonic_target(1).unwrap();
        assert_eq!(h1.amps()[1].re, 1.0);
        let h8 = harmonic_target(8).unwrap();
        assert!(h8.amps()[1..].windows(2).all(|w| w[1].re < w[0].re));
        assert_eq!(h8.amps()[0].re, 0.0);
    }

    #[test]
    fn lemma_examples() {
        let d = lemma_distance(4, 2, Variant::Single).unwrap();
        assert!((d / lemma_fit(4, 2, Variant::Single) - 1.0).abs() <= 0.30);
        for n in 3..=10 {
            for m in 1..=5 {
                assert!(
                    lemma_distance(n, m, Variant::Combined).unwrap()
                        < lemma_distance(n, m, Variant::Single).unwrap()
                );
            }
        }
    }

    #[test]
    fn phase_scan_picks_frozen_constant() {
        let scan = scan_combine_phase().unwrap();
        let best = scan.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert_eq!(best.0, COMBINE_PHASE);
        assert!(best.1 < 1e-10);
    }

    #[test]
    fn pipeline_small() {
        let prog = build_harmonic(5, 3, 1e-3, true).unwrap();
        let out = prog.simulate(&SynthesisModel::exact()).unwrap();
        assert!(sim::distance(&out.state, &prog.target().unwrap()).unwrap() <= 1e-10);
        assert!((out.success_prob - success_probability(5, 3, true)).abs() < 1e-10);

        let prog = build_harmonic(3, 2, 1e-3, false).unwrap();
        let out = prog.simulate(&SynthesisModel::exact()).unwrap();
        assert!(sim::distance(&out.state, &prog.target().unwrap()).unwrap() <= 1e-10);
        let (second, _) = out.second.unwrap();
        assert!(sim::distance(&second, &second_asymptote_target(3, 2).unwrap()).unwrap() <= 1e-10);
        assert!((out.success_prob - success_probability(3, 2, false)).abs() < 1e-10);
        assert!(build_harmonic(3, 0, 1e-3, true).is_err());
    }

    #[test]
    fn m_one_pipeline() {
        for combine in [false, true] {
            let prog = build_harmonic(3, 1, 1e-3, combine).unwrap();
            let out = prog.simulate(&SynthesisModel::exact()).unwrap();
            assert!(sim::distance(&out.state, &prog.target().unwrap()).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn amendment_is_a_signed_permutation() {
        for n in 1..=5 {
            for m in 1..=(8 - n).min(4) {
                let u = sim::unitary_of(&build_amendment(n, m).unwrap()).unwrap();
                let mut negatives = 0;
                for j in 0..u.dim() {
                    let col = u.column(j);
                    let nz: Vec<&C64> = col.iter().filter(|a| a.norm() > 1e-12).collect();
                    assert_eq!(nz.len(), 1);
                    assert!((nz[0].norm() - 1.0).abs() < 1e-12 && nz[0].im.abs() < 1e-12);
                    if nz[0].re < 0.0 {
                        negatives += 1;
                    }
                }
                // only the relocated amplitude changes sign
                assert_eq!(negatives, 1, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn success_probability_expansion_is_continuous() {
        for m in [2usize, 6, 12] {
            for combine in [true, false] {
                let exact = success_probability(16, m, combine);
                let nf = 2f64.powi(16);
                let q = 2f64.powi(16 + m as i32);
                let pi2 = PI * PI;
                let base = 1.0 - 6.0 / (pi2 * nf) - 3.0 / (pi2 * nf * nf);
                let approx = if combine {
                    base - 4.0 * (nf - 1.0) / (q * q)
                } else {
                    0.5 * base + (nf - 1.0) / (q * q)
                };
                assert!((exact - approx).abs() < 1e-6, "m={m} {exact} {approx}");
            }
        }
    }
}
