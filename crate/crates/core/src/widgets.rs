//! Errorless rotation-state widgets, exponential states built from them,
//! and repeat-until-success depth statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, GateKind, RegisterKind, ResourceEstimate};
use crate::error::{Error, Result};
use crate::sim::{self, StateVector, SynthesisModel};
use crate::C64;

pub const MAX_WIDGET_K: usize = 20;
pub const MAX_EXPONENTIAL_BITS: usize = 8;
pub const MIN_TRIALS: usize = 10_000;

/// Widget producing `(|0⟩ + 2^{-k/2}|1⟩)` up to normalisation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WidgetSpec {
    pub k: usize,
}

impl WidgetSpec {
    pub fn new(k: usize) -> Result<WidgetSpec> {
        if !(1..=MAX_WIDGET_K).contains(&k) {
            return Err(Error::OutOfRange(format!("widget k = {k} outside [1, {MAX_WIDGET_K}]")));
        }
        Ok(WidgetSpec { k })
    }

    pub fn qubits(&self) -> usize {
        self.k + 1
    }

    pub fn success_probability(&self) -> f64 {
        success_probability(self.k)
    }

    /// `√(2^k/(2^k+1)) (|0⟩ + 2^{-k/2}|1⟩)`.
    pub fn target(&self) -> StateVector {
        let r = 2f64.powf(-(self.k as f64) / 2.0);
        StateVector::from_real(&[1.0, r]).expect("two amplitudes")
    }
}

pub fn success_probability(k: usize) -> f64 {
    0.5 + 0.5f64.powi(k as i32 + 1)
}

/// Hadamard on the control, then `k` controlled-Hadamards fanned out from
/// it onto fresh ancillas. Post-selecting every ancilla on 0 leaves the
/// control in the widget state.
pub fn build_widget(k: usize) -> Result<Circuit> {
    let spec = WidgetSpec::new(k)?;
    let mut c = Circuit::with_registers(&[
        ("data", 1, RegisterKind::Data),
        ("ancilla", k, RegisterKind::PersistentAncilla),
    ])?;
    c.push(GateKind::H, &[0]);
    for a in 1..=k {
        c.push(GateKind::CH, &[0, a]);
    }
    let p = spec.success_probability();
    // the fan-out shares a control, so the controlled-Hadamards run in one layer
    c.set_ledger(ResourceEstimate::repeated(2.0 * k as f64, 2.0, p).with_ancilla(0, k));
    Ok(c)
}

/// Runs the widget circuit and post-selects its ancillas on 0.
pub fn simulate_widget(k: usize) -> Result<(StateVector, f64)> {
    let c = build_widget(k)?;
    let out = sim::run(&c, &StateVector::zero(c.width()), &SynthesisModel::exact())?;
    let anc = c.qubits_of("ancilla");
    sim::project_out(&out, &anc, &vec![false; anc.len()])
}

/// Same outcome as [`simulate_widget`] on two qubits: each ancilla is
/// measured right after its controlled-Hadamard and the qubit reused.
/// Unlike the explicit circuit this has no cap on `k`.
pub fn simulate_widget_sequential(k: usize) -> Result<(StateVector, f64)> {
    if k == 0 {
        return Err(Error::OutOfRange("widget k must be at least 1".into()));
    }
    let mut c = Circuit::new(2);
    c.push(GateKind::CH, &[0, 1]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut state = StateVector::from_amplitudes(vec![
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
    ])?;
    let mut prob = 1.0;
    for _ in 0..k {
        let out = sim::run(&c, &state, &SynthesisModel::exact())?;
        let (post, p) = sim::postselect(&out, &[1], &[false])?;
        prob *= p;
        state = post;
    }
    let (ctrl, _) = sim::project_out(&state, &[1], &[false])?;
    Ok((ctrl, prob))
}

/// Base of the exponential state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Base {
    Half,
    InvSqrt2,
}

impl Base {
    pub fn from_value(beta: f64) -> Result<Base> {
        if (beta - 0.5).abs() < 1e-12 {
            Ok(Base::Half)
        } else if (beta - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12 {
            Ok(Base::InvSqrt2)
        } else {
            Err(Error::UnsupportedBase(beta))
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Base::Half => 0.5,
            Base::InvSqrt2 => std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// `2 log₂(1/β)`.
    fn widget_scale(&self) -> usize {
        match self {
            Base::Half => 2,
            Base::InvSqrt2 => 1,
        }
    }
}

/// Exponential state `∝ Σ_x β^x |x⟩` on `a` qubits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentialSpec {
    pub a: usize,
    pub base: Base,
    pub widgets: Vec<WidgetSpec>,
}

impl ExponentialSpec {
    pub fn new(a: usize, base: Base) -> Result<ExponentialSpec> {
        if a > MAX_EXPONENTIAL_BITS {
            return Err(Error::OutOfRange(format!(
                "exponential state on {a} bits exceeds {MAX_EXPONENTIAL_BITS}"
            )));
        }
        let widgets = (0..a)
            .map(|i| WidgetSpec { k: (1usize << (a - 1 - i)) * base.widget_scale() })
            .collect();
        Ok(ExponentialSpec { a, base, widgets })
    }

    pub fn target(&self) -> StateVector {
        let beta = self.base.value();
        let amps: Vec<f64> = (0..1usize << self.a).map(|x| beta.powi(x as i32)).collect();
        StateVector::from_real(&amps).expect("non-empty")
    }

    /// Widget ancillas actually used.
    pub fn ancilla_count(&self) -> usize {
        self.widgets.iter().map(|w| w.k).sum()
    }

    /// Ancilla total quoted for the half-base state, `4N − 4`.
    pub fn ancilla_reference(&self) -> usize {
        4 * (1usize << self.a) - 4
    }

    /// Probability that every widget succeeds on its first attempt.
    pub fn joint_success_probability(&self) -> f64 {
        self.widgets.iter().map(WidgetSpec::success_probability).product()
    }
}

/// Independently repeatable widgets, one per data bit.
#[derive(Clone, Debug)]
pub struct ExponentialProgram {
    pub spec: ExponentialSpec,
    pub ledger: ResourceEstimate,
}

impl ExponentialProgram {
    /// Widget circuit for data bit `i` (qubit 0 most significant).
    pub fn widget_circuit(&self, i: usize) -> Result<Circuit> {
        let w = self
            .spec
            .widgets
            .get(i)
            .ok_or_else(|| Error::OutOfRange(format!("no widget for bit {i}")))?;
        build_widget(w.k)
    }

    /// Data register after every widget has succeeded, and the joint
    /// first-attempt success probability.
    pub fn simulate(&self) -> Result<(StateVector, f64)> {
        let mut state = StateVector::zero(0);
        let mut prob = 1.0;
        for w in &self.spec.widgets {
            let (s, p) = simulate_widget_sequential(w.k)?;
            state = state.tensor(&s)?;
            prob *= p;
        }
        Ok((state, prob))
    }
}

pub fn build_exponential(spec: &ExponentialSpec) -> Result<ExponentialProgram> {
    ExponentialSpec::new(spec.a, spec.base)?;
    let t_count: f64 = spec.widgets.iter().map(|w| 2.0 * w.k as f64 / w.success_probability()).sum();
    let depth = if spec.a == 0 { 0.0 } else { rus_fit(spec.a) };
    let ledger = ResourceEstimate {
        t_count,
        t_depth: if spec.a == 0 { 0.0 } else { 2.0 },
        expected_t_depth: depth,
        clean_ancilla: 0,
        persistent_ancilla: spec.ancilla_count(),
        success_prob: 1.0,
    };
    Ok(ExponentialProgram { spec: spec.clone(), ledger })
}

/// Fitted expected T-depth of `n` widgets retried in parallel.
pub fn rus_fit(n: usize) -> f64 {
    2.0 * (2.5 * n as f64 + 0.92).log2()
}

/// Fitted expected T-depth of the single-ancilla variant.
pub fn single_ancilla_estimate(a: usize) -> f64 {
    2f64.powi(a as i32 + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RusEstimate {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub fit: f64,
}

/// Success probabilities of the `n` exponential-state components: the
/// `i`-th needs a widget with `k = 2^{i+1}`.
pub fn component_probabilities(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let k = 2f64.powi(i as i32 + 1);
            0.5 + 0.5f64.powf(k + 1.0)
        })
        .collect()
}

/// Monte Carlo mean of `2 × max attempts` for parallel widgets with the
/// given success probabilities.
pub fn expected_tdepth_mc_probs(probs: &[f64], trials: usize, seed: u64) -> Result<RusEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::OutOfRange(format!("{trials} trials, need at least {MIN_TRIALS}")));
    }
    let dists = probs
        .iter()
        .map(|&p| Geometric::new(p).map_err(|e| Error::OutOfRange(format!("probability {p}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let depths: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let worst = dists.iter().map(|d| d.sample(&mut rng)).max().unwrap_or(0);
            if probs.is_empty() {
                0.0
            } else {
                2.0 * (worst + 1) as f64
            }
        })
        .collect();
    let n = trials as f64;
    let mean = depths.iter().sum::<f64>() / n;
    let var = depths.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(RusEstimate {
        n: probs.len(),
        trials,
        mean,
        stderr: (var / n).sqrt(),
        fit: rus_fit(probs.len()),
    })
}

pub fn expected_tdepth_mc(n_components: usize, trials: usize, seed: u64) -> Result<RusEstimate> {
    expected_tdepth_mc_probs(&component_probabilities(n_components), trials, seed)
}

/// Exact `2 E[max attempts]` for independent geometric attempts.
pub fn expected_tdepth_exact(probs: &[f64]) -> f64 {
    if probs.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 0..10_000 {
        // P(max attempts > j)
        let all_done: f64 = probs.iter().map(|p| 1.0 - (1.0 - p).powi(j)).product();
        let tail = 1.0 - all_done;
        total += tail;
        if tail < 1e-17 {
            break;
        }
    }
    2.0 * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widget_examples() {
        let (s, p) = simulate_widget(1).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
        let expected = StateVector::from_real(&[(2f64 / 3.0).sqrt(), (1f64 / 3.0).sqrt()]).unwrap();
        assert!(sim::distance_raw(&s, &expected).unwrap() < 1e-12);
        assert!((simulate_widget(3).unwrap().1 - 9.0 / 16.0).abs() < 1e-12);
        let (s, p) = simulate_widget(2).unwrap();
        assert!((p - 5.0 / 8.0).abs() < 1e-12);
        assert!((s.amps()[0].re - 0.8f64.sqrt()).abs() < 1e-12);
        assert!((s.amps()[1].re - 0.2f64.sqrt()).abs() < 1e-12);
        for k in [1, 5, 20] {
            assert_eq!(build_widget(k).unwrap().ledger().t_depth, 2.0);
        }
        assert!(build_widget(0).is_err());
        assert!(build_widget(21).is_err());
    }

    #[test]
    fn widget_amplitude_before_measurement() {
        let c = build_widget(1).unwrap();
        let out = sim::run(&c, &StateVector::zero(2), &SynthesisModel::exact()).unwrap();
        // data = 1, ancilla = 0
        assert!((out.amps()[2].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sequential_matches_full() {
        for k in 1..=8 {
            let (a, pa) = simulate_widget(k).unwrap();
            let (b, pb) = simulate_widget_sequential(k).unwrap();
            assert!(sim::distance_raw(&a, &b).unwrap() < 1e-12);
            assert!((pa - pb).abs() < 1e-12);
        }
        let (s, p) = simulate_widget_sequential(20).unwrap();
        assert!((p - success_probability(20)).abs() < 1e-12);
        assert!(sim::distance_raw(&s, &WidgetSpec::new(20).unwrap().target()).unwrap() < 1e-12);
    }

    #[test]
    fn exponential_examples() {
        let cases: [(usize, Base, Vec<f64>); 3] = [
            (1, Base::Half, vec![2.0, 1.0]),
            (2, Base::Half, vec![1.0, 0.5, 0.25, 0.125]),
            (2, Base::InvSqrt2, vec![1.0, 0.5f64.sqrt(), 0.5, 0.125f64.sqrt()]),
        ];
        for (a, base, amps) in cases {
            let prog = build_exponential(&ExponentialSpec::new(a, base).unwrap()).unwrap();
            let (s, _) = prog.simulate().unwrap();
            let expected = StateVector::from_real(&amps).unwrap();
            assert!(sim::distance_raw(&s, &expected).unwrap() < 1e-12);
        }
        assert!(matches!(Base::from_value(0.3), Err(Error::UnsupportedBase(_))));
        let spec = ExponentialSpec::new(3, Base::Half).unwrap();
        assert_eq!(spec.ancilla_count(), 14);
        let prog = build_exponential(&ExponentialSpec::new(8, Base::Half).unwrap()).unwrap();
        assert!(prog.widget_circuit(0).is_err());
        assert_eq!(prog.widget_circuit(7).unwrap().width(), 3);
        let (s, _) = prog.simulate().unwrap();
        assert!(sim::distance_raw(&s, &prog.spec.target()).unwrap() < 1e-12);
        assert!(ExponentialSpec::new(9, Base::Half).is_err());
        assert_eq!(spec.ancilla_reference(), 28);
    }

    #[test]
    fn exponential_ratios() {
        for base in [Base::Half, Base::InvSqrt2] {
            for a in 1..=6 {
                let (s, _) = build_exponential(&ExponentialSpec::new(a, base).unwrap())
                    .unwrap()
                    .simulate()
                    .unwrap();
                for w in s.amps().windows(2) {
                    assert!(w[1].re < w[0].re);
                    assert!((w[1].re / w[0].re - base.value()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rus_examples() {
        assert!((rus_fit(4) - 6.90).abs() < 0.005);
        assert_eq!(single_ancilla_estimate(3), 16.0);
        assert_eq!(single_ancilla_estimate(1), 4.0);
        assert_eq!(single_ancilla_estimate(0), 2.0);
        let r = expected_tdepth_mc_probs(&[0.75], 100_000, 3).unwrap();
        assert!((r.mean - 8.0 / 3.0).abs() < 3.0 * r.stderr + 1e-12);
        assert!(expected_tdepth_mc(4, 100, 0).is_err());
    }

    #[test]
    fn mc_is_reproducible() {
        let a = expected_tdepth_mc(16, 20_000, 9).unwrap();
        let b = expected_tdepth_mc(16, 20_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mc_matches_half_oracle() {
        for n in [1usize, 4, 32] {
            let probs = vec![0.5; n];
            let r = expected_tdepth_mc_probs(&probs, 50_000, 11).unwrap();
            let exact: f64 = 2.0
                * (0..200).map(|j| 1.0 - (1.0 - 0.5f64.powi(j)).powi(n as i32)).sum::<f64>();
            assert!((r.mean - exact).abs() <= 3.0 * r.stderr, "n={n}: {} vs {exact}", r.mean);
            assert!((expected_tdepth_exact(&probs) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn straggler_bound() {
        // expected unfinished widgets after j rounds is at most n 2^{-j}
        for n in [1usize, 8, 100] {
            for j in 0..20 {
                let bound = n as f64 * 2f64.powi(-j);
                let worse = component_probabilities(n)
                    .iter()
                    .map(|p| (1.0 - p).powi(j))
                    .sum::<f64>();
                assert!(worse <= bound + 1e-12);
            }
        }
    }
}
