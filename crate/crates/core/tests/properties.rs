use harmoniq::circuit::naive_cost;
use harmoniq::harmonic::{self, Variant};
use harmoniq::sim::{self, SynthesisModel};
use harmoniq::widgets::{self, Base, ExponentialSpec};
use harmoniq::{circulant, estimator, linear, qft, Circuit, Gate, GateKind, ResourceEstimate};
use proptest::prelude::*;

fn arb_gate(width: usize) -> impl Strategy<Value = Gate> {
    (0..9usize, proptest::sample::subsequence((0..width).collect::<Vec<_>>(), 3), -3.0..3.0f64).prop_map(
        |(k, mut qs, a)| {
            qs.rotate_left(k % 3);
            match k {
                0 => Gate::new(GateKind::H, vec![qs[0]]),
                1 => Gate::new(GateKind::T, vec![qs[0]]),
                2 => Gate::new(GateKind::CX, qs[..2].to_vec()),
                3 => Gate::new(GateKind::CH, qs[..2].to_vec()),
                4 => Gate::new(GateKind::CCX, qs.clone()),
                5 => Gate::synthesized(GateKind::Rz(a), vec![qs[0]], 1e-4),
                6 => Gate::synthesized(GateKind::CPhase(a), qs[..2].to_vec(), 1e-6),
                7 => Gate::new(GateKind::Incrementer { controls: 1 }, qs.clone()),
                _ => Gate::new(GateKind::Ry(a), vec![qs[0]]),
            }
        },
    )
}

fn arb_circuit(width: usize) -> impl Strategy<Value = Circuit> {
    (proptest::collection::vec(arb_gate(width), 0..30), arb_ledger()).prop_map(move |(gs, ledger)| {
        let mut c = Circuit::new(width);
        c.extend(gs).unwrap();
        c.set_ledger(ledger);
        c
    })
}

fn arb_ledger() -> impl Strategy<Value = ResourceEstimate> {
    (0.0..500.0f64, 0.0..1.0f64, 0usize..20, 0usize..20, 0.05..1.0f64).prop_map(|(count, frac, clean, persistent, p)| {
        ResourceEstimate::repeated(count, count * frac, p).with_ancilla(clean, persistent)
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_adds_ledgers(a in arb_circuit(4), b in arb_circuit(4)) {
        let c = Circuit::compose(&a, &b).unwrap();
        let (la, lb, lc) = (a.ledger(), b.ledger(), c.ledger());
        prop_assert_eq!(c.len(), a.len() + b.len());
        prop_assert!(close(lc.t_count, la.t_count + lb.t_count));
        prop_assert!(close(lc.t_depth, la.t_depth + lb.t_depth));
        prop_assert!(close(lc.expected_t_depth, la.expected_t_depth + lb.expected_t_depth));
        prop_assert_eq!(lc.clean_ancilla, la.clean_ancilla + lb.clean_ancilla);
        prop_assert_eq!(lc.persistent_ancilla, la.persistent_ancilla + lb.persistent_ancilla);
        prop_assert!(close(lc.success_prob, la.success_prob * lb.success_prob));
    }

    #[test]
    fn serialization_is_byte_stable(c in arb_circuit(5)) {
        let text = c.to_json();
        let back = Circuit::from_json(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn naive_depth_never_exceeds_count(c in arb_circuit(5)) {
        let cost = naive_cost(&c).unwrap();
        prop_assert!(cost.t_depth <= cost.t_count + 1e-9);
    }

    #[test]
    fn combined_beats_single(n in 3usize..=10, m in 1usize..=5) {
        let single = harmonic::lemma_distance(n, m, Variant::Single).unwrap();
        let combined = harmonic::lemma_distance(n, m, Variant::Combined).unwrap();
        prop_assert!(combined < single, "n = {n}, m = {m}: {combined} vs {single}");
    }

    #[test]
    fn required_qubit_rule(log_eps in -14.0..-1.0f64) {
        let eps = 10f64.powf(log_eps);
        let rule = ((3f64.sqrt() / eps).log2() - 0.5).ceil() as usize;
        let minimal = (1..200).find(|&q| 3f64.sqrt() / 2f64.powf(q as f64 + 0.5) <= eps).unwrap();
        prop_assert_eq!(rule, minimal);
        prop_assert_eq!(estimator::required_qubits(eps), minimal);
    }

    #[test]
    fn formulas_are_monotone(n in 1usize..60, log_d in -12.0..-1.5f64) {
        let d = 10f64.powf(log_d);
        let looser = d * 1.5;
        for f in [estimator::qft_t_depth, estimator::circulant_t_depth] {
            prop_assert!(f(n, looser).unwrap() <= f(n, d).unwrap());
            prop_assert!(f(n + 1, d).unwrap() >= f(n, d).unwrap());
        }
        prop_assert!(estimator::rotation_cost(looser).unwrap() <= estimator::rotation_cost(d).unwrap());
        prop_assert!(estimator::linear_t_depth(n + 1).unwrap() >= estimator::linear_t_depth(n).unwrap());
        prop_assert!(estimator::mcx_t_depth(n + 1) >= estimator::mcx_t_depth(n));
    }

    #[test]
    fn exponential_ratio_is_beta(a in 1usize..=6, half in any::<bool>()) {
        let base = if half { Base::Half } else { Base::InvSqrt2 };
        let prog = widgets::build_exponential(&ExponentialSpec::new(a, base).unwrap()).unwrap();
        let (state, _) = prog.simulate().unwrap();
        let amps = state.amps();
        for x in 1..amps.len() {
            prop_assert!(amps[x].re < amps[x - 1].re);
            prop_assert!((amps[x].re / amps[x - 1].re - base.value()).abs() < 1e-12);
        }
    }
}

#[test]
fn builder_depth_never_exceeds_count() {
    let mut ledgers = Vec::new();
    for k in 1..=8 {
        ledgers.push(("widget", *widgets::build_widget(k).unwrap().ledger()));
    }
    for n in 2..=8 {
        ledgers.push(("linear", linear::build_linear(n).unwrap().ledger));
        ledgers.push(("qft", *qft::build_approx_qft(n, 1e-6).unwrap().ledger()));
    }
    for (n, m) in [(2, 1), (4, 2), (6, 3)] {
        ledgers.push(("harmonic", harmonic::build_harmonic(n, m, 1e-6, true).unwrap().ledger));
    }
    for n in 3..=5 {
        ledgers.push(("circulant", *circulant::build_circulant_encoding(n, 1e-6).unwrap().0.ledger()));
    }
    ledgers.push(("diag", *circulant::diag_harmonic_circuit(3, 2, 2e-6, 1e-6).unwrap().ledger()));
    for (name, l) in ledgers {
        assert!(l.t_depth <= l.t_count + 1e-9, "{name}: depth {} > count {}", l.t_depth, l.t_count);
    }
}

#[test]
fn fair_coin_monte_carlo_matches_exact_maximum() {
    for n in [1usize, 4, 16] {
        let probs = vec![0.5; n];
        let est = widgets::expected_tdepth_mc_probs(&probs, 200_000, 7).unwrap();
        let exact = widgets::expected_tdepth_exact(&probs);
        assert!((est.mean - exact).abs() <= 3.0 * est.stderr, "n = {n}: {} vs {exact}", est.mean);
    }
}

#[test]
fn monte_carlo_tracks_the_fit() {
    for n in [4usize, 8, 16, 32, 64, 128, 256] {
        let est = widgets::expected_tdepth_mc(n, 100_000, 11).unwrap();
        assert!((est.mean / est.fit - 1.0).abs() <= 0.15, "n = {n}: {} vs {}", est.mean, est.fit);
    }
}

#[test]
fn amendment_only_relocates_one_amplitude() {
    for q in 2..=8usize {
        for m in 1..q {
            let n = q - m;
            let c = harmonic::build_amendment(n, m).unwrap();
            let u = sim::unitary_of_with(&c, &SynthesisModel::exact(), 14).unwrap();
            for j in 0..u.dim() {
                let col = u.column(j);
                let big: Vec<_> = col.iter().filter(|z| z.norm() > 1e-12).collect();
                assert_eq!(big.len(), 1, "column {j} at n = {n}, m = {m}");
                assert!((big[0].norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn alpha_converges_towards_limit() {
    let limit = 1.0 / (3.0 * std::f64::consts::PI);
    let gaps: Vec<f64> = (5..=9).map(|n| (circulant::lcu_alpha(n).unwrap() - limit).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}
