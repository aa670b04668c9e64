//! Block-encodings of the linear circulant matrix
//! `C_ij = (N−1)/2 − (i + j mod N)`, its building blocks, and the
//! QFT-conjugated diagonal harmonic matrix.
//!
//! `C` is assembled as an LCU of four verified components:
//! `diag(L)·𝟏`, `𝟏·diag(L)`, `D` and `X^{⊗n}`, with weights from a
//! least-squares solve against the exact component blocks.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::circuit::{Circuit, GateKind, RegisterKind, ResourceEstimate};
use crate::error::{Error, Result};
use crate::estimator;
use crate::qft;
use crate::sim::{self, DenseMatrix, SynthesisModel};
use crate::C64;

pub const MAX_TARGET_QUBITS: usize = 10;
/// Largest data register whose encoding is simulated.
pub const MAX_ENCODE_QUBITS: usize = 8;
pub const MIN_CIRCULANT_QUBITS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Component {
    Circulant,
    Ones,
    DiagL,
    D,
    Xn,
    Grover(usize),
    R,
    /// `diag(L)·𝟏`
    DiagLOnes,
    /// `𝟏·diag(L)`
    OnesDiagL,
}

impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Component> {
        let lower = s.to_ascii_lowercase();
        if let Some(k) = lower.strip_prefix("grover:") {
            let k = k.parse().map_err(|_| Error::OutOfRange(format!("bad Grover size in `{s}`")))?;
            return Ok(Component::Grover(k));
        }
        Ok(match lower.as_str() {
            "circulant" => Component::Circulant,
            "ones" => Component::Ones,
            "diag-l" | "diag_l" => Component::DiagL,
            "d" => Component::D,
            "xn" => Component::Xn,
            "r" => Component::R,
            "diag-l-ones" => Component::DiagLOnes,
            "ones-diag-l" => Component::OnesDiagL,
            _ => return Err(Error::OutOfRange(format!("unknown matrix `{s}`"))),
        })
    }
}

fn dim(n: usize) -> usize {
    1usize << n
}

/// `(N+1)/(N−1)`, the lower entry magnitude of `R`.
fn r_ratio(n: usize) -> f64 {
    let nn = dim(n) as f64;
    (nn + 1.0) / (nn - 1.0)
}

fn check_target(n: usize) -> Result<()> {
    if n == 0 || n > MAX_TARGET_QUBITS {
        return Err(Error::OutOfRange(format!("n = {n} outside 1..={MAX_TARGET_QUBITS}")));
    }
    Ok(())
}

fn grover(k: usize) -> DenseMatrix {
    let d = dim(k);
    DenseMatrix::from_real_fn(d, |i, j| 2.0 / d as f64 - if i == j { 1.0 } else { 0.0 })
}

/// Sawtooth values `(N−1)/2 − i`.
fn sawtooth(n: usize) -> Vec<f64> {
    let nn = dim(n);
    (0..nn).map(|i| (nn as f64 - 1.0) / 2.0 - i as f64).collect()
}

/// The matrix named by `which` on `n` qubits. `R` is the 2×2 matrix used
/// inside `D` for an `n`-qubit register; `Grover(k)` ignores `n`.
pub fn target_matrix(which: Component, n: usize) -> Result<DenseMatrix> {
    check_target(n)?;
    let nn = dim(n);
    let r = r_ratio(n);
    Ok(match which {
        Component::Circulant => DenseMatrix::from_real_fn(nn, |i, j| {
            (nn as f64 - 1.0) / 2.0 - ((i + j) % nn) as f64
        }),
        Component::Ones => DenseMatrix::from_real_fn(nn, |_, _| 1.0),
        Component::DiagL => {
            let l = sawtooth(n);
            DenseMatrix::from_real_fn(nn, |i, j| if i == j { l[i] } else { 0.0 })
        }
        Component::D => DenseMatrix::from_real_fn(nn, |i, j| {
            let s = i + j;
            if s < nn - 1 {
                1.0
            } else if s == nn - 1 {
                0.0
            } else {
                -r
            }
        }),
        Component::Xn => DenseMatrix::from_real_fn(nn, |i, j| if i + j == nn - 1 { 1.0 } else { 0.0 }),
        Component::Grover(k) => {
            check_target(k)?;
            grover(k)
        }
        Component::R => DenseMatrix::from_real_fn(2, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (1, 1) => -r,
            _ => 0.0,
        }),
        Component::DiagLOnes => {
            let l = sawtooth(n);
            DenseMatrix::from_real_fn(nn, |i, _| l[i])
        }
        Component::OnesDiagL => {
            let l = sawtooth(n);
            DenseMatrix::from_real_fn(nn, |_, j| l[j])
        }
    })
}

/// `C / ‖C‖₂`.
pub fn unit_circulant(n: usize) -> Result<DenseMatrix> {
    let c = target_matrix(Component::Circulant, n)?;
    let norm = circulant_norm(n);
    Ok(c.scale(C64::from(1.0 / norm)))
}

/// `‖C‖₂ = N / (2 sin(π/N))`, the largest Fourier coefficient of the
/// sawtooth column.
pub fn circulant_norm(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nn = dim(n) as f64;
    nn / (2.0 * (PI / nn).sin())
}

/// Exact top-left block produced by the component encoder for `which`.
pub fn component_block(which: Component, n: usize) -> Result<DenseMatrix> {
    check_target(n)?;
    let nn = dim(n) as f64;
    let t = target_matrix(which, n)?;
    Ok(match which {
        Component::Ones => t.scale(C64::from(1.0 / nn)),
        Component::DiagL => t.scale(C64::from(2.0 / (nn - 1.0))),
        Component::D => t.scale(C64::from(1.0 / (nn + 1.0))),
        Component::R => t.scale(C64::from(1.0 / r_ratio(n))),
        Component::DiagLOnes | Component::OnesDiagL => t.scale(C64::from(2.0 / (nn * (nn - 1.0)))),
        Component::Xn | Component::Grover(_) => t,
        Component::Circulant => t.scale(C64::from(1.0 / circulant_weights(n)?.l1())),
    })
}

/// Result of conjugating a circulant-type matrix by the QFT.
#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionCheck {
    pub off_diagonal: f64,
    /// `diag(QFT·C·QFT) / (QFT v)` where the latter is non-negligible.
    pub scalar: Option<[f64; 2]>,
}

/// Builds `C_ij = v_{(i+j) mod N}` and measures how far `QFT·C·QFT` is
/// from the diagonal `QFT v`.
pub fn convolution_check(v: &[C64], n: usize) -> Result<ConvolutionCheck> {
    if !(1..=4).contains(&n) || v.len() != dim(n) {
        return Err(Error::ShapeMismatch(format!("need 2^n entries with n ≤ 4, got {} for n = {n}", v.len())));
    }
    let nn = dim(n);
    let c = DenseMatrix::from_fn(nn, |i, j| v[(i + j) % nn]);
    let f = qft::exact_qft(n)?;
    let m = f.mul(&c)?.mul(&f)?;
    let fv = f.apply(v);
    let scalar = (0..nn)
        .max_by(|&a, &b| fv[a].norm().total_cmp(&fv[b].norm()))
        .filter(|&b| fv[b].norm() > 1e-12)
        .map(|b| {
            let s = m.get(b, b) / fv[b];
            [s.re, s.im]
        });
    Ok(ConvolutionCheck { off_diagonal: m.max_off_diagonal(), scalar })
}

/// Term weights with `C = Σ_t w_t B_t` over the exact component blocks
/// `[diag(L)·𝟏, 𝟏·diag(L), D, X^{⊗n}]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CirculantWeights {
    pub weights: [f64; 4],
    /// Largest entrywise residual of the solved combination.
    pub closure: f64,
}

impl CirculantWeights {
    pub fn l1(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// Amplitudes of the term-register PREP state.
    pub fn prep_amplitudes(&self) -> [f64; 4] {
        let l1 = self.l1();
        self.weights.map(|w| (w.abs() / l1).sqrt())
    }
}

const TERMS: [Component; 4] = [Component::DiagLOnes, Component::OnesDiagL, Component::D, Component::Xn];

pub fn circulant_weights(n: usize) -> Result<CirculantWeights> {
    check_target(n)?;
    let blocks = TERMS.iter().map(|&t| component_block(t, n)).collect::<Result<Vec<_>>>()?;
    let target = target_matrix(Component::Circulant, n)?;
    let rows = dim(n) * dim(n);
    let a = DMatrix::from_fn(rows, 4, |r, t| blocks[t].entries()[r].re);
    let b = DVector::from_fn(rows, |r, _| target.entries()[r].re);
    let w = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::Singular(e.to_string()))?;
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular("circulant weight solve".into()));
    }
    let closure = (&a * &w - &b).amax();
    Ok(CirculantWeights { weights: [w[0], w[1], w[2], w[3]], closure })
}

/// Subnormalization of the LCU encoding of `C`, from the solved weights.
pub fn lcu_alpha(n: usize) -> Result<f64> {
    Ok(circulant_norm(n) / circulant_weights(n)?.l1())
}

/// Clean ancillas of the circulant encoding on `q` data qubits.
pub fn lcu_ancilla(q: usize) -> usize {
    2 + select_width(q) + 3
}

fn select_width(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Qubit assignment shared by every encoder.
#[derive(Clone, Debug)]
struct Wires {
    data: Vec<usize>,
    term: Vec<usize>,
    select: Vec<usize>,
    flag: usize,
    aux: [usize; 2],
}

fn layout(persistent: usize, n: usize, term: usize, select: usize) -> Result<(Circuit, Wires)> {
    let c = Circuit::with_registers(&[
        ("ancilla", persistent, RegisterKind::PersistentAncilla),
        ("data", n, RegisterKind::Data),
        ("term", term, RegisterKind::CleanAncilla),
        ("select", select, RegisterKind::CleanAncilla),
        ("flag", 1, RegisterKind::CleanAncilla),
        ("aux", 2, RegisterKind::CleanAncilla),
    ])?;
    let mut data = c.qubits_of("ancilla");
    data.extend(c.qubits_of("data"));
    let aux = c.qubits_of("aux");
    let w = Wires {
        data,
        term: c.qubits_of("term"),
        select: c.qubits_of("select"),
        flag: c.qubits_of("flag")[0],
        aux: [aux[0], aux[1]],
    };
    Ok((c, w))
}

fn pattern(qubits: &[usize], value: usize) -> Vec<(usize, bool)> {
    let len = qubits.len();
    qubits.iter().enumerate().map(|(b, &q)| (q, (value >> (len - 1 - b)) & 1 == 1)).collect()
}

fn with(ctrl: &[(usize, bool)], extra: &[(usize, bool)]) -> Vec<(usize, bool)> {
    ctrl.iter().chain(extra).copied().collect()
}

/// `−I`, realised as `XZXZ` on one qubit.
fn minus_identity(c: &mut Circuit, q: usize) {
    for kind in [GateKind::X, GateKind::Z, GateKind::X, GateKind::Z] {
        c.push(kind, &[q]);
    }
}

/// Grover reflection `2|s⟩⟨s| − I` on `data`, active when `ctrl` matches.
fn controlled_grover(c: &mut Circuit, data: &[usize], ctrl: &[(usize, bool)]) {
    for &d in data {
        c.push(GateKind::H, &[d]);
        c.push(GateKind::X, &[d]);
    }
    let ones: Vec<(usize, bool)> = data.iter().map(|&d| (d, true)).collect();
    c.phase_flip_pattern(&with(ctrl, &ones));
    for &d in data {
        c.push(GateKind::X, &[d]);
        c.push(GateKind::H, &[d]);
    }
    if ctrl.is_empty() {
        minus_identity(c, data[0]);
    } else {
        c.phase_flip_pattern(ctrl);
    }
}

/// `𝟏/N` as the LCU `(I + G)/2` over one ancilla.
fn ones(c: &mut Circuit, w: &Wires, data: &[usize], ctrl: &[(usize, bool)]) {
    let a = w.aux[0];
    c.push(GateKind::H, &[a]);
    controlled_grover(c, data, &with(ctrl, &[(a, true)]));
    c.push(GateKind::H, &[a]);
}

/// Sets `flag` to `[ctrl ∧ select = k]`; calling again clears it.
fn toggle_flag(c: &mut Circuit, w: &Wires, ctrl: &[(usize, bool)], k: usize) {
    c.mcx_pattern(&with(ctrl, &pattern(&w.select, k)), w.flag);
}

fn prep_select(c: &mut Circuit, w: &Wires, weights: &[f64], delta: Option<f64>) -> Vec<crate::circuit::Gate> {
    let total: f64 = weights.iter().sum();
    let amps: Vec<f64> = weights.iter().map(|x| (x / total).sqrt()).collect();
    c.prepare_real_amplitudes(&w.select, &amps, delta)
}

fn unprep(c: &mut Circuit, gates: &[crate::circuit::Gate]) {
    let inv = Circuit::inverse_gates(gates).expect("preparation gates are invertible");
    c.push_all(&inv);
}

/// `Σ_k c_k Z_k` with `c_k ∝ 2^k` on the qubit of weight `2^k`, giving the
/// affine diagonal `1 − 2i/(N−1)`.
fn diag_l(c: &mut Circuit, w: &Wires, data: &[usize], ctrl: &[(usize, bool)], delta: Option<f64>) {
    let n = data.len();
    let weights: Vec<f64> = (0..n).map(|k| 2f64.powi(k as i32)).collect();
    let prep = prep_select(c, w, &weights, delta);
    for k in 0..n {
        toggle_flag(c, w, ctrl, k);
        c.push(GateKind::CZ, &[w.flag, data[n - 1 - k]]);
        toggle_flag(c, w, ctrl, k);
    }
    unprep(c, &prep);
}

/// Block-encodes `diag(1/r, −1)` on `d` using `anc`, when `ctrl` matches.
fn r_block(c: &mut Circuit, ctrl: &[(usize, bool)], d: usize, anc: usize, r: f64, delta: Option<f64>) {
    let theta = 2.0 * (1.0 / r).acos();
    let cond = with(ctrl, &[(d, false)]);
    c.push_rotation(GateKind::Ry(theta / 2.0), &[anc], delta);
    c.mcx_pattern(&cond, anc);
    c.push_rotation(GateKind::Ry(-theta / 2.0), &[anc], delta);
    c.mcx_pattern(&cond, anc);
    c.phase_flip_pattern(&with(ctrl, &[(d, true)]));
}

/// `D ∝ Σ_k X^{⊗k} ⊗ R ⊗ 𝟏_{n−k−1}`, one LCU term per leading position.
fn d_matrix(c: &mut Circuit, w: &Wires, data: &[usize], ctrl: &[(usize, bool)], delta: Option<f64>) {
    let n = data.len();
    let r = r_ratio(n);
    let weights: Vec<f64> = (0..n).map(|k| 2f64.powi((n - k - 1) as i32)).collect();
    let prep = prep_select(c, w, &weights, delta);
    let on = [(w.flag, true)];
    for k in 0..n {
        toggle_flag(c, w, ctrl, k);
        for &d in &data[..k] {
            c.push(GateKind::CX, &[w.flag, d]);
        }
        r_block(c, &on, data[k], w.aux[1], r, delta);
        let lower = &data[k + 1..];
        if !lower.is_empty() {
            // |s⟩⟨s| = H^m |0⟩⟨0| H^m, the projector flagged on aux[0]
            for &l in lower {
                c.push(GateKind::CH, &[w.flag, l]);
            }
            c.push(GateKind::CX, &[w.flag, w.aux[0]]);
            let zero: Vec<(usize, bool)> = lower.iter().map(|&l| (l, false)).collect();
            c.mcx_pattern(&with(&on, &zero), w.aux[0]);
            for &l in lower {
                c.push(GateKind::CH, &[w.flag, l]);
            }
        }
        toggle_flag(c, w, ctrl, k);
    }
    unprep(c, &prep);
}

fn xn(c: &mut Circuit, data: &[usize], ctrl: &[(usize, bool)]) {
    for &d in data {
        c.mcx_pattern(ctrl, d);
    }
}

fn emit(c: &mut Circuit, w: &Wires, data: &[usize], which: Component, ctrl: &[(usize, bool)], delta: Option<f64>) {
    match which {
        Component::Ones => ones(c, w, data, ctrl),
        Component::DiagL => diag_l(c, w, data, ctrl, delta),
        Component::D => d_matrix(c, w, data, ctrl, delta),
        Component::Xn => xn(c, data, ctrl),
        Component::Grover(_) => controlled_grover(c, data, ctrl),
        Component::R => unreachable!("R is emitted with its register size"),
        Component::DiagLOnes => {
            ones(c, w, data, ctrl);
            diag_l(c, w, data, ctrl, delta);
        }
        Component::OnesDiagL => {
            diag_l(c, w, data, ctrl, delta);
            ones(c, w, data, ctrl);
        }
        Component::Circulant => circulant_gates(c, w, data, delta).expect("weights solved before emitting"),
    }
}

fn circulant_gates(c: &mut Circuit, w: &Wires, data: &[usize], delta: Option<f64>) -> Result<()> {
    let weights = circulant_weights(data.len())?;
    let prep = c.prepare_real_amplitudes(&w.term, &weights.prep_amplitudes(), delta);
    for (t, &which) in TERMS.iter().enumerate() {
        let ctrl = pattern(&w.term, t);
        if weights.weights[t] < 0.0 {
            c.phase_flip_pattern(&ctrl);
        }
        emit(c, w, data, which, &ctrl, delta);
    }
    unprep(c, &prep);
    Ok(())
}

/// Scalar fit and derived figures for an extracted block.
#[derive(Clone, Debug, Serialize)]
pub struct BlockEncodingReport {
    pub n: usize,
    #[serde(skip)]
    pub block: DenseMatrix,
    /// `λ` in `block ≈ λ·target`.
    pub proportionality: [f64; 2],
    /// Subnormalization relative to the unit-norm target.
    pub alpha: f64,
    pub max_element: f64,
    /// `‖block − λ·target‖₂`.
    pub distance: f64,
}

impl BlockEncodingReport {
    pub fn fit(n: usize, block: DenseMatrix, target: &DenseMatrix) -> Result<BlockEncodingReport> {
        let tt = target.frobenius_inner(target);
        let lambda = if tt.re > 0.0 { target.frobenius_inner(&block) / tt.re } else { C64::from(0.0) };
        let distance = sim::matrix_distance(&block, &target.scale(lambda))?;
        Ok(BlockEncodingReport {
            n,
            proportionality: [lambda.re, lambda.im],
            alpha: lambda.norm() * target.spectral_norm(),
            max_element: block.max_abs(),
            distance,
            block,
        })
    }

    pub fn lambda(&self) -> C64 {
        C64::new(self.proportionality[0], self.proportionality[1])
    }
}

fn component_ledger(which: Component, n: usize, delta: f64) -> Result<ResourceEstimate> {
    let rot = estimator::rotation_cost(delta)?;
    let lg = |x: usize| if x <= 1 { 0.0 } else { (x as f64).log2().ceil() };
    let diag = 4.0 * lg(n) + rot + 2.0;
    let ones = estimator::mcx_t_depth(n);
    let depth = match which {
        Component::Circulant => estimator::circulant_t_depth(n, delta)?,
        Component::Ones => ones,
        Component::DiagL => diag,
        Component::D => {
            let h = (4.0 * lg(n) - 2.0).max(0.0);
            let x = 4.0 * lg(n);
            let cz = (8.0 * n as f64 - 12.0).max(0.0);
            2.0 * h + x + cz + 3.0 * rot
        }
        Component::Xn => 0.0,
        Component::Grover(k) => estimator::mcx_t_depth(k.saturating_sub(1)),
        Component::R => rot,
        Component::DiagLOnes | Component::OnesDiagL => diag + ones,
    };
    // the quoted figures are depths; the count is at least as large
    Ok(ResourceEstimate::deterministic(depth, depth))
}

fn data_width(which: Component, n: usize) -> usize {
    match which {
        Component::R => 1,
        Component::Grover(k) => k,
        _ => n,
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange(format!("δ = {delta} outside (0, 1)")));
    }
    Ok(())
}

/// Encoder circuit for one component, without simulating it.
pub fn component_circuit(which: Component, n: usize, delta: f64) -> Result<Circuit> {
    check_target(n)?;
    check_delta(delta)?;
    if which == Component::Circulant && n < MIN_CIRCULANT_QUBITS {
        return Err(Error::OutOfRange(format!("the circulant encoding needs n ≥ {MIN_CIRCULANT_QUBITS}")));
    }
    let dn = data_width(which, n);
    let term = if which == Component::Circulant { 2 } else { 0 };
    let (mut c, w) = layout(0, dn, term, select_width(dn))?;
    let data = w.data.clone();
    if which == Component::R {
        r_block(&mut c, &[], data[0], w.aux[1], r_ratio(n), Some(delta));
    } else {
        emit(&mut c, &w, &data, which, &[], Some(delta));
    }
    let ancilla = c.width() - dn;
    c.set_ledger(component_ledger(which, n, delta)?.with_ancilla(ancilla, 0));
    Ok(c)
}

/// Report for `circuit`'s block against `target` under `model`.
pub fn report(circuit: &Circuit, target: &DenseMatrix, model: &SynthesisModel) -> Result<BlockEncodingReport> {
    let data = circuit.qubits_of("data");
    let block = sim::extract_block(circuit, &data, model)?;
    BlockEncodingReport::fit(data.len(), block, target)
}

fn check_encode(n: usize) -> Result<()> {
    if n > MAX_ENCODE_QUBITS {
        return Err(Error::CapExceeded { what: "block encoding", qubits: n, cap: MAX_ENCODE_QUBITS });
    }
    Ok(())
}

/// Builds and verifies the encoder for one component in exact mode.
pub fn build_component_encoding(which: Component, n: usize, delta: f64) -> Result<(Circuit, BlockEncodingReport)> {
    check_encode(data_width(which, n))?;
    let c = component_circuit(which, n, delta)?;
    let r = report(&c, &target_matrix(which, n)?, &SynthesisModel::exact())?;
    Ok((c, r))
}

/// LCU encoding of the `n`-qubit linear circulant matrix.
pub fn build_circulant_encoding(n: usize, delta: f64) -> Result<(Circuit, BlockEncodingReport)> {
    if n < MIN_CIRCULANT_QUBITS {
        return Err(Error::OutOfRange(format!("the circulant encoding needs n ≥ {MIN_CIRCULANT_QUBITS}")));
    }
    build_component_encoding(Component::Circulant, n, delta)
}

/// Mean error `‖B̃ − B‖₂ / α` of the circulant encoding over seeded
/// rotation perturbations, with the prediction `(n/5 + 4)δ`.
pub fn measure_circulant_error(n: usize, delta: f64, seeds: usize, base_seed: u64) -> Result<(f64, f64)> {
    check_encode(n)?;
    let c = component_circuit(Component::Circulant, n, delta)?;
    let data = c.qubits_of("data");
    let exact = sim::extract_block(&c, &data, &SynthesisModel::exact())?;
    let alpha = lcu_alpha(n)?;
    let mut total = 0.0;
    for s in 0..seeds as u64 {
        let model = SynthesisModel::perturbed(base_seed.wrapping_add(s)).with_delta(delta);
        let b = sim::extract_block(&c, &data, &model)?;
        total += sim::matrix_distance(&b, &exact)? / alpha;
    }
    Ok((total / seeds.max(1) as f64, (n as f64 / 5.0 + 4.0) * delta))
}

/// `diag(h)` with `h_x = 1/x` and `h_0 = 0`.
pub fn harmonic_diagonal(n: usize) -> DenseMatrix {
    let entries: Vec<C64> =
        (0..dim(n)).map(|x| if x == 0 { C64::from(0.0) } else { C64::from(1.0 / x as f64) }).collect();
    DenseMatrix::diagonal(&entries)
}

/// Diagonal harmonic encoding: QFT, circulant encoding and QFT on `n + m`
/// qubits, with the top `m` kept at zero.
pub fn diag_harmonic_circuit(n: usize, m: usize, delta0: f64, delta1: f64) -> Result<Circuit> {
    let q = n + m;
    if n == 0 || q < MIN_CIRCULANT_QUBITS || q > MAX_TARGET_QUBITS {
        return Err(Error::OutOfRange(format!("n + m = {q} outside {MIN_CIRCULANT_QUBITS}..={MAX_TARGET_QUBITS}")));
    }
    check_delta(delta0)?;
    check_delta(delta1)?;
    let (mut c, w) = layout(m, n, 2, select_width(q))?;
    let data = w.data.clone();
    qft::append_qft(&mut c, &data, Some(delta0));
    circulant_gates(&mut c, &w, &data, Some(delta1))?;
    qft::append_qft(&mut c, &data, Some(delta0));
    let qft_depth = estimator::qft_t_depth(q, delta0)?;
    let qft_count = estimator::qft_t_count(q, delta0)?;
    let circ = estimator::circulant_t_depth(q, delta1)?;
    c.set_ledger(
        ResourceEstimate::deterministic(2.0 * qft_count + circ, 2.0 * qft_depth + circ)
            .with_ancilla(lcu_ancilla(q), m),
    );
    Ok(c)
}

/// Unit-norm block against `i·diag(h)`: `proportionality` is the
/// normalising scale, `alpha` the raw block norm.
pub fn diag_harmonic_report(circuit: &Circuit, model: &SynthesisModel) -> Result<BlockEncodingReport> {
    let data = circuit.qubits_of("data");
    let block = sim::extract_block(circuit, &data, model)?;
    let norm = block.spectral_norm();
    if norm == 0.0 {
        return Err(Error::Singular("empty block".into()));
    }
    let unit = block.scale(C64::from(1.0 / norm));
    let target = harmonic_diagonal(data.len()).scale(C64::i());
    let distance = sim::matrix_distance(&unit, &target)?;
    Ok(BlockEncodingReport {
        n: data.len(),
        proportionality: [1.0 / norm, 0.0],
        alpha: norm,
        max_element: block.max_abs(),
        distance,
        block,
    })
}

pub fn build_diag_harmonic(
    n: usize,
    m: usize,
    delta0: f64,
    delta1: f64,
) -> Result<(Circuit, BlockEncodingReport)> {
    check_encode(n + m)?;
    let c = diag_harmonic_circuit(n, m, delta0, delta1)?;
    let r = diag_harmonic_report(&c, &SynthesisModel::exact())?;
    Ok((c, r))
}

/// Predicted distance of the exact diagonal harmonic block.
pub fn diag_harmonic_prediction(n: usize, m: usize) -> f64 {
    PI / 2f64.powi((n + m) as i32)
}
