//! Gate-level circuit representation shared by every builder.
//!
//! Qubit 0 is the most significant bit of a basis index. Circuits carry a
//! [`ResourceEstimate`] ledger that builders fill in from closed-form cost
//! models; appending gates never touches it.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gate alphabet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    CX,
    CZ,
    CH,
    Swap,
    CSwap,
    CCX,
    /// `diag(e^{-iθ/2}, e^{iθ/2})`.
    Rz(f64),
    /// Real rotation `exp(-iθY/2)`.
    Ry(f64),
    /// Phase gate `diag(1, e^{iθ})`.
    Phase(f64),
    CRz(f64),
    CPhase(f64),
    /// Multi-controlled X; the last qubit is the target.
    Mcx,
    /// Adds one modulo `2^w` to the register formed by the trailing
    /// `qubits.len() - controls` qubits (first listed is most significant),
    /// conditioned on the leading `controls` qubits.
    Incrementer { controls: usize },
    Measure,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::T => "T",
            GateKind::Tdg => "Tdg",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::CH => "CH",
            GateKind::Swap => "SWAP",
            GateKind::CSwap => "CSWAP",
            GateKind::CCX => "CCX",
            GateKind::Rz(_) => "Rz",
            GateKind::Ry(_) => "Ry",
            GateKind::Phase(_) => "P",
            GateKind::CRz(_) => "CRz",
            GateKind::CPhase(_) => "CP",
            GateKind::Mcx => "MCX",
            GateKind::Incrementer { .. } => "Incrementer",
            GateKind::Measure => "Measure",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rz(a)
            | GateKind::Ry(a)
            | GateKind::Phase(a)
            | GateKind::CRz(a)
            | GateKind::CPhase(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_rotation(&self) -> bool {
        self.angle().is_some()
    }

    /// Same kind with a different angle; identity for non-rotations.
    pub fn with_angle(&self, angle: f64) -> GateKind {
        match *self {
            GateKind::Rz(_) => GateKind::Rz(angle),
            GateKind::Ry(_) => GateKind::Ry(angle),
            GateKind::Phase(_) => GateKind::Phase(angle),
            GateKind::CRz(_) => GateKind::CRz(angle),
            GateKind::CPhase(_) => GateKind::CPhase(angle),
            other => other,
        }
    }

    /// Fixed arity, or `None` for variadic kinds.
    fn arity(&self) -> Option<usize> {
        match self {
            GateKind::H
            | GateKind::X
            | GateKind::Z
            | GateKind::S
            | GateKind::Sdg
            | GateKind::T
            | GateKind::Tdg
            | GateKind::Rz(_)
            | GateKind::Ry(_)
            | GateKind::Phase(_)
            | GateKind::Measure => Some(1),
            GateKind::CX
            | GateKind::CZ
            | GateKind::CH
            | GateKind::Swap
            | GateKind::CRz(_)
            | GateKind::CPhase(_) => Some(2),
            GateKind::CSwap | GateKind::CCX => Some(3),
            GateKind::Mcx | GateKind::Incrementer { .. } => None,
        }
    }

    pub fn inverse(&self) -> Result<GateKind> {
        Ok(match *self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Rz(a) => GateKind::Rz(-a),
            GateKind::Ry(a) => GateKind::Ry(-a),
            GateKind::Phase(a) => GateKind::Phase(-a),
            GateKind::CRz(a) => GateKind::CRz(-a),
            GateKind::CPhase(a) => GateKind::CPhase(-a),
            GateKind::Incrementer { .. } | GateKind::Measure => {
                return Err(Error::NotInvertible(self.name().to_string()))
            }
            other => other,
        })
    }
}

/// A gate applied to an ordered list of qubits. `delta` marks a rotation
/// that is realised by approximate synthesis with accuracy δ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "GateRecord", try_from = "GateRecord")]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub delta: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Gate {
        Gate { kind, qubits, delta: None }
    }

    pub fn synthesized(kind: GateKind, qubits: Vec<usize>, delta: f64) -> Gate {
        Gate { kind, qubits, delta: Some(delta) }
    }

    /// Checks arity, qubit distinctness, bounds, angle and δ ranges.
    pub fn validate(&self, width: usize) -> Result<()> {
        if let Some(arity) = self.kind.arity() {
            if self.qubits.len() != arity {
                return Err(Error::InvalidGate(format!(
                    "{} expects {} qubits, got {}",
                    self.kind.name(),
                    arity,
                    self.qubits.len()
                )));
            }
        }
        match self.kind {
            GateKind::Mcx if self.qubits.is_empty() => {
                return Err(Error::InvalidGate("MCX needs a target".into()))
            }
            GateKind::Incrementer { controls } if self.qubits.len() <= controls => {
                return Err(Error::InvalidGate("Incrementer register is empty".into()))
            }
            _ => {}
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= width {
                return Err(Error::QubitOutOfRange { qubit: q, width });
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::InvalidGate(format!(
                    "{} repeats qubit {q}",
                    self.kind.name()
                )));
            }
        }
        if let Some(a) = self.kind.angle() {
            if !a.is_finite() {
                return Err(Error::InvalidGate(format!("non-finite angle {a}")));
            }
        }
        if let Some(d) = self.delta {
            if !self.kind.is_rotation() {
                return Err(Error::InvalidGate(format!(
                    "{} cannot carry a synthesis accuracy",
                    self.kind.name()
                )));
            }
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::InvalidGate(format!("synthesis accuracy {d} outside (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Gate> {
        Ok(Gate { kind: self.kind.inverse()?, qubits: self.qubits.clone(), delta: self.delta })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum KindTag {
    H,
    X,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    CX,
    CZ,
    CH,
    #[serde(rename = "SWAP")]
    Swap,
    #[serde(rename = "CSWAP")]
    CSwap,
    CCX,
    Rz,
    Ry,
    P,
    CRz,
    CP,
    MCX,
    Incrementer,
    Measure,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    kind: KindTag,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    controls: Option<usize>,
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        let (kind, controls) = match g.kind {
            GateKind::H => (KindTag::H, None),
            GateKind::X => (KindTag::X, None),
            GateKind::Z => (KindTag::Z, None),
            GateKind::S => (KindTag::S, None),
            GateKind::Sdg => (KindTag::Sdg, None),
            GateKind::T => (KindTag::T, None),
            GateKind::Tdg => (KindTag::Tdg, None),
            GateKind::CX => (KindTag::CX, None),
            GateKind::CZ => (KindTag::CZ, None),
            GateKind::CH => (KindTag::CH, None),
            GateKind::Swap => (KindTag::Swap, None),
            GateKind::CSwap => (KindTag::CSwap, None),
            GateKind::CCX => (KindTag::CCX, None),
            GateKind::Rz(_) => (KindTag::Rz, None),
            GateKind::Ry(_) => (KindTag::Ry, None),
            GateKind::Phase(_) => (KindTag::P, None),
            GateKind::CRz(_) => (KindTag::CRz, None),
            GateKind::CPhase(_) => (KindTag::CP, None),
            GateKind::Mcx => (KindTag::MCX, None),
            GateKind::Incrementer { controls } => (KindTag::Incrementer, Some(controls)),
            GateKind::Measure => (KindTag::Measure, None),
        };
        GateRecord { kind, qubits: g.qubits, angle: g.kind.angle(), delta: g.delta, controls }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = String;

    fn try_from(r: GateRecord) -> std::result::Result<Self, Self::Error> {
        let angle = |tag: &str| r.angle.ok_or_else(|| format!("gate `{tag}` requires an angle"));
        let kind = match r.kind {
            KindTag::H => GateKind::H,
            KindTag::X => GateKind::X,
            KindTag::Z => GateKind::Z,
            KindTag::S => GateKind::S,
            KindTag::Sdg => GateKind::Sdg,
            KindTag::T => GateKind::T,
            KindTag::Tdg => GateKind::Tdg,
            KindTag::CX => GateKind::CX,
            KindTag::CZ => GateKind::CZ,
            KindTag::CH => GateKind::CH,
            KindTag::Swap => GateKind::Swap,
            KindTag::CSwap => GateKind::CSwap,
            KindTag::CCX => GateKind::CCX,
            KindTag::Rz => GateKind::Rz(angle("Rz")?),
            KindTag::Ry => GateKind::Ry(angle("Ry")?),
            KindTag::P => GateKind::Phase(angle("P")?),
            KindTag::CRz => GateKind::CRz(angle("CRz")?),
            KindTag::CP => GateKind::CPhase(angle("CP")?),
            KindTag::MCX => GateKind::Mcx,
            KindTag::Incrementer => GateKind::Incrementer {
                controls: r
                    .controls
                    .ok_or_else(|| "gate `Incrementer` requires `controls`".to_string())?,
            },
            KindTag::Measure => GateKind::Measure,
        };
        if r.angle.is_some() && !kind.is_rotation() {
            return Err(format!("gate `{}` does not take an angle", kind.name()));
        }
        Ok(Gate { kind, qubits: r.qubits, delta: r.delta })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegisterKind {
    Data,
    CleanAncilla,
    PersistentAncilla,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Register {
    pub start: usize,
    pub len: usize,
    pub kind: RegisterKind,
}

impl Register {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.range().collect()
    }
}

/// Resource ledger attached to a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceEstimate {
    pub t_count: f64,
    pub t_depth: f64,
    pub expected_t_depth: f64,
    pub clean_ancilla: usize,
    pub persistent_ancilla: usize,
    pub success_prob: f64,
}

impl Default for ResourceEstimate {
    fn default() -> Self {
        ResourceEstimate {
            t_count: 0.0,
            t_depth: 0.0,
            expected_t_depth: 0.0,
            clean_ancilla: 0,
            persistent_ancilla: 0,
            success_prob: 1.0,
        }
    }
}

impl ResourceEstimate {
    /// Ledger for a circuit repeated until its post-selection succeeds:
    /// expected T-depth is `t_depth / success_prob`.
    pub fn repeated(t_count: f64, t_depth: f64, success_prob: f64) -> ResourceEstimate {
        ResourceEstimate {
            t_count,
            t_depth,
            expected_t_depth: t_depth / success_prob,
            success_prob,
            ..Default::default()
        }
    }

    pub fn deterministic(t_count: f64, t_depth: f64) -> ResourceEstimate {
        ResourceEstimate::repeated(t_count, t_depth, 1.0)
    }

    pub fn with_ancilla(mut self, clean: usize, persistent: usize) -> ResourceEstimate {
        self.clean_ancilla = clean;
        self.persistent_ancilla = persistent;
        self
    }

    /// Field-wise sum; success probabilities multiply.
    pub fn combine(&self, other: &ResourceEstimate) -> ResourceEstimate {
        ResourceEstimate {
            t_count: self.t_count + other.t_count,
            t_depth: self.t_depth + other.t_depth,
            expected_t_depth: self.expected_t_depth + other.expected_t_depth,
            clean_ancilla: self.clean_ancilla + other.clean_ancilla,
            persistent_ancilla: self.persistent_ancilla + other.persistent_ancilla,
            success_prob: self.success_prob * other.success_prob,
        }
    }

    pub fn is_well_formed(&self) -> bool {
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        finite_nonneg(self.t_count)
            && finite_nonneg(self.t_depth)
            && finite_nonneg(self.expected_t_depth)
            && self.success_prob > 0.0
            && self.success_prob <= 1.0
            && self.t_depth <= self.t_count + 1e-9
    }
}

/// An ordered gate list over named registers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    width: usize,
    registers: BTreeMap<String, Register>,
    gates: Vec<Gate>,
    ledger: ResourceEstimate,
}

impl Circuit {
    /// Circuit with one data register named `q` spanning all qubits.
    pub fn new(width: usize) -> Circuit {
        let mut registers = BTreeMap::new();
        if width > 0 {
            registers.insert(
                "q".to_string(),
                Register { start: 0, len: width, kind: RegisterKind::Data },
            );
        }
        Circuit { width, registers, gates: Vec::new(), ledger: ResourceEstimate::default() }
    }

    /// Lays registers out consecutively in the given order.
    pub fn with_registers(layout: &[(&str, usize, RegisterKind)]) -> Result<Circuit> {
        let mut registers = BTreeMap::new();
        let mut start = 0;
        for &(name, len, kind) in layout {
            if len == 0 {
                continue;
            }
            if registers.insert(name.to_string(), Register { start, len, kind }).is_some() {
                return Err(Error::RegisterMismatch(format!("duplicate register `{name}`")));
            }
            start += len;
        }
        Ok(Circuit { width: start, registers, gates: Vec::new(), ledger: ResourceEstimate::default() })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn registers(&self) -> &BTreeMap<String, Register> {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<Register> {
        self.registers
            .get(name)
            .copied()
            .ok_or_else(|| Error::RegisterMismatch(format!("no register named `{name}`")))
    }

    /// Qubits of a register, or an empty list when it does not exist
    /// (zero-length registers are not stored).
    pub fn qubits_of(&self, name: &str) -> Vec<usize> {
        self.registers.get(name).map(Register::qubits).unwrap_or_default()
    }

    pub fn ledger(&self) -> &ResourceEstimate {
        &self.ledger
    }

    pub fn set_ledger(&mut self, ledger: ResourceEstimate) {
        self.ledger = ledger;
    }

    pub fn append(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.append(g)?;
        }
        Ok(())
    }

    /// Gates of `a` followed by gates of `b`, ledgers combined.
    pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit> {
        if a.width != b.width || a.registers != b.registers {
            return Err(Error::RegisterMismatch(
                "composed circuits must share width and register layout".into(),
            ));
        }
        let mut gates = a.gates.clone();
        gates.extend(b.gates.iter().cloned());
        Ok(Circuit {
            width: a.width,
            registers: a.registers.clone(),
            gates,
            ledger: a.ledger.combine(&b.ledger),
        })
    }

    /// Gate list of the adjoint circuit.
    pub fn inverse_gates(gates: &[Gate]) -> Result<Vec<Gate>> {
        gates.iter().rev().map(Gate::inverse).collect()
    }

    /// Register ranges partition `[0, width)`.
    pub fn check_layout(&self) -> Result<()> {
        let mut covered = vec![false; self.width];
        for (name, r) in &self.registers {
            for q in r.range() {
                match covered.get_mut(q) {
                    Some(c) if !*c => *c = true,
                    _ => {
                        return Err(Error::RegisterMismatch(format!(
                            "register `{name}` overlaps or exceeds width"
                        )))
                    }
                }
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(Error::RegisterMismatch("registers do not cover every qubit".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialisation cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let c: Circuit = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        c.check_layout()?;
        for g in &c.gates {
            g.validate(c.width)?;
        }
        Ok(c)
    }

    // Builder helpers used by the constructions in this crate.

    pub(crate) fn push(&mut self, kind: GateKind, qubits: &[usize]) {
        let g = Gate::new(kind, qubits.to_vec());
        debug_assert!(g.validate(self.width).is_ok(), "{:?}", g);
        self.gates.push(g);
    }

    pub(crate) fn push_rotation(&mut self, kind: GateKind, qubits: &[usize], delta: Option<f64>) {
        let g = Gate { kind, qubits: qubits.to_vec(), delta };
        debug_assert!(g.validate(self.width).is_ok(), "{:?}", g);
        self.gates.push(g);
    }

    pub(crate) fn push_all(&mut self, gates: &[Gate]) {
        self.gates.extend_from_slice(gates);
    }

    /// X on `target` when every `(qubit, value)` control matches.
    /// Zero-valued controls are realised by X conjugation.
    pub(crate) fn mcx_pattern(&mut self, controls: &[(usize, bool)], target: usize) {
        self.flip_zero_controls(controls);
        match controls.len() {
            0 => self.push(GateKind::X, &[target]),
            1 => self.push(GateKind::CX, &[controls[0].0, target]),
            2 => self.push(GateKind::CCX, &[controls[0].0, controls[1].0, target]),
            _ => {
                let mut qs: Vec<usize> = controls.iter().map(|c| c.0).collect();
                qs.push(target);
                self.push(GateKind::Mcx, &qs);
            }
        }
        self.flip_zero_controls(controls);
    }

    /// Phase −1 on the basis pattern described by `pattern`.
    pub(crate) fn phase_flip_pattern(&mut self, pattern: &[(usize, bool)]) {
        let Some((&(target, value), rest)) = pattern.split_last() else {
            return;
        };
        if !value {
            self.push(GateKind::X, &[target]);
        }
        if rest.is_empty() {
            self.push(GateKind::Z, &[target]);
        } else if rest.len() == 1 && rest[0].1 {
            self.push(GateKind::CZ, &[rest[0].0, target]);
        } else {
            self.push(GateKind::H, &[target]);
            self.mcx_pattern(rest, target);
            self.push(GateKind::H, &[target]);
        }
        if !value {
            self.push(GateKind::X, &[target]);
        }
    }

    fn flip_zero_controls(&mut self, controls: &[(usize, bool)]) {
        for &(q, v) in controls {
            if !v {
                self.push(GateKind::X, &[q]);
            }
        }
    }

    /// Prepares `Σ_i amps[i] |i⟩` on `qubits` from `|0…0⟩` using a binary
    /// tree of Ry rotations. Amplitudes must be non-negative; missing
    /// trailing entries are zero. Returns the emitted gates so callers can
    /// append the adjoint.
    pub(crate) fn prepare_real_amplitudes(
        &mut self,
        qubits: &[usize],
        amps: &[f64],
        delta: Option<f64>,
    ) -> Vec<Gate> {
        let start = self.gates.len();
        let dim = 1usize << qubits.len();
        let mut weights = vec![0.0; dim];
        for (w, &a) in weights.iter_mut().zip(amps) {
            debug_assert!(a >= 0.0);
            *w = a * a;
        }
        for (level, &q) in qubits.iter().enumerate() {
            let span = dim >> level;
            let half = span / 2;
            let mut angles = Vec::with_capacity(1 << level);
            for prefix in 0..(1usize << level) {
                let base = prefix * span;
                let zero: f64 = weights[base..base + half].iter().sum();
                let one: f64 = weights[base + half..base + span].iter().sum();
                let theta = if zero + one > 0.0 {
                    Some(2.0 * one.sqrt().atan2(zero.sqrt()))
                } else {
                    None
                };
                angles.push(theta);
            }
            let live: Vec<f64> = angles.iter().flatten().copied().collect();
            let Some(&first) = live.first() else { continue };
            if live.iter().all(|a| (a - first).abs() < 1e-14) {
                if first != 0.0 {
                    self.push_rotation(GateKind::Ry(first), &[q], delta);
                }
                continue;
            }
            for (prefix, theta) in angles.iter().enumerate() {
                let Some(theta) = *theta else { continue };
                if theta == 0.0 {
                    continue;
                }
                let pattern: Vec<(usize, bool)> = (0..level)
                    .map(|j| (qubits[j], (prefix >> (level - 1 - j)) & 1 == 1))
                    .collect();
                self.push_rotation(GateKind::Ry(theta / 2.0), &[q], delta);
                self.mcx_pattern(&pattern, q);
                self.push_rotation(GateKind::Ry(-theta / 2.0), &[q], delta);
                self.mcx_pattern(&pattern, q);
            }
        }
        self.gates[start..].to_vec()
    }
}

/// Per-gate T cost in the closed-form costing mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateCost {
    pub t_count: f64,
    pub t_depth: f64,
}

/// Closed-form T cost of a single gate.
///
/// Toffoli-like gates (CCX, CSWAP, MCX) are charged per compute/uncompute
/// pair. Rotations need `delta` unless their angle is an exact Clifford+T
/// angle; a `delta` on a non-rotation is rejected.
pub fn cost_of_gate(kind: &GateKind, delta: Option<f64>) -> Result<GateCost> {
    let cost = |t_count: f64, t_depth: f64| Ok(GateCost { t_count, t_depth });
    if delta.is_some() && !kind.is_rotation() {
        return Err(Error::InvalidGate(format!(
            "{} is not a synthesized rotation",
            kind.name()
        )));
    }
    if let Some(d) = delta {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::OutOfRange(format!("synthesis accuracy {d}")));
        }
        let r = crate::estimator::rotation_cost(d)?;
        return cost(r, r);
    }
    match *kind {
        GateKind::T | GateKind::Tdg => cost(1.0, 1.0),
        GateKind::CH => cost(2.0, 2.0),
        GateKind::CCX | GateKind::CSwap => cost(4.0, 2.0),
        GateKind::Mcx | GateKind::Incrementer { .. } => Err(Error::InvalidGate(format!(
            "{} cost depends on its width; use cost_of_gate_on",
            kind.name()
        ))),
        GateKind::Rz(a) | GateKind::Phase(a) => match exact_phase_steps(a) {
            Some(k) if k % 2 == 1 => cost(1.0, 1.0),
            Some(_) => cost(0.0, 0.0),
            None => Err(Error::MissingDelta(kind.name().to_string())),
        },
        GateKind::CPhase(a) | GateKind::CRz(a) => match exact_phase_steps(a) {
            Some(0) => cost(0.0, 0.0),
            Some(k) if k % 4 == 0 => cost(0.0, 0.0),
            // controlled-S and controlled-T layers of the QFT
            Some(k) if k % 2 == 0 => cost(3.0, 2.0),
            Some(_) => cost(5.0, 5.0),
            None => Err(Error::MissingDelta(kind.name().to_string())),
        },
        GateKind::Ry(a) => match exact_phase_steps(a) {
            Some(k) if k % 2 == 0 => cost(0.0, 0.0),
            _ => Err(Error::MissingDelta(kind.name().to_string())),
        },
        _ => cost(0.0, 0.0),
    }
}

/// Formula-mode cost including width-dependent kinds.
pub fn cost_of_gate_on(gate: &Gate) -> Result<GateCost> {
    match gate.kind {
        GateKind::Mcx => {
            let k = gate.qubits.len() - 1;
            Ok(match k {
                0 | 1 => GateCost { t_count: 0.0, t_depth: 0.0 },
                2 => GateCost { t_count: 4.0, t_depth: 2.0 },
                _ => GateCost {
                    t_count: 4.0 * (k as f64 - 1.0),
                    t_depth: 4.0 * (k as f64).log2().ceil(),
                },
            })
        }
        GateKind::Incrementer { .. } => {
            let c = 4.0 * gate.qubits.len() as f64;
            Ok(GateCost { t_count: c, t_depth: c })
        }
        _ => cost_of_gate(&gate.kind, gate.delta),
    }
}

/// Multiple of π/4 the angle equals, if any.
fn exact_phase_steps(angle: f64) -> Option<i64> {
    let steps = angle / (std::f64::consts::PI / 4.0);
    let r = steps.round();
    ((steps - r).abs() < 1e-12).then(|| (r as i64).rem_euclid(8))
}

/// Result of [`naive_cost`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaiveCost {
    pub t_count: f64,
    pub t_depth: f64,
    /// Unsynthesized non-Clifford rotations. Builders use these as
    /// stand-ins for injected resource states, which naive mode does not
    /// price.
    pub uncosted: usize,
}

/// Greedy T-layering with disjoint-qubit parallelism. Informational only;
/// builders report formula-mode ledgers.
pub fn naive_cost(circuit: &Circuit) -> Result<NaiveCost> {
    let mut depth = vec![0.0f64; circuit.width()];
    let mut t_count = 0.0;
    let mut uncosted = 0;
    for g in circuit.gates() {
        let c = match g.kind {
            // lone Toffoli, not a compute/uncompute pair
            GateKind::CCX | GateKind::CSwap => GateCost { t_count: 7.0, t_depth: 3.0 },
            GateKind::Mcx if g.qubits.len() > 3 => {
                let toffolis = 2.0 * (g.qubits.len() as f64 - 1.0) - 3.0;
                GateCost { t_count: 7.0 * toffolis, t_depth: 3.0 * toffolis }
            }
            _ => match cost_of_gate_on(g) {
                Ok(c) => c,
                Err(Error::MissingDelta(_)) => {
                    uncosted += 1;
                    continue;
                }
                Err(e) => return Err(e),
            },
        };
        if c.t_count == 0.0 {
            continue;
        }
        t_count += c.t_count;
        let start = g.qubits.iter().map(|&q| depth[q]).fold(0.0, f64::max);
        for &q in &g.qubits {
            depth[q] = start + c.t_depth;
        }
    }
    Ok(NaiveCost { t_count, t_depth: depth.into_iter().fold(0.0, f64::max), uncosted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_preserves_order_and_checks_bounds() {
        let mut c = Circuit::new(1);
        c.append(Gate::new(GateKind::H, vec![0])).unwrap();
        assert_eq!(c.len(), 1);

        let mut c = Circuit::new(2);
        c.append(Gate::new(GateKind::CX, vec![0, 1])).unwrap();
        c.append(Gate::new(GateKind::CX, vec![1, 0])).unwrap();
        assert_eq!(c.gates()[0].qubits, vec![0, 1]);
        assert_eq!(c.gates()[1].qubits, vec![1, 0]);
        assert_eq!(*c.ledger(), ResourceEstimate::default());

        let mut c = Circuit::new(3);
        let err = c.append(Gate::new(GateKind::H, vec![5])).unwrap_err();
        assert!(matches!(err, Error::QubitOutOfRange { qubit: 5, width: 3 }));
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::new(GateKind::CX, vec![1, 1]).validate(2).is_err());
        assert!(Gate::new(GateKind::Rz(f64::NAN), vec![0]).validate(1).is_err());
        assert!(Gate::synthesized(GateKind::Rz(0.3), vec![0], 1.5).validate(1).is_err());
        assert!(Gate::synthesized(GateKind::H, vec![0], 1e-3).validate(1).is_err());
        assert!(Gate::new(GateKind::CCX, vec![0, 1]).validate(3).is_err());
    }

    #[test]
    fn compose_sums_ledgers() {
        let empty = Circuit::new(2);
        let mut c = Circuit::new(2);
        c.append(Gate::new(GateKind::H, vec![0])).unwrap();
        c.set_ledger(ResourceEstimate::deterministic(4.0, 2.0));
        assert_eq!(Circuit::compose(&empty, &c).unwrap(), c);

        let mut b = Circuit::new(2);
        b.set_ledger(ResourceEstimate::repeated(2.0, 2.0, 0.625));
        let mut a = c.clone();
        a.set_ledger(ResourceEstimate::repeated(4.0, 2.0, 0.75));
        let ab = Circuit::compose(&a, &b).unwrap();
        assert_eq!(ab.ledger().t_count, 6.0);
        assert_eq!(ab.ledger().success_prob, 0.46875);

        let other = Circuit::new(3);
        assert!(Circuit::compose(&a, &other).is_err());
    }

    #[test]
    fn gate_costs() {
        assert_eq!(cost_of_gate(&GateKind::CH, None).unwrap(), GateCost { t_count: 2.0, t_depth: 2.0 });
        assert_eq!(cost_of_gate(&GateKind::H, None).unwrap(), GateCost { t_count: 0.0, t_depth: 0.0 });
        assert_eq!(cost_of_gate(&GateKind::T, None).unwrap().t_count, 1.0);
        assert_eq!(cost_of_gate(&GateKind::CCX, None).unwrap(), GateCost { t_count: 4.0, t_depth: 2.0 });
        let rz = cost_of_gate(&GateKind::Rz(0.123), Some(1e-9)).unwrap();
        assert!((rz.t_count - (1.15 * 1e9f64.log2() + 9.2)).abs() < 1e-12);
        assert!((rz.t_count - 43.58).abs() < 0.01);
        assert!(matches!(cost_of_gate(&GateKind::Rz(0.123), None), Err(Error::MissingDelta(_))));
        assert!(cost_of_gate(&GateKind::X, Some(1e-3)).is_err());
    }

    #[test]
    fn empty_circuit_serialises_with_empty_gate_array() {
        let c = Circuit::new(0);
        let text = c.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["gates"], serde_json::json!([]));
        assert_eq!(Circuit::from_json(&text).unwrap(), c);
    }

    #[test]
    fn malformed_kind_is_reported_with_position() {
        let text = r#"{"width":1,"registers":{"q":{"start":0,"len":1,"kind":"data"}},
            "gates":[{"kind":"Hadamard","qubits":[0]}],
            "ledger":{"t_count":0,"t_depth":0,"expected_t_depth":0,"clean_ancilla":0,"persistent_ancilla":0,"success_prob":1}}"#;
        match Circuit::from_json(text).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("Hadamard"), "{message}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn layout_must_partition() {
        let c = Circuit::with_registers(&[
            ("data", 2, RegisterKind::Data),
            ("anc", 1, RegisterKind::PersistentAncilla),
        ])
        .unwrap();
        assert_eq!(c.width(), 3);
        c.check_layout().unwrap();
        let text = c.to_json().replace("\"len\": 2", "\"len\": 1");
        assert!(Circuit::from_json(&text).is_err());
    }

    #[test]
    fn naive_mode_layers_parallel_t_gates() {
        let mut c = Circuit::new(3);
        c.push(GateKind::T, &[0]);
        c.push(GateKind::T, &[1]);
        c.push(GateKind::T, &[0]);
        c.push(GateKind::CCX, &[0, 1, 2]);
        c.push(GateKind::Ry(0.3), &[2]);
        let cost = naive_cost(&c).unwrap();
        assert_eq!(cost.uncosted, 1);
        assert_eq!(cost.t_count, 10.0);
        assert_eq!(cost.t_depth, 5.0);
    }
}
