//! Dense statevector engine and brute-force unitary oracle.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::C64;

/// Largest register `unitary_of` will expand by default.
pub const UNITARY_CAP: usize = 14;
/// Largest register a state run accepts.
pub const STATE_CAP: usize = 26;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(qubits: usize) -> StateVector {
        StateVector::basis(qubits, 0).expect("index 0 always exists")
    }

    pub fn basis(qubits: usize, index: usize) -> Result<StateVector> {
        if qubits > STATE_CAP {
            return Err(Error::CapExceeded { what: "state", qubits, cap: STATE_CAP });
        }
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::OutOfRange(format!("basis index {index} for {qubits} qubits")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { qubits, amps })
    }

    /// Wraps amplitudes without renormalising.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<StateVector> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::ShapeMismatch(format!("{dim} amplitudes is not a power of two")));
        }
        let qubits = dim.trailing_zeros() as usize;
        if qubits > STATE_CAP {
            return Err(Error::CapExceeded { what: "state", qubits, cap: STATE_CAP });
        }
        Ok(StateVector { qubits, amps })
    }

    /// Scales the amplitudes to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<StateVector> {
        let mut s = StateVector::from_amplitudes(amps)?;
        let norm = s.norm();
        if norm == 0.0 {
            return Err(Error::OutOfRange("zero vector cannot be normalised".into()));
        }
        s.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    pub fn from_real(amps: &[f64]) -> Result<StateVector> {
        StateVector::normalized(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        StateVector { qubits: self.qubits, amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        StateVector::from_amplitudes(amps)
    }

    pub fn to_dump(&self) -> StateDump {
        StateDump { qubits: self.qubits, amps: self.amps.iter().map(|a| [a.re, a.im]).collect() }
    }

    pub fn from_dump(dump: &StateDump) -> Result<StateVector> {
        let s = StateVector::from_amplitudes(
            dump.amps.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        )?;
        if s.qubits != dump.qubits {
            return Err(Error::ShapeMismatch(format!(
                "dump declares {} qubits but holds {} amplitudes",
                dump.qubits,
                s.dim()
            )));
        }
        Ok(s)
    }
}

/// Serialised form of a [`StateVector`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDump {
    pub qubits: usize,
    pub amps: Vec<[f64; 2]>,
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> DenseMatrix {
        DenseMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> DenseMatrix {
        DenseMatrix::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> DenseMatrix {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn from_real_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> DenseMatrix {
        DenseMatrix::from_fn(dim, |i, j| C64::new(f(i, j), 0.0))
    }

    pub fn diagonal(entries: &[C64]) -> DenseMatrix {
        DenseMatrix::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn from_columns(columns: &[Vec<C64>]) -> DenseMatrix {
        let dim = columns.len();
        DenseMatrix::from_fn(dim, |i, j| columns[j][i])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    fn check_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_shape(other)?;
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        out.data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for (r, b) in row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *r += a * b;
                }
            }
        });
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        (0..n).map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_shape(other)?;
        Ok(DenseMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_shape(other)?;
        Ok(DenseMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, factor: C64) -> DenseMatrix {
        DenseMatrix { dim: self.dim, data: self.data.iter().map(|a| a * factor).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    m = m.max(self.get(i, j).norm());
                }
            }
        }
        m
    }

    /// Frobenius inner product `Σ conj(a_ij) b_ij`.
    pub fn frobenius_inner(&self, other: &DenseMatrix) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self).expect("square");
        p.sub(&DenseMatrix::identity(self.dim)).expect("square").max_abs()
    }

    /// Largest singular value by power iteration on `A†A`.
    pub fn spectral_norm(&self) -> f64 {
        let n = self.dim;
        if n == 0 || self.max_abs() == 0.0 {
            return 0.0;
        }
        let adj = self.adjoint();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut v: Vec<C64> =
            (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let mut sigma2 = 0.0;
        for _ in 0..20_000 {
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            let w = adj.apply(&self.apply(&v));
            let next = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
            v = w;
            if (next - sigma2).abs() <= 1e-12 * next {
                sigma2 = next;
                break;
            }
            sigma2 = next;
        }
        // one more Rayleigh step for the converged vector
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let av = self.apply(&v);
        let rayleigh = av.iter().map(|x| x.norm_sqr()).sum::<f64>();
        rayleigh.max(sigma2).sqrt()
    }

    /// Sub-matrix on the given row/column indices.
    pub fn submatrix(&self, indices: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(indices.len(), |i, j| self.get(indices[i], indices[j]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthesisMode {
    Exact,
    Perturbed { seed: u64 },
}

/// How synthesized rotations are simulated. In perturbed mode each
/// synthesized rotation, in gate order, gets its angle shifted by `±δ`
/// with the sign drawn from a generator seeded by `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisModel {
    pub mode: SynthesisMode,
    /// Replaces every gate's own accuracy when set.
    pub delta: Option<f64>,
}

impl SynthesisModel {
    pub fn exact() -> SynthesisModel {
        SynthesisModel { mode: SynthesisMode::Exact, delta: None }
    }

    pub fn perturbed(seed: u64) -> SynthesisModel {
        SynthesisModel { mode: SynthesisMode::Perturbed { seed }, delta: None }
    }

    pub fn with_delta(mut self, delta: f64) -> SynthesisModel {
        self.delta = Some(delta);
        self
    }

    /// Concrete gate list with perturbations applied.
    pub fn realise(&self, gates: &[Gate]) -> Vec<GateKind> {
        let SynthesisMode::Perturbed { seed } = self.mode else {
            return gates.iter().map(|g| g.kind).collect();
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        gates
            .iter()
            .map(|g| match (g.delta, g.kind.angle()) {
                (Some(d), Some(theta)) => {
                    let d = self.delta.unwrap_or(d);
                    let eta = if rng.random_bool(0.5) { d } else { -d };
                    g.kind.with_angle(theta + eta)
                }
                _ => g.kind,
            })
            .collect()
    }
}

/// Applies the circuit to `input`.
pub fn run(circuit: &Circuit, input: &StateVector, model: &SynthesisModel) -> Result<StateVector> {
    if circuit.width() != input.qubits {
        return Err(Error::WidthMismatch { circuit: circuit.width(), state: input.qubits });
    }
    let kinds = model.realise(circuit.gates());
    let mut amps = input.amps.clone();
    for (g, kind) in circuit.gates().iter().zip(&kinds) {
        apply_gate(&mut amps, input.qubits, kind, &g.qubits)?;
    }
    Ok(StateVector { qubits: input.qubits, amps })
}

/// Columns are `run(circuit, |j⟩)` under `model`.
pub fn unitary_of_with(circuit: &Circuit, model: &SynthesisModel, cap: usize) -> Result<DenseMatrix> {
    let q = circuit.width();
    if q > cap {
        return Err(Error::CapExceeded { what: "unitary", qubits: q, cap });
    }
    let kinds = model.realise(circuit.gates());
    let dim = 1usize << q;
    let columns: Vec<Vec<C64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut amps = vec![ZERO; dim];
            amps[j] = ONE;
            for (g, kind) in circuit.gates().iter().zip(&kinds) {
                apply_gate(&mut amps, q, kind, &g.qubits)?;
            }
            Ok(amps)
        })
        .collect::<Result<_>>()?;
    Ok(DenseMatrix::from_columns(&columns))
}

pub fn unitary_of(circuit: &Circuit) -> Result<DenseMatrix> {
    unitary_of_with(circuit, &SynthesisModel::exact(), UNITARY_CAP)
}

/// Block of the circuit's unitary on inputs and outputs where every qubit
/// outside `data` is `|0⟩`. `data` is listed most significant first.
pub fn extract_block(circuit: &Circuit, data: &[usize], model: &SynthesisModel) -> Result<DenseMatrix> {
    let q = circuit.width();
    if data.len() > UNITARY_CAP {
        return Err(Error::CapExceeded { what: "block", qubits: data.len(), cap: UNITARY_CAP });
    }
    if q > STATE_CAP {
        return Err(Error::CapExceeded { what: "state", qubits: q, cap: STATE_CAP });
    }
    let kinds = model.realise(circuit.gates());
    let embed = |j: usize| -> usize {
        data.iter()
            .enumerate()
            .filter(|&(b, _)| (j >> (data.len() - 1 - b)) & 1 == 1)
            .map(|(_, &qb)| 1usize << (q - 1 - qb))
            .sum()
    };
    let bdim = 1usize << data.len();
    let rows: Vec<usize> = (0..bdim).map(embed).collect();
    let columns: Vec<Vec<C64>> = (0..bdim)
        .into_par_iter()
        .map(|j| {
            let mut amps = vec![ZERO; 1 << q];
            amps[rows[j]] = ONE;
            for (g, kind) in circuit.gates().iter().zip(&kinds) {
                apply_gate(&mut amps, q, kind, &g.qubits)?;
            }
            Ok(rows.iter().map(|&r| amps[r]).collect())
        })
        .collect::<Result<_>>()?;
    Ok(DenseMatrix::from_columns(&columns))
}

/// Projects `qubits` onto `bits` and renormalises, keeping the width.
pub fn postselect(state: &StateVector, qubits: &[usize], bits: &[bool]) -> Result<(StateVector, f64)> {
    let (mask, value) = pattern_masks(state.qubits, qubits, bits)?;
    let mut amps = state.amps.clone();
    let mut prob = 0.0;
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask == value {
            prob += a.norm_sqr();
        } else {
            *a = ZERO;
        }
    }
    if prob < 1e-300 {
        return Err(Error::ImpossibleOutcome(prob));
    }
    let s = prob.sqrt();
    amps.iter_mut().for_each(|a| *a /= s);
    Ok((StateVector { qubits: state.qubits, amps }, prob))
}

/// Like [`postselect`] but removes the measured qubits from the result.
pub fn project_out(state: &StateVector, qubits: &[usize], bits: &[bool]) -> Result<(StateVector, f64)> {
    let (mask, value) = pattern_masks(state.qubits, qubits, bits)?;
    let q = state.qubits;
    let keep: Vec<usize> = (0..q).filter(|b| !qubits.contains(b)).collect();
    let mut amps = Vec::with_capacity(1 << keep.len());
    for j in 0..(1usize << keep.len()) {
        let mut i = value;
        for (b, &qb) in keep.iter().enumerate() {
            if (j >> (keep.len() - 1 - b)) & 1 == 1 {
                i |= 1 << (q - 1 - qb);
            }
        }
        debug_assert_eq!(i & mask, value);
        amps.push(state.amps[i]);
    }
    let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if prob < 1e-300 {
        return Err(Error::ImpossibleOutcome(prob));
    }
    let s = prob.sqrt();
    amps.iter_mut().for_each(|a| *a /= s);
    Ok((StateVector::from_amplitudes(amps)?, prob))
}

/// Outcome distribution of measuring `qubits` (first listed most significant).
pub fn outcome_probabilities(state: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    let q = state.qubits;
    for &b in qubits {
        if b >= q {
            return Err(Error::QubitOutOfRange { qubit: b, width: q });
        }
    }
    let mut probs = vec![0.0; 1 << qubits.len()];
    for (i, a) in state.amps.iter().enumerate() {
        let mut k = 0;
        for &b in qubits {
            k = (k << 1) | ((i >> (q - 1 - b)) & 1);
        }
        probs[k] += a.norm_sqr();
    }
    Ok(probs)
}

fn pattern_masks(q: usize, qubits: &[usize], bits: &[bool]) -> Result<(usize, usize)> {
    if qubits.len() != bits.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} qubits but {} outcome bits",
            qubits.len(),
            bits.len()
        )));
    }
    let mut mask = 0;
    let mut value = 0;
    for (&b, &v) in qubits.iter().zip(bits) {
        if b >= q {
            return Err(Error::QubitOutOfRange { qubit: b, width: q });
        }
        mask |= 1 << (q - 1 - b);
        if v {
            value |= 1 << (q - 1 - b);
        }
    }
    Ok((mask, value))
}

/// `min_φ ‖a − e^{iφ} b‖`.
pub fn distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    // align the phase first; the closed form √(|a|² + |b|² − 2|⟨a,b⟩|) loses
    // half the digits to cancellation
    let overlap = b.inner(a);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| (x - phase * y).norm_sqr()).sum::<f64>().sqrt())
}

/// `‖a − b‖` without phase alignment.
pub fn distance_raw(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
}

/// Spectral norm of `a − b`.
pub fn matrix_distance(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    Ok(a.sub(b)?.spectral_norm())
}

/// Largest entry magnitude of `a − b`.
pub fn matrix_distance_max(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    Ok(a.sub(b)?.max_abs())
}

fn bit(q: usize, qubit: usize) -> usize {
    1usize << (q - 1 - qubit)
}

/// Calls `f(base)` for every index whose `fixed` bits are all zero.
fn for_each_base(q: usize, fixed: usize, mut f: impl FnMut(usize)) {
    let positions: Vec<u32> = (0..q as u32).filter(|p| fixed >> p & 1 == 1).collect();
    let free = q - positions.len();
    for c in 0..(1usize << free) {
        let mut i = c;
        for &p in &positions {
            let low = i & ((1usize << p) - 1);
            i = low | ((i >> p) << (p + 1));
        }
        f(i);
    }
}

/// Applies a 2×2 matrix `[[m00, m01], [m10, m11]]` to `target` when every
/// control qubit is 1.
fn apply_1q(amps: &mut [C64], q: usize, controls: &[usize], target: usize, m: [C64; 4]) {
    let t = bit(q, target);
    let cmask: usize = controls.iter().map(|&c| bit(q, c)).sum();
    for_each_base(q, cmask | t, |base| {
        let i = base | cmask;
        let j = i | t;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m[0] * a + m[1] * b;
        amps[j] = m[2] * a + m[3] * b;
    });
}

/// Multiplies amplitudes with every listed qubit equal to 1 by `phase`.
fn apply_phase(amps: &mut [C64], q: usize, qubits: &[usize], phase: C64) {
    let mask: usize = qubits.iter().map(|&c| bit(q, c)).sum();
    for_each_base(q, mask, |base| amps[base | mask] *= phase);
}

fn apply_x(amps: &mut [C64], q: usize, controls: &[usize], target: usize) {
    let t = bit(q, target);
    let cmask: usize = controls.iter().map(|&c| bit(q, c)).sum();
    for_each_base(q, cmask | t, |base| {
        let i = base | cmask;
        amps.swap(i, i | t);
    });
}

fn apply_swap(amps: &mut [C64], q: usize, controls: &[usize], a: usize, b: usize) {
    let (ma, mb) = (bit(q, a), bit(q, b));
    let cmask: usize = controls.iter().map(|&c| bit(q, c)).sum();
    for_each_base(q, cmask | ma | mb, |base| {
        let i = base | cmask;
        amps.swap(i | ma, i | mb);
    });
}

fn apply_increment(amps: &mut [C64], q: usize, controls: &[usize], register: &[usize]) {
    let cmask: usize = controls.iter().map(|&c| bit(q, c)).sum();
    let rmask: usize = register.iter().map(|&r| bit(q, r)).sum();
    let w = register.len();
    let write = |value: usize| -> usize {
        register
            .iter()
            .enumerate()
            .filter(|&(k, _)| (value >> (w - 1 - k)) & 1 == 1)
            .map(|(_, &r)| bit(q, r))
            .sum()
    };
    let images: Vec<usize> = (0..(1usize << w)).map(write).collect();
    let mut cycle = vec![ZERO; 1 << w];
    for_each_base(q, cmask | rmask, |base| {
        let i = base | cmask;
        for (v, &img) in images.iter().enumerate() {
            cycle[(v + 1) % images.len()] = amps[i | img];
        }
        for (v, &img) in images.iter().enumerate() {
            amps[i | img] = cycle[v];
        }
    });
}

fn expi(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub(crate) fn apply_gate(amps: &mut [C64], q: usize, kind: &GateKind, qs: &[usize]) -> Result<()> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let hm = [h, h, h, -h];
    match *kind {
        GateKind::H => apply_1q(amps, q, &[], qs[0], hm),
        GateKind::X => apply_x(amps, q, &[], qs[0]),
        GateKind::Z => apply_phase(amps, q, qs, -ONE),
        GateKind::S => apply_phase(amps, q, qs, C64::i()),
        GateKind::Sdg => apply_phase(amps, q, qs, -C64::i()),
        GateKind::T => apply_phase(amps, q, qs, expi(std::f64::consts::FRAC_PI_4)),
        GateKind::Tdg => apply_phase(amps, q, qs, expi(-std::f64::consts::FRAC_PI_4)),
        GateKind::CX => apply_x(amps, q, &qs[..1], qs[1]),
        GateKind::CCX => apply_x(amps, q, &qs[..2], qs[2]),
        GateKind::Mcx => {
            let (t, c) = qs.split_last().expect("validated");
            apply_x(amps, q, c, *t)
        }
        GateKind::CZ => apply_phase(amps, q, qs, -ONE),
        GateKind::CH => apply_1q(amps, q, &qs[..1], qs[1], hm),
        GateKind::Swap => apply_swap(amps, q, &[], qs[0], qs[1]),
        GateKind::CSwap => apply_swap(amps, q, &qs[..1], qs[1], qs[2]),
        GateKind::Rz(t) => apply_1q(amps, q, &[], qs[0], [expi(-t / 2.0), ZERO, ZERO, expi(t / 2.0)]),
        GateKind::CRz(t) => {
            apply_1q(amps, q, &qs[..1], qs[1], [expi(-t / 2.0), ZERO, ZERO, expi(t / 2.0)])
        }
        GateKind::Ry(t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            apply_1q(amps, q, &[], qs[0], [c.into(), (-s).into(), s.into(), c.into()])
        }
        GateKind::Phase(t) | GateKind::CPhase(t) => apply_phase(amps, q, qs, expi(t)),
        GateKind::Incrementer { controls } => {
            apply_increment(amps, q, &qs[..controls], &qs[controls..])
        }
        GateKind::Measure => return Err(Error::MeasureInCircuit),
    }
    Ok(())
}
