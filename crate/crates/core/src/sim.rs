//! Sparse amplitude simulator keyed by basis bit-strings.
//!
//! Wires are packed into a `u128` key register by register, so a circuit may
//! use at most 128 wires. Measurement outcomes come from a `ChaCha8Rng`
//! seeded by the caller, which makes every run reproducible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit_ir::{CBit, Circuit, CircuitBuilder, Control, Gate, Wire};
use crate::exec::Exec;

pub const PRUNE_THRESHOLD: f64 = 1e-14;
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("state grew to {entries} entries (cap {cap})")]
    ResourceLimit { entries: usize, cap: usize },
    #[error("circuit uses {0} wires; the simulator supports at most 128")]
    TooManyWires(usize),
    #[error("expected {expected} register values, got {got}")]
    InitialArity { expected: usize, got: usize },
    #[error("value {value} does not fit register {reg}")]
    InitialValue { reg: usize, value: u128 },
    #[error("gate {gate}: AND target is not |0>")]
    AndTargetDirty { gate: usize },
    #[error("gate {gate}: AND uncompute target differs from the AND of its controls")]
    AndMismatch { gate: usize },
    #[error("gate {gate}: classical bit {cbit} read before written")]
    UnwrittenCbit { gate: usize, cbit: usize },
    #[error("gate {gate}: {what}")]
    Unsupported { gate: usize, what: &'static str },
    #[error("states have different wire counts ({0} vs {1})")]
    WidthMismatch(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub max_entries: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { max_entries: DEFAULT_MAX_ENTRIES }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    /// (bit offset, width) per register.
    layout: Vec<(usize, usize)>,
    num_wires: usize,
    pub entries: Vec<(u128, Complex64)>,
    pub cbits: Vec<Option<bool>>,
}

fn layout_of(circuit: &Circuit) -> Result<(Vec<(usize, usize)>, usize), SimError> {
    let mut off = 0;
    let mut layout = Vec::with_capacity(circuit.registers.len());
    for r in &circuit.registers {
        layout.push((off, r.id.width));
        off += r.id.width;
    }
    if off > 128 {
        return Err(SimError::TooManyWires(off));
    }
    Ok((layout, off))
}

fn low_mask(width: usize) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

impl SparseState {
    /// Basis state with one value per register.
    pub fn basis(circuit: &Circuit, values: &[u128]) -> Result<Self, SimError> {
        let (layout, num_wires) = layout_of(circuit)?;
        if values.len() != layout.len() {
            return Err(SimError::InitialArity { expected: layout.len(), got: values.len() });
        }
        let mut key = 0u128;
        for (reg, (&(off, w), &v)) in layout.iter().zip(values).enumerate() {
            if v & !low_mask(w) != 0 {
                return Err(SimError::InitialValue { reg, value: v });
            }
            key |= v << off;
        }
        Ok(SparseState {
            layout,
            num_wires,
            entries: vec![(key, Complex64::new(1.0, 0.0))],
            cbits: vec![None; circuit.num_cbits],
        })
    }

    /// Superposition given as (register values, amplitude) pairs; normalized here.
    pub fn from_amplitudes(circuit: &Circuit, terms: &[(Vec<u128>, Complex64)]) -> Result<Self, SimError> {
        let mut s = SparseState::basis(circuit, &vec![0; circuit.registers.len()])?;
        s.entries.clear();
        for (values, amp) in terms {
            let b = SparseState::basis(circuit, values)?;
            s.entries.push((b.entries[0].0, *amp));
        }
        s.merge();
        let norm = s.norm().sqrt();
        for e in &mut s.entries {
            e.1 /= norm;
        }
        Ok(s)
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn register_value(&self, key: u128, reg: usize) -> u128 {
        let (off, w) = self.layout[reg];
        (key >> off) & low_mask(w)
    }

    pub fn registers(&self, key: u128) -> Vec<u128> {
        (0..self.layout.len()).map(|r| self.register_value(key, r)).collect()
    }

    fn bit(&self, w: Wire) -> u128 {
        1u128 << (self.layout[w.reg].0 + w.offset)
    }

    fn ctrl(&self, key: u128, c: Control) -> bool {
        (key & self.bit(c.wire) != 0) != c.negated
    }

    /// Sorts by key, sums duplicates and prunes negligible amplitudes.
    fn merge(&mut self) {
        self.entries.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(u128, Complex64)> = Vec::with_capacity(self.entries.len());
        for &(k, a) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 += a,
                _ => out.push((k, a)),
            }
        }
        out.retain(|(_, a)| a.norm() >= PRUNE_THRESHOLD);
        self.entries = out;
    }

    fn phase_where(&mut self, pred: impl Fn(u128) -> bool, z: Complex64) {
        for (k, a) in &mut self.entries {
            if pred(*k) {
                *a *= z;
            }
        }
    }

    fn measure(&mut self, w: Wire, rng: &mut ChaCha8Rng) -> bool {
        let m = self.bit(w);
        let p1: f64 = self.entries.iter().filter(|(k, _)| k & m != 0).map(|(_, a)| a.norm_sqr()).sum();
        let total = self.norm();
        let p1 = (p1 / total).clamp(0.0, 1.0);
        let outcome = rng.gen::<f64>() < p1;
        let p = if outcome { p1 } else { 1.0 - p1 };
        let scale = 1.0 / (p * total).sqrt();
        self.entries.retain(|(k, _)| (k & m != 0) == outcome);
        for (k, a) in &mut self.entries {
            *k &= !m;
            *a *= scale;
        }
        outcome
    }

    fn hadamard(&mut self, w: Wire) {
        let m = self.bit(w);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut next = Vec::with_capacity(self.entries.len() * 2);
        for &(k, a) in &self.entries {
            let one = k & m != 0;
            next.push((k & !m, a * s));
            next.push((k | m, if one { -a * s } else { a * s }));
        }
        self.entries = next;
        self.merge();
    }

    fn apply(&mut self, idx: usize, g: &Gate, rng: &mut ChaCha8Rng) -> Result<(), SimError> {
        match g {
            Gate::X(w) => {
                let m = self.bit(*w);
                self.entries.iter_mut().for_each(|e| e.0 ^= m);
            }
            Gate::H(w) => self.hadamard(*w),
            Gate::Z(w) => {
                let m = self.bit(*w);
                self.phase_where(|k| k & m != 0, Complex64::new(-1.0, 0.0));
            }
            Gate::S(w) => {
                let m = self.bit(*w);
                self.phase_where(|k| k & m != 0, Complex64::i());
            }
            Gate::T(w) => {
                let m = self.bit(*w);
                self.phase_where(|k| k & m != 0, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4));
            }
            Gate::PhaseK { wire, k, inverse } => {
                let m = self.bit(*wire);
                let mut theta = std::f64::consts::TAU / 2f64.powi(*k as i32);
                if *inverse {
                    theta = -theta;
                }
                self.phase_where(|key| key & m != 0, Complex64::from_polar(1.0, theta));
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (self.bit(*control), self.bit(*target));
                for e in &mut self.entries {
                    if e.0 & c != 0 {
                        e.0 ^= t;
                    }
                }
            }
            Gate::Cz(a, b) => {
                let m = self.bit(*a) | self.bit(*b);
                self.phase_where(|k| k & m == m, Complex64::new(-1.0, 0.0));
            }
            Gate::Toffoli { c1, c2, target } => {
                let c = self.bit(*c1) | self.bit(*c2);
                let t = self.bit(*target);
                for e in &mut self.entries {
                    if e.0 & c == c {
                        e.0 ^= t;
                    }
                }
            }
            Gate::AndCompute { c1, c2, target } => {
                let t = self.bit(*target);
                let (c1, c2) = (*c1, *c2);
                for i in 0..self.entries.len() {
                    let k = self.entries[i].0;
                    if k & t != 0 {
                        return Err(SimError::AndTargetDirty { gate: idx });
                    }
                    if self.ctrl(k, c1) && self.ctrl(k, c2) {
                        self.entries[i].0 |= t;
                    }
                }
            }
            Gate::AndUncompute { c1, c2, target } => {
                let t = self.bit(*target);
                let (c1, c2) = (*c1, *c2);
                for i in 0..self.entries.len() {
                    let k = self.entries[i].0;
                    if (k & t != 0) != (self.ctrl(k, c1) && self.ctrl(k, c2)) {
                        return Err(SimError::AndMismatch { gate: idx });
                    }
                    self.entries[i].0 &= !t;
                }
                // X-basis outcome; on 1 the kicked-back phase is cancelled by the CZ fix-up
                let _outcome = rng.gen::<f64>() < 0.5;
            }
            Gate::MeasureZ { wire, cbit } => {
                let r = self.measure(*wire, rng);
                self.cbits[cbit.0] = Some(r);
            }
            Gate::MeasureX { wire, cbit } => {
                self.hadamard(*wire);
                let r = self.measure(*wire, rng);
                self.cbits[cbit.0] = Some(r);
            }
            Gate::ClassicallyControlled { gate, cbits } => {
                let mut parity = false;
                for c in cbits {
                    match self.cbits.get(c.0).copied().flatten() {
                        Some(b) => parity ^= b,
                        None => return Err(SimError::UnwrittenCbit { gate: idx, cbit: c.0 }),
                    }
                }
                if matches!(**gate, Gate::MeasureZ { .. } | Gate::MeasureX { .. } | Gate::ClassicallyControlled { .. }) {
                    return Err(SimError::Unsupported { gate: idx, what: "conditional measurement" });
                }
                if parity {
                    self.apply(idx, gate, rng)?;
                }
            }
            Gate::SwapLabel { a, b } => {
                let (oa, wa) = self.layout[a.index];
                let (ob, wb) = self.layout[b.index];
                if wa != wb {
                    return Err(SimError::Unsupported { gate: idx, what: "swap of unequal registers" });
                }
                let m = low_mask(wa);
                for e in &mut self.entries {
                    let va = (e.0 >> oa) & m;
                    let vb = (e.0 >> ob) & m;
                    e.0 = (e.0 & !(m << oa) & !(m << ob)) | (vb << oa) | (va << ob);
                }
            }
        }
        Ok(())
    }
}

pub fn run(circuit: &Circuit, initial: &[u128], seed: u64) -> Result<SparseState, SimError> {
    run_from(circuit, SparseState::basis(circuit, initial)?, seed, SimConfig::default())
}

pub fn run_from(circuit: &Circuit, mut state: SparseState, seed: u64, config: SimConfig) -> Result<SparseState, SimError> {
    let (layout, _) = layout_of(circuit)?;
    if layout != state.layout {
        return Err(SimError::WidthMismatch(state.num_wires, layout.iter().map(|l| l.1).sum()));
    }
    state.cbits.resize(circuit.num_cbits, None);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, g) in circuit.gates.iter().enumerate() {
        state.apply(i, g, &mut rng)?;
        if state.entries.len() > config.max_entries {
            return Err(SimError::ResourceLimit { entries: state.entries.len(), cap: config.max_entries });
        }
    }
    Ok(state)
}

/// |<a|b>|^2.
pub fn fidelity(a: &SparseState, b: &SparseState) -> Result<f64, SimError> {
    if a.num_wires != b.num_wires {
        return Err(SimError::WidthMismatch(a.num_wires, b.num_wires));
    }
    let mut xs = a.entries.clone();
    let mut ys = b.entries.clone();
    xs.sort_unstable_by_key(|e| e.0);
    ys.sort_unstable_by_key(|e| e.0);
    let (mut i, mut j) = (0, 0);
    let mut acc = Complex64::new(0.0, 0.0);
    while i < xs.len() && j < ys.len() {
        match xs[i].0.cmp(&ys[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += xs[i].1.conj() * ys[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(acc.norm_sqr() / (a.norm() * b.norm()))
}

/// Replaces every AND uncompute by its explicit form: H, destructive Z
/// measurement, and a classically controlled CZ on the (polarity-adjusted) controls.
pub fn lower_and_uncompute(circuit: &Circuit) -> Circuit {
    let mut b = CircuitBuilder::new();
    let mut cbits = circuit.num_cbits;
    let mut gates = Vec::with_capacity(circuit.gates.len());
    for g in &circuit.gates {
        if let Gate::AndUncompute { c1, c2, target } = g {
            let cb = CBit(cbits);
            cbits += 1;
            gates.push(Gate::H(*target));
            gates.push(Gate::MeasureZ { wire: *target, cbit: cb });
            let flips: Vec<Wire> = [c1, c2].iter().filter(|c| c.negated).map(|c| c.wire).collect();
            flips.iter().for_each(|w| gates.push(Gate::X(*w)));
            gates.push(Gate::ClassicallyControlled { gate: Box::new(Gate::Cz(c1.wire, c2.wire)), cbits: vec![cb] });
            flips.iter().for_each(|w| gates.push(Gate::X(*w)));
        } else {
            gates.push(g.clone());
        }
    }
    for g in gates {
        b.push(g);
    }
    let mut out = b.finish();
    out.registers = circuit.registers.clone();
    out.num_cbits = cbits;
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub input: Vec<u128>,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        self.checked += other.checked;
        self.mismatches.extend(other.mismatches);
        self
    }
}

/// Runs `circuit` on every basis input (one value per register). Registers in
/// `classical` must end in a single basis value; `oracle(input, output, amplitude)`
/// is consulted on every surviving branch.
pub fn basis_map_check<F>(
    circuit: &Circuit,
    inputs: &[Vec<u128>],
    classical: &[usize],
    seed: u64,
    exec: Exec,
    oracle: F,
) -> Result<CheckReport, SimError>
where
    F: Fn(&[u128], &[u128], Complex64) -> Result<(), String> + Sync + Send,
{
    let results = exec.map(inputs, |i, input| -> Result<Option<Mismatch>, SimError> {
        let s = run(circuit, input, seed.wrapping_add(i as u64))?;
        let fail = |reason: String| Ok(Some(Mismatch { input: input.clone(), reason }));
        if s.is_empty() {
            return fail("empty state".into());
        }
        let first = s.registers(s.entries[0].0);
        for &(k, amp) in &s.entries {
            let regs = s.registers(k);
            for &r in classical {
                if regs[r] != first[r] {
                    return fail(format!("residual superposition on register {r}"));
                }
            }
            if let Err(reason) = oracle(input, &regs, amp) {
                return fail(reason);
            }
        }
        Ok(None)
    });
    let mut report = CheckReport { checked: inputs.len(), mismatches: vec![] };
    for r in results {
        if let Some(m) = r? {
            report.mismatches.push(m);
        }
    }
    Ok(report)
}
