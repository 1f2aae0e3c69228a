//! Reversible-circuit intermediate representation.
//!
//! Wires are addressed as `(register, offset)`. Builders allocate registers
//! through [`CircuitBuilder`] and never deal with absolute wire indices, so a
//! [`Gate::SwapLabel`] can exchange two registers without rewriting later gates.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

/// Exact (possibly fractional) gate tally.
pub type Count = Ratio<u128>;

pub fn count_f64(c: &Count) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("register `{0}` must have width >= 1")]
    EmptyRegister(String),
    #[error("wire {0} is not fresh")]
    NotFresh(Wire),
    #[error("operands of {kind} are not distinct")]
    DuplicateOperands { kind: &'static str },
    #[error("circuits have different register layouts")]
    LayoutMismatch,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegisterId {
    pub index: usize,
    pub width: usize,
}

impl RegisterId {
    pub fn wire(&self, offset: usize) -> Wire {
        debug_assert!(offset < self.width);
        Wire { reg: self.index, offset }
    }

    pub fn wires(&self) -> Vec<Wire> {
        (0..self.width).map(|o| self.wire(o)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegisterKind {
    /// Holds problem data; starts in an arbitrary basis state.
    Data,
    /// Starts fresh (all zeros) and must be returned clean.
    Ancilla,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub id: RegisterId,
    pub name: String,
    pub kind: RegisterKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wire {
    pub reg: usize,
    pub offset: usize,
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}[{}]", self.reg, self.offset)
    }
}

/// AND-gate control with optional negation (negation is free).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub wire: Wire,
    pub negated: bool,
}

impl Control {
    pub fn pos(wire: Wire) -> Self {
        Control { wire, negated: false }
    }

    pub fn neg(wire: Wire) -> Self {
        Control { wire, negated: true }
    }
}

impl From<Wire> for Control {
    fn from(wire: Wire) -> Self {
        Control::pos(wire)
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!{}", self.wire)
        } else {
            write!(f, "{}", self.wire)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CBit(pub usize);

impl fmt::Display for CBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    X(Wire),
    H(Wire),
    Z(Wire),
    S(Wire),
    T(Wire),
    /// diag(1, exp(±2πi / 2^k)).
    PhaseK { wire: Wire, k: u32, inverse: bool },
    Cnot { control: Wire, target: Wire },
    Cz(Wire, Wire),
    Toffoli { c1: Wire, c2: Wire, target: Wire },
    AndCompute { c1: Control, c2: Control, target: Wire },
    AndUncompute { c1: Control, c2: Control, target: Wire },
    /// Destructive: the wire is reset to |0> after the outcome is recorded.
    MeasureZ { wire: Wire, cbit: CBit },
    /// Destructive X-basis measurement.
    MeasureX { wire: Wire, cbit: CBit },
    /// Applies `gate` iff the parity of `cbits` is odd.
    ClassicallyControlled { gate: Box<Gate>, cbits: Vec<CBit> },
    /// Zero-cost exchange of two equally wide registers.
    SwapLabel { a: RegisterId, b: RegisterId },
}

impl Gate {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::H(_) => "H",
            Gate::Z(_) => "Z",
            Gate::S(_) => "S",
            Gate::T(_) => "T",
            Gate::PhaseK { .. } => "PHASE",
            Gate::Cnot { .. } => "CNOT",
            Gate::Cz(..) => "CZ",
            Gate::Toffoli { .. } => "TOFFOLI",
            Gate::AndCompute { .. } => "AND",
            Gate::AndUncompute { .. } => "UNAND",
            Gate::MeasureZ { .. } => "MEASZ",
            Gate::MeasureX { .. } => "MEASX",
            Gate::ClassicallyControlled { .. } => "IF",
            Gate::SwapLabel { .. } => "SWAPLABEL",
        }
    }

    /// Quantum wires the gate acts on, in operand order.
    pub fn wires(&self) -> Vec<Wire> {
        match self {
            Gate::X(w) | Gate::H(w) | Gate::Z(w) | Gate::S(w) | Gate::T(w) => vec![*w],
            Gate::PhaseK { wire, .. } => vec![*wire],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Cz(a, b) => vec![*a, *b],
            Gate::Toffoli { c1, c2, target } => vec![*c1, *c2, *target],
            Gate::AndCompute { c1, c2, target } | Gate::AndUncompute { c1, c2, target } => {
                vec![c1.wire, c2.wire, *target]
            }
            Gate::MeasureZ { wire, .. } | Gate::MeasureX { wire, .. } => vec![*wire],
            Gate::ClassicallyControlled { gate, .. } => gate.wires(),
            Gate::SwapLabel { .. } => vec![],
        }
    }

    pub fn counts(&self) -> GateCounts {
        let one = Count::from_integer(1);
        let mut c = GateCounts::zero();
        match self {
            Gate::X(_) | Gate::H(_) | Gate::Z(_) | Gate::S(_) | Gate::T(_) | Gate::PhaseK { .. } => {
                c.one_qubit = one
            }
            Gate::Cnot { .. } | Gate::Cz(..) => c.cnot = one,
            Gate::Toffoli { .. } => c.toffoli = one,
            Gate::AndCompute { .. } => c.and_pairs = one,
            Gate::AndUncompute { .. } => {}
            Gate::MeasureZ { .. } | Gate::MeasureX { .. } => c.measure = one,
            Gate::ClassicallyControlled { gate, .. } => return gate.counts(),
            Gate::SwapLabel { .. } => {}
        }
        c
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::PhaseK { wire, k, inverse } => {
                let sign = if *inverse { "-" } else { "" };
                write!(f, "PHASE({sign}{k}) {wire}")
            }
            Gate::AndCompute { c1, c2, target } | Gate::AndUncompute { c1, c2, target } => {
                write!(f, "{} {c1}, {c2}, {target}", self.kind())
            }
            Gate::MeasureZ { wire, cbit } | Gate::MeasureX { wire, cbit } => {
                write!(f, "{} {wire} -> {cbit}", self.kind())
            }
            Gate::ClassicallyControlled { gate, cbits } => {
                let cond: Vec<String> = cbits.iter().map(|c| c.to_string()).collect();
                write!(f, "IF {} {gate}", cond.join("^"))
            }
            Gate::SwapLabel { a, b } => write!(f, "SWAPLABEL r{}, r{}", a.index, b.index),
            _ => {
                let ws: Vec<String> = self.wires().iter().map(|w| w.to_string()).collect();
                write!(f, "{} {}", self.kind(), ws.join(", "))
            }
        }
    }
}

/// Tallies of elementary operations. `and_pairs` counts compute/uncompute pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateCounts {
    pub one_qubit: Count,
    pub cnot: Count,
    pub toffoli: Count,
    pub and_pairs: Count,
    pub measure: Count,
}

impl GateCounts {
    pub fn zero() -> Self {
        GateCounts {
            one_qubit: Count::zero(),
            cnot: Count::zero(),
            toffoli: Count::zero(),
            and_pairs: Count::zero(),
            measure: Count::zero(),
        }
    }

    pub fn from_ints(one_qubit: u128, cnot: u128, toffoli: u128, and_pairs: u128, measure: u128) -> Self {
        GateCounts {
            one_qubit: Count::from_integer(one_qubit),
            cnot: Count::from_integer(cnot),
            toffoli: Count::from_integer(toffoli),
            and_pairs: Count::from_integer(and_pairs),
            measure: Count::from_integer(measure),
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == GateCounts::zero()
    }

    /// Sum over every field.
    pub fn total(&self) -> Count {
        self.one_qubit + self.cnot + self.toffoli + self.and_pairs + self.measure
    }

    pub fn as_f64(&self) -> [f64; 5] {
        [&self.one_qubit, &self.cnot, &self.toffoli, &self.and_pairs, &self.measure]
            .map(count_f64)
    }
}

impl Default for GateCounts {
    fn default() -> Self {
        GateCounts::zero()
    }
}

impl Add for GateCounts {
    type Output = GateCounts;
    fn add(mut self, rhs: GateCounts) -> GateCounts {
        self += rhs;
        self
    }
}

impl<'a> Add<&'a GateCounts> for GateCounts {
    type Output = GateCounts;
    fn add(mut self, rhs: &'a GateCounts) -> GateCounts {
        self += rhs.clone();
        self
    }
}

impl AddAssign for GateCounts {
    fn add_assign(&mut self, rhs: GateCounts) {
        self.one_qubit += rhs.one_qubit;
        self.cnot += rhs.cnot;
        self.toffoli += rhs.toffoli;
        self.and_pairs += rhs.and_pairs;
        self.measure += rhs.measure;
    }
}

impl Mul<Count> for GateCounts {
    type Output = GateCounts;
    fn mul(self, k: Count) -> GateCounts {
        GateCounts {
            one_qubit: self.one_qubit * k,
            cnot: self.cnot * k,
            toffoli: self.toffoli * k,
            and_pairs: self.and_pairs * k,
            measure: self.measure * k,
        }
    }
}

impl Mul<u128> for GateCounts {
    type Output = GateCounts;
    fn mul(self, k: u128) -> GateCounts {
        self * Count::from_integer(k)
    }
}

impl std::iter::Sum for GateCounts {
    fn sum<I: Iterator<Item = GateCounts>>(iter: I) -> Self {
        iter.fold(GateCounts::zero(), |a, b| a + b)
    }
}

impl fmt::Display for GateCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "1q={} cnot={} toffoli={} and_pairs={} measure={}",
            self.one_qubit, self.cnot, self.toffoli, self.and_pairs, self.measure
        )
    }
}

/// A validated-on-demand, immutable gate list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub registers: Vec<Register>,
    pub gates: Vec<Gate>,
    pub num_cbits: usize,
}

impl Circuit {
    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn num_wires(&self) -> usize {
        self.registers.iter().map(|r| r.id.width).sum()
    }

    /// Gates of `other` appended after `self`; both must share one register layout.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.registers != other.registers {
            return Err(CircuitError::LayoutMismatch);
        }
        let shift = self.num_cbits;
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().map(|g| shift_cbits(g, shift)));
        Ok(Circuit { registers: self.registers.clone(), gates, num_cbits: self.num_cbits + other.num_cbits })
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.registers {
            let kind = match r.kind {
                RegisterKind::Data => "data",
                RegisterKind::Ancilla => "ancilla",
            };
            out.push_str(&format!("REG r{} {} {} {}\n", r.id.index, r.name, r.id.width, kind));
        }
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

fn shift_cbits(g: &Gate, shift: usize) -> Gate {
    match g {
        Gate::MeasureZ { wire, cbit } => Gate::MeasureZ { wire: *wire, cbit: CBit(cbit.0 + shift) },
        Gate::MeasureX { wire, cbit } => Gate::MeasureX { wire: *wire, cbit: CBit(cbit.0 + shift) },
        Gate::ClassicallyControlled { gate, cbits } => Gate::ClassicallyControlled {
            gate: gate.clone(),
            cbits: cbits.iter().map(|c| CBit(c.0 + shift)).collect(),
        },
        other => other.clone(),
    }
}

pub fn count_gates(circuit: &Circuit) -> GateCounts {
    let mut c = GateCounts::zero();
    for g in &circuit.gates {
        c += g.counts();
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    RegisterOutOfRange,
    WireOutOfRange,
    DistinctOperands,
    AndTargetNotFresh,
    AndUncomputeWithoutCompute,
    CbitOutOfRange,
    ReadBeforeWrite,
    EmptyCondition,
    UnsupportedConditional,
    SwapWidthMismatch,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::RegisterOutOfRange => "register out of range",
            Rule::WireOutOfRange => "wire offset out of range",
            Rule::DistinctOperands => "operands must be distinct",
            Rule::AndTargetNotFresh => "AND target is not a fresh ancilla wire",
            Rule::AndUncomputeWithoutCompute => "AND uncompute on a wire not holding an AND",
            Rule::CbitOutOfRange => "classical bit out of range",
            Rule::ReadBeforeWrite => "classical bit read before written",
            Rule::EmptyCondition => "classical condition lists no bits",
            Rule::UnsupportedConditional => "gate kind cannot be classically controlled",
            Rule::SwapWidthMismatch => "swapped registers differ in width",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Violation {
    pub gate: usize,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gate {}: {}", self.gate, self.rule)
    }
}

/// Static checks. An AND target is fresh when it lives in an ancilla register
/// and no earlier AND on that wire is still awaiting its uncompute.
pub fn validate(circuit: &Circuit) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut held: Vec<Vec<bool>> = circuit.registers.iter().map(|r| vec![false; r.id.width]).collect();
    let mut written = vec![false; circuit.num_cbits];
    let in_range = |w: &Wire| w.reg < circuit.registers.len() && w.offset < circuit.registers[w.reg].id.width;

    for (i, g) in circuit.gates.iter().enumerate() {
        let mut push = |rule| out.push(Violation { gate: i, rule });
        let ws = g.wires();
        let mut ranged = true;
        for w in &ws {
            if w.reg >= circuit.registers.len() {
                push(Rule::RegisterOutOfRange);
                ranged = false;
            } else if !in_range(w) {
                push(Rule::WireOutOfRange);
                ranged = false;
            }
        }
        for a in 0..ws.len() {
            if ws[a + 1..].contains(&ws[a]) {
                push(Rule::DistinctOperands);
                break;
            }
        }
        let check_cbit = |c: &CBit, push: &mut dyn FnMut(Rule)| {
            if c.0 >= circuit.num_cbits {
                push(Rule::CbitOutOfRange);
                false
            } else {
                true
            }
        };
        match g {
            Gate::AndCompute { target, .. } if ranged => {
                let fresh = circuit.registers[target.reg].kind == RegisterKind::Ancilla
                    && !held[target.reg][target.offset];
                if !fresh {
                    push(Rule::AndTargetNotFresh);
                }
                held[target.reg][target.offset] = true;
            }
            Gate::AndUncompute { target, .. } if ranged => {
                if !held[target.reg][target.offset] {
                    push(Rule::AndUncomputeWithoutCompute);
                }
                held[target.reg][target.offset] = false;
            }
            Gate::MeasureZ { cbit, wire } | Gate::MeasureX { cbit, wire } => {
                // measurement is destructive, so the wire is released
                if ranged {
                    held[wire.reg][wire.offset] = false;
                }
                if check_cbit(cbit, &mut push) {
                    written[cbit.0] = true;
                }
            }
            Gate::ClassicallyControlled { gate, cbits } => {
                if cbits.is_empty() {
                    push(Rule::EmptyCondition);
                }
                for c in cbits {
                    if check_cbit(c, &mut push) && !written[c.0] {
                        push(Rule::ReadBeforeWrite);
                    }
                }
                if matches!(
                    **gate,
                    Gate::AndCompute { .. }
                        | Gate::AndUncompute { .. }
                        | Gate::MeasureZ { .. }
                        | Gate::MeasureX { .. }
                        | Gate::ClassicallyControlled { .. }
                        | Gate::SwapLabel { .. }
                ) {
                    push(Rule::UnsupportedConditional);
                }
            }
            Gate::SwapLabel { a, b } => {
                let n = circuit.registers.len();
                if a.index >= n || b.index >= n {
                    push(Rule::RegisterOutOfRange);
                } else if a.index == b.index {
                    push(Rule::DistinctOperands);
                } else if circuit.registers[a.index].id.width != circuit.registers[b.index].id.width
                    || a.width != b.width
                    || a.width != circuit.registers[a.index].id.width
                {
                    push(Rule::SwapWidthMismatch);
                } else {
                    held.swap(a.index, b.index);
                }
            }
            _ => {}
        }
    }
    out
}

/// Incremental construction of a [`Circuit`].
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    registers: Vec<Register>,
    gates: Vec<Gate>,
    num_cbits: usize,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn alloc(&mut self, name: &str, width: usize, kind: RegisterKind) -> Result<RegisterId, CircuitError> {
        if width == 0 {
            return Err(CircuitError::EmptyRegister(name.to_string()));
        }
        let id = RegisterId { index: self.registers.len(), width };
        self.registers.push(Register { id, name: name.to_string(), kind });
        Ok(id)
    }

    pub fn data(&mut self, name: &str, width: usize) -> Result<RegisterId, CircuitError> {
        self.alloc(name, width, RegisterKind::Data)
    }

    pub fn ancilla(&mut self, name: &str, width: usize) -> Result<RegisterId, CircuitError> {
        self.alloc(name, width, RegisterKind::Ancilla)
    }

    pub fn cbit(&mut self) -> CBit {
        self.num_cbits += 1;
        CBit(self.num_cbits - 1)
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn x(&mut self, w: Wire) {
        self.push(Gate::X(w));
    }

    pub fn h(&mut self, w: Wire) {
        self.push(Gate::H(w));
    }

    pub fn z(&mut self, w: Wire) {
        self.push(Gate::Z(w));
    }

    pub fn cnot(&mut self, control: Wire, target: Wire) {
        self.push(Gate::Cnot { control, target });
    }

    pub fn toffoli(&mut self, c1: Wire, c2: Wire, target: Wire) {
        self.push(Gate::Toffoli { c1, c2, target });
    }

    pub fn and(&mut self, c1: impl Into<Control>, c2: impl Into<Control>, target: Wire) {
        self.push(Gate::AndCompute { c1: c1.into(), c2: c2.into(), target });
    }

    pub fn and_uncompute(&mut self, c1: impl Into<Control>, c2: impl Into<Control>, target: Wire) {
        self.push(Gate::AndUncompute { c1: c1.into(), c2: c2.into(), target });
    }

    pub fn measure_z(&mut self, wire: Wire) -> CBit {
        let cbit = self.cbit();
        self.push(Gate::MeasureZ { wire, cbit });
        cbit
    }

    pub fn conditioned(&mut self, gate: Gate, cbits: Vec<CBit>) {
        self.push(Gate::ClassicallyControlled { gate: Box::new(gate), cbits });
    }

    pub fn swap_label(&mut self, a: RegisterId, b: RegisterId) {
        self.push(Gate::SwapLabel { a, b });
    }

    pub fn finish(self) -> Circuit {
        Circuit { registers: self.registers, gates: self.gates, num_cbits: self.num_cbits }
    }
}
