//! Reversible arithmetic: AND gates, ripple adders, semi-classical adders,
//! comparison, table lookup and measurement-based unlookup, coset
//! initialization, and the windowed modular exponentiation built from them.
//!
//! Every `emit_*` function appends gates to a caller-owned [`CircuitBuilder`]
//! over caller-chosen wires. The `build_*` functions wrap them into standalone
//! circuits with named registers.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit_ir::{CBit, Circuit, CircuitBuilder, CircuitError, Control, Gate, RegisterId, Wire};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("classical value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u128, width: usize },
    #[error("table has {got} entries, expected {expected}")]
    TableLength { got: usize, expected: usize },
    #[error("modulus {0} invalid for this circuit")]
    Modulus(u128),
    #[error("base {base} is not coprime to {modulus}")]
    NotCoprime { base: u128, modulus: u128 },
    #[error("not enough {what} wires: need {need}, have {have}")]
    Wires { what: &'static str, need: usize, have: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

pub type Result<T> = std::result::Result<T, BuildError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgoParams {
    pub n: usize,
    pub n_e: usize,
    pub w_e: usize,
    pub w_m: usize,
    pub m: usize,
}

impl AlgoParams {
    pub fn new(n: usize, n_e: usize, w_e: usize, w_m: usize, m: usize) -> Result<Self> {
        let p = AlgoParams { n, n_e, w_e, w_m, m };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |s: &str| Err(BuildError::InvalidParams(s.to_string()));
        if self.n < 2 {
            return bad("n must be >= 2");
        }
        if self.n_e < 1 {
            return bad("n_e must be >= 1");
        }
        if self.w_e < 1 || self.w_e > self.n_e {
            return bad("w_e must lie in [1, n_e]");
        }
        if self.w_m < 1 || self.w_m > self.n {
            return bad("w_m must lie in [1, n]");
        }
        if self.m < 1 {
            return bad("m must be >= 1");
        }
        Ok(())
    }

    /// Width of a coset-encoded register.
    pub fn width(&self) -> usize {
        self.n + self.m
    }

    pub fn exponent_windows(&self) -> Vec<(usize, usize)> {
        windows(self.n_e, self.w_e)
    }

    pub fn multiplier_windows(&self) -> Vec<(usize, usize)> {
        windows(self.width(), self.w_m)
    }

    pub fn num_multiplications(&self) -> usize {
        self.n_e.div_ceil(self.w_e)
    }

    /// Coset-encoded modular additions performed by the exponentiation.
    pub fn num_coset_additions(&self) -> usize {
        2 * self.num_multiplications() * self.width().div_ceil(self.w_m)
    }
}

/// `(start, width)` pairs covering `0..total` with stride `w`; the last may be short.
pub fn windows(total: usize, w: usize) -> Vec<(usize, usize)> {
    assert!(w >= 1);
    (0..total).step_by(w).map(|s| (s, w.min(total - s))).collect()
}

/// Low/high split of a lookup address for the unlookup phase fix-up.
pub fn unary_split(address_width: usize) -> (usize, usize) {
    let s = address_width / 2;
    (s, address_width - s)
}

/// Scratch wires an unlookup over `address_width` bits needs.
pub fn unlookup_scratch(address_width: usize) -> usize {
    let (s, wh) = unary_split(address_width);
    (1usize << s) + wh - 1
}

/// Concrete modulus and base, with the classical tables they induce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub modulus: u128,
    pub base: u128,
}

impl ProblemInstance {
    pub fn new(n: usize, modulus: u128, base: u128) -> Result<Self> {
        if n >= 63 || modulus < 9 || modulus.is_multiple_of(2) || !in_bit_range(n, modulus) || is_prime(modulus) {
            return Err(BuildError::Modulus(modulus));
        }
        if base == 0 || base >= modulus || modulus.gcd(&base) != 1 {
            return Err(BuildError::NotCoprime { base, modulus });
        }
        Ok(ProblemInstance { modulus, base })
    }

    pub fn pow_mod(&self, b: u128, mut e: u128) -> u128 {
        let mut r = 1 % self.modulus;
        let mut b = b % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.modulus;
            }
            b = b * b % self.modulus;
            e >>= 1;
        }
        r
    }

    pub fn inverse(&self, a: u128) -> u128 {
        let eg = (a as i128).extended_gcd(&(self.modulus as i128));
        debug_assert_eq!(eg.gcd, 1);
        eg.x.rem_euclid(self.modulus as i128) as u128
    }

    /// g^(2^bit * v) mod N.
    pub fn window_power(&self, bit: usize, v: u128) -> u128 {
        let mut b = self.base;
        for _ in 0..bit {
            b = b * b % self.modulus;
        }
        self.pow_mod(b, v)
    }

    /// Product-addition table for one block. The address is the multiplier
    /// window (low bits) followed by the exponent window (high bits).
    /// `second` selects the uncomputing product-addition with factor -c^-1.
    pub fn product_add_table(&self, e_bit: usize, e_width: usize, x_bit: usize, x_width: usize, second: bool) -> Vec<u128> {
        let nm = self.modulus;
        let shift = pow2_mod(x_bit, nm);
        let mut t = Vec::with_capacity(1 << (x_width + e_width));
        for ev in 0..(1u128 << e_width) {
            let c = self.window_power(e_bit, ev);
            let factor = if second { (nm - self.inverse(c)) % nm } else { c };
            for xv in 0..(1u128 << x_width) {
                t.push(shift * (xv % nm) % nm * factor % nm);
            }
        }
        t
    }
}

fn pow2_mod(k: usize, nm: u128) -> u128 {
    let mut r = 1 % nm;
    for _ in 0..k {
        r = r * 2 % nm;
    }
    r
}

fn in_bit_range(n: usize, v: u128) -> bool {
    (1..128).contains(&n) && v >= 1u128 << (n - 1) && v < 1u128 << n
}

fn is_prime(v: u128) -> bool {
    if v < 2 {
        return false;
    }
    let mut d = 2u128;
    while d * d <= v {
        if v.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn bit(v: u128, i: usize) -> bool {
    i < 128 && (v >> i) & 1 == 1
}

fn fits(value: u128, width: usize) -> Result<()> {
    if width < 128 && value >> width != 0 {
        return Err(BuildError::ValueOutOfRange { value, width });
    }
    Ok(())
}

fn need(what: &'static str, need: usize, have: usize) -> Result<()> {
    if have < need {
        return Err(BuildError::Wires { what, need, have });
    }
    Ok(())
}

fn distinct(kind: &'static str, ws: &[Wire]) -> Result<()> {
    for i in 0..ws.len() {
        if ws[i + 1..].contains(&ws[i]) {
            return Err(CircuitError::DuplicateOperands { kind }.into());
        }
    }
    Ok(())
}

pub fn emit_fredkin(b: &mut CircuitBuilder, control: Wire, a: Wire, bw: Wire) -> Result<()> {
    distinct("fredkin", &[control, a, bw])?;
    b.cnot(bw, a);
    b.toffoli(control, a, bw);
    b.cnot(bw, a);
    Ok(())
}

/// y <- x + y mod 2^w, carries returned clean.
pub fn emit_adder(b: &mut CircuitBuilder, x: &[Wire], y: &[Wire], carries: &[Wire]) -> Result<()> {
    let w = x.len();
    if w < 2 || y.len() != w {
        return Err(BuildError::InvalidParams(format!("adder width {w} / {}", y.len())));
    }
    need("carry", w - 1, carries.len())?;
    // c[i] is the carry into bit i, i = 1..w-1
    let c = |i: usize| carries[i - 1];
    b.and(x[0], y[0], c(1));
    for i in 1..w - 1 {
        b.cnot(c(i), x[i]);
        b.cnot(c(i), y[i]);
        b.and(x[i], y[i], c(i + 1));
        b.cnot(c(i), c(i + 1));
    }
    b.cnot(c(w - 1), y[w - 1]);
    for i in (1..w - 1).rev() {
        b.cnot(c(i), c(i + 1));
        b.and_uncompute(x[i], y[i], c(i + 1));
        b.cnot(c(i), x[i]);
    }
    b.and_uncompute(x[0], y[0], c(1));
    for i in 0..w {
        b.cnot(x[i], y[i]);
    }
    Ok(())
}

/// z <- z + q*a mod 2^w for a classical addend `a`, using Toffoli carries.
pub fn emit_controlled_const_adder(b: &mut CircuitBuilder, q: Wire, z: &[Wire], a: u128, carries: &[Wire]) -> Result<()> {
    let w = z.len();
    if w < 2 {
        return Err(BuildError::InvalidParams(format!("adder width {w}")));
    }
    fits(a, w)?;
    need("carry", w - 1, carries.len())?;
    let c = |i: usize| carries[i - 1];
    if bit(a, 0) {
        b.toffoli(q, z[0], c(1));
    }
    for i in 1..w - 1 {
        b.cnot(c(i), z[i]);
        if bit(a, i) {
            b.cnot(q, c(i));
        }
        b.toffoli(c(i), z[i], c(i + 1));
        if bit(a, i) {
            b.cnot(q, c(i));
        }
        b.cnot(c(i), c(i + 1));
    }
    b.cnot(c(w - 1), z[w - 1]);
    if bit(a, w - 1) {
        b.cnot(q, z[w - 1]);
    }
    for i in (1..w - 1).rev() {
        b.cnot(c(i), c(i + 1));
        if bit(a, i) {
            b.cnot(q, c(i));
        }
        b.toffoli(c(i), z[i], c(i + 1));
        if bit(a, i) {
            b.cnot(q, c(i));
            b.cnot(q, z[i]);
        }
    }
    if bit(a, 0) {
        b.toffoli(q, z[0], c(1));
        b.cnot(q, z[0]);
    }
    Ok(())
}

/// z <- z + e*x*a mod 2^w; the two controls are merged into ancilla `q`.
pub fn emit_double_ctrl_adder(
    b: &mut CircuitBuilder,
    e: Wire,
    xj: Wire,
    q: Wire,
    z: &[Wire],
    a: u128,
    carries: &[Wire],
) -> Result<()> {
    distinct("controls", &[e, xj, q])?;
    b.toffoli(e, xj, q);
    emit_controlled_const_adder(b, q, z, a, carries)?;
    b.toffoli(e, xj, q);
    Ok(())
}

/// Phase -1 on |x> iff x >= y, computed from the carries of (2^w - y) + x.
/// With `condition`, only the phase flip is classically controlled.
pub fn emit_comparison(b: &mut CircuitBuilder, x: &[Wire], y: u128, carries: &[Wire], condition: Option<&[CBit]>) -> Result<()> {
    let w = x.len();
    if w == 0 || w >= 127 || y == 0 || y > 1u128 << w {
        return Err(BuildError::ValueOutOfRange { value: y, width: w });
    }
    need("carry", w, carries.len())?;
    let yp = (1u128 << w) - y;
    let c = |i: usize| carries[i - 1];
    if bit(yp, 0) {
        b.cnot(x[0], c(1));
    }
    for i in 1..w {
        b.cnot(c(i), x[i]);
        if bit(yp, i) {
            b.x(c(i));
        }
        b.and(c(i), x[i], c(i + 1));
        if bit(yp, i) {
            b.x(c(i));
        }
        b.cnot(c(i), c(i + 1));
    }
    match condition {
        Some(cbits) => b.conditioned(Gate::Z(c(w)), cbits.to_vec()),
        None => b.z(c(w)),
    }
    for i in (1..w).rev() {
        b.cnot(c(i), c(i + 1));
        if bit(yp, i) {
            b.x(c(i));
        }
        b.and_uncompute(c(i), x[i], c(i + 1));
        if bit(yp, i) {
            b.x(c(i));
        }
        b.cnot(c(i), x[i]);
    }
    if bit(yp, 0) {
        b.cnot(x[0], c(1));
    }
    Ok(())
}

fn emit_unary_tree<F>(b: &mut CircuitBuilder, ctrl: Wire, bits: &[Wire], ladder: &[Wire], k: usize, leaf: &mut F)
where
    F: FnMut(&mut CircuitBuilder, Wire, usize),
{
    let Some((&top, rest)) = bits.split_last() else {
        leaf(b, ctrl, k);
        return;
    };
    let a = ladder[rest.len()];
    b.and(ctrl, top, a);
    emit_unary_tree(b, a, rest, ladder, k | 1 << rest.len(), leaf);
    b.cnot(ctrl, a);
    emit_unary_tree(b, a, rest, ladder, k, leaf);
    b.and_uncompute(ctrl, Control::neg(top), a);
}

/// Unary iteration over every address value; `leaf(b, ctrl, k)` emits the
/// gates for address `k` controlled on wire `ctrl`.
pub fn emit_address_iteration<F>(b: &mut CircuitBuilder, address: &[Wire], ladder: &[Wire], mut leaf: F) -> Result<()>
where
    F: FnMut(&mut CircuitBuilder, Wire, usize),
{
    let wa = address.len();
    if wa == 0 {
        return Err(BuildError::InvalidParams("empty address".into()));
    }
    need("ladder", wa - 1, ladder.len())?;
    let top = address[wa - 1];
    let rest = &address[..wa - 1];
    emit_unary_tree(b, top, rest, ladder, 1 << (wa - 1), &mut leaf);
    b.x(top);
    emit_unary_tree(b, top, rest, ladder, 0, &mut leaf);
    b.x(top);
    Ok(())
}

fn check_table(wa: usize, table: &[u128], n_out: usize) -> Result<()> {
    let expected = 1usize << wa;
    if table.len() != expected {
        return Err(BuildError::TableLength { got: table.len(), expected });
    }
    for &v in table {
        fits(v, n_out)?;
    }
    Ok(())
}

/// |k>|y> -> |k>|y xor T_k>.
pub fn emit_lookup(b: &mut CircuitBuilder, address: &[Wire], table: &[u128], out: &[Wire], ladder: &[Wire]) -> Result<()> {
    check_table(address.len(), table, out.len())?;
    emit_address_iteration(b, address, ladder, |b, ctrl, k| {
        for (j, &o) in out.iter().enumerate() {
            if bit(table[k], j) {
                b.cnot(ctrl, o);
            }
        }
    })
}

/// One-hot encode `bits` into `u` (u[v] = 1 iff bits == v).
pub fn emit_unary_init(b: &mut CircuitBuilder, bits: &[Wire], u: &[Wire]) {
    b.x(u[0]);
    for (i, &bw) in bits.iter().enumerate() {
        let half = 1 << i;
        for j in 0..half {
            b.and(bw, u[j], u[j + half]);
            b.cnot(u[j + half], u[j]);
        }
    }
}

pub fn emit_unary_deinit(b: &mut CircuitBuilder, bits: &[Wire], u: &[Wire]) {
    for (i, &bw) in bits.iter().enumerate().rev() {
        let half = 1 << i;
        for j in (0..half).rev() {
            b.cnot(u[j + half], u[j]);
            b.and_uncompute(bw, u[j], u[j + half]);
        }
    }
    b.x(u[0]);
}

/// Erases T_k from `out` by X-basis measurement, then undoes the phase
/// (-1)^(t . T_k) with a unary-encoded low half and a phase lookup on the high half.
pub fn emit_unlookup(b: &mut CircuitBuilder, address: &[Wire], table: &[u128], out: &[Wire], scratch: &[Wire]) -> Result<()> {
    let wa = address.len();
    check_table(wa, table, out.len())?;
    let mut cbits = Vec::with_capacity(out.len());
    for &o in out {
        b.h(o);
        cbits.push(b.measure_z(o));
    }
    if table.iter().all(|&t| t == 0) {
        return Ok(());
    }
    let (s, wh) = unary_split(wa);
    need("scratch", unlookup_scratch(wa), scratch.len())?;
    let u = &scratch[..1 << s];
    let ladder = &scratch[1 << s..(1 << s) + wh - 1];
    let low = &address[..s];
    emit_unary_init(b, low, u);
    for &w in u {
        b.h(w);
    }
    emit_address_iteration(b, &address[s..], ladder, |b, ctrl, h| {
        for (j, &uj) in u.iter().enumerate() {
            let t = table[j + (h << s)];
            if t != 0 {
                let cond: Vec<CBit> = (0..out.len()).filter(|&i| bit(t, i)).map(|i| cbits[i]).collect();
                b.conditioned(Gate::Cnot { control: ctrl, target: uj }, cond);
            }
        }
    })?;
    for &w in u {
        b.h(w);
    }
    emit_unary_deinit(b, low, u);
    Ok(())
}

/// Turns |z> (z < N) into the uniform superposition over z + kN, k < 2^m.
/// Uses `scratch[..w-1]` as carries, `scratch[w-1]` as the round control, and
/// `scratch[..w]` as comparison carries.
pub fn emit_coset_init(b: &mut CircuitBuilder, z: &[Wire], modulus: u128, m: usize, scratch: &[Wire]) -> Result<()> {
    if m == 0 {
        return Ok(());
    }
    let w = z.len();
    if w < 2 || m >= w || !in_bit_range(w - m, modulus) {
        return Err(BuildError::Modulus(modulus));
    }
    need("scratch", w, scratch.len())?;
    let q = scratch[w - 1];
    for j in 0..m {
        let y = modulus << j;
        b.h(q);
        emit_controlled_const_adder(b, q, z, y, &scratch[..w - 1])?;
        b.h(q);
        let cb = b.measure_z(q);
        emit_comparison(b, z, y, &scratch[..w], Some(&[cb]))?;
    }
    Ok(())
}

/// Register layout shared by the product-addition, multiplication and
/// exponentiation builders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModExpLayout {
    pub exponent: RegisterId,
    pub x: RegisterId,
    pub acc: RegisterId,
    pub target: RegisterId,
    pub scratch: RegisterId,
}

impl ModExpLayout {
    pub fn scratch_width(p: &AlgoParams) -> usize {
        let wa = p.w_e.min(p.n_e) + p.w_m.min(p.width());
        p.width().max(wa - 1).max(unlookup_scratch(wa))
    }

    pub fn alloc(b: &mut CircuitBuilder, p: &AlgoParams) -> Result<Self> {
        let w = p.width();
        Ok(ModExpLayout {
            exponent: b.data("e", p.n_e)?,
            x: b.data("x", w)?,
            acc: b.data("acc", w)?,
            target: b.ancilla("target", w)?,
            scratch: b.ancilla("scratch", Self::scratch_width(p))?,
        })
    }
}

fn check_instance(p: &AlgoParams, inst: &ProblemInstance) -> Result<()> {
    p.check()?;
    if !in_bit_range(p.n, inst.modulus) {
        return Err(BuildError::Modulus(inst.modulus));
    }
    Ok(())
}

/// One lookup-add-unlookup block per multiplier window: dst += src * c(e-window) mod N
/// (or dst += src * (-c^-1) when `second`).
pub fn emit_product_add(
    b: &mut CircuitBuilder,
    l: &ModExpLayout,
    p: &AlgoParams,
    inst: &ProblemInstance,
    e_window: usize,
    second: bool,
) -> Result<()> {
    let (src, dst) = if second { (l.acc, l.x) } else { (l.x, l.acc) };
    let (e_bit, e_width) = *p
        .exponent_windows()
        .get(e_window)
        .ok_or_else(|| BuildError::InvalidParams(format!("no exponent window {e_window}")))?;
    let target = l.target.wires();
    let scratch = l.scratch.wires();
    let w = p.width();
    for (x_bit, x_width) in p.multiplier_windows() {
        let table = inst.product_add_table(e_bit, e_width, x_bit, x_width, second);
        let mut address: Vec<Wire> = (x_bit..x_bit + x_width).map(|o| src.wire(o)).collect();
        address.extend((e_bit..e_bit + e_width).map(|o| l.exponent.wire(o)));
        emit_lookup(b, &address, &table, &target[..p.n], &scratch)?;
        emit_adder(b, &target, &dst.wires(), &scratch[..w - 1])?;
        emit_unlookup(b, &address, &table, &target[..p.n], &scratch)?;
    }
    Ok(())
}

pub fn emit_multiplication(b: &mut CircuitBuilder, l: &ModExpLayout, p: &AlgoParams, inst: &ProblemInstance, e_window: usize) -> Result<()> {
    emit_product_add(b, l, p, inst, e_window, false)?;
    emit_product_add(b, l, p, inst, e_window, true)?;
    b.swap_label(l.x, l.acc);
    Ok(())
}

pub fn emit_mod_exp(b: &mut CircuitBuilder, l: &ModExpLayout, p: &AlgoParams, inst: &ProblemInstance) -> Result<()> {
    let scratch = l.scratch.wires();
    emit_coset_init(b, &l.x.wires(), inst.modulus, p.m, &scratch)?;
    emit_coset_init(b, &l.acc.wires(), inst.modulus, p.m, &scratch)?;
    for i in 0..p.num_multiplications() {
        emit_multiplication(b, l, p, inst, i)?;
    }
    Ok(())
}

pub fn build_and() -> Circuit {
    let mut b = CircuitBuilder::new();
    let c = b.data("c", 2).expect("width");
    let t = b.ancilla("t", 1).expect("width");
    b.and(c.wire(0), c.wire(1), t.wire(0));
    b.finish()
}

/// Compute followed by the measurement-based uncompute.
pub fn build_and_uncompute() -> Circuit {
    let mut b = CircuitBuilder::new();
    let c = b.data("c", 2).expect("width");
    let t = b.ancilla("t", 1).expect("width");
    b.and(c.wire(0), c.wire(1), t.wire(0));
    b.and_uncompute(c.wire(0), c.wire(1), t.wire(0));
    b.finish()
}

pub fn build_fredkin() -> Circuit {
    let mut b = CircuitBuilder::new();
    let c = b.data("c", 1).expect("width");
    let x = b.data("a", 1).expect("width");
    let y = b.data("b", 1).expect("width");
    emit_fredkin(&mut b, c.wire(0), x.wire(0), y.wire(0)).expect("distinct wires");
    b.finish()
}

/// Register-wide controlled swap.
pub fn build_controlled_swap(w: usize) -> Result<Circuit> {
    let mut b = CircuitBuilder::new();
    let c = b.data("c", 1)?;
    let x = b.data("a", w)?;
    let y = b.data("b", w)?;
    for i in 0..w {
        emit_fredkin(&mut b, c.wire(0), x.wire(i), y.wire(i))?;
    }
    Ok(b.finish())
}

pub fn build_adder(w: usize) -> Result<Circuit> {
    if w < 2 {
        return Err(BuildError::InvalidParams("adder width must be >= 2".into()));
    }
    let mut b = CircuitBuilder::new();
    let x = b.data("x", w)?;
    let y = b.data("y", w)?;
    let c = b.ancilla("carry", w - 1)?;
    emit_adder(&mut b, &x.wires(), &y.wires(), &c.wires())?;
    Ok(b.finish())
}

pub fn build_double_ctrl_adder(w: usize, addend: u128) -> Result<Circuit> {
    if w < 2 {
        return Err(BuildError::InvalidParams("adder width must be >= 2".into()));
    }
    fits(addend, w)?;
    let mut b = CircuitBuilder::new();
    let ctrl = b.data("ctrl", 2)?;
    let z = b.data("z", w)?;
    let q = b.ancilla("q", 1)?;
    let c = b.ancilla("carry", w - 1)?;
    emit_double_ctrl_adder(&mut b, ctrl.wire(0), ctrl.wire(1), q.wire(0), &z.wires(), addend, &c.wires())?;
    Ok(b.finish())
}

pub fn build_comparison(w: usize, y: u128) -> Result<Circuit> {
    let mut b = CircuitBuilder::new();
    let x = b.data("x", w)?;
    let c = b.ancilla("carry", w)?;
    emit_comparison(&mut b, &x.wires(), y, &c.wires(), None)?;
    Ok(b.finish())
}

pub fn build_coset_init(n: usize, m: usize, modulus: u128) -> Result<Circuit> {
    if !in_bit_range(n, modulus) {
        return Err(BuildError::Modulus(modulus));
    }
    let mut b = CircuitBuilder::new();
    let x = b.data("x", n + m)?;
    let s = b.ancilla("scratch", n + m)?;
    emit_coset_init(&mut b, &x.wires(), modulus, m, &s.wires())?;
    Ok(b.finish())
}

/// Registers `address`, `target`, and a `scratch` wide enough for either
/// direction, so lookup and unlookup circuits can be concatenated.
fn lookup_layout(b: &mut CircuitBuilder, wa: usize, n_out: usize) -> Result<(RegisterId, RegisterId, RegisterId)> {
    if wa == 0 || n_out == 0 {
        return Err(BuildError::InvalidParams("address and output widths must be >= 1".into()));
    }
    let address = b.data("address", wa)?;
    let target = b.data("target", n_out)?;
    let scratch = b.ancilla("scratch", unlookup_scratch(wa).max(wa - 1).max(1))?;
    Ok((address, target, scratch))
}

pub fn build_lookup(wa: usize, table: &[u128], n_out: usize) -> Result<Circuit> {
    let mut b = CircuitBuilder::new();
    let (a, t, s) = lookup_layout(&mut b, wa, n_out)?;
    emit_lookup(&mut b, &a.wires(), table, &t.wires(), &s.wires())?;
    Ok(b.finish())
}

pub fn build_unlookup(wa: usize, table: &[u128], n_out: usize) -> Result<Circuit> {
    let mut b = CircuitBuilder::new();
    let (a, t, s) = lookup_layout(&mut b, wa, n_out)?;
    emit_unlookup(&mut b, &a.wires(), table, &t.wires(), &s.wires())?;
    Ok(b.finish())
}

/// First product-addition of exponent window `e_window`: acc += x * g^(2^i e_window) mod N.
pub fn build_product_add(p: &AlgoParams, inst: &ProblemInstance, e_window: usize) -> Result<Circuit> {
    check_instance(p, inst)?;
    let mut b = CircuitBuilder::new();
    let l = ModExpLayout::alloc(&mut b, p)?;
    emit_product_add(&mut b, &l, p, inst, e_window, false)?;
    Ok(b.finish())
}

pub fn build_multiplication(p: &AlgoParams, inst: &ProblemInstance, e_window: usize) -> Result<Circuit> {
    check_instance(p, inst)?;
    let mut b = CircuitBuilder::new();
    let l = ModExpLayout::alloc(&mut b, p)?;
    emit_multiplication(&mut b, &l, p, inst, e_window)?;
    Ok(b.finish())
}

/// |e>|1>|0> -> |e>|coset(g^e mod N)>|coset(0)>; the result lands in register `x`.
pub fn build_mod_exp(p: &AlgoParams, inst: &ProblemInstance) -> Result<Circuit> {
    check_instance(p, inst)?;
    let mut b = CircuitBuilder::new();
    let l = ModExpLayout::alloc(&mut b, p)?;
    emit_mod_exp(&mut b, &l, p, inst)?;
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit_ir::{count_gates, validate, GateCounts};

    #[test]
    fn ragged_windows() {
        assert_eq!(windows(10, 3), vec![(0, 3), (3, 3), (6, 3), (9, 1)]);
        assert_eq!(windows(6, 3), vec![(0, 3), (3, 3)]);
    }

    #[test]
    fn adder_counts_match_closed_form() {
        for w in 2..12u128 {
            let c = count_gates(&build_adder(w as usize).unwrap());
            assert_eq!(c, GateCounts::from_ints(0, 6 * w - 9, 0, w - 1, 0));
        }
    }

    #[test]
    fn fredkin_counts() {
        assert_eq!(count_gates(&build_fredkin()), GateCounts::from_ints(0, 2, 1, 0, 0));
        assert_eq!(count_gates(&build_controlled_swap(7).unwrap()), GateCounts::from_ints(0, 14, 7, 0, 0));
    }

    #[test]
    fn double_ctrl_mean_counts() {
        let w = 10;
        let total = (0..1u128 << w)
            .map(|a| count_gates(&build_double_ctrl_adder(w, a).unwrap()))
            .fold(GateCounts::zero(), |a, b| a + b);
        let mean = total * num_rational::Ratio::new(1, 1 << w);
        assert_eq!(mean.cnot, 46.into());
        assert_eq!(mean.toffoli, 19.into());
    }

    #[test]
    fn lookup_cnot_count() {
        let n = 5;
        let table: Vec<u128> = (0..64).map(|k| (k * 7) % 32).collect();
        let pop: u128 = table.iter().map(|t| t.count_ones() as u128).sum();
        let c = count_gates(&build_lookup(6, &table, n).unwrap());
        assert_eq!(c, GateCounts::from_ints(2, 62 + pop, 0, 62, 0));
    }

    #[test]
    fn unlookup_one_qubit_count() {
        let n = 7usize;
        let table: Vec<u128> = (0..64).map(|k| (k * 5 + 1) % 100).collect();
        let c = count_gates(&build_unlookup(6, &table, n).unwrap());
        assert_eq!(c.one_qubit, (n as u128 + 20).into());
        assert_eq!(c.measure, (n as u128).into());
    }

    #[test]
    fn builders_validate() {
        let p = AlgoParams::new(6, 6, 3, 2, 4).unwrap();
        let inst = ProblemInstance::new(6, 35, 2).unwrap();
        for c in [
            build_adder(5).unwrap(),
            build_double_ctrl_adder(5, 11).unwrap(),
            build_comparison(5, 9).unwrap(),
            build_coset_init(4, 2, 15).unwrap(),
            build_lookup(3, &[1, 2, 3, 4, 5, 6, 7, 0], 3).unwrap(),
            build_unlookup(3, &[1, 2, 3, 4, 5, 6, 7, 0], 3).unwrap(),
            build_mod_exp(&p, &inst).unwrap(),
        ] {
            assert!(validate(&c).is_empty(), "{:?}", validate(&c));
        }
    }

    #[test]
    fn block_structure() {
        let p = AlgoParams::new(6, 6, 3, 2, 4).unwrap();
        let inst = ProblemInstance::new(6, 35, 2).unwrap();
        assert_eq!(p.multiplier_windows().len(), 5);
        assert_eq!(p.num_multiplications(), 2);
        let pa = count_gates(&build_product_add(&p, &inst, 0).unwrap());
        let mul = count_gates(&build_multiplication(&p, &inst, 0).unwrap());
        // one unlookup per block, each measuring n target wires
        assert_eq!(pa.measure, (5 * 6).into());
        assert_eq!(mul.measure, pa.measure * num_rational::Ratio::from_integer(2));
        assert_eq!(mul.and_pairs, pa.and_pairs * num_rational::Ratio::from_integer(2));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_adder(1).is_err());
        assert!(build_double_ctrl_adder(4, 16).is_err());
        assert!(build_comparison(4, 0).is_err());
        assert!(build_comparison(4, 17).is_err());
        assert!(build_lookup(3, &[0; 7], 2).is_err());
        assert!(build_coset_init(4, 2, 17).is_err());
        assert!(ProblemInstance::new(6, 35, 7).is_err());
        assert!(ProblemInstance::new(6, 37, 2).is_err());
        assert!(AlgoParams::new(6, 6, 7, 2, 4).is_err());
    }

    #[test]
    fn tables_reduce_mod_n() {
        let inst = ProblemInstance::new(6, 35, 2).unwrap();
        let t = inst.product_add_table(0, 3, 2, 2, false);
        assert_eq!(t.len(), 32);
        assert!(t.iter().all(|&v| v < 35));
        // xv = 1, ev = 3: 2^2 * 1 * 2^3 = 32
        assert_eq!(t[1 + 4 * 3], 32);
        let t2 = inst.product_add_table(0, 3, 0, 2, true);
        // ev = 1, xv = 1: -(2^-1) = -18 = 17 mod 35
        assert_eq!(t2[1 + 4], 17);
        assert_eq!(inst.inverse(2), 18);
    }
}
