//! Exact and leading-order gate counts for the windowed exponentiation.
//!
//! [`exact_counts`] mirrors the emission order of the builders block by block
//! without materializing circuits. In [`CountMode::Mean`], data-dependent gates
//! take their expected value over uniformly random classical data. In
//! [`CountMode::Instance`], the actual tables for a concrete N and g are used,
//! so the result equals `count_gates(build_mod_exp(..))` exactly.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::arith_builders::{unary_split, AlgoParams, ProblemInstance};
use crate::circuit_ir::{count_f64, Count, GateCounts};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode<'a> {
    Mean,
    Instance(&'a ProblemInstance),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgoCost {
    pub counts: GateCounts,
    /// Gate steps after AND conversion, executed one after another.
    pub sequential_depth: Count,
    /// Per-subcircuit tallies; sums to `counts`.
    pub breakdown: BTreeMap<&'static str, GateCounts>,
    /// Sequential depth of the longest single product-addition.
    pub max_product_add_depth: Count,
    /// Coset-encoded additions, each deviating from exact modular addition
    /// with probability about 2^-padding.
    pub coset_additions: u128,
    pub padding: usize,
}

impl AlgoCost {
    /// Counts of the gates the exponentiation circuit itself contains
    /// (everything except the cost-only Fourier transform).
    pub fn circuit_counts(&self) -> GateCounts {
        self.breakdown.iter().filter(|(k, _)| **k != "fourier").map(|(_, v)| v.clone()).sum()
    }
}

fn int(v: u128) -> Count {
    Count::from_integer(v)
}

fn frac(a: u128, b: u128) -> Count {
    Count::new(a, b)
}

fn pow2(k: usize) -> u128 {
    1u128 << k
}

fn bit(v: u128, i: usize) -> u128 {
    (v >> i) & 1
}

pub fn adder_counts(w: usize) -> GateCounts {
    let w = w as u128;
    GateCounts::from_ints(0, 6 * w - 9, 0, w - 1, 0)
}

/// Single-control semi-classical adder; `addend = None` averages over addends.
pub fn controlled_const_adder_counts(w: usize, addend: Option<u128>) -> GateCounts {
    let wu = w as u128;
    let mut c = GateCounts::zero();
    match addend {
        None => {
            c.cnot = frac(11 * wu, 2) - int(9);
            c.toffoli = int(2 * wu - 3);
        }
        Some(a) => {
            let mid: u128 = (1..w - 1).map(|i| 3 + 5 * bit(a, i)).sum();
            c.cnot = int(bit(a, 0) + mid + 1 + bit(a, w - 1));
            c.toffoli = int(2 * bit(a, 0) + 2 * (wu - 2));
        }
    }
    c
}

pub fn double_ctrl_adder_counts(w: usize, addend: Option<u128>) -> GateCounts {
    let mut c = controlled_const_adder_counts(w, addend);
    c.toffoli += int(2);
    c
}

pub fn comparison_counts(w: usize, y: Option<u128>) -> GateCounts {
    let wu = w as u128;
    let mut c = GateCounts::zero();
    c.and_pairs = int(wu - 1);
    match y {
        None => {
            c.cnot = int(4 * (wu - 1) + 1);
            c.one_qubit = int(2 * (wu - 1) + 1);
        }
        Some(y) => {
            let yp = pow2(w) - y;
            let pop = (1..w).map(|i| bit(yp, i)).sum::<u128>();
            c.cnot = int(4 * (wu - 1) + 2 * bit(yp, 0));
            c.one_qubit = int(4 * pop + 1);
        }
    }
    c
}

pub fn coset_init_counts(w: usize, m: usize, modulus: Option<u128>) -> GateCounts {
    let mut c = GateCounts::zero();
    for j in 0..m {
        let y = modulus.map(|nm| nm << j);
        c.one_qubit += int(2);
        c.measure += int(1);
        c += controlled_const_adder_counts(w, y);
        c += comparison_counts(w, y);
    }
    c
}

/// Table lookup writing `n_out`-bit entries; `table = None` uses n_out/2 set bits per entry.
pub fn lookup_counts(wa: usize, n_out: usize, table: Option<&[u128]>) -> GateCounts {
    let internal = pow2(wa) - 2;
    let data = match table {
        None => int(pow2(wa) * n_out as u128) / int(2),
        Some(t) => int(t.iter().map(|v| v.count_ones() as u128).sum()),
    };
    GateCounts { one_qubit: int(2), cnot: int(internal) + data, toffoli: Count::zero(), and_pairs: int(internal), measure: Count::zero() }
}

/// Measurement-based unlookup; `table = None` assumes half the phase
/// corrections fire.
pub fn unlookup_counts(wa: usize, n_out: usize, table: Option<&[u128]>) -> GateCounts {
    let n = n_out as u128;
    if let Some(t) = table {
        if t.iter().all(|&v| v == 0) {
            return GateCounts::from_ints(n, 0, 0, 0, n);
        }
    }
    let (s, wh) = unary_split(wa);
    let unary = pow2(s) - 1;
    let ladder = pow2(wh) - 2;
    let data = match table {
        None => int(pow2(wa - 1)),
        Some(t) => int(t.iter().filter(|&&v| v != 0).count() as u128),
    };
    GateCounts {
        one_qubit: int(n + pow2(s + 1) + 4),
        cnot: int(2 * unary + ladder) + data,
        toffoli: Count::zero(),
        and_pairs: int(unary + ladder),
        measure: int(n),
    }
}

/// Semi-classical Fourier transform: one Hadamard, one merged classically
/// controlled phase and one measurement per exponent qubit.
pub fn fourier_counts(n_e: usize) -> GateCounts {
    let ne = n_e as u128;
    GateCounts::from_ints(2 * ne, 0, 0, 0, ne)
}

/// Each AND pair (or pair of Toffolis) becomes 8 one-qubit and 3.5 two-qubit gates.
pub fn and_to_gates(c: &GateCounts) -> GateCounts {
    let pairs = c.and_pairs + c.toffoli / int(2);
    GateCounts {
        one_qubit: c.one_qubit + pairs * int(8),
        cnot: c.cnot + pairs * frac(7, 2),
        toffoli: Count::zero(),
        and_pairs: Count::zero(),
        measure: c.measure,
    }
}

/// Logical gate steps under fully sequential execution.
pub fn sequential_depth(c: &GateCounts) -> Count {
    let g = and_to_gates(c);
    g.one_qubit + g.cnot + g.measure
}

/// Group windows by width (mean mode) or keep each one (instance mode).
fn window_classes(ws: Vec<(usize, usize)>, by_width: bool) -> Vec<((usize, usize), u128)> {
    if !by_width {
        return ws.into_iter().map(|w| (w, 1)).collect();
    }
    let mut m: BTreeMap<usize, (usize, u128)> = BTreeMap::new();
    for (s, w) in ws {
        m.entry(w).or_insert((s, 0)).1 += 1;
    }
    m.into_iter().map(|(w, (s, k))| ((s, w), k)).collect()
}

pub fn exact_counts(p: &AlgoParams, mode: CountMode<'_>) -> AlgoCost {
    let w = p.width();
    let mean = matches!(mode, CountMode::Mean);
    let modulus = match mode {
        CountMode::Mean => None,
        CountMode::Instance(i) => Some(i.modulus),
    };
    let mut lookup = GateCounts::zero();
    let mut adder = GateCounts::zero();
    let mut unlookup = GateCounts::zero();
    let mut max_pa = Count::zero();
    let x_classes = window_classes(p.multiplier_windows(), mean);
    for ((e_bit, e_width), e_mult) in window_classes(p.exponent_windows(), mean) {
        for second in [false, true] {
            let mut pa = GateCounts::zero();
            for &((x_bit, x_width), x_mult) in &x_classes {
                let wa = e_width + x_width;
                let (l, u) = match mode {
                    CountMode::Mean => (lookup_counts(wa, p.n, None), unlookup_counts(wa, p.n, None)),
                    CountMode::Instance(inst) => {
                        let t = inst.product_add_table(e_bit, e_width, x_bit, x_width, second);
                        (lookup_counts(wa, p.n, Some(&t)), unlookup_counts(wa, p.n, Some(&t)))
                    }
                };
                let a = adder_counts(w);
                pa += (l.clone() + &a + &u) * x_mult;
                lookup += l * (x_mult * e_mult);
                adder += a * (x_mult * e_mult);
                unlookup += u * (x_mult * e_mult);
            }
            let d = sequential_depth(&pa);
            if d > max_pa {
                max_pa = d;
            }
        }
    }
    let coset = coset_init_counts(w, p.m, modulus) * 2;
    let fourier = fourier_counts(p.n_e);
    let mut breakdown = BTreeMap::new();
    breakdown.insert("adder", adder);
    breakdown.insert("coset_init", coset);
    breakdown.insert("fourier", fourier);
    breakdown.insert("lookup", lookup);
    breakdown.insert("unlookup", unlookup);
    let counts: GateCounts = breakdown.values().cloned().sum();
    AlgoCost {
        sequential_depth: sequential_depth(&counts),
        counts,
        breakdown,
        max_product_add_depth: max_pa,
        coset_additions: p.num_coset_additions() as u128,
        padding: p.m,
    }
}

/// The three displayed leading-order terms (before AND conversion).
pub fn leading_order_counts(p: &AlgoParams) -> GateCounts {
    let (n, ne, w) = (p.n as u128, p.n_e as u128, p.width() as u128);
    let den = (p.w_e * p.w_m) as u128;
    GateCounts {
        one_qubit: frac(2 * ne * w * n, den),
        cnot: frac((pow2(p.w_e + p.w_m) * n + 12 * w) * ne * w, den),
        toffoli: frac(4 * ne * w * w, den),
        and_pairs: Count::zero(),
        measure: Count::zero(),
    }
}

/// Leading order after AND conversion: 2 n_e(n+m)(9n+8m)/(w_e w_m) one-qubit
/// gates and (2^(w_e+w_m) n + 19(n+m)) n_e(n+m)/(w_e w_m) two-qubit gates.
pub fn leading_order_converted(p: &AlgoParams) -> GateCounts {
    let (n, m, ne, w) = (p.n as u128, p.m as u128, p.n_e as u128, p.width() as u128);
    let den = (p.w_e * p.w_m) as u128;
    GateCounts {
        one_qubit: frac(2 * ne * w * (9 * n + 8 * m), den),
        cnot: frac((pow2(p.w_e + p.w_m) * n + 19 * w) * ne * w, den),
        toffoli: Count::zero(),
        and_pairs: Count::zero(),
        measure: Count::zero(),
    }
}

/// Unwindowed accounting: per exponent bit, 2(n+m) doubly controlled adders
/// and one register-wide controlled swap (mean over addends).
pub fn unwindowed_counts(p: &AlgoParams) -> GateCounts {
    let w = p.width();
    let wu = w as u128;
    let per_bit = double_ctrl_adder_counts(w, None) * (2 * wu) + GateCounts::from_ints(0, 2 * wu, wu, 0, 0);
    per_bit * p.n_e as u128
}

/// Ratio helper for reports.
pub fn ratio(a: &Count, b: &Count) -> f64 {
    count_f64(a) / count_f64(b)
}
