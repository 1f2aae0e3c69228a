//! Exhaustive search over (w_e, w_m, m, d) minimizing t_exp x processor qubits.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith_builders::{AlgoParams, BuildError};
use crate::circuit_ir::count_f64;
use crate::counts::{exact_counts, AlgoCost, CountMode};
use crate::exec::Exec;
use crate::ftec::{
    code_geometry, logical_error, logical_gate_time, logical_qubits, memory_requirements, success_probability, CodeModel,
    FtecError, MemoryRequirements, Physical, SuccessConvention,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Ftec(#[from] FtecError),
    #[error("no feasible point in the search space")]
    NoSolution,
    #[error("success probability underflows to zero")]
    Underflow,
}

/// Known operating points: (n, n_e, m, w_e, w_m, d).
pub const TABLE_DEFAULTS: [(usize, usize, usize, usize, usize, usize); 8] = [
    (6, 6, 4, 3, 2, 7),
    (8, 9, 8, 3, 2, 13),
    (16, 21, 11, 3, 2, 17),
    (128, 189, 19, 3, 3, 29),
    (256, 381, 21, 3, 3, 33),
    (512, 765, 24, 3, 3, 37),
    (829, 1242, 26, 3, 3, 41),
    (2048, 3029, 30, 3, 3, 47),
];

/// Exponent length for `n`; the flag is true when it was interpolated as ceil(3n/2).
pub fn default_n_e(n: usize) -> (usize, bool) {
    match TABLE_DEFAULTS.iter().find(|r| r.0 == n) {
        Some(r) => (r.1, false),
        None => ((3 * n).div_ceil(2), true),
    }
}

/// Tabulated parameters and distance for `n`, if any.
pub fn table_point(n: usize) -> Option<(AlgoParams, usize)> {
    TABLE_DEFAULTS
        .iter()
        .find(|r| r.0 == n)
        .map(|&(n, n_e, m, w_e, w_m, d)| (AlgoParams { n, n_e, w_e, w_m, m }, d))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub w_e: Vec<usize>,
    pub w_m: Vec<usize>,
    pub m: Vec<usize>,
    pub d: Vec<usize>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            w_e: (1..=6).collect(),
            w_m: (1..=6).collect(),
            m: (1..=64).collect(),
            d: (3..=63).step_by(2).collect(),
        }
    }
}

impl SearchSpace {
    pub fn single(p: &AlgoParams, d: usize) -> Self {
        SearchSpace { w_e: vec![p.w_e], w_m: vec![p.w_m], m: vec![p.m], d: vec![d] }
    }

    pub fn size(&self) -> usize {
        self.w_e.len() * self.w_m.len() * self.m.len() * self.d.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub params: AlgoParams,
    pub d: usize,
    pub processor_qubits: u64,
    pub logical_error: f64,
    pub gate_time: f64,
    pub sequential_depth: f64,
    /// Single-attempt run-time in seconds.
    pub t: f64,
    pub p_s: f64,
    pub t_exp: f64,
    pub volume: f64,
    pub logical_qubits: u64,
    pub memory: MemoryRequirements,
}

fn estimate_from_cost(p: &AlgoParams, cost: &AlgoCost, d: usize, phys: &Physical, conv: &SuccessConvention) -> Result<ResourceEstimate, OptError> {
    let model = CodeModel::new(d, *phys)?;
    let geo = code_geometry(d)?;
    let gate_time = logical_gate_time(&model);
    let depth = count_f64(&cost.sequential_depth);
    let t = depth * gate_time;
    let p_s = success_probability(cost, &model, conv)?;
    if !(p_s > 0.0) {
        return Err(OptError::Underflow);
    }
    let t_exp = t / p_s;
    let l = logical_qubits(p);
    Ok(ResourceEstimate {
        params: *p,
        d,
        processor_qubits: geo.processor_qubits,
        logical_error: logical_error(&model)?,
        gate_time,
        sequential_depth: depth,
        t,
        p_s,
        t_exp,
        volume: t_exp * geo.processor_qubits as f64,
        logical_qubits: l,
        memory: memory_requirements(l, &model, Some(cost))?,
    })
}

pub fn evaluate(p: &AlgoParams, d: usize, phys: &Physical, conv: &SuccessConvention) -> Result<ResourceEstimate, OptError> {
    p.check()?;
    let cost = exact_counts(p, CountMode::Mean);
    estimate_from_cost(p, &cost, d, phys, conv)
}

/// Total order: volume, processor qubits, t_exp, then parameters.
pub fn rank(a: &ResourceEstimate, b: &ResourceEstimate) -> Ordering {
    a.volume
        .total_cmp(&b.volume)
        .then(a.processor_qubits.cmp(&b.processor_qubits))
        .then(a.t_exp.total_cmp(&b.t_exp))
        .then((a.params, a.d).cmp(&(b.params, b.d)))
}

pub fn optimize(
    n: usize,
    n_e: usize,
    phys: &Physical,
    space: &SearchSpace,
    conv: &SuccessConvention,
    exec: Exec,
) -> Result<ResourceEstimate, OptError> {
    phys.check()?;
    let mut combos = Vec::new();
    for &w_e in &space.w_e {
        for &w_m in &space.w_m {
            for &m in &space.m {
                if let Ok(p) = AlgoParams::new(n, n_e, w_e, w_m, m) {
                    combos.push(p);
                }
            }
        }
    }
    exec.min_by(
        &combos,
        |p| {
            let cost = exact_counts(p, CountMode::Mean);
            space
                .d
                .iter()
                .filter_map(|&d| estimate_from_cost(p, &cost, d, phys, conv).ok())
                .filter(|e| e.volume.is_finite())
                .min_by(rank)
        },
        rank,
    )
    .ok_or(OptError::NoSolution)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Swept value: n, or p/p_th.
    pub axis: f64,
    pub n: usize,
    pub n_e: usize,
    pub interpolated_n_e: bool,
    pub result: Result<ResourceEstimate, String>,
}

pub fn sweep_n(ns: &[usize], phys: &Physical, space: &SearchSpace, conv: &SuccessConvention, exec: Exec) -> Vec<SweepRow> {
    ns.iter()
        .map(|&n| {
            let (n_e, interp) = default_n_e(n);
            SweepRow {
                axis: n as f64,
                n,
                n_e,
                interpolated_n_e: interp,
                result: optimize(n, n_e, phys, space, conv, exec).map_err(|e| e.to_string()),
            }
        })
        .collect()
}

pub fn sweep_ratio(
    n: usize,
    ratios: &[f64],
    phys: &Physical,
    space: &SearchSpace,
    conv: &SuccessConvention,
    exec: Exec,
) -> Vec<SweepRow> {
    let (n_e, interp) = default_n_e(n);
    ratios
        .iter()
        .map(|&r| {
            let ph = Physical { p: r * phys.p_th, ..*phys };
            SweepRow {
                axis: r,
                n,
                n_e,
                interpolated_n_e: interp,
                result: optimize(n, n_e, &ph, space, conv, exec).map_err(|e| e.to_string()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_space() {
        let (p, d) = table_point(128).unwrap();
        let e = optimize(128, p.n_e, &Physical::default(), &SearchSpace::single(&p, d), &SuccessConvention::default(), Exec::Sequential)
            .unwrap();
        assert_eq!((e.params, e.d), (p, d));
    }

    #[test]
    fn n_e_defaults() {
        assert_eq!(default_n_e(2048), (3029, false));
        assert_eq!(default_n_e(100), (150, true));
    }

    #[test]
    fn evaluate_is_pure() {
        let (p, d) = table_point(512).unwrap();
        let a = evaluate(&p, d, &Physical::default(), &SuccessConvention::default()).unwrap();
        let b = evaluate(&p, d, &Physical::default(), &SuccessConvention::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.t_exp >= a.t && a.volume > 0.0);
    }

    #[test]
    fn tiny_distance_is_finite_or_underflow() {
        let (p, _) = table_point(2048).unwrap();
        match evaluate(&p, 3, &Physical::default(), &SuccessConvention::default()) {
            Ok(e) => assert!(e.volume > 0.0),
            Err(e) => assert_eq!(e, OptError::Underflow),
        }
    }

    #[test]
    fn empty_space() {
        let s = SearchSpace { w_e: vec![], ..SearchSpace::default() };
        let r = optimize(16, 21, &Physical::default(), &s, &SuccessConvention::default(), Exec::Sequential);
        assert_eq!(r.unwrap_err(), OptError::NoSolution);
    }
}
