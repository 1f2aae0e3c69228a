//! 3D gauge color-code model: geometry, logical error rate, gate timing,
//! success probability and multimode-memory requirements.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith_builders::AlgoParams;
use crate::circuit_ir::{count_f64, Count};
use crate::counts::{and_to_gates, AlgoCost};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FtecError {
    #[error("code distance {0} must be odd and >= 3")]
    Distance(usize),
    #[error("p above threshold: p = {p} >= p_th = {p_th}")]
    AboveThreshold { p: f64, p_th: f64 },
    #[error("invalid physical parameter: {0}")]
    Invalid(String),
}

/// Physical assumptions shared by every distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Physical {
    pub p: f64,
    pub p_th: f64,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Processor cycle time in seconds.
    pub t_c: f64,
}

impl Default for Physical {
    fn default() -> Self {
        Physical { p: 1e-3, p_th: 7.5e-3, a: 0.033, alpha: 0.516, beta: 0.822, t_c: 1e-6 }
    }
}

impl Physical {
    pub fn check(&self) -> Result<(), FtecError> {
        if !(self.p > 0.0 && self.p_th < 1.0 && self.p_th > 0.0) || !(self.t_c > 0.0) {
            return Err(FtecError::Invalid(format!("p = {}, p_th = {}, t_c = {}", self.p, self.p_th, self.t_c)));
        }
        if self.p >= self.p_th {
            return Err(FtecError::AboveThreshold { p: self.p, p_th: self.p_th });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeModel {
    pub d: usize,
    pub phys: Physical,
}

impl CodeModel {
    pub fn new(d: usize, phys: Physical) -> Result<Self, FtecError> {
        code_geometry(d)?;
        phys.check()?;
        Ok(CodeModel { d, phys })
    }

    pub fn n_code(&self) -> usize {
        (self.d - 1) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeGeometry {
    pub d: usize,
    pub n_code: usize,
    pub phys_per_logical: u64,
    pub slice_max: u64,
    pub n_slices: u64,
    pub processor_qubits: u64,
}

pub fn code_geometry(d: usize) -> Result<CodeGeometry, FtecError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(FtecError::Distance(d));
    }
    let dd = d as u64;
    let slice_max = (3 * dd * dd + 2 * dd - 3) / 2;
    Ok(CodeGeometry {
        d,
        n_code: (d - 1) / 2,
        phys_per_logical: (dd * dd * dd + dd) / 2,
        slice_max,
        n_slices: dd - 2,
        processor_qubits: 4 * slice_max,
    })
}

/// A exp(alpha ln(p/p_th) d^beta).
pub fn logical_error(model: &CodeModel) -> Result<f64, FtecError> {
    let ph = &model.phys;
    ph.check()?;
    Ok(ph.a * (ph.alpha * (ph.p / ph.p_th).ln() * (model.d as f64).powf(ph.beta)).exp())
}

/// Seconds per logical gate (or measurement): two slices of d-2 cycles.
pub fn logical_gate_time(model: &CodeModel) -> f64 {
    2.0 * (model.d as f64 - 2.0) * model.phys.t_c
}

/// How logical-error exposures and coset deviations enter the success probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccessConvention {
    /// Count one exposure per measurement.
    pub measurements_exposed: bool,
    /// Multiply by (1 - 2^-m) per coset-encoded addition.
    pub coset_deviation: bool,
}

impl Default for SuccessConvention {
    fn default() -> Self {
        SuccessConvention { measurements_exposed: true, coset_deviation: true }
    }
}

/// One exposure per logical qubit per gate: 1q + 2*2q (+ measurements).
pub fn error_events(cost: &AlgoCost, conv: &SuccessConvention) -> f64 {
    let g = and_to_gates(&cost.counts);
    let mut ev = g.one_qubit + g.cnot * Count::from_integer(2);
    if conv.measurements_exposed {
        ev += g.measure;
    }
    count_f64(&ev)
}

pub fn success_probability(cost: &AlgoCost, model: &CodeModel, conv: &SuccessConvention) -> Result<f64, FtecError> {
    let pl = logical_error(model)?;
    let mut log_ps = error_events(cost, conv) * (-pl).ln_1p();
    if conv.coset_deviation {
        log_ps += cost.coset_additions as f64 * (-(0.5f64.powi(cost.padding as i32))).ln_1p();
    }
    Ok(log_ps.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryRequirements {
    pub logical_qubits: u64,
    pub spatial_modes: u64,
    pub temporal_modes: u64,
    pub total_modes: u64,
    /// Seconds to error-correct every stored qubit, two slices at a time.
    pub all_memory_correction_time: f64,
    /// Upper estimate of the time a stored qubit waits between two accesses.
    pub max_storage_gap: f64,
}

/// Logical qubits held in memory: two coset registers, the n-bit lookup
/// target, n+m-1 carry/unary ancillas and the exponent window.
pub fn logical_qubits(p: &AlgoParams) -> u64 {
    let w = p.width() as u64;
    2 * w + p.n as u64 + (w - 1) + p.w_e as u64
}

pub fn memory_requirements(l: u64, model: &CodeModel, cost: Option<&AlgoCost>) -> Result<MemoryRequirements, FtecError> {
    if l == 0 {
        return Err(FtecError::Invalid("L must be >= 1".into()));
    }
    let g = code_geometry(model.d)?;
    let gap = cost
        .map(|c| count_f64(&c.max_product_add_depth) * logical_gate_time(model))
        .unwrap_or(0.0);
    Ok(MemoryRequirements {
        logical_qubits: l,
        spatial_modes: l * g.slice_max,
        temporal_modes: g.n_slices,
        total_modes: l * g.phys_per_logical,
        all_memory_correction_time: l as f64 * g.n_slices as f64 * model.phys.t_c / 2.0,
        max_storage_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_small() {
        let g = code_geometry(7).unwrap();
        assert_eq!((g.processor_qubits, g.phys_per_logical, g.slice_max, g.n_slices), (316, 175, 79, 5));
        assert_eq!(code_geometry(3).unwrap().phys_per_logical, 15);
        assert_eq!(code_geometry(47).unwrap().processor_qubits, 13436);
        assert!(code_geometry(8).is_err());
        assert!(code_geometry(1).is_err());
    }

    #[test]
    fn slice_forms_agree() {
        for d in (3..=63).step_by(2) {
            let g = code_geometry(d).unwrap();
            let nc = g.n_code as u64;
            assert_eq!(g.slice_max, 6 * nc * nc + 8 * nc + 1);
            let dd = d as u64;
            assert_eq!(g.processor_qubits, 2 * (3 * dd * dd + 2 * dd - 3));
        }
    }

    #[test]
    fn threshold_limit() {
        let phys = Physical { p: 7.5e-3 * (1.0 - 1e-12), ..Physical::default() };
        let m = CodeModel { d: 47, phys };
        assert!((logical_error(&m).unwrap() - 0.033).abs() < 1e-9);
        let above = CodeModel { d: 47, phys: Physical { p: 8e-3, ..Physical::default() } };
        assert!(matches!(logical_error(&above), Err(FtecError::AboveThreshold { .. })));
    }

    #[test]
    fn gate_time() {
        let m = CodeModel::new(47, Physical::default()).unwrap();
        assert!((logical_gate_time(&m) - 90e-6).abs() < 1e-15);
    }

    #[test]
    fn memory_small_row() {
        let m = CodeModel::new(7, Physical::default()).unwrap();
        let r = memory_requirements(38, &m, None).unwrap();
        assert_eq!((r.spatial_modes, r.temporal_modes, r.total_modes), (3002, 5, 6650));
        assert!((r.all_memory_correction_time - 95e-6).abs() < 1e-12);
        let one = memory_requirements(1, &m, None).unwrap();
        assert_eq!(one.spatial_modes, code_geometry(7).unwrap().slice_max);
        assert!(one.total_modes <= one.spatial_modes * one.temporal_modes);
    }

    #[test]
    fn logical_qubits_match_rows() {
        let rows = [(6, 6, 4, 3, 2, 38), (2048, 3029, 30, 3, 3, 8284), (128, 189, 19, 3, 3, 571)];
        for (n, ne, m, we, wm, l) in rows {
            assert_eq!(logical_qubits(&AlgoParams::new(n, ne, we, wm, m).unwrap()), l);
        }
    }
}
