//! Human, CSV and JSON renderings. Machine formats carry every number unrounded.

use qmem_core::circuit_ir::{Count, GateCounts};
use qmem_core::optimizer::{ResourceEstimate, SweepRow};
use qmem_core::verify::Outcome;
use serde::Serialize;
use serde_json::json;

use crate::config::Format;

pub const CSV_COLUMNS: [&str; 13] = [
    "n",
    "n_e",
    "m",
    "w_e",
    "w_m",
    "d",
    "processor_qubits",
    "t_exp_seconds",
    "logical_qubits",
    "total_modes",
    "spatial_modes",
    "temporal_modes",
    "all_memory_correction_seconds",
];

/// Seconds in the largest unit that keeps the value >= 1.
pub fn humanize(seconds: f64) -> String {
    const UNITS: [(f64, &str); 6] =
        [(86400.0, "days"), (3600.0, "hours"), (60.0, "min"), (1.0, "s"), (1e-3, "ms"), (1e-6, "µs")];
    let (scale, unit) = UNITS.iter().copied().find(|(s, _)| seconds >= *s).unwrap_or(UNITS[5]);
    let v = seconds / scale;
    let digits = if v >= 100.0 {
        0
    } else if v >= 10.0 {
        1
    } else {
        2
    };
    format!("{v:.digits$} {unit}")
}

fn csv_fields(e: &ResourceEstimate) -> Vec<String> {
    let p = &e.params;
    vec![
        p.n.to_string(),
        p.n_e.to_string(),
        p.m.to_string(),
        p.w_e.to_string(),
        p.w_m.to_string(),
        e.d.to_string(),
        e.processor_qubits.to_string(),
        e.t_exp.to_string(),
        e.logical_qubits.to_string(),
        e.memory.total_modes.to_string(),
        e.memory.spatial_modes.to_string(),
        e.memory.temporal_modes.to_string(),
        e.memory.all_memory_correction_time.to_string(),
    ]
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

fn json_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn estimate(e: &ResourceEstimate, format: Format) -> String {
    match format {
        Format::Csv => csv_string(&CSV_COLUMNS, &[csv_fields(e)]),
        Format::Json => json_string(e),
        Format::Human => {
            let p = &e.params;
            let mut s = format!("n = {}, n_e = {}, m = {}, w_e = {}, w_m = {}, d = {}\n", p.n, p.n_e, p.m, p.w_e, p.w_m, e.d);
            let lines: [(&str, String); 12] = [
                ("processor qubits", e.processor_qubits.to_string()),
                ("logical error rate", format!("{:.3e}", e.logical_error)),
                ("sequential depth", format!("{:.4e}", e.sequential_depth)),
                ("run-time per attempt", humanize(e.t)),
                ("success probability", format!("{:.4}", e.p_s)),
                ("expected run-time", humanize(e.t_exp)),
                ("volume (qubit s)", format!("{:.4e}", e.volume)),
                ("logical qubits", e.logical_qubits.to_string()),
                ("total modes", e.memory.total_modes.to_string()),
                ("spatial modes", e.memory.spatial_modes.to_string()),
                ("temporal modes", e.memory.temporal_modes.to_string()),
                ("memory correction", humanize(e.memory.all_memory_correction_time)),
            ];
            for (k, v) in lines {
                s.push_str(&format!("  {k:<22}{v}\n"));
            }
            s.push_str(&format!("  {:<22}{}\n", "max storage gap", humanize(e.memory.max_storage_gap)));
            s
        }
    }
}

pub fn sweep(rows: &[SweepRow], ratio_axis: bool, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut header = CSV_COLUMNS.to_vec();
            if ratio_axis {
                header.push("p_over_pth");
            }
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut f = match &r.result {
                        Ok(e) => csv_fields(e),
                        Err(_) => {
                            let mut f = vec![String::new(); CSV_COLUMNS.len()];
                            f[0] = r.n.to_string();
                            f[1] = r.n_e.to_string();
                            f
                        }
                    };
                    if ratio_axis {
                        f.push(r.axis.to_string());
                    }
                    f
                })
                .collect();
            csv_string(&header, &body)
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    let mut o = json!({
                        "axis": r.axis,
                        "n": r.n,
                        "n_e": r.n_e,
                        "interpolated_n_e": r.interpolated_n_e,
                    });
                    match &r.result {
                        Ok(e) => o["estimate"] = serde_json::to_value(e).expect("serializable"),
                        Err(msg) => o["infeasible"] = json!(msg),
                    }
                    o
                })
                .collect();
            json_string(&v)
        }
        Format::Human => {
            let mut s = String::new();
            if ratio_axis {
                s.push_str(&format!("{:>8} ", "p/p_th"));
            }
            s.push_str(&format!(
                "{:>6} {:>6} {:>4} {:>4} {:>4} {:>4} {:>8} {:>12} {:>8} {:>12} {:>11} {:>9} {:>12}\n",
                "n", "n_e", "m", "w_e", "w_m", "d", "qubits", "t_exp", "logical", "total", "spatial", "temporal", "correction"
            ));
            for r in rows {
                if ratio_axis {
                    s.push_str(&format!("{:>8.4} ", r.axis));
                }
                match &r.result {
                    Ok(e) => {
                        let p = &e.params;
                        s.push_str(&format!(
                            "{:>6} {:>6} {:>4} {:>4} {:>4} {:>4} {:>8} {:>12} {:>8} {:>12} {:>11} {:>9} {:>12}\n",
                            p.n,
                            p.n_e,
                            p.m,
                            p.w_e,
                            p.w_m,
                            e.d,
                            e.processor_qubits,
                            humanize(e.t_exp),
                            e.logical_qubits,
                            e.memory.total_modes,
                            e.memory.spatial_modes,
                            e.memory.temporal_modes,
                            humanize(e.memory.all_memory_correction_time)
                        ));
                    }
                    Err(msg) => s.push_str(&format!("{:>6} {:>6}  infeasible: {msg}\n", r.n, r.n_e)),
                }
            }
            s
        }
    }
}

pub fn outcomes(all: &[(String, Outcome)], format: Format) -> String {
    match format {
        Format::Json => {
            let v: Vec<_> = all
                .iter()
                .map(|(suite, o)| json!({"suite": suite, "name": o.name, "checked": o.checked, "passed": o.passed(), "failures": o.failures}))
                .collect();
            json_string(&v)
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = all
                .iter()
                .map(|(suite, o)| {
                    vec![
                        suite.clone(),
                        o.name.clone(),
                        o.checked.to_string(),
                        o.failures.len().to_string(),
                        if o.passed() { "pass" } else { "fail" }.to_string(),
                    ]
                })
                .collect();
            csv_string(&["suite", "name", "checked", "failures", "status"], &rows)
        }
        Format::Human => {
            let mut s = String::new();
            for (suite, o) in all {
                let tag = if o.passed() { "PASS" } else { "FAIL" };
                s.push_str(&format!("{tag} [{suite}] {} ({} cases)\n", o.name, o.checked));
                for f in o.failures.iter().take(5) {
                    s.push_str(&format!("    {f}\n"));
                }
                if o.failures.len() > 5 {
                    s.push_str(&format!("    ... {} more\n", o.failures.len() - 5));
                }
            }
            s
        }
    }
}

fn exact(c: &Count) -> String {
    if *c.denom() == 1 {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn counts(rows: &[(String, GateCounts)], format: Format) -> String {
    let fields = |g: &GateCounts| [exact(&g.one_qubit), exact(&g.cnot), exact(&g.toffoli), exact(&g.and_pairs), exact(&g.measure)];
    const HEAD: [&str; 6] = ["component", "one_qubit", "cnot", "toffoli", "and_pairs", "measure"];
    match format {
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(k, g)| std::iter::once(k.clone()).chain(fields(g)).collect())
                .collect();
            csv_string(&HEAD, &body)
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(k, g)| {
                    let f = fields(g);
                    json!({"component": k, "one_qubit": f[0], "cnot": f[1], "toffoli": f[2], "and_pairs": f[3], "measure": f[4]})
                })
                .collect();
            json_string(&v)
        }
        Format::Human => {
            let mut s = format!("{:<18}{:>18}{:>22}{:>16}{:>16}{:>18}\n", HEAD[0], HEAD[1], HEAD[2], HEAD[3], HEAD[4], HEAD[5]);
            for (k, g) in rows {
                let f = fields(g);
                s.push_str(&format!("{k:<18}{:>18}{:>22}{:>16}{:>16}{:>18}\n", f[0], f[1], f[2], f[3], f[4]));
            }
            s
        }
    }
}
