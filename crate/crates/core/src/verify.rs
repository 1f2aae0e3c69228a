//! Exhaustive and randomized checks of the builders against integer oracles,
//! shared by the CLI `verify` command and the test suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith_builders::{
    build_adder, build_and_uncompute, build_comparison, build_coset_init, build_double_ctrl_adder, build_fredkin,
    build_lookup, build_mod_exp, build_unlookup, emit_controlled_const_adder, emit_coset_init, AlgoParams, BuildError,
    ProblemInstance,
};
use crate::circuit_ir::{validate, CircuitBuilder, Circuit};
use crate::exec::Exec;
use crate::sim::{basis_map_check, fidelity, lower_and_uncompute, run, run_from, CheckReport, SimConfig, SimError, SparseState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn from_report(name: String, r: Result<CheckReport, SimError>) -> Outcome {
        match r {
            Ok(r) => Outcome {
                name,
                checked: r.checked,
                failures: r.mismatches.iter().map(|m| format!("input {:?}: {}", m.input, m.reason)).collect(),
            },
            Err(e) => Outcome { name, checked: 0, failures: vec![e.to_string()] },
        }
    }

    fn from_build(name: String, e: BuildError) -> Outcome {
        Outcome { name, checked: 0, failures: vec![e.to_string()] }
    }
}

fn mask(w: usize) -> u128 {
    (1u128 << w) - 1
}

fn expect(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn real_sign(amp: Complex64) -> f64 {
    if (amp.im).abs() > 1e-9 {
        0.0
    } else {
        amp.re.signum()
    }
}

pub fn check_adder(w: usize, exec: Exec, seed: u64) -> Outcome {
    let name = format!("adder w={w}");
    let c = match build_adder(w) {
        Ok(c) => c,
        Err(e) => return Outcome::from_build(name, e),
    };
    let inputs: Vec<Vec<u128>> = (0..1u128 << (2 * w)).map(|v| vec![v & mask(w), v >> w, 0]).collect();
    let r = basis_map_check(&c, &inputs, &[0, 1, 2], seed, exec, |i, o, amp| {
        expect(o[0] == i[0] && o[1] == (i[0] + i[1]) & mask(w) && o[2] == 0 && real_sign(amp) == 1.0, || format!("got {o:?}"))
    });
    Outcome::from_report(name, r)
}

pub fn check_double_ctrl_adder(w: usize, exec: Exec, seed: u64) -> Outcome {
    let name = format!("doubly controlled adder w={w}");
    let mut report = Ok(CheckReport::default());
    for a in 0..1u128 << w {
        let c = match build_double_ctrl_adder(w, a) {
            Ok(c) => c,
            Err(e) => return Outcome::from_build(name, e),
        };
        let inputs: Vec<Vec<u128>> = (0..4u128).flat_map(|ctl| (0..1u128 << w).map(move |z| vec![ctl, z, 0, 0])).collect();
        let r = basis_map_check(&c, &inputs, &[0, 1, 2, 3], seed, exec, |i, o, _| {
            let on = i[0] == 3;
            let want = if on { (i[1] + a) & mask(w) } else { i[1] };
            expect(o[0] == i[0] && o[1] == want && o[2] == 0 && o[3] == 0, || format!("addend {a}: got {o:?}"))
        });
        report = match (report, r) {
            (Ok(x), Ok(y)) => Ok(x.merge(y)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
    }
    Outcome::from_report(name, report)
}

pub fn comparison_thresholds(w: usize, seed: u64) -> Vec<u128> {
    let top = 1u128 << w;
    if w <= 4 {
        return (1..=top).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ w as u64);
    let mut ys = vec![1, 2, top / 2, top / 2 + 1, top - 1, top];
    ys.extend((0..6).map(|_| rng.gen_range(1..=top)));
    ys.sort_unstable();
    ys.dedup();
    ys
}

pub fn check_comparison(w: usize, ys: &[u128], exec: Exec, seed: u64) -> Outcome {
    let name = format!("comparison w={w} ({} thresholds)", ys.len());
    let mut report = Ok(CheckReport::default());
    for &y in ys {
        let c = match build_comparison(w, y) {
            Ok(c) => c,
            Err(e) => return Outcome::from_build(name, e),
        };
        let inputs: Vec<Vec<u128>> = (0..1u128 << w).map(|x| vec![x, 0]).collect();
        let r = basis_map_check(&c, &inputs, &[0, 1], seed, exec, |i, o, amp| {
            let want = if i[0] >= y { -1.0 } else { 1.0 };
            expect(o[0] == i[0] && o[1] == 0 && real_sign(amp) == want, || format!("y={y}: got {o:?} amp {amp}"))
        });
        report = match (report, r) {
            (Ok(x), Ok(z)) => Ok(x.merge(z)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
    }
    Outcome::from_report(name, report)
}

pub fn check_fredkin(exec: Exec, seed: u64) -> Outcome {
    let c = build_fredkin();
    let inputs: Vec<Vec<u128>> = (0..8u128).map(|v| vec![v & 1, (v >> 1) & 1, v >> 2]).collect();
    let r = basis_map_check(&c, &inputs, &[0, 1, 2], seed, exec, |i, o, _| {
        let want = if i[0] == 1 { [i[0], i[2], i[1]] } else { [i[0], i[1], i[2]] };
        expect(o == want, || format!("got {o:?}"))
    });
    Outcome::from_report("fredkin".into(), r)
}

pub fn random_table(rng: &mut ChaCha8Rng, wa: usize, n_out: usize) -> Vec<u128> {
    (0..1usize << wa).map(|_| rng.gen::<u128>() & mask(n_out)).collect()
}

pub fn check_lookup(wa: usize, n_out: usize, tables: usize, exec: Exec, seed: u64) -> Outcome {
    let name = format!("lookup w_a={wa} n_out={n_out}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (wa as u64) << 8);
    let mut report = Ok(CheckReport::default());
    for _ in 0..tables {
        let table = random_table(&mut rng, wa, n_out);
        let c = match build_lookup(wa, &table, n_out) {
            Ok(c) => c,
            Err(e) => return Outcome::from_build(name, e),
        };
        let inputs: Vec<Vec<u128>> =
            (0..1u128 << wa).flat_map(|k| [0, mask(n_out)].into_iter().map(move |y| vec![k, y, 0])).collect();
        let t = table.clone();
        let r = basis_map_check(&c, &inputs, &[0, 1, 2], seed, exec, move |i, o, _| {
            expect(o[0] == i[0] && o[1] == i[1] ^ t[i[0] as usize] && o[2] == 0, || format!("got {o:?}"))
        });
        report = match (report, r) {
            (Ok(x), Ok(z)) => Ok(x.merge(z)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
    }
    Outcome::from_report(name, report)
}

/// Lookup followed by unlookup on a uniform address superposition; returns
/// the fidelity with the initial state.
pub fn unlookup_round_trip(wa: usize, n_out: usize, table: &[u128], seed: u64) -> Result<f64, String> {
    let lk = build_lookup(wa, table, n_out).map_err(|e| e.to_string())?;
    let un = build_unlookup(wa, table, n_out).map_err(|e| e.to_string())?;
    let c = lk.concat(&un).map_err(|e| e.to_string())?;
    let terms: Vec<(Vec<u128>, Complex64)> = (0..1u128 << wa)
        .map(|k| (vec![k, 0, 0], Complex64::from_polar(1.0, 0.37 * k as f64)))
        .collect();
    let s0 = SparseState::from_amplitudes(&c, &terms).map_err(|e| e.to_string())?;
    let s1 = run_from(&c, s0.clone(), seed, SimConfig::default()).map_err(|e| e.to_string())?;
    fidelity(&s0, &s1).map_err(|e| e.to_string())
}

pub fn check_unlookup(wa: usize, n_out: usize, seeds: u64, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed ^ wa as u64);
    let mut failures = vec![];
    for s in 0..seeds {
        let table = random_table(&mut rng, wa, n_out);
        match unlookup_round_trip(wa, n_out, &table, seed.wrapping_add(s)) {
            Ok(f) if (f - 1.0).abs() <= 1e-12 => {}
            Ok(f) => failures.push(format!("seed {s}: fidelity {f}")),
            Err(e) => failures.push(e),
        }
    }
    Outcome { name: format!("unlookup round trip w_a={wa}"), checked: seeds as usize, failures }
}

/// Builder-allocated circuit for a coset-encoded addition experiment:
/// registers x (n+m), ctrl (1), scratch (n+m).
pub fn coset_addition_circuit(n: usize, m: usize, modulus: u128, gamma: u128) -> Result<Circuit, BuildError> {
    let w = n + m;
    let mut b = CircuitBuilder::new();
    let x = b.data("x", w)?;
    let ctrl = b.data("ctrl", 1)?;
    let s = b.ancilla("scratch", w)?;
    emit_coset_init(&mut b, &x.wires(), modulus, m, &s.wires())?;
    emit_controlled_const_adder(&mut b, ctrl.wire(0), &x.wires(), gamma, &s.wires()[..w - 1])?;
    Ok(b.finish())
}

/// Uniform superposition over z + kN (k < 2^m) in register 0, others as given.
pub fn ideal_coset(c: &Circuit, z: u128, modulus: u128, m: usize, rest: &[u128]) -> Result<SparseState, SimError> {
    let terms: Vec<(Vec<u128>, Complex64)> = (0..1u128 << m)
        .map(|k| {
            let mut v = vec![z + k * modulus];
            v.extend_from_slice(rest);
            (v, Complex64::new(1.0, 0.0))
        })
        .collect();
    SparseState::from_amplitudes(c, &terms)
}

pub fn coset_addition_infidelity(n: usize, m: usize, modulus: u128, z: u128, gamma: u128, seed: u64) -> Result<f64, String> {
    let c = coset_addition_circuit(n, m, modulus, gamma).map_err(|e| e.to_string())?;
    let out = run(&c, &[z, 1, 0], seed).map_err(|e| e.to_string())?;
    let ideal = ideal_coset(&c, (z + gamma) % modulus, modulus, m, &[1, 0]).map_err(|e| e.to_string())?;
    Ok(1.0 - fidelity(&ideal, &out).map_err(|e| e.to_string())?)
}

pub fn check_coset_init(n: usize, m: usize, modulus: u128, seeds: u64) -> Outcome {
    let name = format!("coset init n={n} m={m} N={modulus}");
    let c = match build_coset_init(n, m, modulus) {
        Ok(c) => c,
        Err(e) => return Outcome::from_build(name, e),
    };
    let mut failures = vec![];
    let mut checked = 0;
    for z in [0, 1, modulus / 2, modulus - 1] {
        for s in 0..seeds {
            checked += 1;
            let res = run(&c, &[z, 0], s).and_then(|out| {
                let ideal = ideal_coset(&c, z, modulus, m, &[0])?;
                fidelity(&ideal, &out)
            });
            match res {
                Ok(f) if (f - 1.0).abs() <= 1e-10 => {}
                Ok(f) => failures.push(format!("z={z} seed={s}: fidelity {f}")),
                Err(e) => failures.push(e.to_string()),
            }
        }
    }
    Outcome { name, checked, failures }
}

/// Mean coset-addition infidelity for m in `ms` over `triples` random (N, z, gamma).
pub fn coset_suppression(n: usize, ms: &[usize], triples: usize, seed: u64) -> Result<Vec<f64>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts: Vec<(u128, u128, u128)> = (0..triples)
        .map(|_| {
            let nm = rng.gen_range(1u128 << (n - 1)..1u128 << n) | 1;
            (nm, rng.gen_range(0..nm), rng.gen_range(0..nm))
        })
        .collect();
    ms.iter()
        .map(|&m| {
            let mut acc = 0.0;
            for (i, &(nm, z, g)) in ts.iter().enumerate() {
                acc += coset_addition_infidelity(n, m, nm, z, g, seed.wrapping_add(i as u64))?;
            }
            Ok(acc / triples as f64)
        })
        .collect()
}

pub fn check_mod_exp(p: &AlgoParams, inst: &ProblemInstance, exec: Exec, seed: u64) -> Outcome {
    let name = format!("mod_exp N={} g={} {:?}", inst.modulus, inst.base, p);
    let c = match build_mod_exp(p, inst) {
        Ok(c) => c,
        Err(e) => return Outcome::from_build(name, e),
    };
    let nm = inst.modulus;
    let inputs: Vec<Vec<u128>> = (0..1u128 << p.n_e).map(|e| vec![e, 1, 0, 0, 0]).collect();
    let r = basis_map_check(&c, &inputs, &[0, 3, 4], seed, exec, |i, o, _| {
        let want = inst.pow_mod(inst.base, i[0]);
        expect(o[0] == i[0] && o[1] % nm == want && o[2] % nm == 0 && o[3] == 0 && o[4] == 0, || {
            format!("e={}: x={} acc={} target={} scratch={}", i[0], o[1], o[2], o[3], o[4])
        })
    });
    Outcome::from_report(name, r)
}

pub fn check_ir() -> Outcome {
    let mut failures = vec![];
    let p = AlgoParams { n: 6, n_e: 6, w_e: 3, w_m: 2, m: 4 };
    let inst = ProblemInstance { modulus: 35, base: 2 };
    let circuits: Vec<(&str, Result<Circuit, BuildError>)> = vec![
        ("and", Ok(build_and_uncompute())),
        ("fredkin", Ok(build_fredkin())),
        ("adder", build_adder(6)),
        ("double ctrl adder", build_double_ctrl_adder(6, 45)),
        ("comparison", build_comparison(6, 37)),
        ("coset init", build_coset_init(4, 3, 11)),
        ("lookup", build_lookup(4, &(0..16).collect::<Vec<_>>(), 4)),
        ("unlookup", build_unlookup(4, &(0..16).collect::<Vec<_>>(), 4)),
        ("mod_exp", build_mod_exp(&p, &inst)),
    ];
    let checked = circuits.len() + 1;
    for (name, c) in circuits {
        match c {
            Ok(c) => {
                for v in validate(&c) {
                    failures.push(format!("{name}: {v}"));
                }
                if !validate(&lower_and_uncompute(&c)).is_empty() {
                    failures.push(format!("{name}: lowered form invalid"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    if build_fredkin().dump() != FREDKIN_DUMP {
        failures.push("fredkin dump differs from golden text".into());
    }
    Outcome { name: "ir".into(), checked, failures }
}

pub const FREDKIN_DUMP: &str = "REG r0 c 1 data\nREG r1 a 1 data\nREG r2 b 1 data\nCNOT r2[0], r1[0]\nTOFFOLI r0[0], r1[0], r2[0]\nCNOT r2[0], r1[0]\n";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Ir,
    Adders,
    Lookup,
    Coset,
    Modexp,
}

pub const ALL_SUITES: [Suite; 5] = [Suite::Ir, Suite::Adders, Suite::Lookup, Suite::Coset, Suite::Modexp];

pub fn run_suite(suite: Suite, max_width: usize, exec: Exec, seed: u64) -> Vec<Outcome> {
    match suite {
        Suite::Ir => vec![check_ir()],
        Suite::Adders => {
            let mut v: Vec<Outcome> = (2..=max_width).map(|w| check_adder(w, exec, seed)).collect();
            v.extend((2..=max_width.min(4)).map(|w| check_double_ctrl_adder(w, exec, seed)));
            v.extend((1..=max_width).map(|w| check_comparison(w, &comparison_thresholds(w, seed), exec, seed)));
            v.push(check_fredkin(exec, seed));
            v
        }
        Suite::Lookup => {
            let mut v: Vec<Outcome> = (1..=4).map(|wa| check_lookup(wa, 5, 4, exec, seed)).collect();
            v.extend((1..=6).map(|wa| check_unlookup(wa, 5, 10, seed)));
            v
        }
        Suite::Coset => {
            let mut v = vec![check_coset_init(4, 2, 15, 8), check_coset_init(5, 3, 21, 4)];
            let ms = [2, 3, 4, 5, 6];
            let name = "coset addition suppression".to_string();
            match coset_suppression(5, &ms, 20, seed) {
                Ok(inf) => {
                    let mut failures = vec![];
                    for i in 1..inf.len() {
                        if !(inf[i] < 0.75 * inf[i - 1]) {
                            failures.push(format!("m={}: {} vs {}", ms[i], inf[i], inf[i - 1]));
                        }
                    }
                    v.push(Outcome { name, checked: ms.len(), failures });
                }
                Err(e) => v.push(Outcome { name, checked: 0, failures: vec![e] }),
            }
            v
        }
        Suite::Modexp => {
            let p = AlgoParams { n: 6, n_e: 6, w_e: 3, w_m: 2, m: 4 };
            let inst = ProblemInstance::new(6, 35, 2).expect("valid instance");
            vec![check_mod_exp(&p, &inst, exec, seed)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_checks_pass() {
        for o in [check_adder(3, Exec::Sequential, 1), check_fredkin(Exec::Sequential, 1), check_ir()] {
            assert!(o.passed(), "{:?}", o);
        }
    }
}
