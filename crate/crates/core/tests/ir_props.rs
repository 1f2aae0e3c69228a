use proptest::prelude::*;
use qmem_core::arith_builders::{build_adder, build_comparison, build_double_ctrl_adder, build_lookup, build_unlookup};
use qmem_core::circuit_ir::{count_gates, validate, CircuitBuilder, Gate};
use qmem_core::sim::run;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn concat_counts_add(w in 2usize..7, y in 1u128..64) {
        let y = y.min(1 << w);
        let a = build_comparison(w, y).unwrap();
        let b = build_comparison(w, (y % (1 << w)) + 1).unwrap();
        let ab = a.concat(&b).unwrap();
        prop_assert_eq!(count_gates(&ab), count_gates(&a) + &count_gates(&b));
        prop_assert_eq!(ab.num_cbits, a.num_cbits + b.num_cbits);
        prop_assert!(validate(&ab).is_empty());
    }

    #[test]
    fn lookup_unlookup_concat_valid(wa in 1usize..5, seed in any::<u64>()) {
        let table: Vec<u128> = (0..1u128 << wa).map(|k| (k.wrapping_mul(seed as u128 | 1) >> 3) & 0xf).collect();
        let c = build_lookup(wa, &table, 4).unwrap().concat(&build_unlookup(wa, &table, 4).unwrap()).unwrap();
        prop_assert!(validate(&c).is_empty());
    }

    #[test]
    fn swap_label_neutral(a in 0u128..16, b in 0u128..16) {
        let mut cb = CircuitBuilder::new();
        let r0 = cb.data("a", 4).unwrap();
        let r1 = cb.data("b", 4).unwrap();
        cb.swap_label(r0, r1);
        let c = cb.finish();
        prop_assert!(count_gates(&c).is_zero());
        let s = run(&c, &[a, b], 0).unwrap();
        prop_assert_eq!(s.registers(s.entries[0].0), vec![b, a]);
        let twice = c.concat(&c).unwrap();
        let s = run(&twice, &[a, b], 0).unwrap();
        prop_assert_eq!(s.registers(s.entries[0].0), vec![a, b]);
    }
}

#[test]
fn builders_validate() {
    assert!(build_adder(1).is_err());
    for w in 2..=6 {
        assert!(validate(&build_adder(w).unwrap()).is_empty(), "adder {w}");
    }
    for w in 2..=4 {
        for a in 0..1u128 << w {
            assert!(validate(&build_double_ctrl_adder(w, a).unwrap()).is_empty());
        }
    }
}

#[test]
fn reused_and_target_is_flagged() {
    let mut b = CircuitBuilder::new();
    let d = b.data("d", 2).unwrap();
    let t = b.ancilla("t", 1).unwrap();
    b.and(d.wire(0), d.wire(1), t.wire(0));
    b.and(d.wire(0), d.wire(1), t.wire(0));
    let c = b.finish();
    assert_eq!(validate(&c).len(), 1);
    assert!(matches!(c.gates[1], Gate::AndCompute { .. }));
}
