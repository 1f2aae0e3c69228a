use proptest::prelude::*;
use qmem_core::arith_builders::{build_mod_exp, AlgoParams, ProblemInstance};
use qmem_core::circuit_ir::count_gates;
use qmem_core::counts::{exact_counts, CountMode};
use qmem_core::ftec::{success_probability, CodeModel, Physical, SuccessConvention};

#[test]
fn instance_counts_match_small_grid() {
    for (n, nm, g) in [(4usize, 15u128, 2u128), (5, 21, 5)] {
        let inst = ProblemInstance::new(n, nm, g).unwrap();
        for we in 1..=3 {
            for wm in 1..=3 {
                for m in [1, 3] {
                    let p = AlgoParams::new(n, 4, we, wm, m).unwrap();
                    let c = build_mod_exp(&p, &inst).unwrap();
                    assert_eq!(exact_counts(&p, CountMode::Instance(&inst)).circuit_counts(), count_gates(&c), "{p:?}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_monotone(n in 4usize..200, ne in 1usize..300, m in 1usize..40, we in 1usize..5, wm in 1usize..5) {
        prop_assume!(we <= ne && wm <= n);
        let base = exact_counts(&AlgoParams::new(n, ne, we, wm, m).unwrap(), CountMode::Mean).counts.total();
        for q in [
            AlgoParams::new(n + 1, ne, we, wm, m).unwrap(),
            AlgoParams::new(n, ne + 1, we, wm, m).unwrap(),
            AlgoParams::new(n, ne, we, wm, m + 1).unwrap(),
        ] {
            prop_assert!(exact_counts(&q, CountMode::Mean).counts.total() >= base);
        }
    }

    #[test]
    fn success_probability_falls_with_size(n in 8usize..64, m in 1usize..30, d in 1usize..20) {
        let d = 2 * d + 1;
        let model = CodeModel::new(d, Physical::default()).unwrap();
        let conv = SuccessConvention::default();
        let a = exact_counts(&AlgoParams::new(n, n, 2, 2, m).unwrap(), CountMode::Mean);
        let b = exact_counts(&AlgoParams::new(n, n + 4, 2, 2, m).unwrap(), CountMode::Mean);
        prop_assert!(success_probability(&b, &model, &conv).unwrap() <= success_probability(&a, &model, &conv).unwrap());
    }
}
