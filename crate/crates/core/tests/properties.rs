use proptest::prelude::*;

use topoloom::bench::{random_circuit, verify_field, BenchParams};
use topoloom::bounded::plan_bounded;
use topoloom::gf2::{equivalent, transfer_matrix};
use topoloom::{extract, synth_bounded, synth_unbounded, Circuit, Field};

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (2usize..7, 0usize..25, any::<u64>()).prop_flat_map(|(q, g, seed)| {
        (1..q).prop_map(move |mt| random_circuit(&BenchParams::new(q, g, mt, 1, seed), 0).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn netlist_round_trip(c in arb_circuit()) {
        let text = c.to_netlist();
        let back = Circuit::parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_netlist(), text);
    }

    #[test]
    fn synthesized_fields_round_trip(c in arb_circuit()) {
        for f in [synth_bounded(&c, true), synth_unbounded(&c)] {
            let text = f.to_text();
            let back = Field::parse(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn both_synthesizers_are_sound(c in arb_circuit()) {
        prop_assert_eq!(verify_field(&c, &synth_bounded(&c, true)), Ok(()));
        prop_assert_eq!(verify_field(&c, &synth_bounded(&c, false)), Ok(()));
        prop_assert_eq!(verify_field(&c, &synth_unbounded(&c)), Ok(()));
    }

    #[test]
    fn extraction_is_deterministic(c in arb_circuit()) {
        let f = synth_bounded(&c, true);
        prop_assert_eq!(extract(&f).unwrap(), extract(&f).unwrap());
    }

    #[test]
    fn heuristic_never_widens(c in arb_circuit()) {
        let with = synth_bounded(&c, true);
        let without = synth_bounded(&c, false);
        prop_assert!(with.cols() <= without.cols());
        prop_assert_eq!(with.rows(), c.qubit_count() + 2);
        let planned: usize = plan_bounded(&c, true).iter().map(|p| p.cols_used).sum();
        prop_assert_eq!(with.cols(), planned.max(1));
    }

    #[test]
    fn circuit_then_inverse_is_identity(c in arb_circuit()) {
        let mut rev = c.gates().to_vec();
        rev.reverse();
        let inv = Circuit::new(c.qubit_count(), rev).unwrap();
        prop_assert!(transfer_matrix(&c.concat(&inv)).is_identity());
        prop_assert!(equivalent(&c.concat(&inv), &Circuit::empty(c.qubit_count()).unwrap()).unwrap());
    }
}
