use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nsppt_core::channel::{
    random_channel, werner_holevo, BipartiteChoi, ChannelChoi, ALICE_IN, ALICE_OUT, BOB_IN, BOB_OUT, IN, OUT,
};
use nsppt_core::code_sdp::{bipartite_fidelity, check_primal, primal_value, twirl_code, CodeProblem};
use nsppt_core::rational::{frac, int};
use nsppt_core::werner_lp::wh_fidelity;
use nsppt_core::{CodeClass, LabeledOperator, RationalOperator, SystemShape};

fn rational_op(shape: SystemShape, entries: &[i64]) -> RationalOperator {
    let n = shape.total_dim();
    LabeledOperator::from_fn(shape, |r, c| int(entries[r * n + c]))
}

fn op_pair() -> impl Strategy<Value = (RationalOperator, RationalOperator)> {
    (1usize..4, 1usize..4).prop_flat_map(|(da, db)| {
        let a = prop::collection::vec(-5i64..5, da * da * da * da);
        let b = prop::collection::vec(-5i64..5, db * db);
        (Just((da, db)), a, b).prop_map(|((da, db), a, b)| {
            let ab = SystemShape::new([("a", da), ("x", da)]).unwrap();
            (rational_op(ab, &a), rational_op(SystemShape::single("b", db), &b))
        })
    })
}

/// `E ⊗ D` as a code: encoder on Alice's side, decoder on Bob's.
fn product_code(encoder: &ChannelChoi, decoder: &ChannelChoi) -> BipartiteChoi {
    let e = encoder.flat().relabel(OUT, ALICE_OUT).unwrap().relabel(IN, ALICE_IN).unwrap();
    let d = decoder.flat().relabel(OUT, BOB_OUT).unwrap().relabel(IN, BOB_IN).unwrap();
    let z = e.tensor(&d).unwrap().permute(&[ALICE_OUT, BOB_OUT, ALICE_IN, BOB_IN]).unwrap();
    BipartiteChoi::new(z).unwrap()
}

/// A mixture of two product codes, which is non-signalling and PPT.
fn random_code(k: usize, channel: &ChannelChoi, rng: &mut ChaCha8Rng) -> BipartiteChoi {
    let (din, dout) = (channel.in_dim(), channel.out_dim());
    let z1 = product_code(&random_channel(k, din, rng).unwrap(), &random_channel(dout, k, rng).unwrap());
    let z2 = product_code(&random_channel(k, din, rng).unwrap(), &random_channel(dout, k, rng).unwrap());
    let w = rng.gen_range(0.0..1.0);
    let z = z1.choi().scale(&Complex64::new(w, 0.0)).add(&z2.choi().scale(&Complex64::new(1.0 - w, 0.0))).unwrap();
    BipartiteChoi::new(z).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partial_trace_of_tensor((a, b) in op_pair()) {
        let ab = a.tensor(&b).unwrap();
        prop_assert_eq!(ab.partial_trace(&["b"]).unwrap(), a.scale(&b.trace()));
        prop_assert_eq!(ab.partial_trace(&["a", "x"]).unwrap(), b.scale(&a.trace()));
        prop_assert_eq!(ab.partial_trace(&["x"]).unwrap().trace(), ab.trace());
    }

    #[test]
    fn partial_transposes((a, b) in op_pair()) {
        let ab = a.tensor(&b).unwrap();
        let once = ab.partial_transpose(&["x"]).unwrap();
        prop_assert_eq!(once.partial_transpose(&["x"]).unwrap(), ab.clone());
        prop_assert_eq!(ab.partial_transpose(&["a", "x", "b"]).unwrap(), ab.transpose());
        prop_assert_eq!(once.partial_transpose(&["a", "b"]).unwrap(), ab.transpose());
    }

    #[test]
    fn permutation_round_trip((a, b) in op_pair()) {
        let ab = a.tensor(&b).unwrap();
        let moved = ab.permute(&["b", "x", "a"]).unwrap();
        prop_assert_eq!(moved.permute(&["a", "x", "b"]).unwrap(), ab.clone());
        prop_assert_eq!(moved.trace(), ab.trace());
    }

    #[test]
    fn class_ordering(d in 2u64..5, n in 1u64..4, k in 1u64..7, p in 0i64..=12) {
        let alpha = frac(p, 12);
        let v = |class| wh_fidelity(d, &alpha, n, &BigInt::from(k), class).unwrap();
        let (ns, ppt, both, ea) = (v(CodeClass::Ns), v(CodeClass::Ppt), v(CodeClass::Both), v(CodeClass::EaBound));
        prop_assert!(both >= frac(1, (k * k) as i64));
        prop_assert!(both <= ns && ns <= ea && both <= ppt);
        prop_assert!(ea <= int(1) && ppt <= int(1));
        let larger = wh_fidelity(d, &alpha, n, &BigInt::from(k + 1), CodeClass::Both).unwrap();
        prop_assert!(larger <= both);
    }

    #[test]
    fn twirl_keeps_fidelity(seed in any::<u64>(), k in 2usize..4, p in 0i64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channel = if p == 4 {
            random_channel(2, 2, &mut rng).unwrap()
        } else {
            werner_holevo(2 + (seed % 2) as usize, &frac(p, 4)).unwrap().to_complex()
        };
        let z = random_code(k, &channel, &mut rng);
        let direct = bipartite_fidelity(&z, &channel).unwrap();
        let pt = twirl_code(&z, 1e-9).unwrap().reshaped_for(&channel).unwrap();
        let twirled = primal_value(&pt, &channel).unwrap();
        prop_assert!((direct - twirled).norm() <= 1e-10);
        let problem = CodeProblem::new(channel, k as u64, CodeClass::Both).unwrap();
        let report = check_primal(&pt, &problem, 1e-9).unwrap();
        prop_assert!(report.passed, "{:?}", report);
    }
}
