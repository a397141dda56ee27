mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use subpack_core::codec::{decode_user, encode_symbolic};
use subpack_core::gf2::{decodable, rank_gf2, verify_schedule, CoeffVector, Knowledge};
use subpack_core::instance::window;
use subpack_core::sim::measured_rate;
use subpack_core::{
    achievable_rate, encode, run, sub_packetization_level, Case, MessageStore, ProblemInstance,
    Term,
};
use support::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn regime_partition(p in pick_in(Case::B)) {
        check_regime_partition(p)?;
    }

    #[test]
    fn case_a_interval((n, s, _) in params_in(Case::A)) {
        check_case_a_interval(n, s)?;
    }

    #[test]
    fn chain_telescoping(p in pick()) {
        check_telescoping(p)?;
    }

    #[test]
    fn encoder_linearity(params in params(), seeds in any::<(u64, u64)>()) {
        check_linearity(params, seeds)?;
    }

    #[test]
    fn decode_determinism(p in pick(), seed in any::<u64>()) {
        check_determinism(p, seed)?;
    }

    #[test]
    fn sender_legality((n, s, a) in params()) {
        let inst = cde(n, s, a, 1);
        for sym in encode_symbolic(&inst).symbols() {
            for t in &sym.terms {
                prop_assert!(inst.holds(sym.sender, t.message), "{} sends {}", sym.sender, t);
            }
        }
    }

    #[test]
    fn side_info_windows_and_cde_cover((n, s, a) in params()) {
        let inst = cde(n, s, a, 1);
        for j in 0..n {
            let held = inst.side_info_set(j).unwrap();
            prop_assert_eq!(held.len(), s);
            let start = held[0];
            prop_assert_eq!(&held, &(0..s).map(|t| (start + t) % n).collect::<Vec<_>>());
            prop_assert_eq!(&held, &window(n, s, a, j));
            let mut all: BTreeSet<usize> = held.iter().copied().collect();
            for &l in inst.demands(j) {
                prop_assert!(all.insert(l), "x_{} both held and demanded", l);
            }
            prop_assert_eq!(all.len(), n);
        }
    }

    #[test]
    fn bit_accounting((n, s, a) in params(), bytes in 1usize..4) {
        let inst = cde(n, s, a, bytes);
        let sub = sub_packetization_level(n, s).unwrap();
        let d1 = (8 * bytes) as u64;
        let sched = encode(&inst, &MessageStore::zeroed(&inst)).unwrap();
        let expected = match sub.case {
            Case::A => n as u64 * d1,
            Case::B => (n * (sub.z - 1)) as u64 * d1,
        };
        prop_assert_eq!(sched.total_bits(), expected);
    }

    #[test]
    fn rank_invariant_under_permutation_and_row_xor(
        rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 70), 1..20),
        seed in any::<u64>(),
    ) {
        let vecs: Vec<CoeffVector> = rows
            .iter()
            .map(|bits| {
                let mut v = CoeffVector::zeros(bits.len());
                for (i, &b) in bits.iter().enumerate() {
                    if b {
                        v.flip(i);
                    }
                }
                v
            })
            .collect();
        let base = rank_gf2(&vecs).unwrap();
        prop_assert!(base <= vecs.len().min(70));

        let mut permuted = vecs.clone();
        let len = permuted.len();
        permuted.rotate_left(seed as usize % len);
        permuted.swap(0, (seed >> 16) as usize % len);
        prop_assert_eq!(rank_gf2(&permuted).unwrap(), base);

        let (i, k) = ((seed >> 32) as usize % len, (seed >> 48) as usize % len);
        if i != k {
            let mut mixed = vecs.clone();
            for bit in vecs[k].ones() {
                mixed[i].flip(bit);
            }
            prop_assert_eq!(rank_gf2(&mixed).unwrap(), base);
        }
    }

    #[test]
    fn rotation_coherence((n, s, a) in params(), seed in any::<u64>()) {
        let rotated = cde(n, s, a, 1);
        let plain = cde(n, s, 0, 1);
        let store0 = MessageStore::random(&plain, seed);
        let shifted: Vec<Vec<u8>> = (0..n)
            .map(|m| store0.get((m + n - a) % n).unwrap().to_vec())
            .collect();
        let store_a = MessageStore::new(shifted).unwrap();

        let e0 = encode(&plain, &store0).unwrap();
        let ea = encode(&rotated, &store_a).unwrap();
        for (y0, ya) in e0.symbols().iter().zip(ea.symbols()) {
            prop_assert_eq!(y0.id, ya.id);
            prop_assert_eq!(y0.sender, ya.sender);
            prop_assert_eq!(&y0.payload, &ya.payload);
            let moved: Vec<Term> = y0
                .terms
                .iter()
                .map(|t| Term::new((t.message + a) % n, t.block))
                .collect();
            prop_assert_eq!(&ya.terms, &moved);
        }

        let t0 = run(&plain, &store0).unwrap();
        let ta = run(&rotated, &store_a).unwrap();
        for (j, demands) in &t0.decode_log {
            for (l, blocks) in demands {
                let other = &ta.decode_log[j][&((l + a) % n)];
                for (k, log) in blocks {
                    prop_assert_eq!(&log.chain, &other[k].chain);
                }
            }
        }
    }

    #[test]
    fn rate_agreement((n, s, a) in params(), seed in any::<u64>()) {
        let inst = cde(n, s, a, 1);
        let t = run(&inst, &MessageStore::random(&inst, seed)).unwrap();
        prop_assert_eq!(measured_rate(&t), achievable_rate(n, s).unwrap());
        prop_assert_eq!(t.measured_rate, achievable_rate(n, s).unwrap());
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn end_to_end_random_trials((n, s, a) in params(), bytes in 1usize..4, seed in any::<u64>()) {
        let inst = cde(n, s, a, bytes);
        let store = MessageStore::random(&inst, seed);
        let t = run(&inst, &store).unwrap();
        prop_assert!(t.recovered);
        let sched = encode(&inst, &store).unwrap();
        for j in 0..n {
            let out = decode_user(&inst, j, &sched, &store.restrict(&inst, j).unwrap()).unwrap();
            for (l, bytes) in &out.messages {
                prop_assert_eq!(bytes.as_slice(), store.get(*l).unwrap());
            }
            prop_assert_eq!(out.messages.len(), inst.demands(j).len());
        }
    }

    #[test]
    fn arbitrary_demand_subsets_decode(
        (n, s, a) in params(),
        mask in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let z = sub_packetization_level(n, s).unwrap().z;
        let full = cde(n, s, a, 1);
        let demands = (0..n)
            .map(|j| {
                let all: Vec<usize> = full.demands(j).iter().copied().collect();
                let pick: Vec<usize> = all
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (mask.rotate_left(j as u32) >> (i % 64)) & 1 == 1)
                    .map(|(_, &l)| l)
                    .collect();
                (j, if pick.is_empty() { vec![all[0]] } else { pick })
            })
            .collect();
        let inst = ProblemInstance::new(n, s, a, 8 * z, Some(demands)).unwrap();
        let t = run(&inst, &MessageStore::random(&inst, seed)).unwrap();
        prop_assert!(t.recovered);
    }

    #[test]
    fn decodable_is_monotone((n, s, a) in params(), drop in prop::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let inst = cde(n, s, a, 1);
        let full = encode_symbolic(&inst);
        let mut sparse = full.clone();
        for idx in &drop {
            let id = sparse.symbols()[idx.index(sparse.symbols().len())].id;
            sparse = sparse.without(id);
            if sparse.symbols().is_empty() {
                break;
            }
        }
        for j in 0..n {
            let small = decodable(&inst, j, &sparse).unwrap();
            let big = decodable(&inst, j, &full).unwrap();
            for (term, ok) in small {
                prop_assert!(!ok || big[&term], "adding symbols lost {} for {}", term, j);
            }
        }
    }

    #[test]
    fn oracle_agrees_with_codec((n, s, a) in params(), drop in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let inst = cde(n, s, a, 1);
        let store = MessageStore::random(&inst, seed);
        let full = encode(&inst, &store).unwrap();
        let id = full.symbols()[drop.index(full.symbols().len())].id;
        let sched = full.without(id);
        let report = verify_schedule(&inst, &sched, Knowledge::IncludeOwn).unwrap();
        for j in 0..n {
            let side = store.restrict(&inst, j).unwrap();
            if decode_user(&inst, j, &sched, &side).is_ok() {
                prop_assert!(report.verdicts[&j].values().all(|&ok| ok));
            }
        }
        let intact = verify_schedule(&inst, &full, Knowledge::Strict).unwrap();
        prop_assert!(intact.pass);
    }
}
