//! Strategies and property checks shared by the property suite and the
//! acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use subpack_core::codec::{block_chain, decode_block, encode_symbolic, Regime};
use subpack_core::{
    encode, run, sub_packetization_level, Case, MessageStore, ProblemInstance, SymbolId, Term,
    TransmissionSchedule,
};

pub const N_MAX: usize = 30;

/// `(N, s, a)` with `3 <= N <= 30`, `2 <= s <= N-1`, `0 <= a < N`.
pub fn params() -> impl Strategy<Value = (usize, usize, usize)> {
    (3..=N_MAX).prop_flat_map(|n| (Just(n), 2..n, 0..n))
}

/// Like [`params`] but restricted to one case.
pub fn params_in(case: Case) -> impl Strategy<Value = (usize, usize, usize)> {
    params().prop_filter("case", move |&(n, s, _)| {
        sub_packetization_level(n, s).unwrap().case == case
    })
}

/// A CDE instance with `d = 8 * z * bytes_per_block`.
pub fn cde(n: usize, s: usize, a: usize, bytes_per_block: usize) -> ProblemInstance {
    let z = sub_packetization_level(n, s).unwrap().z;
    ProblemInstance::new(n, s, a, 8 * z * bytes_per_block, None).unwrap()
}

/// A single demanded block: user `j` wants `x_l^block`.
#[derive(Debug, Clone, Copy)]
pub struct Pick {
    pub n: usize,
    pub s: usize,
    pub a: usize,
    pub j: usize,
    pub l: usize,
    pub block: usize,
}

impl Pick {
    pub fn instance(&self) -> ProblemInstance {
        cde(self.n, self.s, self.a, 1)
    }
}

pub fn pick() -> impl Strategy<Value = Pick> {
    params().prop_flat_map(|(n, s, a)| {
        let z = sub_packetization_level(n, s).unwrap().z;
        (0..n, s..n, 0..z).prop_map(move |(j, off, block)| Pick {
            n,
            s,
            a,
            j,
            l: (j + a + off) % n,
            block,
        })
    })
}

pub fn pick_in(case: Case) -> impl Strategy<Value = Pick> {
    pick().prop_filter("case", move |p| {
        sub_packetization_level(p.n, p.s).unwrap().case == case
    })
}

/// `t1 = ceil(((j - l) mod N) / (s - 1))` in offset-free coordinates.
pub fn t1(p: &Pick) -> usize {
    let lc = (p.l + p.n - p.a) % p.n;
    ((p.j + p.n - lc) % p.n).div_ceil(p.s - 1)
}

/// Symbolic XOR of the chain's term lists.
pub fn residue(sched: &TransmissionSchedule, chain: &[SymbolId]) -> BTreeSet<Term> {
    let mut acc = BTreeSet::new();
    for id in chain {
        for t in &sched.get(*id).expect("chain symbol exists").terms {
            if !acc.remove(t) {
                acc.insert(*t);
            }
        }
    }
    acc
}

/// `[0, z-1-t1]` and `[z-t1, z-1]` partition `[0, z-1]` for each `t1` in
/// `[1, z-1]`, and the decoder picks its regime by that split.
pub fn check_regime_partition(p: Pick) -> Result<(), TestCaseError> {
    let sub = sub_packetization_level(p.n, p.s).unwrap();
    prop_assume!(sub.case == Case::B);
    let z = sub.z;
    for t in 1..z {
        let forward: Vec<usize> = (0..=z - 1 - t).collect();
        let backward: Vec<usize> = (z - t..z).collect();
        let mut union: Vec<usize> = forward.iter().chain(&backward).copied().collect();
        prop_assert_eq!(union.len(), z);
        union.sort_unstable();
        prop_assert_eq!(union, (0..z).collect::<Vec<_>>());
    }
    let t = t1(&p);
    prop_assert!((1..z).contains(&t), "t1 = {} outside [1, {}]", t, z - 1);
    let (regime, _) = block_chain(&p.instance(), p.j, p.l, p.block).unwrap();
    let expected = if p.block < z - t {
        Regime::Forward
    } else {
        Regime::Backward
    };
    prop_assert_eq!(regime, expected);
    Ok(())
}

/// Case A: `(z-1)(N-s) < s`.
pub fn check_case_a_interval(n: usize, s: usize) -> Result<(), TestCaseError> {
    let sub = sub_packetization_level(n, s).unwrap();
    prop_assume!(sub.case == Case::A);
    prop_assert!((sub.z - 1) * (n - s) < s, "N={} s={} z={}", n, s, sub.z);
    Ok(())
}

/// A Case B chain collapses to the target plus exactly one held block; a
/// Case A symbol leaves the target plus held blocks only.
pub fn check_telescoping(p: Pick) -> Result<(), TestCaseError> {
    let inst = p.instance();
    let sched = encode_symbolic(&inst);
    let (_, chain) = block_chain(&inst, p.j, p.l, p.block).unwrap();
    let mut left = residue(&sched, &chain);
    let target = Term::new(p.l, p.block);
    prop_assert!(left.remove(&target), "target missing from {:?}", left);
    if sched.sub().case == Case::B {
        prop_assert_eq!(left.len(), 1, "residue {:?}", left);
    } else {
        prop_assert_eq!(left.len(), sched.sub().z - 1);
    }
    for t in &left {
        prop_assert!(inst.holds(p.j, t.message), "{} not held by {}", t, p.j);
    }
    Ok(())
}

/// `encode(m1 ^ m2) = encode(m1) ^ encode(m2)` with identical term lists.
pub fn check_linearity(
    (n, s, a): (usize, usize, usize),
    seeds: (u64, u64),
) -> Result<(), TestCaseError> {
    let inst = cde(n, s, a, 2);
    let m1 = MessageStore::random(&inst, seeds.0);
    let m2 = MessageStore::random(&inst, seeds.1);
    let joint = encode(&inst, &m1.xor(&m2).unwrap()).unwrap();
    let e1 = encode(&inst, &m1).unwrap();
    let e2 = encode(&inst, &m2).unwrap();
    for ((y, y1), y2) in joint.symbols().iter().zip(e1.symbols()).zip(e2.symbols()) {
        prop_assert_eq!(y.id, y1.id);
        prop_assert_eq!(&y.terms, &y1.terms);
        prop_assert_eq!(&y.terms, &y2.terms);
        let sum: Vec<u8> = y1
            .payload
            .iter()
            .zip(&y2.payload)
            .map(|(p, q)| p ^ q)
            .collect();
        prop_assert_eq!(&y.payload, &sum);
    }
    Ok(())
}

/// Same inputs give the same chain, the same bytes, and the same transcript.
pub fn check_determinism(p: Pick, seed: u64) -> Result<(), TestCaseError> {
    let inst = p.instance();
    prop_assert_eq!(
        block_chain(&inst, p.j, p.l, p.block).unwrap(),
        block_chain(&inst, p.j, p.l, p.block).unwrap()
    );
    let store = MessageStore::random(&inst, seed);
    let sched = encode(&inst, &store).unwrap();
    let side = store.restrict(&inst, p.j).unwrap();
    let first = decode_block(&inst, p.j, p.l, p.block, &sched, &side).unwrap();
    let second = decode_block(&inst, p.j, p.l, p.block, &sched, &side).unwrap();
    prop_assert_eq!(&first, &second);
    let t1 = serde_json::to_string(&run(&inst, &store).unwrap()).unwrap();
    let t2 = serde_json::to_string(&run(&inst, &store).unwrap()).unwrap();
    prop_assert_eq!(t1, t2);
    Ok(())
}
