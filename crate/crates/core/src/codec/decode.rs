//! Chain decoders.
//!
//! Case A: block `i` of message `l` sits in `Y_{l'}` with
//! `l' = (l - (N-s)i) mod N`; every other term of that symbol lies within
//! `(z-1)(N-s) < s` steps of `l'` and is therefore side information.
//!
//! Case B: block `i1` of `l` is reached through a run of consecutive symbols
//! of iteration `l1 = (l - i1(s-1)) mod N`. XORing the run telescopes to the
//! target plus one block of a message `t(s-1)` positions away from `l`.
//! With `D = (j - l) mod N` and `t1 = ceil(D / (s-1))`:
//!
//! * forward, `i1 <= z-1-t1`: symbols `k in [i1, i1+t1-1]`, leaving
//!   `x_{l+t1(s-1)}^{i1+t1}`;
//! * backward, `i1 >= z-t1`: symbols `k in [i1-t', i1-1]` with
//!   `t' = ceil((N-s+1-D) / (s-1))`, the smallest step count that lands
//!   `l - t'(s-1)` inside the user's window, leaving `x_{l-t'(s-1)}^{i1-t'}`.
//!
//! `t'` never exceeds `z - t1`, so the backward run always starts at `k >= 0`.
//! `z - t1` itself can overshoot the window (e.g. `N=8, s=4`), hence the
//! minimal step count.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{ProblemInstance, SideInfo};

use super::{
    reassemble_message, split_message, sub_packetization_level, xor_into, Case, SymbolId, Term,
    TransmissionSchedule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// Case A, a single symbol.
    Direct,
    Forward,
    Backward,
}

/// How one demanded block was recovered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub user: usize,
    pub target: Term,
    pub regime: Regime,
    pub chain: Vec<SymbolId>,
    /// Side-information blocks XORed out after combining the chain.
    pub cancelled: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserDecode {
    pub user: usize,
    pub messages: BTreeMap<usize, Vec<u8>>,
    pub derivations: Vec<Derivation>,
}

/// The canonical chain of symbols user `j` combines to recover `x_l^block`.
pub fn block_chain(
    inst: &ProblemInstance,
    j: usize,
    l: usize,
    block: usize,
) -> Result<(Regime, Vec<SymbolId>)> {
    let (n, s) = (inst.n(), inst.s());
    let sub = sub_packetization_level(n, s)?;
    let z = sub.z;
    if j >= n {
        return Err(Error::Index { index: j, limit: n });
    }
    if l >= n {
        return Err(Error::Index { index: l, limit: n });
    }
    if block >= z {
        return Err(Error::Index {
            index: block,
            limit: z,
        });
    }
    if inst.holds(j, l) {
        return Err(Error::DemandOverlap {
            user: j,
            message: l,
        });
    }
    // Canonical (offset-0) message index; user j's window starts at j there.
    let lc = (l + n - inst.a()) % n;

    match sub.case {
        Case::A => {
            let sender = (lc + n * z - (n - s) * block) % n;
            Ok((Regime::Direct, vec![SymbolId::A { sender }]))
        }
        Case::B => {
            let step = s - 1;
            let dist = (j + n - lc) % n;
            let t1 = dist.div_ceil(step);
            if t1 == 0 {
                return Err(Error::DecodeFailure {
                    user: j,
                    message: l,
                    block,
                });
            }
            let iteration = (lc + n * z - (block * step) % n) % n;
            let ks = if block + t1 < z {
                (Regime::Forward, block..block + t1)
            } else {
                let back = (n - s + 1 - dist).div_ceil(step);
                if back > block {
                    return Err(Error::DecodeFailure {
                        user: j,
                        message: l,
                        block,
                    });
                }
                (Regime::Backward, block - back..block)
            };
            Ok((ks.0, ks.1.map(|k| SymbolId::B { iteration, k }).collect()))
        }
    }
}

fn resolve(
    inst: &ProblemInstance,
    j: usize,
    target: Term,
    regime: Regime,
    chain: Vec<SymbolId>,
    schedule: &TransmissionSchedule,
    side: &SideInfo,
) -> Result<(Vec<u8>, Derivation)> {
    let z = schedule.sub().z;
    let mut acc = vec![0u8; schedule.block_bits() / 8];
    let mut residue = BTreeSet::new();
    for &id in &chain {
        let sym = schedule
            .get(id)
            .ok_or(Error::MissingSymbol { id: id.to_string() })?;
        xor_into(&mut acc, &sym.payload);
        for &t in &sym.terms {
            if !residue.remove(&t) {
                residue.insert(t);
            }
        }
    }
    if !residue.remove(&target) {
        return Err(Error::DecodeFailure {
            user: j,
            message: target.message,
            block: target.block,
        });
    }
    for t in &residue {
        let gap = Error::SideInfoGap {
            user: j,
            message: t.message,
            block: t.block,
        };
        if !inst.holds(j, t.message) {
            return Err(gap);
        }
        let msg = side.get(t.message).ok_or(gap)?;
        xor_into(&mut acc, split_message(msg, z)?[t.block]);
    }
    Ok((
        acc,
        Derivation {
            user: j,
            target,
            regime,
            chain,
            cancelled: residue.into_iter().collect(),
        },
    ))
}

/// Recovers `x_l^block` for user `j` with the chain from [`block_chain`].
pub fn decode_block(
    inst: &ProblemInstance,
    j: usize,
    l: usize,
    block: usize,
    schedule: &TransmissionSchedule,
    side: &SideInfo,
) -> Result<(Vec<u8>, Derivation)> {
    let (regime, chain) = block_chain(inst, j, l, block)?;
    resolve(inst, j, Term::new(l, block), regime, chain, schedule, side)
}

fn require(inst: &ProblemInstance, schedule: &TransmissionSchedule, case: Case) -> Result<()> {
    let expected = sub_packetization_level(inst.n(), inst.s())?;
    if expected.case != case || schedule.sub() != expected {
        return Err(Error::CaseMismatch {
            n: inst.n(),
            s: inst.s(),
        });
    }
    Ok(())
}

pub fn decode_block_case_a(
    inst: &ProblemInstance,
    j: usize,
    l: usize,
    block: usize,
    schedule: &TransmissionSchedule,
    side: &SideInfo,
) -> Result<(Vec<u8>, Derivation)> {
    require(inst, schedule, Case::A)?;
    decode_block(inst, j, l, block, schedule, side)
}

pub fn decode_block_case_b(
    inst: &ProblemInstance,
    j: usize,
    l: usize,
    block: usize,
    schedule: &TransmissionSchedule,
    side: &SideInfo,
) -> Result<(Vec<u8>, Derivation)> {
    require(inst, schedule, Case::B)?;
    decode_block(inst, j, l, block, schedule, side)
}

/// Recovers every demanded message of user `j`.
pub fn decode_user(
    inst: &ProblemInstance,
    j: usize,
    schedule: &TransmissionSchedule,
    side: &SideInfo,
) -> Result<UserDecode> {
    if j >= inst.n() {
        return Err(Error::Index {
            index: j,
            limit: inst.n(),
        });
    }
    let z = schedule.sub().z;
    let mut messages = BTreeMap::new();
    let mut derivations = Vec::new();
    for &l in inst.demands(j) {
        let mut blocks = Vec::with_capacity(z);
        for block in 0..z {
            let (bytes, derivation) = decode_block(inst, j, l, block, schedule, side)?;
            blocks.push(bytes);
            derivations.push(derivation);
        }
        messages.insert(l, reassemble_message(&blocks)?);
    }
    Ok(UserDecode {
        user: j,
        messages,
        derivations,
    })
}
