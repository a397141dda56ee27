use crate::error::{Error, Result};
use crate::instance::{MessageStore, ProblemInstance};

use super::{
    split_message, sub_packetization_level, xor_into, Case, CodedSymbol, SubPacketization,
    SymbolId, Term, TransmissionSchedule,
};

/// Symbol definitions for `inst` with empty payloads, in canonical order.
pub fn layout(inst: &ProblemInstance) -> (SubPacketization, Vec<CodedSymbol>) {
    let (n, s, a) = (inst.n(), inst.s(), inst.a());
    let sub = sub_packetization_level(n, s).expect("validated instance");
    let z = sub.z;
    let msg = |c: usize| (c + a) % n;

    let symbols = match sub.case {
        Case::A => (0..n)
            .map(|j| CodedSymbol {
                id: SymbolId::A { sender: j },
                sender: j,
                terms: (0..z).map(|k| Term::new(msg(k * (n - s) + j), k)).collect(),
                payload: Vec::new(),
            })
            .collect(),
        Case::B => (0..n)
            .flat_map(|i| {
                (0..z - 1).map(move |k| {
                    let first = (k * (s - 1) + i) % n;
                    let last = ((k + 1) * (s - 1) + i) % n;
                    CodedSymbol {
                        id: SymbolId::B { iteration: i, k },
                        sender: first,
                        terms: vec![Term::new(msg(first), k), Term::new(msg(last), k + 1)],
                        payload: Vec::new(),
                    }
                })
            })
            .collect(),
    };
    (sub, symbols)
}

/// Term lists only; used by the decodability oracle.
pub fn encode_symbolic(inst: &ProblemInstance) -> TransmissionSchedule {
    let (sub, symbols) = layout(inst);
    TransmissionSchedule::new(sub, inst.d_bits() / sub.z, symbols)
}

fn fill(
    inst: &ProblemInstance,
    store: &MessageStore,
    expect: Case,
) -> Result<TransmissionSchedule> {
    let (sub, mut symbols) = layout(inst);
    if sub.case != expect {
        return Err(Error::CaseMismatch {
            n: inst.n(),
            s: inst.s(),
        });
    }
    store.check(inst)?;
    let block_bits = sub.block_bits(inst.d_bits())?;
    let blocks: Vec<Vec<&[u8]>> = store
        .iter()
        .map(|m| split_message(m, sub.z))
        .collect::<Result<_>>()?;

    for sym in &mut symbols {
        let mut payload = vec![0u8; block_bits / 8];
        for t in &sym.terms {
            xor_into(&mut payload, blocks[t.message][t.block]);
        }
        sym.payload = payload;
    }
    Ok(TransmissionSchedule::new(sub, block_bits, symbols))
}

/// One symbol per user: `Y_j = XOR_k x_{(k(N-s)+j) mod N}^k`.
pub fn encode_case_a(inst: &ProblemInstance, store: &MessageStore) -> Result<TransmissionSchedule> {
    fill(inst, store, Case::A)
}

/// `z-1` two-term symbols per iteration, `N` iterations.
pub fn encode_case_b(inst: &ProblemInstance, store: &MessageStore) -> Result<TransmissionSchedule> {
    fill(inst, store, Case::B)
}

pub fn encode(inst: &ProblemInstance, store: &MessageStore) -> Result<TransmissionSchedule> {
    match sub_packetization_level(inst.n(), inst.s())?.case {
        Case::A => encode_case_a(inst, store),
        Case::B => encode_case_b(inst, store),
    }
}
