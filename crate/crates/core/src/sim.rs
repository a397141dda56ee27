//! One lossless broadcast round: every user sends its scheduled symbols, then
//! every user decodes its demands. The result is a transcript with bit
//! accounting and the derivation of every recovered block.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{
    decode_block, encode, reassemble_message, split_message, Case, CodedSymbol, SymbolId, Term,
    TransmissionSchedule,
};
use crate::error::{Error, Result};
use crate::instance::{MessageStore, ProblemInstance};
use crate::rates::{Rational, RationalPair};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: usize,
    pub a: usize,
    /// Message length before padding.
    pub d_bits: usize,
    pub z: usize,
    pub case: Case,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub sender: usize,
    pub id: SymbolId,
    pub terms: Vec<Term>,
    #[serde(rename = "payload_hex", serialize_with = "hex_str")]
    pub payload: Vec<u8>,
    #[serde(skip)]
    pub bits: u64,
}

fn hex_str<S: serde::Serializer>(bytes: &[u8], ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&hex::encode(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockLog {
    pub chain: Vec<SymbolId>,
    pub cancelled: Vec<Term>,
}

/// user -> message -> block -> derivation
pub type DecodeLog = BTreeMap<usize, UserLog>;

/// Message -> block -> log, for one user.
pub type UserLog = BTreeMap<usize, BTreeMap<usize, BlockLog>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub instance: InstanceSummary,
    pub events: Vec<Event>,
    pub decode_log: DecodeLog,
    pub per_user_bits: BTreeMap<usize, u64>,
    pub totals_bits: u64,
    pub measured_rate: Rational,
    pub padding_bits: usize,
    /// Every decoded message matched the original bytes.
    pub recovered: bool,
}

impl Serialize for Transcript {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("Transcript", 6)?;
        st.serialize_field("instance", &self.instance)?;
        st.serialize_field("events", &self.events)?;
        st.serialize_field("decode_log", &self.decode_log)?;
        st.serialize_field("totals_bits", &self.totals_bits)?;
        st.serialize_field("measured_rate", &RationalPair(&self.measured_rate))?;
        st.serialize_field("padding_bits", &self.padding_bits)?;
        st.end()
    }
}

pub fn run(inst: &ProblemInstance, store: &MessageStore) -> Result<Transcript> {
    let schedule = encode(inst, store)?;
    run_schedule(inst, store, &schedule, 0)
}

/// Runs on a zero-padded instance. `padding_bits` is the per-message padding;
/// the measured rate is normalized by the original length `d - padding_bits`.
pub fn run_padded(
    inst: &ProblemInstance,
    store: &MessageStore,
    padding_bits: usize,
) -> Result<Transcript> {
    if padding_bits >= inst.d_bits() {
        return Err(Error::LengthMismatch {
            expected: inst.d_bits(),
            found: padding_bits,
        });
    }
    let schedule = encode(inst, store)?;
    run_schedule(inst, store, &schedule, padding_bits)
}

/// Runs a given schedule, e.g. a tampered one. Any block that cannot be
/// decoded, or decodes to the wrong bytes, is a [`Error::DecodeFailure`].
pub fn run_schedule(
    inst: &ProblemInstance,
    store: &MessageStore,
    schedule: &TransmissionSchedule,
    padding_bits: usize,
) -> Result<Transcript> {
    store.check(inst)?;
    let z = schedule.sub().z;

    let events: Vec<Event> = schedule
        .symbols()
        .iter()
        .map(|sym: &CodedSymbol| Event {
            sender: sym.sender,
            id: sym.id,
            terms: sym.terms.clone(),
            payload: sym.payload.clone(),
            bits: schedule.block_bits() as u64,
        })
        .collect();
    let totals_bits: u64 = events.iter().map(|e| e.bits).sum();
    let mut per_user_bits: BTreeMap<usize, u64> = (0..inst.n()).map(|j| (j, 0)).collect();
    for e in &events {
        *per_user_bits.entry(e.sender).or_insert(0) += e.bits;
    }

    let per_user: Vec<(usize, UserLog)> = (0..inst.n())
        .into_par_iter()
        .map(|j| decode_one(inst, store, schedule, j, z).map(|log| (j, log)))
        .collect::<Result<_>>()?;

    let d = inst.d_bits() - padding_bits;
    Ok(Transcript {
        instance: InstanceSummary {
            n: inst.n(),
            s: inst.s(),
            a: inst.a(),
            d_bits: d,
            z,
            case: schedule.sub().case,
        },
        events,
        decode_log: per_user.into_iter().collect(),
        per_user_bits,
        totals_bits,
        measured_rate: Ratio::new(totals_bits, (inst.n() * d) as u64),
        padding_bits,
        recovered: true,
    })
}

fn decode_one(
    inst: &ProblemInstance,
    store: &MessageStore,
    schedule: &TransmissionSchedule,
    j: usize,
    z: usize,
) -> Result<UserLog> {
    let side = store.restrict(inst, j)?;
    let mut log = BTreeMap::new();
    for &l in inst.demands(j) {
        let fail = |block| Error::DecodeFailure {
            user: j,
            message: l,
            block,
        };
        let original = split_message(store.get(l).expect("checked store"), z)?;
        let mut blocks = Vec::with_capacity(z);
        let mut entries = BTreeMap::new();
        for (block, expected) in original.iter().enumerate() {
            let (bytes, d) =
                decode_block(inst, j, l, block, schedule, &side).map_err(|_| fail(block))?;
            if bytes != *expected {
                return Err(fail(block));
            }
            blocks.push(bytes);
            entries.insert(
                block,
                BlockLog {
                    chain: d.chain,
                    cancelled: d.cancelled,
                },
            );
        }
        if reassemble_message(&blocks)? != store.get(l).expect("checked store") {
            return Err(fail(0));
        }
        log.insert(l, entries);
    }
    Ok(log)
}

pub fn measured_rate(t: &Transcript) -> Rational {
    Ratio::new(t.totals_bits, (t.instance.n * t.instance.d_bits) as u64)
}

/// Decode table in the layout of the worked examples: one row per user with
/// its transmissions, demands, and the symbols behind each demanded block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeTable {
    pub case: Case,
    pub rows: Vec<UserRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserRow {
    pub user: usize,
    pub sends: Vec<SentSymbol>,
    pub demands: Vec<DemandRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentSymbol {
    pub id: SymbolId,
    pub label: String,
    /// `Y_0 = x_0^0 ⊕ x_2^1`
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemandRow {
    pub message: usize,
    pub blocks: Vec<BlockSource>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSource {
    pub block: usize,
    pub chain: Vec<SymbolId>,
    /// `Y_2^0 ⊕ Y_2^1`
    pub sources: String,
}

impl DemandRow {
    pub fn sources(&self) -> Vec<String> {
        self.blocks.iter().map(|b| b.sources.clone()).collect()
    }
}

/// A user's events, Case B ordered by chain position as in the worked tables.
fn sent_by(t: &Transcript, user: usize) -> Vec<&Event> {
    let mut sent: Vec<&Event> = t.events.iter().filter(|e| e.sender == user).collect();
    sent.sort_by_key(|e| match e.id {
        SymbolId::A { sender } => (0, sender),
        SymbolId::B { iteration, k } => (k, iteration),
    });
    sent
}

pub fn render_decode_table(t: &Transcript) -> DecodeTable {
    let rows = t
        .decode_log
        .iter()
        .filter(|(_, demands)| !demands.is_empty())
        .map(|(&user, demands)| UserRow {
            user,
            sends: sent_by(t, user)
                .into_iter()
                .map(|e| {
                    let terms: Vec<String> = e.terms.iter().map(Term::to_string).collect();
                    SentSymbol {
                        id: e.id,
                        label: e.id.label(),
                        expression: format!("{} = {}", e.id.label(), terms.join(" ⊕ ")),
                    }
                })
                .collect(),
            demands: demands
                .iter()
                .map(|(&message, blocks)| DemandRow {
                    message,
                    blocks: blocks
                        .iter()
                        .map(|(&block, log)| BlockSource {
                            block,
                            chain: log.chain.clone(),
                            sources: log
                                .chain
                                .iter()
                                .map(SymbolId::label)
                                .collect::<Vec<_>>()
                                .join(" ⊕ "),
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect();
    DecodeTable {
        case: t.instance.case,
        rows,
    }
}

impl fmt::Display for DecodeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let sends: Vec<String> = row
                .sends
                .iter()
                .map(|s| match self.case {
                    Case::A => s.expression.clone(),
                    Case::B => format!("{} [{}]", s.expression, s.id),
                })
                .collect();
            let demands: Vec<String> = row
                .demands
                .iter()
                .map(|d| format!("x_{}", d.message))
                .collect();
            writeln!(
                f,
                "S_{} sends {}; demands {}",
                row.user,
                sends.join(", "),
                demands.join(", ")
            )?;
            let decoded: Vec<String> = row
                .demands
                .iter()
                .flat_map(|d| {
                    d.blocks
                        .iter()
                        .map(move |b| format!("x_{}^{} ← {}", d.message, b.block, b.sources))
                })
                .collect();
            writeln!(f, "S_{}: {}", row.user, decoded.join(", "))?;
        }
        Ok(())
    }
}
