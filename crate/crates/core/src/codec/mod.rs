//! Sub-packetized XOR codes for consecutive and symmetric side information.
//!
//! Every message is cut into `z` equal blocks `x_l^0 .. x_l^{z-1}` and users
//! broadcast XORs of blocks they hold. Two constructions cover the domain:
//!
//! * Case A (`s > N/2`), `z = ceil(s / (N-s))`: user `j` sends the single
//!   symbol `Y_j = XOR_k x_{(k(N-s)+j) mod N}^k`.
//! * Case B (`s <= N/2`), `z = 1 + ceil((N-s) / (s-1))`: for every iteration
//!   `i` and `k < z-1`, user `(k(s-1)+i) mod N` sends
//!   `x_{(k(s-1)+i) mod N}^k XOR x_{((k+1)(s-1)+i) mod N}^{k+1}`.
//!
//! Both are written in offset-0 coordinates. Instances with a non-zero offset
//! `a` are handled by mapping canonical message `c` to message `(c + a) mod N`,
//! so term lists, payloads, and decode logs always use real message indices.

mod decode;
mod encode;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use decode::{
    block_chain, decode_block, decode_block_case_a, decode_block_case_b, decode_user, Derivation,
    Regime, UserDecode,
};
pub use encode::{encode, encode_case_a, encode_case_b, encode_symbolic, layout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    A,
    B,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::A => "A",
            Case::B => "B",
        })
    }
}

/// Block count and construction regime for `(N, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubPacketization {
    pub case: Case,
    pub z: usize,
}

impl SubPacketization {
    /// Block length for `d`-bit messages.
    pub fn block_bits(&self, d_bits: usize) -> Result<usize> {
        if !d_bits.is_multiple_of(self.z) {
            return Err(Error::BlockAlignment {
                len: d_bits,
                z: self.z,
            });
        }
        Ok(d_bits / self.z)
    }

    /// Number of coded symbols in a full schedule.
    pub fn symbol_count(&self, n: usize) -> usize {
        match self.case {
            Case::A => n,
            Case::B => n * (self.z - 1),
        }
    }
}

pub fn sub_packetization_level(n: usize, s: usize) -> Result<SubPacketization> {
    if n < 3 || !(2..n).contains(&s) {
        return Err(Error::Domain { n, s });
    }
    Ok(if 2 * s > n {
        SubPacketization {
            case: Case::A,
            z: s.div_ceil(n - s),
        }
    } else {
        SubPacketization {
            case: Case::B,
            z: 1 + (n - s).div_ceil(s - 1),
        }
    })
}

/// Cuts `msg` into `z` contiguous blocks of equal length.
pub fn split_message(msg: &[u8], z: usize) -> Result<Vec<&[u8]>> {
    if z == 0 || !msg.len().is_multiple_of(z) {
        return Err(Error::BlockAlignment { len: msg.len(), z });
    }
    if msg.is_empty() {
        return Ok(vec![msg; z]);
    }
    Ok(msg.chunks(msg.len() / z).collect())
}

pub fn reassemble_message<B: AsRef<[u8]>>(blocks: &[B]) -> Result<Vec<u8>> {
    let len = blocks.first().map_or(0, |b| b.as_ref().len());
    if let Some(bad) = blocks.iter().find(|b| b.as_ref().len() != len) {
        return Err(Error::LengthMismatch {
            expected: len,
            found: bad.as_ref().len(),
        });
    }
    Ok(blocks
        .iter()
        .flat_map(|b| b.as_ref().iter().copied())
        .collect())
}

pub(crate) fn xor_into(acc: &mut [u8], other: &[u8]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

/// Block `x_message^block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub message: usize,
    pub block: usize,
}

impl Term {
    pub fn new(message: usize, block: usize) -> Self {
        Term { message, block }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x_{}^{}", self.message, self.block)
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        [self.message, self.block].serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let [message, block] = <[usize; 2]>::deserialize(de)?;
        Ok(Term { message, block })
    }
}

/// Symbol identity. Case A symbols are named by their sender, Case B symbols
/// by `(iteration, k)`. The derived order is the canonical transmission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolId {
    A { sender: usize },
    B { iteration: usize, k: usize },
}

impl SymbolId {
    /// Display label as printed in the decode tables: `Y_j`, or `Y_i^k` with
    /// the iteration as subscript.
    pub fn label(&self) -> String {
        match *self {
            SymbolId::A { sender } => format!("Y_{sender}"),
            SymbolId::B { iteration, k } => format!("Y_{iteration}^{k}"),
        }
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SymbolId::A { sender } => write!(f, "A:{sender}"),
            SymbolId::B { iteration, k } => write!(f, "B:{iteration}:{k}"),
        }
    }
}

impl FromStr for SymbolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::SymbolId(s.to_string());
        let mut parts = s.split(':');
        let kind = parts.next().ok_or_else(bad)?;
        let nums: Vec<usize> = parts
            .map(|p| p.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("A", &[sender]) => Ok(SymbolId::A { sender }),
            ("B", &[iteration, k]) => Ok(SymbolId::B { iteration, k }),
            _ => Err(bad()),
        }
    }
}

impl Serialize for SymbolId {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SymbolId {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(de)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// One broadcast XOR of message blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodedSymbol {
    pub id: SymbolId,
    pub sender: usize,
    pub terms: Vec<Term>,
    #[serde(rename = "payload_hex", with = "hex_bytes")]
    pub payload: Vec<u8>,
}

impl CodedSymbol {
    /// `Y_0 = x_0^0 ⊕ x_2^1` style definition.
    pub fn expression(&self) -> String {
        let terms: Vec<String> = self.terms.iter().map(Term::to_string).collect();
        format!("{} = {}", self.id.label(), terms.join(" ⊕ "))
    }
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<u8>, D::Error> {
        hex::decode(String::deserialize(de)?).map_err(serde::de::Error::custom)
    }
}

/// Everything broadcast in one exchange round, in canonical order.
///
/// A schedule built by [`encode_symbolic`] has empty payloads; only the term
/// lists are meaningful there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionSchedule {
    sub: SubPacketization,
    block_bits: usize,
    symbols: Vec<CodedSymbol>,
    index: BTreeMap<SymbolId, usize>,
}

impl TransmissionSchedule {
    pub fn new(sub: SubPacketization, block_bits: usize, mut symbols: Vec<CodedSymbol>) -> Self {
        symbols.sort_by_key(|s| s.id);
        let index = symbols.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        TransmissionSchedule {
            sub,
            block_bits,
            symbols,
            index,
        }
    }

    pub fn sub(&self) -> SubPacketization {
        self.sub
    }

    pub fn block_bits(&self) -> usize {
        self.block_bits
    }

    pub fn symbols(&self) -> &[CodedSymbol] {
        &self.symbols
    }

    pub fn get(&self, id: SymbolId) -> Option<&CodedSymbol> {
        self.index.get(&id).map(|&i| &self.symbols[i])
    }

    pub fn total_bits(&self) -> u64 {
        (self.symbols.len() * self.block_bits) as u64
    }

    pub fn per_sender_bits(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for sym in &self.symbols {
            *out.entry(sym.sender).or_insert(0) += self.block_bits as u64;
        }
        out
    }

    /// Copy with one symbol dropped.
    pub fn without(&self, id: SymbolId) -> Self {
        let symbols = self
            .symbols
            .iter()
            .filter(|s| s.id != id)
            .cloned()
            .collect();
        Self::new(self.sub, self.block_bits, symbols)
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    case: Case,
    z: usize,
    block_bits: usize,
    symbols: Vec<CodedSymbol>,
}

impl Serialize for TransmissionSchedule {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ScheduleFile {
            case: self.sub.case,
            z: self.sub.z,
            block_bits: self.block_bits,
            symbols: self.symbols.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TransmissionSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let f = ScheduleFile::deserialize(de)?;
        Ok(Self::new(
            SubPacketization {
                case: f.case,
                z: f.z,
            },
            f.block_bits,
            f.symbols,
        ))
    }
}
