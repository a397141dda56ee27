//! Consecutive and symmetric embedded index coding instances.
//!
//! `N` users each hold a window of `s` consecutive messages (indices mod `N`)
//! starting at `j + a`, and demand some subset of the messages outside that
//! window. The instance also fixes the message length `d` in bits, which has
//! to split into `z` whole-byte blocks for the sub-packetization level `z` of
//! `(N, s)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codec::sub_packetization_level;
use crate::error::{Error, Result};
use crate::prng::SplitMix64;

/// Validated problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    n: usize,
    s: usize,
    a: usize,
    d_bits: usize,
    demands: Vec<BTreeSet<usize>>,
}

/// On-disk form of an instance, also used to describe instances that may
/// not be valid yet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: usize,
    #[serde(default)]
    pub a: usize,
    pub d_bits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<BTreeMap<usize, Vec<usize>>>,
}

/// One broken invariant, as reported by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "code")]
pub enum Violation {
    Domain { n: usize, s: usize },
    Offset { a: usize },
    BlockAlignment { d_bits: usize, z: usize },
    UnknownUser { user: usize },
    EmptyDemand { user: usize },
    DemandOutOfRange { user: usize, message: usize },
    DemandOverlap { user: usize, message: usize },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::Domain { .. } => "Domain",
            Violation::Offset { .. } => "Offset",
            Violation::BlockAlignment { .. } => "BlockAlignment",
            Violation::UnknownUser { .. } => "UnknownUser",
            Violation::EmptyDemand { .. } => "EmptyDemand",
            Violation::DemandOutOfRange { .. } => "DemandOutOfRange",
            Violation::DemandOverlap { .. } => "DemandOverlap",
        }
    }

    fn into_error(self, n: usize) -> Error {
        match self {
            Violation::Domain { n, s } => Error::Domain { n, s },
            Violation::Offset { a } => Error::Offset { n, a },
            Violation::BlockAlignment { d_bits, z } => Error::BlockAlignment { len: d_bits, z },
            Violation::UnknownUser { user } => Error::Index {
                index: user,
                limit: n,
            },
            Violation::EmptyDemand { user } => Error::EmptyDemand { user },
            Violation::DemandOutOfRange { user, message } => {
                Error::DemandOutOfRange { user, message }
            }
            Violation::DemandOverlap { user, message } => Error::DemandOverlap { user, message },
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Domain { n, s } => write!(f, "Domain: s={s} outside [2, N-1] for N={n}"),
            Violation::Offset { a } => write!(f, "Offset: a={a} outside [0, N)"),
            Violation::BlockAlignment { d_bits, z } => {
                write!(
                    f,
                    "BlockAlignment: d={d_bits} is not a positive multiple of 8*z = {}",
                    8 * z
                )
            }
            Violation::UnknownUser { user } => write!(f, "UnknownUser({user})"),
            Violation::EmptyDemand { user } => write!(f, "EmptyDemand({user})"),
            Violation::DemandOutOfRange { user, message } => {
                write!(f, "DemandOutOfRange: user {user} demands x_{message}")
            }
            Violation::DemandOverlap { user, message } => {
                write!(f, "DemandOverlap: user {user} already holds x_{message}")
            }
        }
    }
}

/// Messages held by user `j`: `(j + a + t) mod n` for `t` in `0..s`, in window order.
pub fn window(n: usize, s: usize, a: usize, j: usize) -> Vec<usize> {
    (0..s).map(|t| (j + a + t) % n).collect()
}

fn in_window(n: usize, s: usize, a: usize, j: usize, message: usize) -> bool {
    (message + 2 * n - (j + a) % n) % n < s
}

/// Checks every instance invariant. An empty result means the description is valid.
pub fn validate(file: &InstanceFile) -> Vec<Violation> {
    let InstanceFile {
        n, s, a, d_bits, ..
    } = *file;
    let mut out = Vec::new();

    let domain_ok = n >= 3 && (2..n).contains(&s);
    if !domain_ok {
        out.push(Violation::Domain { n, s });
    }
    if n > 0 && a >= n {
        out.push(Violation::Offset { a });
    }
    if domain_ok {
        let z = sub_packetization_level(n, s)
            .expect("domain already checked")
            .z;
        if d_bits == 0 || d_bits % (8 * z) != 0 {
            out.push(Violation::BlockAlignment { d_bits, z });
        }
    }
    if n == 0 || !domain_ok || a >= n {
        return out;
    }

    if let Some(demands) = &file.demands {
        for (&user, wanted) in demands {
            if user >= n {
                out.push(Violation::UnknownUser { user });
                continue;
            }
            if wanted.is_empty() {
                out.push(Violation::EmptyDemand { user });
            }
            for &message in wanted {
                if message >= n {
                    out.push(Violation::DemandOutOfRange { user, message });
                } else if in_window(n, s, a, user, message) {
                    out.push(Violation::DemandOverlap { user, message });
                }
            }
        }
    }
    out
}

impl ProblemInstance {
    /// Builds an instance. Users missing from `demands` (or every user, when
    /// `demands` is `None`) get the cooperative-data-exchange default: every
    /// message outside their window.
    pub fn new(
        n: usize,
        s: usize,
        a: usize,
        d_bits: usize,
        demands: Option<BTreeMap<usize, Vec<usize>>>,
    ) -> Result<Self> {
        InstanceFile {
            n,
            s,
            a,
            d_bits,
            demands,
        }
        .try_into()
    }

    /// CDE instance with offset 0.
    pub fn cde(n: usize, s: usize, d_bits: usize) -> Result<Self> {
        Self::new(n, s, 0, d_bits, None)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn d_bits(&self) -> usize {
        self.d_bits
    }

    pub fn demands(&self, j: usize) -> &BTreeSet<usize> {
        &self.demands[j]
    }

    pub fn side_info_set(&self, j: usize) -> Result<Vec<usize>> {
        if j >= self.n {
            return Err(Error::Index {
                index: j,
                limit: self.n,
            });
        }
        Ok(window(self.n, self.s, self.a, j))
    }

    pub fn holds(&self, j: usize, message: usize) -> bool {
        message < self.n && in_window(self.n, self.s, self.a, j, message)
    }

    /// Complement of every user's window.
    pub fn default_cde_demands(&self) -> Vec<BTreeSet<usize>> {
        cde_demands(self.n, self.s, self.a)
    }

    /// Re-checks the invariants; always empty for instances built through [`ProblemInstance::new`].
    pub fn validate(&self) -> Vec<Violation> {
        validate(&self.to_file())
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.n,
            s: self.s,
            a: self.a,
            d_bits: self.d_bits,
            demands: Some(
                self.demands
                    .iter()
                    .enumerate()
                    .map(|(j, w)| (j, w.iter().copied().collect()))
                    .collect(),
            ),
        }
    }

    /// Same instance with a different message length.
    pub fn with_d_bits(&self, d_bits: usize) -> Result<Self> {
        let mut file = self.to_file();
        file.d_bits = d_bits;
        file.try_into()
    }

    /// Smallest byte-aligned length `>= d_bits` that splits into `z` blocks.
    pub fn aligned_d_bits(n: usize, s: usize, d_bits: usize) -> Result<usize> {
        let unit = 8 * sub_packetization_level(n, s)?.z;
        Ok(d_bits.max(1).div_ceil(unit) * unit)
    }
}

fn cde_demands(n: usize, s: usize, a: usize) -> Vec<BTreeSet<usize>> {
    (0..n)
        .map(|j| (0..n).filter(|&m| !in_window(n, s, a, j, m)).collect())
        .collect()
}

impl TryFrom<InstanceFile> for ProblemInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if let Some(v) = validate(&file).into_iter().next() {
            return Err(v.into_error(file.n));
        }
        let InstanceFile {
            n,
            s,
            a,
            d_bits,
            demands,
        } = file;
        let mut sets = cde_demands(n, s, a);
        for (user, wanted) in demands.unwrap_or_default() {
            sets[user] = wanted.into_iter().collect();
        }
        Ok(ProblemInstance {
            n,
            s,
            a,
            d_bits,
            demands: sets,
        })
    }
}

impl Serialize for ProblemInstance {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ProblemInstance {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        InstanceFile::deserialize(de)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

/// The `N` messages, each `d/8` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageStore {
    messages: Vec<Vec<u8>>,
}

impl MessageStore {
    pub fn new(messages: Vec<Vec<u8>>) -> Result<Self> {
        if let Some(first) = messages.first() {
            if let Some(bad) = messages.iter().find(|m| m.len() != first.len()) {
                return Err(Error::LengthMismatch {
                    expected: first.len(),
                    found: bad.len(),
                });
            }
        }
        Ok(MessageStore { messages })
    }

    /// Parses `n` concatenated records of `record_len` bytes.
    pub fn from_bytes(n: usize, record_len: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != n * record_len {
            return Err(Error::LengthMismatch {
                expected: n * record_len,
                found: bytes.len(),
            });
        }
        Ok(MessageStore {
            messages: bytes
                .chunks(record_len.max(1))
                .map(<[u8]>::to_vec)
                .take(n)
                .collect(),
        })
    }

    /// Random messages for `inst`, drawn from [`SplitMix64`] as one continuous
    /// little-endian byte stream of length `N * d / 8`.
    pub fn random(inst: &ProblemInstance, seed: u64) -> Self {
        Self::random_with_len(inst.n(), inst.d_bits() / 8, seed)
    }

    pub fn random_with_len(n: usize, record_len: usize, seed: u64) -> Self {
        let bytes = SplitMix64::new(seed).bytes(n * record_len);
        Self::from_bytes(n, record_len, &bytes).expect("length is exact")
    }

    pub fn zeroed(inst: &ProblemInstance) -> Self {
        MessageStore {
            messages: vec![vec![0; inst.d_bits() / 8]; inst.n()],
        }
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Record length in bytes.
    pub fn record_len(&self) -> usize {
        self.messages.first().map_or(0, Vec::len)
    }

    pub fn get(&self, l: usize) -> Option<&[u8]> {
        self.messages.get(l).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.messages.iter().map(Vec::as_slice)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.messages.concat()
    }

    /// Checks that the store fits `inst`: `N` records of `d/8` bytes.
    pub fn check(&self, inst: &ProblemInstance) -> Result<()> {
        if self.len() != inst.n() {
            return Err(Error::LengthMismatch {
                expected: inst.n(),
                found: self.len(),
            });
        }
        if self.record_len() != inst.d_bits() / 8 {
            return Err(Error::LengthMismatch {
                expected: inst.d_bits() / 8,
                found: self.record_len(),
            });
        }
        Ok(())
    }

    /// Zero-extends every message to `record_len` bytes.
    pub fn padded(&self, record_len: usize) -> Self {
        MessageStore {
            messages: self
                .messages
                .iter()
                .map(|m| {
                    let mut m = m.clone();
                    m.resize(record_len.max(m.len()), 0);
                    m
                })
                .collect(),
        }
    }

    /// Elementwise XOR of two stores of identical shape.
    pub fn xor(&self, other: &MessageStore) -> Result<Self> {
        if self.len() != other.len() || self.record_len() != other.record_len() {
            return Err(Error::LengthMismatch {
                expected: self.len() * self.record_len(),
                found: other.len() * other.record_len(),
            });
        }
        Ok(MessageStore {
            messages: self
                .messages
                .iter()
                .zip(&other.messages)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p ^ q).collect())
                .collect(),
        })
    }

    /// The part of the store user `j` holds.
    pub fn restrict(&self, inst: &ProblemInstance, j: usize) -> Result<SideInfo> {
        let held = inst.side_info_set(j)?;
        let mut messages = BTreeMap::new();
        for l in held {
            let m = self.get(l).ok_or(Error::Index {
                index: l,
                limit: self.len(),
            })?;
            messages.insert(l, m.to_vec());
        }
        Ok(SideInfo { user: j, messages })
    }
}

/// Messages available to a single user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideInfo {
    user: usize,
    messages: BTreeMap<usize, Vec<u8>>,
}

impl SideInfo {
    pub fn new(user: usize, messages: BTreeMap<usize, Vec<u8>>) -> Self {
        SideInfo { user, messages }
    }

    pub fn user(&self) -> usize {
        self.user
    }

    pub fn get(&self, l: usize) -> Option<&[u8]> {
        self.messages.get(&l).map(Vec::as_slice)
    }

    pub fn contains(&self, l: usize) -> bool {
        self.messages.contains_key(&l)
    }

    pub fn messages(&self) -> impl Iterator<Item = usize> + '_ {
        self.messages.keys().copied()
    }
}
