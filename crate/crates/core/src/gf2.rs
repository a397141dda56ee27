//! Brute-force decodability certificate over GF(2).
//!
//! Every block `x_l^k` is a coordinate `l*z + k`. A user can recover block `b`
//! iff the unit vector `e_b` lies in the span of what it knows: the vectors of
//! the symbols it hears, plus unit vectors for every block of its side
//! information. This is checked by Gaussian elimination on packed bit rows
//! and knows nothing about the chain decoders.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{
    encode_symbolic, sub_packetization_level, CodedSymbol, Term, TransmissionSchedule,
};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;

const WORD: usize = 64;

/// Binary vector over the `N*z` block coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoeffVector {
    len: usize,
    words: Vec<u64>,
}

impl CoeffVector {
    pub fn zeros(len: usize) -> Self {
        CoeffVector {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.flip(i);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "coordinate {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    fn xor_assign(&mut self, other: &CoeffVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

/// Row-echelon basis keyed by leading coordinate.
#[derive(Debug, Clone)]
pub struct Basis {
    len: usize,
    rows: Vec<Option<CoeffVector>>,
    rank: usize,
}

impl Basis {
    pub fn new(len: usize) -> Self {
        Basis {
            len,
            rows: vec![None; len],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn reduce(&self, mut v: CoeffVector) -> CoeffVector {
        while let Some(lead) = v.leading() {
            match &self.rows[lead] {
                Some(row) => v.xor_assign(row),
                None => break,
            }
        }
        v
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: CoeffVector) -> Result<bool> {
        self.check(&v)?;
        let v = self.reduce(v);
        match v.leading() {
            Some(lead) => {
                self.rows[lead] = Some(v);
                self.rank += 1;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn spans(&self, v: &CoeffVector) -> Result<bool> {
        self.check(v)?;
        Ok(self.reduce(v.clone()).is_zero())
    }

    fn check(&self, v: &CoeffVector) -> Result<()> {
        if v.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                found: v.len(),
            });
        }
        Ok(())
    }
}

pub fn symbol_to_vector(sym: &CodedSymbol, z: usize, n: usize) -> Result<CoeffVector> {
    let mut v = CoeffVector::zeros(n * z);
    for t in &sym.terms {
        if t.block >= z {
            return Err(Error::Index {
                index: t.block,
                limit: z,
            });
        }
        if t.message >= n {
            return Err(Error::Index {
                index: t.message,
                limit: n,
            });
        }
        v.flip(t.message * z + t.block);
    }
    Ok(v)
}

pub fn rank_gf2(rows: &[CoeffVector]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let mut basis = Basis::new(first.len());
    for r in rows {
        basis.insert(r.clone())?;
    }
    Ok(basis.rank())
}

/// Whether a user's own transmissions count as known vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Knowledge {
    #[default]
    IncludeOwn,
    /// Only symbols sent by other users.
    Strict,
}

/// Everything user `j` knows, as rows.
pub fn knowledge_rows(
    inst: &ProblemInstance,
    j: usize,
    schedule: &TransmissionSchedule,
    mode: Knowledge,
) -> Result<Vec<CoeffVector>> {
    let (n, z) = (inst.n(), schedule.sub().z);
    let mut rows = Vec::new();
    for l in inst.side_info_set(j)? {
        for k in 0..z {
            rows.push(CoeffVector::unit(n * z, l * z + k));
        }
    }
    for sym in schedule.symbols() {
        if mode == Knowledge::Strict && sym.sender == j {
            continue;
        }
        rows.push(symbol_to_vector(sym, z, n)?);
    }
    Ok(rows)
}

/// Verdict for every block of every message user `j` demands.
pub fn decodable(
    inst: &ProblemInstance,
    j: usize,
    schedule: &TransmissionSchedule,
) -> Result<BTreeMap<Term, bool>> {
    decodable_with(inst, j, schedule, Knowledge::IncludeOwn)
}

pub fn decodable_with(
    inst: &ProblemInstance,
    j: usize,
    schedule: &TransmissionSchedule,
    mode: Knowledge,
) -> Result<BTreeMap<Term, bool>> {
    let (n, z) = (inst.n(), schedule.sub().z);
    let mut basis = Basis::new(n * z);
    for row in knowledge_rows(inst, j, schedule, mode)? {
        basis.insert(row)?;
    }
    let mut out = BTreeMap::new();
    for &l in inst.demands(j) {
        for k in 0..z {
            out.insert(
                Term::new(l, k),
                basis.spans(&CoeffVector::unit(n * z, l * z + k))?,
            );
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BlockRef {
    pub user: usize,
    pub message: usize,
    pub block: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodabilityReport {
    pub pass: bool,
    pub failures: Vec<BlockRef>,
    /// Rank of the full broadcast matrix.
    pub matrix_rank: usize,
    /// `N * z`.
    pub dimension: usize,
    #[serde(skip)]
    pub verdicts: BTreeMap<usize, BTreeMap<Term, bool>>,
}

pub fn verify_instance(inst: &ProblemInstance) -> DecodabilityReport {
    verify_schedule(inst, &encode_symbolic(inst), Knowledge::IncludeOwn)
        .expect("schedule built from the instance")
}

/// Certifies an arbitrary schedule, e.g. one loaded from disk.
pub fn verify_schedule(
    inst: &ProblemInstance,
    schedule: &TransmissionSchedule,
    mode: Knowledge,
) -> Result<DecodabilityReport> {
    let (n, z) = (inst.n(), schedule.sub().z);
    let all: Vec<CoeffVector> = schedule
        .symbols()
        .iter()
        .map(|s| symbol_to_vector(s, z, n))
        .collect::<Result<_>>()?;
    let matrix_rank = rank_gf2(&all)?;

    let verdicts: BTreeMap<usize, BTreeMap<Term, bool>> = (0..n)
        .into_par_iter()
        .map(|j| decodable_with(inst, j, schedule, mode).map(|v| (j, v)))
        .collect::<Result<_>>()?;
    let failures: Vec<BlockRef> = verdicts
        .iter()
        .flat_map(|(&user, v)| {
            v.iter()
                .filter(|(_, ok)| !**ok)
                .map(move |(t, _)| BlockRef {
                    user,
                    message: t.message,
                    block: t.block,
                })
        })
        .collect();
    Ok(DecodabilityReport {
        pass: failures.is_empty(),
        failures,
        matrix_rank,
        dimension: n * z,
        verdicts,
    })
}

/// Offsets exercised by sweeps: `0`, `1`, and `floor(N/2)`, deduplicated.
pub fn sweep_offsets(n: usize) -> Vec<usize> {
    let mut a = vec![0, 1, n / 2];
    a.sort_unstable();
    a.dedup();
    a
}

/// CDE instances for every `N` in range, every valid `s`, and [`sweep_offsets`].
/// `d` is the smallest aligned length, `8z`.
pub fn sweep_instances(n_min: usize, n_max: usize) -> Vec<ProblemInstance> {
    let mut out = Vec::new();
    for n in n_min.max(3)..=n_max {
        for s in 2..n {
            let z = sub_packetization_level(n, s).expect("in domain").z;
            for a in sweep_offsets(n) {
                out.push(ProblemInstance::new(n, s, a, 8 * z, None).expect("valid sweep instance"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepEntry {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: usize,
    pub a: usize,
    pub pass: bool,
    pub strict_pass: bool,
    pub failures: usize,
}

/// Runs the oracle in both knowledge modes over [`sweep_instances`].
pub fn verify_sweep(n_min: usize, n_max: usize) -> Vec<SweepEntry> {
    sweep_instances(n_min, n_max)
        .par_iter()
        .map(|inst| {
            let sched = encode_symbolic(inst);
            let full = verify_schedule(inst, &sched, Knowledge::IncludeOwn).expect("consistent");
            let strict = verify_schedule(inst, &sched, Knowledge::Strict).expect("consistent");
            SweepEntry {
                n: inst.n(),
                s: inst.s(),
                a: inst.a(),
                pass: full.pass && full.verdicts == strict.verdicts,
                strict_pass: strict.pass,
                failures: full.failures.len(),
            }
        })
        .collect()
}
