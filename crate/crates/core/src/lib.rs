//! Sub-packetized embedded index codes for consecutive and symmetric side
//! information.
//!
//! Each of `N` users holds `s` consecutive messages (mod `N`) and is both a
//! sender and a receiver on a shared lossless broadcast channel. Splitting
//! messages into `z` blocks and broadcasting XORs of blocks reaches a
//! normalized rate of `1/ceil(s/(N-s))` for `s > N/2` and
//! `c/(1+c)`, `c = ceil((N-s)/(s-1))`, otherwise.
//!
//! * [`instance`]: problem instances and message stores.
//! * [`codec`]: the two constructions and their chain decoders.
//! * [`gf2`]: a rank-based decodability oracle independent of the decoders.
//! * [`rates`]: exact rate formulas and the comparison against scalar codes.
//! * [`sim`]: a full broadcast round with an auditable transcript.

pub mod codec;
pub mod error;
pub mod gf2;
pub mod instance;
pub mod prng;
pub mod rates;
pub mod sim;
pub mod worked;

pub use codec::{
    decode_user, encode, sub_packetization_level, Case, CodedSymbol, SubPacketization, SymbolId,
    Term, TransmissionSchedule,
};
pub use error::{Error, Result};
pub use gf2::{verify_instance, DecodabilityReport};
pub use instance::{MessageStore, ProblemInstance, SideInfo};
pub use rates::{achievable_rate, compare, Condition, RateComparison, Rational};
pub use sim::{run, Transcript};
