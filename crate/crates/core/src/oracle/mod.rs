//! The online-manipulation oracle game: sessions, adversary strategies and
//! query-frequency profiling.

pub mod adversary;
pub mod profile;
pub mod session;

pub use adversary::{
    adversary_dprime, adversary_null, adversary_pair_eraser, adversary_subset_eraser, AdversaryStrategy, DPrime,
    DPrimeMode, GameView, Null, PairEraser, SubsetEraser,
};
pub use profile::profile_query_frequencies;
pub use session::{
    dump_transcript, open_session, parse_transcript, AdversaryConfig, Manipulation, ManipulationKind, OracleAnswer,
    OracleSession, RateMode, TranscriptEvent,
};
