//! Protocols, configurations, multiset arithmetic and the one-step semantics.

mod config;
mod multiset;
mod protocol;

pub use config::{compare, leq, post_distribution, successors, Configuration, Order};
pub(crate) use config::write_multiset;
pub use multiset::{DatumId, LocId, LocSet, Multiset};
pub use protocol::{
    Action, BuildError, Protocol, ProtocolBuilder, ReadCompletion, Transition, ValidationError,
};
