//! Protocol text format, family generators, random protocols and DOT export.

mod dot;
pub mod families;
mod random;
mod text;

pub use dot::{export_dot, state_space_dot, symbolic_dot};
pub use families::{generate, FamilyError, FamilySpec};
pub use random::{random_protocol, RandomProtocolParams};
pub use text::{parse, serialize, ParseError, ParseErrorKind};
