//! Configurations of the distributed system and its one-step semantics.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::multiset::{DatumId, LocId, Multiset};
use super::protocol::Protocol;

/// A configuration `⟨μ, d⟩`: how many processes sit in each location, and
/// the register content.
///
/// The derived `Ord` (count vector first, then datum) is the canonical order
/// used for deterministic exploration.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub multiset: Multiset,
    pub datum: DatumId,
}

impl Configuration {
    pub fn new(multiset: Multiset, datum: DatumId) -> Self {
        Configuration { multiset, datum }
    }

    /// `⟨q0^k, d0⟩`.
    pub fn initial(p: &Protocol, k: u32, d0: DatumId) -> Self {
        Configuration {
            multiset: Multiset::power(p.num_locations(), p.initial_location(), k),
            datum: d0,
        }
    }

    pub fn size(&self) -> u64 {
        self.multiset.cardinality()
    }

    pub fn covers(&self, q: LocId) -> bool {
        self.multiset.count(q) > 0
    }

    /// Renders as `{q0:2,q1:1},0` using the protocol's names.
    pub fn display<'a>(&'a self, p: &'a Protocol) -> impl fmt::Display + 'a {
        DisplayConfig { config: self, protocol: p }
    }

    /// `(location name, count)` pairs sorted by location name.
    pub fn named_counts(&self, p: &Protocol) -> Vec<(String, u32)> {
        let mut v: Vec<_> = self
            .multiset
            .iter()
            .map(|(q, c)| (p.location_name(q).to_owned(), c))
            .collect();
        v.sort();
        v
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{:?}, {}⟩", self.multiset, self.datum.0)
    }
}

struct DisplayConfig<'a> {
    config: &'a Configuration,
    protocol: &'a Protocol,
}

impl fmt::Display for DisplayConfig<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_multiset(f, self.protocol, &self.config.multiset)?;
        write!(f, ",{}", self.protocol.datum_name(self.config.datum))
    }
}

pub(crate) fn write_multiset(f: &mut impl fmt::Write, p: &Protocol, m: &Multiset) -> fmt::Result {
    f.write_char('{')?;
    for (i, (q, c)) in m.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{}:{}", p.location_name(q), c)?;
    }
    f.write_char('}')
}

/// Successor configurations `Post(γ)`: sorted, duplicate-free.
pub fn successors(p: &Protocol, g: &Configuration) -> Vec<Configuration> {
    let mut out = Vec::new();
    for (q, _) in g.multiset.iter() {
        for t in p.transitions_from(q) {
            if let Some(d) = t.action.fire(g.datum) {
                let m = g.multiset.moved(q, t.destination).expect("q is in the support");
                out.push(Configuration::new(m, d));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// The uniform scheduler's one-step distribution over `Post(γ)`.
pub fn post_distribution(p: &Protocol, g: &Configuration) -> Vec<(Configuration, BigRational)> {
    let succ = successors(p, g);
    let n = BigInt::from(succ.len());
    succ.into_iter()
        .map(|c| (c, BigRational::new(BigInt::from(1), n.clone())))
        .collect()
}

/// Orderings on configurations.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    /// Equal datum, equal support, multiset inclusion.
    Support,
    /// Equal datum and multiset inclusion.
    Plain,
}

/// Compares two configurations; `None` means incomparable.
pub fn compare(a: &Configuration, b: &Configuration, order: Order) -> Option<Ordering> {
    if a.datum != b.datum {
        return None;
    }
    if order == Order::Support && a.multiset.support() != b.multiset.support() {
        return None;
    }
    a.multiset.inclusion_cmp(&b.multiset)
}

/// `a ≤ b` under `order`.
pub fn leq(a: &Configuration, b: &Configuration, order: Order) -> bool {
    matches!(compare(a, b, order), Some(Ordering::Less | Ordering::Equal))
}
