//! Register protocols: finite automata reading and writing one shared register.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::multiset::{DatumId, LocId, LocSet};

/// What a transition does with the register.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    /// Enabled only when the register holds the datum; leaves it unchanged.
    Read(DatumId),
    /// Always enabled; overwrites the register.
    Write(DatumId),
    /// Indivisible read-then-write. Only legal in atomic protocols.
    ReadWrite { read: DatumId, write: DatumId },
}

impl Action {
    /// The datum a transition must observe, if any.
    pub fn guard(self) -> Option<DatumId> {
        match self {
            Action::Read(d) | Action::ReadWrite { read: d, .. } => Some(d),
            Action::Write(_) => None,
        }
    }

    /// Register content after firing with current content `current`, or
    /// `None` when the guard fails.
    #[inline]
    pub fn fire(self, current: DatumId) -> Option<DatumId> {
        match self {
            Action::Read(d) => (d == current).then_some(current),
            Action::Write(d) => Some(d),
            Action::ReadWrite { read, write } => (read == current).then_some(write),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub source: LocId,
    pub action: Action,
    pub destination: LocId,
}

impl Transition {
    pub fn read(source: LocId, d: DatumId, destination: LocId) -> Self {
        Transition { source, action: Action::Read(d), destination }
    }

    pub fn write(source: LocId, d: DatumId, destination: LocId) -> Self {
        Transition { source, action: Action::Write(d), destination }
    }

    pub fn read_write(source: LocId, read: DatumId, write: DatumId, destination: LocId) -> Self {
        Transition { source, action: Action::ReadWrite { read, write }, destination }
    }
}

/// How missing reads at read-enabled locations are treated during validation.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReadCompletion {
    /// Missing `(q, R, d, ·)` edges become self-loops `(q, R, d, q)`.
    #[default]
    SelfLoop,
    /// Missing reads are an error.
    Strict,
}

impl ReadCompletion {
    pub fn keyword(self) -> &'static str {
        match self {
            ReadCompletion::SelfLoop => "self",
            ReadCompletion::Strict => "strict",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("location `{0}` has no outgoing transition")]
    DeadlockLocation(String),
    #[error("location `{location}` reads but has no transition reading `{datum}`")]
    IncompleteReads { location: String, datum: String },
    #[error("undeclared {kind} #{index}")]
    UndeclaredSymbol { kind: &'static str, index: usize },
    #[error("duplicate {kind} `{name}`")]
    DuplicateSymbol { kind: &'static str, name: String },
    #[error("protocol declares no {0}")]
    Empty(&'static str),
    #[error("protocol has {0} locations; at most {max} are supported", max = LocSet::CAPACITY)]
    TooManyLocations(usize),
}

/// A register protocol `⟨Q, D, q0, T⟩` together with its initial register
/// value and an optional default target.
///
/// Values built with [`Protocol::new`] are unchecked; analyses expect the
/// result of [`Protocol::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Protocol {
    name: String,
    locations: Vec<String>,
    data: Vec<String>,
    initial_location: LocId,
    initial_datum: DatumId,
    target: Option<LocId>,
    reads: ReadCompletion,
    /// Sorted and duplicate-free.
    transitions: Vec<Transition>,
}

impl Protocol {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        locations: Vec<String>,
        data: Vec<String>,
        initial_location: LocId,
        initial_datum: DatumId,
        target: Option<LocId>,
        reads: ReadCompletion,
        mut transitions: Vec<Transition>,
    ) -> Self {
        transitions.sort_unstable();
        transitions.dedup();
        Protocol {
            name: name.into(),
            locations,
            data,
            initial_location,
            initial_datum,
            target,
            reads,
            transitions,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn data(&self) -> &[String] {
        &self.data
    }

    pub fn num_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn num_data(&self) -> usize {
        self.data.len()
    }

    pub fn location_ids(&self) -> impl Iterator<Item = LocId> {
        (0..self.locations.len() as u16).map(LocId)
    }

    pub fn datum_ids(&self) -> impl Iterator<Item = DatumId> {
        (0..self.data.len() as u16).map(DatumId)
    }

    pub fn initial_location(&self) -> LocId {
        self.initial_location
    }

    pub fn initial_datum(&self) -> DatumId {
        self.initial_datum
    }

    pub fn target(&self) -> Option<LocId> {
        self.target
    }

    pub fn read_completion(&self) -> ReadCompletion {
        self.reads
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Outgoing transitions of `q`, in canonical order.
    pub fn transitions_from(&self, q: LocId) -> &[Transition] {
        let lo = self.transitions.partition_point(|t| t.source < q);
        let hi = self.transitions.partition_point(|t| t.source <= q);
        &self.transitions[lo..hi]
    }

    /// True iff some transition is an atomic read-write.
    pub fn is_atomic(&self) -> bool {
        self.transitions
            .iter()
            .any(|t| matches!(t.action, Action::ReadWrite { .. }))
    }

    pub fn location_name(&self, q: LocId) -> &str {
        &self.locations[q.index()]
    }

    pub fn datum_name(&self, d: DatumId) -> &str {
        &self.data[d.index()]
    }

    pub fn location_named(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l == name).map(|i| LocId(i as u16))
    }

    pub fn datum_named(&self, name: &str) -> Option<DatumId> {
        self.data.iter().position(|d| d == name).map(|i| DatumId(i as u16))
    }

    pub fn with_target(mut self, target: Option<LocId>) -> Self {
        self.target = target;
        self
    }

    /// Checks the protocol invariants, applying `completion` first.
    ///
    /// The returned protocol records `completion` as its read policy.
    pub fn validate(mut self, completion: ReadCompletion) -> Result<Protocol, ValidationError> {
        let nq = self.locations.len();
        let nd = self.data.len();
        if nq == 0 {
            return Err(ValidationError::Empty("locations"));
        }
        if nd == 0 {
            return Err(ValidationError::Empty("data"));
        }
        if nq > LocSet::CAPACITY {
            return Err(ValidationError::TooManyLocations(nq));
        }
        check_unique("location", &self.locations)?;
        check_unique("datum", &self.data)?;

        let loc_ok = |q: LocId| q.index() < nq;
        let dat_ok = |d: DatumId| d.index() < nd;
        let undeclared_loc = |q: LocId| ValidationError::UndeclaredSymbol { kind: "location", index: q.index() };
        let undeclared_dat = |d: DatumId| ValidationError::UndeclaredSymbol { kind: "datum", index: d.index() };
        if !loc_ok(self.initial_location) {
            return Err(undeclared_loc(self.initial_location));
        }
        if !dat_ok(self.initial_datum) {
            return Err(undeclared_dat(self.initial_datum));
        }
        if let Some(t) = self.target.filter(|&t| !loc_ok(t)) {
            return Err(undeclared_loc(t));
        }
        for t in &self.transitions {
            for q in [t.source, t.destination] {
                if !loc_ok(q) {
                    return Err(undeclared_loc(q));
                }
            }
            let data = match t.action {
                Action::Read(d) | Action::Write(d) => [d, d],
                Action::ReadWrite { read, write } => [read, write],
            };
            if let Some(&d) = data.iter().find(|&&d| !dat_ok(d)) {
                return Err(undeclared_dat(d));
            }
        }

        let mut added = Vec::new();
        for q in self.location_ids() {
            let out = self.transitions_from(q);
            if out.iter().all(|t| t.action.guard().is_none()) {
                continue;
            }
            for d in self.datum_ids() {
                if out.iter().any(|t| t.action.guard() == Some(d)) {
                    continue;
                }
                match completion {
                    ReadCompletion::SelfLoop => added.push(Transition::read(q, d, q)),
                    ReadCompletion::Strict => {
                        return Err(ValidationError::IncompleteReads {
                            location: self.location_name(q).to_owned(),
                            datum: self.datum_name(d).to_owned(),
                        })
                    }
                }
            }
        }
        if !added.is_empty() {
            self.transitions.extend(added);
            self.transitions.sort_unstable();
            self.transitions.dedup();
        }

        if let Some(q) = self.location_ids().find(|&q| self.transitions_from(q).is_empty()) {
            return Err(ValidationError::DeadlockLocation(self.location_name(q).to_owned()));
        }
        self.reads = completion;
        Ok(self)
    }

    /// Validates with the protocol's own declared read policy.
    pub fn validated(self) -> Result<Protocol, ValidationError> {
        let policy = self.reads;
        self.validate(policy)
    }
}

fn check_unique(kind: &'static str, names: &[String]) -> Result<(), ValidationError> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(ValidationError::DuplicateSymbol { kind, name: n.clone() });
        }
    }
    Ok(())
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::serialize(self))
    }
}

/// Builds protocols by name. Locations are created on first mention; data
/// must be declared up front.
#[derive(Debug, Clone)]
pub struct ProtocolBuilder {
    name: String,
    locations: Vec<String>,
    data: Vec<String>,
    initial_location: Option<LocId>,
    initial_datum: Option<DatumId>,
    target: Option<LocId>,
    reads: ReadCompletion,
    transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("undeclared datum `{0}`")]
    UndeclaredDatum(String),
    #[error("undeclared location `{0}`")]
    UndeclaredLocation(String),
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
}

impl ProtocolBuilder {
    pub fn new<I, S>(name: impl Into<String>, data: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ProtocolBuilder {
            name: name.into(),
            locations: Vec::new(),
            data: data.into_iter().map(Into::into).collect(),
            initial_location: None,
            initial_datum: None,
            target: None,
            reads: ReadCompletion::SelfLoop,
            transitions: Vec::new(),
        }
    }

    /// Declares locations in order; later mentions reuse these indices.
    pub fn locations<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for n in names {
            self.loc(&n.into());
        }
        self
    }

    pub fn loc(&mut self, name: &str) -> LocId {
        match self.locations.iter().position(|l| l == name) {
            Some(i) => LocId(i as u16),
            None => {
                self.locations.push(name.to_owned());
                LocId(self.locations.len() as u16 - 1)
            }
        }
    }

    pub fn existing_loc(&self, name: &str) -> Result<LocId, BuildError> {
        self.locations
            .iter()
            .position(|l| l == name)
            .map(|i| LocId(i as u16))
            .ok_or_else(|| BuildError::UndeclaredLocation(name.to_owned()))
    }

    pub fn datum(&self, name: &str) -> Result<DatumId, BuildError> {
        self.data
            .iter()
            .position(|d| d == name)
            .map(|i| DatumId(i as u16))
            .ok_or_else(|| BuildError::UndeclaredDatum(name.to_owned()))
    }

    pub fn init(mut self, location: &str) -> Self {
        let q = self.loc(location);
        self.initial_location = Some(q);
        self
    }

    pub fn register(mut self, datum: &str) -> Result<Self, BuildError> {
        self.initial_datum = Some(self.datum(datum)?);
        Ok(self)
    }

    pub fn target(mut self, location: &str) -> Self {
        let q = self.loc(location);
        self.target = Some(q);
        self
    }

    pub fn reads(mut self, policy: ReadCompletion) -> Self {
        self.reads = policy;
        self
    }

    pub fn set_init(&mut self, q: LocId) {
        self.initial_location = Some(q);
    }

    pub fn set_register(&mut self, d: DatumId) {
        self.initial_datum = Some(d);
    }

    pub fn set_target(&mut self, q: LocId) {
        self.target = Some(q);
    }

    pub fn set_reads(&mut self, policy: ReadCompletion) {
        self.reads = policy;
    }

    pub fn push(&mut self, t: Transition) {
        self.transitions.push(t);
    }

    pub fn read(mut self, from: &str, datum: &str, to: &str) -> Result<Self, BuildError> {
        let d = self.datum(datum)?;
        let (a, b) = (self.loc(from), self.loc(to));
        self.push(Transition::read(a, d, b));
        Ok(self)
    }

    pub fn write(mut self, from: &str, datum: &str, to: &str) -> Result<Self, BuildError> {
        let d = self.datum(datum)?;
        let (a, b) = (self.loc(from), self.loc(to));
        self.push(Transition::write(a, d, b));
        Ok(self)
    }

    pub fn read_write(mut self, from: &str, read: &str, write: &str, to: &str) -> Result<Self, BuildError> {
        let (r, w) = (self.datum(read)?, self.datum(write)?);
        let (a, b) = (self.loc(from), self.loc(to));
        self.push(Transition::read_write(a, r, w, b));
        Ok(self)
    }

    /// The raw, unvalidated protocol.
    pub fn build(self) -> Result<Protocol, BuildError> {
        let init = self.initial_location.ok_or(BuildError::Missing("init"))?;
        let register = self.initial_datum.ok_or(BuildError::Missing("register"))?;
        Ok(Protocol::new(
            self.name,
            self.locations,
            self.data,
            init,
            register,
            self.target,
            self.reads,
            self.transitions,
        ))
    }
}
