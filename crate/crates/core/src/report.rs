//! Name-resolved documents for JSON output.

use std::time::Duration;

use serde::{Serialize, Serializer};

use crate::concrete::{Answer, Verdict};
use crate::coverability::{k_bound, Basis, BasisRecord, KBound};
use crate::model::{Configuration, Protocol};
use crate::symbolic::{CutoffVerdict, Sign, SymbolicNode};

pub(crate) fn millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigurationDoc {
    /// `(location, count)` sorted by location name.
    pub multiset: Vec<(String, u32)>,
    pub datum: String,
}

impl ConfigurationDoc {
    pub fn new(g: &Configuration, p: &Protocol) -> Self {
        ConfigurationDoc { multiset: g.named_counts(p), datum: p.datum_name(g.datum).to_owned() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictDoc {
    pub processes: u32,
    pub answer: Answer,
    pub witness: Option<ConfigurationDoc>,
    pub nodes: usize,
    pub edges: usize,
    pub wall_ms: f64,
}

impl Verdict {
    pub fn document(&self, p: &Protocol) -> VerdictDoc {
        VerdictDoc {
            processes: self.processes,
            answer: self.answer,
            witness: self.witness.as_ref().map(|g| ConfigurationDoc::new(g, p)),
            nodes: self.stats.nodes,
            edges: self.stats.edges,
            wall_ms: self.stats.elapsed.as_secs_f64() * 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolicNodeDoc {
    pub concrete: Vec<(String, u32)>,
    pub abstract_part: Vec<String>,
    pub datum: String,
}

impl SymbolicNodeDoc {
    pub fn new(v: &SymbolicNode, p: &Protocol) -> Self {
        let concrete = ConfigurationDoc::new(&Configuration::new(v.concrete.clone(), v.datum), p);
        let mut abstract_part: Vec<String> = v.abstract_part.iter().map(|q| p.location_name(q).to_owned()).collect();
        abstract_part.sort();
        SymbolicNodeDoc { concrete: concrete.multiset, abstract_part, datum: concrete.datum }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffDoc {
    pub sign: Sign,
    pub certified: bool,
    pub index_used: u32,
    pub required_index: u32,
    pub positive_bound: Option<u32>,
    pub negative_bound: Option<u32>,
    pub witness: Option<SymbolicNodeDoc>,
    pub witness_depth: Option<u32>,
    pub k_bound: KBound,
    pub nodes: usize,
    pub edges: usize,
    pub wall_ms: f64,
}

impl CutoffVerdict {
    pub fn document(&self, p: &Protocol) -> CutoffDoc {
        CutoffDoc {
            sign: self.sign,
            certified: self.certified,
            index_used: self.index_used,
            required_index: self.required_index,
            positive_bound: self.positive_bound,
            negative_bound: self.negative_bound,
            witness: self.witness.as_ref().map(|v| SymbolicNodeDoc::new(v, p)),
            witness_depth: self.witness_depth,
            k_bound: self.k_bound,
            nodes: self.stats.nodes,
            edges: self.stats.edges,
            wall_ms: self.stats.elapsed.as_secs_f64() * 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisDoc {
    pub target: String,
    pub k_bound: KBound,
    pub elements: Vec<BasisRecord>,
}

impl Basis {
    pub fn document(&self, p: &Protocol) -> BasisDoc {
        BasisDoc {
            target: p.location_name(self.target()).to_owned(),
            k_bound: k_bound(self),
            elements: self.records(p),
        }
    }
}
