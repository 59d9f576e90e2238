//! Scanning network sizes for the least size from which the almost-sure
//! answer stays constant.
//!
//! A finite scan alone cannot establish a cut-off, since the definition
//! quantifies over all larger sizes. The result is labelled certified only
//! when a certified symbolic verdict agrees with the scanned answer and the
//! scan reaches that verdict's bound.

use serde::Serialize;

use crate::concrete::{check_almost_sure, Answer, ConcreteError};
use crate::limits::{Limits, ResourceLimit};
use crate::model::{DatumId, LocId, Protocol};
use crate::symbolic::{cutoff_bounds, decide_cutoff, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TightOptions {
    pub k_max: u32,
    /// Attempt a symbolic decision for certification.
    pub certify: bool,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightEntry {
    pub k: u32,
    pub answer: Option<Answer>,
    pub skipped: Option<ResourceLimit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    Certified,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightReport {
    pub entries: Vec<TightEntry>,
    /// Sign of the answer at the end of the scan.
    pub sign: Option<Sign>,
    /// Least scanned `k` from which every checked answer equals the last.
    pub tight_cutoff: Option<u32>,
    pub label: Label,
    /// Bound from a certified symbolic verdict, when one was obtained.
    pub certified_bound: Option<u32>,
    pub certified_sign: Option<Sign>,
    pub scanned_to: u32,
}

impl TightReport {
    pub fn label_text(&self) -> &'static str {
        match self.label {
            Label::Certified => "certified tight cut-off",
            Label::Empirical => "empirical",
        }
    }
}

pub fn tight_search(p: &Protocol, d0: DatumId, target: LocId, opts: &TightOptions) -> TightReport {
    let certified = if opts.certify && !p.is_atomic() {
        decide_cutoff(p, d0, target, None, &opts.limits)
            .ok()
            .and_then(|v| cutoff_bounds(&v).ok())
    } else {
        None
    };
    let scan_to = match &certified {
        Some(b) => opts.k_max.min(b.tight_cutoff_at_most),
        None => opts.k_max,
    };

    let mut entries = Vec::with_capacity(scan_to as usize);
    for k in 1..=scan_to {
        let entry = match check_almost_sure(p, k, d0, target, &opts.limits) {
            Ok(v) => TightEntry { k, answer: Some(v.answer), skipped: None },
            Err(ConcreteError::ResourceLimit(e)) => TightEntry { k, answer: None, skipped: Some(e) },
            Err(ConcreteError::NoProcesses) => unreachable!("k starts at 1"),
        };
        entries.push(entry);
    }

    let checked: Vec<(u32, Answer)> = entries.iter().filter_map(|e| e.answer.map(|a| (e.k, a))).collect();
    let last = checked.last().map(|&(_, a)| a);
    let tight_cutoff = last.map(|a| {
        checked
            .iter()
            .rev()
            .take_while(|&&(_, b)| b == a)
            .last()
            .map(|&(k, _)| k)
            .expect("the last answer matches itself")
    });
    let sign = last.map(|a| match a {
        Answer::AlmostSure => Sign::Positive,
        Answer::NotAlmostSure => Sign::Negative,
    });
    let label = match &certified {
        Some(b) if Some(b.sign) == sign && scan_to >= b.tight_cutoff_at_most => Label::Certified,
        _ => Label::Empirical,
    };
    TightReport {
        entries,
        sign,
        tight_cutoff,
        label,
        certified_bound: certified.as_ref().map(|b| b.tight_cutoff_at_most),
        certified_sign: certified.as_ref().map(|b| b.sign),
        scanned_to: scan_to,
    }
}
