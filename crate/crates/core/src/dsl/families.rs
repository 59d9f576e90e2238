//! Generators for the standard protocol families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Protocol, ProtocolBuilder, ReadCompletion};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilySpec {
    /// Four locations, three data; negative cut-off 1.
    Running,
    /// Atomic read-write protocol with no cut-off.
    AtomicParity,
    /// `s_0 .. s_n`; tight positive cut-off `n`.
    Filter(u32),
    /// `n`-bit counter fed by tokens; tight negative cut-off `n + 2^n`.
    Counter(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unsupported parameter n = {n} for family `{family}`")]
    UnsupportedParameter { family: &'static str, n: u32 },
    #[error("unknown family `{0}` (expected running, atomic-parity, filter or counter)")]
    UnknownFamily(String),
}

impl FamilySpec {
    pub fn family_name(self) -> &'static str {
        match self {
            FamilySpec::Running => "running",
            FamilySpec::AtomicParity => "atomic-parity",
            FamilySpec::Filter(_) => "filter",
            FamilySpec::Counter(_) => "counter",
        }
    }

    /// Builds a family from its name and optional parameter.
    pub fn from_parts(family: &str, n: Option<u32>) -> Result<Self, FamilyError> {
        let need = |n: Option<u32>, family: &'static str| match n {
            Some(n) if n >= 1 => Ok(n),
            other => Err(FamilyError::UnsupportedParameter { family, n: other.unwrap_or(0) }),
        };
        match family {
            "running" => Ok(FamilySpec::Running),
            "atomic-parity" | "atomic" | "parity" => Ok(FamilySpec::AtomicParity),
            "filter" => Ok(FamilySpec::Filter(need(n, "filter")?)),
            "counter" => Ok(FamilySpec::Counter(need(n, "counter")?)),
            other => Err(FamilyError::UnknownFamily(other.to_owned())),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Filter(n) | FamilySpec::Counter(n) => write!(f, "{}:{n}", self.family_name()),
            _ => f.write_str(self.family_name()),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = FamilyError;

    /// `running`, `atomic-parity`, `filter:3`, `counter:2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (family, n) = match s.split_once(':') {
            Some((f, n)) => {
                let n = n.parse().map_err(|_| FamilyError::UnknownFamily(s.to_owned()))?;
                (f, Some(n))
            }
            None => (s, None),
        };
        FamilySpec::from_parts(family, n)
    }
}

/// Validated protocol for `spec`.
pub fn generate(spec: FamilySpec) -> Result<Protocol, FamilyError> {
    match spec {
        FamilySpec::Running => Ok(running()),
        FamilySpec::AtomicParity => Ok(atomic_parity()),
        FamilySpec::Filter(0) => Err(FamilyError::UnsupportedParameter { family: "filter", n: 0 }),
        FamilySpec::Filter(n) => Ok(filter(n)),
        FamilySpec::Counter(0) => Err(FamilyError::UnsupportedParameter { family: "counter", n: 0 }),
        FamilySpec::Counter(n) if n > 11 => Err(FamilyError::UnsupportedParameter { family: "counter", n }),
        FamilySpec::Counter(n) => Ok(counter(n)),
    }
}

fn finish(b: ProtocolBuilder) -> Protocol {
    b.build()
        .expect("generator sets init and register")
        .validate(ReadCompletion::SelfLoop)
        .expect("generated protocols are valid")
}

/// Every datum of `b`, for absorbing read self-loops.
fn absorbing(mut b: ProtocolBuilder, q: &str, data: &[String]) -> ProtocolBuilder {
    for d in data {
        b = b.read(q, d, q).unwrap();
    }
    b
}

pub fn running() -> Protocol {
    let b = ProtocolBuilder::new("running", ["0", "1", "2"])
        .locations(["q0", "q1", "q2", "qf"])
        .init("q0")
        .register("0")
        .and_then(|b| b.read("q0", "0", "q1"))
        .and_then(|b| b.write("q1", "1", "q1"))
        .and_then(|b| b.read("q1", "1", "q2"))
        .and_then(|b| b.write("q2", "2", "q1"))
        .and_then(|b| b.read("q2", "2", "qf"))
        .and_then(|b| b.write("qf", "2", "qf"))
        .unwrap()
        .target("qf");
    finish(b)
}

/// Omitted self-loops at `q2` and `qf` are reads of every datum, so
/// processes there never touch the register again.
pub fn atomic_parity() -> Protocol {
    let data: Vec<String> = ["0", "1", "2"].map(String::from).to_vec();
    let b = ProtocolBuilder::new("atomic_parity", data.iter().cloned())
        .locations(["q0", "q1", "q2", "qf"])
        .init("q0")
        .register("0")
        .and_then(|b| b.read_write("q0", "0", "1", "q1"))
        .and_then(|b| b.read_write("q1", "1", "0", "q0"))
        .and_then(|b| b.read_write("q0", "1", "2", "q2"))
        .and_then(|b| b.read_write("q1", "2", "0", "q2"))
        .and_then(|b| b.read("q0", "0", "qf"))
        .unwrap()
        .target("qf");
    let b = absorbing(b, "q2", &data);
    finish(absorbing(b, "qf", &data))
}

/// Filter over `s_0 .. s_n` with data `0 .. n-1` and register `0`.
///
/// `s_n` has no edges in the usual drawing; here it reads every datum and
/// stays put.
pub fn filter(n: u32) -> Protocol {
    assert!(n >= 1);
    let data: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let s = |i: u32| format!("s{i}");
    let mut b = ProtocolBuilder::new(format!("filter{n}"), data.iter().cloned())
        .locations((0..=n).map(s))
        .init("s0")
        .register("0")
        .unwrap()
        .target(&s(n))
        .write("s0", "0", "s0")
        .unwrap();
    for i in 0..n {
        b = b.read(&s(i), &data[i as usize], &s(i + 1)).unwrap();
    }
    for i in 1..n {
        b = b.write(&s(i), &data[i as usize], "s0").unwrap();
    }
    finish(absorbing(b, &s(n), &data))
}

/// Token-driven binary counter with `n` bit gadgets followed by an
/// `(n+1)`-filter into `qf`.
///
/// Data: `sharp` (initial register), `0`, counter values `1..n`, `halt`,
/// and filter data `f0..fn`. Bit `i` is the gadget `a_i -R(i)-> b_i
/// -W(0)-> c_i -R(i)-> d_i`, after which `d_i` writes `i+1` and returns to
/// `a_i` (or, for `i = n`, writes `halt` and enters `s0`). A gadget
/// process that reads a counter value other than its own, or `sharp`,
/// falls into `qf`; on `halt` or any `f_j` it joins the filter.
pub fn counter(n: u32) -> Protocol {
    assert!(n >= 1);
    let vals: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let fs: Vec<String> = (0..=n).map(|i| format!("f{i}")).collect();
    let mut data = vec!["sharp".to_owned(), "0".to_owned()];
    data.extend(vals.iter().cloned());
    data.push("halt".into());
    data.extend(fs.iter().cloned());

    let mut names = vec!["init".to_owned(), "token".into(), "sent".into(), "sink".into()];
    for g in ["a", "b", "c", "d"] {
        names.extend((1..=n).map(|i| format!("{g}{i}")));
    }
    names.extend((0..=n).map(|i| format!("s{i}")));
    names.push("qf".into());

    let mut b = ProtocolBuilder::new(format!("counter{n}"), data.iter().cloned())
        .locations(names)
        .init("init")
        .register("sharp")
        .unwrap()
        .target("qf");

    let r = |b: ProtocolBuilder, from: &str, d: &str, to: &str| b.read(from, d, to).unwrap();
    let w = |b: ProtocolBuilder, from: &str, d: &str, to: &str| b.write(from, d, to).unwrap();

    // Token generator.
    b = r(b, "init", "sharp", "token");
    b = w(b, "token", "1", "sent");
    b = r(b, "sent", "halt", "sink");
    for d in data.iter().filter(|d| *d != "halt") {
        b = r(b, "sent", d, "qf");
    }
    b = absorbing(b, "sink", &data);
    b = absorbing(b, "qf", &data);

    // Bit gadgets.
    for i in 1..=n {
        let (a, bb, c, d) = (format!("a{i}"), format!("b{i}"), format!("c{i}"), format!("d{i}"));
        let own = &vals[i as usize - 1];
        b = r(b, "init", "sharp", &a);
        b = r(b, &a, own, &bb);
        b = w(b, &bb, "0", &c);
        b = r(b, &c, own, &d);
        if i < n {
            b = w(b, &d, &vals[i as usize], &a);
        } else {
            b = w(b, &d, "halt", "s0");
        }
        for q in [&a, &c] {
            b = r(b, q, "sharp", "qf");
            for v in vals.iter().filter(|v| *v != own) {
                b = r(b, q, v, "qf");
            }
        }
        for q in [&a, &bb, &c, &d] {
            b = r(b, q, "halt", "s0");
            for f in &fs {
                b = r(b, q, f, "s0");
            }
        }
    }

    // Filter tail s0 .. sn -> qf.
    let s = |i: u32| if i > n { "qf".to_owned() } else { format!("s{i}") };
    b = w(b, "s0", "f0", "s0");
    for i in 0..=n {
        b = r(b, &s(i), &fs[i as usize], &s(i + 1));
    }
    for i in 1..=n {
        b = w(b, &s(i), &fs[i as usize], "s0");
    }
    finish(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::model::{successors, Configuration};

    #[test]
    fn running_matches_fixture() {
        let fixture = parse(include_str!("../../fixtures/running.rp")).unwrap().validated().unwrap();
        assert_eq!(running(), fixture);
    }

    #[test]
    fn atomic_parity_matches_fixture() {
        let fixture = parse(include_str!("../../fixtures/atomic_parity.rp")).unwrap().validated().unwrap();
        assert_eq!(atomic_parity(), fixture);
        assert!(fixture.is_atomic());
    }

    #[test]
    fn filter_shape() {
        for n in 1..=6u32 {
            let raw_count = 1 + n + (n - 1) + n;
            let p = filter(n);
            assert_eq!(p.num_locations(), n as usize + 1);
            assert_eq!(p.num_data(), n as usize);
            // Every location of the filter already reads every datum it can
            // see, except s_0..s_{n-1} whose other reads are completed.
            let q0 = p.initial_location();
            assert_eq!(p.location_name(q0), "s0");
            let completed = (n as usize) * (n as usize - 1); // s_0..s_{n-1}, n-1 missing reads each
            assert_eq!(p.transitions().len(), raw_count as usize + completed);
        }
    }

    #[test]
    fn zero_parameter_is_rejected() {
        assert!(generate(FamilySpec::Filter(0)).is_err());
        assert!(generate(FamilySpec::Counter(0)).is_err());
        assert_eq!("filter:3".parse::<FamilySpec>().unwrap(), FamilySpec::Filter(3));
        assert!("filter".parse::<FamilySpec>().is_err());
        assert!("bogus".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn counter_is_valid_and_never_deadlocks_initially() {
        for n in 1..=3 {
            let p = counter(n);
            assert_eq!(p.num_locations(), 5 * n as usize + 6);
            assert_eq!(p.num_data(), 2 * n as usize + 4);
            let g = Configuration::initial(&p, 3, p.initial_datum());
            assert!(!successors(&p, &g).is_empty());
        }
    }
}
