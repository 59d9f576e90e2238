//! Line-oriented protocol files.
//!
//! ```text
//! protocol running          # header, must come first
//! locations q0 q1 q2 qf     # optional; fixes location order
//! data 0 1 2
//! init q0
//! register 0
//! target qf                 # optional
//! reads self                # or `strict`; defaults to `self`
//! q0 R 0 q1
//! q1 W 1 q1
//! q0 RW 0 1 q1              # atomic read-write
//! ```
//!
//! Without a `locations` line, locations are numbered by first mention:
//! `init`, then `target`, then transitions in file order.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Action, Protocol, ProtocolBuilder, ReadCompletion, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is a missing statement.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `protocol <name>` header")]
    MissingHeader,
    #[error("missing `{0}` statement")]
    MissingStatement(&'static str),
    #[error("unknown statement `{0}`")]
    UnknownKeyword(String),
    #[error("`{statement}` expects {expected} argument(s), found {found}")]
    Arity { statement: String, expected: &'static str, found: usize },
    #[error("duplicate `{0}`")]
    Duplicate(String),
    #[error("undeclared location `{0}`")]
    UndeclaredLocation(String),
    #[error("undeclared datum `{0}`")]
    UndeclaredDatum(String),
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
    #[error("`reads` must be `self` or `strict`, found `{0}`")]
    BadPolicy(String),
}

const OPS: [&str; 3] = ["R", "W", "RW"];

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && !OPS.contains(&s)
        && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-' | '$'))
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

impl Line<'_> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.number, kind }
    }

    fn is_transition(&self) -> bool {
        matches!(self.tokens.len(), 4 | 5) && OPS.contains(&self.tokens[1])
    }

    fn args(&self, expected: usize) -> Result<&[&str], ParseError> {
        let args = &self.tokens[1..];
        if args.len() != expected {
            return Err(self.err(ParseErrorKind::Arity {
                statement: self.tokens[0].to_owned(),
                expected: if expected == 1 { "1" } else { "2" },
                found: args.len(),
            }));
        }
        Ok(args)
    }
}

/// Parses a protocol file. The result is not yet validated.
pub fn parse(text: &str) -> Result<Protocol, ParseError> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let code = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = code.split_whitespace().collect();
            (!tokens.is_empty()).then_some(Line { number: i + 1, tokens })
        })
        .collect();

    let header = lines.first().ok_or(ParseError { line: 0, kind: ParseErrorKind::MissingHeader })?;
    if header.tokens[0] != "protocol" {
        return Err(header.err(ParseErrorKind::MissingHeader));
    }
    let name = header.args(1)?[0];

    let mut data: Option<Vec<&str>> = None;
    let mut locations: Option<(Vec<&str>, usize)> = None;
    let mut init: Option<(&str, &Line)> = None;
    let mut register: Option<(&str, &Line)> = None;
    let mut target: Option<(&str, &Line)> = None;
    let mut reads: Option<ReadCompletion> = None;
    let mut transitions = Vec::new();

    for line in &lines[1..] {
        if line.is_transition() {
            transitions.push(line);
            continue;
        }
        let keyword = line.tokens[0];
        let once = |seen: bool| if seen { Err(line.err(ParseErrorKind::Duplicate(keyword.to_owned()))) } else { Ok(()) };
        match keyword {
            "protocol" => return Err(line.err(ParseErrorKind::Duplicate("protocol".into()))),
            "data" | "locations" => {
                let names = line.tokens[1..].to_vec();
                if names.is_empty() {
                    return Err(line.err(ParseErrorKind::Arity {
                        statement: keyword.to_owned(),
                        expected: "1 or more",
                        found: 0,
                    }));
                }
                for (i, n) in names.iter().enumerate() {
                    if !valid_name(n) {
                        return Err(line.err(ParseErrorKind::InvalidName((*n).to_owned())));
                    }
                    if names[..i].contains(n) {
                        return Err(line.err(ParseErrorKind::Duplicate((*n).to_owned())));
                    }
                }
                if keyword == "data" {
                    once(data.is_some())?;
                    data = Some(names);
                } else {
                    once(locations.is_some())?;
                    locations = Some((names, line.number));
                }
            }
            "init" => {
                once(init.is_some())?;
                init = Some((line.args(1)?[0], line));
            }
            "register" => {
                once(register.is_some())?;
                register = Some((line.args(1)?[0], line));
            }
            "target" => {
                once(target.is_some())?;
                target = Some((line.args(1)?[0], line));
            }
            "reads" => {
                once(reads.is_some())?;
                reads = Some(match line.args(1)?[0] {
                    "self" => ReadCompletion::SelfLoop,
                    "strict" => ReadCompletion::Strict,
                    other => return Err(line.err(ParseErrorKind::BadPolicy(other.to_owned()))),
                });
            }
            _ => return Err(line.err(ParseErrorKind::UnknownKeyword(keyword.to_owned()))),
        }
    }

    let missing = |what| ParseError { line: 0, kind: ParseErrorKind::MissingStatement(what) };
    let data = data.ok_or(missing("data"))?;
    let (init, init_line) = init.ok_or(missing("init"))?;
    let (register, register_line) = register.ok_or(missing("register"))?;

    let mut b = ProtocolBuilder::new(name, data.iter().copied());
    b.set_reads(reads.unwrap_or_default());
    let declared = locations.is_some();
    if let Some((names, _)) = &locations {
        b = b.locations(names.iter().copied());
    }
    let loc = |b: &mut ProtocolBuilder, name: &str, line: &Line| {
        if !valid_name(name) {
            return Err(line.err(ParseErrorKind::InvalidName(name.to_owned())));
        }
        if declared {
            b.existing_loc(name).map_err(|_| line.err(ParseErrorKind::UndeclaredLocation(name.to_owned())))
        } else {
            Ok(b.loc(name))
        }
    };
    let datum = |b: &ProtocolBuilder, name: &str, line: &Line| {
        b.datum(name).map_err(|_| line.err(ParseErrorKind::UndeclaredDatum(name.to_owned())))
    };

    let q0 = loc(&mut b, init, init_line)?;
    b.set_init(q0);
    let d0 = datum(&b, register, register_line)?;
    b.set_register(d0);
    if let Some((t, line)) = target {
        let q = loc(&mut b, t, line)?;
        b.set_target(q);
    }
    for line in transitions {
        let t = &line.tokens;
        let from = loc(&mut b, t[0], line)?;
        let to = loc(&mut b, t[t.len() - 1], line)?;
        let action = match (t[1], t.len()) {
            ("R", 4) => Action::Read(datum(&b, t[2], line)?),
            ("W", 4) => Action::Write(datum(&b, t[2], line)?),
            ("RW", 5) => Action::ReadWrite { read: datum(&b, t[2], line)?, write: datum(&b, t[3], line)? },
            (op, n) => {
                return Err(line.err(ParseErrorKind::Arity {
                    statement: op.to_owned(),
                    expected: if op == "RW" { "4" } else { "3" },
                    found: n - 1,
                }))
            }
        };
        b.push(Transition { source: from, action, destination: to });
    }
    Ok(b.build().expect("init and register are set"))
}

/// Canonical text: declarations in a fixed order, then transitions sorted by
/// (source, action, destination) index.
pub fn serialize(p: &Protocol) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "protocol {}", p.name());
    let _ = writeln!(out, "locations {}", p.locations().join(" "));
    let _ = writeln!(out, "data {}", p.data().join(" "));
    let _ = writeln!(out, "init {}", p.location_name(p.initial_location()));
    let _ = writeln!(out, "register {}", p.datum_name(p.initial_datum()));
    if let Some(t) = p.target() {
        let _ = writeln!(out, "target {}", p.location_name(t));
    }
    let _ = writeln!(out, "reads {}", p.read_completion().keyword());
    for t in p.transitions() {
        let from = p.location_name(t.source);
        let to = p.location_name(t.destination);
        let _ = match t.action {
            Action::Read(d) => writeln!(out, "{from} R {} {to}", p.datum_name(d)),
            Action::Write(d) => writeln!(out, "{from} W {} {to}", p.datum_name(d)),
            Action::ReadWrite { read, write } => {
                writeln!(out, "{from} RW {} {} {to}", p.datum_name(read), p.datum_name(write))
            }
        };
    }
    out
}
