//! Seeded random protocols for sweeps, property tests and benchmarks.

use rand::Rng;

use crate::model::{DatumId, LocId, Protocol, ReadCompletion, Transition};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RandomProtocolParams {
    pub max_locations: usize,
    pub max_data: usize,
    /// Bound on the transition count after read completion.
    pub max_transitions: usize,
    pub allow_atomic: bool,
}

impl Default for RandomProtocolParams {
    fn default() -> Self {
        RandomProtocolParams { max_locations: 4, max_data: 3, max_transitions: 12, allow_atomic: false }
    }
}

/// A valid protocol with locations `q0..`, data `0..`, initial location
/// `q0`, a random initial datum and a random target.
pub fn random_protocol<R: Rng + ?Sized>(rng: &mut R, params: RandomProtocolParams) -> Protocol {
    assert!(params.max_locations >= 1 && params.max_data >= 1);
    assert!(params.max_transitions >= params.max_locations, "every location needs an edge");
    loop {
        let nq = rng.gen_range(1..=params.max_locations);
        let nd = rng.gen_range(1..=params.max_data);
        let raw = rng.gen_range(nq..=params.max_transitions);
        let loc = |rng: &mut R| LocId(rng.gen_range(0..nq) as u16);
        let dat = |rng: &mut R| DatumId(rng.gen_range(0..nd) as u16);

        let mut transitions = Vec::with_capacity(raw);
        // One edge per location first so nothing deadlocks.
        for q in 0..nq {
            let source = LocId(q as u16);
            transitions.push(random_edge(rng, source, nq, nd, params.allow_atomic));
        }
        while transitions.len() < raw {
            let source = loc(rng);
            transitions.push(random_edge(rng, source, nq, nd, params.allow_atomic));
        }
        let p = Protocol::new(
            "random",
            (0..nq).map(|i| format!("q{i}")).collect(),
            (0..nd).map(|i| i.to_string()).collect(),
            LocId(0),
            dat(rng),
            Some(loc(rng)),
            ReadCompletion::SelfLoop,
            transitions,
        );
        if let Ok(p) = p.validate(ReadCompletion::SelfLoop) {
            if p.transitions().len() <= params.max_transitions {
                return p;
            }
        }
    }
}

fn random_edge<R: Rng + ?Sized>(rng: &mut R, source: LocId, nq: usize, nd: usize, atomic: bool) -> Transition {
    let destination = LocId(rng.gen_range(0..nq) as u16);
    let d = DatumId(rng.gen_range(0..nd) as u16);
    match rng.gen_range(0..if atomic { 3 } else { 2 }) {
        0 => Transition::read(source, d, destination),
        1 => Transition::write(source, d, destination),
        _ => Transition::read_write(source, d, DatumId(rng.gen_range(0..nd) as u16), destination),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_protocol(&mut rng, RandomProtocolParams::default());
            assert!(p.num_locations() <= 4 && p.num_data() <= 3);
            assert!(p.transitions().len() <= 12);
            assert!(!p.is_atomic());
        }
    }
}
