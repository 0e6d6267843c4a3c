//! Seeded random graphs and configuration-model rewiring.
//!
//! All randomness goes through [`Seed`]; a batch element is generated from
//! `Seed::derive(index)` so results never depend on scheduling order.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

pub const DEFAULT_MAX_TRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RandGenError {
    #[error("no connected non-regular graph after {0} tries")]
    ExhaustedTries(usize),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("need at least {min} nodes, got {got}")]
    TooSmall { min: usize, got: usize },
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub base: u64,
}

impl Seed {
    pub const fn new(base: u64) -> Self {
        Seed { base }
    }

    /// Independent child stream for batch element `index`.
    pub fn derive(self, index: u64) -> Seed {
        Seed { base: splitmix64(splitmix64(self.base) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03)) }
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.base)
    }
}

impl From<u64> for Seed {
    fn from(base: u64) -> Self {
        Seed { base }
    }
}

fn check_probability(p: f64) -> Result<(), RandGenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(RandGenError::InvalidProbability(p))
    }
}

fn gnp_with(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    // include when the draw falls below p * 2^64; p = 1 takes every pair
    let all = p >= 1.0;
    let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let draw = rng.next_u64();
            if all || draw < threshold {
                edges.push((i, j));
            }
        }
    }
    Graph::from_index_edges(n, edges).expect("indices in range")
}

/// Erdős–Rényi graph on nodes `0..n`, one draw per pair in `(i, j)`, `i < j`
/// order.
pub fn gnp(n: usize, p: f64, seed: Seed) -> Result<Graph, RandGenError> {
    check_probability(p)?;
    Ok(gnp_with(n, p, &mut seed.rng()))
}

/// Rejection-samples [`gnp`] until the graph is connected and not regular.
/// All attempts share one stream, so the result depends only on `seed`.
pub fn sample_connected_nonregular(
    n: usize,
    p: f64,
    seed: Seed,
    max_tries: usize,
) -> Result<Graph, RandGenError> {
    if n < 3 {
        return Err(RandGenError::TooSmall { min: 3, got: n });
    }
    check_probability(p)?;
    let mut rng = seed.rng();
    for _ in 0..max_tries {
        let g = gnp_with(n, p, &mut rng);
        if g.is_connected() && !g.is_regular() {
            return Ok(g);
        }
    }
    Err(RandGenError::ExhaustedTries(max_tries))
}

#[derive(Debug, Clone)]
pub struct RewireOutcome {
    /// Same node set and labels as the input; may contain isolates.
    pub graph: Graph,
    pub stub_count: usize,
    pub dropped_self_loops: usize,
    pub dropped_parallel: usize,
}

impl RewireOutcome {
    pub fn dropped_edges(&self) -> usize {
        self.dropped_self_loops + self.dropped_parallel
    }
}

/// Configuration-model rewiring: shuffle the stub list, pair consecutive
/// stubs, drop self-loops and repeated pairs.
pub fn configuration_rewire(g: &Graph, seed: Seed) -> RewireOutcome {
    let mut stubs: Vec<usize> = (0..g.node_count()).flat_map(|i| core::iter::repeat_n(i, g.degree(i))).collect();
    let stub_count = stubs.len();
    stubs.shuffle(&mut seed.rng());

    let mut out = Graph::with_nodes(g.labels().iter().cloned());
    let (mut loops, mut parallel) = (0, 0);
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u == v {
            loops += 1;
        } else if !out.insert_edge(u, v) {
            parallel += 1;
        }
    }
    RewireOutcome { graph: out, stub_count, dropped_self_loops: loops, dropped_parallel: parallel }
}

/// Preferential attachment: start from a clique on `m + 1` nodes, then each
/// new node links to `m` distinct existing nodes chosen proportionally to
/// degree.
pub fn preferential_attachment(n: usize, m: usize, seed: Seed) -> Result<Graph, RandGenError> {
    if m == 0 || n < m + 1 {
        return Err(RandGenError::TooSmall { min: m.max(1) + 1, got: n });
    }
    let mut rng = seed.rng();
    let mut edges: Vec<(usize, usize)> = (0..=m).flat_map(|i| (i + 1..=m).map(move |j| (i, j))).collect();
    let mut targets: Vec<usize> = edges.iter().flat_map(|&(i, j)| [i, j]).collect();
    if targets.is_empty() {
        targets.push(0);
    }
    for v in m + 1..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let t = targets[(rng.next_u64() % targets.len() as u64) as usize];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            targets.push(t);
            targets.push(v);
        }
    }
    Ok(Graph::from_index_edges(n, edges).expect("indices in range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_is_stable_and_distinct() {
        let s = Seed::new(42);
        assert_eq!(s.derive(7), s.derive(7));
        assert_ne!(s.derive(7), s.derive(8));
        assert_ne!(Seed::new(1).derive(0), Seed::new(2).derive(0));
    }

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp(6, 0.0, Seed::new(1)).unwrap().edge_count(), 0);
        assert_eq!(gnp(6, 1.0, Seed::new(1)).unwrap().edge_count(), 15);
        assert!(gnp(4, 1.5, Seed::new(1)).is_err());
    }

    #[test]
    fn gnp_deterministic() {
        let a = gnp(12, 0.5, Seed::new(99)).unwrap();
        let b = gnp(12, 0.5, Seed::new(99)).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }

    #[test]
    fn n3_is_always_a_path() {
        for i in 0..200 {
            let g = sample_connected_nonregular(3, 0.5, Seed::new(5).derive(i), DEFAULT_MAX_TRIES).unwrap();
            assert_eq!(g.edge_count(), 2);
        }
    }

    #[test]
    fn exhausted_tries() {
        assert_eq!(
            sample_connected_nonregular(5, 0.0, Seed::new(0), 10).unwrap_err(),
            RandGenError::ExhaustedTries(10)
        );
    }

    #[test]
    fn rewire_conserves_stubs() {
        let g = gnp(30, 0.3, Seed::new(3)).unwrap();
        let out = configuration_rewire(&g, Seed::new(4));
        assert_eq!(out.stub_count, 2 * g.edge_count());
        assert_eq!(out.graph.edge_count() + out.dropped_edges(), g.edge_count());
        for i in 0..g.node_count() {
            assert!(out.graph.degree(i) <= g.degree(i));
        }
    }

    #[test]
    fn preferential_attachment_shape() {
        let g = preferential_attachment(200, 2, Seed::new(11)).unwrap();
        assert_eq!(g.edge_count(), 3 + 2 * 197);
        assert!(g.is_connected());
        assert!(!g.is_regular());
    }
}
