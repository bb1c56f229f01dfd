//! Random regular Tanner graphs and the hard-decision bit-flipping decoder.
//!
//! Graphs are generated from a seed by socket matching, then repaired by
//! edge swaps until girth is at least six (no parallel edges, no two checks
//! sharing a pair of variables) and the graph is connected.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::linear::BitMatrix;
use super::CodesError;
use crate::channel::trial_rng;

#[derive(Debug, Clone)]
pub struct TannerGraph {
    pub n_vars: usize,
    pub n_checks: usize,
    pub dv: usize,
    pub dc: usize,
    /// `(variable, check)` pairs, in a fixed deterministic order.
    pub edges: Vec<(usize, usize)>,
    pub var_adj: Vec<Vec<usize>>,
    pub chk_adj: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// Generates a `(dv, dc)`-regular bipartite graph with girth >= 6,
    /// deterministically from `seed`.
    pub fn generate(n_vars: usize, dv: usize, dc: usize, seed: u64) -> Result<Self, CodesError> {
        if n_vars == 0 || dv < 2 || dc < 2 {
            return Err(CodesError::InvalidSpec(format!(
                "degenerate graph parameters n={n_vars}, dv={dv}, dc={dc}"
            )));
        }
        if !(n_vars * dv).is_multiple_of(dc) {
            return Err(CodesError::InvalidSpec(format!(
                "n*dv = {} not divisible by dc = {dc}",
                n_vars * dv
            )));
        }
        let n_checks = n_vars * dv / dc;
        if dc > n_vars || dv > n_checks {
            return Err(CodesError::InvalidSpec(
                "degrees exceed the opposite side; girth 6 impossible".into(),
            ));
        }

        for attempt in 0..64u64 {
            let mut rng = trial_rng(seed, attempt);
            let mut var_sockets: Vec<usize> = (0..n_vars)
                .flat_map(|v| std::iter::repeat_n(v, dv))
                .collect();
            var_sockets.shuffle(&mut rng);
            let mut edges: Vec<(usize, usize)> = var_sockets
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i / dc))
                .collect();

            if repair_short_cycles(&mut edges, n_checks, dc, &mut rng)
                && is_connected(&edges, n_vars, n_checks)
            {
                edges.sort_unstable();
                let mut var_adj = vec![Vec::with_capacity(dv); n_vars];
                let mut chk_adj = vec![Vec::with_capacity(dc); n_checks];
                for (i, &(v, c)) in edges.iter().enumerate() {
                    var_adj[v].push(i);
                    chk_adj[c].push(i);
                }
                return Ok(Self {
                    n_vars,
                    n_checks,
                    dv,
                    dc,
                    edges,
                    var_adj,
                    chk_adj,
                });
            }
        }
        Err(CodesError::GraphGeneration(format!(
            "no girth-6 connected ({dv},{dc})-regular graph found for n = {n_vars} from this seed"
        )))
    }

    pub fn parity_matrix(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.n_checks, self.n_vars);
        for &(v, c) in &self.edges {
            h.set(c, v, true);
        }
        h
    }
}

/// Finds an edge participating in a parallel pair or a 4-cycle.
fn find_offending_edge(edges: &[(usize, usize)], n_checks: usize) -> Option<usize> {
    let mut members: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_checks];
    for (i, &(v, c)) in edges.iter().enumerate() {
        members[c].push((v, i));
    }
    let mut pair_seen: HashMap<(usize, usize), usize> = HashMap::new();
    for list in &mut members {
        list.sort_unstable();
        for w in list.windows(2) {
            if w[0].0 == w[1].0 {
                return Some(w[1].1);
            }
        }
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                let key = (list[i].0, list[j].0);
                if pair_seen.insert(key, list[j].1).is_some() {
                    return Some(list[j].1);
                }
            }
        }
    }
    None
}

fn repair_short_cycles(
    edges: &mut [(usize, usize)],
    n_checks: usize,
    _dc: usize,
    rng: &mut impl Rng,
) -> bool {
    for _ in 0..20_000 {
        let Some(bad) = find_offending_edge(edges, n_checks) else {
            return true;
        };
        let other = rng.random_range(0..edges.len());
        if other == bad {
            continue;
        }
        let (bc, oc) = (edges[bad].1, edges[other].1);
        edges[bad].1 = oc;
        edges[other].1 = bc;
    }
    false
}

fn is_connected(edges: &[(usize, usize)], n_vars: usize, n_checks: usize) -> bool {
    let mut var_adj = vec![Vec::new(); n_vars];
    let mut chk_adj = vec![Vec::new(); n_checks];
    for &(v, c) in edges {
        var_adj[v].push(c);
        chk_adj[c].push(v);
    }
    let mut seen_var = vec![false; n_vars];
    let mut seen_chk = vec![false; n_checks];
    let mut stack = vec![(true, 0usize)];
    seen_var[0] = true;
    while let Some((is_var, idx)) = stack.pop() {
        if is_var {
            for &c in &var_adj[idx] {
                if !seen_chk[c] {
                    seen_chk[c] = true;
                    stack.push((false, c));
                }
            }
        } else {
            for &v in &chk_adj[idx] {
                if !seen_var[v] {
                    seen_var[v] = true;
                    stack.push((true, v));
                }
            }
        }
    }
    seen_var.iter().all(|&s| s) && seen_chk.iter().all(|&s| s)
}

pub fn syndrome_is_zero(h: &BitMatrix, word: &[u8]) -> bool {
    h.mul_vec(word).iter().all(|&b| b == 0)
}

#[derive(Debug, Clone)]
pub struct GallagerRun {
    pub decision: Vec<u8>,
    /// Message-passing iterations executed; zero when the received word
    /// already satisfies every check.
    pub iterations: usize,
}

/// Gallager-B bit-flipping decoding.
///
/// Per iteration every edge carries one bit in each direction: variables
/// send their current estimate, checks reply with the XOR of the other
/// incoming messages. A variable flips its outgoing estimate when all
/// `dv - 1` other check replies disagree with its channel bit, and decides
/// by majority over the channel bit and all replies (ties keep the channel
/// bit). Stops as soon as the running decision satisfies every check.
pub fn decode_gallager_b(
    graph: &TannerGraph,
    h: &BitMatrix,
    received: &[u8],
    max_iters: usize,
) -> GallagerRun {
    let mut decision = received.to_vec();
    if syndrome_is_zero(h, &decision) {
        return GallagerRun {
            decision,
            iterations: 0,
        };
    }

    let n_edges = graph.edges.len();
    let mut v_msg: Vec<u8> = graph.edges.iter().map(|&(v, _)| received[v]).collect();
    let mut c_msg = vec![0u8; n_edges];
    let mut iterations = 0;

    for iter in 1..=max_iters {
        iterations = iter;
        for adj in &graph.chk_adj {
            let total = adj.iter().fold(0u8, |acc, &e| acc ^ v_msg[e]);
            for &e in adj {
                c_msg[e] = total ^ v_msg[e];
            }
        }
        for (v, adj) in graph.var_adj.iter().enumerate() {
            let ones: usize =
                adj.iter().map(|&e| c_msg[e] as usize).sum::<usize>() + received[v] as usize;
            let votes = graph.dv + 1;
            decision[v] = match (2 * ones).cmp(&votes) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => received[v],
            };
            let disagreements: usize = adj
                .iter()
                .map(|&e| usize::from(c_msg[e] != received[v]))
                .sum();
            for &e in adj {
                let others = disagreements - usize::from(c_msg[e] != received[v]);
                v_msg[e] = if others >= graph.dv - 1 {
                    received[v] ^ 1
                } else {
                    received[v]
                };
            }
        }
        if syndrome_is_zero(h, &decision) {
            break;
        }
    }
    GallagerRun {
        decision,
        iterations,
    }
}
