//! Placement strategies for coder circuits: row layout, square packing,
//! and seeded swap/relocate hill climbing on a wirelength objective.

use std::collections::HashMap;

use rand::Rng;

use super::CodesError;
use crate::channel::trial_rng;
use crate::geometry::{euclidean_distance, LatticePoint, Role, Substrate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementStrategy {
    /// Inputs fill rows from the bottom, outputs start on the next fresh
    /// row, helpers after that.
    Row,
    /// All nodes packed row-major into a near-square block.
    Grid,
    /// Grid start, then seeded hill climbing with a fixed proposal budget.
    LocalSearch { seed: u64, budget: usize },
}

impl PlacementStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            PlacementStrategy::Row => "row",
            PlacementStrategy::Grid => "grid",
            PlacementStrategy::LocalSearch { .. } => "local_search",
        }
    }
}

/// Weighted wirelength of `edges` (slot pairs with bit weights), in meters.
pub fn wirelength(positions: &[LatticePoint], edges: &[(usize, usize, f64)], lambda: f64) -> f64 {
    edges
        .iter()
        .map(|&(a, b, w)| w * euclidean_distance(positions[a], positions[b], lambda))
        .sum()
}

fn too_small(needed: usize, substrate: &Substrate) -> CodesError {
    CodesError::SubstrateTooSmall {
        needed,
        available: substrate.cell_count() as usize,
    }
}

fn row_positions(roles: &[Role], substrate: &Substrate) -> Result<Vec<LatticePoint>, CodesError> {
    let width = substrate.side() + 1;
    let mut pos = vec![LatticePoint::new(0, 0); roles.len()];
    let mut x = 0i64;
    let mut y = 0i64;
    for group in [Role::Input, Role::Output, Role::Helper] {
        if x != 0 {
            x = 0;
            y += 1;
        }
        for (slot, _) in roles.iter().enumerate().filter(|(_, &r)| r == group) {
            if y > substrate.side() {
                return Err(too_small(roles.len(), substrate));
            }
            pos[slot] = LatticePoint::new(x, y);
            x += 1;
            if x == width {
                x = 0;
                y += 1;
            }
        }
    }
    Ok(pos)
}

fn grid_positions(count: usize, substrate: &Substrate) -> Result<Vec<LatticePoint>, CodesError> {
    if count as i64 > substrate.cell_count() {
        return Err(too_small(count, substrate));
    }
    let width = ((count as f64).sqrt().ceil() as i64).clamp(1, substrate.side() + 1);
    Ok((0..count)
        .map(|i| LatticePoint::new(i as i64 % width, i as i64 / width))
        .collect())
}

/// Hill-climbing outcome: final positions plus the objective after the
/// initial placement and after every accepted move (strictly decreasing).
#[derive(Debug, Clone)]
pub struct LocalSearchOutcome {
    pub positions: Vec<LatticePoint>,
    pub objective_history: Vec<f64>,
}

/// Seeded first-improvement hill climbing. Proposals alternate between
/// relocating a node to an empty cell and swapping two nodes; only strict
/// improvements are accepted. `budget` counts proposals, not accepts.
pub fn local_search(
    init: Vec<LatticePoint>,
    edges: &[(usize, usize, f64)],
    substrate: &Substrate,
    seed: u64,
    budget: usize,
) -> LocalSearchOutcome {
    let lambda = substrate.lambda();
    let n = init.len();
    let mut positions = init;
    let mut occupied: HashMap<LatticePoint, usize> =
        positions.iter().enumerate().map(|(i, &p)| (p, i)).collect();

    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(a, b, w) in edges {
        adjacency[a].push((b, w));
        adjacency[b].push((a, w));
    }

    let mut current = wirelength(&positions, edges, lambda);
    let mut history = vec![current];
    if n < 2 {
        return LocalSearchOutcome {
            positions,
            objective_history: history,
        };
    }

    let mut rng = trial_rng(seed, 0x706c6163);
    let side = substrate.side();
    for _ in 0..budget {
        if rng.random::<bool>() {
            // Relocate a node to an empty cell.
            let node = rng.random_range(0..n);
            let mut target = None;
            for _ in 0..32 {
                let cand =
                    LatticePoint::new(rng.random_range(0..=side), rng.random_range(0..=side));
                if !occupied.contains_key(&cand) {
                    target = Some(cand);
                    break;
                }
            }
            let Some(target) = target else { continue };
            let from = positions[node];
            let delta: f64 = adjacency[node]
                .iter()
                .map(|&(o, w)| {
                    w * (euclidean_distance(target, positions[o], lambda)
                        - euclidean_distance(from, positions[o], lambda))
                })
                .sum();
            if delta < -1e-12 * current.abs().max(1e-300) {
                occupied.remove(&from);
                occupied.insert(target, node);
                positions[node] = target;
                current += delta;
                history.push(current);
            }
        } else {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b {
                continue;
            }
            let (pa, pb) = (positions[a], positions[b]);
            let mut delta = 0.0;
            for &(o, w) in &adjacency[a] {
                if o != b {
                    delta += w
                        * (euclidean_distance(pb, positions[o], lambda)
                            - euclidean_distance(pa, positions[o], lambda));
                }
            }
            for &(o, w) in &adjacency[b] {
                if o != a {
                    delta += w
                        * (euclidean_distance(pa, positions[o], lambda)
                            - euclidean_distance(pb, positions[o], lambda));
                }
            }
            if delta < -1e-12 * current.abs().max(1e-300) {
                positions[a] = pb;
                positions[b] = pa;
                occupied.insert(pb, a);
                occupied.insert(pa, b);
                current += delta;
                history.push(current);
            }
        }
    }
    LocalSearchOutcome {
        positions,
        objective_history: history,
    }
}

/// Positions for all slots under a strategy. Returns the placement and the
/// objective history (a single entry unless hill climbing ran).
pub fn positions(
    roles: &[Role],
    edges: &[(usize, usize, f64)],
    substrate: &Substrate,
    strategy: &PlacementStrategy,
) -> Result<(Vec<LatticePoint>, Vec<f64>), CodesError> {
    if roles.len() as i64 > substrate.cell_count() {
        return Err(too_small(roles.len(), substrate));
    }
    match strategy {
        PlacementStrategy::Row => {
            let pos = row_positions(roles, substrate)?;
            let obj = wirelength(&pos, edges, substrate.lambda());
            Ok((pos, vec![obj]))
        }
        PlacementStrategy::Grid => {
            let pos = grid_positions(roles.len(), substrate)?;
            let obj = wirelength(&pos, edges, substrate.lambda());
            Ok((pos, vec![obj]))
        }
        PlacementStrategy::LocalSearch { seed, budget } => {
            let init = grid_positions(roles.len(), substrate)?;
            let outcome = local_search(init, edges, substrate, *seed, *budget);
            Ok((outcome.positions, outcome.objective_history))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn substrate(side: i64) -> Substrate {
        Substrate::new(side, 1.0).unwrap()
    }

    #[test]
    fn row_layout_groups_roles() {
        let roles = vec![
            Role::Input,
            Role::Input,
            Role::Input,
            Role::Output,
            Role::Helper,
        ];
        let pos = row_positions(&roles, &substrate(4)).unwrap();
        assert_eq!(pos[0], LatticePoint::new(0, 0));
        assert_eq!(pos[1], LatticePoint::new(1, 0));
        assert_eq!(pos[2], LatticePoint::new(2, 0));
        assert_eq!(pos[3], LatticePoint::new(0, 1));
        assert_eq!(pos[4], LatticePoint::new(0, 2));
    }

    #[test]
    fn grid_conserves_and_separates_nodes() {
        let pos = grid_positions(10, &substrate(8)).unwrap();
        assert_eq!(pos.len(), 10);
        let distinct: std::collections::HashSet<_> = pos.iter().collect();
        assert_eq!(distinct.len(), 10);
    }

    #[test]
    fn substrate_too_small_is_reported() {
        let roles = vec![Role::Input; 30];
        assert!(matches!(
            positions(&roles, &[], &substrate(4), &PlacementStrategy::Row),
            Err(CodesError::SubstrateTooSmall { .. })
        ));
    }

    #[test]
    fn hill_climbing_never_increases_objective() {
        // A small star: 8 leaves wired to one hub.
        let mut edges = Vec::new();
        for leaf in 0..8 {
            edges.push((leaf, 8, 1.0));
        }
        let init = grid_positions(9, &substrate(4)).unwrap();
        let outcome = local_search(init, &edges, &substrate(4), 3, 5_000);
        for w in outcome.objective_history.windows(2) {
            assert!(w[1] < w[0]);
        }
        let recomputed = wirelength(&outcome.positions, &edges, 1.0);
        let last = *outcome.objective_history.last().unwrap();
        assert!((recomputed - last).abs() < 1e-9);
    }

    #[test]
    fn star_reaches_brute_force_optimum() {
        // n leaves sending one bit each to a hub on a 5x5 grid. The optimal
        // placement puts the hub where the sum of the n smallest distances
        // to free cells is minimal; enumerate all 25 hub cells for it.
        let n_leaves = 8;
        let sub = substrate(4);
        let mut edges = Vec::new();
        for leaf in 0..n_leaves {
            edges.push((leaf, n_leaves, 1.0));
        }

        let mut oracle = f64::INFINITY;
        for hx in 0..=4i64 {
            for hy in 0..=4i64 {
                let hub = LatticePoint::new(hx, hy);
                let mut dists: Vec<f64> = (0..=4i64)
                    .flat_map(|x| (0..=4i64).map(move |y| LatticePoint::new(x, y)))
                    .filter(|&p| p != hub)
                    .map(|p| euclidean_distance(p, hub, 1.0))
                    .collect();
                dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let cost: f64 = dists[..n_leaves].iter().sum();
                oracle = oracle.min(cost);
            }
        }

        let init = grid_positions(n_leaves + 1, &sub).unwrap();
        let outcome = local_search(init, &edges, &sub, 12, 60_000);
        let achieved = wirelength(&outcome.positions, &edges, 1.0);
        assert!(
            (achieved - oracle).abs() < 1e-9,
            "local search reached {achieved}, optimum {oracle}"
        );
    }
}
