//! Stencil tilings, stencil partitions, best-origin coverage search, and the
//! concentric-cut construction.
//!
//! A stencil is a grid of outer squares of side `a`, each with a concentric
//! inner square of side `(1 - 2*eta)*a`, anchored at an origin in `[0, a)^2`.
//! Overlaying it on a circuit partitions the nodes into subcircuits and
//! classifies nodes as covered (inside an inner square) or not.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geometry::{Circuit, LatticePoint, Point, Rect, Role, SubcircuitRegion};

#[derive(Debug, Error)]
pub enum StencilError {
    #[error("outer square side must be positive, got {0}")]
    InvalidOuterSide(f64),
    #[error("eta must lie in (0, 1/2), got {0}")]
    InvalidEta(f64),
    #[error("circuit has no node with role {0}")]
    NoBitNodes(Role),
    #[error("annulus thinner than lattice pitch: eta*a = {0} lattice units")]
    AnnulusThinnerThanPitch(f64),
    #[error("subcircuit index {index} out of range ({len} subcircuits)")]
    BadSubcircuitIndex { index: usize, len: usize },
}

/// Stencil(a, eta, origin): outer squares of side `a` tiling the plane with
/// concentric inner squares of side `(1 - 2*eta)*a`. All lengths are in
/// lattice units. The origin is the center of one inner square, normalized
/// into `[0, a)^2`.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    a: f64,
    eta: f64,
    origin: Point,
}

impl Stencil {
    pub fn new(a: f64, eta: f64, origin: Point) -> Result<Self, StencilError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(StencilError::InvalidOuterSide(a));
        }
        if !(eta > 0.0 && eta < 0.5) {
            return Err(StencilError::InvalidEta(eta));
        }
        let origin = Point::new(origin.x.rem_euclid(a), origin.y.rem_euclid(a));
        Ok(Self { a, eta, origin })
    }

    pub fn outer_side(&self) -> f64 {
        self.a
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    /// Inner square side `s = (1 - 2*eta) * a`.
    pub fn inner_side(&self) -> f64 {
        (1.0 - 2.0 * self.eta) * self.a
    }

    /// True if `p` lies inside an inner square.
    ///
    /// Inner squares are closed on their lower-left edges and open on the
    /// upper-right, so each point is covered for exactly an
    /// `s^2`-measure set of origins.
    pub fn covers(&self, p: LatticePoint) -> bool {
        let half = self.inner_side() / 2.0;
        self.covers_axis(p.x as f64 - self.origin.x, half)
            && self.covers_axis(p.y as f64 - self.origin.y, half)
    }

    fn covers_axis(&self, delta: f64, half: f64) -> bool {
        let w = delta.rem_euclid(self.a);
        w < half || w >= self.a - half
    }

    /// Index of the outer square containing `p`. A point exactly on a cell
    /// boundary goes to the lexicographically smaller (column, row) index.
    pub fn cell_of(&self, p: LatticePoint) -> (i64, i64) {
        (
            self.cell_axis(p.x as f64 - self.origin.x),
            self.cell_axis(p.y as f64 - self.origin.y),
        )
    }

    fn cell_axis(&self, delta: f64) -> i64 {
        let u = delta / self.a + 0.5;
        let fl = u.floor();
        if u == fl {
            fl as i64 - 1
        } else {
            fl as i64
        }
    }

    /// Outer square of cell `(i, j)` as a rectangle.
    pub fn cell_region(&self, cell: (i64, i64)) -> Rect {
        let cx = self.origin.x + cell.0 as f64 * self.a;
        let cy = self.origin.y + cell.1 as f64 * self.a;
        let h = self.a / 2.0;
        Rect::new(cx - h, cy - h, cx + h, cy + h).expect("outer square is non-degenerate")
    }

    /// Concentric square cuts across the annulus of one subcircuit: the
    /// outer square first, then cuts spaced one lattice unit inward, with
    /// the inner square as the final cut. The leftover spacing in front of
    /// the inner square is `alpha` lattice units, `alpha` in `[0, 1)`.
    pub fn build_cuts(&self) -> Result<CutSet, StencilError> {
        let annulus = self.eta * self.a;
        if annulus < 1.0 {
            return Err(StencilError::AnnulusThinnerThanPitch(annulus));
        }
        let full_steps = annulus.floor();
        let alpha = annulus - full_steps;
        Ok(CutSet {
            n_cut: full_steps as u64 + 2,
            spacing: 1.0,
            alpha,
        })
    }
}

/// The concentric-cut construction for one subcircuit annulus.
///
/// Satisfies `(n_cut - 2) * spacing + alpha * spacing == eta * a` exactly in
/// lattice units; `spacing` is one lattice unit, i.e. `lambda` meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSet {
    pub n_cut: u64,
    pub spacing: f64,
    pub alpha: f64,
}

/// One outer square of a stencil partition with its node statistics.
#[derive(Debug, Clone)]
pub struct StencilCell {
    pub index: (i64, i64),
    pub region: SubcircuitRegion,
    /// Bit-nodes (of the partition's configured role) inside the inner square.
    pub k_inside: usize,
    /// Input nodes anywhere in the outer square.
    pub n_input: usize,
}

/// A circuit partitioned by a stencil's outer squares.
#[derive(Debug, Clone)]
pub struct StencilPartition {
    pub stencil: Stencil,
    pub bitnode_role: Role,
    pub cells: Vec<StencilCell>,
}

impl StencilPartition {
    /// Sum of `k_inside` over all subcircuits.
    pub fn covered(&self) -> usize {
        self.cells.iter().map(|c| c.k_inside).sum()
    }

    /// Sum of `n_input` over all subcircuits.
    pub fn total_inputs(&self) -> usize {
        self.cells.iter().map(|c| c.n_input).sum()
    }

    /// Cut construction for the `index`-th subcircuit (identical geometry
    /// for every cell of one stencil).
    pub fn build_cuts(&self, index: usize) -> Result<CutSet, StencilError> {
        if index >= self.cells.len() {
            return Err(StencilError::BadSubcircuitIndex {
                index,
                len: self.cells.len(),
            });
        }
        self.stencil.build_cuts()
    }
}

/// Partitions a circuit by the stencil's outer squares.
///
/// Every node is assigned to exactly one cell (boundary ties go to the
/// lexicographically smallest cell index). `bitnode_role` selects which
/// role counts toward `k_inside`: `Output` for decoder analyses, `Input`
/// for encoder analyses.
pub fn partition(circuit: &Circuit, stencil: &Stencil, bitnode_role: Role) -> StencilPartition {
    let mut groups: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, node) in circuit.nodes().iter().enumerate() {
        groups.entry(stencil.cell_of(node.pos)).or_default().push(i);
    }

    let mut cells = Vec::with_capacity(groups.len());
    for (index, node_indices) in groups {
        let rect = stencil.cell_region(index);
        let mut members = std::collections::BTreeSet::new();
        let mut tie_broken = std::collections::BTreeSet::new();
        let mut k_inside = 0;
        let mut n_input = 0;
        for &i in &node_indices {
            let node = &circuit.nodes()[i];
            members.insert(node.id);
            if rect.on_boundary(node.pos.to_point()) {
                tie_broken.insert(node.id);
            }
            if node.role == bitnode_role && stencil.covers(node.pos) {
                k_inside += 1;
            }
            if node.role == Role::Input {
                n_input += 1;
            }
        }
        cells.push(StencilCell {
            index,
            region: SubcircuitRegion::new(rect, members, tie_broken),
            k_inside,
            n_input,
        });
    }

    StencilPartition {
        stencil: *stencil,
        bitnode_role,
        cells,
    }
}

/// Number of `bitnode_role` nodes covered by `Stencil(a, eta, origin)`.
pub fn coverage_at(
    circuit: &Circuit,
    a: f64,
    eta: f64,
    bitnode_role: Role,
    origin: Point,
) -> Result<usize, StencilError> {
    let stencil = Stencil::new(a, eta, origin)?;
    Ok(circuit
        .nodes_with_role(bitnode_role)
        .filter(|n| stencil.covers(n.pos))
        .count())
}

struct AxisMasks {
    /// Candidate origin coordinates, ascending.
    candidates: Vec<f64>,
    /// For each candidate, a bitmask over bit-nodes covered on this axis.
    masks: Vec<Vec<u64>>,
}

fn axis_candidates(coords: &[f64], a: f64, half: f64) -> Vec<f64> {
    let mut cands: Vec<f64> = Vec::with_capacity(coords.len() * 4 + 2);
    for &v in coords {
        cands.push((v - half).rem_euclid(a));
        cands.push((v + half).rem_euclid(a));
    }
    cands.sort_by(|p, q| p.partial_cmp(q).expect("finite candidates"));
    cands.dedup();
    // Midpoints between consecutive breakpoints (plus the wraparound gap)
    // hit the interior of every constant piece of the coverage function.
    let n = cands.len();
    let mut mids = Vec::with_capacity(n);
    for i in 0..n {
        let lo = cands[i];
        let hi = if i + 1 < n {
            cands[i + 1]
        } else {
            cands[0] + a
        };
        mids.push(((lo + hi) / 2.0).rem_euclid(a));
    }
    cands.extend(mids);
    cands.sort_by(|p, q| p.partial_cmp(q).expect("finite candidates"));
    cands.dedup();
    cands
}

fn axis_masks(coords: &[f64], a: f64, half: f64, words: usize) -> AxisMasks {
    let candidates = axis_candidates(coords, a, half);
    let masks = candidates
        .iter()
        .map(|&origin| {
            let mut mask = vec![0u64; words];
            for (i, &v) in coords.iter().enumerate() {
                let w = (v - origin).rem_euclid(a);
                if w < half || w >= a - half {
                    mask[i / 64] |= 1 << (i % 64);
                }
            }
            mask
        })
        .collect();
    AxisMasks { candidates, masks }
}

/// Finds an origin maximizing the number of covered bit-nodes.
///
/// Coverage as a function of the origin is piecewise constant with
/// axis-aligned breakpoints at the node coordinates shifted by half the
/// inner side, so the exact maximum is attained on a finite candidate set
/// (breakpoints plus the midpoints between them). Ties resolve to the
/// lexicographically smallest origin. The returned count is always at
/// least `k * (1 - 2*eta)^2`, the measure-theoretic average over origins.
pub fn best_origin(
    circuit: &Circuit,
    a: f64,
    eta: f64,
    bitnode_role: Role,
) -> Result<(Point, usize), StencilError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(StencilError::InvalidOuterSide(a));
    }
    if !(eta > 0.0 && eta < 0.5) {
        return Err(StencilError::InvalidEta(eta));
    }
    let xs: Vec<f64> = circuit
        .nodes_with_role(bitnode_role)
        .map(|n| n.pos.x as f64)
        .collect();
    let ys: Vec<f64> = circuit
        .nodes_with_role(bitnode_role)
        .map(|n| n.pos.y as f64)
        .collect();
    if xs.is_empty() {
        return Err(StencilError::NoBitNodes(bitnode_role));
    }

    let half = (1.0 - 2.0 * eta) * a / 2.0;
    let words = xs.len().div_ceil(64);
    let x_axis = axis_masks(&xs, a, half, words);
    let y_axis = axis_masks(&ys, a, half, words);

    let mut best_count = 0usize;
    let mut best_origin = Point::new(x_axis.candidates[0], y_axis.candidates[0]);
    for (xi, mx) in x_axis.masks.iter().enumerate() {
        for (yi, my) in y_axis.masks.iter().enumerate() {
            let count: u32 = mx
                .iter()
                .zip(my.iter())
                .map(|(wx, wy)| (wx & wy).count_ones())
                .sum();
            let count = count as usize;
            if count > best_count {
                best_count = count;
                best_origin = Point::new(x_axis.candidates[xi], y_axis.candidates[yi]);
            }
        }
    }
    Ok((best_origin, best_count))
}
