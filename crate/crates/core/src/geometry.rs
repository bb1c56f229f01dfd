//! Substrate, lattice, circuit, and subcircuit geometry.
//!
//! Node positions are integer lattice coordinates in units of the pitch
//! `lambda`; distances are converted to meters exactly once, at the
//! accounting boundary. Subcircuit regions are axis-aligned rectangles,
//! which is all a stencil partition ever produces.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Identifier of a computational node, unique within one circuit.
pub type NodeId = u32;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("substrate side must be >= 1 lattice unit, got {0}")]
    InvalidSide(i64),
    #[error("lattice pitch must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("duplicate node id {0}")]
    DuplicateNodeId(NodeId),
    #[error("degenerate rectangle [{min_x}, {max_x}] x [{min_y}, {max_y}]")]
    DegenerateRect {
        min_x: f64,
        max_x: f64,
        min_y: f64,
        max_y: f64,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Role of a node in a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Stores one bit of the computation input.
    Input,
    /// Stores one bit of the computation output.
    Output,
    /// Intermediate node.
    Helper,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Input => "input",
            Role::Output => "output",
            Role::Helper => "helper",
        };
        f.write_str(s)
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "input" => Ok(Role::Input),
            "output" => Ok(Role::Output),
            "helper" => Ok(Role::Helper),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// A point of the square lattice, in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn to_point(self) -> Point {
        Point {
            x: self.x as f64,
            y: self.y as f64,
        }
    }
}

/// A continuous point in lattice units (stencil origins, region corners).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance between two lattice points, in meters.
///
/// `lambda` is the lattice pitch in meters per lattice unit.
pub fn euclidean_distance(p: LatticePoint, q: LatticePoint, lambda: f64) -> f64 {
    let dx = (p.x - q.x) as f64;
    let dy = (p.y - q.y) as f64;
    lambda * (dx * dx + dy * dy).sqrt()
}

/// The square region `[0, side]^2` (lattice units) nodes may occupy.
#[derive(Debug, Clone, Copy)]
pub struct Substrate {
    side: i64,
    lambda: f64,
}

impl Substrate {
    pub fn new(side: i64, lambda: f64) -> Result<Self, GeometryError> {
        if side < 1 {
            return Err(GeometryError::InvalidSide(side));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(GeometryError::InvalidLambda(lambda));
        }
        Ok(Self { side, lambda })
    }

    /// Side length in lattice units.
    pub fn side(&self) -> i64 {
        self.side
    }

    /// Lattice pitch in meters per lattice unit.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        p.x >= 0 && p.y >= 0 && p.x <= self.side && p.y <= self.side
    }

    /// Number of lattice points available for placement.
    pub fn cell_count(&self) -> i64 {
        (self.side + 1) * (self.side + 1)
    }
}

/// A placed computational node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub role: Role,
    pub pos: LatticePoint,
}

impl Node {
    pub fn new(id: NodeId, role: Role, pos: LatticePoint) -> Self {
        Self { id, role, pos }
    }
}

/// A substrate together with a set of placed nodes.
#[derive(Debug, Clone)]
pub struct Circuit {
    substrate: Substrate,
    nodes: Vec<Node>,
    index: BTreeMap<NodeId, usize>,
}

impl Circuit {
    /// Builds a circuit. Node ids must be unique; positional violations are
    /// left to [`validate_circuit`], which reports instead of failing.
    pub fn new(substrate: Substrate, nodes: Vec<Node>) -> Result<Self, GeometryError> {
        let mut index = BTreeMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id, i).is_some() {
                return Err(GeometryError::DuplicateNodeId(node.id));
            }
        }
        Ok(Self {
            substrate,
            nodes,
            index,
        })
    }

    pub fn substrate(&self) -> &Substrate {
        &self.substrate
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn nodes_with_role(&self, role: Role) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.role == role)
    }

    /// Distance in meters between two nodes, `None` if either id is unknown.
    pub fn distance_m(&self, a: NodeId, b: NodeId) -> Option<f64> {
        let pa = self.node(a)?.pos;
        let pb = self.node(b)?.pos;
        Some(euclidean_distance(pa, pb, self.substrate.lambda))
    }
}

/// Axis-aligned rectangle in lattice units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    /// A non-degenerate rectangle (positive width and height).
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self, GeometryError> {
        if !(min_x < max_x && min_y < max_y)
            || !(min_x.is_finite() && min_y.is_finite() && max_x.is_finite() && max_y.is_finite())
        {
            return Err(GeometryError::DegenerateRect {
                min_x,
                max_x,
                min_y,
                max_y,
            });
        }
        Ok(Self {
            min_x,
            min_y,
            max_x,
            max_y,
        })
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn contains_lattice(&self, p: LatticePoint) -> bool {
        self.contains(p.to_point())
    }

    /// True if `p` lies exactly on the rectangle boundary.
    pub fn on_boundary(&self, p: Point) -> bool {
        self.contains(p)
            && (p.x == self.min_x || p.x == self.max_x || p.y == self.min_y || p.y == self.max_y)
    }
}

/// Length of the part of segment `[a, b]` lying inside `rect`, in the same
/// units as the inputs.
///
/// The rectangle interior is what counts: a segment collinear with a
/// boundary edge has measure zero inside the region and returns 0. This
/// keeps region accounting additive when closed rectangles tile a larger
/// one and share edges.
pub fn clip_segment_to_rect(a: Point, b: Point, rect: &Rect) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len = (dx * dx + dy * dy).sqrt();
    if len == 0.0 {
        return 0.0;
    }
    // Collinear with a boundary edge: zero interior measure.
    if dy == 0.0 && (a.y == rect.min_y || a.y == rect.max_y) {
        return 0.0;
    }
    if dx == 0.0 && (a.x == rect.min_x || a.x == rect.max_x) {
        return 0.0;
    }
    // Canonical orientation so clip(a, b) is bit-identical to clip(b, a).
    let (p, d) = if (a.x, a.y) <= (b.x, b.y) {
        (a, (dx, dy))
    } else {
        (b, (-dx, -dy))
    };

    // Liang-Barsky parametric clipping.
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let checks = [
        (-d.0, p.x - rect.min_x),
        (d.0, rect.max_x - p.x),
        (-d.1, p.y - rect.min_y),
        (d.1, rect.max_y - p.y),
    ];
    for (den, num) in checks {
        if den == 0.0 {
            if num < 0.0 {
                return 0.0;
            }
        } else {
            let t = num / den;
            if den < 0.0 {
                if t > t0 {
                    t0 = t;
                }
            } else if t < t1 {
                t1 = t;
            }
        }
    }
    if t0 >= t1 {
        0.0
    } else {
        (t1 - t0) * len
    }
}

/// A rectangular subcircuit: the region plus the node ids assigned to it.
///
/// Membership is decided by the partition that produced the region, not by
/// raw containment; nodes that sat exactly on a partition boundary and were
/// tie-broken into this region are recorded in `tie_broken`.
#[derive(Debug, Clone)]
pub struct SubcircuitRegion {
    pub region: Rect,
    pub members: BTreeSet<NodeId>,
    pub tie_broken: BTreeSet<NodeId>,
}

impl SubcircuitRegion {
    pub fn new(region: Rect, members: BTreeSet<NodeId>, tie_broken: BTreeSet<NodeId>) -> Self {
        Self {
            region,
            members,
            tie_broken,
        }
    }
}

/// A structural problem found in a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicatePosition {
        first: NodeId,
        second: NodeId,
        pos: LatticePoint,
    },
    OutsideSubstrate {
        id: NodeId,
        pos: LatticePoint,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePosition { first, second, pos } => write!(
                f,
                "duplicate position ({}, {}) shared by nodes {first} and {second}",
                pos.x, pos.y
            ),
            Violation::OutsideSubstrate { id, pos } => {
                write!(f, "node {id} at ({}, {}) outside substrate", pos.x, pos.y)
            }
        }
    }
}

/// Reports every violation; never fails.
pub fn validate_circuit(circuit: &Circuit) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen: HashMap<LatticePoint, NodeId> = HashMap::new();
    for node in circuit.nodes() {
        if let Some(&first) = seen.get(&node.pos) {
            violations.push(Violation::DuplicatePosition {
                first,
                second: node.id,
                pos: node.pos,
            });
        } else {
            seen.insert(node.pos, node.id);
        }
        if !circuit.substrate().contains(node.pos) {
            violations.push(Violation::OutsideSubstrate {
                id: node.id,
                pos: node.pos,
            });
        }
    }
    violations
}

/// Parses the line-oriented circuit format:
///
/// ```text
/// substrate <side:int> <lambda_meters:float>
/// node <id:int> <role:input|output|helper> <x:int> <y:int>
/// ```
///
/// `#` starts a comment; blank lines are ignored.
pub fn parse_circuit(text: &str) -> Result<Circuit, GeometryError> {
    let mut substrate: Option<Substrate> = None;
    let mut nodes = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |msg: String| GeometryError::Parse { line: line_no, msg };
        match fields[0] {
            "substrate" => {
                if fields.len() != 3 {
                    return Err(parse_err("expected: substrate <side> <lambda>".into()));
                }
                let side: i64 = fields[1]
                    .parse()
                    .map_err(|e| parse_err(format!("bad side: {e}")))?;
                let lambda: f64 = fields[2]
                    .parse()
                    .map_err(|e| parse_err(format!("bad lambda: {e}")))?;
                substrate = Some(Substrate::new(side, lambda)?);
            }
            "node" => {
                if fields.len() != 5 {
                    return Err(parse_err("expected: node <id> <role> <x> <y>".into()));
                }
                let id: NodeId = fields[1]
                    .parse()
                    .map_err(|e| parse_err(format!("bad id: {e}")))?;
                let role: Role = fields[2].parse().map_err(parse_err)?;
                let x: i64 = fields[3]
                    .parse()
                    .map_err(|e| parse_err(format!("bad x: {e}")))?;
                let y: i64 = fields[4]
                    .parse()
                    .map_err(|e| parse_err(format!("bad y: {e}")))?;
                nodes.push(Node::new(id, role, LatticePoint::new(x, y)));
            }
            other => return Err(parse_err(format!("unknown directive `{other}`"))),
        }
    }

    let substrate = substrate.ok_or(GeometryError::Parse {
        line: 0,
        msg: "missing `substrate` header line".into(),
    })?;
    Circuit::new(substrate, nodes)
}

/// Renders a circuit in the format accepted by [`parse_circuit`].
pub fn render_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "substrate {} {:e}\n",
        circuit.substrate().side(),
        circuit.substrate().lambda()
    ));
    for node in circuit.nodes() {
        out.push_str(&format!(
            "node {} {} {} {}\n",
            node.id, node.role, node.pos.x, node.pos.y
        ));
    }
    out
}
