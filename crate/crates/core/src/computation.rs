//! Message traces over circuit links and the bit-meters accounting engine.
//!
//! Bits are abstract counts here; only the `codes` module simulates actual
//! bit values. Steps carry no timing semantics beyond ordering.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::geometry::{clip_segment_to_rect, Circuit, NodeId, Rect, SubcircuitRegion};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("message at step {step} has zero bits (minimum message length is one bit)")]
    EmptyMessage { step: u64 },
    #[error("message at step {step} from node {node} to itself")]
    SelfLoop { step: u64, node: NodeId },
    #[error("steps decrease at record {index} ({prev} -> {next})")]
    StepsOutOfOrder { index: usize, prev: u64, next: u64 },
    #[error("dangling endpoint: node {node} not in circuit")]
    DanglingEndpoint { node: NodeId },
    #[error("ensemble weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("negative ensemble weight {weight}")]
    NegativeWeight { weight: f64 },
    #[error("fixed-length ensemble: trace {index} has a different message schedule")]
    FixedLengthMismatch { index: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One message: `bits` bits sent from `src` to `dst` at schedule position
/// `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageRecord {
    pub step: u64,
    pub src: NodeId,
    pub dst: NodeId,
    pub bits: u64,
}

impl MessageRecord {
    pub fn new(step: u64, src: NodeId, dst: NodeId, bits: u64) -> Self {
        Self {
            step,
            src,
            dst,
            bits,
        }
    }
}

/// An ordered list of messages produced by one run of a computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageTrace {
    records: Vec<MessageRecord>,
    input_id: String,
}

impl MessageTrace {
    /// Validates the per-record invariants: at least one bit per message,
    /// no self-loops, nondecreasing steps.
    pub fn new(
        input_id: impl Into<String>,
        records: Vec<MessageRecord>,
    ) -> Result<Self, TraceError> {
        let mut prev_step = 0u64;
        for (index, rec) in records.iter().enumerate() {
            if rec.bits == 0 {
                return Err(TraceError::EmptyMessage { step: rec.step });
            }
            if rec.src == rec.dst {
                return Err(TraceError::SelfLoop {
                    step: rec.step,
                    node: rec.src,
                });
            }
            if index > 0 && rec.step < prev_step {
                return Err(TraceError::StepsOutOfOrder {
                    index,
                    prev: prev_step,
                    next: rec.step,
                });
            }
            prev_step = rec.step;
        }
        Ok(Self {
            records,
            input_id: input_id.into(),
        })
    }

    pub fn records(&self) -> &[MessageRecord] {
        &self.records
    }

    pub fn input_id(&self) -> &str {
        &self.input_id
    }

    /// Total bits over all records.
    pub fn total_bits(&self) -> u64 {
        self.records.iter().map(|r| r.bits).sum()
    }

    fn schedule(&self) -> Vec<(NodeId, NodeId, u64)> {
        self.records
            .iter()
            .map(|r| (r.src, r.dst, r.bits))
            .collect()
    }
}

/// A probability-weighted family of traces, one per computation input.
#[derive(Debug, Clone)]
pub struct TraceEnsemble {
    entries: Vec<(f64, MessageTrace)>,
    fixed_length: bool,
}

impl TraceEnsemble {
    /// Weights must be nonnegative and sum to 1 (tolerance 1e-9). With
    /// `fixed_length`, every trace must have the identical
    /// `(src, dst, bits)` schedule.
    pub fn new(entries: Vec<(f64, MessageTrace)>, fixed_length: bool) -> Result<Self, TraceError> {
        let mut sum = 0.0;
        for (w, _) in &entries {
            if *w < 0.0 {
                return Err(TraceError::NegativeWeight { weight: *w });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(TraceError::WeightSum { sum });
        }
        if fixed_length {
            if let Some((_, first)) = entries.first() {
                let reference = first.schedule();
                for (index, (_, trace)) in entries.iter().enumerate().skip(1) {
                    if trace.schedule() != reference {
                        return Err(TraceError::FixedLengthMismatch { index });
                    }
                }
            }
        }
        Ok(Self {
            entries,
            fixed_length,
        })
    }

    pub fn entries(&self) -> &[(f64, MessageTrace)] {
        &self.entries
    }

    pub fn fixed_length(&self) -> bool {
        self.fixed_length
    }
}

fn record_distance_m(circuit: &Circuit, rec: &MessageRecord) -> Result<f64, TraceError> {
    circuit
        .node(rec.src)
        .ok_or(TraceError::DanglingEndpoint { node: rec.src })?;
    circuit
        .node(rec.dst)
        .ok_or(TraceError::DanglingEndpoint { node: rec.dst })?;
    Ok(circuit
        .distance_m(rec.src, rec.dst)
        .expect("endpoints checked"))
}

/// Bit-meters of a whole trace: sum over records of
/// `bits x euclidean_distance(src, dst)`.
pub fn bitmeters_of_trace(circuit: &Circuit, trace: &MessageTrace) -> Result<f64, TraceError> {
    let mut total = 0.0;
    for rec in trace.records() {
        total += rec.bits as f64 * record_distance_m(circuit, rec)?;
    }
    Ok(total)
}

/// Bit-meters a trace charges to one subcircuit region.
///
/// A record with both endpoints assigned to the region costs its full link
/// bit-meters; with exactly one endpoint inside, its bits times the clipped
/// in-region length; with neither endpoint inside, zero, even if the segment
/// passes over the region. Membership comes from the region's assignment
/// sets, not raw containment.
pub fn bitmeters_in_region(
    circuit: &Circuit,
    trace: &MessageTrace,
    region: &SubcircuitRegion,
) -> Result<f64, TraceError> {
    let lambda = circuit.substrate().lambda();
    let mut total = 0.0;
    for rec in trace.records() {
        let src = circuit
            .node(rec.src)
            .ok_or(TraceError::DanglingEndpoint { node: rec.src })?;
        let dst = circuit
            .node(rec.dst)
            .ok_or(TraceError::DanglingEndpoint { node: rec.dst })?;
        let src_in = region.members.contains(&rec.src);
        let dst_in = region.members.contains(&rec.dst);
        total += match (src_in, dst_in) {
            (true, true) => {
                rec.bits as f64 * crate::geometry::euclidean_distance(src.pos, dst.pos, lambda)
            }
            (true, false) | (false, true) => {
                let clipped =
                    clip_segment_to_rect(src.pos.to_point(), dst.pos.to_point(), &region.region);
                rec.bits as f64 * clipped * lambda
            }
            (false, false) => 0.0,
        };
    }
    Ok(total)
}

/// Probability-weighted mean of [`bitmeters_of_trace`] over an ensemble.
pub fn average_bitmeters(circuit: &Circuit, ensemble: &TraceEnsemble) -> Result<f64, TraceError> {
    let sum: f64 = ensemble.entries().iter().map(|(w, _)| w).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(TraceError::WeightSum { sum });
    }
    let mut mean = 0.0;
    for (w, trace) in ensemble.entries() {
        mean += w * bitmeters_of_trace(circuit, trace)?;
    }
    Ok(mean)
}

/// Total bits on records that cross the rectangle boundary (exactly one
/// endpoint inside, closed containment).
pub fn cut_crossing_bits(
    circuit: &Circuit,
    trace: &MessageTrace,
    boundary: &Rect,
) -> Result<u64, TraceError> {
    let mut total = 0u64;
    for rec in trace.records() {
        let src = circuit
            .node(rec.src)
            .ok_or(TraceError::DanglingEndpoint { node: rec.src })?;
        let dst = circuit
            .node(rec.dst)
            .ok_or(TraceError::DanglingEndpoint { node: rec.dst })?;
        let src_in = boundary.contains_lattice(src.pos);
        let dst_in = boundary.contains_lattice(dst.pos);
        if src_in != dst_in {
            total += rec.bits;
        }
    }
    Ok(total)
}

/// Parses the line-oriented trace format:
///
/// ```text
/// msg <step:int> <src:int> <dst:int> <bits:int>
/// ```
pub fn parse_trace(text: &str, input_id: impl Into<String>) -> Result<MessageTrace, TraceError> {
    let mut records = Vec::new();
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
        let parse_err = |msg: String| TraceError::Parse { line: line_no, msg };
        if fields.len() != 5 || fields[0] != "msg" {
            return Err(parse_err("expected: msg <step> <src> <dst> <bits>".into()));
        }
        let step: u64 = fields[1]
            .parse()
            .map_err(|e| parse_err(format!("bad step: {e}")))?;
        let src: NodeId = fields[2]
            .parse()
            .map_err(|e| parse_err(format!("bad src: {e}")))?;
        let dst: NodeId = fields[3]
            .parse()
            .map_err(|e| parse_err(format!("bad dst: {e}")))?;
        let bits: u64 = fields[4]
            .parse()
            .map_err(|e| parse_err(format!("bad bits: {e}")))?;
        records.push(MessageRecord::new(step, src, dst, bits));
    }
    MessageTrace::new(input_id, records)
}

/// Renders a trace in the format accepted by [`parse_trace`].
pub fn render_trace(trace: &MessageTrace) -> String {
    let mut out = String::new();
    for rec in trace.records() {
        out.push_str(&format!(
            "msg {} {} {} {}\n",
            rec.step, rec.src, rec.dst, rec.bits
        ));
    }
    out
}

/// Node ids referenced by a trace.
pub fn referenced_nodes(trace: &MessageTrace) -> BTreeSet<NodeId> {
    let mut ids = BTreeSet::new();
    for rec in trace.records() {
        ids.insert(rec.src);
        ids.insert(rec.dst);
    }
    ids
}
