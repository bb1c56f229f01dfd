//! Concrete placed encoder/decoder pairs that generate real message traces,
//! so the lower bounds can be confronted with measured bit-meters and
//! measured error rates.
//!
//! Three families ship: repetition with majority decoding, Hamming(7,4)
//! with syndrome decoding, and Gallager-B bit-flipping on seeded
//! girth-6 regular Tanner graphs. All decoding is hard-decision. Encoders
//! for linear codes route every parity bit through a fixed fan-in-2 XOR
//! helper tree, which gives reproducible, nontrivial encoder bit-meters.

pub mod gallager;
pub mod linear;
pub mod placement;

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{
    derive_seed, trial_rng, wilson_interval, BerEstimate, BlockCoder, ChannelError, CodeParams,
    WILSON_Z95,
};
use crate::computation::{MessageRecord, MessageTrace, TraceEnsemble, TraceError};
use crate::geometry::{
    euclidean_distance, validate_circuit, Circuit, GeometryError, Node, Role, Substrate,
};
use gallager::{decode_gallager_b, TannerGraph};
use linear::{hamming74_parity, hamming74_sets, systematic_from_parity, BitMatrix};
pub use placement::PlacementStrategy;

#[derive(Debug, Error)]
pub enum CodesError {
    #[error("invalid coder specification: {0}")]
    InvalidSpec(String),
    #[error("substrate too small: {needed} nodes, {available} lattice points")]
    SubstrateTooSmall { needed: usize, available: usize },
    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("graph generation failed: {0}")]
    GraphGeneration(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Code family and its construction parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// `k` information bits, each repeated `reps` times (odd, for majority).
    Repetition {
        k: usize,
        reps: usize,
    },
    Hamming74,
    /// `(dv, dc)`-regular LDPC on `n` variables, Gallager-B decoded.
    GallagerB {
        n: usize,
        dv: usize,
        dc: usize,
        graph_seed: u64,
        max_iters: usize,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Repetition { .. } => "repetition",
            Family::Hamming74 => "hamming74",
            Family::GallagerB { .. } => "gallager_b",
        }
    }
}

/// Everything needed to build a placed coder.
#[derive(Debug, Clone)]
pub struct CoderSpec {
    pub family: Family,
    pub substrate_side: i64,
    pub lambda: f64,
    pub placement: PlacementStrategy,
}

/// Fixed message schedule of an encoder: XOR sets per codeword bit plus the
/// one-bit messages of the fan-in-2 helper trees.
#[derive(Debug, Clone)]
struct EncoderPlan {
    sets: Vec<Vec<usize>>,
    roles: Vec<Role>,
    /// `(step, src_slot, dst_slot)`, every message one bit.
    messages: Vec<(u64, usize, usize)>,
}

fn build_encoder_plan(sets: Vec<Vec<usize>>, k: usize) -> EncoderPlan {
    let n = sets.len();
    let mut roles = vec![Role::Input; k];
    roles.extend(std::iter::repeat_n(Role::Output, n));
    let mut messages = Vec::new();
    let mut next_helper = k + n;
    for (j, set) in sets.iter().enumerate() {
        let cw_slot = k + j;
        match set.len() {
            0 => {}
            1 => messages.push((0, set[0], cw_slot)),
            _ => {
                let mut level = 0u64;
                let mut frontier: Vec<usize> = set.clone();
                while frontier.len() > 1 {
                    let mut next = Vec::with_capacity(frontier.len().div_ceil(2));
                    for chunk in frontier.chunks(2) {
                        if chunk.len() == 2 {
                            let h = next_helper;
                            next_helper += 1;
                            roles.push(Role::Helper);
                            messages.push((level, chunk[0], h));
                            messages.push((level, chunk[1], h));
                            next.push(h);
                        } else {
                            next.push(chunk[0]);
                        }
                    }
                    frontier = next;
                    level += 1;
                }
                messages.push((level, frontier[0], cw_slot));
            }
        }
    }
    messages.sort_by_key(|&(step, _, _)| step);
    EncoderPlan {
        sets,
        roles,
        messages,
    }
}

#[derive(Debug, Clone)]
enum DecoderKind {
    Repetition {
        reps: usize,
    },
    Hamming {
        h: BitMatrix,
        syndrome_pos: [Option<usize>; 8],
    },
    Gallager {
        graph: TannerGraph,
        h: BitMatrix,
        free_cols: Vec<usize>,
        max_iters: usize,
    },
}

/// Decoder circuit layout: observation slots `0..n`, output slots
/// `n..n+k`, helper slots after that.
#[derive(Debug, Clone)]
struct DecoderPlan {
    n: usize,
    k: usize,
    roles: Vec<Role>,
    kind: DecoderKind,
}

impl DecoderPlan {
    fn out_slot(&self, i: usize) -> usize {
        self.n + i
    }

    fn helper_slot(&self, i: usize) -> usize {
        self.n + self.k + i
    }

    /// Message records for a decode run that used `iterations` sweeps.
    /// Repetition and Hamming schedules are input-independent; Gallager-B
    /// carries two one-bit messages per edge per iteration plus the final
    /// delivery of the systematic bits to the output nodes.
    fn records_for(&self, iterations: usize) -> Vec<MessageRecord> {
        match &self.kind {
            DecoderKind::Repetition { reps } => (0..self.n)
                .map(|j| MessageRecord::new(j as u64, j as u32, self.out_slot(j / reps) as u32, 1))
                .collect(),
            DecoderKind::Hamming { h, .. } => {
                let mut records = Vec::new();
                for c in 0..3 {
                    for m in 0..7 {
                        if h.get(c, m) {
                            records.push(MessageRecord::new(
                                0,
                                m as u32,
                                self.helper_slot(c) as u32,
                                1,
                            ));
                        }
                    }
                }
                let corrector = self.helper_slot(3) as u32;
                for c in 0..3 {
                    records.push(MessageRecord::new(
                        1,
                        self.helper_slot(c) as u32,
                        corrector,
                        1,
                    ));
                }
                for d in 0..4 {
                    records.push(MessageRecord::new(1, d as u32, corrector, 1));
                }
                for i in 0..4 {
                    records.push(MessageRecord::new(2, corrector, self.out_slot(i) as u32, 1));
                }
                records
            }
            DecoderKind::Gallager {
                graph, free_cols, ..
            } => {
                let mut records =
                    Vec::with_capacity(2 * graph.edges.len() * iterations + free_cols.len());
                for t in 1..=iterations as u64 {
                    for &(v, c) in &graph.edges {
                        records.push(MessageRecord::new(
                            2 * t - 1,
                            v as u32,
                            self.helper_slot(c) as u32,
                            1,
                        ));
                    }
                    for &(v, c) in &graph.edges {
                        records.push(MessageRecord::new(
                            2 * t,
                            self.helper_slot(c) as u32,
                            v as u32,
                            1,
                        ));
                    }
                }
                let delivery_step = 2 * iterations as u64 + 1;
                for (i, &col) in free_cols.iter().enumerate() {
                    records.push(MessageRecord::new(
                        delivery_step,
                        col as u32,
                        self.out_slot(i) as u32,
                        1,
                    ));
                }
                records
            }
        }
    }

    /// Canonical schedule used for placement objectives and artifact dumps:
    /// the real schedule for fixed-schedule families, one sweep plus
    /// delivery for Gallager-B.
    fn reference_records(&self) -> Vec<MessageRecord> {
        match &self.kind {
            DecoderKind::Gallager { .. } => self.records_for(1),
            _ => self.records_for(0),
        }
    }
}

fn merged_edges(records: &[MessageRecord]) -> Vec<(usize, usize, f64)> {
    let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for rec in records {
        let a = rec.src.min(rec.dst) as usize;
        let b = rec.src.max(rec.dst) as usize;
        *map.entry((a, b)).or_insert(0.0) += rec.bits as f64;
    }
    map.into_iter().map(|((a, b), w)| (a, b, w)).collect()
}

fn build_circuit(
    substrate: Substrate,
    roles: &[Role],
    positions: &[crate::geometry::LatticePoint],
) -> Result<Circuit, CodesError> {
    let nodes: Vec<Node> = roles
        .iter()
        .enumerate()
        .map(|(slot, &role)| Node::new(slot as u32, role, positions[slot]))
        .collect();
    let circuit = Circuit::new(substrate, nodes)?;
    let violations = validate_circuit(&circuit);
    if !violations.is_empty() {
        return Err(CodesError::InvalidSpec(format!(
            "placement produced an invalid circuit: {}",
            violations[0]
        )));
    }
    Ok(circuit)
}

/// One side (encoder or decoder) of a placed coder.
#[derive(Debug, Clone)]
pub struct PlacedEncoder {
    circuit: Circuit,
    plan: EncoderPlan,
}

impl PlacedEncoder {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }
}

#[derive(Debug, Clone)]
pub struct PlacedDecoder {
    circuit: Circuit,
    plan: DecoderPlan,
    /// Bit-meters of one full message-passing sweep (Gallager-B only).
    sweep_bitmeters: f64,
    /// Bit-meters of the final systematic delivery (Gallager-B only).
    delivery_bitmeters: f64,
    /// Bit-meters of the fixed schedule (repetition and Hamming).
    fixed_bitmeters: f64,
}

impl PlacedDecoder {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Decoder bit-meters of a run that used `iterations` sweeps. Equal to
    /// the bit-meters of the corresponding message trace.
    pub fn trial_bitmeters(&self, iterations: usize) -> f64 {
        match self.plan.kind {
            DecoderKind::Gallager { .. } => {
                iterations as f64 * self.sweep_bitmeters + self.delivery_bitmeters
            }
            _ => self.fixed_bitmeters,
        }
    }
}

/// Outcome of one decode call.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub info: Vec<u8>,
    pub trace: MessageTrace,
    pub iterations: usize,
}

/// A code family with placed encoder and decoder circuits.
#[derive(Debug, Clone)]
pub struct PlacedCoder {
    spec: CoderSpec,
    code: CodeParams,
    encoder: PlacedEncoder,
    decoder: PlacedDecoder,
}

impl PlacedCoder {
    pub fn new(spec: &CoderSpec) -> Result<Self, CodesError> {
        let substrate = Substrate::new(spec.substrate_side, spec.lambda)?;

        let (sets, k, n, kind) = match &spec.family {
            Family::Repetition { k, reps } => {
                if *k == 0 {
                    return Err(CodesError::InvalidSpec("repetition needs k >= 1".into()));
                }
                if *reps < 1 || reps % 2 == 0 {
                    return Err(CodesError::InvalidSpec(
                        "repetition count must be odd for majority decoding".into(),
                    ));
                }
                let sets: Vec<Vec<usize>> = (0..k * reps).map(|j| vec![j / reps]).collect();
                (sets, *k, k * reps, DecoderKind::Repetition { reps: *reps })
            }
            Family::Hamming74 => {
                let h = hamming74_parity();
                let mut syndrome_pos = [None; 8];
                for col in 0..7 {
                    let s = (0..3).map(|r| (h.get(r, col) as usize) << r).sum::<usize>();
                    syndrome_pos[s] = Some(col);
                }
                (
                    hamming74_sets(),
                    4,
                    7,
                    DecoderKind::Hamming { h, syndrome_pos },
                )
            }
            Family::GallagerB {
                n,
                dv,
                dc,
                graph_seed,
                max_iters,
            } => {
                if *n > 1024 {
                    return Err(CodesError::InvalidSpec(format!(
                        "gallager_b supports up to 1024 variables, got {n}"
                    )));
                }
                let graph = TannerGraph::generate(*n, *dv, *dc, *graph_seed)?;
                let h = graph.parity_matrix();
                let sys = systematic_from_parity(&h)?;
                let k = sys.k;
                (
                    sys.sets,
                    k,
                    *n,
                    DecoderKind::Gallager {
                        graph,
                        h,
                        free_cols: sys.free_cols,
                        max_iters: *max_iters,
                    },
                )
            }
        };

        let enc_plan = build_encoder_plan(sets, k);
        let enc_records: Vec<MessageRecord> = enc_plan
            .messages
            .iter()
            .map(|&(s, a, b)| MessageRecord::new(s, a as u32, b as u32, 1))
            .collect();
        let enc_strategy = derive_strategy(&spec.placement, 1);
        let (enc_pos, _) = placement::positions(
            &enc_plan.roles,
            &merged_edges(&enc_records),
            &substrate,
            &enc_strategy,
        )?;
        let enc_circuit = build_circuit(substrate, &enc_plan.roles, &enc_pos)?;

        let mut dec_roles = vec![Role::Input; n];
        dec_roles.extend(std::iter::repeat_n(Role::Output, k));
        let helpers = match &kind {
            DecoderKind::Repetition { .. } => 0,
            DecoderKind::Hamming { .. } => 4,
            DecoderKind::Gallager { graph, .. } => graph.n_checks,
        };
        dec_roles.extend(std::iter::repeat_n(Role::Helper, helpers));
        let dec_plan = DecoderPlan {
            n,
            k,
            roles: dec_roles,
            kind,
        };
        let reference = dec_plan.reference_records();
        let dec_strategy = derive_strategy(&spec.placement, 2);
        let (dec_pos, _) = placement::positions(
            &dec_plan.roles,
            &merged_edges(&reference),
            &substrate,
            &dec_strategy,
        )?;
        let dec_circuit = build_circuit(substrate, &dec_plan.roles, &dec_pos)?;

        let lambda = substrate.lambda();
        let dist = |rec: &MessageRecord| {
            let a = dec_circuit.node(rec.src).expect("slot exists").pos;
            let b = dec_circuit.node(rec.dst).expect("slot exists").pos;
            euclidean_distance(a, b, lambda)
        };
        let (mut sweep, mut delivery, mut fixed) = (0.0, 0.0, 0.0);
        match &dec_plan.kind {
            DecoderKind::Gallager { .. } => {
                for rec in dec_plan.records_for(1) {
                    if rec.step <= 2 {
                        sweep += rec.bits as f64 * dist(&rec);
                    } else {
                        delivery += rec.bits as f64 * dist(&rec);
                    }
                }
            }
            _ => {
                for rec in dec_plan.records_for(0) {
                    fixed += rec.bits as f64 * dist(&rec);
                }
            }
        }

        Ok(Self {
            spec: spec.clone(),
            code: CodeParams::new(k, n)?,
            encoder: PlacedEncoder {
                circuit: enc_circuit,
                plan: enc_plan,
            },
            decoder: PlacedDecoder {
                circuit: dec_circuit,
                plan: dec_plan,
                sweep_bitmeters: sweep,
                delivery_bitmeters: delivery,
                fixed_bitmeters: fixed,
            },
        })
    }

    pub fn spec(&self) -> &CoderSpec {
        &self.spec
    }

    pub fn params(&self) -> CodeParams {
        self.code
    }

    pub fn encoder(&self) -> &PlacedEncoder {
        &self.encoder
    }

    pub fn decoder(&self) -> &PlacedDecoder {
        &self.decoder
    }

    fn encode_word(&self, info: &[u8]) -> Vec<u8> {
        self.encoder
            .plan
            .sets
            .iter()
            .map(|set| set.iter().fold(0u8, |acc, &i| acc ^ info[i]))
            .collect()
    }

    fn decode_word(&self, received: &[u8]) -> (Vec<u8>, usize) {
        match &self.decoder.plan.kind {
            DecoderKind::Repetition { reps } => {
                let info = received
                    .chunks(*reps)
                    .map(|group| {
                        let ones: usize = group.iter().map(|&b| b as usize).sum();
                        u8::from(2 * ones > *reps)
                    })
                    .collect();
                (info, 0)
            }
            DecoderKind::Hamming { h, syndrome_pos } => {
                let syndrome = h.mul_vec(received);
                let s = (0..3).map(|r| (syndrome[r] as usize) << r).sum::<usize>();
                let mut corrected = received.to_vec();
                if s != 0 {
                    if let Some(pos) = syndrome_pos[s] {
                        corrected[pos] ^= 1;
                    }
                }
                (corrected[..4].to_vec(), 0)
            }
            DecoderKind::Gallager {
                graph,
                h,
                free_cols,
                max_iters,
            } => {
                let run = decode_gallager_b(graph, h, received, *max_iters);
                let info = free_cols.iter().map(|&c| run.decision[c]).collect();
                (info, run.iterations)
            }
        }
    }

    fn input_label(bits: &[u8]) -> String {
        if bits.len() <= 64 {
            bits.iter().map(|&b| char::from(b'0' + b)).collect()
        } else {
            let mut acc: u64 = 0xcbf2_9ce4_8422_2325;
            for &b in bits {
                acc = (acc ^ b as u64).wrapping_mul(0x1000_0000_01b3);
            }
            format!("len{}:{acc:016x}", bits.len())
        }
    }

    /// Encodes `info`, returning the codeword and the encoder trace. The
    /// schedule is fixed: only message contents depend on the input.
    pub fn encode(&self, info: &[u8]) -> Result<(Vec<u8>, MessageTrace), CodesError> {
        if info.len() != self.code.k {
            return Err(CodesError::LengthMismatch {
                expected: self.code.k,
                got: info.len(),
            });
        }
        let codeword = self.encode_word(info);
        let records = self
            .encoder
            .plan
            .messages
            .iter()
            .map(|&(s, a, b)| MessageRecord::new(s, a as u32, b as u32, 1))
            .collect();
        let trace = MessageTrace::new(Self::input_label(info), records)?;
        Ok((codeword, trace))
    }

    /// Decodes `received`, returning the information estimate, the decoder
    /// trace, and the number of message-passing iterations used.
    pub fn decode(&self, received: &[u8]) -> Result<DecodeOutcome, CodesError> {
        if received.len() != self.code.n {
            return Err(CodesError::LengthMismatch {
                expected: self.code.n,
                got: received.len(),
            });
        }
        let (info, iterations) = self.decode_word(received);
        let records = self.decoder.plan.records_for(iterations);
        let trace = MessageTrace::new(Self::input_label(received), records)?;
        Ok(DecodeOutcome {
            info,
            trace,
            iterations,
        })
    }

    /// The canonical decode schedule (used for placement and artifacts).
    pub fn reference_decode_trace(&self) -> MessageTrace {
        MessageTrace::new("reference", self.decoder.plan.reference_records())
            .expect("reference schedule is valid")
    }
}

fn derive_strategy(strategy: &PlacementStrategy, stream: u64) -> PlacementStrategy {
    match strategy {
        PlacementStrategy::LocalSearch { seed, budget } => PlacementStrategy::LocalSearch {
            seed: derive_seed(*seed, stream),
            budget: *budget,
        },
        other => *other,
    }
}

impl BlockCoder for PlacedCoder {
    fn code(&self) -> CodeParams {
        self.code
    }

    fn encode(&self, info: &[u8]) -> Vec<u8> {
        self.encode_word(info)
    }

    fn decode(&self, received: &[u8]) -> Vec<u8> {
        self.decode_word(received).0
    }
}

/// Monte-Carlo measurement of a placed coder over BSC(p).
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub ber: BerEstimate,
    pub mean_decoder_bitmeters: f64,
    pub mean_encoder_bitmeters: f64,
    pub mean_iterations: f64,
}

/// Runs `trials` seeded transmissions and measures block errors and
/// bit-meters. Trials parallelize with per-trial seeds; the aggregation
/// order is fixed, so results are bit-identical to a sequential run.
pub fn simulate(
    coder: &PlacedCoder,
    p: f64,
    trials: u64,
    master_seed: u64,
) -> Result<SimulationReport, CodesError> {
    if !(0.0..=0.5).contains(&p) {
        return Err(CodesError::Channel(ChannelError::InvalidCrossover(p)));
    }
    if trials == 0 {
        return Err(CodesError::Channel(ChannelError::NoTrials));
    }
    let k = coder.code.k;
    let (_, enc_trace) = coder.encode(&vec![0u8; k])?;
    let encoder_bm = crate::computation::bitmeters_of_trace(coder.encoder.circuit(), &enc_trace)?;

    let per_trial: Vec<(u64, f64, u64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(master_seed, t);
            let info: Vec<u8> = (0..k).map(|_| rng.random::<bool>() as u8).collect();
            let codeword = coder.encode_word(&info);
            let received = crate::channel::flip_with_rng(&codeword, p, &mut rng);
            let (decoded, iterations) = coder.decode_word(&received);
            let bm = coder.decoder.trial_bitmeters(iterations);
            (u64::from(decoded != info), bm, iterations as u64)
        })
        .collect();

    let mut errors = 0u64;
    let mut bm_sum = 0.0;
    let mut iter_sum = 0u64;
    for (err, bm, iters) in per_trial {
        errors += err;
        bm_sum += bm;
        iter_sum += iters;
    }
    let (wilson_lo, wilson_hi) = wilson_interval(errors, trials, WILSON_Z95);
    Ok(SimulationReport {
        ber: BerEstimate {
            trials,
            errors,
            eps_hat: errors as f64 / trials as f64,
            wilson_lo,
            wilson_hi,
        },
        mean_decoder_bitmeters: bm_sum / trials as f64,
        mean_encoder_bitmeters: encoder_bm,
        mean_iterations: iter_sum as f64 / trials as f64,
    })
}

/// Ensemble of encoder traces over computation inputs: exact enumeration
/// when the input space has at most 2^16 elements, otherwise `samples`
/// seeded draws with the standard error of the mean bit-meters reported.
pub fn encoder_ensemble(
    coder: &PlacedCoder,
    samples: usize,
    seed: u64,
) -> Result<(TraceEnsemble, Option<f64>), CodesError> {
    let k = coder.code.k;
    if k <= 16 {
        let count = 1usize << k;
        let weight = 1.0 / count as f64;
        let mut entries = Vec::with_capacity(count);
        for word in 0..count {
            let info: Vec<u8> = (0..k).map(|i| (word >> i & 1) as u8).collect();
            let (_, trace) = coder.encode(&info)?;
            entries.push((weight, trace));
        }
        Ok((TraceEnsemble::new(entries, true)?, None))
    } else {
        if samples == 0 {
            return Err(CodesError::InvalidSpec(
                "sampled encoder ensemble needs samples >= 1".into(),
            ));
        }
        let weight = 1.0 / samples as f64;
        let mut entries = Vec::with_capacity(samples);
        let mut bms = Vec::with_capacity(samples);
        for s in 0..samples {
            let mut rng = trial_rng(seed, s as u64);
            let info: Vec<u8> = (0..k).map(|_| rng.random::<bool>() as u8).collect();
            let (_, trace) = coder.encode(&info)?;
            bms.push(crate::computation::bitmeters_of_trace(
                coder.encoder.circuit(),
                &trace,
            )?);
            entries.push((weight, trace));
        }
        let mean = bms.iter().sum::<f64>() / samples as f64;
        let var =
            bms.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (samples as f64 - 1.0).max(1.0);
        let se = (var / samples as f64).sqrt();
        Ok((TraceEnsemble::new(entries, true)?, Some(se)))
    }
}

/// Parses the coder description format (`key value` lines, `#` comments):
///
/// ```text
/// family gallager_b
/// n 16
/// dv 3
/// dc 4
/// graph_seed 7
/// max_iters 20
/// substrate_side 16
/// lambda 1e-6
/// placement local_search
/// search_seed 1
/// search_budget 20000
/// ```
pub fn parse_coder_file(text: &str) -> Result<CoderSpec, CodesError> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
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
        let Some((key, value)) = line.split_once(char::is_whitespace) else {
            return Err(CodesError::Parse {
                line: line_no,
                msg: format!("expected `key value`, got `{line}`"),
            });
        };
        map.insert(key.trim().to_string(), (line_no, value.trim().to_string()));
    }

    fn req<'a>(
        map: &'a BTreeMap<String, (usize, String)>,
        key: &str,
    ) -> Result<&'a str, CodesError> {
        map.get(key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| CodesError::Parse {
                line: 0,
                msg: format!("missing required key `{key}`"),
            })
    }
    fn parse_num<T: std::str::FromStr>(
        map: &BTreeMap<String, (usize, String)>,
        key: &str,
        default: Option<T>,
    ) -> Result<T, CodesError>
    where
        T::Err: std::fmt::Display,
    {
        match map.get(key) {
            Some((line, v)) => v.parse().map_err(|e| CodesError::Parse {
                line: *line,
                msg: format!("bad `{key}`: {e}"),
            }),
            None => default.ok_or_else(|| CodesError::Parse {
                line: 0,
                msg: format!("missing required key `{key}`"),
            }),
        }
    }

    let family = match req(&map, "family")? {
        "repetition" => Family::Repetition {
            k: parse_num(&map, "k", Some(1usize))?,
            reps: parse_num(&map, "reps", None)?,
        },
        "hamming74" => Family::Hamming74,
        "gallager_b" => Family::GallagerB {
            n: parse_num(&map, "n", None)?,
            dv: parse_num(&map, "dv", Some(3usize))?,
            dc: parse_num(&map, "dc", Some(4usize))?,
            graph_seed: parse_num(&map, "graph_seed", None)?,
            max_iters: parse_num(&map, "max_iters", Some(20usize))?,
        },
        other => {
            return Err(CodesError::Parse {
                line: map["family"].0,
                msg: format!("unknown family `{other}`"),
            })
        }
    };

    let placement = match req(&map, "placement")? {
        "row" => PlacementStrategy::Row,
        "grid" => PlacementStrategy::Grid,
        "local_search" => PlacementStrategy::LocalSearch {
            seed: parse_num(&map, "search_seed", Some(1u64))?,
            budget: parse_num(&map, "search_budget", Some(20_000usize))?,
        },
        other => {
            return Err(CodesError::Parse {
                line: map["placement"].0,
                msg: format!("unknown placement `{other}`"),
            })
        }
    };

    Ok(CoderSpec {
        family,
        substrate_side: parse_num(&map, "substrate_side", None)?,
        lambda: parse_num(&map, "lambda", None)?,
        placement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::computation::bitmeters_of_trace;

    fn spec(family: Family, side: i64, placement: PlacementStrategy) -> CoderSpec {
        CoderSpec {
            family,
            substrate_side: side,
            lambda: 1e-6,
            placement,
        }
    }

    fn rep3() -> PlacedCoder {
        PlacedCoder::new(&spec(
            Family::Repetition { k: 1, reps: 3 },
            4,
            PlacementStrategy::Row,
        ))
        .unwrap()
    }

    fn hamming() -> PlacedCoder {
        PlacedCoder::new(&spec(Family::Hamming74, 8, PlacementStrategy::Grid)).unwrap()
    }

    fn ldpc16() -> PlacedCoder {
        PlacedCoder::new(&spec(
            Family::GallagerB {
                n: 16,
                dv: 3,
                dc: 4,
                graph_seed: 7,
                max_iters: 20,
            },
            8,
            PlacementStrategy::Grid,
        ))
        .unwrap()
    }

    #[test]
    fn repetition_encodes_and_decodes() {
        let coder = rep3();
        let (cw, trace) = coder.encode(&[1]).unwrap();
        assert_eq!(cw, vec![1, 1, 1]);
        assert_eq!(trace.records().len(), 3);
        let out = coder.decode(&[1, 1, 0]).unwrap();
        assert_eq!(out.info, vec![1]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn hamming_zero_maps_to_zero_and_syndrome_holds() {
        let coder = hamming();
        let (zero_cw, _) = coder.encode(&[0, 0, 0, 0]).unwrap();
        assert_eq!(zero_cw, vec![0; 7]);
        let h = hamming74_parity();
        for word in 0..16u8 {
            let info: Vec<u8> = (0..4).map(|i| word >> i & 1).collect();
            let (cw, _) = coder.encode(&info).unwrap();
            assert_eq!(h.mul_vec(&cw), vec![0, 0, 0], "word {word}");
        }
    }

    #[test]
    fn hamming_corrects_every_single_error() {
        let coder = hamming();
        for word in 0..16u8 {
            let info: Vec<u8> = (0..4).map(|i| word >> i & 1).collect();
            let (cw, _) = coder.encode(&info).unwrap();
            for flip in 0..7 {
                let mut rx = cw.clone();
                rx[flip] ^= 1;
                let out = coder.decode(&rx).unwrap();
                assert_eq!(out.info, info, "word {word} flip {flip}");
            }
        }
    }

    #[test]
    fn round_trip_noiseless_all_families_exhaustive() {
        for coder in [rep3(), hamming(), ldpc16()] {
            let k = coder.params().k;
            assert!(k <= 8, "exhaustive round trip expects small k");
            for word in 0..(1u32 << k) {
                let info: Vec<u8> = (0..k).map(|i| (word >> i & 1) as u8).collect();
                let (cw, _) = coder.encode(&info).unwrap();
                let out = coder.decode(&cw).unwrap();
                assert_eq!(out.info, info, "family {}", coder.spec().family.name());
            }
        }
    }

    #[test]
    fn gallager_clean_input_needs_no_iterations() {
        let coder = ldpc16();
        let k = coder.params().k;
        let (cw, _) = coder.encode(&vec![1u8; k]).unwrap();
        let out = coder.decode(&cw).unwrap();
        assert_eq!(out.iterations, 0);
        // Only the delivery messages remain.
        assert_eq!(out.trace.records().len(), k);
    }

    #[test]
    fn gallager_trace_bitmeters_match_edge_formula() {
        let coder = ldpc16();
        let k = coder.params().k;
        let (cw, _) = coder.encode(&vec![0u8; k]).unwrap();
        let mut rx = cw;
        rx[3] ^= 1;
        let out = coder.decode(&rx).unwrap();
        assert!(out.iterations >= 1);

        let measured = bitmeters_of_trace(coder.decoder.circuit(), &out.trace).unwrap();
        let formula = coder.decoder.trial_bitmeters(out.iterations);
        assert!(
            (measured - formula).abs() <= 1e-12 * measured.abs(),
            "trace {measured} vs formula {formula}"
        );
    }

    #[test]
    fn coder_circuits_have_expected_role_counts() {
        for coder in [rep3(), hamming(), ldpc16()] {
            let CodeParams { k, n } = coder.params();
            let dec = coder.decoder.circuit();
            assert_eq!(dec.nodes_with_role(Role::Input).count(), n);
            assert_eq!(dec.nodes_with_role(Role::Output).count(), k);
            let enc = coder.encoder.circuit();
            assert_eq!(enc.nodes_with_role(Role::Input).count(), k);
            assert_eq!(enc.nodes_with_role(Role::Output).count(), n);
            assert!(validate_circuit(dec).is_empty());
            assert!(validate_circuit(enc).is_empty());
        }
    }

    #[test]
    fn simulate_is_deterministic_and_sane() {
        let coder = rep3();
        let a = simulate(&coder, 0.1, 5_000, 42).unwrap();
        let b = simulate(&coder, 0.1, 5_000, 42).unwrap();
        assert_eq!(a, b);
        let sigma = (0.028_f64 * 0.972 / 5_000.0).sqrt();
        assert!((a.ber.eps_hat - 0.028).abs() < 5.0 * sigma);
        assert!(a.mean_decoder_bitmeters > 0.0);
        assert!(a.mean_encoder_bitmeters > 0.0);

        let c = simulate(&coder, 0.1, 5_000, 43).unwrap();
        assert_ne!(a.ber.errors, c.ber.errors);
    }

    #[test]
    fn encoder_ensemble_exact_is_fixed_length() {
        let coder = hamming();
        let (ensemble, se) = encoder_ensemble(&coder, 0, 1).unwrap();
        assert_eq!(ensemble.entries().len(), 16);
        assert!(ensemble.fixed_length());
        assert!(se.is_none());
        // Fixed-length schedules: zero variance of bit-meters across inputs.
        let bms: Vec<f64> = ensemble
            .entries()
            .iter()
            .map(|(_, t)| bitmeters_of_trace(coder.encoder.circuit(), t).unwrap())
            .collect();
        assert!(bms.iter().all(|&b| b == bms[0]));
    }

    #[test]
    fn encoder_ensemble_samples_when_input_space_is_large() {
        // k = 17 overflows the exact-enumeration budget (2^16 inputs).
        let coder = PlacedCoder::new(&spec(
            Family::Repetition { k: 17, reps: 3 },
            10,
            PlacementStrategy::Grid,
        ))
        .unwrap();
        let (ensemble, se) = encoder_ensemble(&coder, 200, 9).unwrap();
        assert_eq!(ensemble.entries().len(), 200);
        // The schedule is input-independent, so the sampled standard
        // error of the mean bit-meters vanishes (up to accumulation dust).
        assert!(se.unwrap() < 1e-15);
    }

    #[test]
    fn medium_ldpc_round_trips_and_corrects_single_errors() {
        let coder = PlacedCoder::new(&spec(
            Family::GallagerB {
                n: 64,
                dv: 3,
                dc: 4,
                graph_seed: 5,
                max_iters: 30,
            },
            24,
            PlacementStrategy::Grid,
        ))
        .unwrap();
        let k = coder.params().k;
        assert!(k >= 16);
        let info: Vec<u8> = (0..k).map(|i| (i % 2) as u8).collect();
        let (cw, _) = coder.encode(&info).unwrap();
        assert_eq!(coder.decode(&cw).unwrap().info, info);
        for flip in [0, 17, 63] {
            let mut rx = cw.clone();
            rx[flip] ^= 1;
            let out = coder.decode(&rx).unwrap();
            assert_eq!(out.info, info, "flip at {flip}");
        }
    }

    #[test]
    fn coder_file_round_trip() {
        let text = "\
# ldpc demo
family gallager_b
n 16
graph_seed 7
substrate_side 10
lambda 1e-6
placement local_search
search_seed 3
search_budget 500
";
        let spec = parse_coder_file(text).unwrap();
        assert_eq!(spec.family.name(), "gallager_b");
        assert!(matches!(
            spec.placement,
            PlacementStrategy::LocalSearch {
                seed: 3,
                budget: 500
            }
        ));
        assert!(PlacedCoder::new(&spec).is_ok());

        let bad = parse_coder_file("family repetition\nplacement row\n");
        assert!(bad.is_err());
    }

    #[test]
    fn length_mismatch_is_reported() {
        let coder = rep3();
        assert!(matches!(
            coder.encode(&[1, 0]),
            Err(CodesError::LengthMismatch {
                expected: 1,
                got: 2
            })
        ));
        assert!(matches!(
            coder.decode(&[1, 0]),
            Err(CodesError::LengthMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn substrate_too_small_for_coder() {
        let err = PlacedCoder::new(&spec(
            Family::Repetition { k: 8, reps: 9 },
            2,
            PlacementStrategy::Grid,
        ));
        assert!(matches!(err, Err(CodesError::SubstrateTooSmall { .. })));
    }
}
