//! Simulation and analysis library for the information-friction model of
//! computation.
//!
//! A computation is a set of nodes placed on a square lattice substrate that
//! exchange binary messages over straight-line links. Its cost is measured in
//! *bit-meters*: the number of bits carried by each message times the
//! Euclidean distance between its endpoints, summed over all messages.
//! Multiplying bit-meters by a friction coefficient `mu` (joules per
//! bit-meter) gives the energy spent moving information.
//!
//! The crate provides:
//!
//! * [`geometry`] — substrates, lattices, circuits, and the segment/rectangle
//!   clipping needed to attribute partial links to subcircuit regions;
//! * [`computation`] — message traces and the bit-meters accounting engine;
//! * [`stencil`] — tilings of concentric inner/outer squares, best-origin
//!   coverage search, and the concentric-cut construction;
//! * [`channel`] — the hard-decision BI-AWGN/BSC/BEC channel family,
//!   information measures, and seeded Monte-Carlo block-error estimation;
//! * [`bounds`] — closed-form evaluators for the encoding/decoding/total
//!   energy lower bounds and the transmit-power optimizer;
//! * [`codes`] — concrete placed coders (repetition, Hamming(7,4),
//!   Gallager-B LDPC) that generate real message traces, so the bounds can
//!   be confronted with measured bit-meters and error rates.

pub mod bounds;
pub mod channel;
pub mod codes;
pub mod computation;
pub mod geometry;
pub mod stencil;
