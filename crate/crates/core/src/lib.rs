//! Core algorithms for simulating and decoding topological cluster-state
//! error correction: 3D lattice geometry in doubled coordinates, i.i.d.
//! Pauli noise, parity (syndrome) extraction from detector bit-streams, an
//! exact blossom matcher, and the batch/streaming decode pipeline.
//!
//! The crate is `no_std + alloc`; everything that touches files, clocks or
//! threads lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blossom;
pub mod lattice;
pub mod matching;
pub mod noise;
pub mod pipeline;
pub mod syndrome;

pub use lattice::{
    all_cells, all_qubits, bond_neighbors, boundary_distance, cell_distance,
    cell_distance_stream, face_qubits, incident_cells, Axis, BoundaryMode, CellClass, CellCoord,
    LatticeDims, LatticeError, QubitCoord,
};
pub use matching::{
    brute_force_matching, build_graph, min_weight_perfect, mwpm, MatchError, Matching,
    SyndromeGraph,
};
pub use noise::{reduce_to_z, sample_errors, ErrorPattern, NoiseChannel, NoiseError, Pauli};
pub use pipeline::{
    decode_batch, decode_stream, verify, CorrectionSet, DecodeOutcome, DecodeWindowConfig,
    PipelineError, StreamDecoder, VerifyReport,
};
pub use syndrome::{
    compute_parity, parity_filter_volume, syndrome_from_errors, synthesize_detector_stream,
    DetectorSheet, ParityFilter, StreamError, SyndromeSet,
};
