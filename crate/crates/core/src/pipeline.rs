//! Four-stage decode pipeline: parity filtering, graph generation, matching,
//! and output processing (turning matched pairs into physical corrections),
//! in both whole-volume (batch) and sliding-window streaming form, plus
//! verification with logical-failure classification.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{
    nearest_boundary, Axis, CellClass, CellCoord, LatticeDims, LatticeError, QubitCoord, AXES,
};
use crate::matching::{build_graph, mwpm, MatchError, Matching, SyndromeGraph};
use crate::syndrome::{syndrome_from_errors, DetectorSheet, ParityFilter, StreamError, SyndromeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineError {
    Lattice(LatticeError),
    Match(MatchError),
    Stream(StreamError),
    /// A pending flip fell behind the committed front by more than the
    /// window allows; the stream must be re-decoded with a larger window.
    WindowOverflow {
        flip_t: i64,
        front_t: i64,
    },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Lattice(e) => write!(f, "{e}"),
            PipelineError::Match(e) => write!(f, "{e}"),
            PipelineError::Stream(e) => write!(f, "{e}"),
            PipelineError::WindowOverflow { flip_t, front_t } => write!(
                f,
                "flip at t={flip_t} outlived the decode window (front t={front_t}); increase --window"
            ),
        }
    }
}

impl core::error::Error for PipelineError {}

impl From<LatticeError> for PipelineError {
    fn from(e: LatticeError) -> Self {
        PipelineError::Lattice(e)
    }
}

impl From<MatchError> for PipelineError {
    fn from(e: MatchError) -> Self {
        PipelineError::Match(e)
    }
}

impl From<StreamError> for PipelineError {
    fn from(e: StreamError) -> Self {
        PipelineError::Stream(e)
    }
}

/// The Z-frame corrections for one lattice class: a mod-2 set of face
/// qubits whose accumulated parity flips cancel the matched syndrome.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorrectionSet {
    pub qubits: BTreeSet<QubitCoord>,
}

impl CorrectionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn toggle(&mut self, q: QubitCoord) {
        if !self.qubits.remove(&q) {
            self.qubits.insert(q);
        }
    }

    pub fn merge(&mut self, other: &CorrectionSet) {
        for &q in &other.qubits {
            self.toggle(q);
        }
    }
}

/// Sliding-window parameters for streaming decode. `window_sheets` bounds
/// how many detector sheets of history stay live; layers older than
/// `commit_lag` behind the newest complete layer are frozen and emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeWindowConfig {
    pub window_sheets: u32,
    pub commit_lag: u32,
}

impl Default for DecodeWindowConfig {
    fn default() -> Self {
        DecodeWindowConfig { window_sheets: 16, commit_lag: 8 }
    }
}

/// Walk from cell `a` to cell `b` along axis order x, then y, then t,
/// toggling the face qubit crossed by each cell step. On periodic axes the
/// shorter wrap direction is taken (ties go positive). `wrap_t` is false in
/// streaming mode, where t is absolute.
fn toggle_path(
    corr: &mut CorrectionSet,
    a: CellCoord,
    b: CellCoord,
    dims: LatticeDims,
    wrap_t: bool,
) {
    // t is canonicalized only in wrap_t mode: streaming coordinates are
    // absolute and must never fold back into the lattice extent.
    let canon_q = |q: QubitCoord| -> QubitCoord {
        let mut q = QubitCoord::new(dims.canon(Axis::X, q.x), dims.canon(Axis::Y, q.y), q.t);
        if wrap_t {
            q.t = dims.canon(Axis::T, q.t);
        }
        q
    };
    let mut pos = a;
    for axis in AXES {
        let len = dims.len(axis) as i64;
        let mut delta = (b.axis(axis) - pos.axis(axis)) / 2;
        if dims.is_periodic() && (axis != Axis::T || wrap_t) {
            delta = delta.rem_euclid(len);
            if delta > len - delta {
                delta -= len;
            }
        }
        let step = if delta >= 0 { 1 } else { -1 };
        for _ in 0..delta.abs() {
            // The face between consecutive cells sits at the midpoint.
            let q = QubitCoord::new(
                pos.x + if axis == Axis::X { step } else { 0 },
                pos.y + if axis == Axis::Y { step } else { 0 },
                pos.t + if axis == Axis::T { step } else { 0 },
            );
            corr.toggle(canon_q(q));
            pos = pos.with_axis(axis, pos.axis(axis) + 2 * step);
        }
        debug_assert_eq!(
            (pos.axis(axis) - b.axis(axis)).rem_euclid(2 * len),
            0,
            "axis leg must land on the target coordinate"
        );
        pos = pos.with_axis(axis, b.axis(axis));
    }
}

/// Walk from a cell straight out through its nearest open surface.
fn toggle_boundary_path(corr: &mut CorrectionSet, c: CellCoord, dims: LatticeDims) {
    let (axis, dir, dist) = nearest_boundary(c, dims);
    let mut pos = c;
    for _ in 0..dist {
        let q = QubitCoord::new(
            pos.x + if axis == Axis::X { dir } else { 0 },
            pos.y + if axis == Axis::Y { dir } else { 0 },
            pos.t + if axis == Axis::T { dir } else { 0 },
        );
        corr.toggle(q);
        pos = pos.with_axis(axis, pos.axis(axis) + 2 * dir);
    }
}

/// Output processing: convert matched pairs into a physical correction by
/// laying a shortest error chain between each pair (or from a flip to its
/// boundary). Paths are axis-ordered (x, then y, then t) so the output is a
/// pure function of the matching.
pub fn corrections_from_matching(
    m: &Matching,
    g: &SyndromeGraph,
    dims: LatticeDims,
) -> CorrectionSet {
    let mut corr = CorrectionSet::new();
    for &(u, v) in &m.pairs {
        match (g.cell_of(u), g.cell_of(v)) {
            (Some(a), Some(b)) => toggle_path(&mut corr, a, b, dims, true),
            (Some(c), None) | (None, Some(c)) => toggle_boundary_path(&mut corr, c, dims),
            (None, None) => {}
        }
    }
    corr
}

/// Whether a correction chain, together with the original error, wraps the
/// torus: counts mod 2 the crossings of one fixed transverse plane per axis.
/// For the plane normal to `axis`, the crossing faces are the `axis`-oriented
/// faces at axis-coordinate 1 (primal) or 0 (dual... derived from class).
fn wrap_parities(qubits: &BTreeSet<QubitCoord>, class: CellClass, dims: LatticeDims) -> [bool; 3] {
    // Primal cells sit at even coordinates, so primal axis-oriented faces
    // have odd coordinate along the axis; the first plane is at 1. Dual
    // faces have even coordinate along the axis; first plane at 0.
    let plane = match class {
        CellClass::Primal => 1,
        CellClass::Dual => 0,
    };
    let mut out = [false; 3];
    for (k, &axis) in AXES.iter().enumerate() {
        let mut crossings = 0u64;
        for &q in qubits {
            if q.orientation() == Some(axis) && dims.canon(axis, q.axis(axis)) == plane {
                crossings += 1;
            }
        }
        out[k] = crossings % 2 == 1;
    }
    out
}

/// Result of verifying one class: the corrected pattern must be
/// syndrome-free, and any leftover closed chain is classified as harmless
/// (contractible) or a logical failure (wraps the torus).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub class: CellClass,
    pub residual_syndrome_empty: bool,
    /// Mod-2 wrap counts of error △ correction around the x, y, t cycles.
    pub wrap: [bool; 3],
}

impl VerifyReport {
    /// A logical failure: the combined chain winds around some cycle.
    pub fn logical_failure(&self) -> bool {
        self.wrap.iter().any(|&w| w)
    }

    pub fn success(&self) -> bool {
        self.residual_syndrome_empty && !self.logical_failure()
    }
}

/// Apply a correction to the reduced Z errors of one class and verify it.
/// Wrap classification is meaningful under Periodic boundaries only; Open
/// mode reports wrap = [false; 3] (no nontrivial cycles).
pub fn verify(
    z_errors: &BTreeSet<QubitCoord>,
    correction: &CorrectionSet,
    class: CellClass,
    dims: LatticeDims,
) -> Result<VerifyReport, LatticeError> {
    let mut residual: BTreeSet<QubitCoord> = z_errors.clone();
    for &q in &correction.qubits {
        if !residual.remove(&q) {
            residual.insert(q);
        }
    }
    let syndrome = syndrome_from_errors(&residual, dims, class)?;
    let wrap = if dims.is_periodic() { wrap_parities(&residual, class, dims) } else { [false; 3] };
    Ok(VerifyReport { class, residual_syndrome_empty: syndrome.is_empty(), wrap })
}

/// Both classes' corrections for one decoded volume.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub primal: CorrectionSet,
    pub dual: CorrectionSet,
}

/// Batch pipeline over an in-memory error pattern: reduce to Z, extract
/// syndromes, build graphs, match, and emit corrections — independently for
/// the primal and dual lattices.
pub fn decode_batch(
    pattern: &crate::noise::ErrorPattern,
    dims: LatticeDims,
) -> Result<DecodeOutcome, PipelineError> {
    let (primal_z, dual_z) = crate::noise::reduce_to_z(pattern, dims);
    Ok(DecodeOutcome {
        primal: decode_class(&primal_z, CellClass::Primal, dims)?,
        dual: decode_class(&dual_z, CellClass::Dual, dims)?,
    })
}

/// Decode the reduced Z errors of one class.
pub fn decode_class(
    z_errors: &BTreeSet<QubitCoord>,
    class: CellClass,
    dims: LatticeDims,
) -> Result<CorrectionSet, PipelineError> {
    let syndrome = syndrome_from_errors(z_errors, dims, class)?;
    decode_syndrome(&syndrome, dims)
}

/// Decode an already-extracted syndrome.
pub fn decode_syndrome(
    syndrome: &SyndromeSet,
    dims: LatticeDims,
) -> Result<CorrectionSet, PipelineError> {
    let graph = build_graph(syndrome.flips.iter().copied(), syndrome.class, dims);
    let matching = mwpm(&graph)?;
    Ok(corrections_from_matching(&matching, &graph, dims))
}

/// One committed layer of streaming output: the correction qubits whose
/// sheet index is `t`, final and immutable once emitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommittedLayer {
    pub t: i64,
    pub class: CellClass,
    pub qubits: Vec<QubitCoord>,
}

/// Sliding-window streaming decoder for one lattice class.
///
/// Detector sheets enter one at a time; parity filtering produces flips with
/// absolute t. Each arrival rematches the live flips, pairing a flip either
/// with another live flip or with the advancing frontier (cost = cell steps
/// to the newest complete layer, where its partner may still appear). A pair
/// is committed once both flips are at least `commit_lag` layers behind the
/// front; committed pairs' correction paths are emitted layer by layer in
/// increasing t. A flip that is still frontier-matched when it falls
/// `window_sheets` behind the front is a window overflow (backpressure).
pub struct StreamDecoder {
    dims: LatticeDims,
    class: CellClass,
    config: DecodeWindowConfig,
    filter: ParityFilter,
    /// Flips not yet part of a committed pair, in arrival order.
    pending: Vec<CellCoord>,
    /// Corrections accumulated from committed pairs, keyed by sheet t.
    staged: alloc::collections::BTreeMap<i64, BTreeSet<QubitCoord>>,
    /// Sheets up to and including this t have been emitted.
    emitted_t: i64,
    /// Newest cell layer (cell t coordinate) whose parity is known.
    front: Option<i64>,
}

impl StreamDecoder {
    /// Streaming over an unbounded live feed (t never wraps).
    pub fn new(dims: LatticeDims, class: CellClass, config: DecodeWindowConfig) -> Self {
        StreamDecoder {
            dims,
            class,
            config,
            filter: ParityFilter::unbounded(dims),
            pending: Vec::new(),
            staged: alloc::collections::BTreeMap::new(),
            emitted_t: -1,
            front: None,
        }
    }

    /// Push one detector sheet; returns any newly committed output layers.
    pub fn push(&mut self, sheet: DetectorSheet) -> Result<Vec<CommittedLayer>, PipelineError> {
        let t = sheet.t;
        let flips = self.filter.push(sheet)?;
        // Sheet t completes cell layer t-1.
        if t >= 1 {
            self.front = Some(t - 1);
        }
        for f in flips {
            if f.class == self.class {
                self.pending.push(f);
            }
        }
        self.step()
    }

    /// Rematch live flips against each other and the frontier, commit pairs
    /// that can no longer change, and emit any fully-settled layers.
    fn step(&mut self) -> Result<Vec<CommittedLayer>, PipelineError> {
        let Some(front) = self.front else { return Ok(Vec::new()) };
        let commit_before = front - 2 * self.config.commit_lag as i64;
        let overflow_before = front - 2 * self.config.window_sheets as i64;

        if !self.pending.is_empty() {
            // Graph: pending flips 0..n plus one frontier pseudo-vertex per
            // flip at n+i, cost = cell steps from the flip to the frontier
            // (a partner for it may still arrive from the future).
            let n = self.pending.len();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let w = crate::lattice::cell_distance_stream(
                        self.pending[u],
                        self.pending[v],
                        self.dims,
                    )?;
                    edges.push((u, v, w));
                }
            }
            for (u, &c) in self.pending.iter().enumerate() {
                let to_front = ((front - c.t).max(0) as u64) / 2 + 1;
                edges.push((u, n + u, to_front));
            }
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((n + u, n + v, 0));
                }
            }
            let (mate, _) = crate::matching::min_weight_perfect(2 * n, &edges)
                .expect("frontier construction is always feasible");

            // Commit pairs whose both flips are behind the commit horizon;
            // their matching can no longer be improved by future flips.
            let mut committed = alloc::vec![false; n];
            for u in 0..n {
                let v = mate[u];
                if v < n && u < v {
                    let (a, b) = (self.pending[u], self.pending[v]);
                    if a.t <= commit_before && b.t <= commit_before {
                        let mut corr = CorrectionSet::new();
                        toggle_path(&mut corr, a, b, self.dims, false);
                        for q in corr.qubits {
                            let slot = self.staged.entry(q.t).or_default();
                            if !slot.remove(&q) {
                                slot.insert(q);
                            }
                        }
                        committed[u] = true;
                        committed[v] = true;
                    }
                }
                // A frontier-matched flip too old for the window can never
                // be committed: backpressure.
                if v >= n && self.pending[u].t < overflow_before {
                    return Err(PipelineError::WindowOverflow {
                        flip_t: self.pending[u].t,
                        front_t: front,
                    });
                }
            }
            let mut keep = Vec::with_capacity(n);
            for (u, &c) in self.pending.iter().enumerate() {
                if !committed[u] {
                    keep.push(c);
                }
            }
            self.pending = keep;
        }

        // Emit layers that no live flip (nor future correction) can touch:
        // all correction qubits of a committed pair have t ≥ the pair's
        // earliest flip, so layers before every pending flip and before the
        // commit horizon are final.
        let mut safe_t = commit_before - 1;
        for &c in &self.pending {
            safe_t = safe_t.min(c.t - 1);
        }
        let mut out = Vec::new();
        while self.emitted_t < safe_t {
            self.emitted_t += 1;
            let t = self.emitted_t;
            let qubits: Vec<QubitCoord> =
                self.staged.remove(&t).map(|s| s.into_iter().collect()).unwrap_or_default();
            out.push(CommittedLayer { t, class: self.class, qubits });
        }
        Ok(out)
    }

    /// End of stream: match all remaining flips pairwise (no frontier — no
    /// more sheets are coming) and flush every remaining layer.
    pub fn finish(mut self) -> Result<Vec<CommittedLayer>, PipelineError> {
        let tail_flips = core::mem::replace(&mut self.filter, ParityFilter::unbounded(self.dims))
            .finish()?;
        for f in tail_flips {
            if f.class == self.class {
                self.pending.push(f);
            }
        }
        if !self.pending.is_empty() {
            let n = self.pending.len();
            if n % 2 != 0 {
                return Err(PipelineError::Match(MatchError::OddVertexCount(n)));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let w = crate::lattice::cell_distance_stream(
                        self.pending[u],
                        self.pending[v],
                        self.dims,
                    )?;
                    edges.push((u, v, w));
                }
            }
            let (mate, _) = crate::matching::min_weight_perfect(n, &edges)
                .ok_or(PipelineError::Match(MatchError::OddVertexCount(n)))?;
            for u in 0..n {
                let v = mate[u];
                if u < v {
                    let mut corr = CorrectionSet::new();
                    toggle_path(&mut corr, self.pending[u], self.pending[v], self.dims, false);
                    for q in corr.qubits {
                        let slot = self.staged.entry(q.t).or_default();
                        if !slot.remove(&q) {
                            slot.insert(q);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        let last = self.staged.keys().next_back().copied().unwrap_or(self.emitted_t);
        while self.emitted_t < last {
            self.emitted_t += 1;
            let t = self.emitted_t;
            let qubits: Vec<QubitCoord> =
                self.staged.remove(&t).map(|s| s.into_iter().collect()).unwrap_or_default();
            out.push(CommittedLayer { t, class: self.class, qubits });
        }
        Ok(out)
    }
}

/// Drive a [`StreamDecoder`] over a complete sheet sequence and collect the
/// full correction set (the streaming counterpart of one class of
/// [`decode_batch`]).
pub fn decode_stream(
    sheets: impl IntoIterator<Item = DetectorSheet>,
    dims: LatticeDims,
    class: CellClass,
    config: DecodeWindowConfig,
) -> Result<CorrectionSet, PipelineError> {
    let mut dec = StreamDecoder::new(dims, class, config);
    let mut corr = CorrectionSet::new();
    let absorb = |layers: Vec<CommittedLayer>, corr: &mut CorrectionSet| {
        for layer in layers {
            for q in layer.qubits {
                corr.toggle(q);
            }
        }
    };
    for sheet in sheets {
        let layers = dec.push(sheet)?;
        absorb(layers, &mut corr);
    }
    let layers = dec.finish()?;
    absorb(layers, &mut corr);
    Ok(corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{reduce_to_z, sample_errors, ErrorPattern, NoiseChannel, Pauli};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn pd(l: u32) -> LatticeDims {
        LatticeDims::periodic(l, l, l).unwrap()
    }

    #[test]
    fn single_z_error_corrected_exactly() {
        let dims = pd(4);
        let q = QubitCoord::new(1, 2, 2);
        let pat = ErrorPattern::from_entries([(q, Pauli::Z)]);
        let out = decode_batch(&pat, dims).unwrap();
        assert_eq!(out.primal.qubits.iter().copied().collect::<Vec<_>>(), [q]);
        assert!(out.dual.qubits.is_empty());
    }

    #[test]
    fn empty_pattern_empty_correction() {
        let out = decode_batch(&ErrorPattern::new(), pd(4)).unwrap();
        assert!(out.primal.qubits.is_empty() && out.dual.qubits.is_empty());
    }

    #[test]
    fn residual_always_clears() {
        let dims = pd(5);
        for seed in 0..40 {
            let ch = NoiseChannel::symmetric(0.02).unwrap();
            let pat = sample_errors(dims, &ch, seed).unwrap();
            let (pz, dz) = reduce_to_z(&pat, dims);
            let out = decode_batch(&pat, dims).unwrap();
            for (z, corr, class) in [
                (&pz, &out.primal, CellClass::Primal),
                (&dz, &out.dual, CellClass::Dual),
            ] {
                let rep = verify(z, corr, class, dims).unwrap();
                assert!(rep.residual_syndrome_empty, "seed {seed} class {class}");
            }
        }
    }

    #[test]
    fn contractible_loop_is_not_a_failure() {
        // Four faces around one unit square form a closed, contractible
        // chain: no syndrome, no wrap, success even with an empty correction.
        let dims = pd(4);
        let z: BTreeSet<_> = [
            QubitCoord::new(1, 0, 0),
            QubitCoord::new(2, 1, 0),
            QubitCoord::new(1, 2, 0),
            QubitCoord::new(0, 1, 0),
        ]
        .into_iter()
        .collect();
        let rep = verify(&z, &CorrectionSet::new(), CellClass::Primal, dims).unwrap();
        assert!(rep.residual_syndrome_empty);
        assert!(!rep.logical_failure());
    }

    #[test]
    fn wrapping_chain_is_a_logical_failure() {
        // A straight chain of x-oriented primal faces all the way around
        // the x cycle: syndrome-free but wraps once.
        let dims = pd(4);
        let z: BTreeSet<_> = (0..4).map(|k| QubitCoord::new(2 * k + 1, 0, 0)).collect();
        let rep = verify(&z, &CorrectionSet::new(), CellClass::Primal, dims).unwrap();
        assert!(rep.residual_syndrome_empty);
        assert_eq!(rep.wrap, [true, false, false]);
        assert!(rep.logical_failure());
    }

    #[test]
    fn half_wrap_error_may_be_mismatched_but_is_detected() {
        // A chain half-way around: decoder may close it the short way
        // (success) — with exactly half the cycle both routes tie; whatever
        // happens, the residual syndrome must clear and wrap parity is
        // well-defined.
        let dims = pd(4);
        let z: BTreeSet<_> = (0..2).map(|k| QubitCoord::new(2 * k + 1, 0, 0)).collect();
        let corr = decode_class(&z, CellClass::Primal, dims).unwrap();
        let rep = verify(&z, &corr, CellClass::Primal, dims).unwrap();
        assert!(rep.residual_syndrome_empty);
    }

    #[test]
    fn two_separated_errors_matched_pairwise() {
        let dims = pd(6);
        // Two parallel single-qubit errors far apart: each yields 2 flips
        // distance 1 apart; matching must pair within each error, not across.
        let a = QubitCoord::new(1, 0, 0);
        let b = QubitCoord::new(1, 8, 6);
        let z: BTreeSet<_> = [a, b].into_iter().collect();
        let corr = decode_class(&z, CellClass::Primal, dims).unwrap();
        assert_eq!(corr.qubits, z);
    }

    #[test]
    fn path_endpoints_flip_matched_cells_only() {
        let dims = pd(6);
        let mut corr = CorrectionSet::new();
        let a = CellCoord::new(0, 0, 0, CellClass::Primal);
        let b = CellCoord::new(4, 6, 2, CellClass::Primal);
        toggle_path(&mut corr, a, b, dims, true);
        let syn = syndrome_from_errors(&corr.qubits, dims, CellClass::Primal).unwrap();
        assert_eq!(syn.flips, [a, b].into_iter().collect());
    }

    #[test]
    fn path_takes_shorter_wrap() {
        let dims = pd(4);
        let mut corr = CorrectionSet::new();
        let a = CellCoord::new(0, 0, 0, CellClass::Primal);
        let b = CellCoord::new(6, 0, 0, CellClass::Primal);
        toggle_path(&mut corr, a, b, dims, true);
        assert_eq!(corr.qubits.len(), 1, "wrap distance is 1: {:?}", corr.qubits);
        assert_eq!(corr.qubits.iter().next().unwrap(), &QubitCoord::new(7, 0, 0));
    }

    #[test]
    fn open_mode_decodes_and_verifies() {
        let dims = LatticeDims::open(4, 4, 4).unwrap();
        for seed in 0..20 {
            let ch = NoiseChannel::pure_z(0.03).unwrap();
            let pat = sample_errors(dims, &ch, seed).unwrap();
            let (pz, dz) = reduce_to_z(&pat, dims);
            let out = decode_batch(&pat, dims).unwrap();
            assert!(verify(&pz, &out.primal, CellClass::Primal, dims).unwrap().success());
            assert!(verify(&dz, &out.dual, CellClass::Dual, dims).unwrap().success());
        }
    }

    #[test]
    fn boundary_path_clears_a_corner_flip() {
        let dims = LatticeDims::open(4, 4, 4).unwrap();
        let mut corr = CorrectionSet::new();
        toggle_boundary_path(&mut corr, CellCoord::new(0, 0, 0, CellClass::Primal), dims);
        assert_eq!(corr.qubits.len(), 1);
        // The lone syndrome of that path inside the lattice is the corner cell.
        let syn = syndrome_from_errors(&corr.qubits, dims, CellClass::Primal).unwrap();
        assert_eq!(syn.flips.len(), 1);
    }

    fn stream_sheets(
        z: &BTreeSet<QubitCoord>,
        dims: LatticeDims,
        class: CellClass,
        extra_sheets: i64,
    ) -> Vec<DetectorSheet> {
        // Finite bounded-open stream: raw measurement sheets s(i,j,t) = the
        // Z-error indicator, extended with quiet sheets so every flip
        // commits before the end.
        let tmax = 2 * dims.len(Axis::T) as i64 + extra_sheets;
        let _ = class;
        (0..tmax)
            .map(|t| {
                let mut sheet = DetectorSheet::for_dims(dims, t);
                for &q in z {
                    if q.t == t {
                        sheet.toggle(q.x, q.y);
                    }
                }
                sheet
            })
            .collect()
    }

    #[test]
    fn streaming_matches_batch_on_sparse_patterns() {
        // Errors kept in a central t-band and isolated (inter-error flip
        // distance ≥ 3), so the globally optimal matching is unique and
        // local and commits inside the window — the regime where streaming
        // must agree with flat decoding exactly.
        let dims = pd(4);
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let flips_of = |q: QubitCoord| {
            [CellCoord::new(q.x - 1, q.y, q.t, CellClass::Primal),
             CellCoord::new(q.x + 1, q.y, q.t, CellClass::Primal)]
            .map(|c| dims.canon_cell(c))
        };
        for _ in 0..25 {
            let mut z: BTreeSet<QubitCoord> = BTreeSet::new();
            for _ in 0..rng.gen_range(0..3) {
                // x-oriented primal faces at t in [2, 5]
                let q = QubitCoord::new(
                    2 * rng.gen_range(0..4) + 1,
                    2 * rng.gen_range(0..4),
                    2 * rng.gen_range(1..3),
                );
                let isolated = z.iter().all(|&e| {
                    flips_of(e).iter().all(|&a| {
                        flips_of(q).iter().all(|&b| {
                            crate::lattice::cell_distance_stream(a, b, dims).unwrap() >= 3
                        })
                    })
                });
                if isolated {
                    z.insert(q);
                }
            }
            let sheets = stream_sheets(&z, dims, CellClass::Primal, 40);
            let streamed =
                decode_stream(sheets, dims, CellClass::Primal, DecodeWindowConfig::default())
                    .unwrap();
            // Reference: flat matching of the same flips with unwrapped t.
            let syn = syndrome_from_errors(&z, dims, CellClass::Primal).unwrap();
            let n = syn.flips.len();
            let flips: Vec<_> = syn.flips.iter().copied().collect();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((
                        u,
                        v,
                        crate::lattice::cell_distance_stream(flips[u], flips[v], dims).unwrap(),
                    ));
                }
            }
            let (mate, _) = crate::matching::min_weight_perfect(n, &edges).unwrap();
            let mut reference = CorrectionSet::new();
            for u in 0..n {
                if u < mate[u] {
                    toggle_path(&mut reference, flips[u], flips[mate[u]], dims, false);
                }
            }
            assert_eq!(streamed, reference, "z = {z:?}");
            // And the streamed correction clears the syndrome.
            let rep = verify(&z, &streamed, CellClass::Primal, dims).unwrap();
            assert!(rep.residual_syndrome_empty);
        }
    }

    #[test]
    fn stream_layers_emitted_in_order_and_immutable() {
        let dims = pd(4);
        let z: BTreeSet<_> = [QubitCoord::new(1, 0, 4)].into_iter().collect();
        let sheets = stream_sheets(&z, dims, CellClass::Primal, 40);
        let mut dec =
            StreamDecoder::new(dims, CellClass::Primal, DecodeWindowConfig::default());
        let mut last_t = -1;
        let mut all = Vec::new();
        for sheet in sheets {
            for layer in dec.push(sheet).unwrap() {
                assert_eq!(layer.t, last_t + 1, "layers arrive consecutively");
                last_t = layer.t;
                all.push(layer);
            }
        }
        for layer in dec.finish().unwrap() {
            assert_eq!(layer.t, last_t + 1);
            last_t = layer.t;
            all.push(layer);
        }
        let total: usize = all.iter().map(|l| l.qubits.len()).sum();
        assert_eq!(total, 1, "the single error corrects itself: {all:?}");
    }

    #[test]
    fn window_overflow_reports_backpressure() {
        // One lone flip pair separated further in t than the window: the
        // early flip stays frontier-matched until it falls out.
        let dims = LatticeDims::periodic(4, 4, 40).unwrap();
        let z: BTreeSet<_> =
            (0..15).map(|k| QubitCoord::new(1, 0, 2 + 4 * k)).collect();
        // A comb of errors keeps flips alive across a long t range; with a
        // tiny window the decoder must refuse rather than guess.
        let sheets = stream_sheets(&z, dims, CellClass::Primal, 40);
        let config = DecodeWindowConfig { window_sheets: 3, commit_lag: 1 };
        let result = decode_stream(sheets, dims, CellClass::Primal, config);
        match result {
            Err(PipelineError::WindowOverflow { .. }) => {}
            Ok(corr) => {
                // Acceptable alternative: everything committed locally.
                let rep = verify(&z, &corr, CellClass::Primal, dims).unwrap();
                assert!(rep.residual_syndrome_empty);
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
