//! Syndrome extraction, two ways.
//!
//! The fast path maps Z errors straight to parity flips through cell
//! incidence. The faithful path models the detector data flow: raw
//! measurement bits arrive as 2D cross-sectional sheets, the parity of cell
//! (i,j,T) is the mod-2 sum of its six face bits
//!
//! ```text
//! P(i,j,T) = s(i,j,T-1) + s(i-1,j,T) + s(i,j-1,T) + s(i,j+1,T) + s(i+1,j,T) + s(i,j,T+1)
//! ```
//!
//! and the parity filter discards everything except the coordinates of
//! odd-parity cells.
//!
//! Detector layout: site (i,j) of sheet T holds the qubit at doubled
//! coordinate (i,j,T). Every mixed-parity site is a qubit (one odd
//! coordinate: primal face; two odd: dual face); all-even and all-odd sites
//! are cell centers and carry no data. This one table serves both classes
//! and is the single source of truth for index mapping.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::lattice::{
    all_qubits, bond_neighbors, incident_cells, Axis, BoundaryMode, CellClass, CellCoord,
    LatticeDims, LatticeError, QubitCoord,
};

/// Errors from the detector-stream path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreamError {
    /// Sheets must arrive with consecutive t and identical dimensions.
    Gap { expected: i64, got: i64 },
    ShapeMismatch { t: i64 },
    /// Stream synthesis is defined on periodic lattices only.
    OpenSynthesis,
    Lattice(LatticeError),
}

impl fmt::Display for StreamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamError::Gap { expected, got } => {
                write!(f, "sheet stream gap: expected t={expected}, got t={got}")
            }
            StreamError::ShapeMismatch { t } => {
                write!(f, "sheet t={t} has mismatched cross-section dimensions")
            }
            StreamError::OpenSynthesis => {
                write!(f, "detector stream synthesis requires periodic boundaries")
            }
            StreamError::Lattice(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for StreamError {}

impl From<LatticeError> for StreamError {
    fn from(e: LatticeError) -> Self {
        StreamError::Lattice(e)
    }
}

/// One cross-sectional sheet of raw detector bits, bit-packed row-major
/// with each row padded to a byte boundary (the same layout the TQCS file
/// format stores).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorSheet {
    pub t: i64,
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl DetectorSheet {
    pub fn zero(t: i64, width: u32, height: u32) -> Self {
        let stride = Self::stride_for(width);
        DetectorSheet { t, width, height, data: vec![0; stride * height as usize] }
    }

    /// A zero sheet shaped for the cross-section of `dims` (2lx × 2ly sites).
    pub fn for_dims(dims: LatticeDims, t: i64) -> Self {
        Self::zero(t, dims.extent(Axis::X) as u32, dims.extent(Axis::Y) as u32)
    }

    pub fn stride_for(width: u32) -> usize {
        (width as usize + 7) / 8
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn from_raw(t: i64, width: u32, height: u32, data: Vec<u8>) -> Option<Self> {
        if data.len() != Self::stride_for(width) * height as usize {
            return None;
        }
        Some(DetectorSheet { t, width, height, data })
    }

    fn index(&self, i: i64, j: i64) -> (usize, u8) {
        debug_assert!((0..self.width as i64).contains(&i) && (0..self.height as i64).contains(&j));
        let byte = j as usize * Self::stride_for(self.width) + (i as usize) / 8;
        (byte, 1u8 << (i % 8))
    }

    /// Bit at site (i,j). Bits within a byte are LSB-first.
    pub fn get(&self, i: i64, j: i64) -> u8 {
        let (byte, mask) = self.index(i, j);
        u8::from(self.data[byte] & mask != 0)
    }

    pub fn set(&mut self, i: i64, j: i64, bit: u8) {
        let (byte, mask) = self.index(i, j);
        if bit != 0 {
            self.data[byte] |= mask;
        } else {
            self.data[byte] &= !mask;
        }
    }

    pub fn toggle(&mut self, i: i64, j: i64) {
        let (byte, mask) = self.index(i, j);
        self.data[byte] ^= mask;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&b| b == 0)
    }

    /// Bit at a possibly out-of-range site: wraps on periodic axes, reads 0
    /// outside an open cross-section (a missing face cannot flip a parity).
    fn get_site(&self, i: i64, j: i64, periodic: bool) -> u8 {
        let (w, h) = (self.width as i64, self.height as i64);
        if periodic {
            self.get(i.rem_euclid(w), j.rem_euclid(h))
        } else if (0..w).contains(&i) && (0..h).contains(&j) {
            self.get(i, j)
        } else {
            0
        }
    }
}

/// The observed parity flips of one lattice class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeSet {
    pub class: CellClass,
    pub flips: BTreeSet<CellCoord>,
}

impl SyndromeSet {
    pub fn empty(class: CellClass) -> Self {
        SyndromeSet { class, flips: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.flips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }
}

/// Direct path: a cell flips iff an odd number of its six face qubits carry
/// a Z error.
pub fn syndrome_from_errors(
    z_errors: &BTreeSet<QubitCoord>,
    dims: LatticeDims,
    class: CellClass,
) -> Result<SyndromeSet, LatticeError> {
    let mut flips = BTreeSet::new();
    for &q in z_errors {
        for cell in incident_cells(q, dims, class)? {
            if !flips.remove(&cell) {
                flips.insert(cell);
            }
        }
    }
    Ok(SyndromeSet { class, flips })
}

/// Six-term parity of cell (i,j) given the sheets T−1, T, T+1 aligned to it.
/// Absent sheets (open or unbounded t boundary) contribute zero, as do
/// sites outside an open cross-section.
pub fn compute_parity(
    window: [Option<&DetectorSheet>; 3],
    i: i64,
    j: i64,
    dims: LatticeDims,
) -> u8 {
    let periodic = dims.is_periodic();
    let mut p = 0;
    if let Some(prev) = window[0] {
        p ^= prev.get_site(i, j, periodic);
    }
    if let Some(cur) = window[1] {
        p ^= cur.get_site(i - 1, j, periodic)
            ^ cur.get_site(i + 1, j, periodic)
            ^ cur.get_site(i, j - 1, periodic)
            ^ cur.get_site(i, j + 1, periodic);
    }
    if let Some(next) = window[2] {
        p ^= next.get_site(i, j, periodic);
    }
    p
}

fn synth_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    // Domain-separated from the noise sampler so a shared master seed does
    // not correlate gauge bits with error draws.
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x7371_6e74_6873_6565);
    rng.set_stream(stream);
    rng
}

/// Synthesize a t-periodic raw detector stream (2·lt sheets) whose cell
/// parities are all even in the error-free case, then flip the single bit
/// under each Z error.
///
/// The even-parity subspace is sampled uniformly: every qubit position `q`,
/// viewed as an edge of the opposite-class lattice, contributes (with
/// probability 1/2) a flip to its four bond-neighbor faces — each cell sees
/// an even number of those — plus one straight wrap-around face line per
/// class and axis for the cycles that edge flips cannot reach.
pub fn synthesize_detector_stream(
    z_errors: &BTreeSet<QubitCoord>,
    dims: LatticeDims,
    seed: u64,
) -> Result<Vec<DetectorSheet>, StreamError> {
    if dims.boundary != BoundaryMode::Periodic {
        return Err(StreamError::OpenSynthesis);
    }
    let lt2 = dims.extent(Axis::T);
    let mut sheets: Vec<DetectorSheet> =
        (0..lt2).map(|t| DetectorSheet::for_dims(dims, t)).collect();
    let flip = |q: QubitCoord, sheets: &mut Vec<DetectorSheet>| {
        let q = dims.canon_qubit(q);
        sheets[q.t as usize].toggle(q.x, q.y);
    };

    // Gauge bits: one per qubit position, grouped per sheet for a stable
    // stream discipline.
    let mut by_sheet: Vec<Vec<QubitCoord>> = vec![Vec::new(); lt2 as usize];
    for class in [CellClass::Primal, CellClass::Dual] {
        for q in all_qubits(dims, class) {
            by_sheet[q.t as usize].push(q);
        }
    }
    for (t, qubits) in by_sheet.iter_mut().enumerate() {
        qubits.sort();
        let mut rng = synth_rng(seed, t as u64);
        for &q in qubits.iter() {
            if rng.gen::<bool>() {
                for n in bond_neighbors(q) {
                    flip(n, &mut sheets);
                }
            }
        }
    }

    // Harmonic generators: a straight line of same-normal faces wrapping one
    // axis toggles every cell it passes through twice.
    let mut rng = synth_rng(seed, u64::MAX);
    for class in [CellClass::Primal, CellClass::Dual] {
        let off = match class {
            CellClass::Primal => 0i64,
            CellClass::Dual => 1,
        };
        for axis in [Axis::X, Axis::Y, Axis::T] {
            if !rng.gen::<bool>() {
                continue;
            }
            for k in 0..dims.len(axis) as i64 {
                let v = 2 * k + 1 - off; // odd for primal faces, even for dual
                let q = match axis {
                    Axis::X => QubitCoord::new(v, off, off),
                    Axis::Y => QubitCoord::new(off, v, off),
                    Axis::T => QubitCoord::new(off, off, v),
                };
                flip(q, &mut sheets);
            }
        }
    }

    for &q in z_errors {
        flip(q, &mut sheets);
    }
    Ok(sheets)
}

/// How the parity filter treats the ends of the t axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TMode {
    /// Finite volume; t wraps (Periodic) or truncates (Open) at finish().
    Bounded,
    /// Streaming: t is absolute and conceptually endless. Layers whose
    /// window never completes are not emitted.
    Unbounded,
}

/// Streaming parity-filter stage: consumes detector sheets in t order and
/// emits the coordinates of odd-parity cells, discarding everything else.
///
/// A cell layer is emitted as soon as its last contributing sheet (T+1)
/// arrives; flips within a layer come out in (y, x) order.
#[derive(Debug)]
pub struct ParityFilter {
    dims: LatticeDims,
    tmode: TMode,
    next_t: Option<i64>,
    window: Vec<DetectorSheet>, // at most the last 3 sheets
    head: Vec<DetectorSheet>,   // first two sheets, kept for periodic wrap
    finished: bool,
}

impl ParityFilter {
    /// Filter for a finite volume of 2·lt sheets; the t axis follows
    /// `dims.boundary`.
    pub fn bounded(dims: LatticeDims) -> Self {
        Self::new(dims, TMode::Bounded)
    }

    /// Filter for an endless sheet stream with absolute t.
    pub fn unbounded(dims: LatticeDims) -> Self {
        Self::new(dims, TMode::Unbounded)
    }

    fn new(dims: LatticeDims, tmode: TMode) -> Self {
        ParityFilter { dims, tmode, next_t: None, window: Vec::new(), head: Vec::new(), finished: false }
    }

    fn check_shape(&self, sheet: &DetectorSheet) -> Result<(), StreamError> {
        if sheet.width() as i64 != self.dims.extent(Axis::X)
            || sheet.height() as i64 != self.dims.extent(Axis::Y)
        {
            return Err(StreamError::ShapeMismatch { t: sheet.t });
        }
        Ok(())
    }

    /// Flips of cell layer `t_cell` from an explicit window.
    fn layer_flips(
        &self,
        window: [Option<&DetectorSheet>; 3],
        t_cell: i64,
    ) -> Vec<CellCoord> {
        let class = if t_cell.rem_euclid(2) == 0 { CellClass::Primal } else { CellClass::Dual };
        let parity = t_cell.rem_euclid(2);
        let t_canon = match self.tmode {
            TMode::Bounded => self.dims.canon(Axis::T, t_cell),
            TMode::Unbounded => t_cell,
        };
        let mut out = Vec::new();
        let mut j = parity;
        while j < self.dims.extent(Axis::Y) {
            let mut i = parity;
            while i < self.dims.extent(Axis::X) {
                if compute_parity(window, i, j, self.dims) != 0 {
                    out.push(CellCoord::new(i, j, t_canon, class));
                }
                i += 2;
            }
            j += 2;
        }
        out
    }

    /// Feed the next sheet; returns the flips whose windows it completed.
    pub fn push(&mut self, sheet: DetectorSheet) -> Result<Vec<CellCoord>, StreamError> {
        assert!(!self.finished, "push after finish");
        self.check_shape(&sheet)?;
        if let Some(expected) = self.next_t {
            if sheet.t != expected {
                return Err(StreamError::Gap { expected, got: sheet.t });
            }
        }
        self.next_t = Some(sheet.t + 1);
        if self.head.len() < 2 {
            self.head.push(sheet.clone());
        }
        self.window.push(sheet);
        if self.window.len() > 3 {
            self.window.remove(0);
        }
        if self.window.len() < 3 {
            return Ok(Vec::new());
        }
        let [a, b, c] = &self.window[..] else { unreachable!() };
        Ok(self.layer_flips([Some(a), Some(b), Some(c)], b.t))
    }

    /// Close the stream: under Bounded-Periodic the last and first layers
    /// complete their windows by wrapping onto the buffered head sheets;
    /// under Bounded-Open they complete with absent faces reading zero.
    /// Unbounded streams emit nothing further.
    pub fn finish(mut self) -> Result<Vec<CellCoord>, StreamError> {
        self.finished = true;
        if self.tmode == TMode::Unbounded {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let n = self.window.len();
        match self.dims.boundary {
            BoundaryMode::Periodic => {
                // Requires the full 2·lt sheets to have been pushed.
                if self.next_t != Some(self.dims.extent(Axis::T)) {
                    let expected = self.next_t.unwrap_or(0);
                    return Err(StreamError::Gap { expected, got: expected - 1 });
                }
                if n >= 2 && !self.head.is_empty() {
                    let (last2, last) = (&self.window[n - 2], &self.window[n - 1]);
                    out.extend(self.layer_flips(
                        [Some(last2), Some(last), Some(&self.head[0])],
                        last.t,
                    ));
                    if self.head.len() >= 2 {
                        out.extend(self.layer_flips(
                            [Some(last), Some(&self.head[0]), Some(&self.head[1])],
                            last.t + 1,
                        ));
                    }
                }
            }
            BoundaryMode::Open => {
                if n >= 2 {
                    let (last2, last) = (&self.window[n - 2], &self.window[n - 1]);
                    out.extend(self.layer_flips([Some(last2), Some(last), None], last.t));
                }
                if let [first, second] = &self.head[..] {
                    // Leading layer: sheet t−1 does not exist.
                    let mut lead =
                        self.layer_flips([None, Some(first), Some(second)], first.t);
                    lead.extend(out);
                    out = lead;
                }
            }
        }
        Ok(out)
    }
}

/// Run a whole finite volume of sheets through the filter and split the
/// flips by class.
pub fn parity_filter_volume(
    sheets: impl IntoIterator<Item = DetectorSheet>,
    dims: LatticeDims,
) -> Result<(SyndromeSet, SyndromeSet), StreamError> {
    let mut filter = ParityFilter::bounded(dims);
    let mut primal = SyndromeSet::empty(CellClass::Primal);
    let mut dual = SyndromeSet::empty(CellClass::Dual);
    let take = |cells: Vec<CellCoord>, primal: &mut SyndromeSet, dual: &mut SyndromeSet| {
        for c in cells {
            match c.class {
                CellClass::Primal => primal.flips.insert(c),
                CellClass::Dual => dual.flips.insert(c),
            };
        }
    };
    for sheet in sheets {
        take(filter.push(sheet)?, &mut primal, &mut dual);
    }
    take(filter.finish()?, &mut primal, &mut dual);
    Ok((primal, dual))
}
