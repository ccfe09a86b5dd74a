//! Geometry of the 3D topological cluster lattice.
//!
//! Everything lives in *doubled* integer coordinates. Unit-cell centers of
//! the primal lattice sit at all-even coordinates, dual cell centers at
//! all-odd coordinates, and physical qubits at mixed-parity positions: a
//! qubit coordinate has exactly one axis whose parity differs from the
//! other two. That axis is the face normal, and incidence between qubits
//! and cells reduces to a parity check plus a unit offset.
//!
//! A primal face qubit (one odd coordinate) is simultaneously an edge
//! position of the dual lattice, and vice versa; the two lattices are
//! self-similar copies offset by (1,1,1).

use alloc::vec::Vec;
use core::fmt;

/// Which of the two interleaved lattices a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellClass {
    Primal,
    Dual,
}

impl CellClass {
    pub fn opposite(self) -> CellClass {
        match self {
            CellClass::Primal => CellClass::Dual,
            CellClass::Dual => CellClass::Primal,
        }
    }
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellClass::Primal => write!(f, "primal"),
            CellClass::Dual => write!(f, "dual"),
        }
    }
}

/// Boundary convention for the x and y axes (and for the t axis in batch
/// mode). Periodic wraps coordinates; Open truncates incidence at the
/// lattice surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    Periodic,
    Open,
}

/// Lattice axes. The third axis doubles as simulated time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    T,
}

pub const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::T];

/// Errors from geometry queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeError {
    /// Cell counts must all be at least 1.
    InvalidDims,
    /// The queried coordinate is not a face qubit of the given class.
    NotAFace(QubitCoord, CellClass),
    /// Operands belong to different cell classes.
    ClassMismatch,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::InvalidDims => write!(f, "lattice dimensions must be >= 1"),
            LatticeError::NotAFace(q, c) => {
                write!(f, "({}, {}, {}) is not a {} face qubit", q.x, q.y, q.t, c)
            }
            LatticeError::ClassMismatch => write!(f, "cell class mismatch"),
        }
    }
}

impl core::error::Error for LatticeError {}

/// Cell counts per axis plus the boundary convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeDims {
    pub lx: u32,
    pub ly: u32,
    pub lt: u32,
    pub boundary: BoundaryMode,
}

impl LatticeDims {
    pub fn new(lx: u32, ly: u32, lt: u32, boundary: BoundaryMode) -> Result<Self, LatticeError> {
        if lx == 0 || ly == 0 || lt == 0 {
            return Err(LatticeError::InvalidDims);
        }
        Ok(LatticeDims { lx, ly, lt, boundary })
    }

    pub fn periodic(lx: u32, ly: u32, lt: u32) -> Result<Self, LatticeError> {
        Self::new(lx, ly, lt, BoundaryMode::Periodic)
    }

    pub fn open(lx: u32, ly: u32, lt: u32) -> Result<Self, LatticeError> {
        Self::new(lx, ly, lt, BoundaryMode::Open)
    }

    /// Cell count along one axis.
    pub fn len(&self, axis: Axis) -> u32 {
        match axis {
            Axis::X => self.lx,
            Axis::Y => self.ly,
            Axis::T => self.lt,
        }
    }

    /// Doubled-coordinate extent along one axis (2·cell count).
    pub fn extent(&self, axis: Axis) -> i64 {
        2 * self.len(axis) as i64
    }

    pub fn cell_count(&self) -> u64 {
        self.lx as u64 * self.ly as u64 * self.lt as u64
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == BoundaryMode::Periodic
    }

    /// Reduce a doubled coordinate into the canonical range of one axis.
    /// Identity under Open boundaries.
    pub fn canon(&self, axis: Axis, v: i64) -> i64 {
        match self.boundary {
            BoundaryMode::Periodic => v.rem_euclid(self.extent(axis)),
            BoundaryMode::Open => v,
        }
    }

    pub fn canon_cell(&self, c: CellCoord) -> CellCoord {
        CellCoord {
            x: self.canon(Axis::X, c.x),
            y: self.canon(Axis::Y, c.y),
            t: self.canon(Axis::T, c.t),
            class: c.class,
        }
    }

    pub fn canon_qubit(&self, q: QubitCoord) -> QubitCoord {
        QubitCoord {
            x: self.canon(Axis::X, q.x),
            y: self.canon(Axis::Y, q.y),
            t: self.canon(Axis::T, q.t),
        }
    }

    /// Whether a cell center lies inside the lattice volume.
    pub fn contains_cell(&self, c: CellCoord) -> bool {
        let lo = match c.class {
            CellClass::Primal => 0,
            CellClass::Dual => 1,
        };
        [(c.x, Axis::X), (c.y, Axis::Y), (c.t, Axis::T)]
            .iter()
            .all(|&(v, a)| match self.boundary {
                BoundaryMode::Periodic => (0..self.extent(a)).contains(&v),
                BoundaryMode::Open => v >= lo && v <= self.extent(a) - 2 + lo,
            })
    }

    /// Whether a coordinate is a face qubit present in the lattice.
    /// Under Open boundaries this includes the surface faces that belong
    /// to a single cell.
    pub fn contains_qubit(&self, q: QubitCoord) -> bool {
        let Some(class) = q.face_class() else {
            return false;
        };
        match self.boundary {
            BoundaryMode::Periodic => [(q.x, Axis::X), (q.y, Axis::Y), (q.t, Axis::T)]
                .iter()
                .all(|&(v, a)| (0..self.extent(a)).contains(&v)),
            BoundaryMode::Open => {
                // A face exists iff at least one of its two candidate cells does.
                incident_cells(q, *self, class).map(|cs| !cs.is_empty()).unwrap_or(false)
            }
        }
    }
}

/// Center of a primal or dual unit cell, in doubled coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellCoord {
    pub x: i64,
    pub y: i64,
    pub t: i64,
    pub class: CellClass,
}

impl CellCoord {
    pub fn new(x: i64, y: i64, t: i64, class: CellClass) -> Self {
        CellCoord { x, y, t, class }
    }

    pub fn axis(&self, axis: Axis) -> i64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::T => self.t,
        }
    }

    pub fn with_axis(mut self, axis: Axis, v: i64) -> Self {
        match axis {
            Axis::X => self.x = v,
            Axis::Y => self.y = v,
            Axis::T => self.t = v,
        }
        self
    }
}

// Deterministic orderings everywhere follow (t, y, x): the order in which a
// streamed lattice produces its data.
impl Ord for CellCoord {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.t, self.y, self.x, self.class).cmp(&(other.t, other.y, other.x, other.class))
    }
}

impl PartialOrd for CellCoord {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A physical qubit position: a face center of one class, an edge center of
/// the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QubitCoord {
    pub x: i64,
    pub y: i64,
    pub t: i64,
}

impl QubitCoord {
    pub fn new(x: i64, y: i64, t: i64) -> Self {
        QubitCoord { x, y, t }
    }

    pub fn axis(&self, axis: Axis) -> i64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::T => self.t,
        }
    }

    /// The class whose cells this coordinate is a face of, determined by
    /// parity: one odd coordinate means a primal face, two odd a dual face.
    /// Cell centers (zero or three odd) are not qubits.
    pub fn face_class(&self) -> Option<CellClass> {
        match (self.x & 1) + (self.y & 1) + (self.t & 1) {
            1 => Some(CellClass::Primal),
            2 => Some(CellClass::Dual),
            _ => None,
        }
    }

    /// The face normal: the single axis whose parity differs from the other
    /// two.
    pub fn orientation(&self) -> Option<Axis> {
        let p = [self.x & 1, self.y & 1, self.t & 1];
        let odd = p.iter().sum::<i64>();
        let target = match odd {
            1 => 1, // primal: the odd axis
            2 => 0, // dual: the even axis
            _ => return None,
        };
        AXES.iter().copied().find(|&a| p[a as usize] == target)
    }
}

impl Ord for QubitCoord {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.t, self.y, self.x).cmp(&(other.t, other.y, other.x))
    }
}

impl PartialOrd for QubitCoord {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All cell centers of one class, ordered lexicographically by (t, y, x).
pub fn all_cells(dims: LatticeDims, class: CellClass) -> Vec<CellCoord> {
    let off = match class {
        CellClass::Primal => 0,
        CellClass::Dual => 1,
    };
    let mut out = Vec::with_capacity(dims.cell_count() as usize);
    for t in 0..dims.lt as i64 {
        for y in 0..dims.ly as i64 {
            for x in 0..dims.lx as i64 {
                out.push(CellCoord::new(2 * x + off, 2 * y + off, 2 * t + off, class));
            }
        }
    }
    out
}

/// The six face qubits of a cell, as raw (uncanonicalized) offsets in the
/// fixed order (−x, +x, −y, +y, −t, +t).
pub fn face_qubits(cell: CellCoord) -> [QubitCoord; 6] {
    let CellCoord { x, y, t, .. } = cell;
    [
        QubitCoord::new(x - 1, y, t),
        QubitCoord::new(x + 1, y, t),
        QubitCoord::new(x, y - 1, t),
        QubitCoord::new(x, y + 1, t),
        QubitCoord::new(x, y, t - 1),
        QubitCoord::new(x, y, t + 1),
    ]
}

/// The cells of `class` sharing face `q`: two under Periodic boundaries,
/// possibly one at an Open surface. On a periodic axis of length 1 the two
/// cells coincide and are both returned, so that mod-2 accumulation still
/// cancels correctly.
pub fn incident_cells(
    q: QubitCoord,
    dims: LatticeDims,
    class: CellClass,
) -> Result<Vec<CellCoord>, LatticeError> {
    if q.face_class() != Some(class) {
        return Err(LatticeError::NotAFace(q, class));
    }
    let axis = q.orientation().expect("face qubits have an orientation");
    let mut out = Vec::with_capacity(2);
    for d in [-1i64, 1] {
        let c = CellCoord {
            x: q.x,
            y: q.y,
            t: q.t,
            class,
        }
        .with_axis(axis, q.axis(axis) + d);
        let c = dims.canon_cell(c);
        if dims.contains_cell(c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn axis_steps(delta: i64, len: u32, periodic: bool) -> u64 {
    debug_assert!(delta % 2 == 0);
    let d = (delta.unsigned_abs() / 2) % if periodic { len as u64 } else { u64::MAX };
    if periodic {
        d.min(len as u64 - d)
    } else {
        d
    }
}

/// Manhattan distance between same-class cells in cell steps, taking the
/// shorter wrap-around on periodic axes.
pub fn cell_distance(a: CellCoord, b: CellCoord, dims: LatticeDims) -> Result<u64, LatticeError> {
    if a.class != b.class {
        return Err(LatticeError::ClassMismatch);
    }
    let periodic = dims.is_periodic();
    Ok(AXES
        .iter()
        .map(|&ax| axis_steps(a.axis(ax) - b.axis(ax), dims.len(ax), periodic))
        .sum())
}

/// Like [`cell_distance`] but with an unbounded (never wrapped) t axis, the
/// metric used while decoding a stream indexed by absolute time.
pub fn cell_distance_stream(
    a: CellCoord,
    b: CellCoord,
    dims: LatticeDims,
) -> Result<u64, LatticeError> {
    if a.class != b.class {
        return Err(LatticeError::ClassMismatch);
    }
    let periodic = dims.is_periodic();
    let xy: u64 = [Axis::X, Axis::Y]
        .iter()
        .map(|&ax| axis_steps(a.axis(ax) - b.axis(ax), dims.len(ax), periodic))
        .sum();
    Ok(xy + (a.t - b.t).unsigned_abs() / 2)
}

/// The four opposite-class faces sharing an entanglement bond with `q`:
/// its unit-distance neighbors along the two non-normal axes. An X error on
/// `q` converts to Z errors on exactly these positions.
pub fn bond_neighbors(q: QubitCoord) -> [QubitCoord; 4] {
    let axis = q.orientation().expect("bond_neighbors requires a face qubit");
    let mut out = [q; 4];
    let mut k = 0;
    for a in AXES {
        if a == axis {
            continue;
        }
        for d in [-1i64, 1] {
            let mut n = q;
            match a {
                Axis::X => n.x += d,
                Axis::Y => n.y += d,
                Axis::T => n.t += d,
            }
            out[k] = n;
            k += 1;
        }
    }
    out
}

/// Minimum cell steps from a cell to an Open lattice surface, counting the
/// final step through the surface face. None under Periodic boundaries.
pub fn boundary_distance(cell: CellCoord, dims: LatticeDims) -> Option<u64> {
    if dims.is_periodic() {
        return None;
    }
    Some(nearest_boundary(cell, dims).2)
}

/// The axis, direction and distance of the closest Open surface.
/// Ties resolve in (x−, x+, y−, y+, t−, t+) order.
pub(crate) fn nearest_boundary(cell: CellCoord, dims: LatticeDims) -> (Axis, i64, u64) {
    let lo = match cell.class {
        CellClass::Primal => 0,
        CellClass::Dual => 1,
    };
    let mut best: Option<(Axis, i64, u64)> = None;
    for a in AXES {
        let v = cell.axis(a);
        let down = ((v - lo) / 2) as u64 + 1;
        let up = ((dims.extent(a) - 2 + lo - v) / 2) as u64 + 1;
        for (dir, d) in [(-1i64, down), (1, up)] {
            if best.map(|(_, _, bd)| d < bd).unwrap_or(true) {
                best = Some((a, dir, d));
            }
        }
    }
    best.expect("at least one axis")
}

/// All face qubits of one class present in the lattice, in (t, y, x) order.
pub fn all_qubits(dims: LatticeDims, class: CellClass) -> Vec<QubitCoord> {
    let mut set = alloc::collections::BTreeSet::new();
    for cell in all_cells(dims, class) {
        for q in face_qubits(cell) {
            set.insert(dims.canon_qubit(q));
        }
    }
    set.into_iter().collect()
}
