//! I.i.d. single-qubit Pauli noise and the reduction of X errors to
//! equivalent Z errors on the opposite-class lattice.
//!
//! No quantum state is simulated anywhere: a Z error flips the parity of the
//! cells sharing its face, an X error is equivalent to Z errors on the four
//! bond-connected edge qubits, and that is all the decoder ever needs
//! (Pauli-frame tracking).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::lattice::{all_qubits, bond_neighbors, CellClass, LatticeDims, QubitCoord};

/// The error carried by a single qubit. `Xz` is both on one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Z,
    Xz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseError {
    /// Probabilities must lie in [0,1] and sum to 1 within 1e-12.
    InvalidChannel,
}

impl fmt::Display for NoiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "channel probabilities must be in [0,1] and sum to 1")
    }
}

impl core::error::Error for NoiseError {}

/// Per-qubit, per-round probabilities of the four channel outcomes
/// {I, X, Z, XZ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChannel {
    pub p_i: f64,
    pub p_x: f64,
    pub p_z: f64,
    pub p_xz: f64,
}

impl NoiseChannel {
    pub fn new(p_i: f64, p_x: f64, p_z: f64, p_xz: f64) -> Result<Self, NoiseError> {
        let ps = [p_i, p_x, p_z, p_xz];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p) || !p.is_finite()) {
            return Err(NoiseError::InvalidChannel);
        }
        if ((p_i + p_x + p_z + p_xz) - 1.0).abs() > 1e-12 {
            return Err(NoiseError::InvalidChannel);
        }
        Ok(NoiseChannel { p_i, p_x, p_z, p_xz })
    }

    /// Pure phase-flip channel: Z with probability `p`.
    pub fn pure_z(p: f64) -> Result<Self, NoiseError> {
        Self::new(1.0 - p, 0.0, p, 0.0)
    }

    /// The `--p` shorthand: p_x = p_z = p, p_xz = p².
    pub fn symmetric(p: f64) -> Result<Self, NoiseError> {
        Self::new(1.0 - 2.0 * p - p * p, p, p, p * p)
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Option<Pauli> {
        let u: f64 = rng.gen();
        if u < self.p_i {
            None
        } else if u < self.p_i + self.p_x {
            Some(Pauli::X)
        } else if u < self.p_i + self.p_x + self.p_z {
            Some(Pauli::Z)
        } else {
            Some(Pauli::Xz)
        }
    }
}

/// A set of located Pauli errors, at most one entry per qubit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErrorPattern {
    pub entries: BTreeMap<QubitCoord, Pauli>,
}

impl ErrorPattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (QubitCoord, Pauli)>) -> Self {
        ErrorPattern { entries: entries.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True if no entry carries an X component.
    pub fn is_pure_z(&self) -> bool {
        self.entries.values().all(|&p| p == Pauli::Z)
    }
}

/// One RNG substream per t-sheet, so that batch and streaming generation of
/// the same volume agree qubit for qubit.
fn sheet_rng(seed: u64, sheet: i64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(sheet as u64);
    rng
}

/// Draw an independent error for every qubit (both classes) in the lattice.
/// Identical (dims, channel, seed) produce identical patterns.
pub fn sample_errors(
    dims: LatticeDims,
    channel: &NoiseChannel,
    seed: u64,
) -> Result<ErrorPattern, NoiseError> {
    // Re-validate: channels built by hand may carry stale fields.
    let channel = NoiseChannel::new(channel.p_i, channel.p_x, channel.p_z, channel.p_xz)?;
    let mut by_sheet: BTreeMap<i64, Vec<QubitCoord>> = BTreeMap::new();
    for class in [CellClass::Primal, CellClass::Dual] {
        for q in all_qubits(dims, class) {
            by_sheet.entry(q.t).or_default().push(q);
        }
    }
    let mut pattern = ErrorPattern::new();
    for (sheet, mut qubits) in by_sheet {
        qubits.sort();
        let mut rng = sheet_rng(seed, sheet);
        for q in qubits {
            if let Some(p) = channel.draw(&mut rng) {
                pattern.entries.insert(q, p);
            }
        }
    }
    Ok(pattern)
}

fn toggle(set: &mut BTreeSet<QubitCoord>, q: QubitCoord) {
    if !set.remove(&q) {
        set.insert(q);
    }
}

/// Reduce a mixed pattern to pure Z errors split by face class.
///
/// Z components keep their location; each X component becomes Z on the four
/// bond-connected opposite-class qubits, accumulated mod 2 so that shared
/// conversions cancel. The output is all the decoder sees.
pub fn reduce_to_z(
    pattern: &ErrorPattern,
    dims: LatticeDims,
) -> (BTreeSet<QubitCoord>, BTreeSet<QubitCoord>) {
    let mut primal = BTreeSet::new();
    let mut dual = BTreeSet::new();
    let put = |q: QubitCoord, primal: &mut BTreeSet<QubitCoord>, dual: &mut BTreeSet<QubitCoord>| {
        match q.face_class() {
            Some(CellClass::Primal) => toggle(primal, q),
            Some(CellClass::Dual) => toggle(dual, q),
            None => unreachable!("toggled coordinate is always a face"),
        }
    };
    for (&q, &pauli) in &pattern.entries {
        if matches!(pauli, Pauli::Z | Pauli::Xz) {
            put(dims.canon_qubit(q), &mut primal, &mut dual);
        }
        if matches!(pauli, Pauli::X | Pauli::Xz) {
            for n in bond_neighbors(q) {
                let n = dims.canon_qubit(n);
                if dims.contains_qubit(n) {
                    put(n, &mut primal, &mut dual);
                }
            }
        }
    }
    (primal, dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeDims;

    #[test]
    fn identity_channel_is_empty() {
        let dims = LatticeDims::periodic(3, 3, 3).unwrap();
        let ch = NoiseChannel::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(sample_errors(dims, &ch, 7).unwrap().is_empty());
    }

    #[test]
    fn certain_z_flips_every_qubit() {
        let dims = LatticeDims::periodic(2, 2, 2).unwrap();
        let ch = NoiseChannel::new(0.0, 0.0, 1.0, 0.0).unwrap();
        let pat = sample_errors(dims, &ch, 0).unwrap();
        let total = all_qubits(dims, CellClass::Primal).len() + all_qubits(dims, CellClass::Dual).len();
        assert_eq!(pat.len(), total);
        assert!(pat.entries.values().all(|&p| p == Pauli::Z));
    }

    #[test]
    fn deterministic_per_seed() {
        let dims = LatticeDims::periodic(4, 4, 4).unwrap();
        let ch = NoiseChannel::symmetric(0.05).unwrap();
        assert_eq!(sample_errors(dims, &ch, 42).unwrap(), sample_errors(dims, &ch, 42).unwrap());
        assert_ne!(sample_errors(dims, &ch, 42).unwrap(), sample_errors(dims, &ch, 43).unwrap());
    }

    #[test]
    fn z_count_matches_binomial_statistics() {
        // p_z = 0.001 over ~10^6 qubits: count within 5 sigma of N*p.
        let dims = LatticeDims::periodic(64, 64, 41).unwrap();
        let n = (all_qubits(dims, CellClass::Primal).len()
            + all_qubits(dims, CellClass::Dual).len()) as f64;
        assert!(n >= 1.0e6);
        let p = 0.001;
        let ch = NoiseChannel::pure_z(p).unwrap();
        let count = sample_errors(dims, &ch, 12345).unwrap().len() as f64;
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!((count - n * p).abs() < 5.0 * sigma, "count {count} expect {}", n * p);
    }

    #[test]
    fn invalid_channel_rejected() {
        assert!(NoiseChannel::new(0.5, 0.5, 0.5, -0.5).is_err());
        assert!(NoiseChannel::new(0.5, 0.1, 0.1, 0.1).is_err());
    }

    #[test]
    fn pure_z_reduction_partitions_by_class() {
        let dims = LatticeDims::periodic(3, 3, 3).unwrap();
        let pat = ErrorPattern::from_entries([
            (QubitCoord::new(1, 0, 0), Pauli::Z),
            (QubitCoord::new(1, 1, 0), Pauli::Z),
        ]);
        let (p, d) = reduce_to_z(&pat, dims);
        assert_eq!(p.into_iter().collect::<Vec<_>>(), [QubitCoord::new(1, 0, 0)]);
        assert_eq!(d.into_iter().collect::<Vec<_>>(), [QubitCoord::new(1, 1, 0)]);
    }

    #[test]
    fn single_x_becomes_four_dual_z() {
        let dims = LatticeDims::periodic(3, 3, 3).unwrap();
        let pat = ErrorPattern::from_entries([(QubitCoord::new(1, 0, 0), Pauli::X)]);
        let (p, d) = reduce_to_z(&pat, dims);
        assert!(p.is_empty());
        assert_eq!(d.len(), 4);
        assert!(d.iter().all(|q| q.face_class() == Some(CellClass::Dual)));
        let expected: BTreeSet<_> = bond_neighbors(QubitCoord::new(1, 0, 0))
            .into_iter()
            .map(|q| dims.canon_qubit(q))
            .collect();
        assert_eq!(d, expected);
    }

    #[test]
    fn adjacent_x_conversions_cancel() {
        // Two X errors whose bond neighborhoods overlap in one qubit: the
        // shared converted Z accumulates to zero, leaving 6 entries, not 8.
        let dims = LatticeDims::periodic(3, 3, 3).unwrap();
        let a = QubitCoord::new(1, 0, 0);
        let c = QubitCoord::new(1, 2, 0);
        let shared: Vec<_> = bond_neighbors(a)
            .into_iter()
            .filter(|q| bond_neighbors(c).contains(q))
            .collect();
        assert_eq!(shared, [QubitCoord::new(1, 1, 0)]);
        let pat = ErrorPattern::from_entries([(a, Pauli::X), (c, Pauli::X)]);
        let (p, d) = reduce_to_z(&pat, dims);
        assert!(p.is_empty());
        assert_eq!(d.len(), 6, "shared conversion must cancel");
        assert!(!d.contains(&shared[0]));
    }

    #[test]
    fn reduction_idempotent_on_pure_z() {
        let dims = LatticeDims::periodic(3, 3, 3).unwrap();
        let ch = NoiseChannel::pure_z(0.2).unwrap();
        let pat = sample_errors(dims, &ch, 9).unwrap();
        let (p, d) = reduce_to_z(&pat, dims);
        let rejoined = ErrorPattern::from_entries(
            p.iter().chain(d.iter()).map(|&q| (q, Pauli::Z)),
        );
        let (p2, d2) = reduce_to_z(&rejoined, dims);
        assert_eq!((p, d), (p2, d2));
    }
}
