//! Replay a recorded detector stream through the sliding-window decoder,
//! optionally with the reader and decoder split across threads. Output is
//! deterministic either way: sheets flow through a bounded in-order channel
//! and aggregation merges committed layers at the end.

use std::io::Read;
use std::sync::mpsc;

use tqc_core::lattice::{CellClass, LatticeDims};
use tqc_core::pipeline::{CorrectionSet, DecodeWindowConfig, PipelineError, StreamDecoder};
use tqc_core::syndrome::DetectorSheet;

use crate::format::{FormatError, StreamReader};

#[derive(Debug)]
pub enum ReplayError {
    Format(FormatError),
    Pipeline(PipelineError),
    /// Header width/height must be even (doubled coordinates).
    BadCrossSection { width: u32, height: u32 },
}

impl std::fmt::Display for ReplayError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReplayError::Format(e) => write!(f, "{e}"),
            ReplayError::Pipeline(e) => write!(f, "{e}"),
            ReplayError::BadCrossSection { width, height } => {
                write!(f, "cross-section {width}×{height} is not a doubled-coordinate grid")
            }
        }
    }
}

impl std::error::Error for ReplayError {}

impl From<FormatError> for ReplayError {
    fn from(e: FormatError) -> Self {
        ReplayError::Format(e)
    }
}

impl From<PipelineError> for ReplayError {
    fn from(e: PipelineError) -> Self {
        ReplayError::Pipeline(e)
    }
}

fn decode_all(
    sheets: impl Iterator<Item = Result<DetectorSheet, ReplayError>>,
    dims: LatticeDims,
    window: DecodeWindowConfig,
) -> Result<(CorrectionSet, CorrectionSet), ReplayError> {
    let mut primal = StreamDecoder::new(dims, CellClass::Primal, window);
    let mut dual = StreamDecoder::new(dims, CellClass::Dual, window);
    let mut pcorr = CorrectionSet::new();
    let mut dcorr = CorrectionSet::new();
    let absorb = |layers: Vec<tqc_core::pipeline::CommittedLayer>, corr: &mut CorrectionSet| {
        for layer in layers {
            for q in layer.qubits {
                corr.toggle(q);
            }
        }
    };
    for sheet in sheets {
        let sheet = sheet?;
        absorb(primal.push(sheet.clone())?, &mut pcorr);
        absorb(dual.push(sheet)?, &mut dcorr);
    }
    absorb(primal.finish()?, &mut pcorr);
    absorb(dual.finish()?, &mut dcorr);
    Ok((pcorr, dcorr))
}

/// For a bounded recording of a time-periodic volume the seam layer needs
/// the first sheets again: layer n computed from sheets n−1, n, n+1 with
/// sheets n, n+1 being copies of sheets 0, 1 is exactly wrapped layer 0.
/// Without this the seam flips are lost and per-class parity can go odd.
fn wrap_extend(
    inner: impl Iterator<Item = Result<DetectorSheet, ReplayError>>,
    wrap_sheets: usize,
) -> impl Iterator<Item = Result<DetectorSheet, ReplayError>> {
    let mut head: Vec<DetectorSheet> = Vec::with_capacity(wrap_sheets);
    let mut inner = inner.fuse();
    let mut next_t: i64 = 0;
    let mut replayed = 0usize;
    std::iter::from_fn(move || match inner.next() {
        Some(Ok(s)) => {
            if head.len() < wrap_sheets {
                head.push(s.clone());
            }
            next_t = s.t + 1;
            Some(Ok(s))
        }
        Some(Err(e)) => Some(Err(e)),
        None => {
            if replayed < head.len() {
                let mut s = head[replayed].clone();
                s.t = next_t;
                next_t += 1;
                replayed += 1;
                Some(Ok(s))
            } else {
                None
            }
        }
    })
}

/// Decode a TQCS stream into per-class corrections. `threads = 1` parses
/// and decodes inline; `threads ≥ 2` moves parsing to its own thread behind
/// a bounded channel (lossless, in-order, with backpressure).
pub fn replay_stream<R: Read + Send + 'static>(
    src: R,
    window: DecodeWindowConfig,
    threads: usize,
) -> Result<(CorrectionSet, CorrectionSet, LatticeDims), ReplayError> {
    let mut reader = StreamReader::new(src)?;
    let (width, height) = (reader.header.width, reader.header.height);
    if width % 2 != 0 || height % 2 != 0 {
        return Err(ReplayError::BadCrossSection { width, height });
    }
    let lt = (reader.header.sheet_count / 2).max(1) as u32;
    let dims = LatticeDims::periodic(width / 2, height / 2, lt).unwrap();
    // Bounded headers mean a complete time-periodic recording; unbounded
    // streams end with quiet sheets and need no seam repair.
    let wrap_sheets = if reader.header.sheet_count != 0 { 2 } else { 0 };

    let (p, d) = if threads <= 1 {
        let iter = std::iter::from_fn(move || match reader.next_sheet() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => None,
            Err(e) => Some(Err(ReplayError::from(e))),
        });
        decode_all(wrap_extend(iter, wrap_sheets), dims, window)?
    } else {
        let (tx, rx) = mpsc::sync_channel::<Result<DetectorSheet, FormatError>>(64);
        let producer = std::thread::spawn(move || {
            loop {
                match reader.next_sheet() {
                    Ok(Some(s)) => {
                        if tx.send(Ok(s)).is_err() {
                            break; // consumer gone (error path)
                        }
                    }
                    Ok(None) => break,
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        break;
                    }
                }
            }
        });
        let iter = rx.into_iter().map(|r| r.map_err(ReplayError::from));
        let result = decode_all(wrap_extend(iter, wrap_sheets), dims, window);
        let _ = producer.join();
        result?
    };
    Ok((p, d, dims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{write_stream, correction_records, write_corrections_text, sha256_hex};
    use tqc_core::lattice::Axis;
    use tqc_core::QubitCoord;

    fn indicator_stream(errors: &[QubitCoord], dims: LatticeDims, extra: i64) -> Vec<u8> {
        let sheets: Vec<DetectorSheet> = (0..dims.extent(Axis::T) + extra)
            .map(|t| {
                let mut s = DetectorSheet::for_dims(dims, t);
                for q in errors {
                    if q.t == t {
                        s.toggle(q.x, q.y);
                    }
                }
                s
            })
            .collect();
        let mut buf = Vec::new();
        write_stream(&mut buf, &sheets).unwrap();
        buf
    }

    #[test]
    fn threaded_replay_matches_single_threaded() {
        let dims = LatticeDims::periodic(4, 4, 4).unwrap();
        let errors = [QubitCoord::new(1, 2, 2), QubitCoord::new(4, 3, 5)];
        let bytes = indicator_stream(&errors, dims, 40);
        let window = DecodeWindowConfig::default();
        let single = replay_stream(std::io::Cursor::new(bytes.clone()), window, 1).unwrap();
        let multi = replay_stream(std::io::Cursor::new(bytes), window, 2).unwrap();
        assert_eq!(single.0, multi.0);
        assert_eq!(single.1, multi.1);

        let digest = |r: &(CorrectionSet, CorrectionSet, LatticeDims)| {
            let recs = correction_records(&r.0, &r.1);
            let mut buf = Vec::new();
            write_corrections_text(&mut buf, &recs).unwrap();
            sha256_hex(&buf)
        };
        assert_eq!(digest(&single), digest(&multi));
    }

    #[test]
    fn isolated_errors_replay_to_themselves() {
        let dims = LatticeDims::periodic(4, 4, 4).unwrap();
        let errors = [QubitCoord::new(1, 2, 2), QubitCoord::new(4, 3, 5)];
        let bytes = indicator_stream(&errors, dims, 40);
        let (p, d, _) = replay_stream(
            std::io::Cursor::new(bytes),
            DecodeWindowConfig::default(),
            1,
        )
        .unwrap();
        assert_eq!(p.qubits.iter().copied().collect::<Vec<_>>(), [errors[0]]);
        assert_eq!(d.qubits.iter().copied().collect::<Vec<_>>(), [errors[1]]);
    }
}
