//! File formats: the TQCS detector-stream container, correction output in
//! text and binary framing, and output digests.

use std::fmt;
use std::io::{self, Read, Write};

use sha2::{Digest, Sha256};
use tqc_core::lattice::CellClass;
use tqc_core::pipeline::CorrectionSet;
use tqc_core::syndrome::DetectorSheet;
use tqc_core::QubitCoord;

pub const STREAM_MAGIC: [u8; 4] = *b"TQCS";
pub const STREAM_VERSION: u16 = 1;
pub const CORRECTION_MAGIC: [u8; 4] = *b"TQCC";

#[derive(Debug)]
pub enum FormatError {
    Io(io::Error),
    /// The first four bytes are not "TQCS"/"TQCC".
    BadMagic { offset: u64 },
    UnsupportedVersion { version: u16, offset: u64 },
    /// Header fields describe an empty cross-section.
    BadHeader { offset: u64 },
    /// The file ended inside sheet `sheet_index`.
    Truncated { offset: u64, sheet_index: u64 },
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Io(e) => write!(f, "i/o error: {e}"),
            FormatError::BadMagic { offset } => {
                write!(f, "bad magic at byte {offset}: not a TQCS file")
            }
            FormatError::UnsupportedVersion { version, offset } => {
                write!(f, "unsupported format version {version} at byte {offset}")
            }
            FormatError::BadHeader { offset } => {
                write!(f, "invalid header dimensions at byte {offset}")
            }
            FormatError::Truncated { offset, sheet_index } => {
                write!(f, "file truncated at byte {offset}: sheet {sheet_index} is missing data")
            }
        }
    }
}

impl std::error::Error for FormatError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            FormatError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for FormatError {
    fn from(e: io::Error) -> Self {
        FormatError::Io(e)
    }
}

/// Header {magic "TQCS", version u16, width u32, height u32, sheet_count u64},
/// all little-endian; sheet_count 0 means an unbounded stream read to EOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub width: u32,
    pub height: u32,
    pub sheet_count: u64,
}

impl StreamHeader {
    pub const LEN: u64 = 4 + 2 + 4 + 4 + 8;

    pub fn sheet_bytes(&self) -> usize {
        DetectorSheet::stride_for(self.width) * self.height as usize
    }
}

pub fn write_stream_header<W: Write>(w: &mut W, h: &StreamHeader) -> Result<(), FormatError> {
    w.write_all(&STREAM_MAGIC)?;
    w.write_all(&STREAM_VERSION.to_le_bytes())?;
    w.write_all(&h.width.to_le_bytes())?;
    w.write_all(&h.height.to_le_bytes())?;
    w.write_all(&h.sheet_count.to_le_bytes())?;
    Ok(())
}

pub fn write_sheet<W: Write>(w: &mut W, sheet: &DetectorSheet) -> Result<(), FormatError> {
    w.write_all(sheet.data())?;
    Ok(())
}

/// Write a complete stream file: header plus bit-packed sheets in t order.
pub fn write_stream<W: Write>(
    w: &mut W,
    sheets: &[DetectorSheet],
) -> Result<StreamHeader, FormatError> {
    let (width, height) = match sheets.first() {
        Some(s) => (s.width(), s.height()),
        None => (0, 0),
    };
    let header = StreamHeader { width, height, sheet_count: sheets.len() as u64 };
    write_stream_header(w, &header)?;
    for s in sheets {
        debug_assert!(s.width() == width && s.height() == height);
        write_sheet(w, s)?;
    }
    Ok(header)
}

/// Incremental TQCS reader tracking byte offsets for error reporting.
pub struct StreamReader<R: Read> {
    src: R,
    pub header: StreamHeader,
    offset: u64,
    next_t: i64,
}

fn read_exact_or<R: Read>(src: &mut R, buf: &mut [u8]) -> Result<usize, io::Error> {
    // Like read_exact but reports how many bytes arrived before EOF.
    let mut got = 0;
    while got < buf.len() {
        match src.read(&mut buf[got..]) {
            Ok(0) => break,
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(got)
}

impl<R: Read> StreamReader<R> {
    pub fn new(mut src: R) -> Result<Self, FormatError> {
        let mut magic = [0u8; 4];
        let got = read_exact_or(&mut src, &mut magic)?;
        if got < 4 || magic != STREAM_MAGIC {
            return Err(FormatError::BadMagic { offset: 0 });
        }
        let mut buf = [0u8; 18];
        let got = read_exact_or(&mut src, &mut buf)?;
        if got < buf.len() {
            return Err(FormatError::Truncated { offset: 4 + got as u64, sheet_index: 0 });
        }
        let version = u16::from_le_bytes([buf[0], buf[1]]);
        if version != STREAM_VERSION {
            return Err(FormatError::UnsupportedVersion { version, offset: 4 });
        }
        let width = u32::from_le_bytes(buf[2..6].try_into().unwrap());
        let height = u32::from_le_bytes(buf[6..10].try_into().unwrap());
        let sheet_count = u64::from_le_bytes(buf[10..18].try_into().unwrap());
        if width == 0 || height == 0 {
            return Err(FormatError::BadHeader { offset: 6 });
        }
        Ok(StreamReader {
            src,
            header: StreamHeader { width, height, sheet_count },
            offset: StreamHeader::LEN,
            next_t: 0,
        })
    }

    /// The next sheet, or None at a clean end of stream.
    pub fn next_sheet(&mut self) -> Result<Option<DetectorSheet>, FormatError> {
        let bounded = self.header.sheet_count != 0;
        if bounded && self.next_t as u64 >= self.header.sheet_count {
            return Ok(None);
        }
        let want = self.header.sheet_bytes();
        let mut data = vec![0u8; want];
        let got = read_exact_or(&mut self.src, &mut data)?;
        if got == 0 && !bounded {
            return Ok(None);
        }
        if got < want {
            return Err(FormatError::Truncated {
                offset: self.offset + got as u64,
                sheet_index: self.next_t as u64,
            });
        }
        let sheet = DetectorSheet::from_raw(self.next_t, self.header.width, self.header.height, data)
            .expect("sized buffer matches header");
        self.offset += want as u64;
        self.next_t += 1;
        Ok(Some(sheet))
    }
}

/// One correction entry destined for output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorrectionRecord {
    pub t: i64,
    pub x: i64,
    pub y: i64,
    pub class: CellClass,
}

/// Flatten per-class correction sets into records sorted by (t, x, y, class).
pub fn correction_records(
    primal: &CorrectionSet,
    dual: &CorrectionSet,
) -> Vec<CorrectionRecord> {
    let take = |set: &CorrectionSet, class: CellClass| {
        set.qubits
            .iter()
            .map(move |&QubitCoord { x, y, t }| CorrectionRecord { t, x, y, class })
            .collect::<Vec<_>>()
    };
    let mut out = take(primal, CellClass::Primal);
    out.extend(take(dual, CellClass::Dual));
    out.sort_unstable();
    out
}

/// Text format: one "t x y class" line per corrected qubit, sorted by t.
pub fn write_corrections_text<W: Write>(
    w: &mut W,
    records: &[CorrectionRecord],
) -> Result<(), FormatError> {
    for r in records {
        writeln!(w, "{} {} {} {}", r.t, r.x, r.y, r.class)?;
    }
    Ok(())
}

/// Binary framing mirroring the stream header: {magic "TQCC", version u16,
/// record_count u64}, then per record t/x/y as i64 LE plus one class byte.
pub fn write_corrections_binary<W: Write>(
    w: &mut W,
    records: &[CorrectionRecord],
) -> Result<(), FormatError> {
    w.write_all(&CORRECTION_MAGIC)?;
    w.write_all(&STREAM_VERSION.to_le_bytes())?;
    w.write_all(&(records.len() as u64).to_le_bytes())?;
    for r in records {
        w.write_all(&r.t.to_le_bytes())?;
        w.write_all(&r.x.to_le_bytes())?;
        w.write_all(&r.y.to_le_bytes())?;
        w.write_all(&[match r.class {
            CellClass::Primal => 0u8,
            CellClass::Dual => 1,
        }])?;
    }
    Ok(())
}

pub fn read_corrections_binary<R: Read>(src: &mut R) -> Result<Vec<CorrectionRecord>, FormatError> {
    let mut magic = [0u8; 4];
    if read_exact_or(src, &mut magic)? < 4 || magic != CORRECTION_MAGIC {
        return Err(FormatError::BadMagic { offset: 0 });
    }
    let mut buf = [0u8; 10];
    if read_exact_or(src, &mut buf)? < buf.len() {
        return Err(FormatError::Truncated { offset: 4, sheet_index: 0 });
    }
    let version = u16::from_le_bytes([buf[0], buf[1]]);
    if version != STREAM_VERSION {
        return Err(FormatError::UnsupportedVersion { version, offset: 4 });
    }
    let count = u64::from_le_bytes(buf[2..10].try_into().unwrap());
    let mut offset = 14u64;
    let mut out = Vec::with_capacity(count.min(1 << 20) as usize);
    for i in 0..count {
        let mut rec = [0u8; 25];
        let got = read_exact_or(src, &mut rec)?;
        if got < rec.len() {
            return Err(FormatError::Truncated { offset: offset + got as u64, sheet_index: i });
        }
        offset += rec.len() as u64;
        out.push(CorrectionRecord {
            t: i64::from_le_bytes(rec[0..8].try_into().unwrap()),
            x: i64::from_le_bytes(rec[8..16].try_into().unwrap()),
            y: i64::from_le_bytes(rec[16..24].try_into().unwrap()),
            class: if rec[24] == 0 { CellClass::Primal } else { CellClass::Dual },
        });
    }
    Ok(out)
}

/// Hex SHA-256 of a byte string; the digest quoted by record/replay checks.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        use std::fmt::Write as _;
        let _ = write!(s, "{b:02x}");
    }
    s
}
