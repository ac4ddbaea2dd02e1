//! Syndrome datasets on disk: newline-delimited JSON records next to a
//! sidecar manifest.
//!
//! Each line is one experiment:
//!
//! ```text
//! {"t":4,"inc":["00","90","00","04"],"fz":"2","lz":1,"seed":17}
//! ```
//!
//! `inc` holds one two-digit hex byte per cycle; bit k (LSB first) is
//! global stabilizer k, X0..X3 in bits 0..3 and Z0..Z3 in bits 4..7.
//! `fz` is the final-syndrome increment nibble (bit i = Zi) and `lz`
//! the readout-flip parity label.  Test datasets additionally carry
//! the per-cycle virtual readouts: `fza` (one nibble per cycle) and
//! `lza` (a 0/1 string, one char per cycle), whose last entries must
//! equal `fz`/`lz`.  The manifest records generation parameters, the
//! record count and the RNG identifiers; per-sequence seeds are the
//! splitmix64 children of the manifest's base seed, so any single
//! record can be regenerated in isolation.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::CodeLayout;
use crate::rng::{derive_seed, rng_from_seed, RNG_ALGO, SEED_DERIVATION};
use crate::sim::{run_experiment, ErrorParams, PerCycle, SyndromeSequence};

pub const FORMAT_VERSION: u32 = 1;

/// Sequences generated per parallel chunk; bounds writer memory.
const CHUNK: usize = 4096;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Train,
    Validation,
    Test,
}

impl DatasetKind {
    /// Test datasets carry per-cycle virtual readouts.
    pub fn per_cycle(self) -> bool {
        matches!(self, DatasetKind::Test)
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub kind: DatasetKind,
    pub count: u64,
    pub t_min: usize,
    pub t_max: usize,
    pub params: ErrorParams,
    pub base_seed: u64,
    pub rng: String,
    pub seed_derivation: String,
    pub basis: String,
}

#[derive(Clone, Copy, Debug)]
pub struct GenerateConfig {
    pub kind: DatasetKind,
    pub count: u64,
    pub t_min: usize,
    pub t_max: usize,
    pub params: ErrorParams,
    pub base_seed: u64,
}

impl GenerateConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.count == 0 {
            return Err(Error::InvalidArgument("dataset count must be positive".into()));
        }
        if self.t_min < 1 || self.t_min > self.t_max {
            return Err(Error::InvalidArgument(format!(
                "bad cycle range [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }
}

/// On-disk record; field order is the file format.
#[derive(Serialize, Deserialize)]
struct Record {
    t: usize,
    inc: Vec<String>,
    fz: String,
    lz: u8,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    fza: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    lza: Option<String>,
    seed: u64,
}

fn to_record(seq: &SyndromeSequence) -> Record {
    Record {
        t: seq.cycles,
        inc: seq.increments.iter().map(|b| format!("{b:02x}")).collect(),
        fz: format!("{:x}", seq.final_increment_z),
        lz: seq.label_z,
        fza: seq
            .per_cycle
            .as_ref()
            .map(|pc| pc.final_increment_z.iter().map(|b| format!("{b:x}")).collect()),
        lza: seq.per_cycle.as_ref().map(|pc| {
            pc.label_z
                .iter()
                .map(|&b| if b == 0 { '0' } else { '1' })
                .collect()
        }),
        seed: seq.seed,
    }
}

fn from_record(rec: Record) -> std::result::Result<SyndromeSequence, String> {
    let parse_byte = |s: &str, max: u16| -> std::result::Result<u8, String> {
        let v = u8::from_str_radix(s, 16).map_err(|_| format!("bad hex {s:?}"))?;
        if u16::from(v) > max {
            return Err(format!("value {s:?} exceeds {max}"));
        }
        Ok(v)
    };
    if rec.t < 1 {
        return Err("cycle count must be at least 1".into());
    }
    if rec.inc.len() != rec.t {
        return Err(format!("{} increments for t={}", rec.inc.len(), rec.t));
    }
    if rec.lz > 1 {
        return Err(format!("label {} not a bit", rec.lz));
    }
    let increments = rec
        .inc
        .iter()
        .map(|s| parse_byte(s, 255))
        .collect::<std::result::Result<Vec<u8>, _>>()?;
    let final_increment_z = parse_byte(&rec.fz, 15)?;
    let per_cycle = match (rec.fza, rec.lza) {
        (None, None) => None,
        (Some(fza), Some(lza)) => {
            if fza.len() != rec.t || lza.len() != rec.t {
                return Err("per-cycle arrays must have one entry per cycle".into());
            }
            let f = fza
                .iter()
                .map(|s| parse_byte(s, 15))
                .collect::<std::result::Result<Vec<u8>, _>>()?;
            let l = lza
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    _ => Err(format!("bad label char {c:?}")),
                })
                .collect::<std::result::Result<Vec<u8>, _>>()?;
            if *f.last().unwrap() != final_increment_z || *l.last().unwrap() != rec.lz {
                return Err("per-cycle tail disagrees with final fields".into());
            }
            Some(PerCycle {
                final_increment_z: f,
                label_z: l,
            })
        }
        _ => return Err("fza and lza must appear together".into()),
    };
    Ok(SyndromeSequence {
        cycles: rec.t,
        increments,
        final_increment_z,
        label_z: rec.lz,
        per_cycle,
        seed: rec.seed,
    })
}

/// Manifest path for a data file: `train.ndjson` -> `train.manifest.json`.
pub fn manifest_path(data: &Path) -> PathBuf {
    data.with_extension("manifest.json")
}

/// Generate one sequence of the dataset defined by (`cfg`, `index`).
/// The record seed is the index-th child of the base seed; cycle count
/// and simulation stream are further children of that.
pub fn generate_one(
    layout: &CodeLayout,
    cfg: &GenerateConfig,
    index: u64,
) -> Result<SyndromeSequence> {
    let seq_seed = derive_seed(cfg.base_seed, index);
    let cycles = if cfg.t_min == cfg.t_max {
        cfg.t_min
    } else {
        let mut trng = rng_from_seed(derive_seed(seq_seed, 0));
        trng.random_range(cfg.t_min..=cfg.t_max)
    };
    let mut seq = run_experiment(
        layout,
        cycles,
        &cfg.params,
        derive_seed(seq_seed, 1),
        cfg.kind.per_cycle(),
    )?;
    seq.seed = seq_seed;
    Ok(seq)
}

/// Generate `cfg.count` sequences to `path`, writing the manifest
/// alongside.  Generation is chunked and parallel but the file
/// contents depend only on the config.
pub fn generate_to_path(
    layout: &CodeLayout,
    cfg: &GenerateConfig,
    path: &Path,
) -> Result<Manifest> {
    use rayon::prelude::*;

    cfg.validate()?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut written = 0u64;
    while written < cfg.count {
        let n = CHUNK.min((cfg.count - written) as usize);
        let lines: Vec<String> = (0..n)
            .into_par_iter()
            .map(|i| {
                let seq = generate_one(layout, cfg, written + i as u64)?;
                serde_json::to_string(&to_record(&seq))
                    .map_err(|e| Error::Numeric(format!("serialize: {e}")))
            })
            .collect::<Result<_>>()?;
        for line in &lines {
            out.write_all(line.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|e| Error::io(path, e))?;
        }
        written += n as u64;
    }
    out.flush().map_err(|e| Error::io(path, e))?;

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        kind: cfg.kind,
        count: cfg.count,
        t_min: cfg.t_min,
        t_max: cfg.t_max,
        params: cfg.params,
        base_seed: cfg.base_seed,
        rng: RNG_ALGO.to_string(),
        seed_derivation: SEED_DERIVATION.to_string(),
        basis: "z".to_string(),
    };
    write_manifest(&manifest_path(path), &manifest)?;
    Ok(manifest)
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::Numeric(format!("serialize manifest: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::CorruptRecord {
        path: path.to_path_buf(),
        line: 0,
        msg: e.to_string(),
    })?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found: manifest.format_version,
            expected: FORMAT_VERSION,
        });
    }
    Ok(manifest)
}

/// Streaming reader; memory stays bounded by one record.
pub struct DatasetReader {
    path: PathBuf,
    lines: std::io::Lines<BufReader<File>>,
    next_line: usize,
    read: u64,
}

impl DatasetReader {
    /// Records successfully read so far.
    pub fn records_read(&self) -> u64 {
        self.read
    }
}

impl Iterator for DatasetReader {
    type Item = Result<SyndromeSequence>;

    fn next(&mut self) -> Option<Self::Item> {
        let line = match self.lines.next()? {
            Ok(l) => l,
            Err(e) => return Some(Err(Error::io(&self.path, e))),
        };
        self.next_line += 1;
        if line.trim().is_empty() {
            return self.next();
        }
        let corrupt = |msg: String| Error::CorruptRecord {
            path: self.path.clone(),
            line: self.next_line,
            msg: format!("{msg} ({} complete records before this point)", self.read),
        };
        let rec: Record = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => return Some(Err(corrupt(e.to_string()))),
        };
        match from_record(rec) {
            Ok(seq) => {
                self.read += 1;
                Some(Ok(seq))
            }
            Err(msg) => Some(Err(corrupt(msg))),
        }
    }
}

/// Open a dataset for streaming; reads the sidecar manifest first.
pub fn open(path: &Path) -> Result<(Manifest, DatasetReader)> {
    let manifest = read_manifest(&manifest_path(path))?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok((
        manifest,
        DatasetReader {
            path: path.to_path_buf(),
            lines: BufReader::new(file).lines(),
            next_line: 0,
            read: 0,
        },
    ))
}

/// Load a whole dataset into memory, verifying the manifest count.
pub fn load_all(path: &Path) -> Result<(Manifest, Vec<SyndromeSequence>)> {
    let (manifest, reader) = open(path)?;
    let seqs: Vec<SyndromeSequence> = reader.collect::<Result<_>>()?;
    if seqs.len() as u64 != manifest.count {
        return Err(Error::CorruptRecord {
            path: path.to_path_buf(),
            line: 0,
            msg: format!(
                "manifest promises {} records, file holds {}",
                manifest.count,
                seqs.len()
            ),
        });
    }
    Ok((manifest, seqs))
}
