//! Text checkpoint format: a versioned JSON header line carrying the step
//! counter and caller metadata, then one JSON line per parameter with its
//! shape, values and Adam moments.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::params::ParamEntry;
use crate::{NumericsError, ParamStore, Result, Tensor};

const FORMAT: &str = "aednet-params";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    step: u64,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct ParamRecord {
    name: String,
    rows: usize,
    cols: usize,
    value: Vec<f64>,
    m: Vec<f64>,
    v: Vec<f64>,
}

pub fn save_checkpoint(path: &Path, store: &ParamStore, meta: &BTreeMap<String, String>) -> Result<()> {
    let file = File::create(path).map_err(|e| NumericsError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let header = Header {
        format: FORMAT.to_string(),
        version: VERSION,
        step: store.step(),
        meta: meta.clone(),
    };
    writeln!(out, "{}", serde_json::to_string(&header).expect("header serializes"))
        .map_err(|e| NumericsError::io(path, e))?;
    for entry in store.entries() {
        let record = ParamRecord {
            name: entry.name.clone(),
            rows: entry.value.rows(),
            cols: entry.value.cols(),
            value: entry.value.data().to_vec(),
            m: entry.m.data().to_vec(),
            v: entry.v.data().to_vec(),
        };
        writeln!(out, "{}", serde_json::to_string(&record).expect("record serializes"))
            .map_err(|e| NumericsError::io(path, e))?;
    }
    out.flush().map_err(|e| NumericsError::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<(ParamStore, BTreeMap<String, String>)> {
    let file = File::open(path).map_err(|e| NumericsError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let bad = |line: usize, message: String| NumericsError::Checkpoint {
        path: path.to_path_buf(),
        line,
        message,
    };

    let (_, first) = lines
        .next()
        .ok_or_else(|| bad(1, "empty checkpoint".into()))?;
    let first = first.map_err(|e| NumericsError::io(path, e))?;
    let header: Header =
        serde_json::from_str(&first).map_err(|e| bad(1, format!("bad header: {e}")))?;
    if header.format != FORMAT {
        return Err(bad(1, format!("unknown format {:?}", header.format)));
    }
    if header.version != VERSION {
        return Err(bad(1, format!("unsupported version {}", header.version)));
    }

    let mut entries = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| NumericsError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let record: ParamRecord =
            serde_json::from_str(&line).map_err(|e| bad(lineno, e.to_string()))?;
        let n = record.rows * record.cols;
        if record.value.len() != n || record.m.len() != n || record.v.len() != n {
            return Err(bad(
                lineno,
                format!(
                    "parameter {:?}: {}x{} shape does not match stored lengths",
                    record.name, record.rows, record.cols
                ),
            ));
        }
        entries.push(ParamEntry {
            name: record.name,
            value: Tensor::new(record.rows, record.cols, record.value),
            m: Tensor::new(record.rows, record.cols, record.m),
            v: Tensor::new(record.rows, record.cols, record.v),
        });
    }
    let store = ParamStore::restore(entries, header.step)?;
    Ok((store, header.meta))
}
