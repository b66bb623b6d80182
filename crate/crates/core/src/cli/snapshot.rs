//! Binary field snapshots: one text header line followed by little-endian
//! 64-bit floats.
//!
//! Header: `KEEPDG1 dim=3 n=32,32,32 vars=rho,m1,m2,m3,E scalar=f64 endian=little layout=cell-major,x-fastest t=<seconds>`.
//! Cells are stored one after another with the first axis varying fastest;
//! within a cell the variables follow `vars`.

use std::io::{self, BufRead, Write};

use crate::flux::ConservedState;
use crate::solver::Grid;

pub const MAGIC: &str = "KEEPDG1";

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad snapshot header: {0}")]
    Header(String),
    #[error("payload has {got} bytes, header implies {expected}")]
    Payload { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub dimension: usize,
    pub cells: Vec<usize>,
    pub time: f64,
}

impl SnapshotHeader {
    pub fn variables(&self) -> Vec<String> {
        let mut v = vec!["rho".to_string()];
        v.extend((1..=self.dimension).map(|i| format!("m{i}")));
        v.push("E".into());
        v
    }

    pub fn payload_len(&self) -> usize {
        (self.dimension + 2) * self.cells.iter().product::<usize>() * 8
    }

    pub fn to_line(&self) -> String {
        let n: Vec<String> = self.cells.iter().map(ToString::to_string).collect();
        format!(
            "{MAGIC} dim={} n={} vars={} scalar=f64 endian=little layout=cell-major,x-fastest t={:.16e}\n",
            self.dimension,
            n.join(","),
            self.variables().join(","),
            self.time
        )
    }

    pub fn parse(line: &str) -> Result<Self, SnapshotError> {
        let bad = |m: &str| SnapshotError::Header(m.to_string());
        let mut words = line.split_whitespace();
        if words.next() != Some(MAGIC) {
            return Err(bad("missing magic"));
        }
        let (mut dim, mut cells, mut time) = (None, None, None);
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| bad(w))?;
            match k {
                "dim" => dim = Some(v.parse::<usize>().map_err(|_| bad(w))?),
                "n" => {
                    cells = Some(
                        v.split(',')
                            .map(str::parse::<usize>)
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| bad(w))?,
                    )
                }
                "t" => time = Some(v.parse::<f64>().map_err(|_| bad(w))?),
                "scalar" if v != "f64" => return Err(bad(w)),
                "endian" if v != "little" => return Err(bad(w)),
                _ => {}
            }
        }
        let header = Self {
            dimension: dim.ok_or_else(|| bad("missing dim"))?,
            cells: cells.ok_or_else(|| bad("missing n"))?,
            time: time.ok_or_else(|| bad("missing t"))?,
        };
        if header.cells.len() != header.dimension {
            return Err(bad("n does not match dim"));
        }
        Ok(header)
    }
}

pub fn write_snapshot<const D: usize, W: Write>(
    mut w: W,
    grid: &Grid<D>,
    states: &[ConservedState<D>],
    time: f64,
) -> Result<(), SnapshotError> {
    let header = SnapshotHeader {
        dimension: D,
        cells: grid.cells().to_vec(),
        time,
    };
    w.write_all(header.to_line().as_bytes())?;
    let mut buf = Vec::with_capacity(header.payload_len());
    for u in states {
        for x in u.iter() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(w.flush()?)
}

/// Header and flat payload of a snapshot.
pub fn read_snapshot<R: BufRead>(mut r: R) -> Result<(SnapshotHeader, Vec<f64>), SnapshotError> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header = SnapshotHeader::parse(line.trim_end())?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != header.payload_len() {
        return Err(SnapshotError::Payload {
            expected: header.payload_len(),
            got: bytes.len(),
        });
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((header, data))
}
