//! Graph cache layout (little-endian):
//!
//! ```text
//! "CRG1" | u32 n | u64 edge_count
//! (n + 1) x u64 offset | 2 * edge_count x u32 neighbour | 2 * edge_count x u32 cooc
//! ```

use std::io::{Read, Write};

use super::GlobalGraph;
use crate::io::*;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"CRG1";

pub fn write_graph<W: Write>(w: &mut W, g: &GlobalGraph) -> Result<()> {
    let (offsets, neighbors, cooc) = g.raw_parts();
    w.write_all(MAGIC)?;
    write_u32(w, len_u32(g.n())?)?;
    write_u64(w, g.n_edges())?;
    for &o in offsets {
        write_u64(w, o)?;
    }
    for &v in neighbors {
        write_u32(w, v)?;
    }
    for &c in cooc {
        write_u32(w, c)?;
    }
    Ok(())
}

pub fn read_graph<R: Read>(r: &mut R) -> Result<GlobalGraph> {
    expect_magic(r, MAGIC)?;
    let n = read_u32(r)? as usize;
    let edges = read_u64(r)?;
    let entries = edges
        .checked_mul(2)
        .and_then(|e| usize::try_from(e).ok())
        .ok_or_else(|| Error::Cache("edge count overflow".into()))?;
    let offsets = (0..=n).map(|_| read_u64(r)).collect::<Result<Vec<_>>>()?;
    let neighbors = (0..entries).map(|_| read_u32(r)).collect::<Result<Vec<_>>>()?;
    let cooc = (0..entries).map(|_| read_u32(r)).collect::<Result<Vec<_>>>()?;
    GlobalGraph::from_csr(offsets, neighbors, cooc).map_err(|e| Error::Cache(e.to_string()))
}
