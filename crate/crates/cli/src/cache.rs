//! Binary graph cache. The exact byte layout is documented in
//! `docs/cache-format.md`; in short: magic + version header, corpus
//! diagnostics, the sorted id table, then the self-loop and CSR arrays for
//! both edge directions, all little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use echograph_core::graph::{GraphDiagnostics, RepostGraph, SelfLoopPolicy};
use echograph_core::records::UserId;

pub const MAGIC: &[u8; 8] = b"ECHOGRPH";
pub const VERSION: u32 = 1;

fn policy_code(policy: SelfLoopPolicy) -> u32 {
    match policy {
        SelfLoopPolicy::Originals => 0,
        SelfLoopPolicy::OriginalsAndReplies => 1,
        SelfLoopPolicy::All => 2,
    }
}

fn policy_from_code(code: u32) -> Option<SelfLoopPolicy> {
    match code {
        0 => Some(SelfLoopPolicy::Originals),
        1 => Some(SelfLoopPolicy::OriginalsAndReplies),
        2 => Some(SelfLoopPolicy::All),
        _ => None,
    }
}

struct LeWriter<W: Write> {
    inner: W,
}

impl<W: Write> LeWriter<W> {
    fn u32(&mut self, v: u32) -> std::io::Result<()> {
        self.inner.write_all(&v.to_le_bytes())
    }

    fn u64(&mut self, v: u64) -> std::io::Result<()> {
        self.inner.write_all(&v.to_le_bytes())
    }

    fn bytes(&mut self, v: &[u8]) -> std::io::Result<()> {
        self.inner.write_all(v)
    }
}

struct LeReader<R: Read> {
    inner: R,
}

impl<R: Read> LeReader<R> {
    fn u32(&mut self) -> std::io::Result<u32> {
        let mut buf = [0u8; 4];
        self.inner.read_exact(&mut buf)?;
        Ok(u32::from_le_bytes(buf))
    }

    fn u64(&mut self) -> std::io::Result<u64> {
        let mut buf = [0u8; 8];
        self.inner.read_exact(&mut buf)?;
        Ok(u64::from_le_bytes(buf))
    }

    fn u32_vec(&mut self, len: usize) -> std::io::Result<Vec<u32>> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.u32()?);
        }
        Ok(out)
    }

    fn u64_vec(&mut self, len: usize) -> std::io::Result<Vec<u64>> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.u64()?);
        }
        Ok(out)
    }
}

pub fn write_graph(path: &Path, graph: &RepostGraph, policy: SelfLoopPolicy) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = LeWriter {
        inner: BufWriter::new(file),
    };
    w.bytes(MAGIC)?;
    w.u32(VERSION)?;
    w.u32(policy_code(policy))?;
    w.u64(graph.node_count() as u64)?;
    w.u64(graph.edge_count() as u64)?;
    let diag = graph.diagnostics();
    w.u64(diag.unresolved_reposts)?;
    w.u64(diag.self_reposts_folded)?;
    for id in graph.ids() {
        let bytes = id.as_str().as_bytes();
        w.u32(bytes.len() as u32)?;
        w.bytes(bytes)?;
    }
    for &v in graph.self_loops() {
        w.u64(v)?;
    }
    for &v in graph.out_offsets() {
        w.u64(v)?;
    }
    for &v in graph.out_targets() {
        w.u32(v)?;
    }
    for &v in graph.out_weights() {
        w.u64(v)?;
    }
    for &v in graph.in_offsets() {
        w.u64(v)?;
    }
    for &v in graph.in_sources() {
        w.u32(v)?;
    }
    for &v in graph.in_weights() {
        w.u64(v)?;
    }
    w.inner.flush()?;
    Ok(())
}

pub fn read_graph(path: &Path) -> Result<(RepostGraph, SelfLoopPolicy)> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut r = LeReader {
        inner: BufReader::new(file),
    };
    let mut magic = [0u8; 8];
    r.inner.read_exact(&mut magic)?;
    if &magic != MAGIC {
        bail!("{}: not a graph cache (bad magic)", path.display());
    }
    let version = r.u32()?;
    if version != VERSION {
        bail!("{}: unsupported cache version {version}", path.display());
    }
    let policy = policy_from_code(r.u32()?)
        .with_context(|| format!("{}: unknown self-loop policy", path.display()))?;
    let n = r.u64()? as usize;
    let m = r.u64()? as usize;
    let diagnostics = GraphDiagnostics {
        unresolved_reposts: r.u64()?,
        self_reposts_folded: r.u64()?,
    };
    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        let len = r.u32()? as usize;
        let mut buf = vec![0u8; len];
        r.inner.read_exact(&mut buf)?;
        let id = String::from_utf8(buf)
            .with_context(|| format!("{}: id table is not UTF-8", path.display()))?;
        ids.push(UserId::new(id));
    }
    let self_loops = r.u64_vec(n)?;
    let out_offsets = r.u64_vec(n + 1)?;
    let out_targets = r.u32_vec(m)?;
    let out_weights = r.u64_vec(m)?;
    let in_offsets = r.u64_vec(n + 1)?;
    let in_sources = r.u32_vec(m)?;
    let in_weights = r.u64_vec(m)?;
    let mut trailer = [0u8; 1];
    if r.inner.read(&mut trailer)? != 0 {
        bail!("{}: trailing bytes after graph data", path.display());
    }
    let graph = RepostGraph::from_parts(
        ids,
        self_loops,
        out_offsets,
        out_targets,
        out_weights,
        in_offsets,
        in_sources,
        in_weights,
        diagnostics,
    )
    .with_context(|| format!("{}: corrupt graph cache", path.display()))?;
    Ok((graph, policy))
}
