//! Undirected graphs with a bit-matrix adjacency oracle and sorted
//! adjacency lists, plus DIMACS clique-format I/O.
//!
//! Vertices are `0`-based `u32` ids internally. DIMACS files (and every
//! exported artifact) use `1`-based ids; the parsers and writers shift at
//! the boundary.

use std::fmt;
use std::io::{BufRead, Read};

use thiserror::Error;

/// An immutable simple undirected graph.
///
/// Adjacency is stored twice: as a packed bit matrix (one row of
/// `ceil(n/64)` words per vertex) for O(1) edge tests, and as sorted
/// adjacency lists for O(deg) neighbourhood scans. The diagonal is always
/// zero; self-loops are rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    words_per_row: usize,
    matrix: Vec<u64>,
    adj: Vec<Vec<u32>>,
}

/// Mean and population standard deviation of a degree sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub mean: f64,
    pub sd: f64,
}

/// Errors from programmatic graph construction and queries.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {v} out of range for a graph on {n} vertices")]
    VertexOutOfRange { v: u32, n: usize },
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: u32 },
    #[error("degree statistics over an empty vertex set")]
    EmptySubset,
}

/// Errors from the DIMACS parsers.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("i/o error reading instance")]
    Io(#[from] std::io::Error),
    #[error("no problem line found")]
    MissingProblemLine,
    #[error("line {line}: second problem line")]
    DuplicateProblemLine { line: usize },
    #[error("line {line}: edge before problem line")]
    EdgeBeforeProblemLine { line: usize },
    #[error("line {line}: malformed line {content:?}")]
    Malformed { line: usize, content: String },
    #[error("line {line}: malformed problem line")]
    BadProblemLine { line: usize },
    #[error("line {line}: instance declares zero vertices")]
    ZeroVertices { line: usize },
    #[error("line {line}: vertex {id} outside [1, {n}]")]
    VertexOutOfRange { line: usize, id: u64, n: usize },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: u64 },
    #[error("binary instance: malformed preamble length line")]
    BadPreambleLength,
    #[error("binary instance: truncated stream")]
    Truncated,
}

/// Non-fatal irregularities observed while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// Edge lines repeating an already-seen pair (in either order).
    DuplicateEdges { count: usize },
    /// The problem line's edge count disagrees with the deduplicated count.
    EdgeCountMismatch { declared: usize, parsed: usize },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::DuplicateEdges { count } => {
                write!(f, "{count} duplicate edge line(s) merged")
            }
            ParseWarning::EdgeCountMismatch { declared, parsed } => {
                write!(f, "problem line declares {declared} edges, parsed {parsed} distinct")
            }
        }
    }
}

/// A parsed instance: the graph plus any warnings the parser accumulated.
#[derive(Debug)]
pub struct Parsed {
    pub graph: Graph,
    pub warnings: Vec<ParseWarning>,
}

struct Builder {
    n: usize,
    m: usize,
    words_per_row: usize,
    matrix: Vec<u64>,
}

impl Builder {
    fn new(n: usize) -> Builder {
        let words_per_row = n.div_ceil(64);
        Builder { n, m: 0, words_per_row, matrix: vec![0; n * words_per_row] }
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    /// Returns false if the edge was already present.
    fn add_edge(&mut self, u: u32, v: u32) -> bool {
        let (u, v) = (u as usize, v as usize);
        debug_assert!(u != v && u < self.n && v < self.n);
        if self.has_edge(u, v) {
            return false;
        }
        self.matrix[u * self.words_per_row + v / 64] |= 1 << (v % 64);
        self.matrix[v * self.words_per_row + u / 64] |= 1 << (u % 64);
        self.m += 1;
        true
    }

    fn finish(self) -> Graph {
        let mut adj = vec![Vec::new(); self.n];
        for (u, adj_u) in adj.iter_mut().enumerate() {
            let row = &self.matrix[u * self.words_per_row..(u + 1) * self.words_per_row];
            for (w, &word) in row.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    adj_u.push((w * 64 + b) as u32);
                    bits &= bits - 1;
                }
            }
        }
        Graph { n: self.n, m: self.m, words_per_row: self.words_per_row, matrix: self.matrix, adj }
    }
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge list of `0`-based pairs.
    ///
    /// Duplicate pairs (in either order) are merged silently; `m` reflects
    /// the deduplicated count. Self-loops and out-of-range endpoints are
    /// errors.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut b = Builder::new(n);
        for (u, v) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(GraphError::VertexOutOfRange { v: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { v: u });
            }
            b.add_edge(u, v);
        }
        Ok(b.finish())
    }

    /// Samples G(n, p): each of the n(n-1)/2 pairs is an edge
    /// independently with probability `p`.
    pub fn random_gnp<R: rand::Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
        assert!(n >= 1, "graph must have at least one vertex");
        let mut b = Builder::new(n);
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                if rng.random_bool(p) {
                    b.add_edge(u, v);
                }
            }
        }
        b.finish()
    }

    /// Number of vertices.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// O(1) adjacency test. `is_edge(v, v)` is false for every `v`.
    ///
    /// # Panics
    ///
    /// Panics if either vertex is out of range.
    #[inline]
    pub fn is_edge(&self, u: u32, v: u32) -> bool {
        let (ui, vi) = (u as usize, v as usize);
        assert!(ui < self.n && vi < self.n, "vertex out of range");
        self.matrix[ui * self.words_per_row + vi / 64] >> (vi % 64) & 1 == 1
    }

    /// The sorted neighbour list of `v`.
    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    /// Degree of `v`.
    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// The packed adjacency row of `v` (`ceil(n/64)` words, bit `j` of
    /// word `j/64` set iff `{v, j}` is an edge).
    pub(crate) fn row(&self, v: u32) -> &[u64] {
        let v = v as usize;
        &self.matrix[v * self.words_per_row..(v + 1) * self.words_per_row]
    }

    /// The complement graph: same vertices, off-diagonal adjacency
    /// flipped. `complement(g).m() == n(n-1)/2 - g.m()`.
    pub fn complement(&self) -> Graph {
        let mut b = Builder::new(self.n);
        let tail_mask = if self.n.is_multiple_of(64) { !0u64 } else { (1u64 << (self.n % 64)) - 1 };
        for u in 0..self.n {
            let row = &self.matrix[u * self.words_per_row..(u + 1) * self.words_per_row];
            for (w, &word) in row.iter().enumerate() {
                let mut bits = !word;
                if w + 1 == self.words_per_row {
                    bits &= tail_mask;
                }
                // Keep the diagonal clear and write each pair once.
                while bits != 0 {
                    let j = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if j > u {
                        b.add_edge(u as u32, j as u32);
                    }
                }
            }
        }
        b.finish()
    }

    /// Mean and population standard deviation of vertex degrees, over all
    /// vertices or over `subset`.
    pub fn degree_stats(&self, subset: Option<&[u32]>) -> Result<DegreeStats, GraphError> {
        let degrees: Vec<f64> = match subset {
            None => (0..self.n).map(|v| self.adj[v].len() as f64).collect(),
            Some(vs) => {
                for &v in vs {
                    if v as usize >= self.n {
                        return Err(GraphError::VertexOutOfRange { v, n: self.n });
                    }
                }
                vs.iter().map(|&v| self.adj[v as usize].len() as f64).collect()
            }
        };
        if degrees.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        let k = degrees.len() as f64;
        let mean = degrees.iter().sum::<f64>() / k;
        let var = degrees.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / k;
        Ok(DegreeStats { mean, sd: var.sqrt() })
    }

    /// Parses the DIMACS ASCII clique format.
    ///
    /// Grammar: optional `c` comment lines, exactly one problem line
    /// `p edge <n> <m>` (the `col` format token is accepted as an alias,
    /// as some published instances use it), then `e <u> <v>` lines with
    /// `1`-based endpoints. Duplicate and reversed-duplicate edge lines
    /// are merged with a warning; a problem-line edge count that
    /// disagrees with the deduplicated count is a warning, not an error.
    /// Self-loops and out-of-range endpoints are errors.
    pub fn parse_dimacs_ascii(r: impl BufRead) -> Result<Parsed, ParseError> {
        let mut header: Option<(usize, usize)> = None;
        let mut builder: Option<Builder> = None;
        let mut duplicates = 0usize;

        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let text = line.trim();
            if text.is_empty() || text.starts_with('c') {
                continue;
            }
            let mut tok = text.split_whitespace();
            match tok.next() {
                Some("p") => {
                    if header.is_some() {
                        return Err(ParseError::DuplicateProblemLine { line: lineno });
                    }
                    let fmt = tok.next();
                    if !matches!(fmt, Some("edge") | Some("col")) {
                        return Err(ParseError::BadProblemLine { line: lineno });
                    }
                    let n: usize = tok
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or(ParseError::BadProblemLine { line: lineno })?;
                    let m: usize = tok
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or(ParseError::BadProblemLine { line: lineno })?;
                    if tok.next().is_some() {
                        return Err(ParseError::BadProblemLine { line: lineno });
                    }
                    if n == 0 {
                        return Err(ParseError::ZeroVertices { line: lineno });
                    }
                    header = Some((n, m));
                    builder = Some(Builder::new(n));
                }
                Some("e") => {
                    let Some(b) = builder.as_mut() else {
                        return Err(ParseError::EdgeBeforeProblemLine { line: lineno });
                    };
                    let mut endpoint = || -> Result<u64, ParseError> {
                        tok.next().and_then(|s| s.parse().ok()).ok_or(ParseError::Malformed {
                            line: lineno,
                            content: text.to_string(),
                        })
                    };
                    let u = endpoint()?;
                    let v = endpoint()?;
                    if tok.next().is_some() {
                        return Err(ParseError::Malformed {
                            line: lineno,
                            content: text.to_string(),
                        });
                    }
                    let n = b.n;
                    for id in [u, v] {
                        if id < 1 || id > n as u64 {
                            return Err(ParseError::VertexOutOfRange { line: lineno, id, n });
                        }
                    }
                    if u == v {
                        return Err(ParseError::SelfLoop { line: lineno, v: u });
                    }
                    if !b.add_edge((u - 1) as u32, (v - 1) as u32) {
                        duplicates += 1;
                    }
                }
                _ => {
                    return Err(ParseError::Malformed { line: lineno, content: text.to_string() });
                }
            }
        }

        let (declared_n, declared_m) = header.ok_or(ParseError::MissingProblemLine)?;
        debug_assert_eq!(builder.as_ref().map(|b| b.n), Some(declared_n));
        let graph = builder.unwrap().finish();
        let mut warnings = Vec::new();
        if duplicates > 0 {
            warnings.push(ParseWarning::DuplicateEdges { count: duplicates });
        }
        if declared_m != graph.m {
            warnings
                .push(ParseWarning::EdgeCountMismatch { declared: declared_m, parsed: graph.m });
        }
        Ok(Parsed { graph, warnings })
    }

    /// Parses the DIMACS binary clique format.
    ///
    /// Layout: a first line holding the decimal byte length of the
    /// preamble, the preamble itself (comment lines and the problem
    /// line), then one packed lower-triangular bit row per vertex —
    /// vertex `i` (0-based) owns `i/8 + 1` bytes, and bit `7 - (j % 8)`
    /// of byte `j/8` is set iff `{i, j}` is an edge, for `j <= i`.
    pub fn parse_dimacs_binary(mut r: impl Read) -> Result<Parsed, ParseError> {
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;

        let nl = data.iter().position(|&b| b == b'\n').ok_or(ParseError::BadPreambleLength)?;
        let preamble_len: usize = std::str::from_utf8(&data[..nl])
            .ok()
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError::BadPreambleLength)?;
        let preamble_start = nl + 1;
        let preamble_end = preamble_start
            .checked_add(preamble_len)
            .filter(|&e| e <= data.len())
            .ok_or(ParseError::Truncated)?;
        let preamble = String::from_utf8_lossy(&data[preamble_start..preamble_end]);

        let mut header: Option<(usize, usize)> = None;
        for (idx, raw) in preamble.lines().enumerate() {
            let lineno = idx + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('c') {
                continue;
            }
            let mut tok = text.split_whitespace();
            if tok.next() != Some("p") {
                return Err(ParseError::Malformed { line: lineno, content: text.to_string() });
            }
            if header.is_some() {
                return Err(ParseError::DuplicateProblemLine { line: lineno });
            }
            if !matches!(tok.next(), Some("edge") | Some("col")) {
                return Err(ParseError::BadProblemLine { line: lineno });
            }
            let n: usize = tok
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or(ParseError::BadProblemLine { line: lineno })?;
            let m: usize = tok
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or(ParseError::BadProblemLine { line: lineno })?;
            if n == 0 {
                return Err(ParseError::ZeroVertices { line: lineno });
            }
            header = Some((n, m));
        }
        let (n, declared_m) = header.ok_or(ParseError::MissingProblemLine)?;

        let mut b = Builder::new(n);
        let mut offset = preamble_end;
        for i in 0..n {
            let row_bytes = i / 8 + 1;
            if offset + row_bytes > data.len() {
                return Err(ParseError::Truncated);
            }
            let row = &data[offset..offset + row_bytes];
            offset += row_bytes;
            for j in 0..=i {
                if row[j / 8] >> (7 - j % 8) & 1 == 1 {
                    if i == j {
                        return Err(ParseError::SelfLoop { line: 0, v: (i + 1) as u64 });
                    }
                    b.add_edge(i as u32, j as u32);
                }
            }
        }

        let graph = b.finish();
        let mut warnings = Vec::new();
        if declared_m != graph.m {
            warnings
                .push(ParseWarning::EdgeCountMismatch { declared: declared_m, parsed: graph.m });
        }
        Ok(Parsed { graph, warnings })
    }

    /// Serializes to the DIMACS ASCII format, edges sorted, `1`-based.
    pub fn to_dimacs_ascii(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n, self.m);
        for u in 0..self.n as u32 {
            for &v in self.neighbors(u) {
                if v > u {
                    out.push_str(&format!("e {} {}\n", u + 1, v + 1));
                }
            }
        }
        out
    }

    /// Serializes to the DIMACS binary format (see
    /// [`parse_dimacs_binary`](Graph::parse_dimacs_binary) for the layout).
    pub fn to_dimacs_binary(&self) -> Vec<u8> {
        let preamble = format!("p edge {} {}\n", self.n, self.m);
        let mut out = format!("{}\n", preamble.len()).into_bytes();
        out.extend_from_slice(preamble.as_bytes());
        for i in 0..self.n {
            let mut row = vec![0u8; i / 8 + 1];
            for j in 0..=i {
                if self.is_edge(i as u32, j as u32) {
                    row[j / 8] |= 1 << (7 - j % 8);
                }
            }
            out.extend_from_slice(&row);
        }
        out
    }
}
