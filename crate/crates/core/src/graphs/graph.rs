use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use super::pauli::{Pauli, PauliString};
use crate::error::{QsvError, Result};
use crate::qmath::{total_dim, PureState, C64};

/// Simple undirected graph. Vertices are 0-based in the API and 1-based in
/// the text format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(QsvError::invalid("graph needs at least one vertex"));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(QsvError::invalid(format!("edge ({a}, {b}) outside 0..{n}")));
            }
            if a == b {
                return Err(QsvError::invalid(format!("self-loop at vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(QsvError::invalid(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self { n, edges: set })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, &[])
    }

    pub fn path(n: usize) -> Result<Self> {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &e)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(QsvError::invalid("cycle needs n >= 3"));
        }
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &e)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let e: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::new(n, &e)
    }

    /// Vertex 0 joined to every other vertex.
    pub fn star(n: usize) -> Result<Self> {
        let e: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::new(n, &e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.neighbors(v).len()).max().unwrap_or(0)
    }

    /// Text form: a line with `n`, then one `i j` pair per line (1-based).
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| QsvError::invalid("graph text is empty"))?;
        let n: usize = first
            .parse()
            .map_err(|_| QsvError::invalid(format!("first line '{first}' is not a vertex count")))?;
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed: Option<(usize, usize)> = match parts.as_slice() {
                [a, b] => a.parse().ok().zip(b.parse().ok()),
                _ => None,
            };
            match parsed {
                Some((a, b)) if a >= 1 && b >= 1 => edges.push((a - 1, b - 1)),
                _ => {
                    return Err(QsvError::invalid(format!(
                        "line {}: expected two 1-based vertex indices, got '{line}'",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(n, &edges)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| QsvError::schema(path.display().to_string(), e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (a, b) in self.edges() {
            let _ = writeln!(s, "{} {}", a + 1, b + 1);
        }
        s
    }
}

/// `g_i = X_i ⊗ Z_{N(i)}`, one per vertex.
pub fn generators(g: &Graph) -> Vec<PauliString> {
    (0..g.n())
        .map(|v| {
            let mut letters = vec![Pauli::I; g.n()];
            letters[v] = Pauli::X;
            for u in g.neighbors(v) {
                letters[u] = Pauli::Z;
            }
            PauliString::new(0, letters)
        })
        .collect()
}

/// `∏ CZ_{ij} |+⟩^{⊗n}`: amplitude `2^{−n/2}(−1)^{e(b)}`, where `e(b)` counts
/// edges with both endpoints set in `b`.
pub fn graph_state(g: &Graph) -> Result<PureState> {
    let n = g.n();
    let dims = vec![2; n];
    let d = total_dim(&dims)?;
    let masks: Vec<usize> = g
        .edges()
        .map(|(a, b)| (1usize << (n - 1 - a)) | (1usize << (n - 1 - b)))
        .collect();
    let amp = 1.0 / (d as f64).sqrt();
    let v = DVector::from_fn(d, |b, _| {
        let parity = masks.iter().filter(|&&m| b & m == m).count() % 2;
        C64::new(if parity == 0 { amp } else { -amp }, 0.0)
    });
    PureState::normalized(dims, v)
}
