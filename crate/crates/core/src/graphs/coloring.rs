use std::path::Path;

use super::graph::Graph;
use crate::error::{QsvError, Result};

/// Vertex colors `1..=m`, indexed by 0-based vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Result<Self> {
        if colors.iter().any(|&c| c == 0) {
            return Err(QsvError::invalid("colors are numbered from 1"));
        }
        Ok(Self { colors })
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    /// Largest color in use.
    pub fn num_colors(&self) -> usize {
        self.colors.iter().copied().max().unwrap_or(0)
    }

    /// Vertices of each color, colors ascending. Unused colors give empty
    /// classes.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_colors()];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c - 1].push(v);
        }
        out
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.colors.len() == g.n() && g.edges().all(|(a, b)| self.colors[a] != self.colors[b])
    }

    /// `vertex color` pairs, both 1-based, one per line.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut colors = vec![0usize; n];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let pair: Option<(usize, usize)> = match parts.as_slice() {
                [v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            match pair {
                Some((v, c)) if (1..=n).contains(&v) && c >= 1 && colors[v - 1] == 0 => {
                    colors[v - 1] = c
                }
                _ => {
                    return Err(QsvError::invalid(format!(
                        "line {}: expected 'vertex color' for a new vertex in 1..={n}, got '{line}'",
                        lineno + 1
                    )))
                }
            }
        }
        if let Some(v) = colors.iter().position(|&c| c == 0) {
            return Err(QsvError::invalid(format!("vertex {} has no color", v + 1)));
        }
        Self::new(colors)
    }

    pub fn read_file(path: &Path, n: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, n).map_err(|e| QsvError::schema(path.display().to_string(), e.to_string()))
    }
}

/// Visits vertices in index order and gives each the smallest color unused
/// by its already-colored neighbors.
pub fn greedy_coloring(g: &Graph) -> Coloring {
    let mut colors = vec![0usize; g.n()];
    for v in 0..g.n() {
        let taken: Vec<usize> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
        colors[v] = (1..).find(|c| !taken.contains(c)).expect("unbounded range");
    }
    Coloring { colors }
}
