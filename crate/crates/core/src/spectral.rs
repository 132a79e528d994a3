//! Normalized-laplacian eigenmaps of a neighbor graph.
//!
//! For adjacency `M` and degrees `D`, the normalized laplacian is
//! `D^{-1/2} (D − M) D^{-1/2}`: unit diagonal, `−1/√(dᵢdⱼ)` on edges. Its
//! eigenvectors for the smallest eigenvalues, scaled entrywise by `√dᵢ`, give
//! the coordinates of each word. Column 0 is the trivial (degree-proportional)
//! one; columns 1 and 2 make the 2-D map.

use std::io::{BufRead, Write};

use log::{info, warn};

use crate::error::{Error, Result};
use crate::graph::NeighborGraph;
pub use crate::linalg::{smallest_eigenpairs, EigenSystem, SymmetricMatrix};

pub fn normalized_laplacian(adjacency: &SymmetricMatrix, degrees: &[f64]) -> Result<SymmetricMatrix> {
    let n = adjacency.order();
    if degrees.len() != n {
        return Err(Error::Argument(format!(
            "{} degrees for a matrix of order {n}",
            degrees.len()
        )));
    }
    if let Some(vertex) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree { vertex });
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut l = SymmetricMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let m = adjacency.get(i, j);
            if m != 0.0 {
                l.set(i, j, -m * inv_sqrt[i] * inv_sqrt[j]);
            }
        }
    }
    Ok(l)
}

/// Per-word coordinates from the premultiplied eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEmbedding {
    pub labels: Vec<String>,
    /// The eigenvalues behind each coordinate column.
    pub eigenvalues: Vec<f64>,
    /// One row per word, one column per eigenpair.
    pub coords: Vec<Vec<f64>>,
}

impl SpectralEmbedding {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn columns(&self) -> usize {
        self.coords.first().map_or(self.eigenvalues.len(), Vec::len)
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.coords.iter().map(|row| row[c]).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `word<TAB>c0<TAB>…<TAB>c(m−1)` with 12 significant digits.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (label, row) in self.labels.iter().zip(&self.coords) {
            w.write_all(label.as_bytes())?;
            for x in row {
                write!(w, "\t{}", format_significant(*x, 12))?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads coordinates written by [`write_tsv`](Self::write_tsv).
    /// Eigenvalues are not stored in the file and come back empty.
    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self> {
        let mut labels = Vec::new();
        let mut coords: Vec<Vec<f64>> = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let label = fields.next().unwrap_or_default();
            if label.is_empty() {
                return Err(Error::parse(n + 1, "empty word"));
            }
            let row = fields
                .map(|f| f.parse::<f64>().map_err(|_| Error::parse(n + 1, format!("bad coordinate {f:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = coords.first() {
                if first.len() != row.len() {
                    return Err(Error::parse(n + 1, "inconsistent number of columns"));
                }
            }
            labels.push(label.to_string());
            coords.push(row);
        }
        Ok(SpectralEmbedding {
            labels,
            eigenvalues: Vec::new(),
            coords,
        })
    }
}

/// Formats like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Embeds every vertex of `g` using the `m` smallest eigenpairs.
pub fn embed(g: &NeighborGraph, m: usize) -> Result<SpectralEmbedding> {
    let (adjacency, degrees) = g.adjacency_and_degrees()?;
    let laplacian = normalized_laplacian(&adjacency, &degrees)?;
    let components = g.connected_components();
    if components.len() > 1 {
        let sizes: Vec<usize> = components.iter().map(Vec::len).collect();
        warn!(
            "graph has {} connected components (sizes {:?}); the zero eigenvalue is degenerate",
            components.len(),
            sizes
        );
        for comp in components.iter().skip(1).take(10) {
            let words: Vec<&str> = comp.iter().take(8).map(|&v| g.labels[v].as_str()).collect();
            warn!("  component: {}", words.join(" "));
        }
    }
    let sys = smallest_eigenpairs(&laplacian, m)?;
    info!("eigenvalues: {:?}", sys.values);
    let sqrt_deg: Vec<f64> = degrees.iter().map(|d| d.sqrt()).collect();
    let coords = (0..g.len())
        .map(|i| sys.vectors.iter().map(|v| v[i] * sqrt_deg[i]).collect())
        .collect();
    Ok(SpectralEmbedding {
        labels: g.labels.clone(),
        eigenvalues: sys.values,
        coords,
    })
}
