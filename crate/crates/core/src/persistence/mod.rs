//! Persistence barcodes over GF(2).
//!
//! [`compute_barcode`] runs the standard column reduction of the boundary
//! matrix with clearing, dimensions processed from high to low. The same
//! pairs come out of reducing the anti-transposed (coboundary) matrix, which
//! is much cheaper on dense Rips complexes when only low degrees are wanted;
//! that route is available through [`compute_barcode_with`].
//!
//! [`betti_numbers_at_scale`] is an independent check: it recomputes Betti
//! numbers of a single sublevel complex by dense Gaussian elimination.

mod bottleneck;
mod oracle;
mod reduce;

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::Filtration;

pub use bottleneck::bottleneck_distance;
pub use oracle::betti_numbers_at_scale;

/// A half-open interval `[birth, death)` in homology degree `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceInterval {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for classes alive at the end of the filtration.
    pub death: f64,
}

impl PersistenceInterval {
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// Whether the class is alive at scale `t`.
    pub fn contains(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

/// Intervals sorted by `(dim, birth, death)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    intervals: Vec<PersistenceInterval>,
}

impl Barcode {
    pub fn new(mut intervals: Vec<PersistenceInterval>) -> Self {
        intervals.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Barcode { intervals }
    }

    pub fn intervals(&self) -> &[PersistenceInterval] {
        &self.intervals
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistenceInterval> + '_ {
        self.intervals.iter().filter(move |i| i.dim == dim)
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of degree-`dim` classes alive at scale `t`.
    pub fn rank_at(&self, dim: usize, t: f64) -> usize {
        self.in_dim(dim).filter(|i| i.contains(t)).count()
    }

    /// One `dim birth death` line per interval, `inf` for infinite deaths.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in &self.intervals {
            if i.is_infinite() {
                writeln!(out, "{} {} inf", i.dim, i.birth).unwrap();
            } else {
                writeln!(out, "{} {} {}", i.dim, i.birth, i.death).unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut intervals = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                path: "<barcode>".into(),
                line: n + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", fields.len())));
            }
            let dim = fields[0].parse().map_err(|e| bad(format!("dimension: {e}")))?;
            let birth = fields[1].parse().map_err(|e| bad(format!("birth: {e}")))?;
            let death = f64::from_str(fields[2]).map_err(|e| bad(format!("death: {e}")))?;
            intervals.push(PersistenceInterval { dim, birth, death });
        }
        Ok(Barcode::new(intervals))
    }
}

/// Which matrix the reduction runs on. Both produce identical barcodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Boundary matrix, clearing from the top dimension down.
    #[default]
    Homology,
    /// Anti-transposed boundary matrix, clearing from dimension 0 up.
    Cohomology,
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "homology" => Ok(Reduction::Homology),
            "cohomology" => Ok(Reduction::Cohomology),
            other => Err(Error::param(format!("unknown reduction '{other}'"))),
        }
    }
}

/// Barcode in degrees `0..=max_degree` via boundary-matrix reduction.
pub fn compute_barcode(f: &Filtration, max_degree: usize) -> Result<Barcode> {
    compute_barcode_with(f, max_degree, Reduction::Homology)
}

pub fn compute_barcode_with(f: &Filtration, max_degree: usize, algorithm: Reduction) -> Result<Barcode> {
    let complex = reduce::BoundaryComplex::new(f, max_degree + 1)?;
    let pairs = match algorithm {
        Reduction::Homology => complex.reduce_homology(max_degree),
        Reduction::Cohomology => complex.reduce_cohomology(max_degree),
    };
    let entries = f.entries();
    let mut intervals = Vec::with_capacity(pairs.finite.len() + pairs.essential.len());
    for (b, d) in pairs.finite {
        let (birth, death) = (entries[b].value, entries[d].value);
        if birth < death {
            intervals.push(PersistenceInterval {
                dim: entries[b].simplex.dim(),
                birth,
                death,
            });
        }
    }
    for b in pairs.essential {
        intervals.push(PersistenceInterval {
            dim: entries[b].simplex.dim(),
            birth: entries[b].value,
            death: f64::INFINITY,
        });
    }
    Ok(Barcode::new(intervals))
}

/// Number of degree-`dim` intervals strictly longer than `threshold`.
/// Infinite intervals always count.
pub fn count_long_bars(bc: &Barcode, dim: usize, threshold: f64) -> usize {
    bc.in_dim(dim).filter(|i| i.length() > threshold).count()
}
