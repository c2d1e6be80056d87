//! Scoring a partition against generator ground truth.

use serde::{Deserialize, Serialize};

use crate::detector::{Label, Partition};
use crate::error::{Error, Result};
use crate::geometry::{GroundTruthLabel, PointCloud, Stratum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub precision: f64,
    pub recall: f64,
    /// Number of points whose true class is this one.
    pub support: usize,
    pub predicted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub proximity_radius: f64,
    /// `confusion[truth][predicted]`, classes in [`Label::ALL`] order.
    pub confusion: [[usize; 3]; 3],
    pub boundary: ClassScore,
    pub manifold: ClassScore,
    pub intersection: ClassScore,
}

impl EvaluationReport {
    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn score(&self, label: Label) -> &ClassScore {
        match label {
            Label::Boundary => &self.boundary,
            Label::Manifold => &self.manifold,
            Label::Intersection => &self.intersection,
        }
    }

    /// Fraction of all points whose predicted class equals the true class.
    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 1.0;
        }
        (0..3).map(|i| self.confusion[i][i]).sum::<usize>() as f64 / total as f64
    }
}

/// True class of a point: intersection within `proximity` of the singular
/// locus, otherwise boundary if the generator put it in the boundary
/// stratum, otherwise manifold.
pub fn true_label(gt: &GroundTruthLabel, proximity: f64) -> Label {
    if gt.distance_to_singular_locus <= proximity {
        Label::Intersection
    } else if Stratum::from_id(gt.stratum_id) == Some(Stratum::Boundary) {
        Label::Boundary
    } else {
        Label::Manifold
    }
}

/// Confusion matrix and per-class scores of `partition` over `cloud`.
///
/// A class never predicted has precision 1 when it also has no support and
/// 0 otherwise; a class with no support has recall 1.
pub fn evaluate(partition: &Partition, cloud: &PointCloud, proximity_radius: f64) -> Result<EvaluationReport> {
    let gt = cloud.ground_truth().ok_or(Error::MissingGroundTruth)?;
    if !(proximity_radius >= 0.0) {
        return Err(Error::param("proximity radius must be non-negative"));
    }
    let mut confusion = [[0usize; 3]; 3];
    for (&i, &label) in partition.indices.iter().zip(&partition.labels) {
        let g = gt.get(i).ok_or(Error::Bounds {
            index: i,
            len: gt.len(),
        })?;
        confusion[true_label(g, proximity_radius).index()][label.index()] += 1;
    }
    let score = |c: usize| {
        let support: usize = confusion[c].iter().sum();
        let predicted: usize = (0..3).map(|t| confusion[t][c]).sum();
        let hit = confusion[c][c] as f64;
        ClassScore {
            precision: match (predicted, support) {
                (0, 0) => 1.0,
                (0, _) => 0.0,
                _ => hit / predicted as f64,
            },
            recall: if support == 0 { 1.0 } else { hit / support as f64 },
            support,
            predicted,
        }
    };
    Ok(EvaluationReport {
        proximity_radius,
        confusion,
        boundary: score(Label::Boundary.index()),
        manifold: score(Label::Manifold.index()),
        intersection: score(Label::Intersection.index()),
    })
}
