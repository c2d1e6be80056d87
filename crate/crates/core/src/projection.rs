//! Principal component projection for plotting.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

#[derive(Debug, Clone)]
pub struct Projection {
    /// Projected cloud, rows aligned with the input.
    pub cloud: PointCloud,
    /// Squared singular values of the centred data, largest first.
    pub variances: Vec<f64>,
}

impl Projection {
    /// Fraction of total variance carried by the kept components.
    pub fn captured_fraction(&self) -> f64 {
        let total: f64 = self.variances.iter().sum();
        if total == 0.0 {
            return 1.0;
        }
        let kept: f64 = self.variances.iter().take(self.cloud.ambient_dim()).sum();
        kept / total
    }
}

/// Projects the centred cloud onto its top `target_dim` principal axes.
///
/// Each axis is sign-normalised so its largest-magnitude coordinate is
/// positive, which makes the output independent of the SVD's sign choices.
pub fn pca(cloud: &PointCloud, target_dim: usize) -> Result<Projection> {
    let n = cloud.ambient_dim();
    if target_dim == 0 || target_dim > n {
        return Err(Error::param(format!(
            "target dimension must be between 1 and {n}, got {target_dim}"
        )));
    }
    let m = cloud.len();
    if m == 0 {
        return Ok(Projection {
            cloud: PointCloud::from_flat(target_dim, Vec::new())?,
            variances: Vec::new(),
        });
    }
    let mut mean = vec![0.0; n];
    for p in cloud.points() {
        for (a, x) in mean.iter_mut().zip(p) {
            *a += x;
        }
    }
    mean.iter_mut().for_each(|a| *a /= m as f64);
    let centred = DMatrix::from_fn(m, n, |i, j| cloud.point(i)[j] - mean[j]);

    // The right singular vectors are the eigenvectors of the n x n scatter
    // matrix, which stays small even when m is large.
    let scatter = centred.transpose() * &centred;
    let eig = scatter.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let variances: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();

    let mut axes = DMatrix::zeros(n, target_dim);
    for (c, &i) in order.iter().take(target_dim).enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        let lead = v
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if lead < 0.0 {
            v = -v;
        }
        axes.set_column(c, &v);
    }
    let projected = centred * axes;
    let mut coords = Vec::with_capacity(m * target_dim);
    for i in 0..m {
        coords.extend(projected.row(i).iter());
    }
    Ok(Projection {
        cloud: PointCloud::from_flat(target_dim, coords)?,
        variances,
    })
}
