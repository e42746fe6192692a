use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::grid::{Cell, FootGrid, Point2};
use super::TapSample;
use crate::error::{invalid_arg, Error, Result};

/// Quantile of the χ² distribution with two degrees of freedom.
pub fn chi2_quantile_2dof(coverage: f64) -> f64 {
    -2.0 * (1.0 - coverage).ln()
}

/// Covariance ellipse of a point cloud scaled to hold `coverage` of a
/// fitted bivariate Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEllipse {
    pub center: Point2,
    /// Unit eigenvectors, major axis first.
    pub axes: [Point2; 2],
    /// Covariance eigenvalues, descending.
    pub eigenvalues: [f64; 2],
    pub coverage: f64,
    pub semi_axes: [f64; 2],
    pub area: f64,
}

impl ProbabilityEllipse {
    /// Squared Mahalanobis distance of `p` from the centre.
    pub fn mahalanobis_sq(&self, p: Point2) -> f64 {
        let (dx, dy) = (p.x - self.center.x, p.y - self.center.y);
        self.axes
            .iter()
            .zip(self.eigenvalues)
            .map(|(a, l)| {
                let proj = dx * a.x + dy * a.y;
                proj * proj / l
            })
            .sum()
    }

    /// Strict interior test.
    pub fn contains(&self, p: Point2) -> bool {
        self.mahalanobis_sq(p) < chi2_quantile_2dof(self.coverage)
    }

    /// Orientation of the major axis in radians.
    pub fn angle(&self) -> f64 {
        self.axes[0].y.atan2(self.axes[0].x)
    }
}

/// Fits the ellipse from the sample covariance (n − 1 normalisation).
pub fn probability_ellipse(points: &[Point2], coverage: f64) -> Result<ProbabilityEllipse> {
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(invalid_arg("coverage must lie in (0, 1)"));
    }
    if points.len() < 3 {
        return Err(Error::DegenerateData("need at least three points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = points.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let (sxx, syy, sxy) = (sxx / (n - 1.0), syy / (n - 1.0), sxy / (n - 1.0));

    let half_trace = 0.5 * (sxx + syy);
    let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let (l1, l2) = (half_trace + disc, half_trace - disc);
    if !(l2 > 1e-12 * l1.max(f64::MIN_POSITIVE)) || !l1.is_finite() {
        return Err(Error::DegenerateData("covariance is rank-deficient".into()));
    }
    // major axis of [[sxx, sxy], [sxy, syy]]
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let major = Point2::new(theta.cos(), theta.sin());
    let minor = Point2::new(-theta.sin(), theta.cos());

    let chi2 = chi2_quantile_2dof(coverage);
    Ok(ProbabilityEllipse {
        center: Point2::new(mx, my),
        axes: [major, minor],
        eigenvalues: [l1, l2],
        coverage,
        semi_axes: [(chi2 * l1).sqrt(), (chi2 * l2).sqrt()],
        area: std::f64::consts::PI * chi2 * (l1 * l2).sqrt(),
    })
}

/// Fraction of `other_points` strictly inside the ellipse.
pub fn ellipse_overlap(ellipse: &ProbabilityEllipse, other_points: &[Point2]) -> Result<f64> {
    if other_points.is_empty() {
        return Err(invalid_arg("no points to test"));
    }
    let inside = other_points.iter().filter(|&&p| ellipse.contains(p)).count();
    Ok(inside as f64 / other_points.len() as f64)
}

/// Mean overlap between each target's ellipse and the taps aimed at its
/// grid neighbours, split by neighbour axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisOverlap {
    /// Neighbours in the adjacent row, same column (radial direction).
    pub across_rows: Option<f64>,
    /// Neighbours in the adjacent column, same row (angular direction).
    pub across_columns: Option<f64>,
}

pub fn adjacent_overlaps(
    grid: &FootGrid,
    samples: &[TapSample],
    coverage: f64,
) -> Result<AxisOverlap> {
    let mut by_cell: BTreeMap<Cell, Vec<Point2>> = BTreeMap::new();
    for s in samples {
        if let Some(cell) = s.label {
            by_cell.entry(cell).or_default().push(s.point);
        }
    }
    let mut rows_acc = Vec::new();
    let mut cols_acc = Vec::new();
    for (&cell, points) in &by_cell {
        let ellipse = probability_ellipse(points, coverage)?;
        let neighbours = |cells: [Option<Cell>; 2]| -> Vec<Point2> {
            cells
                .into_iter()
                .flatten()
                .filter_map(|c| by_cell.get(&c))
                .flatten()
                .copied()
                .collect()
        };
        let row_nb = neighbours([
            (cell.row > 1).then(|| Cell::new(cell.row - 1, cell.col)),
            (cell.row < grid.rows).then(|| Cell::new(cell.row + 1, cell.col)),
        ]);
        let col_nb = neighbours([
            (cell.col > 1).then(|| Cell::new(cell.row, cell.col - 1)),
            (cell.col < grid.cols).then(|| Cell::new(cell.row, cell.col + 1)),
        ]);
        if !row_nb.is_empty() {
            rows_acc.push(ellipse_overlap(&ellipse, &row_nb)?);
        }
        if !col_nb.is_empty() {
            cols_acc.push(ellipse_overlap(&ellipse, &col_nb)?);
        }
    }
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    Ok(AxisOverlap {
        across_rows: mean(&rows_acc),
        across_columns: mean(&cols_acc),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chi2_quantile() {
        assert!((chi2_quantile_2dof(0.95) - 5.991).abs() < 1e-3);
    }

    #[test]
    fn axis_aligned_cloud() {
        // sample variances with n - 1 = 3: var_x = 8/3, var_y = 2/3
        let pts = [
            Point2::new(2.0, 0.0),
            Point2::new(-2.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.0, -1.0),
        ];
        let e = probability_ellipse(&pts, 0.95).unwrap();
        assert!((e.eigenvalues[0] - 8.0 / 3.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(e.axes[0].x.abs() > 0.999);
        let chi2 = chi2_quantile_2dof(0.95);
        assert!((e.area - std::f64::consts::PI * chi2 * (16.0f64 / 9.0).sqrt()).abs() < 1e-12);
        assert!(e.contains(Point2::new(0.0, 0.0)));
        assert!(!e.contains(Point2::new(10.0, 0.0)));
    }

    #[test]
    fn collinear_points_rejected() {
        let pts: Vec<_> = (0..10).map(|i| Point2::new(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(probability_ellipse(&pts, 0.95), Err(Error::DegenerateData(_))));
        assert!(probability_ellipse(&pts[..2], 0.95).is_err());
    }

    #[test]
    fn far_cluster_has_no_overlap() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(0.1, 0.0),
            Point2::new(0.0, 0.1),
            Point2::new(0.1, 0.1),
        ];
        let e = probability_ellipse(&pts, 0.95).unwrap();
        let far: Vec<_> = pts.iter().map(|p| Point2::new(p.x + 5.0, p.y)).collect();
        assert_eq!(ellipse_overlap(&e, &far).unwrap(), 0.0);
        assert!(ellipse_overlap(&e, &[]).is_err());
    }

    proptest! {
        #[test]
        fn rotation_and_scale(angle in 0.0f64..std::f64::consts::TAU, scale in 0.1f64..10.0,
                              raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5..40)) {
            let pts: Vec<Point2> = raw.iter().map(|&(x, y)| Point2::new(x, 0.3 * y + 0.2 * x)).collect();
            let Ok(base) = probability_ellipse(&pts, 0.95) else { return Ok(()) };
            prop_assume!(base.eigenvalues[1] > 1e-6);
            let (s, c) = angle.sin_cos();
            let rotated: Vec<Point2> = pts.iter().map(|p| Point2::new(c * p.x - s * p.y, s * p.x + c * p.y)).collect();
            let scaled: Vec<Point2> = pts.iter().map(|p| Point2::new(scale * p.x, scale * p.y)).collect();
            let r = probability_ellipse(&rotated, 0.95).unwrap();
            let k = probability_ellipse(&scaled, 0.95).unwrap();
            prop_assert!((r.area - base.area).abs() <= 1e-9 * base.area.max(1e-12));
            for i in 0..2 {
                prop_assert!((k.semi_axes[i] - scale * base.semi_axes[i]).abs() <= 1e-9 * scale * base.semi_axes[0]);
            }
        }
    }
}
