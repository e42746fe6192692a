use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};

/// Default radial height of one grid row (m).
pub const ROW_HEIGHT: f64 = 0.085;
/// Default gap between the anchor foot and the first row (m).
pub const INNER_RADIUS: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Grid cell; rows count outward from the foot, columns from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub const fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "r{}c{}", self.row, self.col)
    }
}

/// Polar extent of a cell in the body frame; angles in degrees measured
/// counter-clockwise from the body's right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellBounds {
    pub r_lo: f64,
    pub r_hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

/// Semicircular annulus in front of the dominant foot, split into
/// `rows × cols` polar cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootGrid {
    pub rows: u32,
    pub cols: u32,
    pub row_height: f64,
    pub inner_radius: f64,
    pub anchor: Point2,
    /// Unit forward direction of the body.
    pub facing: Point2,
}

pub fn build_grid(rows: u32, cols: u32, row_height: f64, inner_radius: f64) -> Result<FootGrid> {
    if rows == 0 || cols == 0 {
        return Err(invalid_arg(format!("grid needs rows, cols >= 1, got {rows}x{cols}")));
    }
    if !(row_height > 0.0) || !(inner_radius >= 0.0) {
        return Err(invalid_arg("row height must be positive and inner radius non-negative"));
    }
    Ok(FootGrid {
        rows,
        cols,
        row_height,
        inner_radius,
        anchor: Point2::new(0.0, 0.0),
        facing: Point2::new(0.0, 1.0),
    })
}

impl FootGrid {
    /// Same grid anchored at `anchor` facing `facing` (normalised here).
    pub fn placed(mut self, anchor: Point2, facing: Point2) -> Result<Self> {
        let len = facing.x.hypot(facing.y);
        if !(len > 0.0 && len.is_finite()) {
            return Err(invalid_arg("facing direction must be non-zero"));
        }
        self.anchor = anchor;
        self.facing = Point2::new(facing.x / len, facing.y / len);
        Ok(self)
    }

    pub fn outer_radius(&self) -> f64 {
        self.inner_radius + self.rows as f64 * self.row_height
    }

    pub fn col_span(&self) -> f64 {
        180.0 / self.cols as f64
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (1..=self.rows).flat_map(move |row| (1..=self.cols).map(move |col| Cell { row, col }))
    }

    pub fn n_cells(&self) -> usize {
        (self.rows * self.cols) as usize
    }

    pub fn contains_cell(&self, cell: Cell) -> bool {
        (1..=self.rows).contains(&cell.row) && (1..=self.cols).contains(&cell.col)
    }

    fn row_edge(&self, k: u32) -> f64 {
        self.inner_radius + k as f64 * self.row_height
    }

    fn col_edge(&self, k: u32) -> f64 {
        // edge between column k and k+1; exact at both ends
        if k == 0 {
            180.0
        } else if k == self.cols {
            0.0
        } else {
            180.0 - k as f64 * self.col_span()
        }
    }

    pub fn cell_bounds(&self, cell: Cell) -> CellBounds {
        CellBounds {
            r_lo: self.row_edge(cell.row - 1),
            r_hi: self.row_edge(cell.row),
            theta_lo: self.col_edge(cell.col),
            theta_hi: self.col_edge(cell.col - 1),
        }
    }

    /// Body-frame coordinates: x to the right, y forward.
    pub fn to_body(&self, p: Point2) -> Point2 {
        let (dx, dy) = (p.x - self.anchor.x, p.y - self.anchor.y);
        let (fx, fy) = (self.facing.x, self.facing.y);
        Point2::new(dx * fy - dy * fx, dx * fx + dy * fy)
    }

    pub fn from_body(&self, b: Point2) -> Point2 {
        let (fx, fy) = (self.facing.x, self.facing.y);
        Point2::new(
            self.anchor.x + b.x * fy + b.y * fx,
            self.anchor.y - b.x * fx + b.y * fy,
        )
    }

    /// `(radius, angle in degrees)` of a point in the body frame.
    pub fn polar(&self, p: Point2) -> (f64, f64) {
        let b = self.to_body(p);
        (b.x.hypot(b.y), b.y.atan2(b.x).to_degrees())
    }

    /// Containment with half-open intervals; the leftmost column also owns
    /// the 180° edge so the cells cover the closed half-plane.
    pub fn cell_contains(&self, cell: Cell, p: Point2) -> bool {
        let (r, theta) = self.polar(p);
        let b = self.cell_bounds(cell);
        let theta_ok = b.theta_lo <= theta
            && (theta < b.theta_hi || (cell.col == 1 && theta == b.theta_hi));
        b.r_lo <= r && r < b.r_hi && theta_ok
    }

    /// Polar centre of a cell (mid-radius, mid-angle) in world coordinates.
    pub fn centroid(&self, cell: Cell) -> Point2 {
        let b = self.cell_bounds(cell);
        let r = 0.5 * (b.r_lo + b.r_hi);
        let theta = (0.5 * (b.theta_lo + b.theta_hi)).to_radians();
        self.from_body(Point2::new(r * theta.cos(), r * theta.sin()))
    }
}

/// Cell under a tap, or `None` for a miss.
pub fn hit_test(grid: &FootGrid, tap: Point2) -> Option<Cell> {
    let (r, theta) = grid.polar(tap);
    if !(r >= grid.inner_radius && r < grid.outer_radius()) || !(0.0..=180.0).contains(&theta) {
        return None;
    }
    let mut row = (((r - grid.inner_radius) / grid.row_height).floor() as i64 + 1)
        .clamp(1, grid.rows as i64) as u32;
    while row > 1 && r < grid.row_edge(row - 1) {
        row -= 1;
    }
    while row < grid.rows && r >= grid.row_edge(row) {
        row += 1;
    }
    let mut col = (((180.0 - theta) / grid.col_span()).floor() as i64 + 1)
        .clamp(1, grid.cols as i64) as u32;
    while col > 1 && theta >= grid.col_edge(col - 1) {
        col -= 1;
    }
    while col < grid.cols && theta < grid.col_edge(col) {
        col += 1;
    }
    Some(Cell { row, col })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(rows: u32, cols: u32) -> FootGrid {
        build_grid(rows, cols, ROW_HEIGHT, INNER_RADIUS).unwrap()
    }

    #[test]
    fn cell_geometry() {
        let g = grid(3, 6);
        let b = g.cell_bounds(Cell::new(2, 3));
        assert!((b.r_lo - 0.235).abs() < 1e-12 && (b.r_hi - 0.32).abs() < 1e-12);
        assert!((b.theta_lo - 90.0).abs() < 1e-12 && (b.theta_hi - 120.0).abs() < 1e-12);
        assert!((g.outer_radius() - g.inner_radius - 0.255).abs() < 1e-12);
    }

    #[test]
    fn smallest_grid_is_two_quarters() {
        let g = grid(1, 2);
        assert_eq!(hit_test(&g, Point2::new(-0.15, 0.15)), Some(Cell::new(1, 1)));
        assert_eq!(hit_test(&g, Point2::new(0.15, 0.15)), Some(Cell::new(1, 2)));
    }

    #[test]
    fn hit_examples() {
        let g = grid(3, 6);
        assert_eq!(hit_test(&g, Point2::new(0.0, 0.25)), Some(Cell::new(2, 3)));
        assert_eq!(hit_test(&g, Point2::new(0.0, -0.25)), None);
        assert_eq!(hit_test(&g, Point2::new(0.0, INNER_RADIUS)), Some(Cell::new(1, 3)));
        assert_eq!(hit_test(&g, Point2::new(0.0, 0.1)), None);
        assert_eq!(hit_test(&g, Point2::new(0.0, 0.5)), None);
        assert_eq!(hit_test(&g, Point2::new(-0.2, 0.0)), Some(Cell::new(1, 1)));
        assert_eq!(hit_test(&g, Point2::new(0.2, 0.0)), Some(Cell::new(1, 6)));
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(build_grid(0, 2, ROW_HEIGHT, INNER_RADIUS).is_err());
        assert!(build_grid(2, 0, ROW_HEIGHT, INNER_RADIUS).is_err());
    }

    #[test]
    fn placement_rotates_frame() {
        // facing +x: the body's forward direction is world +x
        let g = grid(3, 6)
            .placed(Point2::new(1.0, 2.0), Point2::new(2.0, 0.0))
            .unwrap();
        assert_eq!(hit_test(&g, Point2::new(1.25, 2.0)), Some(Cell::new(2, 3)));
        for cell in g.cells() {
            assert_eq!(hit_test(&g, g.centroid(cell)), Some(cell));
        }
    }

    #[test]
    fn hit_test_matches_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (rows, cols) in [(1, 2), (2, 4), (3, 6), (3, 7)] {
            let g = grid(rows, cols);
            for _ in 0..20_000 {
                let p = Point2::new(rng.random_range(-0.5..0.5), rng.random_range(-0.1..0.5));
                let hits: Vec<Cell> = g.cells().filter(|&c| g.cell_contains(c, p)).collect();
                assert!(hits.len() <= 1);
                assert_eq!(hit_test(&g, p), hits.first().copied());
            }
        }
    }
}
