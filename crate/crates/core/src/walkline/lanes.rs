use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};

/// Where a lateral position falls: a lane id (0 is the inactive null lane,
/// negative ids to the left) or outside the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Track {
    Lane(i32),
    OffTrack,
}

impl Track {
    pub fn lane(self) -> Option<i32> {
        match self {
            Track::Lane(k) => Some(k),
            Track::OffTrack => None,
        }
    }
}

/// Lane strip centred on the walking path. `n_lanes` option lanes, half on
/// each side, plus the null lane in the middle, all of equal width.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaneLayout {
    pub n_lanes: u32,
    pub total_width: f64,
    pub length: f64,
    pub lane_width: f64,
    #[serde(skip)]
    boundaries: Vec<f64>,
}

impl LaneLayout {
    pub fn half(&self) -> i32 {
        (self.n_lanes / 2) as i32
    }

    /// Lateral centre of lane `k`.
    pub fn center(&self, lane: i32) -> f64 {
        lane as f64 * self.lane_width
    }

    /// `[lo, hi)` of lane `k`.
    pub fn interval(&self, lane: i32) -> (f64, f64) {
        let idx = (lane + self.half()) as usize;
        (self.boundaries[idx], self.boundaries[idx + 1])
    }

    /// Option lane ids, left to right, without the null lane.
    pub fn option_lanes(&self) -> impl Iterator<Item = i32> {
        let h = self.half();
        (-h..=h).filter(|&k| k != 0)
    }

    pub fn contains_lane(&self, lane: i32) -> bool {
        lane.abs() <= self.half()
    }
}

/// Lane widths are `total_width / (n_lanes + 1)`; the extra slot is the null lane.
pub fn build_lanes(n_lanes: u32, total_width: f64, length: f64) -> Result<LaneLayout> {
    if n_lanes == 0 || n_lanes % 2 != 0 {
        return Err(invalid_arg(format!("n_lanes must be even and >= 2, got {n_lanes}")));
    }
    if !(total_width > 0.0 && length > 0.0) {
        return Err(invalid_arg("total width and length must be positive"));
    }
    let lane_width = total_width / (n_lanes as f64 + 1.0);
    let half = (n_lanes / 2) as i32;
    let mut boundaries = Vec::with_capacity(n_lanes as usize + 2);
    boundaries.push(-0.5 * total_width);
    for k in -half..half {
        boundaries.push((k as f64 + 0.5) * lane_width);
    }
    boundaries.push(0.5 * total_width);
    Ok(LaneLayout {
        n_lanes,
        total_width,
        length,
        lane_width,
        boundaries,
    })
}

/// Lane under lateral position `x`; `|x| >= total_width / 2` is off-track.
pub fn lane_at(layout: &LaneLayout, x: f64) -> Track {
    if !(x.abs() < 0.5 * layout.total_width) {
        return Track::OffTrack;
    }
    let idx = layout.boundaries.partition_point(|&b| b <= x) - 1;
    Track::Lane(idx as i32 - layout.half())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn widths_follow_formula() {
        for (n, w) in [(8, 1.0 / 9.0), (12, 1.0 / 13.0), (16, 1.0 / 17.0)] {
            let layout = build_lanes(n, 1.0, 20.0).unwrap();
            assert!((layout.lane_width - w).abs() < 1e-12);
        }
        assert!((build_lanes(8, 1.0, 20.0).unwrap().lane_width - 0.1111).abs() < 1e-4);
        assert!((build_lanes(16, 1.0, 20.0).unwrap().lane_width - 0.0588).abs() < 1e-4);
    }

    #[test]
    fn odd_or_zero_rejected() {
        assert!(build_lanes(0, 1.0, 20.0).is_err());
        assert!(build_lanes(7, 1.0, 20.0).is_err());
        assert!(build_lanes(8, 0.0, 20.0).is_err());
    }

    #[test]
    fn lane_lookup_examples() {
        let layout = build_lanes(8, 1.0, 20.0).unwrap();
        assert_eq!(lane_at(&layout, 0.0), Track::Lane(0));
        assert_eq!(lane_at(&layout, 0.30), Track::Lane(3));
        let (lo, hi) = layout.interval(3);
        assert!((lo - 0.2778).abs() < 1e-4 && (hi - 0.3889).abs() < 1e-4);
        assert_eq!(lane_at(&layout, 0.50), Track::OffTrack);
        assert_eq!(lane_at(&layout, -0.50), Track::OffTrack);
        assert_eq!(lane_at(&layout, -0.49), Track::Lane(-4));
        assert_eq!(lane_at(&layout, f64::NAN), Track::OffTrack);
        assert_eq!(lane_at(&layout, lo), Track::Lane(3));
    }

    #[test]
    fn lookup_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 8, 12, 16] {
            let layout = build_lanes(n, 1.0, 20.0).unwrap();
            for _ in 0..100_000 {
                let x: f64 = rng.random_range(-0.6..0.6);
                let brute = (-layout.half()..=layout.half())
                    .find(|&k| {
                        let (lo, hi) = layout.interval(k);
                        lo <= x && x < hi
                    })
                    .filter(|_| x.abs() < 0.5)
                    .map_or(Track::OffTrack, Track::Lane);
                assert_eq!(lane_at(&layout, x), brute);
            }
        }
    }

    #[test]
    fn lanes_tile_the_strip() {
        let layout = build_lanes(12, 1.0, 20.0).unwrap();
        let h = layout.half();
        assert_eq!(layout.interval(-h).0, -0.5);
        assert_eq!(layout.interval(h).1, 0.5);
        for k in -h..h {
            assert_eq!(layout.interval(k).1, layout.interval(k + 1).0);
        }
        assert_eq!(layout.option_lanes().count(), 12);
    }
}
