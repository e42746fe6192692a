use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};

/// Near point of the eye for young adults; the closest comfortable hand distance.
pub const MIN_DISTANCE: f64 = 0.125;

/// Nominal layer thickness per zone (near, medium, far): mean overshoot plus
/// two standard deviations of the measured overshoot in that zone.
pub const GUIDELINE_THICKNESS: [f64; 3] = [0.078, 0.042, 0.030];

/// Usable range of hand distances, measured from the eyes along the line of sight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionBounds {
    pub min_distance: f64,
    pub max_distance: f64,
}

impl InteractionBounds {
    pub fn new(min_distance: f64, max_distance: f64) -> Result<Self> {
        if !(min_distance.is_finite() && max_distance.is_finite())
            || min_distance <= 0.0
            || min_distance >= max_distance
        {
            return Err(invalid_arg(format!(
                "bounds need 0 < min < max, got [{min_distance}, {max_distance}]"
            )));
        }
        Ok(Self {
            min_distance,
            max_distance,
        })
    }

    /// Bounds from the default near point up to the user's arm length.
    pub fn for_arm_length(arm_length: f64) -> Result<Self> {
        Self::new(MIN_DISTANCE, arm_length)
    }

    /// Rest position of the hand: halfway between the two boundaries.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min_distance + self.max_distance)
    }

    pub fn range(&self) -> f64 {
        self.max_distance - self.min_distance
    }
}

/// Travel-distance zone relative to the rest position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    Near,
    Medium,
    Far,
}

impl Zone {
    pub const ALL: [Zone; 3] = [Zone::Near, Zone::Medium, Zone::Far];

    pub fn index(self) -> usize {
        match self {
            Zone::Near => 0,
            Zone::Medium => 1,
            Zone::Far => 2,
        }
    }

    pub fn nominal_thickness(self) -> f64 {
        GUIDELINE_THICKNESS[self.index()]
    }
}

/// Which zone a distance falls into, seen from `reference` and using the
/// half-range on that side of it. Thirds are half-open except the outermost,
/// which includes the boundary. Returns `None` outside the bounds.
pub fn zone_of(bounds: &InteractionBounds, reference: f64, distance: f64) -> Option<Zone> {
    if distance < bounds.min_distance || distance > bounds.max_distance {
        return None;
    }
    let half = if distance >= reference {
        bounds.max_distance - reference
    } else {
        reference - bounds.min_distance
    };
    if half <= 0.0 {
        return None;
    }
    let frac = (distance - reference).abs() / half;
    Some(if frac < 1.0 / 3.0 {
        Zone::Near
    } else if frac < 2.0 / 3.0 {
        Zone::Medium
    } else {
        Zone::Far
    })
}

/// A partition of the reach axis into layers. Layer `i` covers
/// `[boundaries[i], boundaries[i + 1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSet {
    boundaries: Vec<f64>,
    reference_point: f64,
}

/// Result of looking a distance up in a [`LayerSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Layer(usize),
    OutOfBounds,
}

impl Location {
    pub fn layer(self) -> Option<usize> {
        match self {
            Location::Layer(i) => Some(i),
            Location::OutOfBounds => None,
        }
    }
}

impl LayerSet {
    /// Builds a layer set from explicit boundaries. They must be finite and
    /// strictly increasing with at least one layer.
    pub fn from_boundaries(boundaries: Vec<f64>, reference_point: f64) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(invalid_arg("a layer set needs at least two boundaries"));
        }
        if boundaries.iter().any(|b| !b.is_finite())
            || boundaries.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(invalid_arg("layer boundaries must be strictly increasing"));
        }
        Ok(Self {
            boundaries,
            reference_point,
        })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn reference_point(&self) -> f64 {
        self.reference_point
    }

    pub fn len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(lower, upper)` of layer `i`.
    pub fn layer(&self, i: usize) -> (f64, f64) {
        (self.boundaries[i], self.boundaries[i + 1])
    }

    pub fn thickness(&self, i: usize) -> f64 {
        let (lo, hi) = self.layer(i);
        hi - lo
    }

    pub fn center(&self, i: usize) -> f64 {
        let (lo, hi) = self.layer(i);
        0.5 * (lo + hi)
    }

    pub fn bounds(&self) -> InteractionBounds {
        InteractionBounds {
            min_distance: self.boundaries[0],
            max_distance: self.boundaries[self.len()],
        }
    }
}

/// `n_layers` layers of equal thickness spanning the bounds.
pub fn partition_uniform(bounds: InteractionBounds, n_layers: usize) -> Result<LayerSet> {
    if n_layers == 0 {
        return Err(invalid_arg("n_layers must be at least 1"));
    }
    let range = bounds.range();
    let mut boundaries: Vec<f64> = (0..n_layers)
        .map(|i| bounds.min_distance + range * i as f64 / n_layers as f64)
        .collect();
    boundaries.push(bounds.max_distance);
    LayerSet::from_boundaries(boundaries, bounds.midpoint())
}

/// Zone-dependent partition: on both sides of the rest position the three
/// equal-length zones get layers close to the nominal guideline thickness
/// (thick near the rest position, thin far from it).
pub fn partition_guideline(bounds: InteractionBounds) -> Result<LayerSet> {
    let reference = bounds.midpoint();
    let inward = reference - bounds.min_distance;
    let outward = bounds.max_distance - reference;
    let nominal_near = Zone::Near.nominal_thickness();
    if inward < nominal_near || outward < nominal_near {
        return Err(invalid_arg(format!(
            "each half-range must be at least {nominal_near} m, got {inward:.4} / {outward:.4}"
        )));
    }

    // Offsets from the reference, walking outward through near, medium, far.
    let offsets = |half: f64| -> Vec<f64> {
        let zone_len = half / 3.0;
        let mut out = Vec::new();
        for zone in Zone::ALL {
            let count = ((zone_len / zone.nominal_thickness()).round() as usize).max(1);
            let start = zone_len * zone.index() as f64;
            for k in 1..=count {
                out.push(start + zone_len * k as f64 / count as f64);
            }
        }
        out
    };

    let mut boundaries = vec![bounds.min_distance];
    let inner = offsets(inward);
    // Skip the last inward offset: it is the min boundary itself.
    for off in inner.iter().rev().skip(1) {
        boundaries.push(reference - off);
    }
    boundaries.push(reference);
    let outer = offsets(outward);
    for off in &outer[..outer.len() - 1] {
        boundaries.push(reference + off);
    }
    boundaries.push(bounds.max_distance);
    LayerSet::from_boundaries(boundaries, reference)
}

/// Index of the layer containing `distance`; the upper bound is exclusive.
pub fn locate(layers: &LayerSet, distance: f64) -> Location {
    let b = &layers.boundaries;
    if !(distance >= b[0] && distance < b[b.len() - 1]) {
        return Location::OutOfBounds;
    }
    let idx = b.partition_point(|&x| x <= distance);
    Location::Layer(idx - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bounds(min: f64, max: f64) -> InteractionBounds {
        InteractionBounds::new(min, max).unwrap()
    }

    #[test]
    fn uniform_five_layers() {
        let set = partition_uniform(bounds(0.125, 0.625), 5).unwrap();
        let expected = [0.125, 0.225, 0.325, 0.425, 0.525, 0.625];
        for (b, e) in set.boundaries().iter().zip(expected) {
            assert!((b - e).abs() < 1e-12);
        }
        for i in 0..5 {
            assert!((set.thickness(i) - 0.1).abs() < 1e-12);
        }
        assert!((set.reference_point() - 0.375).abs() < 1e-12);
    }

    #[test]
    fn uniform_single_and_twelve() {
        let one = partition_uniform(bounds(0.125, 0.625), 1).unwrap();
        assert_eq!(one.boundaries(), &[0.125, 0.625]);
        let twelve = partition_uniform(bounds(0.125, 0.725), 12).unwrap();
        assert_eq!(twelve.len(), 12);
        for i in 0..12 {
            assert!((twelve.thickness(i) - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_layers_rejected() {
        assert!(matches!(
            partition_uniform(bounds(0.125, 0.625), 0),
            Err(crate::Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(InteractionBounds::new(0.5, 0.4).is_err());
        assert!(InteractionBounds::new(0.0, 0.4).is_err());
    }

    #[test]
    fn guideline_outward_half() {
        let set = partition_guideline(bounds(0.125, 0.725)).unwrap();
        let reference = set.reference_point();
        assert!((reference - 0.425).abs() < 1e-12);
        let outward: Vec<f64> = (0..set.len())
            .filter(|&i| set.layer(i).0 >= reference - 1e-12)
            .map(|i| set.thickness(i))
            .collect();
        let expected = [0.1, 0.05, 0.05, 1.0 / 30.0, 1.0 / 30.0, 1.0 / 30.0];
        assert_eq!(outward.len(), expected.len());
        for (t, e) in outward.iter().zip(expected) {
            assert!((t - e).abs() < 1e-9, "{t} vs {e}");
        }
    }

    #[test]
    fn guideline_is_mirror_symmetric() {
        let set = partition_guideline(bounds(0.125, 0.725)).unwrap();
        let n = set.len();
        for i in 0..n {
            assert!((set.thickness(i) - set.thickness(n - 1 - i)).abs() < 1e-9);
        }
    }

    #[test]
    fn guideline_nominal_values() {
        assert_eq!(GUIDELINE_THICKNESS, [0.078, 0.042, 0.030]);
        // mean overshoot + 2 sd per zone
        assert!((0.044f64 + 2.0 * 0.017 - 0.078).abs() < 1e-12);
        assert!((0.016f64 + 2.0 * 0.007 - 0.030).abs() < 1e-12);
        assert!(GUIDELINE_THICKNESS.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn guideline_rejects_small_range() {
        assert!(matches!(
            partition_guideline(bounds(0.125, 0.25)),
            Err(crate::Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn locate_examples() {
        let set = partition_uniform(bounds(0.125, 0.625), 5).unwrap();
        assert_eq!(locate(&set, 0.30), Location::Layer(1));
        assert_eq!(locate(&set, 0.625), Location::OutOfBounds);
        assert_eq!(locate(&set, 0.124), Location::OutOfBounds);
        assert_eq!(locate(&set, 0.125), Location::Layer(0));
        assert_eq!(locate(&set, set.boundaries()[2]), Location::Layer(2));
        assert_eq!(locate(&set, f64::NAN), Location::OutOfBounds);
    }

    #[test]
    fn zones_are_thirds() {
        let b = bounds(0.125, 0.725);
        let r = b.midpoint();
        assert_eq!(zone_of(&b, r, r + 0.05), Some(Zone::Near));
        assert_eq!(zone_of(&b, r, r + 0.15), Some(Zone::Medium));
        assert_eq!(zone_of(&b, r, r - 0.25), Some(Zone::Far));
        assert_eq!(zone_of(&b, r, 0.725), Some(Zone::Far));
        assert_eq!(zone_of(&b, r, 0.8), None);
    }

    fn brute_locate(b: &[f64], d: f64) -> Option<usize> {
        (0..b.len() - 1).find(|&i| b[i] <= d && d < b[i + 1])
    }

    proptest! {
        #[test]
        fn locate_matches_linear_scan(
            mut raw in proptest::collection::vec(0.0f64..1.0, 2..30),
            probes in proptest::collection::vec(-0.1f64..1.1, 1..50),
        ) {
            raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
            raw.dedup();
            prop_assume!(raw.len() >= 2);
            let set = LayerSet::from_boundaries(raw.clone(), raw[0]).unwrap();
            for d in probes.into_iter().chain(raw.iter().copied()) {
                prop_assert_eq!(locate(&set, d).layer(), brute_locate(&raw, d));
            }
        }

        #[test]
        fn partitions_tile_bounds(min in 0.05f64..0.3, span in 0.2f64..0.8, n in 1usize..80) {
            let b = bounds(min, min + span);
            for set in [partition_uniform(b, n).unwrap(), partition_guideline(b).unwrap()] {
                prop_assert_eq!(set.boundaries()[0], b.min_distance);
                prop_assert_eq!(set.boundaries()[set.len()], b.max_distance);
                prop_assert!(set.boundaries().windows(2).all(|w| w[0] < w[1]));
                // every point of [min, max) lands in exactly one layer
                for k in 0..200 {
                    let d = min + span * k as f64 / 200.0;
                    prop_assert!(locate(&set, d).layer().is_some());
                }
            }
        }
    }
}
