use crate::mathk;

/// A 2D image point in pixel coordinates.
///
/// Coordinates are finite by construction; [`Point2::new`] panics on NaN or
/// infinity, [`Point2::try_new`] reports it instead (use when parsing
/// external data).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        assert!(
            x.is_finite() && y.is_finite(),
            "Point2 coordinates must be finite"
        );
        Self { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Option<Self> {
        (x.is_finite() && y.is_finite()).then_some(Self { x, y })
    }

    /// Euclidean distance to another point.
    pub fn dist(&self, other: &Point2) -> f64 {
        mathk::hypot(self.x - other.x, self.y - other.y)
    }

    /// Squared Euclidean distance (avoids the square root).
    pub fn dist_sq(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_requires_finite() {
        assert!(Point2::try_new(1.0, 2.0).is_some());
        assert!(Point2::try_new(f64::NAN, 0.0).is_none());
        assert!(Point2::try_new(0.0, f64::INFINITY).is_none());
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn new_panics_on_nan() {
        let _ = Point2::new(f64::NAN, 0.0);
    }

    #[test]
    fn distance() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(3.0, 4.0);
        assert_eq!(a.dist(&b), 5.0);
        assert_eq!(a.dist_sq(&b), 25.0);
    }
}
