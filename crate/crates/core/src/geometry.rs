use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point in the horizontal plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned rectangle `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Area {
    pub min: Point,
    pub max: Point,
}

impl Area {
    pub const fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.max.x > self.min.x && self.max.y > self.min.y
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.min.x, self.max.x), p.y.clamp(self.min.y, self.max.y))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Maps unit-square coordinates onto the area.
    pub fn lerp(&self, fx: f64, fy: f64) -> Point {
        Point::new(self.min.x + fx * self.width(), self.min.y + fy * self.height())
    }
}

impl Default for Area {
    fn default() -> Self {
        Area::new(Point::new(0.0, 0.0), Point::new(150.0, 150.0))
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Removes 2π jumps from a sequence of angles.
pub fn unwrap_angles(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut prev: Option<f64> = None;
    for &a in angles {
        let next = match prev {
            None => a,
            Some(p) => p + wrap_angle(a - p),
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_lands_in_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(0.2) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn unwrap_removes_jump() {
        let u = unwrap_angles(&[PI - 0.01, -PI + 0.01, -PI + 0.03]);
        assert!((u[1] - (PI + 0.01)).abs() < 1e-12);
        assert!((u[2] - (PI + 0.03)).abs() < 1e-12);
    }

    #[test]
    fn clamp_and_contains() {
        let a = Area::default();
        let p = a.clamp(Point::new(-3.0, 200.0));
        assert_eq!(p, Point::new(0.0, 150.0));
        assert!(a.contains(p));
    }
}
