//! Placement scenarios of the small cell and the areas that enter the
//! access-probability design.

use std::f64::consts::PI;
use std::fmt;

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Small cell placement regime, by MBS distance `d1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Near the MBS: `ξ ≤ d1 ≤ r + ξ`.
    I,
    /// Interior: `r + ξ < d1 < R - r`.
    II,
    /// Near or beyond the macro edge: `R - r ≤ d1 ≤ R + r`.
    III,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::I => "I",
            Scenario::II => "II",
            Scenario::III => "III",
        })
    }
}

impl Scenario {
    /// Inner and outer MBS-distance radii of the region in which the macro
    /// user can be interfered with.
    pub fn region_radii(self, d1: f64, cfg: &SystemConfig) -> (f64, f64) {
        let r = cfg.small_radius;
        match self {
            Scenario::I => (cfg.min_distance, d1 + r),
            Scenario::II => (d1 - r, d1 + r),
            Scenario::III => (d1 - r, cfg.macro_radius),
        }
    }
}

pub fn classify_scenario(d1: f64, cfg: &SystemConfig) -> Result<Scenario> {
    let (xi, r, big_r) = (cfg.min_distance, cfg.small_radius, cfg.macro_radius);
    if !(d1 >= xi && d1 <= big_r + r) {
        return Err(Error::domain("d1", d1, format!("[{xi}, {}]", big_r + r)));
    }
    Ok(if d1 <= r + xi {
        Scenario::I
    } else if d1 < big_r - r {
        Scenario::II
    } else {
        Scenario::III
    })
}

/// Areas (km²) of the interference-capable region and of the part of it
/// covered by the small cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionAreas {
    pub s_region: f64,
    pub s_c: f64,
}

/// `x - sin x`, accurate for small `x`.
fn chord_excess(x: f64) -> f64 {
    if x < 0.5 {
        // Taylor series; terms alternate and shrink by at least 1/100.
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum = term;
        for n in (5..=19).step_by(2) {
            term *= -x2 / ((n - 1) * n) as f64;
            sum += term;
        }
        sum
    } else {
        x - x.sin()
    }
}

/// Area of the circular segment of a radius-`rho` disk cut off by a chord
/// subtending half-angle `theta`, given as `tan(theta/2)`.
fn segment_area(rho: f64, tan_half: f64) -> f64 {
    // segment = rho²/2 · (2θ − sin 2θ); past θ = π/2 use the complement
    // 2π − g(2π − 2θ) so neither branch cancels.
    let g = if tan_half <= 1.0 {
        chord_excess(4.0 * tan_half.atan())
    } else {
        2.0 * PI - chord_excess(4.0 * tan_half.recip().atan())
    };
    0.5 * rho * rho * g
}

/// Overlap area of disks of radii `a` and `b` whose centres are `d` apart.
///
/// Half-angles come from the half-angle tangent of the centre/centre/
/// intersection triangle, which stays well conditioned at tangency where the
/// arccos form loses about half the significant digits.
pub fn lens_area(d: f64, a: f64, b: f64) -> f64 {
    if d >= a + b {
        return 0.0;
    }
    let small = a.min(b);
    if d <= (a - b).abs() {
        return PI * small * small;
    }
    let sum_minus_d = (a + b) - d;
    let tan_half = |own: f64, other: f64| {
        ((sum_minus_d * ((other + d) - own)) / ((own + other + d) * ((own + d) - other))).sqrt()
    };
    segment_area(a, tan_half(a, b)) + segment_area(b, tan_half(b, a))
}

/// Small cell disk minus its overlap with the exclusion disk of radius `ξ`
/// around the MBS.
pub fn interference_area_scenario1(d1: f64, r: f64, xi: f64) -> Result<f64> {
    if !(d1 >= xi && d1 <= r + xi) {
        return Err(Error::domain("d1", d1, format!("[{xi}, {}]", r + xi)));
    }
    Ok(PI * r * r - lens_area(d1, r, xi))
}

/// Lens where the small cell disk overlaps the macro disk.
pub fn interference_area_scenario3(d1: f64, r: f64, big_r: f64) -> Result<f64> {
    if !(d1 >= big_r - r && d1 <= big_r + r) {
        return Err(Error::domain(
            "d1",
            d1,
            format!("[{}, {}]", big_r - r, big_r + r),
        ));
    }
    Ok(lens_area(d1, big_r, r))
}

pub fn region_areas(scenario: Scenario, d1: f64, cfg: &SystemConfig) -> Result<RegionAreas> {
    let actual = classify_scenario(d1, cfg)?;
    if actual != scenario {
        return Err(Error::domain(
            "d1",
            d1,
            format!("placement of scenario {scenario}, found scenario {actual}"),
        ));
    }
    let (xi, r, big_r) = (cfg.min_distance, cfg.small_radius, cfg.macro_radius);
    Ok(match scenario {
        Scenario::I => RegionAreas {
            s_region: PI * ((d1 + r).powi(2) - xi * xi),
            s_c: interference_area_scenario1(d1, r, xi)?,
        },
        Scenario::II => RegionAreas {
            s_region: PI * ((d1 + r).powi(2) - (d1 - r).powi(2)),
            s_c: PI * r * r,
        },
        Scenario::III => RegionAreas {
            s_region: PI * (big_r * big_r - (d1 - r).powi(2)),
            s_c: interference_area_scenario3(d1, r, big_r)?,
        },
    })
}

/// Area covered by the small cell that macro users can occupy, for any `d1`.
pub fn coverage_area(d1: f64, cfg: &SystemConfig) -> Result<f64> {
    let scenario = classify_scenario(d1, cfg)?;
    region_areas(scenario, d1, cfg).map(|a| a.s_c)
}
