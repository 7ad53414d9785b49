//! Polarization axes and the Malus-law projection probability.
//!
//! A linear polarization axis is a direction in the transverse plane
//! identified modulo a half turn: an analyzer rotated by 180 degrees is the
//! same physical element. [`Angle`] stores the canonical representative in
//! `[0, pi)`, measured from the x axis; the y axis sits at `pi/2`.

use core::f64::consts::{FRAC_PI_2, PI};

/// A polarization axis in radians, canonicalized to `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    /// The x axis, the reference direction for all angles.
    pub const X: Angle = Angle(0.0);

    /// The y axis, orthogonal complement of x.
    pub const Y: Angle = Angle(FRAC_PI_2);

    /// Canonicalizes an arbitrary radian value into `[0, pi)`.
    pub fn new(radians: f64) -> Self {
        debug_assert!(radians.is_finite());
        let mut r = radians % PI;
        if r < 0.0 {
            r += PI;
        }
        // The `+ PI` above can round to PI exactly; fold that back to 0.
        // The second arm rewrites -0.0 as 0.0 so formatting stays stable.
        if r >= PI || r == 0.0 {
            r = 0.0;
        }
        Angle(r)
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::new(degrees * (PI / 180.0))
    }

    /// Canonical representative in radians, always in `[0, pi)`.
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn to_degrees(self) -> f64 {
        self.0 * (180.0 / PI)
    }

    /// The orthogonal complement: the axis a quarter turn away.
    pub fn complement(self) -> Self {
        Self::new(self.0 + FRAC_PI_2)
    }

    /// Rotates the axis by `delta` radians and re-canonicalizes.
    pub fn rotate(self, delta: f64) -> Self {
        Self::new(self.0 + delta)
    }

    /// Distance to `other` in the mod-pi axis metric, in `[0, pi/2]`.
    pub fn axis_distance(self, other: Angle) -> f64 {
        let d = libm::fabs(self.0 - other.0);
        if d > FRAC_PI_2 {
            PI - d
        } else {
            d
        }
    }
}

/// Malus law: `cos^2(a - b)`, the probability that a photon polarized along
/// `b` passes an ideal analyzer oriented along `a`. Total and symmetric.
pub fn malus(a: Angle, b: Angle) -> f64 {
    let c = libm::cos(a.radians() - b.radians());
    c * c
}
