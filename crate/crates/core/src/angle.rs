//! Angle normalization helpers.

use core::f64::consts::{PI, TAU};

/// Wraps into `[0, 2π)`.
pub fn wrap_two_pi(angle: f64) -> f64 {
    let mut r = libm::fmod(angle, TAU);
    if r < 0.0 {
        r += TAU;
    }
    // Adding 2π to a tiny negative remainder can round up to exactly 2π.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Folds a polar angle into `[0, π]`. The flag is set when the fold used the
/// identity `U(θ, φ, λ) ≅ U(2π − θ, φ + π, λ + π)`, in which case the caller
/// must shift φ and λ by π. Angles within [`POLAR_SNAP`] above π snap to π
/// so that π printed to finite precision does not flip the representation.
pub fn canonical_polar(theta: f64) -> (f64, bool) {
    let t = wrap_two_pi(theta);
    if t > PI + POLAR_SNAP {
        (TAU - t, true)
    } else if t > PI {
        (PI, false)
    } else {
        (t, false)
    }
}

pub const POLAR_SNAP: f64 = 1e-9;

/// Distance between two angles on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_two_pi(a - b);
    d.min(TAU - d)
}
