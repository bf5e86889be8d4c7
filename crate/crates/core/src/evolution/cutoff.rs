//! Radial cutoff weights `X_R` (equal to `r^2` inside `R`, zero beyond `3R`,
//! with `X_R'' <= 2`) and `Y_R` (switching on over `[R/2, R]`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Grid;

// X'' = 2 - D B(s) - 2 T((s - A) / W) on [1, 3]: B is a unit-mass
// (1 - x^2)^3 bump centered at C1 with half width HW, T the quintic
// smoothstep. A and D make X and X' vanish at s = 3.
const C1: f64 = 1.25;
const HW: f64 = 0.25;
const W: f64 = 0.5;
const BUMP_NORM: f64 = 35.0 / 32.0;

fn shift() -> f64 {
    1.0 + (87.0f64 / 56.0).sqrt()
}

fn depth() -> f64 {
    2.0 * shift() + W
}

/// `[X, X', X'', X''', X'''']` of the unit profile at `s >= 0`.
pub fn x_profile(s: f64) -> [f64; 5] {
    if s <= 1.0 {
        return [s * s, 2.0 * s, 2.0, 0.0, 0.0];
    }
    // identically zero past the smoothstep; skip the cancelling closed form
    if s >= shift() + W {
        return [0.0; 5];
    }
    let d = depth();
    let x = (s - C1) / HW;
    let (b0, b1, b2, b3, b4) = if x >= 1.0 {
        let phi2_1 = 0.5 - 0.25 + 0.1 - 1.0 / 56.0 + 16.0 / 35.0 + 0.125;
        (0.0, 32.0 / 35.0, phi2_1 + 32.0 / 35.0 * (x - 1.0), 0.0, 0.0)
    } else {
        let q = 1.0 - x * x;
        let phi1 = x - x.powi(3) + 0.6 * x.powi(5) - x.powi(7) / 7.0 + 16.0 / 35.0;
        let phi2 = x * x / 2.0 - x.powi(4) / 4.0 + x.powi(6) / 10.0 - x.powi(8) / 56.0 + 16.0 / 35.0 * x + 0.125;
        (q.powi(3), phi1, phi2, -6.0 * x * q * q, -6.0 * q * q + 24.0 * x * x * q)
    };
    let z = (s - shift()) / W;
    let (t0, t1, t2, t3, t4) = if z <= 0.0 {
        (0.0, 0.0, 0.0, 0.0, 0.0)
    } else if z >= 1.0 {
        let y = z - 1.0;
        (1.0, 0.5 + y, 1.0 / 7.0 + 0.5 * y + 0.5 * y * y, 0.0, 0.0)
    } else {
        (
            10.0 * z.powi(3) - 15.0 * z.powi(4) + 6.0 * z.powi(5),
            2.5 * z.powi(4) - 3.0 * z.powi(5) + z.powi(6),
            0.5 * z.powi(5) - 0.5 * z.powi(6) + z.powi(7) / 7.0,
            30.0 * z * z * (1.0 - z) * (1.0 - z),
            60.0 * z - 180.0 * z * z + 120.0 * z.powi(3),
        )
    };
    let k = d * BUMP_NORM;
    [
        s * s - k * HW * b2 - 2.0 * W * W * t2,
        2.0 * s - k * b1 - 2.0 * W * t1,
        2.0 - k / HW * b0 - 2.0 * t0,
        -k / (HW * HW) * b3 - 2.0 / W * t3,
        -k / HW.powi(3) * b4 - 2.0 / (W * W) * t4,
    ]
}

/// `[Y, Y']` of the unit switch: cubic smoothstep on `[1/2, 1]`.
pub fn y_profile(s: f64) -> [f64; 2] {
    if s <= 0.5 {
        [0.0, 0.0]
    } else if s >= 1.0 {
        [1.0, 0.0]
    } else {
        let z = 2.0 * s - 1.0;
        [z * z * (3.0 - 2.0 * z), 12.0 * z * (1.0 - z)]
    }
}

/// Radius-`R` cutoff with derivatives evaluated at arbitrary radii.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Cutoff {
    pub radius: f64,
}

impl Cutoff {
    /// `[w, w', w'', w''', w'''']` for `w = X_R(r) = R^2 X(r / R)`.
    pub fn x(&self, r: f64) -> [f64; 5] {
        let big = self.radius;
        let v = x_profile(r / big);
        [v[0] * big * big, v[1] * big, v[2], v[3] / big, v[4] / (big * big)]
    }

    /// `w'(r) / r`, finite at the origin.
    pub fn x1_over_r(&self, r: f64) -> f64 {
        if r <= self.radius {
            2.0
        } else {
            self.x(r)[1] / r
        }
    }

    /// `[Y_R, Y_R']` with `Y_R(r) = Y(r / R)`.
    pub fn y(&self, r: f64) -> [f64; 2] {
        let v = y_profile(r / self.radius);
        [v[0], v[1] / self.radius]
    }
}

/// Cutoff samples on a grid: `x[k][j]` is the k-th derivative of `X_R` at
/// node j, `x_face[k][f]` the same at face f; `y`, `y1` sample `Y_R`, `Y_R'`.
#[derive(Debug, Clone)]
pub struct CutoffWeights {
    pub cutoff: Cutoff,
    pub x: [Vec<f64>; 5],
    pub x_face: [Vec<f64>; 5],
    pub y: Vec<f64>,
    pub y1: Vec<f64>,
}

impl CutoffWeights {
    pub fn radius(&self) -> f64 {
        self.cutoff.radius
    }
}

/// Largest violations found by sampling: `(max X'' - 2, max |X - r^2| on [0, R],
/// max_k |X^{(k)}(3R)|, min Y', max Y' R)`.
pub fn check_cutoff(c: &Cutoff, samples: usize) -> (f64, f64, f64, f64, f64) {
    let big = c.radius;
    let mut over = f64::NEG_INFINITY;
    let mut inner = 0.0f64;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for i in 0..=samples {
        let r = 3.5 * big * i as f64 / samples as f64;
        let v = c.x(r);
        over = over.max(v[2] - 2.0);
        if r <= big {
            inner = inner.max((v[0] - r * r).abs());
        }
        let y1 = c.y(r)[1] * big;
        ymin = ymin.min(y1);
        ymax = ymax.max(y1);
    }
    let end = c.x(3.0 * big);
    let scale = [big * big, big, 1.0, 1.0 / big, 1.0 / (big * big)];
    let tail = end.iter().zip(scale).map(|(v, s)| (v / s).abs()).fold(0.0, f64::max);
    (over, inner, tail, ymin, ymax)
}

/// Build and sample the cutoffs, verifying their constraints first.
pub fn build_cutoffs(radius: f64, grid: &Grid) -> Result<CutoffWeights> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Cutoff(format!("radius must be positive, got {radius}")));
    }
    let cutoff = Cutoff { radius };
    let (over, inner, tail, ymin, ymax) = check_cutoff(&cutoff, 20_000);
    if over > 1e-8 {
        return Err(Error::Cutoff(format!("X'' exceeds 2 by {over:e}")));
    }
    if inner > 1e-12 * radius * radius {
        return Err(Error::Cutoff(format!("X differs from r^2 inside R by {inner:e}")));
    }
    if tail > 1e-9 {
        return Err(Error::Cutoff(format!("X does not vanish at 3R ({tail:e})")));
    }
    if ymin < 0.0 || ymax > 3.0 + 1e-12 {
        return Err(Error::Cutoff(format!("Y' outside [0, 3/R]: [{ymin}, {ymax}]")));
    }
    let nodes: Vec<f64> = (0..grid.len()).map(|j| grid.radius(j)).collect();
    let faces: Vec<f64> = (0..=grid.len()).map(|f| grid.face(f).abs()).collect();
    let sample = |pts: &[f64]| -> [Vec<f64>; 5] {
        let rows: Vec<[f64; 5]> = pts.iter().map(|&r| cutoff.x(r)).collect();
        std::array::from_fn(|k| rows.iter().map(|v| v[k]).collect())
    };
    let ys: Vec<[f64; 2]> = nodes.iter().map(|&r| cutoff.y(r)).collect();
    Ok(CutoffWeights {
        cutoff,
        x: sample(&nodes),
        x_face: sample(&faces),
        y: ys.iter().map(|v| v[0]).collect(),
        y1: ys.iter().map(|v| v[1]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inner_region_is_r_squared() {
        let c = Cutoff { radius: 4.0 };
        let v = c.x(2.0);
        assert_relative_eq!(v[0], 4.0);
        assert_eq!(v[2], 2.0);
    }

    #[test]
    fn second_derivative_bound() {
        let (over, inner, tail, ymin, ymax) = check_cutoff(&Cutoff { radius: 1.0 }, 200_000);
        assert!(over <= 1e-8, "{over}");
        assert_eq!(inner, 0.0);
        assert!(tail < 1e-11, "{tail}");
        assert!(ymin >= 0.0);
        assert_relative_eq!(ymax, 3.0, max_relative = 1e-8);
    }

    #[test]
    fn derivatives_are_consistent() {
        // each returned derivative matches a central difference of the previous one
        let h = 1e-5;
        for i in 0..400 {
            let s = 0.9 + 2.2 * i as f64 / 400.0;
            let (a, b) = (x_profile(s - h), x_profile(s + h));
            let v = x_profile(s);
            for k in 0..4 {
                let fd = (b[k] - a[k]) / (2.0 * h);
                assert!((fd - v[k + 1]).abs() < 1e-5 * (1.0 + v[k + 1].abs()), "s={s} k={k}: {fd} vs {}", v[k + 1]);
            }
        }
    }

    #[test]
    fn continuity_at_joints() {
        let e = 1e-13;
        for s in [1.0, C1 + HW, shift(), shift() + W, 3.0] {
            let (a, b) = (x_profile(s - e), x_profile(s + e));
            for k in 0..5 {
                assert!((a[k] - b[k]).abs() < 1e-6, "s={s} k={k}");
            }
        }
    }

    #[test]
    fn switch_midpoint() {
        let c = Cutoff { radius: 8.0 };
        assert_relative_eq!(c.y(6.0)[0], 0.5);
        assert_relative_eq!(c.y(6.0)[1] * 8.0, 3.0);
        assert_eq!(c.y(3.9)[0], 0.0);
        assert_eq!(c.y(8.5)[0], 1.0);
    }
}
