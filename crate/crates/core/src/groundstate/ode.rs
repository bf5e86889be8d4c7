//! Adaptive Dormand–Prince 5(4) integrator for small first-order systems.

/// Observer verdict after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
}

impl Default for Dopri {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-30, h_init: 1e-6 }
    }
}

/// Samples at the requested targets (in order), plus the final state.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub samples: Vec<[f64; N]>,
    pub stopped: bool,
    pub last_t: f64,
    pub last_y: [f64; N],
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dopri {
    /// Integrate `y' = f(t, y)` from `(t0, y0)` through the monotone list of
    /// `targets`, landing exactly on each. `watch` sees every accepted step and
    /// may stop the integration early.
    pub fn integrate<const N: usize>(
        &self,
        f: impl Fn(f64, &[f64; N]) -> [f64; N],
        t0: f64,
        y0: [f64; N],
        targets: &[f64],
        mut watch: impl FnMut(f64, &[f64; N]) -> Flow,
    ) -> Trajectory<N> {
        let mut t = t0;
        let mut y = y0;
        let mut samples = Vec::with_capacity(targets.len());
        let dir = match targets.last() {
            Some(&end) if end < t0 => -1.0,
            _ => 1.0,
        };
        let mut h = self.h_init.abs();
        for &target in targets {
            while dir * (target - t) > 0.0 {
                let remaining = (target - t).abs();
                let last = h >= remaining;
                let step = if last { remaining } else { h };
                let hs = dir * step;
                let k1 = f(t, &y);
                let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
                let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
                let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
                let k6 = f(
                    t + hs,
                    &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                );
                let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
                let k7 = f(t + hs, &y_new);
                let mut err: f64 = 0.0;
                for i in 0..N {
                    let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    err = err.max((e / scale).abs());
                }
                if !err.is_finite() {
                    h = step / 10.0;
                    if h < 1e-300 {
                        return Trajectory { samples, stopped: true, last_t: t, last_y: y };
                    }
                    continue;
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if err <= 1.0 {
                    t = if last { target } else { t + hs };
                    y = y_new;
                    if !last || factor < 1.0 {
                        h = step * factor;
                    }
                    if watch(t, &y) == Flow::Stop {
                        return Trajectory { samples, stopped: true, last_t: t, last_y: y };
                    }
                } else {
                    h = step * factor;
                }
            }
            samples.push(y);
        }
        Trajectory { samples, stopped: false, last_t: t, last_y: y }
    }
}
