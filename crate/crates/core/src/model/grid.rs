use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Radial profiles on `(0, r_max)` in dimension `d`.
    Radial,
    /// Full line `[-L, L]`, `d = 1` only.
    Line,
}

/// Surface measure of the unit sphere in `R^d` (2 for d = 1).
pub fn sphere_measure(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI * sphere_measure(d - 2) / (d as f64 - 2.0),
    }
}

/// Cell-centered finite-volume grid.
///
/// Nodes sit at cell centers so no sample touches the origin. Radial cells
/// carry their exact shell volume as quadrature weight; the flux couplings
/// `kappa` live on the `n + 1` cell faces. The outer face (and both line
/// ends) carries a homogeneous Dirichlet condition imposed at the face.
#[derive(Debug, Clone)]
pub struct Grid {
    geometry: Geometry,
    d: usize,
    extent: f64,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kappa: Vec<f64>,
}

impl Grid {
    pub fn new(geometry: Geometry, extent: f64, n: usize, d: usize) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        if n < 16 {
            return Err(Error::InvalidGrid(format!("need at least 16 nodes, got {n}")));
        }
        if d == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        match geometry {
            Geometry::Radial => Ok(Self::radial(extent, n, d)),
            Geometry::Line => {
                if d != 1 {
                    return Err(Error::InvalidGrid(format!("line geometry requires d = 1, got {d}")));
                }
                if n % 2 == 1 {
                    // an odd count would put a node on the singular point x = 0
                    return Err(Error::InvalidGrid(format!("line geometry needs an even node count, got {n}")));
                }
                Ok(Self::line(extent, n))
            }
        }
    }

    fn radial(r_max: f64, n: usize, d: usize) -> Self {
        let h = r_max / n as f64;
        let s = sphere_measure(d);
        let df = d as f64;
        let nodes = (0..n).map(|j| (j as f64 + 0.5) * h).collect();
        let weights = (0..n)
            .map(|j| {
                let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
                s * (b.powi(d as i32) - a.powi(d as i32)) / df
            })
            .collect();
        let mut kappa: Vec<f64> = (0..=n).map(|f| s * (f as f64 * h).powi(d as i32 - 1) / h).collect();
        // symmetry at the origin: no flux through the first face
        kappa[0] = 0.0;
        Self { geometry: Geometry::Radial, d, extent: r_max, h, nodes, weights, kappa }
    }

    fn line(l: f64, n: usize) -> Self {
        let h = 2.0 * l / n as f64;
        let nodes = (0..n).map(|j| -l + (j as f64 + 0.5) * h).collect();
        Self {
            geometry: Geometry::Line,
            d: 1,
            extent: l,
            h,
            nodes,
            weights: vec![h; n],
            kappa: vec![1.0 / h; n + 1],
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn extent(&self) -> f64 {
        self.extent
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// Distance of node `j` from the origin.
    pub fn radius(&self, j: usize) -> f64 {
        self.nodes[j].abs()
    }

    /// Quadrature of a real integrand given per node.
    pub fn integrate(&self, vals: impl IntoIterator<Item = f64>) -> f64 {
        self.weights.iter().zip(vals).map(|(w, v)| w * v).sum()
    }

    /// Cell averages of `|x|^-mu`: the shell integral of the weight divided by
    /// the cell volume. Exact for the singular cell at the origin.
    pub fn inverse_power_average(&self, mu: f64) -> Vec<f64> {
        let e = self.d as f64 - mu;
        let n = self.len();
        let s = match self.geometry {
            Geometry::Radial => sphere_measure(self.d),
            Geometry::Line => 1.0,
        };
        (0..n)
            .map(|j| {
                let (lo, hi) = (self.face(j), self.face(j + 1));
                let (a, b) = if hi <= 0.0 { (-hi, -lo) } else { (lo, hi) };
                s * (b.powf(e) - a.powf(e)) / e / self.weights[j]
            })
            .collect()
    }

    /// Position of face `f` (radius for radial grids).
    pub fn face(&self, f: usize) -> f64 {
        match self.geometry {
            Geometry::Radial => f as f64 * self.h,
            Geometry::Line => -self.extent + f as f64 * self.h,
        }
    }

    /// Jump across face `f` with ghost values supplied by the boundary
    /// conditions: zero jump at the radial origin, Dirichlet at the other ends
    /// (face value zero, so the jump over the half cell is doubled).
    #[inline]
    pub fn face_jump(&self, u: &[Complex64], f: usize) -> Complex64 {
        let n = u.len();
        if f == 0 {
            match self.geometry {
                Geometry::Radial => Complex64::new(0.0, 0.0),
                Geometry::Line => 2.0 * u[0],
            }
        } else if f == n {
            -2.0 * u[n - 1]
        } else {
            u[f] - u[f - 1]
        }
    }

    /// Face weight used in the gradient quadrature. Boundary half-cells with
    /// doubled jumps contribute `2 kappa |u|^2`, matching the Laplacian stencil.
    #[inline]
    pub fn face_weight(&self, f: usize) -> f64 {
        let n = self.nodes.len();
        if f == 0 || f == n {
            self.kappa[f] / 2.0
        } else {
            self.kappa[f]
        }
    }

    /// Discrete `int |grad u|^2`.
    pub fn grad_sq(&self, u: &[Complex64]) -> f64 {
        (0..=u.len()).map(|f| self.face_weight(f) * self.face_jump(u, f).norm_sqr()).sum()
    }

    /// Symmetric tridiagonal stiffness `K` with `Delta_h = W^-1 K`.
    /// Returns (diagonal, off-diagonal) where off[j] couples nodes j and j+1.
    pub fn stiffness(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.nodes.len();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        for j in 0..n {
            let left = if j == 0 {
                match self.geometry {
                    Geometry::Radial => 0.0,
                    Geometry::Line => 2.0 * self.kappa[0],
                }
            } else {
                self.kappa[j]
            };
            let right = if j == n - 1 { 2.0 * self.kappa[n] } else { self.kappa[j + 1] };
            diag[j] = -(left + right);
            if j + 1 < n {
                off[j] = self.kappa[j + 1];
            }
        }
        (diag, off)
    }

    /// Second-order finite-volume Laplacian (`f'' + (d-1)/r f'` radially).
    pub fn laplacian(&self, u: &[Complex64]) -> Vec<Complex64> {
        let n = u.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (f, kf) in self.kappa.iter().enumerate() {
            let flux = self.face_jump(u, f) * (*kf);
            if f > 0 {
                out[f - 1] += flux;
            }
            if f < n {
                out[f] -= flux;
            }
        }
        for (o, w) in out.iter_mut().zip(&self.weights) {
            *o /= *w;
        }
        out
    }
}
