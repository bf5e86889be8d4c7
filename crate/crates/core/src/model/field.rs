use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{Geometry, Grid};
use super::params::ScalingPair;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Complex samples on a grid, one per node.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite sample at node {j}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![ZERO; n] }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn from_real(grid: Arc<Grid>, vals: &[f64]) -> Result<Self> {
        Self::new(grid, vals.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|z| z * c).collect() }
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|z| z.conj()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.norm_sqr() == 0.0)
    }

    pub fn mass(&self) -> f64 {
        self.grid.integrate(self.values.iter().map(|z| z.norm_sqr()))
    }

    /// Value at an arbitrary coordinate by four-point cubic Lagrange
    /// interpolation. Radial fields use their even reflection below the first
    /// node; outside the grid the field is zero.
    pub fn sample(&self, x: f64) -> Complex64 {
        sample_cubic(&self.grid, &self.values, x)
    }

    /// Interpolate onto another grid of the same geometry and dimension.
    /// Points beyond this field's grid get zero.
    pub fn resample(&self, grid: &Arc<Grid>) -> Result<Self> {
        if grid.geometry() != self.grid.geometry() || grid.d() != self.grid.d() {
            return Err(Error::InvalidGrid("resampling needs matching geometry and dimension".into()));
        }
        Self::from_fn(grid.clone(), |x| self.sample(x))
    }

    pub fn laplacian(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.grid.laplacian(&self.values) }
    }
}

fn ghost(grid: &Grid, vals: &[Complex64], k: i64) -> Complex64 {
    let n = vals.len() as i64;
    if k >= n {
        return ZERO;
    }
    if k >= 0 {
        return vals[k as usize];
    }
    match grid.geometry() {
        Geometry::Radial => {
            let m = -1 - k;
            if m < n {
                vals[m as usize]
            } else {
                ZERO
            }
        }
        Geometry::Line => ZERO,
    }
}

pub(crate) fn sample_cubic(grid: &Grid, vals: &[Complex64], x: f64) -> Complex64 {
    let h = grid.h();
    let x0 = grid.nodes()[0];
    let t = (x - x0) / h;
    let n = vals.len() as f64;
    // more than two cells outside: all four stencil points vanish
    if t < -2.0 - n || t > n + 1.0 {
        return ZERO;
    }
    let i = t.floor();
    let s = t - i;
    let i = i as i64;
    let c = [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ];
    (0..4).map(|k| ghost(grid, vals, i - 1 + k as i64) * c[k]).sum()
}

/// Result of a dilation, with a flag raised when the resampling lost mass
/// that lived beyond the rescaled grid.
#[derive(Debug, Clone)]
pub struct Dilated {
    pub field: Field,
    pub leaked: bool,
}

/// `x -> e^{alpha lambda} f(e^{beta lambda} x)` resampled onto the same grid.
pub fn scale_field(f: &Field, sp: &ScalingPair, lambda: f64) -> Dilated {
    let amp = (sp.alpha * lambda).exp();
    let dil = (sp.beta * lambda).exp();
    let grid = f.grid().clone();
    let values: Vec<Complex64> = grid.nodes().iter().map(|&x| amp * f.sample(dil * x)).collect();
    // Sampling reaches only |y| <= dil * extent; anything of f beyond is dropped.
    let reach = dil * grid.extent();
    let lost: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(f.values())
        .filter(|((x, _), _)| x.abs() > reach)
        .map(|((_, w), z)| w * z.norm_sqr())
        .sum();
    let total = f.mass();
    let leaked = total > 0.0 && lost > 1e-12 * total;
    Dilated { field: Field { grid, values }, leaked }
}

/// `x -> f(x - y)` on a line grid, zero extension.
pub fn translate_field(f: &Field, y: f64) -> Result<Field> {
    if f.grid().geometry() != Geometry::Line {
        return Err(Error::Geometry("translation requires line geometry".into()));
    }
    let grid = f.grid().clone();
    let values = grid.nodes().iter().map(|&x| f.sample(x - y)).collect();
    Ok(Field { grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(grid: &Arc<Grid>, c: f64) -> Field {
        Field::from_fn(grid.clone(), |x| Complex64::new((-(x - c) * (x - c) / 2.0).exp(), 0.0)).unwrap()
    }

    #[test]
    fn rejects_bad_samples() {
        let g = Arc::new(Grid::new(Geometry::Line, 1.0, 16, 1).unwrap());
        assert!(Field::new(g.clone(), vec![ZERO; 15]).is_err());
        let mut v = vec![ZERO; 16];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(Field::new(g, v).is_err());
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let g = Arc::new(Grid::new(Geometry::Line, 2.0, 64, 1).unwrap());
        let p = |x: f64| 0.3 + x - 0.5 * x * x + 0.25 * x * x * x;
        let f = Field::from_fn(g.clone(), |x| Complex64::new(p(x), 0.0)).unwrap();
        for x in [-1.5, -0.013, 0.4, 1.1] {
            assert_relative_eq!(f.sample(x).re, p(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn identity_scaling() {
        let g = Arc::new(Grid::new(Geometry::Radial, 12.0, 1200, 3).unwrap());
        let f = gaussian(&g, 0.0);
        let s = scale_field(&f, &ScalingPair::virial(3), 0.0);
        assert!(!s.leaked);
        for (a, b) in s.field.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn dilation_moments() {
        let g = Arc::new(Grid::new(Geometry::Radial, 12.0, 2400, 3).unwrap());
        let f = gaussian(&g, 0.0);
        let sp = ScalingPair::new(3.0, 1.0, 3).unwrap();
        let lam = 0.3;
        let s = scale_field(&f, &sp, lam).field;
        assert_relative_eq!(s.mass(), (lam * (2.0 * 3.0 - 3.0)).exp() * f.mass(), max_relative = 1e-4);
        let p = 3.0;
        let lp = |u: &Field| u.grid().integrate(u.values().iter().map(|z| z.norm().powf(p + 1.0)));
        assert_relative_eq!(lp(&s), (lam * ((p + 1.0) * 3.0 - 3.0)).exp() * lp(&f), max_relative = 1e-4);
    }

    #[test]
    fn dilation_composes() {
        let g = Arc::new(Grid::new(Geometry::Radial, 12.0, 2400, 3).unwrap());
        let f = gaussian(&g, 0.0);
        let sp = ScalingPair::new(1.0, 0.5, 3).unwrap();
        let a = scale_field(&scale_field(&f, &sp, 0.2).field, &sp, -0.5).field;
        let b = scale_field(&f, &sp, -0.3).field;
        let err = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn leakage_flag() {
        let g = Arc::new(Grid::new(Geometry::Radial, 6.0, 600, 3).unwrap());
        let f = gaussian(&g, 0.0);
        // contracting the sample points loses the tail
        assert!(scale_field(&f, &ScalingPair::virial(3), -1.0).leaked);
    }

    #[test]
    fn translation() {
        let g = Arc::new(Grid::new(Geometry::Line, 30.0, 6000, 1).unwrap());
        let f = gaussian(&g, 0.0);
        let same = translate_field(&f, 0.0).unwrap();
        assert!(same.values().iter().zip(f.values()).all(|(a, b)| (a - b).norm() < 1e-12));
        let moved = translate_field(&f, 7.3).unwrap();
        assert_relative_eq!(moved.mass(), f.mass(), max_relative = 1e-6);
        assert_relative_eq!(moved.sample(7.3).re, 1.0, max_relative = 1e-6);
        let r = Arc::new(Grid::new(Geometry::Radial, 5.0, 64, 3).unwrap());
        assert!(translate_field(&gaussian(&r, 0.0), 1.0).is_err());
    }
}
