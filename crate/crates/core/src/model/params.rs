use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model parameters `(d, p, gamma, mu, omega)` of the NLS with potential `gamma |x|^-mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: usize,
    pub p: f64,
    pub gamma: f64,
    pub mu: f64,
    pub omega: f64,
}

impl ModelParams {
    pub fn new(d: usize, p: f64, gamma: f64, mu: f64, omega: f64) -> Result<Self> {
        let mp = Self { d, p, gamma, mu, omega };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.d == 0 {
            return bad("dimension must be at least 1".into());
        }
        for (name, v) in [("p", self.p), ("gamma", self.gamma), ("mu", self.mu), ("omega", self.omega)] {
            if !v.is_finite() {
                return bad(format!("{name} is not finite"));
            }
        }
        let lo = self.two_star_low();
        let hi = self.two_star_high();
        if !(self.p > lo && self.p < hi) {
            return bad(format!(
                "p = {} outside the intercritical range ({lo}, {hi}) for d = {}",
                self.p, self.d
            ));
        }
        let mu_max = (self.d as f64).min(2.0);
        if !(self.mu > 0.0 && self.mu < mu_max) {
            return bad(format!("mu = {} outside (0, {mu_max})", self.mu));
        }
        if self.gamma < 0.0 {
            return bad(format!("gamma = {} is negative", self.gamma));
        }
        if self.omega <= 0.0 {
            return bad(format!("omega = {} must be positive", self.omega));
        }
        Ok(())
    }

    pub fn df(&self) -> f64 {
        self.d as f64
    }

    /// Scaling-critical Sobolev index `d/2 - 2/(p-1)`.
    pub fn sc(&self) -> f64 {
        self.df() / 2.0 - 2.0 / (self.p - 1.0)
    }

    /// Lower admissible exponent `1 + 4/d` (mass-critical p).
    pub fn two_star_low(&self) -> f64 {
        1.0 + 4.0 / self.df()
    }

    /// Upper admissible exponent: `1 + 4/(d-2)` for d >= 3, infinite otherwise.
    pub fn two_star_high(&self) -> f64 {
        if self.d >= 3 {
            1.0 + 4.0 / (self.df() - 2.0)
        } else {
            f64::INFINITY
        }
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { gamma, ..*self }
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        Self { omega, ..*self }
    }

    /// Potential on a grid, cell-averaged (see `Grid::inverse_power_average`).
    pub fn potential_on(&self, grid: &super::Grid) -> Vec<f64> {
        if self.gamma == 0.0 {
            vec![0.0; grid.len()]
        } else {
            grid.inverse_power_average(self.mu).into_iter().map(|v| self.gamma * v).collect()
        }
    }

    /// Potential `gamma r^-mu` at radius `r > 0`.
    pub fn potential(&self, r: f64) -> f64 {
        if self.gamma == 0.0 {
            0.0
        } else {
            self.gamma * r.powf(-self.mu)
        }
    }
}

/// An admissible dilation pair `(alpha, beta)` with `2 alpha - d beta >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPair {
    pub alpha: f64,
    pub beta: f64,
}

impl ScalingPair {
    pub fn new(alpha: f64, beta: f64, d: usize) -> Result<Self> {
        let sp = Self { alpha, beta };
        sp.check(d)?;
        Ok(sp)
    }

    pub fn check(&self, d: usize) -> Result<()> {
        let err = |reason: &str| {
            Err(Error::InadmissiblePair { alpha: self.alpha, beta: self.beta, reason: reason.into() })
        };
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return err("non-finite component");
        }
        if self.alpha <= 0.0 {
            return err("alpha must be positive");
        }
        if self.beta < 0.0 {
            return err("beta must be nonnegative");
        }
        if 2.0 * self.alpha - d as f64 * self.beta < 0.0 {
            return err("2 alpha - d beta < 0");
        }
        Ok(())
    }

    /// The virial pair `(d, 2)`.
    pub fn virial(d: usize) -> Self {
        Self { alpha: d as f64, beta: 2.0 }
    }

    /// The Nehari pair `(1, 0)`.
    pub fn nehari() -> Self {
        Self { alpha: 1.0, beta: 0.0 }
    }

    pub fn lambda_bar(&self, d: usize) -> f64 {
        2.0 * self.alpha - (d as f64 - 2.0) * self.beta
    }

    pub fn lambda_under(&self, d: usize) -> f64 {
        2.0 * self.alpha - d as f64 * self.beta
    }

    pub fn mid(&self, d: usize, mu: f64) -> f64 {
        2.0 * self.alpha - (d as f64 - mu) * self.beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_ranges() {
        assert!(ModelParams::new(3, 3.0, 1.0, 1.0, 1.0).is_ok());
        assert!(ModelParams::new(1, 7.0, 0.5, 0.5, 1.0).is_ok());
        // mass-critical and energy-critical endpoints are excluded
        assert!(ModelParams::new(3, 1.0 + 4.0 / 3.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(3, 5.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(3, 3.0, 1.0, 2.0, 1.0).is_err());
        assert!(ModelParams::new(1, 7.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(3, 3.0, -0.1, 1.0, 1.0).is_err());
        assert!(ModelParams::new(2, 100.0, 0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn sc_in_unit_interval() {
        let mp = ModelParams::new(3, 3.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(mp.sc(), 0.5);
        let mp = ModelParams::new(1, 7.0, 0.0, 0.5, 1.0).unwrap();
        assert!((mp.sc() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn pair_ordering() {
        for (a, b) in [(3.0, 2.0), (1.0, 0.0), (3.0, 1.0), (2.0, 0.5)] {
            let sp = ScalingPair::new(a, b, 3).unwrap();
            let mu = 1.0;
            assert!(sp.lambda_bar(3) >= sp.mid(3, mu));
            assert!(sp.mid(3, mu) >= sp.lambda_under(3));
            assert!(sp.mid(3, mu) > 0.0);
        }
        assert!(ScalingPair::new(1.0, 1.0, 3).is_err());
        assert!(ScalingPair::new(0.0, 0.0, 3).is_err());
    }
}
