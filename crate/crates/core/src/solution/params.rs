//! Physical trap parameters in SI units and their dimensionless image.

use serde::{Deserialize, Serialize};

use super::SolutionError;

pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Allowed relative mismatch between a supplied diffusivity and k_B T / ζ.
pub const EINSTEIN_TOLERANCE: f64 = 0.005;

// Table-unit conversions to SI.
const FN_PER_NM: f64 = 1e-6;
const NN_US_PER_NM: f64 = 1e-6;
const NM2_PER_US: f64 = 1e-12;
const NM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapParams {
    /// Spring constant, N/m.
    pub k: f64,
    /// Friction coefficient, N·s/m.
    pub zeta: f64,
    /// Diffusivity, m²/s.
    pub d: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Contact radius, m.
    pub l: f64,
    /// Initial separation, m.
    pub r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensionless {
    pub kappa: f64,
    pub z: f64,
    /// Relaxation time ζ/k, s.
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumStats {
    pub rms: f64,
    pub mean: f64,
    pub mode: f64,
}

impl TrapParams {
    pub fn new(k: f64, zeta: f64, d: f64, temperature: f64, l: f64, r0: f64) -> Result<Self, SolutionError> {
        let params = TrapParams {
            k,
            zeta,
            d,
            temperature,
            l,
            r0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Diffusivity taken from the Einstein relation D = k_B T / ζ.
    pub fn einstein(k: f64, zeta: f64, temperature: f64, l: f64, r0: f64) -> Result<Self, SolutionError> {
        TrapParams::new(k, zeta, BOLTZMANN * temperature / zeta, temperature, l, r0)
    }

    /// Parameters in the units of a typical optical-trap table: k in fN/nm,
    /// ζ in nN·µs/nm, D in nm²/µs (Einstein value when `None`), T in K and
    /// lengths in nm.
    pub fn from_table_units(
        k_fn_per_nm: f64,
        zeta_nn_us_per_nm: f64,
        d_nm2_per_us: Option<f64>,
        temperature: f64,
        l_nm: f64,
        r0_nm: f64,
    ) -> Result<Self, SolutionError> {
        let (k, zeta) = (k_fn_per_nm * FN_PER_NM, zeta_nn_us_per_nm * NN_US_PER_NM);
        let (l, r0) = (l_nm * NM, r0_nm * NM);
        match d_nm2_per_us {
            Some(d) => TrapParams::new(k, zeta, d * NM2_PER_US, temperature, l, r0),
            None => TrapParams::einstein(k, zeta, temperature, l, r0),
        }
    }

    pub fn validate(&self) -> Result<(), SolutionError> {
        let positive = [
            ("k", self.k),
            ("zeta", self.zeta),
            ("D", self.d),
            ("temperature", self.temperature),
            ("L", self.l),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SolutionError::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.r0 > self.l) || !self.r0.is_finite() {
            return Err(SolutionError::InvalidParams(format!(
                "initial separation {} must exceed the contact radius {}",
                self.r0, self.l
            )));
        }
        let einstein = BOLTZMANN * self.temperature / self.zeta;
        if ((self.d - einstein) / einstein).abs() > EINSTEIN_TOLERANCE {
            return Err(SolutionError::InvalidParams(format!(
                "D = {:e} m²/s violates the Einstein relation k_B T/ζ = {einstein:e} m²/s",
                self.d
            )));
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        self.k * self.l * self.l / (2.0 * self.zeta * self.d)
    }

    pub fn z(&self) -> f64 {
        self.r0 / self.l
    }

    pub fn tau(&self) -> f64 {
        self.zeta / self.k
    }

    /// k/ζ in Hz.
    pub fn relaxation_rate(&self) -> f64 {
        self.k / self.zeta
    }

    pub fn to_dimensionless(&self) -> Result<Dimensionless, SolutionError> {
        self.validate()?;
        Ok(Dimensionless {
            kappa: self.kappa(),
            z: self.z(),
            tau: self.tau(),
        })
    }

    /// Moments of the Maxwell-like equilibrium radial density, in metres.
    pub fn equilibrium_stats(&self) -> EquilibriumStats {
        let s = (BOLTZMANN * self.temperature / self.k).sqrt();
        EquilibriumStats {
            rms: 3f64.sqrt() * s,
            mean: (8.0 / std::f64::consts::PI).sqrt() * s,
            mode: 2f64.sqrt() * s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_diffusivity_must_satisfy_einstein() {
        // the rounded 0.002 nm²/µs is 2.5% below k_B T/ζ at 300 K
        assert!(TrapParams::from_table_units(1.01, 2.02, Some(0.002), 300.0, 10.0, 50.0).is_err());
        assert!(TrapParams::from_table_units(1.01, 2.02, Some(0.00205), 300.0, 10.0, 50.0).is_ok());
        let p = TrapParams::from_table_units(1.01, 2.02, None, 300.0, 10.0, 50.0).unwrap();
        assert!((p.d / NM2_PER_US - 0.002).abs() < 0.0005);
    }

    #[test]
    fn rejects_start_inside_sphere() {
        assert!(TrapParams::from_table_units(1.01, 2.02, None, 300.0, 10.0, 10.0).is_err());
        assert!(TrapParams::from_table_units(-1.0, 2.02, None, 300.0, 10.0, 50.0).is_err());
    }

    #[test]
    fn dimensionless_set() {
        let p = TrapParams::from_table_units(1.01, 2.02, None, 300.0, 10.0, 50.0).unwrap();
        let d = p.to_dimensionless().unwrap();
        assert!((d.z - 5.0).abs() < 1e-12);
        assert!((d.tau - 2.0).abs() < 1e-12);
        assert!((p.relaxation_rate() - 0.5).abs() < 1e-12);
        // κ is k L² / (2 k_B T) once D is Einstein's
        let expect = p.k * p.l * p.l / (2.0 * BOLTZMANN * 300.0);
        assert!((d.kappa / expect - 1.0).abs() < 1e-12);
    }
}
