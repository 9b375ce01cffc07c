use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    pub kt: f64,
    /// Signal speed; `f64::INFINITY` means instantaneous interaction.
    pub c: f64,
    /// Interaction length.
    pub a: f64,
    pub rho_floor: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams { hbar: 1.0, mass: 1.0, kt: 0.0, c: f64::INFINITY, a: 0.0, rho_floor: 1e-12 }
    }
}

impl PhysicalParams {
    /// Returns the names of every field that breaks its invariant.
    pub fn invalid_fields(&self) -> Vec<&'static str> {
        let mut bad = Vec::new();
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            bad.push("hbar");
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            bad.push("mass");
        }
        if !(self.kt.is_finite() && self.kt >= 0.0) {
            bad.push("kT");
        }
        if !(self.c > 0.0) {
            bad.push("c");
        }
        if !(self.a.is_finite() && self.a >= 0.0) {
            bad.push("a");
        }
        if !(self.rho_floor.is_finite() && self.rho_floor > 0.0) {
            bad.push("rho_floor");
        }
        bad
    }

    pub fn validate(&self) -> Result<()> {
        match self.invalid_fields().first() {
            Some(name) => Err(Error::param(name, "violates its range")),
            None => Ok(()),
        }
    }

    /// The same parameters with `a` set from the thermal length.
    pub fn with_thermal_length(self) -> Result<Self> {
        Ok(PhysicalParams { a: crate::potentials::thermal_length(&self)?, ..self })
    }

    pub(crate) fn clamp(&self, rho: f64) -> f64 {
        rho.max(self.rho_floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert!(PhysicalParams::default().validate().is_ok());
    }

    #[test]
    fn negative_temperature_is_named() {
        let p = PhysicalParams { kt: -1.0, ..Default::default() };
        assert_eq!(p.invalid_fields(), vec!["kT"]);
    }
}
