//! Engine limits read from TOML.

use serde::{Deserialize, Serialize};
use stpart::ctx::Ctx;
use stpart::rat::from_f64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub max_vars: usize,
    pub max_degree: u32,
    /// Depth m of the eps := eta^m schedule.
    pub reparam_depth: u32,
    pub quadrature_radius: f64,
    /// Dyadic depth of the rational box search.
    pub grid_depth: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config { max_vars: 3, max_degree: 4, reparam_depth: 4, quadrature_radius: 1e-9, grid_depth: 12 }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, String> {
        let c: Config = toml::from_str(text).map_err(|e| format!("config: {}", e))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_vars == 0 || self.max_degree == 0 || self.reparam_depth == 0 || self.grid_depth == 0 {
            return Err(String::from("config: all limits must be positive"));
        }
        if self.max_vars > 3 {
            return Err(format!("config: max_vars is at most 3, got {}", self.max_vars));
        }
        if !(self.quadrature_radius > 0.0 && self.quadrature_radius.is_finite()) {
            return Err(String::from("config: quadrature_radius must be positive"));
        }
        Ok(())
    }

    pub fn ctx(&self) -> Ctx {
        Ctx {
            max_vars: self.max_vars,
            max_degree: self.max_degree,
            reparam_depth: self.reparam_depth,
            quadrature_radius: from_f64(self.quadrature_radius),
            grid_depth: self.grid_depth,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = Config::from_toml("").unwrap();
        assert_eq!(c, Config::default());
        let c = Config::from_toml("grid_depth = 8\nquadrature_radius = 1e-7").unwrap();
        assert_eq!(c.grid_depth, 8);
        assert_eq!(c.ctx().grid_depth, 8);
        assert!(Config::from_toml("max_vars = 4").is_err());
        assert!(Config::from_toml("reparam_depth = 0").is_err());
        assert!(Config::from_toml("colour = 1").is_err());
    }
}
