//! `key = value` configuration files. Blank lines and `#` comments are
//! allowed; missing keys keep their defaults, unknown keys are errors.
//!
//! ```text
//! c_min = 0.2
//! c_max = 5.0
//! n_c = 40
//! ```

use std::path::Path;

use crate::boostlet::SystemConfig;
use crate::error::{QbtError, Result};

pub fn parse_system_config(text: &str) -> Result<SystemConfig> {
    let cfg: SystemConfig = toml::from_str(text).map_err(|e| QbtError::Config(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_system_config(path: impl AsRef<Path>) -> Result<SystemConfig> {
    parse_system_config(&std::fs::read_to_string(path)?)
}

/// Inverse of [`parse_system_config`].
pub fn format_system_config(cfg: &SystemConfig) -> String {
    toml::to_string(cfg).expect("flat numeric struct")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = parse_system_config("# wider lattice\nc_min = 0.2\nc_max = 5.0\n\nn_c = 40\nalpha_max = 3\n").unwrap();
        assert_eq!(cfg.c_min, 0.2);
        assert_eq!(cfg.n_c, 40);
        assert_eq!(cfg.alpha_max, 3.0);
        assert_eq!(cfg.n_alpha, SystemConfig::default().n_alpha);
        assert_eq!(cfg.meyer_lo, 0.5);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(parse_system_config("n_cells = 3"), Err(QbtError::Config(_))));
        assert!(parse_system_config("c_min = -1").is_err());
        assert!(parse_system_config("n_c = 1.5").is_err());
        assert!(parse_system_config("c_min 0.2").is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = SystemConfig::with_lattice(0.1, 10.0, 80, 4.0, 80);
        assert_eq!(parse_system_config(&format_system_config(&cfg)).unwrap(), cfg);
    }
}
