//! Physical and protocol constants shared by every stage of the pipeline.

use crate::error::{Error, Result};

/// How the small cell turns received MBS signals into SNR samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    /// The SNR of every subblock is observed exactly.
    Ideal,
    /// The SNR is estimated from `samples_per_subblock` noisy received samples.
    Noisy { samples_per_subblock: u32 },
}

impl MeasurementMode {
    pub const DEFAULT_SAMPLES_PER_SUBBLOCK: u32 = 64;

    pub fn noisy() -> Self {
        MeasurementMode::Noisy {
            samples_per_subblock: Self::DEFAULT_SAMPLES_PER_SUBBLOCK,
        }
    }
}

/// Everything that parameterises one deployment. Distances are in km, powers
/// in linear mW; dB appears only where noted.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Macro cell radius `R`.
    pub macro_radius: f64,
    /// Small cell coverage radius `r`.
    pub small_radius: f64,
    /// Minimum transmitter-receiver distance `ξ`.
    pub min_distance: f64,
    /// AWGN power `σ²` in mW.
    pub noise_power: f64,
    /// Target SNR enforced at the macro user by power control, in dB.
    pub target_snr_db: f64,
    /// Interference probability constraint `η`.
    pub ip_constraint: f64,
    /// Log-normal shadowing spread `σ_s`, in dB.
    pub shadow_sigma_db: f64,
    /// Observation blocks `I`.
    pub blocks: usize,
    /// Subblocks per block `J`.
    pub subblocks: usize,
    pub measurement: MeasurementMode,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            macro_radius: 0.5,
            small_radius: 0.1,
            min_distance: 0.035,
            noise_power: dbm_to_mw(-114.0),
            target_snr_db: 20.0,
            ip_constraint: 0.01,
            shadow_sigma_db: 8.0,
            blocks: 50,
            subblocks: 1,
            measurement: MeasurementMode::noisy(),
            seed: 1,
        }
    }
}

impl SystemConfig {
    /// Total number of SNR samples `K = I·J`.
    pub fn sample_count(&self) -> usize {
        self.blocks * self.subblocks
    }

    pub fn target_snr_linear(&self) -> f64 {
        db_to_linear(self.target_snr_db)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("macro_radius", self.macro_radius),
            ("small_radius", self.small_radius),
            ("min_distance", self.min_distance),
            ("noise_power", self.noise_power),
            ("target_snr_db", self.target_snr_db),
            ("ip_constraint_eta", self.ip_constraint),
            ("shadow_sigma_db", self.shadow_sigma_db),
        ];
        if let Some((name, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("{name} is not finite")));
        }
        if !(0.0 < self.min_distance
            && self.min_distance < self.small_radius
            && self.small_radius < self.macro_radius)
        {
            return Err(Error::Config(format!(
                "radii must satisfy 0 < xi < r < R (xi={}, r={}, R={})",
                self.min_distance, self.small_radius, self.macro_radius
            )));
        }
        if !(self.ip_constraint > 0.0 && self.ip_constraint < 1.0) {
            return Err(Error::Config(format!(
                "ip_constraint_eta out of (0,1): {}",
                self.ip_constraint
            )));
        }
        if self.shadow_sigma_db < 0.0 {
            return Err(Error::Config(format!(
                "shadow_sigma_db must be >= 0: {}",
                self.shadow_sigma_db
            )));
        }
        if self.blocks == 0 || self.subblocks == 0 {
            return Err(Error::Config("blocks and subblocks must be >= 1".into()));
        }
        if self.noise_power <= 0.0 {
            return Err(Error::Config(format!(
                "noise_power must be > 0: {}",
                self.noise_power
            )));
        }
        if let MeasurementMode::Noisy {
            samples_per_subblock: 0,
        } = self.measurement
        {
            return Err(Error::Config("samples_per_subblock must be >= 1".into()));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SystemConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.sample_count(), 50);
        assert!((cfg.noise_power / 10f64.powf(-11.4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_eta_outside_unit_interval() {
        let cfg = SystemConfig {
            ip_constraint: 1.5,
            ..Default::default()
        };
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("ip_constraint_eta out of (0,1)"), "{msg}");
    }

    #[test]
    fn rejects_unordered_radii() {
        let cfg = SystemConfig {
            small_radius: 0.6,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = SystemConfig {
            min_distance: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_zero_blocks_and_negative_sigma() {
        let cfg = SystemConfig {
            blocks: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SystemConfig {
            shadow_sigma_db: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
