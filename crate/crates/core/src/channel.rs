//! Path loss, fading, shadowing, closed-loop power control, and the SNR the
//! small cell observes on the macro downlink.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::config::{db_to_linear, linear_to_db, MeasurementMode, SystemConfig};
use crate::error::{Error, Result};

/// Path loss slope in dB per decade of distance.
pub const PATH_LOSS_SLOPE_DB: f64 = 37.6;
/// Path loss at 1 km, in dB.
pub const PATH_LOSS_AT_1KM_DB: f64 = 128.0;

/// Floor applied to the noisy SNR estimate before conversion to dB.
pub const NOISY_SNR_FLOOR: f64 = 1e-6;

/// Linear path gain `10^-12.8 · d^-3.76` for `d` in km.
pub fn path_loss_gain(d: f64, min_distance: f64) -> Result<f64> {
    if !(d >= min_distance) || !d.is_finite() {
        return Err(Error::domain(
            "distance",
            d,
            format!("[{min_distance}, inf)"),
        ));
    }
    Ok(10f64.powf(-PATH_LOSS_AT_1KM_DB / 10.0) * d.powf(-PATH_LOSS_SLOPE_DB / 10.0))
}

/// Path loss in dB, `128 + 37.6·log10(d)`.
pub fn path_loss_db(d: f64, min_distance: f64) -> Result<f64> {
    path_loss_gain(d, min_distance).map(|g| -linear_to_db(g))
}

/// MBS transmit power (mW) that makes the macro user's SNR exactly `γ_T`.
pub fn clpc_transmit_power(cfg: &SystemConfig, d0: f64, h0_sq: f64, gs0: f64) -> Result<f64> {
    if !(h0_sq > 0.0 && gs0 > 0.0) {
        return Err(Error::domain("channel gain", h0_sq.min(gs0), "(0, inf)"));
    }
    let g0 = path_loss_gain(d0, cfg.min_distance)?;
    Ok(cfg.target_snr_linear() * cfg.noise_power / (h0_sq * g0 * gs0))
}

/// Received SNR (linear) of a link with the given gains and transmit power.
pub fn received_snr(h_sq: f64, path_gain: f64, shadow_gain: f64, power: f64, noise: f64) -> f64 {
    h_sq * path_gain * shadow_gain * power / noise
}

/// Distances from the MBS to the macro user (`d0`) and to the small cell (`d1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d0: f64,
    pub d1: f64,
}

impl LinkGeometry {
    pub fn new(d0: f64, d1: f64, min_distance: f64) -> Result<Self> {
        if !(d0 >= min_distance) {
            return Err(Error::domain("d0", d0, format!("[{min_distance}, inf)")));
        }
        if !(d1 >= min_distance) {
            return Err(Error::domain("d1", d1, format!("[{min_distance}, inf)")));
        }
        Ok(LinkGeometry { d0, d1 })
    }
}

/// Fading (per subblock) and shadowing (per block) power gains of both links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub h0_sq: f64,
    pub h1_sq: f64,
    pub gs0: f64,
    pub gs1: f64,
}

impl ChannelDraw {
    /// Fading ratio in dB, `10·log10(|h1|²/|h0|²)`.
    pub fn theta_r_db(&self) -> f64 {
        linear_to_db(self.h1_sq / self.h0_sq)
    }

    /// Shadowing difference in dB.
    pub fn theta_s_db(&self) -> f64 {
        linear_to_db(self.gs1) - linear_to_db(self.gs0)
    }

    pub fn is_valid(&self) -> bool {
        [self.h0_sq, self.h1_sq, self.gs0, self.gs1]
            .iter()
            .all(|g| *g > 0.0 && g.is_finite())
    }
}

/// The exact SNR (dB) at the small cell, after power control has been folded in.
pub fn ideal_snr_db(target_snr_db: f64, geom: &LinkGeometry, draw: &ChannelDraw) -> f64 {
    target_snr_db
        + PATH_LOSS_SLOPE_DB * (geom.d0 / geom.d1).log10()
        + draw.theta_r_db()
        + draw.theta_s_db()
}

/// Same quantity as [`ideal_snr_db`] computed through the full signal chain:
/// path gains, power-controlled MBS power, received power over noise.
pub fn physical_snr_linear(
    cfg: &SystemConfig,
    geom: &LinkGeometry,
    draw: &ChannelDraw,
) -> Result<f64> {
    let p0 = clpc_transmit_power(cfg, geom.d0, draw.h0_sq, draw.gs0)?;
    let g1 = path_loss_gain(geom.d1, cfg.min_distance)?;
    Ok(received_snr(draw.h1_sq, g1, draw.gs1, p0, cfg.noise_power))
}

/// Power-based SNR estimate over `m` complex received samples of a constant
/// signal with SNR `snr` in unit-variance complex AWGN.
///
/// The per-sample energies are summed exactly through a rotation onto the
/// signal direction: one noncentral term plus a Gamma(m-1) residual.
pub fn estimate_snr<R: Rng + ?Sized>(snr: f64, m: u32, rng: &mut R) -> f64 {
    let m_f = m as f64;
    let amp = (m_f * snr).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    let z_re = amp + re * std::f64::consts::FRAC_1_SQRT_2;
    let z_im = im * std::f64::consts::FRAC_1_SQRT_2;
    let mut energy = z_re * z_re + z_im * z_im;
    if m > 1 {
        let residual = Gamma::new(m_f - 1.0, 1.0).expect("shape is positive");
        energy += residual.sample(rng);
    }
    (energy / m_f - 1.0).max(NOISY_SNR_FLOOR)
}

/// The SNR sample (dB) the small cell records for one subblock.
pub fn csbs_snr_db<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    geom: &LinkGeometry,
    draw: &ChannelDraw,
    rng: &mut R,
) -> f64 {
    let exact = ideal_snr_db(cfg.target_snr_db, geom, draw);
    match cfg.measurement {
        MeasurementMode::Ideal => exact,
        MeasurementMode::Noisy {
            samples_per_subblock,
        } => linear_to_db(estimate_snr(db_to_linear(exact), samples_per_subblock, rng)),
    }
}

/// Draw `I·J` channel states, block-major. Shadowing is held across the `J`
/// subblocks of a block; fading is redrawn every subblock.
pub fn draw_block_channels<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Vec<ChannelDraw> {
    let mut draws = Vec::with_capacity(cfg.sample_count());
    for _ in 0..cfg.blocks {
        let (gs0, gs1) = draw_shadowing(cfg.shadow_sigma_db, rng);
        for _ in 0..cfg.subblocks {
            let h0_sq: f64 = Exp1.sample(rng);
            let h1_sq: f64 = Exp1.sample(rng);
            draws.push(ChannelDraw {
                h0_sq,
                h1_sq,
                gs0,
                gs1,
            });
        }
    }
    draws
}

fn draw_shadowing<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> (f64, f64) {
    let x0: f64 = StandardNormal.sample(rng);
    let x1: f64 = StandardNormal.sample(rng);
    (db_to_linear(sigma_db * x0), db_to_linear(sigma_db * x1))
}

/// Generate the `K` SNR samples (dB, unsorted) seen by the small cell.
pub fn observe_snr_samples<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    geom: &LinkGeometry,
    rng: &mut R,
) -> Vec<f64> {
    let draws = draw_block_channels(cfg, rng);
    draws
        .iter()
        .map(|d| csbs_snr_db(cfg, geom, d, rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const XI: f64 = 0.035;

    fn ideal_cfg() -> SystemConfig {
        SystemConfig {
            measurement: MeasurementMode::Ideal,
            ..Default::default()
        }
    }

    #[test]
    fn path_loss_at_one_km() {
        let g = path_loss_gain(1.0, XI).unwrap();
        assert!((g / 1.584_893_192_461_113e-13 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_at_min_distance() {
        let db = path_loss_db(0.035, XI).unwrap();
        assert!((db - 73.2560).abs() < 1e-3, "{db}");
    }

    #[test]
    fn path_loss_half_km() {
        let g = path_loss_gain(0.5, XI).unwrap();
        assert!((g - 2.147e-12).abs() < 1e-15, "{g:e}");
    }

    #[test]
    fn path_loss_rejects_short_distance() {
        assert!(matches!(
            path_loss_gain(0.01, XI),
            Err(Error::Domain { .. })
        ));
        assert!(path_loss_gain(f64::NAN, XI).is_err());
    }

    #[test]
    fn clpc_power_reference_value() {
        let cfg = SystemConfig::default();
        let p = clpc_transmit_power(&cfg, 0.5, 1.0, 1.0).unwrap();
        assert!((p - 185.4).abs() < 0.1, "{p}");
        let half = clpc_transmit_power(&cfg, 0.5, 2.0, 1.0).unwrap();
        assert!((half / p - 0.5).abs() < 1e-14);
    }

    #[test]
    fn clpc_meets_target_exactly() {
        let cfg = SystemConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let d0 = rng.random_range(XI..0.5);
            let h0: f64 = Exp1.sample(&mut rng);
            let gs0 = db_to_linear(
                8.0 * {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    n
                },
            );
            let p = clpc_transmit_power(&cfg, d0, h0, gs0).unwrap();
            let snr = received_snr(h0, path_loss_gain(d0, XI).unwrap(), gs0, p, cfg.noise_power);
            assert!((snr / cfg.target_snr_linear() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn clpc_rejects_nonpositive_gain() {
        let cfg = SystemConfig::default();
        assert!(clpc_transmit_power(&cfg, 0.2, 0.0, 1.0).is_err());
    }

    #[test]
    fn snr_equal_links_is_target() {
        let cfg = ideal_cfg();
        let geom = LinkGeometry::new(0.2, 0.2, XI).unwrap();
        let draw = ChannelDraw {
            h0_sq: 0.7,
            h1_sq: 0.7,
            gs0: 1.3,
            gs1: 1.3,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((csbs_snr_db(&cfg, &geom, &draw, &mut rng) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn snr_one_decade_adds_slope() {
        let cfg = ideal_cfg();
        let geom = LinkGeometry::new(0.5, 0.05, XI).unwrap();
        let draw = ChannelDraw {
            h0_sq: 1.0,
            h1_sq: 1.0,
            gs0: 1.0,
            gs1: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((csbs_snr_db(&cfg, &geom, &draw, &mut rng) - 57.6).abs() < 1e-12);
    }

    #[test]
    fn ideal_snr_matches_physical_chain() {
        let cfg = ideal_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let geom = LinkGeometry::new(rng.random_range(XI..0.5), rng.random_range(XI..0.6), XI)
                .unwrap();
            for draw in draw_block_channels(&cfg, &mut rng).iter().take(3) {
                let via_eq = ideal_snr_db(cfg.target_snr_db, &geom, draw);
                let via_chain = linear_to_db(physical_snr_linear(&cfg, &geom, draw).unwrap());
                assert!((via_eq - via_chain).abs() < 1e-9, "{via_eq} vs {via_chain}");
            }
        }
    }

    #[test]
    fn ideal_snr_invariant_to_common_scaling() {
        let geom = LinkGeometry::new(0.3, 0.1, XI).unwrap();
        let draw = ChannelDraw {
            h0_sq: 0.4,
            h1_sq: 2.5,
            gs0: 0.2,
            gs1: 3.0,
        };
        let scaled = ChannelDraw {
            h0_sq: 0.4 * 7.0,
            h1_sq: 2.5 * 7.0,
            gs0: 0.2 * 0.01,
            gs1: 3.0 * 0.01,
        };
        assert!(
            (ideal_snr_db(20.0, &geom, &draw) - ideal_snr_db(20.0, &geom, &scaled)).abs() < 1e-12
        );
    }

    #[test]
    fn block_structure() {
        let cfg = SystemConfig {
            blocks: 2,
            subblocks: 3,
            ..ideal_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = draw_block_channels(&cfg, &mut rng);
        assert_eq!(draws.len(), 6);
        for block in draws.chunks(3) {
            assert!(block
                .iter()
                .all(|d| d.gs0 == block[0].gs0 && d.gs1 == block[0].gs1));
            assert!(block.iter().all(ChannelDraw::is_valid));
        }
        assert_ne!(draws[0].gs0, draws[3].gs0);
        assert_ne!(draws[0].h0_sq, draws[1].h0_sq);
    }

    #[test]
    fn zero_sigma_disables_shadowing() {
        let cfg = SystemConfig {
            shadow_sigma_db: 0.0,
            ..ideal_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in draw_block_channels(&cfg, &mut rng) {
            assert_eq!((d.gs0, d.gs1), (1.0, 1.0));
        }
    }

    #[test]
    fn noisy_estimate_converges_to_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for snr_db in [-5.0, 0.0, 10.0, 30.0] {
            let snr = db_to_linear(snr_db);
            let est = estimate_snr(snr, 10_000_000, &mut rng);
            assert!(
                (linear_to_db(est) - snr_db).abs() < 0.05,
                "{snr_db}: {}",
                linear_to_db(est)
            );
        }
    }

    #[test]
    fn noisy_estimate_is_unbiased_before_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let snr = 4.0;
        let n = 200_000;
        let mean = (0..n).map(|_| estimate_snr(snr, 8, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - snr).abs() < 0.02, "{mean}");
    }

    #[test]
    fn noisy_estimate_single_sample_and_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let est = estimate_snr(1e-9, 1, &mut rng);
            assert!(est >= NOISY_SNR_FLOOR);
        }
    }
}
