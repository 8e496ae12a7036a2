//! Access probability design under the interference probability constraint.
//!
//! For every placement scenario the macro cell contains one annular region
//! `[inner, outer]` of MBS distances where the user can fall inside the small
//! cell coverage. The learned thresholds locate both radii, which selects one
//! of six cases and an upper bound `ρ` on the probability that the user is in
//! that region. The access probability is then
//!
//! ```text
//! ρ_AP = min{ η · S_region / (ρ · S_c), 1 }
//! ```
//!
//! with `ρ` evaluated as a Binomial(K, 1/2) range probability so that `2^K`
//! never appears.

use std::fmt;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::geometry::{classify_scenario, region_areas, RegionAreas, Scenario};
use crate::learner::{
    binom_cdf_half, binom_range_half, binom_tail_half, BoundaryIndex, SnrSampleSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl CaseTag {
    pub const ALL: [CaseTag; 6] = [
        CaseTag::I,
        CaseTag::II,
        CaseTag::III,
        CaseTag::IV,
        CaseTag::V,
        CaseTag::VI,
    ];

    pub fn roman(self) -> &'static str {
        match self {
            CaseTag::I => "I",
            CaseTag::II => "II",
            CaseTag::III => "III",
            CaseTag::IV => "IV",
            CaseTag::V => "V",
            CaseTag::VI => "VI",
        }
    }

    /// Case implied by where the inner and outer radii fall among the thresholds.
    pub fn from_indices(inner: BoundaryIndex, outer: BoundaryIndex) -> Result<CaseTag> {
        use BoundaryIndex::*;
        match (inner, outer) {
            (Below, Below) => Ok(CaseTag::I),
            (Below, Between(_)) => Ok(CaseTag::II),
            (Below, Above) => Ok(CaseTag::III),
            (Between(k_in), Between(k_out)) if k_in <= k_out => Ok(CaseTag::IV),
            (Between(_), Above) => Ok(CaseTag::V),
            (Above, Above) => Ok(CaseTag::VI),
            _ => Err(Error::ImpossibleCase { inner, outer }),
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

/// Scenario plus case, with the boundary indices that selected the case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScenarioCase {
    pub scenario: Scenario,
    pub case: CaseTag,
    pub inner: BoundaryIndex,
    pub outer: BoundaryIndex,
}

impl ScenarioCase {
    pub fn new(scenario: Scenario, inner: BoundaryIndex, outer: BoundaryIndex) -> Result<Self> {
        Ok(ScenarioCase {
            scenario,
            case: CaseTag::from_indices(inner, outer)?,
            inner,
            outer,
        })
    }

    /// Histogram key, e.g. `(Scenario::I, CaseTag::IV)`.
    pub fn key(&self) -> (Scenario, CaseTag) {
        (self.scenario, self.case)
    }
}

pub fn classify_case(
    samples: &SnrSampleSet,
    scenario: Scenario,
    d1: f64,
    cfg: &SystemConfig,
) -> Result<ScenarioCase> {
    let (inner_radius, outer_radius) = scenario.region_radii(d1, cfg);
    let inner = samples.boundary_index(inner_radius, d1, cfg.target_snr_db);
    let outer = samples.boundary_index(outer_radius, d1, cfg.target_snr_db);
    ScenarioCase::new(scenario, inner, outer)
}

/// Upper bound on the probability that the user lies in the scenario's
/// interference-capable region.
pub fn region_prob_upper(case: &ScenarioCase, k_total: usize) -> f64 {
    let all_beyond = binom_tail_half(k_total, k_total);
    match case.case {
        CaseTag::I | CaseTag::VI => all_beyond,
        CaseTag::II => binom_cdf_half(k_total, case.outer.count(k_total)),
        CaseTag::III => 1.0,
        CaseTag::IV => binom_range_half(
            k_total,
            case.inner.count(k_total),
            case.outer.count(k_total),
        ),
        CaseTag::V => binom_tail_half(k_total, case.inner.count(k_total)),
    }
}

/// Largest access probability that keeps `ρ_AP · ρ · S_c / S_region ≤ η`.
pub fn access_probability(eta: f64, areas: &RegionAreas, rho_upper: f64) -> f64 {
    if areas.s_c <= 0.0 || rho_upper <= 0.0 {
        return 1.0;
    }
    (eta * areas.s_region / (rho_upper * areas.s_c)).min(1.0)
}

/// Outcome of one access probability design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApDecision {
    pub rho_ap: f64,
    pub scenario_case: ScenarioCase,
    /// The region probability bound used in the design.
    pub rho_region_upper: f64,
    pub areas: RegionAreas,
}

impl ApDecision {
    /// Interference probability the design believes it is admitting.
    pub fn admitted_ip(&self) -> f64 {
        if self.areas.s_region <= 0.0 {
            return 0.0;
        }
        self.rho_ap * self.rho_region_upper * self.areas.s_c / self.areas.s_region
    }
}

pub fn design_ap(samples: &SnrSampleSet, d1: f64, cfg: &SystemConfig) -> Result<ApDecision> {
    let scenario = classify_scenario(d1, cfg)?;
    let areas = region_areas(scenario, d1, cfg)?;
    let scenario_case = classify_case(samples, scenario, d1, cfg)?;
    let rho_region_upper = region_prob_upper(&scenario_case, samples.len());
    Ok(ApDecision {
        rho_ap: access_probability(cfg.ip_constraint, &areas, rho_region_upper),
        scenario_case,
        rho_region_upper,
        areas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PATH_LOSS_SLOPE_DB;
    use std::f64::consts::PI;
    use BoundaryIndex::*;

    fn case(scenario: Scenario, inner: BoundaryIndex, outer: BoundaryIndex) -> ScenarioCase {
        ScenarioCase::new(scenario, inner, outer).unwrap()
    }

    /// SNR whose learned distance is exactly `d` for the given `d1`, `γ_T`.
    fn snr_for_distance(d: f64, d1: f64, gamma_t_db: f64) -> f64 {
        gamma_t_db + PATH_LOSS_SLOPE_DB * (d / d1).log10()
    }

    #[test]
    fn case_mapping() {
        assert_eq!(CaseTag::from_indices(Below, Below).unwrap(), CaseTag::I);
        assert_eq!(
            CaseTag::from_indices(Below, Between(3)).unwrap(),
            CaseTag::II
        );
        assert_eq!(CaseTag::from_indices(Below, Above).unwrap(), CaseTag::III);
        assert_eq!(
            CaseTag::from_indices(Between(2), Between(5)).unwrap(),
            CaseTag::IV
        );
        assert_eq!(
            CaseTag::from_indices(Between(4), Between(4)).unwrap(),
            CaseTag::IV
        );
        assert_eq!(
            CaseTag::from_indices(Between(2), Above).unwrap(),
            CaseTag::V
        );
        assert_eq!(CaseTag::from_indices(Above, Above).unwrap(), CaseTag::VI);
        for (i, o) in [
            (Between(1), Below),
            (Above, Below),
            (Above, Between(2)),
            (Between(5), Between(2)),
        ] {
            assert!(matches!(
                CaseTag::from_indices(i, o),
                Err(Error::ImpossibleCase { .. })
            ));
        }
    }

    #[test]
    fn region_bound_examples() {
        assert_eq!(
            region_prob_upper(&case(Scenario::I, Below, Below), 3),
            0.125
        );
        for k in [1, 10, 200] {
            assert_eq!(region_prob_upper(&case(Scenario::II, Below, Above), k), 1.0);
        }
        let iv = case(Scenario::I, Between(1), Between(2));
        assert_eq!(region_prob_upper(&iv, 4), 0.625);
        // single-gap collision reduces to one coefficient: C(4,2)/16
        let same = case(Scenario::I, Between(2), Between(2));
        assert_eq!(region_prob_upper(&same, 4), 0.375);
    }

    #[test]
    fn case_bounds_match_range_form() {
        let k_total = 12;
        for c_in in 0..=k_total {
            for c_out in c_in..=k_total {
                let inner = BoundaryIndex::from_count(c_in, k_total);
                let outer = BoundaryIndex::from_count(c_out, k_total);
                let Ok(sc) = ScenarioCase::new(Scenario::II, inner, outer) else {
                    continue;
                };
                let expected = binom_range_half(k_total, c_in, c_out);
                assert_eq!(region_prob_upper(&sc, k_total), expected, "{c_in} {c_out}");
            }
        }
    }

    #[test]
    fn classify_reads_scenario_radii() {
        let cfg = SystemConfig::default();
        let d1 = 0.25;
        // thresholds at 0.1, 0.2, 0.3, 0.4 km: d1-r=0.15 -> Between(1), d1+r=0.35 -> Between(3)
        let samples = SnrSampleSet::new(
            [0.1, 0.2, 0.3, 0.4]
                .iter()
                .map(|&d| snr_for_distance(d, d1, cfg.target_snr_db))
                .collect(),
        )
        .unwrap();
        let sc = classify_case(&samples, Scenario::II, d1, &cfg).unwrap();
        assert_eq!(
            (sc.inner, sc.outer, sc.case),
            (Between(1), Between(3), CaseTag::IV)
        );
    }

    #[test]
    fn scenario2_case1_saturates() {
        let cfg = SystemConfig::default();
        let d1 = 0.25;
        let samples =
            SnrSampleSet::new(vec![snr_for_distance(1.0, d1, cfg.target_snr_db); 50]).unwrap();
        let dec = design_ap(&samples, d1, &cfg).unwrap();
        assert_eq!(dec.scenario_case.key(), (Scenario::II, CaseTag::I));
        assert_eq!(dec.rho_ap, 1.0);
    }

    #[test]
    fn scenario1_case3_reference() {
        let cfg = SystemConfig::default();
        let d1 = 0.05;
        // every threshold inside [xi, d1 + r]
        let samples = SnrSampleSet::new(vec![
            snr_for_distance(0.05, d1, cfg.target_snr_db),
            snr_for_distance(0.1, d1, cfg.target_snr_db),
        ])
        .unwrap();
        let dec = design_ap(&samples, d1, &cfg).unwrap();
        assert_eq!(dec.scenario_case.case, CaseTag::III);
        let expected = 0.01 * PI * (0.15f64.powi(2) - 0.035f64.powi(2)) / (PI * (0.01 - 0.001225));
        assert!((dec.rho_ap - expected).abs() < 1e-14);
        assert!((dec.rho_ap - 0.0242).abs() < 1e-4);
    }

    #[test]
    fn scenario3_case3_reference() {
        let cfg = SystemConfig::default();
        let d1 = 0.5;
        let samples = SnrSampleSet::new(vec![
            snr_for_distance(0.45, d1, cfg.target_snr_db),
            snr_for_distance(0.48, d1, cfg.target_snr_db),
        ])
        .unwrap();
        let dec = design_ap(&samples, d1, &cfg).unwrap();
        assert_eq!(dec.scenario_case.key(), (Scenario::III, CaseTag::III));
        assert!((dec.rho_ap - 0.188).abs() < 5e-4, "{}", dec.rho_ap);
    }

    #[test]
    fn external_tangency_grants_full_access() {
        let cfg = SystemConfig::default();
        let samples = SnrSampleSet::new(vec![10.0, 20.0, 30.0]).unwrap();
        let dec = design_ap(&samples, 0.6, &cfg).unwrap();
        assert_eq!(dec.areas.s_c, 0.0);
        assert_eq!(dec.rho_ap, 1.0);
    }

    #[test]
    fn rejects_out_of_range_d1() {
        let cfg = SystemConfig::default();
        let samples = SnrSampleSet::new(vec![10.0]).unwrap();
        assert!(design_ap(&samples, 0.7, &cfg).is_err());
        assert!(design_ap(&samples, 0.01, &cfg).is_err());
    }
}
