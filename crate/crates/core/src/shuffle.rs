//! Data-class shuffling accounting: how many broadcasts a coded schedule
//! saves over sending classes uncoded, what class coverage each node ends up
//! with, and the payload bits and airtime that saves.
//!
//! One transmission carries one class worth of samples; XOR is applied
//! sample-wise over equal-length payloads, so a coded symbol costs the same
//! as an uncoded one.

use thiserror::Error;

use crate::decoder::{DecodeError, DecodeMode};
use crate::instance::ProblemInstance;
use crate::schemes::{construct, Schedule, SchemeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShuffleError {
    #[error("uncoded baseline needs C > K (C={c}, K={k})")]
    NoBaseline { c: usize, k: usize },
    #[error("invalid shuffle config: {0}")]
    Config(String),
    #[error("schedule leaves {0} node(s) short of the demand")]
    Unsatisfied(usize),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShuffleConfig {
    pub samples_per_class: u64,
    /// Bytes per sample before compression.
    pub sample_bytes: u64,
    /// Fraction of bytes kept after compression, in `(0, 1]`.
    pub compression_ratio: f64,
    pub link_rate_bps: f64,
}

impl Default for ShuffleConfig {
    /// 2000 grayscale 28x28 samples per class, 80% compression, 1 Mbps.
    fn default() -> Self {
        ShuffleConfig {
            samples_per_class: 2000,
            sample_bytes: 28 * 28,
            compression_ratio: 0.2,
            link_rate_bps: 1e6,
        }
    }
}

impl ShuffleConfig {
    pub fn validate(&self) -> Result<(), ShuffleError> {
        if self.samples_per_class == 0 || self.sample_bytes == 0 {
            return Err(ShuffleError::Config(
                "samples and sample bytes must be positive".into(),
            ));
        }
        if !(self.compression_ratio > 0.0 && self.compression_ratio <= 1.0) {
            return Err(ShuffleError::Config(format!(
                "compression ratio {} outside (0, 1]",
                self.compression_ratio
            )));
        }
        if !(self.link_rate_bps > 0.0 && self.link_rate_bps.is_finite()) {
            return Err(ShuffleError::Config(format!(
                "link rate {} must be positive",
                self.link_rate_bps
            )));
        }
        Ok(())
    }

    pub fn bits_per_transmission(&self) -> f64 {
        (self.samples_per_class * self.sample_bytes * 8) as f64 * self.compression_ratio
    }
}

/// `N_W = ceil(C*S / (C-K))`: every uncoded broadcast is new to at most
/// `C - K` nodes.
pub fn baseline_transmissions(instance: &ProblemInstance) -> Result<usize, ShuffleError> {
    let (c, k, s) = (instance.c(), instance.k(), instance.s());
    if c <= k {
        return Err(ShuffleError::NoBaseline { c, k });
    }
    Ok((c * s).div_ceil(c - k))
}

/// `(N_W - N) / N_W * 100`, zero when the baseline is zero.
pub fn efficiency_pct(n_baseline: usize, n_achieved: usize) -> f64 {
    if n_baseline == 0 {
        return 0.0;
    }
    (n_baseline as f64 - n_achieved as f64) / n_baseline as f64 * 100.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencyRow {
    pub s: usize,
    pub n_baseline: usize,
    pub n_achieved: usize,
    pub efficiency_pct: f64,
}

impl EfficiencyRow {
    /// Percentage rounded to two decimals, as printed.
    pub fn rounded_pct(&self) -> f64 {
        (self.efficiency_pct * 100.0).round() / 100.0
    }
}

pub fn efficiency_report(instance: &ProblemInstance) -> Result<EfficiencyRow, ShuffleError> {
    let schedule = construct(instance)?;
    let n_baseline = baseline_transmissions(instance)?;
    let n_achieved = schedule.len();
    Ok(EfficiencyRow {
        s: instance.s(),
        n_baseline,
        n_achieved,
        efficiency_pct: efficiency_pct(n_baseline, n_achieved),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShuffleReport {
    /// Classes per node before shuffling (`K` each).
    pub coverage_before: Vec<usize>,
    /// Distinct classes per node after decoding.
    pub coverage_after: Vec<usize>,
    pub n_baseline: usize,
    pub n_achieved: usize,
    pub efficiency_pct: f64,
    pub bits_per_transmission: f64,
    /// `(N_W - N)` broadcasts worth of payload.
    pub bits_saved_total: f64,
    /// Efficiency fraction of one broadcast's payload: the saving per
    /// baseline broadcast.
    pub bits_saved_per_baseline: f64,
    pub time_saved_total_ms: f64,
    pub time_saved_per_baseline_ms: f64,
}

pub fn simulate_shuffle(
    schedule: &Schedule,
    config: &ShuffleConfig,
    mode: DecodeMode,
) -> Result<ShuffleReport, ShuffleError> {
    config.validate()?;
    let instance = &schedule.instance;
    let report = schedule.decode(mode)?;
    if !report.satisfied {
        return Err(ShuffleError::Unsatisfied(
            report.unsatisfied_clients().len(),
        ));
    }
    let n_baseline = baseline_transmissions(instance)?;
    let n_achieved = schedule.len();
    let efficiency = efficiency_pct(n_baseline, n_achieved);
    let bits_per_transmission = config.bits_per_transmission();
    let saved_broadcasts = n_baseline as f64 - n_achieved as f64;
    let bits_saved_total = saved_broadcasts * bits_per_transmission;
    let bits_saved_per_baseline = efficiency / 100.0 * bits_per_transmission;
    let to_ms = |bits: f64| bits / config.link_rate_bps * 1000.0;

    Ok(ShuffleReport {
        coverage_before: vec![instance.k(); instance.c()],
        coverage_after: report
            .per_client_decoded
            .iter()
            .map(|d| instance.k() + d.len())
            .collect(),
        n_baseline,
        n_achieved,
        efficiency_pct: efficiency,
        bits_per_transmission,
        bits_saved_total,
        bits_saved_per_baseline,
        time_saved_total_ms: to_ms(bits_saved_total),
        time_saved_per_baseline_ms: to_ms(bits_saved_per_baseline),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(m: usize, k: usize, s: usize) -> ProblemInstance {
        ProblemInstance::square(m, k, s).unwrap()
    }

    #[test]
    fn baseline_values() {
        assert_eq!(baseline_transmissions(&sq(10, 6, 3)).unwrap(), 8);
        assert_eq!(baseline_transmissions(&sq(10, 7, 2)).unwrap(), 7);
        assert_eq!(baseline_transmissions(&sq(10, 6, 4)).unwrap(), 10);
        let narrow = ProblemInstance::new(10, 3, 4, 1).unwrap();
        assert_eq!(
            baseline_transmissions(&narrow),
            Err(ShuffleError::NoBaseline { c: 3, k: 4 })
        );
    }

    #[test]
    fn efficiency_rows() {
        let row = efficiency_report(&sq(10, 6, 1)).unwrap();
        assert_eq!((row.n_baseline, row.n_achieved), (3, 2));
        assert_eq!(row.rounded_pct(), 33.33);
        let row = efficiency_report(&sq(10, 7, 3)).unwrap();
        assert_eq!((row.n_baseline, row.n_achieved), (10, 4));
        assert_eq!(row.rounded_pct(), 60.0);
    }

    #[test]
    fn fifty_percent_bit_accounting() {
        let schedule = construct(&sq(10, 6, 3)).unwrap();
        let report =
            simulate_shuffle(&schedule, &ShuffleConfig::default(), DecodeMode::Static).unwrap();
        assert_eq!(report.bits_per_transmission, 2_508_800.0);
        assert_eq!(report.efficiency_pct, 50.0);
        assert_eq!(report.bits_saved_per_baseline, 1_254_400.0);
        assert_eq!(report.bits_saved_total, 4.0 * 2_508_800.0);
        assert!((report.time_saved_per_baseline_ms - 1254.4).abs() < 1e-9);
    }

    #[test]
    fn full_coverage_when_demand_is_everything() {
        let schedule = construct(&sq(10, 6, 4)).unwrap();
        let report =
            simulate_shuffle(&schedule, &ShuffleConfig::default(), DecodeMode::Static).unwrap();
        assert_eq!(report.coverage_after, vec![10; 10]);
        assert_eq!(report.coverage_before, vec![6; 10]);
    }

    #[test]
    fn zero_saving_when_lengths_match() {
        assert_eq!(efficiency_pct(4, 4), 0.0);
        assert_eq!(efficiency_pct(0, 0), 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let schedule = construct(&sq(10, 6, 3)).unwrap();
        for cfg in [
            ShuffleConfig {
                compression_ratio: 0.0,
                ..ShuffleConfig::default()
            },
            ShuffleConfig {
                compression_ratio: 1.5,
                ..ShuffleConfig::default()
            },
            ShuffleConfig {
                link_rate_bps: 0.0,
                ..ShuffleConfig::default()
            },
            ShuffleConfig {
                samples_per_class: 0,
                ..ShuffleConfig::default()
            },
        ] {
            assert!(matches!(
                simulate_shuffle(&schedule, &cfg, DecodeMode::Static),
                Err(ShuffleError::Config(_))
            ));
        }
    }
}
