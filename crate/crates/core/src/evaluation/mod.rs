//! Comparing predicted and realized exposure: Jensen-Shannon distance,
//! coefficient of variation, paired t-tests with Bonferroni correction, and
//! the experiment runner.

mod experiment;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::{check_simplex, ExposureDistribution};
use crate::special::beta_reg;

pub use experiment::{
    run_experiment, CategorySummary, Comparison, CvRow, ExperimentConfig, Failure, JsdRow, Pipeline, PredictionReport,
    PredictorMean,
};

/// Jensen-Shannon distance between two exposure distributions over the same
/// groups. Base-2 logs, so the result lies in `[0, 1]`.
pub fn jsd(p: &ExposureDistribution, e: &ExposureDistribution) -> Result<f64> {
    if p.groups != e.groups {
        if p.len() != e.len() {
            return Err(Error::DimensionMismatch {
                left: p.len(),
                right: e.len(),
            });
        }
        return Err(Error::InvalidDistribution(format!(
            "group orders differ: {:?} vs {:?}",
            p.groups, e.groups
        )));
    }
    jsd_values(&p.values, &e.values)
}

/// [`jsd`] on bare probability vectors.
pub fn jsd_values(p: &[f64], e: &[f64]) -> Result<f64> {
    if p.len() != e.len() {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: e.len(),
        });
    }
    check_simplex(p)?;
    check_simplex(e)?;
    let mut divergence = 0.0;
    for (&a, &b) in p.iter().zip(e) {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            divergence += 0.5 * a * (a / m).log2();
        }
        if b > 0.0 {
            divergence += 0.5 * b * (b / m).log2();
        }
    }
    Ok(divergence.clamp(0.0, 1.0).sqrt())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deviation {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n − 1.
    Sample,
}

/// Standard deviation over mean, as a percentage.
pub fn coefficient_of_variation(values: &[f64], deviation: Deviation) -> Result<f64> {
    let n = values.len();
    let min_n = match deviation {
        Deviation::Population => 1,
        Deviation::Sample => 2,
    };
    if n < min_n {
        return Err(Error::TooFewSamples(n));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if mean <= 0.0 {
        return Err(Error::ZeroMean);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let denom = match deviation {
        Deviation::Population => n as f64,
        Deviation::Sample => (n - 1) as f64,
    };
    Ok((ss / denom).sqrt() / mean * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided.
    pub p: f64,
    /// Mean of `a − b`.
    pub mean_difference: f64,
}

/// Two-sided p-value of Student's t with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    beta_reg(df / 2.0, 0.5, df / (df + t * t))
}

/// Paired Student t-test on `a − b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let t = mean / (var / n as f64).sqrt();
    let df = (n - 1) as f64;
    Ok(TTest {
        t,
        df,
        p: t_two_sided_p(t, df),
        mean_difference: mean,
    })
}

/// `min(1, p · m)` for each p-value.
pub fn bonferroni(p_values: &[f64], m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "number of comparisons must be at least 1".into(),
        ));
    }
    Ok(p_values.iter().map(|p| (p * m as f64).min(1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jsd_reference_values() {
        assert_eq!(jsd_values(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_abs_diff_eq!(jsd_values(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            jsd_values(&[0.75, 0.25], &[0.25, 0.75]).unwrap(),
            0.43443,
            epsilon = 1e-4
        );
    }

    #[test]
    fn jsd_rejects_bad_input() {
        assert!(matches!(
            jsd_values(&[1.0], &[0.5, 0.5]),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(
            jsd_values(&[0.6, 0.6], &[0.5, 0.5]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(jsd_values(&[-0.5, 1.5], &[0.5, 0.5]).is_err());
        let a = ExposureDistribution::new("c", vec!["x".into(), "y".into()], vec![0.5, 0.5]).unwrap();
        let b = ExposureDistribution::new("c", vec!["y".into(), "x".into()], vec![0.5, 0.5]).unwrap();
        assert!(jsd(&a, &b).is_err());
        assert_eq!(jsd(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn cv_values() {
        assert_eq!(
            coefficient_of_variation(&[0.25; 4], Deviation::Population).unwrap(),
            0.0
        );
        assert_abs_diff_eq!(
            coefficient_of_variation(&[1.0, 0.0, 0.0, 0.0], Deviation::Population).unwrap(),
            173.205,
            epsilon = 1e-3
        );
        assert_abs_diff_eq!(
            coefficient_of_variation(&[1.0, 0.0, 0.0, 0.0], Deviation::Sample).unwrap(),
            200.0,
            epsilon = 1e-9
        );
        assert_eq!(coefficient_of_variation(&[7.0; 3], Deviation::Population).unwrap(), 0.0);
        assert!(matches!(
            coefficient_of_variation(&[0.0, 0.0], Deviation::Population),
            Err(Error::ZeroMean)
        ));
        assert!(coefficient_of_variation(&[], Deviation::Population).is_err());
    }

    #[test]
    fn t_test_table_value() {
        // Two-sided 5% critical value for 9 degrees of freedom.
        assert_abs_diff_eq!(t_two_sided_p(2.262, 9.0), 0.05, epsilon = 2e-3);
        assert_abs_diff_eq!(t_two_sided_p(0.0, 9.0), 1.0, epsilon = 1e-12);
        // df = 1 is the Cauchy distribution: p = 1 - 2 atan(t) / pi.
        assert_abs_diff_eq!(
            t_two_sided_p(1.5, 1.0),
            1.0 - 2.0 * 1.5f64.atan() / std::f64::consts::PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn paired_t_test_cases() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!(matches!(paired_t_test(&a, &a), Err(Error::ZeroVariance)));
        assert!(matches!(paired_t_test(&a, &a[..3]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(paired_t_test(&a[..1], &a[..1]), Err(Error::TooFewSamples(1))));

        let b = [2.0, 1.0, 4.0, 3.0];
        let r = paired_t_test(&a, &b).unwrap();
        assert_eq!(r.t, 0.0);
        assert_abs_diff_eq!(r.p, 1.0, epsilon = 1e-12);

        let c = [0.5, 1.0, 2.9, 3.2];
        let ab = paired_t_test(&a, &c).unwrap();
        let ba = paired_t_test(&c, &a).unwrap();
        assert_eq!(ab.t, -ba.t);
        assert_abs_diff_eq!(ab.p, ba.p, epsilon = 1e-15);
        // d = [.5, 1, .1, .8]: mean .6, sd .39158, t = 3.0645, df 3.
        assert_abs_diff_eq!(ab.t, 3.06452, epsilon = 1e-4);
        assert_eq!(ab.df, 3.0);
    }

    #[test]
    fn bonferroni_cases() {
        assert_abs_diff_eq!(bonferroni(&[0.004], 5).unwrap()[0], 0.02, epsilon = 1e-15);
        assert_eq!(bonferroni(&[0.5], 5).unwrap(), vec![1.0]);
        assert_eq!(bonferroni(&[0.013, 0.7], 1).unwrap(), vec![0.013, 0.7]);
        assert!(bonferroni(&[0.1], 0).is_err());
    }
}
