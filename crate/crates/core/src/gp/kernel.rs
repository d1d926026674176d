use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    Rbf,
    RationalQuadratic,
    Matern,
    ExpSineSquared,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] =
        [KernelFamily::Rbf, KernelFamily::RationalQuadratic, KernelFamily::Matern, KernelFamily::ExpSineSquared];

    pub fn label(self) -> &'static str {
        match self {
            KernelFamily::Rbf => "Radial basis function",
            KernelFamily::RationalQuadratic => "Rational quadratic",
            KernelFamily::Matern => "Matern",
            KernelFamily::ExpSineSquared => "Exp. sine squared",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelFamily::Rbf => "rbf",
            KernelFamily::RationalQuadratic => "rq",
            KernelFamily::Matern => "matern",
            KernelFamily::ExpSineSquared => "expsine",
        })
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rbf" | "radial" => Ok(KernelFamily::Rbf),
            "rq" | "rational-quadratic" | "rationalquadratic" => Ok(KernelFamily::RationalQuadratic),
            "matern" => Ok(KernelFamily::Matern),
            "expsine" | "exp-sine-squared" | "expsinesquared" => Ok(KernelFamily::ExpSineSquared),
            other => Err(Error::Config(format!("unknown kernel family {other}"))),
        }
    }
}

/// Matérn smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaternNu {
    ThreeHalves,
    FiveHalves,
}

/// A covariance function over round indices plus its observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub length_scale: f64,
    pub signal_variance: f64,
    /// Mixture exponent, rational quadratic only.
    pub rq_alpha: f64,
    /// Period, exp-sine-squared only.
    pub periodicity: f64,
    /// Smoothness, Matérn only.
    pub nu: MaternNu,
    /// Added to the diagonal of the training covariance, never to `k` itself.
    pub noise: f64,
}

impl KernelSpec {
    /// Neutral defaults on round-index scale.
    pub fn default_for(family: KernelFamily) -> Self {
        Self {
            family,
            length_scale: 1.0,
            signal_variance: 1.0,
            rq_alpha: 1.0,
            periodicity: 2.0,
            nu: MaternNu::ThreeHalves,
            noise: 1e-6,
        }
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("kernel {name} must be positive, got {v}")))
            }
        };
        positive("length scale", self.length_scale)?;
        positive("signal variance", self.signal_variance)?;
        if self.family == KernelFamily::RationalQuadratic {
            positive("mixture exponent", self.rq_alpha)?;
        }
        if self.family == KernelFamily::ExpSineSquared {
            positive("periodicity", self.periodicity)?;
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::Config(format!("kernel noise must be non-negative, got {}", self.noise)));
        }
        Ok(())
    }

    /// Covariance between two rounds; `k(x, x) = signal_variance`.
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let d = (x1 - x2).abs();
        let l = self.length_scale;
        let s2 = self.signal_variance;
        match self.family {
            KernelFamily::Rbf => s2 * (-(d * d) / (2.0 * l * l)).exp(),
            KernelFamily::RationalQuadratic => {
                let a = self.rq_alpha;
                s2 * (1.0 + d * d / (2.0 * a * l * l)).powf(-a)
            }
            KernelFamily::Matern => match self.nu {
                MaternNu::ThreeHalves => {
                    let r = 3f64.sqrt() * d / l;
                    s2 * (1.0 + r) * (-r).exp()
                }
                MaternNu::FiveHalves => {
                    let r = 5f64.sqrt() * d / l;
                    s2 * (1.0 + r + r * r / 3.0) * (-r).exp()
                }
            },
            KernelFamily::ExpSineSquared => {
                let s = (PI * d / self.periodicity).sin();
                s2 * (-2.0 * s * s / (l * l)).exp()
            }
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, x1: f64, x2: f64) -> f64 {
    spec.eval(x1, x2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rq_at_zero_distance() {
        let spec = KernelSpec::default_for(KernelFamily::RationalQuadratic);
        assert_eq!(spec.eval(3.0, 3.0), 1.0);
    }

    #[test]
    fn rbf_unit_distance() {
        let spec = KernelSpec::default_for(KernelFamily::Rbf);
        // exp(-1/2)
        assert!((spec.eval(1.0, 2.0) - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn expsine_is_periodic() {
        let spec = KernelSpec::default_for(KernelFamily::ExpSineSquared);
        assert!((spec.eval(1.3, 3.3) - spec.eval(1.3, 1.3)).abs() < 1e-12);
    }

    #[test]
    fn matern_closed_forms() {
        let mut spec = KernelSpec::default_for(KernelFamily::Matern);
        let r = 3f64.sqrt();
        assert!((spec.eval(0.0, 1.0) - (1.0 + r) * (-r).exp()).abs() < 1e-15);
        spec.nu = MaternNu::FiveHalves;
        let r = 5f64.sqrt();
        assert!((spec.eval(0.0, 1.0) - (1.0 + r + 5.0 / 3.0) * (-r).exp()).abs() < 1e-15);
    }

    #[test]
    fn parses_family_names() {
        assert_eq!("rq".parse::<KernelFamily>().unwrap(), KernelFamily::RationalQuadratic);
        assert_eq!("Matern".parse::<KernelFamily>().unwrap(), KernelFamily::Matern);
        assert!("cosine".parse::<KernelFamily>().is_err());
        for f in KernelFamily::ALL {
            assert_eq!(f.to_string().parse::<KernelFamily>().unwrap(), f);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = KernelSpec::default_for(KernelFamily::Rbf);
        spec.length_scale = 0.0;
        assert!(spec.validate().is_err());
        let spec = KernelSpec::default_for(KernelFamily::Rbf).with_noise(-1.0);
        assert!(spec.validate().is_err());
    }

    fn any_spec() -> impl Strategy<Value = KernelSpec> {
        (0usize..4, 0.1f64..10.0, 0.1f64..5.0, 0.1f64..5.0, 0.5f64..8.0, any::<bool>()).prop_map(
            |(f, l, s2, a, p, five)| KernelSpec {
                family: KernelFamily::ALL[f],
                length_scale: l,
                signal_variance: s2,
                rq_alpha: a,
                periodicity: p,
                nu: if five { MaternNu::FiveHalves } else { MaternNu::ThreeHalves },
                noise: 0.0,
            },
        )
    }

    proptest! {
        #[test]
        fn symmetric_with_signal_variance_on_diagonal(spec in any_spec(), a in -50.0f64..50.0, b in -50.0f64..50.0) {
            prop_assert_eq!(spec.eval(a, b), spec.eval(b, a));
            prop_assert!((spec.eval(a, a) - spec.signal_variance).abs() <= 1e-12 * spec.signal_variance);
            prop_assert!(spec.eval(a, b) <= spec.signal_variance * (1.0 + 1e-12));
        }
    }
}
