use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::scalar::{Real, RealPoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    /// `N(mean, sigma^2 I)`.
    Gaussian { mean: Vec<f64>, sigma: f64 },
    PointMass { at: Vec<f64> },
}

impl Component {
    fn dim(&self) -> usize {
        match self {
            Self::Gaussian { mean, .. } => mean.len(),
            Self::PointMass { at } => at.len(),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RealPoint {
        match self {
            Self::Gaussian { mean, sigma } => mean
                .iter()
                .map(|&m| {
                    let z: f64 = rng.sample(StandardNormal);
                    Real::new(m + sigma * z)
                })
                .collect(),
            Self::PointMass { at } => at.iter().map(|&x| Real::new(x)).collect(),
        }
    }
}

/// A samplable distribution over `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    StandardGaussian { n: usize },
    /// Finite mixture; weights are normalized on sampling.
    Mixture { components: Vec<(f64, Component)> },
}

impl Distribution {
    pub fn gaussian(n: usize) -> Self {
        Self::StandardGaussian { n }
    }

    /// `(1 - w) N(0, I) + w δ_at`.
    pub fn gaussian_with_atom(w: f64, at: Vec<f64>) -> Self {
        let n = at.len();
        Self::Mixture {
            components: vec![
                (
                    1.0 - w,
                    Component::Gaussian {
                        mean: vec![0.0; n],
                        sigma: 1.0,
                    },
                ),
                (w, Component::PointMass { at }),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::StandardGaussian { n } => *n,
            Self::Mixture { components } => components.first().map_or(0, |(_, c)| c.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::StandardGaussian { n: 0 } => Err(Error::InvalidParameter("dimension must be positive".into())),
            Self::StandardGaussian { .. } => Ok(()),
            Self::Mixture { components } => {
                let n = self.dim();
                if n == 0 {
                    return Err(Error::InvalidParameter("mixture needs a component of positive dimension".into()));
                }
                if let Some((_, c)) = components.iter().find(|(_, c)| c.dim() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n as u32,
                        found: c.dim() as u32,
                    });
                }
                let total: f64 = components.iter().map(|(w, _)| *w).sum();
                if components.iter().any(|(w, _)| w.is_nan() || *w < 0.0) || total.is_nan() || total <= 0.0 {
                    return Err(Error::InvalidParameter("mixture weights must be non-negative with positive sum".into()));
                }
                Ok(())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RealPoint {
        match self {
            Self::StandardGaussian { n } => standard_gaussian(*n, rng),
            Self::Mixture { components } => {
                let total: f64 = components.iter().map(|(w, _)| *w).sum();
                let mut u = rng.random::<f64>() * total;
                for (w, c) in components {
                    if u < *w {
                        return c.sample(rng);
                    }
                    u -= w;
                }
                // Only reachable through rounding in the weight sum.
                components.iter().rev().find(|(w, _)| *w > 0.0).expect("validated mixture").1.sample(rng)
            }
        }
    }
}

pub fn standard_gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealPoint {
    (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            Real::new(z)
        })
        .collect()
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StandardGaussian { n } => write!(f, "gaussian({n})"),
            Self::Mixture { components } => {
                let parts: Vec<String> = components
                    .iter()
                    .map(|(w, c)| match c {
                        Component::Gaussian { mean, sigma } => format!("{w}*normal({};{sigma})", fmt_list(mean)),
                        Component::PointMass { at } => format!("{w}*point({})", fmt_list(at)),
                    })
                    .collect();
                f.write_str(&parts.join("+"))
            }
        }
    }
}

/// Parses `gaussian(n)` or a mixture such as `0.9*normal(0,0;1)+0.1*point(6,0)`.
impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_err = |msg: &str| Error::Parse(format!("{msg} in distribution {s:?}"));
        let list = |body: &str| -> Result<Vec<f64>> {
            body.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| parse_err("bad number")))
                .collect()
        };
        let d = if let Some(n) = s.strip_prefix("gaussian(").and_then(|r| r.strip_suffix(')')) {
            Self::StandardGaussian {
                n: n.trim().parse().map_err(|_| parse_err("bad dimension"))?,
            }
        } else {
            let components = s
                .split('+')
                .map(|part| {
                    let (w, body) = part.split_once('*').ok_or_else(|| parse_err("expected weight*component"))?;
                    let w: f64 = w.trim().parse().map_err(|_| parse_err("bad weight"))?;
                    let body = body.trim();
                    let c = if let Some(inner) = body.strip_prefix("normal(").and_then(|r| r.strip_suffix(')')) {
                        let (mean, sigma) = inner.split_once(';').ok_or_else(|| parse_err("normal needs mean;sigma"))?;
                        Component::Gaussian {
                            mean: list(mean)?,
                            sigma: sigma.trim().parse().map_err(|_| parse_err("bad sigma"))?,
                        }
                    } else if let Some(inner) = body.strip_prefix("point(").and_then(|r| r.strip_suffix(')')) {
                        Component::PointMass { at: list(inner)? }
                    } else {
                        return Err(parse_err("unknown component"));
                    };
                    Ok((w, c))
                })
                .collect::<Result<Vec<_>>>()?;
            Self::Mixture { components }
        };
        d.validate()?;
        Ok(d)
    }
}
