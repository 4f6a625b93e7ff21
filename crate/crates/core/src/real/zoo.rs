use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::real::oracle::RealFunction;
use crate::real::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    /// Exponent of each variable; shorter vectors are padded with zeros.
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// Built-in test functions, addressable by a short textual form:
///
/// * `additive(c1,...,cn)`: `Σ c_i x_i`
/// * `affine(c1,...,cn,b)`: `Σ c_i x_i + b`
/// * `poly(n; c:e1,...,en; ...)`: sum of monomials `c * Π x_i^{e_i}`
/// * `bump(F,z,h)`: `F(x) + h * [x_1 > z]`
/// * `exp(n)`: `exp(x_1)`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZooFunction {
    Additive { c: Vec<f64> },
    Affine { c: Vec<f64>, b: f64 },
    Poly { n: usize, terms: Vec<Monomial> },
    Bump { base: Box<ZooFunction>, threshold: f64, height: f64 },
    Exp { n: usize },
}

impl ZooFunction {
    pub fn bump(base: ZooFunction, threshold: f64, height: f64) -> Self {
        Self::Bump {
            base: Box::new(base),
            threshold,
            height,
        }
    }

    /// Exactly additive (`f(x + y) = f(x) + f(y)` in exact arithmetic).
    pub fn is_additive(&self) -> bool {
        match self {
            Self::Additive { .. } => true,
            Self::Affine { b, .. } => *b == 0.0,
            Self::Poly { terms, .. } => terms.iter().all(|t| t.degree() == 1 || t.coef == 0.0),
            Self::Bump { .. } | Self::Exp { .. } => false,
        }
    }

    /// Degree, if the function is a polynomial.
    pub fn degree(&self) -> Option<u32> {
        match self {
            Self::Additive { .. } | Self::Affine { .. } => Some(1),
            Self::Poly { terms, .. } => Some(terms.iter().filter(|t| t.coef != 0.0).map(Monomial::degree).max().unwrap_or(0)),
            Self::Bump { .. } | Self::Exp { .. } => None,
        }
    }

    /// A polynomial with every monomial of degree at most `d` in `n` variables
    /// and independent standard-normal coefficients, except that at least one
    /// degree-`d` monomial is present.
    pub fn random_poly<R: Rng + ?Sized>(n: usize, d: u32, rng: &mut R) -> Self {
        let mut terms = Vec::new();
        let mut exps = vec![0u32; n];
        loop {
            if exps.iter().sum::<u32>() <= d {
                let coef: f64 = rng.sample(rand_distr::StandardNormal);
                terms.push(Monomial {
                    coef,
                    exps: exps.clone(),
                });
            }
            // Odometer over exponent vectors in [0, d]^n.
            let mut i = 0;
            while i < n && exps[i] == d {
                exps[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            exps[i] += 1;
        }
        if let Some(top) = terms.iter_mut().find(|t| t.degree() == d) {
            if top.coef.abs() < 0.1 {
                top.coef = 1.0;
            }
        }
        Self::Poly { n, terms }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Self::Additive { c } | Self::Affine { c, .. } if c.is_empty() => bad("coefficient list is empty".into()),
            Self::Poly { n, terms } => {
                if *n == 0 {
                    return bad("polynomial arity must be positive".into());
                }
                match terms.iter().find(|t| t.exps.len() > *n) {
                    Some(t) => bad(format!("monomial {:?} has more than {n} exponents", t.exps)),
                    None => Ok(()),
                }
            }
            Self::Bump { base, .. } => base.validate(),
            Self::Exp { n } if *n == 0 => bad("arity must be positive".into()),
            _ => Ok(()),
        }
    }
}

fn dot(c: &[f64], x: &[Real]) -> Real {
    c.iter().zip(x).map(|(&ci, &xi)| xi * ci).sum()
}

impl RealFunction for ZooFunction {
    fn arity(&self) -> usize {
        match self {
            Self::Additive { c } | Self::Affine { c, .. } => c.len(),
            Self::Poly { n, .. } | Self::Exp { n } => *n,
            Self::Bump { base, .. } => base.arity(),
        }
    }

    fn eval(&self, x: &[Real]) -> Real {
        match self {
            Self::Additive { c } => dot(c, x),
            Self::Affine { c, b } => dot(c, x) + Real::new(*b),
            Self::Poly { terms, .. } => {
                let top = terms.iter().flat_map(|t| t.exps.iter().copied()).max().unwrap_or(0) as usize;
                // powers[i * (top + 1) + e] = x_i^e
                let mut powers: SmallVec<[Real; 64]> = SmallVec::with_capacity(x.len() * (top + 1));
                for &xi in x {
                    let mut acc = Real::ONE;
                    for _ in 0..=top {
                        powers.push(acc);
                        acc = acc * xi;
                    }
                }
                terms
                    .iter()
                    .map(|t| {
                        t.exps
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e != 0)
                            .fold(Real::new(t.coef), |acc, (i, &e)| acc * powers[i * (top + 1) + e as usize])
                    })
                    .sum()
            }
            Self::Bump {
                base,
                threshold,
                height,
            } => {
                let v = base.eval(x);
                if x[0] > Real::new(*threshold) {
                    v + Real::new(*height)
                } else {
                    v
                }
            }
            Self::Exp { .. } => x[0].exp(),
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ZooFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Additive { c } => write!(f, "additive({})", join(c)),
            Self::Affine { c, b } => write!(f, "affine({},{b})", join(c)),
            Self::Poly { n, terms } => {
                write!(f, "poly({n}")?;
                for t in terms {
                    let e: Vec<String> = t.exps.iter().map(u32::to_string).collect();
                    write!(f, "; {}:{}", t.coef, e.join(","))?;
                }
                f.write_str(")")
            }
            Self::Bump {
                base,
                threshold,
                height,
            } => write!(f, "bump({base},{threshold},{height})"),
            Self::Exp { n } => write!(f, "exp({n})"),
        }
    }
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("expected a number, got {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    split_top(s, ',').into_iter().map(parse_f64).collect()
}

impl FromStr for ZooFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| Error::Parse(format!("expected name(args), got {s:?}")))?;
        let args = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing closing parenthesis in {s:?}")))?;
        let f = match &s[..open] {
            "additive" => Self::Additive { c: parse_list(args)? },
            "affine" => {
                let mut c = parse_list(args)?;
                let b = c.pop().ok_or_else(|| Error::Parse("affine needs an offset".into()))?;
                Self::Affine { c, b }
            }
            "poly" => {
                let mut parts = split_top(args, ';').into_iter();
                let n: usize = parts
                    .next()
                    .unwrap_or_default()
                    .parse()
                    .map_err(|_| Error::Parse("poly needs the arity first".into()))?;
                let terms = parts
                    .map(|t| {
                        let (c, e) = t
                            .split_once(':')
                            .ok_or_else(|| Error::Parse(format!("monomial {t:?} must be coef:exponents")))?;
                        let exps = e
                            .split(',')
                            .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent {x:?}"))))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Monomial {
                            coef: parse_f64(c)?,
                            exps,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::Poly { n, terms }
            }
            "bump" => {
                let parts = split_top(args, ',');
                let [base, z, h] = parts.as_slice() else {
                    return Err(Error::Parse("bump takes (function, threshold, height)".into()));
                };
                Self::bump(base.parse()?, parse_f64(z)?, parse_f64(h)?)
            }
            "exp" => Self::Exp {
                n: args.trim().parse().map_err(|_| Error::Parse("exp takes the arity".into()))?,
            },
            other => return Err(Error::Parse(format!("unknown function family {other:?}"))),
        };
        f.validate()?;
        Ok(f)
    }
}
