//! Test functions f and the potential operator
//! `G^{(α)}F(t) = ∫_0^∞ F(t+s) s^{α-1} ds`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::special::beta_fn;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// Σ_k a_k 1_{[0, t_k]}, stored as `(a_k, t_k)`.
    Indicators { terms: Vec<(f64, f64)> },
    /// `values[i]` on `[edges[i], edges[i+1])`, zero elsewhere.
    PiecewiseConstant { edges: Vec<f64>, values: Vec<f64> },
    /// (1+s)^{-γ}: not compactly supported; only `g_alpha` accepts it.
    PowerDecay { gamma: f64 },
}

impl TestFunction {
    pub fn zero() -> Self {
        Self::Indicators { terms: Vec::new() }
    }

    /// c·1_{[0,u]}
    pub fn indicator(c: f64, u: f64) -> Self {
        Self::Indicators { terms: vec![(c, u)] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Indicators { terms } => {
                for &(a, t) in terms {
                    if !a.is_finite() || !(t >= 0.0 && t.is_finite()) {
                        return Err(Error::InvalidParameter(format!("bad indicator term ({a}, {t})")));
                    }
                }
            }
            Self::PiecewiseConstant { edges, values } => {
                if edges.len() != values.len() + 1 || edges.windows(2).any(|w| !(w[1] > w[0])) || edges[0] < 0.0 {
                    return Err(Error::InvalidParameter("piecewise-constant f needs increasing edges >= 0".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite piece value".into()));
                }
            }
            Self::PowerDecay { gamma } => {
                if !(*gamma > 0.0) {
                    return Err(domain("gamma", *gamma, "decay exponent must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            Self::Indicators { terms } => terms.iter().filter(|(_, u)| t <= *u).map(|(a, _)| a).sum(),
            Self::PiecewiseConstant { edges, values } => {
                match edges.iter().rposition(|&e| e <= t) {
                    Some(i) if i < values.len() => values[i],
                    _ => 0.0,
                }
            }
            Self::PowerDecay { gamma } => (1.0 + t).powf(-gamma),
        }
    }

    /// lim_{s↑t} f(s).
    pub fn eval_left(&self, t: f64) -> f64 {
        match self {
            Self::Indicators { terms } => terms.iter().filter(|(_, u)| t <= *u && *u > 0.0).map(|(a, _)| a).sum(),
            Self::PiecewiseConstant { edges, values } => match edges.iter().position(|&e| e >= t) {
                Some(0) | None => 0.0,
                Some(i) => values[i - 1],
            },
            Self::PowerDecay { .. } => self.eval(t),
        }
    }

    /// Right end of the support, `None` if unbounded.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            Self::Indicators { terms } => Some(terms.iter().map(|t| t.1).fold(0.0, f64::max)),
            Self::PiecewiseConstant { edges, .. } => Some(*edges.last().unwrap()),
            Self::PowerDecay { .. } => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            // Σ a_k 1_{[0,t_k]} ≥ 0 iff every tail sum over t_k ≥ u is ≥ 0
            Self::Indicators { terms } => terms.iter().all(|&(_, u)| self.eval(u) >= 0.0),
            Self::PiecewiseConstant { values, .. } => values.iter().all(|&v| v >= 0.0),
            Self::PowerDecay { .. } => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Indicators { terms } => terms.iter().all(|t| t.0 == 0.0 || t.1 == 0.0),
            Self::PiecewiseConstant { values, .. } => values.iter().all(|&v| v == 0.0),
            Self::PowerDecay { .. } => false,
        }
    }

    /// f_T(t) = f(t/T) / F_T.
    pub fn rescaled(&self, scale: f64, norm: f64) -> Result<Self> {
        if !(scale > 0.0 && norm > 0.0) {
            return Err(Error::InvalidParameter("scale and norm must be positive".into()));
        }
        match self {
            Self::Indicators { terms } => Ok(Self::Indicators {
                terms: terms.iter().map(|&(a, u)| (a / norm, u * scale)).collect(),
            }),
            Self::PiecewiseConstant { edges, values } => Ok(Self::PiecewiseConstant {
                edges: edges.iter().map(|e| e * scale).collect(),
                values: values.iter().map(|v| v / norm).collect(),
            }),
            Self::PowerDecay { .. } => Err(Error::InvalidParameter("power-decay f cannot be rescaled onto a grid".into())),
        }
    }

    /// ⟨μ, f⟩ for a sorted point set.
    pub fn pair(&self, points: &[f64]) -> f64 {
        points.iter().map(|&t| self.eval(t)).sum()
    }
}

/// G^{(α)}f(t). Closed forms: `G^{(α)}1_{[0,u]}(t) = (u-t)_+^α / α`, piecewise
/// constants as differences of those, and `(1+t)^{α-γ} B(α, γ-α)` for the
/// power decay (requires γ > α).
pub fn g_alpha(f: &TestFunction, t: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("alpha", alpha, "must lie in (0, 1)"));
    }
    if !(t >= 0.0) {
        return Err(domain("t", t, "must be nonnegative"));
    }
    f.validate()?;
    let pos = |x: f64| if x > 0.0 { x.powf(alpha) / alpha } else { 0.0 };
    Ok(match f {
        TestFunction::Indicators { terms } => terms.iter().map(|&(a, u)| a * pos(u - t)).sum(),
        TestFunction::PiecewiseConstant { edges, values } => values
            .iter()
            .zip(edges.windows(2))
            .map(|(v, e)| v * (pos(e[1] - t) - pos(e[0] - t)))
            .sum(),
        TestFunction::PowerDecay { gamma } => {
            if *gamma <= alpha {
                return Err(domain("gamma", *gamma, "G^(alpha) diverges unless gamma > alpha"));
            }
            (1.0 + t).powf(alpha - gamma) * beta_fn(alpha, gamma - alpha)
        }
    })
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Indicators { terms } => {
                let parts: Vec<String> = terms.iter().map(|(a, u)| format!("{a}*1[0,{u}]")).collect();
                if parts.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", parts.join(" + "))
                }
            }
            Self::PiecewiseConstant { edges, values } => {
                let parts: Vec<String> = values
                    .iter()
                    .zip(edges.windows(2))
                    .map(|(v, e)| format!("{v}*1[{},{})", e[0], e[1]))
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
            Self::PowerDecay { gamma } => write!(f, "(1+t)^-{gamma}"),
        }
    }
}

/// `indicator:LO:HI[:WEIGHT]`, `power:GAMMA`, or `zero`.
impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{x}` in test function `{s}`")))
        };
        let f = match parts.as_slice() {
            ["zero"] => Self::zero(),
            ["indicator", lo, hi] | ["indicator", lo, hi, _] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let w = if parts.len() == 4 { num(parts[3])? } else { 1.0 };
                if lo == 0.0 {
                    Self::indicator(w, hi)
                } else {
                    Self::PiecewiseConstant {
                        edges: vec![lo, hi],
                        values: vec![w],
                    }
                }
            }
            ["power", g] => Self::PowerDecay { gamma: num(g)? },
            _ => return Err(Error::Config(format!("unrecognized test function `{s}`"))),
        };
        f.validate()?;
        Ok(f)
    }
}
