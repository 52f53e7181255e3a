//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::marks::MarkDistribution;
use crate::renewal::TestFunction;
use crate::simulator::{OffspringLaw, OffspringSpec};
use crate::stable::LimitModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// `ParetoTail`, `MittagLeffler` or `StableDensity`
    pub variant: String,
    pub alpha: f64,
    /// Mittag-Leffler scale; defaults to 1
    #[serde(default)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarksConfig {
    /// `DiracOne`, `ParetoMean1`, `ExponentialMean1` or `GammaMean1`
    pub variant: String,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub shape: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffspringConfig {
    /// `PoissonOfMark` or `BetaSibuya`
    pub variant: String,
    #[serde(default)]
    pub beta: Option<f64>,
}

impl Default for OffspringConfig {
    fn default() -> Self {
        Self {
            variant: "PoissonOfMark".into(),
            beta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CltConfig {
    pub t_grid: Vec<f64>,
    /// test functions in the `indicator:LO:HI[:W]` / `power:G` / `zero` syntax
    pub test_functions: Vec<String>,
    pub replicas: usize,
    pub lambdas: Vec<f64>,
    /// solver cells per rescaled support
    pub cells: usize,
    /// Hill uses k = n^exponent of the positive samples
    pub hill_exponent: f64,
}

impl Default for CltConfig {
    fn default() -> Self {
        Self {
            t_grid: vec![1e2, 1e3],
            test_functions: vec!["indicator:0:1".into()],
            replicas: 10_000,
            lambdas: vec![0.5, 1.0, 2.0],
            cells: 10_000,
            hill_exponent: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitConfig {
    pub dt: f64,
    pub tmax: f64,
    pub paths: usize,
    /// time points (in units of T) at which X_T and ζ are compared
    pub t_points: Vec<f64>,
    /// T used for X_T; defaults to the largest entry of the CLT grid
    pub scale: Option<f64>,
    /// cells of the resolvent table used for centering
    pub table_cells: usize,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            dt: 1.0 / 256.0,
            tmax: 2.0,
            paths: 10_000,
            t_points: vec![0.0, 0.5, 1.0],
            scale: None,
            table_cells: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// relative error of the deterministic w-integral vs the limit target
    pub deterministic: f64,
    /// Monte Carlo agreement in standard errors
    pub mc_se: f64,
    /// absolute error of the Hill estimate
    pub hill: f64,
    /// relative error of median/IQR comparisons
    pub quantile: f64,
    /// relative error of the self-similarity check
    pub self_similarity: f64,
    /// relative error of the Gaussian variance check
    pub variance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            deterministic: 0.15,
            mc_se: 3.0,
            hill: 0.15,
            quantile: 0.15,
            self_similarity: 0.10,
            variance: 0.15,
        }
    }
}

fn default_mu() -> f64 {
    1.0
}

fn default_seed() -> u64 {
    20_240_601
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// directory for tabulation caches
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    pub kernel: KernelConfig,
    pub marks: MarksConfig,
    #[serde(default)]
    pub offspring: OffspringConfig,
    #[serde(default)]
    pub clt: CltConfig,
    #[serde(default)]
    pub limit: LimitConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Which limit theorem a configuration falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Poisson offspring, heavy-tailed marks
    HeavyTail,
    /// β-offspring law without marks
    BetaOffspring,
    /// Poisson offspring, finite-variance marks
    Gaussian,
}

/// Everything an experiment needs, built from a validated config.
#[derive(Debug, Clone)]
pub struct Model {
    pub kernel: KernelSpec,
    pub marks: MarkDistribution,
    pub law: OffspringLaw,
    pub limit: LimitModel,
    pub mode: Mode,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    /// Config echo for reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is serializable")
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        let k = &self.kernel;
        match k.variant.as_str() {
            "ParetoTail" => KernelSpec::pareto(k.alpha),
            "MittagLeffler" => {
                let theta = k.theta.unwrap_or(1.0);
                match &self.cache_dir {
                    Some(dir) => KernelSpec::mittag_leffler_cached(k.alpha, theta, dir),
                    None => KernelSpec::mittag_leffler(k.alpha, theta),
                }
            }
            "StableDensity" => KernelSpec::stable(k.alpha),
            other => Err(Error::Config(format!("unknown kernel.variant `{other}`"))),
        }
    }

    pub fn mark_distribution(&self) -> Result<MarkDistribution> {
        let m = &self.marks;
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| Error::Config(format!("marks.{key} is required for {}", m.variant)));
        let d = match m.variant.as_str() {
            "DiracOne" => MarkDistribution::DiracOne,
            "ParetoMean1" => MarkDistribution::ParetoMean1 { beta: need(m.beta, "beta")? },
            "ExponentialMean1" => MarkDistribution::ExponentialMean1,
            "GammaMean1" => MarkDistribution::GammaMean1 { shape: need(m.shape, "shape")? },
            other => return Err(Error::Config(format!("unknown marks.variant `{other}`"))),
        };
        d.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(d)
    }

    pub fn offspring_law(&self) -> Result<OffspringLaw> {
        let o = &self.offspring;
        let spec = match o.variant.as_str() {
            "PoissonOfMark" => OffspringSpec::PoissonOfMark,
            "BetaSibuya" => OffspringSpec::BetaSibuya {
                beta: o.beta.ok_or_else(|| Error::Config("offspring.beta is required for BetaSibuya".into()))?,
            },
            other => return Err(Error::Config(format!("unknown offspring.variant `{other}`"))),
        };
        OffspringLaw::from_spec(spec).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn test_functions(&self) -> Result<Vec<TestFunction>> {
        self.clt
            .test_functions
            .iter()
            .map(|s| s.parse::<TestFunction>().map_err(|e| Error::Config(format!("test function `{s}`: {e}"))))
            .collect()
    }

    /// Build and cross-check all model components.
    pub fn model(&self) -> Result<Model> {
        let kernel = self.kernel_spec().map_err(|e| Error::Config(e.to_string()))?;
        let marks = self.mark_distribution()?;
        let law = self.offspring_law()?;
        let (mode, limit) = match &law {
            OffspringLaw::BetaSibuya(t) => {
                if marks != MarkDistribution::DiracOne {
                    return Err(Error::Config("BetaSibuya offspring ignores marks; use marks.variant = \"DiracOne\"".into()));
                }
                (Mode::BetaOffspring, LimitModel::beta_offspring(&kernel, t.beta(), self.mu))
            }
            OffspringLaw::PoissonOfMark if marks.beta().is_some() => (Mode::HeavyTail, LimitModel::heavy_tailed(&kernel, &marks, self.mu)),
            OffspringLaw::PoissonOfMark => (Mode::Gaussian, LimitModel::gaussian(&kernel, &marks, self.mu)),
        };
        let limit = limit.map_err(|e| Error::Config(e.to_string()))?;
        Ok(Model {
            kernel,
            marks,
            law,
            limit,
            mode,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Config(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.kernel.alpha > 0.0 && self.kernel.alpha < 1.0) {
            return Err(Error::Config(format!("kernel.alpha must lie in (0,1), got {}", self.kernel.alpha)));
        }
        if self.clt.t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Config("clt.t_grid entries must be positive".into()));
        }
        if self.clt.lambdas.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(Error::Config("clt.lambdas must be nonnegative".into()));
        }
        if self.clt.replicas < 2 || self.limit.paths < 2 {
            return Err(Error::Config("need at least two replicas and two limit paths".into()));
        }
        if !(self.limit.dt > 0.0 && self.limit.tmax > 0.0) {
            return Err(Error::Config("limit.dt and limit.tmax must be positive".into()));
        }
        if self.limit.t_points.iter().any(|&t| !(t >= 0.0 && t <= self.limit.tmax)) {
            return Err(Error::Config("limit.t_points must lie in [0, limit.tmax]".into()));
        }
        for f in self.test_functions()? {
            if !f.is_nonnegative() || f.support_end().is_none() {
                return Err(Error::Config(format!("test function {f} must be nonnegative with compact support")));
            }
        }
        self.model().map(|_| ())
    }
}
