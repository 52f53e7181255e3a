//! Tabulated inverse tail `v ↦ Φ⁻¹(v)` for kernels without a closed-form
//! quantile, plus a versioned binary cache.
//!
//! Knots sit on a geometric grid `t_i ∈ [TABLE_MIN, TABLE_MAX]`; the
//! interpolant is monotone cubic in `(-ln Φ(t), ln t)`. Outside the grid the
//! small-time expansion `1 - Φ(t) ≈ c₀ t^α` and the power tail
//! `Φ(t) ≈ c_φ t^{-α}` take over.
//!
//! Cache layout (little endian): magic `CHKT`, `u32` version, `u64` knot
//! count, then the abscissae and ordinates as raw `f64` bits.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numeric::interp::MonotoneCubic;

pub const TABLE_MIN: f64 = 1e-6;
pub const TABLE_MAX: f64 = 1e6;
pub const TABLE_KNOTS: usize = 2048;

const MAGIC: &[u8; 4] = b"CHKT";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct InverseTail {
    interp: MonotoneCubic,
    alpha: f64,
    /// 1 - Φ(t) ≈ head * t^α near 0
    head: f64,
    /// Φ(t) ≈ c_phi * t^{-α} at infinity
    c_phi: f64,
}

impl InverseTail {
    pub fn build<F>(tail: F, alpha: f64, head: f64, c_phi: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let ratio = (TABLE_MAX / TABLE_MIN).ln() / (TABLE_KNOTS - 1) as f64;
        let mut xs = Vec::with_capacity(TABLE_KNOTS);
        let mut ys = Vec::with_capacity(TABLE_KNOTS);
        for i in 0..TABLE_KNOTS {
            let lt = TABLE_MIN.ln() + ratio * i as f64;
            let phi = tail(lt.exp())?;
            xs.push(-phi.ln());
            ys.push(lt);
        }
        Self::from_knots(xs, ys, alpha, head, c_phi)
    }

    fn from_knots(xs: Vec<f64>, ys: Vec<f64>, alpha: f64, head: f64, c_phi: f64) -> Result<Self> {
        Ok(Self {
            interp: MonotoneCubic::new(xs, ys)?,
            alpha,
            head,
            c_phi,
        })
    }

    /// Φ⁻¹(v) for a tail level `v ∈ (0, 1]`.
    pub fn quantile(&self, v: f64) -> f64 {
        let y = -v.ln();
        let (lo, hi) = self.interp.x_range();
        if y < lo {
            // 1 - v ≈ -ln v for v near 1
            (y / self.head).powf(1.0 / self.alpha)
        } else if y > hi {
            (self.c_phi / v).powf(1.0 / self.alpha)
        } else {
            self.interp.eval(y).exp()
        }
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        self.interp.knots()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let (xs, ys) = self.interp.knots();
        let mut buf = Vec::with_capacity(16 + 16 * xs.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&(xs.len() as u64).to_le_bytes());
        for v in xs.iter().chain(ys) {
            buf.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        let tmp = path.with_extension("tmp");
        fs::File::create(&tmp)?.write_all(&buf)?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path, alpha: f64, head: f64, c_phi: f64) -> Result<Self> {
        let mut buf = Vec::new();
        fs::File::open(path)?.read_to_end(&mut buf)?;
        if buf.len() < 16 || &buf[..4] != MAGIC {
            return Err(Error::Cache(format!("{}: bad magic", path.display())));
        }
        let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Cache(format!("{}: version {version}, expected {VERSION}", path.display())));
        }
        let n = u64::from_le_bytes(buf[8..16].try_into().unwrap()) as usize;
        if buf.len() != 16 + 16 * n {
            return Err(Error::Cache(format!("{}: truncated", path.display())));
        }
        let word = |i: usize| f64::from_bits(u64::from_le_bytes(buf[16 + 8 * i..24 + 8 * i].try_into().unwrap()));
        let xs = (0..n).map(word).collect();
        let ys = (n..2 * n).map(word).collect();
        Self::from_knots(xs, ys, alpha, head, c_phi)
    }
}

/// Cache file for a parameter key: `<dir>/tail-v<version>-<sha256(key)>.bin`.
pub fn cache_path(dir: &Path, key: &str) -> PathBuf {
    let digest = Sha256::digest(format!("{key}|{TABLE_MIN:e}|{TABLE_MAX:e}|{TABLE_KNOTS}").as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("tail-v{VERSION}-{hex}.bin"))
}
