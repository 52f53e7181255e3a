//! Cluster (branching) simulation on a finite horizon.
//!
//! Every particle draws its offspring count, each child gets a displacement
//! ξ ~ φ and a fresh mark. Children beyond the horizon are dropped together
//! with their whole subtree: displacements are positive, so nothing in that
//! subtree can land back inside the window. Pruning is therefore exact.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::KernelSpec;
use crate::marks::MarkDistribution;
use crate::simulator::offspring::OffspringLaw;

/// Hard limit on events per replica; hitting it is reported, never truncated.
pub const DEFAULT_EVENT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub id: u64,
    pub time: f64,
    pub mark: f64,
    pub generation: u32,
    pub parent: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct ClusterParams<'a> {
    pub horizon: f64,
    pub kernel: &'a KernelSpec,
    pub marks: &'a MarkDistribution,
    pub law: &'a OffspringLaw,
    pub cap: u64,
}

/// Breadth-first expansion of the cluster rooted at `root`, appending to
/// `out`. Ids continue from `*next_id`; `budget` is the remaining event cap.
pub fn expand_cluster<R: Rng + ?Sized>(
    root: EventRecord,
    params: &ClusterParams<'_>,
    rng: &mut R,
    next_id: &mut u64,
    out: &mut Vec<EventRecord>,
) -> Result<()> {
    if root.time > params.horizon {
        return Ok(());
    }
    let mut queue = VecDeque::new();
    out.push(root);
    queue.push_back(root);
    while let Some(parent) = queue.pop_front() {
        let count = params.law.sample_count(parent.mark, rng);
        for _ in 0..count {
            let time = parent.time + params.kernel.sample_displacement(rng);
            let mark = params.marks.sample(rng);
            if time > params.horizon {
                continue;
            }
            if out.len() as u64 >= params.cap {
                return Err(Error::EventCapExceeded { cap: params.cap });
            }
            let child = EventRecord {
                id: *next_id,
                time,
                mark,
                generation: parent.generation + 1,
                parent: Some(parent.id),
            };
            *next_id += 1;
            out.push(child);
            queue.push_back(child);
        }
    }
    Ok(())
}

/// All events of one cluster inside `[0, horizon]`.
pub fn simulate_cluster<R: Rng + ?Sized>(
    root: EventRecord,
    horizon: f64,
    kernel: &KernelSpec,
    marks: &MarkDistribution,
    law: &OffspringLaw,
    rng: &mut R,
) -> Result<Vec<EventRecord>> {
    let params = ClusterParams {
        horizon,
        kernel,
        marks,
        law,
        cap: DEFAULT_EVENT_CAP,
    };
    let mut out = Vec::new();
    let mut next_id = root.id + 1;
    expand_cluster(root, &params, rng, &mut next_id, &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SimOutput {
    /// sorted event times
    pub times: Vec<f64>,
    pub records: Option<Vec<EventRecord>>,
    /// evaluation points of the counting path
    pub grid: Vec<f64>,
    /// N([0, grid[j]])
    pub counts: Vec<u64>,
}

impl SimOutput {
    pub fn from_times(mut times: Vec<f64>, records: Option<Vec<EventRecord>>, grid: &[f64]) -> Self {
        times.sort_by(f64::total_cmp);
        let counts = grid.iter().map(|&t| times.partition_point(|&s| s <= t) as u64).collect();
        Self {
            times,
            records,
            grid: grid.to_vec(),
            counts,
        }
    }

    /// N([0, t]).
    pub fn count_at(&self, t: f64) -> u64 {
        self.times.partition_point(|&s| s <= t) as u64
    }
}

#[derive(Debug, Clone)]
pub struct SimOptions {
    pub keep_records: bool,
    pub grid: Vec<f64>,
    pub cap: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            keep_records: false,
            grid: Vec::new(),
            cap: DEFAULT_EVENT_CAP,
        }
    }
}

/// Immigrants form a Poisson(μ) process on `[0, horizon]`; each one spawns
/// an independent cluster.
pub fn simulate_hawkes<R: Rng + ?Sized>(
    mu: f64,
    horizon: f64,
    kernel: &KernelSpec,
    marks: &MarkDistribution,
    law: &OffspringLaw,
    opts: &SimOptions,
    rng: &mut R,
) -> Result<SimOutput> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(domain("mu", mu, "must be finite and nonnegative"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain("horizon", horizon, "must be positive"));
    }
    let lambda = mu * horizon;
    let n_imm = if lambda > 0.0 {
        let d: f64 = Poisson::new(lambda)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(rng);
        d as usize
    } else {
        0
    };
    let mut roots: Vec<f64> = (0..n_imm).map(|_| horizon * rng.random::<f64>()).collect();
    roots.sort_by(f64::total_cmp);

    let params = ClusterParams {
        horizon,
        kernel,
        marks,
        law,
        cap: opts.cap,
    };
    let mut events = Vec::new();
    let mut next_id = 0u64;
    for t in roots {
        let root = EventRecord {
            id: next_id,
            time: t,
            mark: marks.sample(rng),
            generation: 0,
            parent: None,
        };
        next_id += 1;
        expand_cluster(root, &params, rng, &mut next_id, &mut events)?;
    }
    let times = events.iter().map(|e| e.time).collect();
    let records = opts.keep_records.then_some(events);
    Ok(SimOutput::from_times(times, records, &opts.grid))
}
