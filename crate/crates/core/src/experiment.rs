//! Reproducible Monte Carlo campaigns.
//!
//! Every trial `k` draws its randomness from [`task_rng`]`(seed, k)`, trials
//! run on a bounded rayon pool, and results are reduced in trial order, so a
//! report is a pure function of the configuration regardless of worker count.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{anticoncentration_depth, theorem_bound, type1_path_bound};
use crate::error::{Result, XebError};
use crate::gates::Unitary2Q;
use crate::pauli_chain::{self, DEFAULT_MAX_WIDTH};
use crate::seed::{task_rng, TaskRng};
use crate::skeleton::{build_1d_brickwork, build_2d_grid, Skeleton};
use crate::spoofer::{self, closed_form_fidelity, cone_marginal};
use crate::statevector::{self, xeb_instance, Circuit, SimOptions, DEFAULT_MAX_QUBITS};

pub const TOOL: &str = "xebspoof";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "1d")]
    OneD,
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "custom")]
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything that determines a campaign's results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub arch: Architecture,
    pub n: usize,
    pub d: usize,
    pub rows: usize,
    pub cols: usize,
    /// Wiring for [`Architecture::Custom`]; its `n` and `d` take precedence.
    pub skeleton: Option<Skeleton>,
    pub m: usize,
    pub trials: usize,
    /// Samples drawn per circuit for the empirical XEB (0 skips it).
    pub samples: usize,
    pub seed: u64,
    /// Replace every gate by the identity.
    pub identity_gates: bool,
    /// Depth sweep for the collision study; empty means the single
    /// anti-concentration depth ceil(log n / log(5/4)).
    pub depths: Vec<usize>,
    pub max_qubits: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            arch: Architecture::OneD,
            n: 12,
            d: 2,
            rows: 0,
            cols: 0,
            skeleton: None,
            m: 3,
            trials: 100,
            samples: 1000,
            seed: 0,
            identity_gates: false,
            depths: Vec::new(),
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl ExperimentConfig {
    /// Skeleton of the configured architecture at depth `d`.
    pub fn skeleton_at(&self, d: usize) -> Result<Skeleton> {
        match self.arch {
            Architecture::OneD => build_1d_brickwork(self.n, d),
            Architecture::TwoD => {
                if self.rows * self.cols != self.n {
                    return Err(XebError::InvalidArgument(format!(
                        "grid {}x{} does not have n = {} qubits",
                        self.rows, self.cols, self.n
                    )));
                }
                build_2d_grid(self.rows, self.cols, d)
            }
            Architecture::Custom => {
                let s = self.skeleton.clone().ok_or_else(|| {
                    XebError::InvalidArgument("custom architecture needs a skeleton file".into())
                })?;
                if s.depth() != d {
                    return Err(XebError::InvalidArgument(format!(
                        "custom skeleton has depth {}, requested {d}",
                        s.depth()
                    )));
                }
                Ok(s)
            }
        }
    }

    pub fn skeleton(&self) -> Result<Skeleton> {
        self.skeleton_at(self.depth())
    }

    pub fn qubits(&self) -> usize {
        self.skeleton.as_ref().map_or(self.n, Skeleton::n)
    }

    pub fn depth(&self) -> usize {
        match (&self.arch, &self.skeleton) {
            (Architecture::Custom, Some(s)) => s.depth(),
            _ => self.d,
        }
    }

    fn circuit(&self, s: Skeleton, rng: &mut TaskRng) -> Circuit {
        if self.identity_gates {
            Circuit::uniform(s, Unitary2Q::identity())
        } else {
            Circuit::haar(s, rng)
        }
    }

    fn sim_options(&self) -> SimOptions {
        SimOptions {
            max_qubits: self.max_qubits,
        }
    }
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl Estimate {
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let count = v.len();
        if count == 0 {
            return Estimate {
                mean: f64::NAN,
                stderr: f64::NAN,
                count,
            };
        }
        let mean = v.iter().sum::<f64>() / count as f64;
        let stderr = if count > 1 {
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr,
            count,
        }
    }

    /// |mean - target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

/// Runs `f(k)` for every trial on a pool of `workers` threads, in trial order.
pub fn run_trials<T, F>(trials: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| XebError::InvalidArgument(format!("cannot build worker pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpoofRow {
    pub trial: usize,
    pub achieved_m: usize,
    pub closed_form_fidelity: f64,
    pub empirical_xeb: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpoofSummary {
    pub selected: Vec<usize>,
    pub achieved_m: usize,
    pub shortfall: bool,
    pub closed_form: Estimate,
    pub empirical: Option<Estimate>,
    pub theorem_bound: f64,
    pub exact_expected: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpoofReport {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub summary: SpoofSummary,
    pub trials: Vec<SpoofRow>,
}

/// Haar circuits, one spoofing plan each, closed-form fidelity and (when
/// `samples > 0`) the empirical XEB scored against the statevector oracle.
pub fn run_spoof(cfg: &ExperimentConfig, workers: usize) -> Result<SpoofReport> {
    let skel = cfg.skeleton()?;
    if cfg.samples > 0 && skel.n() > cfg.max_qubits {
        return Err(XebError::ResourceCap {
            what: "empirical XEB oracle (statevector)",
            width: skel.n(),
            bytes: 16u128 << skel.n().min(100),
            cap: cfg.max_qubits,
        });
    }
    let selection = skel.greedy_disjoint(cfg.m)?;
    let rows = run_trials(cfg.trials, workers, |k| {
        let mut rng = task_rng(cfg.seed, k as u64);
        let c = cfg.circuit(skel.clone(), &mut rng);
        let p = spoofer::plan(&c, cfg.m)?;
        let empirical = if cfg.samples > 0 {
            let psi = statevector::simulate_with(&c, cfg.sim_options())?;
            let mut total = 0.0;
            for _ in 0..cfg.samples {
                let x = spoofer::sample(&p, &mut rng);
                total += xeb_instance(&psi, x)?;
            }
            Some(total / cfg.samples as f64)
        } else {
            None
        };
        Ok(SpoofRow {
            trial: k,
            achieved_m: p.m(),
            closed_form_fidelity: closed_form_fidelity(&p),
            empirical_xeb: empirical,
        })
    })?;
    let max_cone = selection
        .selected
        .iter()
        .map(|&i| skel.light_cone(i).map(|c| c.size()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let exact_expected = if cfg.identity_gates || max_cone > DEFAULT_MAX_WIDTH {
        None
    } else {
        Some(pauli_chain::expected_fidelity_exact(
            &skel,
            &selection.selected,
        )?)
    };
    let summary = SpoofSummary {
        selected: selection.selected.iter().map(|i| i + 1).collect(),
        achieved_m: selection.achieved(),
        shortfall: selection.shortfall(),
        closed_form: Estimate::from_values(rows.iter().map(|r| r.closed_form_fidelity)),
        empirical: if cfg.samples > 0 {
            Some(Estimate::from_values(
                rows.iter().filter_map(|r| r.empirical_xeb),
            ))
        } else {
            None
        },
        theorem_bound: theorem_bound(selection.achieved(), skel.depth()),
        exact_expected,
    };
    Ok(SpoofReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        config: cfg.clone(),
        summary,
        trials: rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitRow {
    /// 1-based output index.
    pub output: usize,
    pub estimate: Estimate,
    pub exact: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitReport {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<SingleQubitRow>,
}

/// Monte Carlo E[q_{i,0}^2 + q_{i,1}^2] for every output, next to the exact
/// chain value and the (1 + 15^-d)/2 bound.
pub fn run_single_qubit_validation(
    cfg: &ExperimentConfig,
    workers: usize,
) -> Result<SingleQubitReport> {
    let skel = cfg.skeleton()?;
    let n = skel.n();
    let use_oracle = n <= cfg.max_qubits;
    let per_trial = run_trials(cfg.trials, workers, |k| {
        let mut rng = task_rng(cfg.seed, k as u64);
        let c = cfg.circuit(skel.clone(), &mut rng);
        let marginals: Vec<[f64; 2]> = if use_oracle {
            let psi = statevector::simulate_with(&c, cfg.sim_options())?;
            (0..n).map(|i| psi.marginal(i)).collect::<Result<_>>()?
        } else {
            (0..n)
                .map(|i| cone_marginal(&c, i))
                .collect::<Result<_>>()?
        };
        Ok(marginals
            .iter()
            .map(|[a, b]| a * a + b * b)
            .collect::<Vec<f64>>())
    })?;
    let bound = (1.0 + 15f64.powi(-(skel.depth() as i32))) / 2.0;
    let outputs = (0..n)
        .map(|i| {
            Ok(SingleQubitRow {
                output: i + 1,
                estimate: Estimate::from_values(per_trial.iter().map(|v| v[i])),
                exact: pauli_chain::single_qubit_expected_sos(&skel, i)?,
                bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SingleQubitReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        config: cfg.clone(),
        outputs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionRow {
    pub d: usize,
    /// Estimate of E[2^n CP(q_C)].
    pub scaled_cp: Estimate,
    /// 2 * 2^n / (2^n + 1), the Haar-random-state value.
    pub haar_limit: f64,
    pub type1_path_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<CollisionRow>,
}

pub fn run_collision_study(cfg: &ExperimentConfig, workers: usize) -> Result<CollisionReport> {
    let n = cfg.qubits();
    let depths = if cfg.depths.is_empty() {
        vec![anticoncentration_depth(n)]
    } else {
        cfg.depths.clone()
    };
    let scale = 2f64.powi(n as i32);
    let mut rows = Vec::with_capacity(depths.len());
    for (di, &d) in depths.iter().enumerate() {
        let skel = cfg.skeleton_at(d)?;
        let values = run_trials(cfg.trials, workers, |k| {
            let mut rng = task_rng(cfg.seed, ((di as u64) << 32) | k as u64);
            let c = cfg.circuit(skel.clone(), &mut rng);
            let psi = statevector::simulate_with(&c, cfg.sim_options())?;
            Ok(scale * psi.collision_probability())
        })?;
        rows.push(CollisionRow {
            d,
            scaled_cp: Estimate::from_values(values),
            haar_limit: 2.0 * scale / (scale + 1.0),
            type1_path_bound: type1_path_bound(n, d),
        });
    }
    Ok(CollisionReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        config: cfg.clone(),
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn csv_header(out: &mut String, config: &ExperimentConfig) {
    let _ = writeln!(out, "# tool={TOOL} version={VERSION} seed={}", config.seed);
    let _ = writeln!(
        out,
        "# config={}",
        serde_json::to_string(config).expect("config serializes")
    );
}

/// Renders a report as pretty JSON or as CSV with `#` comment headers.
pub trait Render: Serialize {
    fn to_csv(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }
}

impl Render for SpoofReport {
    fn to_csv(&self) -> String {
        let mut out = String::new();
        csv_header(&mut out, &self.config);
        let s = &self.summary;
        let _ = writeln!(
            out,
            "# achieved_m={} shortfall={} theorem_bound={} exact_expected={}",
            s.achieved_m,
            s.shortfall,
            s.theorem_bound,
            opt(s.exact_expected)
        );
        let _ = writeln!(
            out,
            "# closed_form_mean={} closed_form_stderr={}",
            s.closed_form.mean, s.closed_form.stderr
        );
        if let Some(e) = &s.empirical {
            let _ = writeln!(
                out,
                "# empirical_mean={} empirical_stderr={}",
                e.mean, e.stderr
            );
        }
        out.push_str("trial,achieved_m,closed_form_fidelity,empirical_xeb\n");
        for r in &self.trials {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.trial,
                r.achieved_m,
                r.closed_form_fidelity,
                opt(r.empirical_xeb)
            );
        }
        out
    }
}

impl Render for SingleQubitReport {
    fn to_csv(&self) -> String {
        let mut out = String::new();
        csv_header(&mut out, &self.config);
        out.push_str("output,mc_mean,mc_stderr,trials,exact,bound\n");
        for r in &self.outputs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.output, r.estimate.mean, r.estimate.stderr, r.estimate.count, r.exact, r.bound
            );
        }
        out
    }
}

impl Render for CollisionReport {
    fn to_csv(&self) -> String {
        let mut out = String::new();
        csv_header(&mut out, &self.config);
        out.push_str("d,scaled_cp_mean,scaled_cp_stderr,trials,haar_limit,type1_path_bound\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.d,
                r.scaled_cp.mean,
                r.scaled_cp.stderr,
                r.scaled_cp.count,
                r.haar_limit,
                r.type1_path_bound
            );
        }
        out
    }
}

/// Per-layer chain mass for one output, as `layer,mass` CSV.
pub fn pauli_exact_csv(s: &Skeleton, output: usize) -> Result<String> {
    let (masses, value) = pauli_chain::layer_masses(s, output)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# output={} expected_trace_squared={value}",
        output + 1
    );
    let _ = writeln!(
        out,
        "# expected_sos={} lower_bound_15^-d={}",
        (1.0 + value) / 2.0,
        15f64.powi(-(s.depth() as i32))
    );
    out.push_str("layer,mass\n");
    for (t, m) in masses.iter().enumerate() {
        let _ = writeln!(out, "{t},{m}");
    }
    Ok(out)
}
