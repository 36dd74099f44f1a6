use std::time::Instant;

use serde::Serialize;

use spmac_core::analytic::holevo::{holevo_one_sender_closed_form, phase_ensemble_chi};
use spmac_core::analytic::{acc_info_one_sender, optimize_one_sender, optimize_two_sender_ternary};
use spmac_core::capacity::{ba_mac_rate_sum, MacOptions};
use spmac_core::experiment::channels::{eta_rate, eta_threshold, visibility_channel, PriorPolicy};
use spmac_core::experiment::montecarlo::{monte_carlo_batch, monte_carlo_joint, ExperimentConfig, McMode};
use spmac_core::info::{classical_region_sweep, rate_region_two_sender};
use spmac_core::mac::classical::canonical_classical_mac;
use spmac_core::mac::protocols::{
    n_sender_assisted_protocol, reference_prior_assisted, reference_prior_display, transition_balanced,
};
use spmac_core::report::Report;
use spmac_core::reproduce::{run_criterion, Check, CRITERIA};

use crate::args::*;
use crate::output::{csv_bytes, Artifact, CliError};

type Out = Result<Artifact, CliError>;

#[derive(Serialize)]
struct Seeded<T> {
    seed: u64,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct Points<T> {
    points: T,
}

/// Every report carries the seed, whether or not the command consumed it.
fn json<T: Serialize>(cfg: &RunConfig, kind: &str, body: T) -> Artifact {
    Artifact::Json(Report::new(kind, Seeded { seed: cfg.seed, body }).to_json())
}

fn format_or(cfg: &RunConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

fn json_only(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::Usage(format!("{what} has no CSV form"))),
        _ => Ok(()),
    }
}

fn mac_options(cfg: &RunConfig) -> Result<MacOptions, CliError> {
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol {} must be positive", cfg.tol)));
    }
    Ok(MacOptions { tol: cfg.tol, seed: cfg.seed, ..MacOptions::default() })
}

/// `--prior a,b` as per-sender distributions over two symbols.
fn binary_priors(values: &[f64], senders: usize) -> Result<Vec<Vec<f64>>, CliError> {
    if values.len() != senders {
        return Err(CliError::Usage(format!("--prior needs {senders} values, got {}", values.len())));
    }
    values
        .iter()
        .map(|p| {
            if (0.0..=1.0).contains(p) {
                Ok(vec![*p, 1.0 - p])
            } else {
                Err(CliError::Usage(format!("prior {p} outside [0, 1]")))
            }
        })
        .collect()
}

fn policy(p: Policy) -> PriorPolicy {
    match p {
        Policy::Fixed => PriorPolicy::Fixed,
        Policy::Optimized => PriorPolicy::Optimized,
    }
}

pub fn run(cfg: &RunConfig) -> Out {
    match &cfg.command {
        Command::Reproduce { what: ReproduceCmd::All { criteria } } => reproduce(cfg, criteria),
        Command::OneSender { what } => one_sender(cfg, what),
        Command::TwoSender { what: TwoSenderCmd::Ternary } => two_sender(cfg),
        Command::Holevo { what } => holevo(cfg, what),
        Command::Ratesum(a) => ratesum(cfg, a),
        Command::Classical { what: ClassicalCmd::Region { grid } } => classical_region(cfg, *grid),
        Command::Region(a) => region(cfg, a),
        Command::Experiment { what } => experiment(cfg, what),
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    id: usize,
    title: String,
    pass: bool,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct Manifest {
    criteria: Vec<ManifestEntry>,
    passed: usize,
    failed: Vec<usize>,
}

fn reproduce(cfg: &RunConfig, only: &[usize]) -> Out {
    if let Some(bad) = only.iter().find(|c| !(1..=CRITERIA).contains(*c)) {
        return Err(CliError::Usage(format!("criterion {bad} outside 1..={CRITERIA}")));
    }
    let ids: Vec<usize> = if only.is_empty() { (1..=CRITERIA).collect() } else { only.to_vec() };
    let mut entries = Vec::new();
    for id in ids {
        let r = run_criterion(id);
        eprintln!("{}", r.summary_line());
        // wall-clock checks would make the manifest differ between runs
        let checks: Vec<Check> = r.checks.into_iter().filter(|c| c.name != "runtime_s").collect();
        let pass = checks.iter().all(|c| c.pass);
        entries.push(ManifestEntry { id, title: r.title, pass, checks });
    }
    let failed: Vec<usize> = entries.iter().filter(|e| !e.pass).map(|e| e.id).collect();
    let passed = entries.len() - failed.len();
    match format_or(cfg, Format::Json) {
        Format::Json => Ok(json(cfg, "manifest", Manifest { criteria: entries, passed, failed })),
        Format::Csv => {
            let rows = entries.iter().flat_map(|e| {
                e.checks.iter().map(move |c| {
                    vec![
                        e.id.to_string(),
                        c.name.clone(),
                        c.computed.to_string(),
                        c.expected.map(|v| v.to_string()).unwrap_or_default(),
                        c.tolerance.map(|v| v.to_string()).unwrap_or_default(),
                        c.pass.to_string(),
                    ]
                })
            });
            csv_bytes(&["criterion", "check", "computed", "reference", "tolerance", "pass"], rows)
        }
    }
}

fn one_sender(cfg: &RunConfig, what: &OneSenderCmd) -> Out {
    json_only(cfg, "one-sender")?;
    match what {
        OneSenderCmd::Optimize => {
            let o = optimize_one_sender()?;
            if !o.converged {
                return Err(CliError::Numerical("one-sender optimizer did not converge".into()));
            }
            Ok(json(cfg, "one_sender_optimum", o))
        }
        OneSenderCmd::AccInfo { q, theta } => Ok(json(cfg, "one_sender_acc_info", acc_info_one_sender(*q, *theta)?)),
    }
}

fn two_sender(cfg: &RunConfig) -> Out {
    json_only(cfg, "two-sender")?;
    let o = optimize_two_sender_ternary()?;
    if !o.converged {
        return Err(CliError::Numerical("two-sender optimizer did not converge".into()));
    }
    Ok(json(cfg, "two_sender_ternary_optimum", o))
}

#[derive(Serialize)]
struct LogN {
    n: usize,
    assisted: bool,
    value_bits: f64,
    expected_bits: f64,
}

fn holevo(cfg: &RunConfig, what: &HolevoCmd) -> Out {
    json_only(cfg, "holevo")?;
    match what {
        HolevoCmd::OneSender => {
            let h = holevo_one_sender_closed_form()?;
            #[derive(Serialize)]
            struct Body {
                value_bits: f64,
                x: f64,
                residual: f64,
            }
            Ok(json(cfg, "one_sender_holevo", Body { value_bits: h.chi_bits, x: h.x, residual: h.residual }))
        }
        HolevoCmd::Logn { n, assisted } => {
            let paths = if *assisted { n + 1 } else { *n };
            let value_bits = phase_ensemble_chi(*n, *assisted)?;
            Ok(json(cfg, "phase_ensemble_holevo", LogN { n: *n, assisted: *assisted, value_bits, expected_bits: (paths as f64).log2() }))
        }
    }
}

#[derive(Serialize)]
struct RateSum {
    n: usize,
    protocol: String,
    value_bits: f64,
    upper_bound_bits: Option<f64>,
    prior: Vec<Vec<f64>>,
    iterations: usize,
    residual: f64,
}

fn ratesum(cfg: &RunConfig, a: &RatesumArgs) -> Out {
    json_only(cfg, "ratesum")?;
    if a.n < 1 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let tm = match a.protocol {
        ProtocolKind::Assisted => n_sender_assisted_protocol(a.n)?.channel()?,
        ProtocolKind::Classical => canonical_classical_mac(&vec![1.0 / a.n as f64; a.n])?,
    };
    let opts = MacOptions { restarts: a.restarts.max(1), ..mac_options(cfg)? };
    let r = ba_mac_rate_sum(&tm, &opts)?;
    if !r.converged {
        return Err(CliError::Numerical(format!("rate sum did not converge (KKT gap {:e})", r.residual)));
    }
    let protocol = format!("{:?}", a.protocol).to_lowercase();
    Ok(json(
        cfg,
        "rate_sum",
        RateSum {
            n: a.n,
            protocol,
            value_bits: r.value_bits,
            upper_bound_bits: r.upper_bound_bits,
            prior: r.prior,
            iterations: r.iterations,
            residual: r.residual,
        },
    ))
}

fn classical_region(cfg: &RunConfig, grid: usize) -> Out {
    if grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let lams: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    let sweep = classical_region_sweep(&lams, &mac_options(cfg)?, 101)?;
    match format_or(cfg, Format::Csv) {
        Format::Json => Ok(json(cfg, "classical_region", sweep)),
        Format::Csv => {
            let rows = sweep.rows.iter().map(|r| {
                let (s, d) = (r.region.star(), r.region.dstar());
                [r.lambda, s.0, s.1, d.0, d.1, r.region.i12].iter().map(f64::to_string).collect::<Vec<_>>()
            });
            csv_bytes(&["lambda", "R1_star", "R2_star", "R1_dstar", "R2_dstar", "R_sum"], rows)
        }
    }
}

fn region(cfg: &RunConfig, a: &RegionArgs) -> Out {
    let (tm, default_prior) = match a.protocol {
        RegionProtocol::Assisted2 => (n_sender_assisted_protocol(2)?.channel()?, reference_prior_assisted()),
        RegionProtocol::Balanced => (transition_balanced(), reference_prior_display()),
        RegionProtocol::Classical => (canonical_classical_mac(&[a.lambda, 1.0 - a.lambda])?, vec![vec![0.5, 0.5]; 2]),
    };
    let priors = if a.prior.is_empty() { default_prior } else { binary_priors(&a.prior, 2)? };
    let r = rate_region_two_sender(&tm, &priors)?;
    match format_or(cfg, Format::Csv) {
        Format::Json => Ok(json(cfg, "rate_region", r)),
        Format::Csv => {
            let names = ["origin", "r1_axis", "dstar", "star", "r2_axis"];
            let rows = r.pentagon().into_iter().zip(names).map(|((x, y), n)| vec![n.to_string(), x.to_string(), y.to_string()]);
            csv_bytes(&["vertex", "R1", "R2"], rows)
        }
    }
}

fn experiment(cfg: &RunConfig, what: &ExperimentCmd) -> Out {
    match what {
        ExperimentCmd::EtaThreshold { policy: p } => {
            json_only(cfg, "eta-threshold")?;
            #[derive(Serialize)]
            struct Body {
                policy: PriorPolicy,
                eta_threshold: f64,
            }
            Ok(json(cfg, "eta_threshold", Body { policy: policy(*p), eta_threshold: eta_threshold(policy(*p))? }))
        }
        ExperimentCmd::EtaCurve { grid, policy: p } => {
            if *grid < 2 {
                return Err(CliError::Usage("--grid must be at least 2".into()));
            }
            let pts = (0..*grid)
                .map(|i| {
                    let eta = i as f64 / (grid - 1) as f64;
                    Ok((eta, eta_rate(eta, policy(*p))?))
                })
                .collect::<Result<Vec<(f64, f64)>, CliError>>()?;
            match format_or(cfg, Format::Csv) {
                Format::Json => Ok(json(cfg, "eta_curve", Points { points: pts })),
                Format::Csv => csv_bytes(&["eta", "rate_bits"], pts.iter().map(|(e, r)| vec![e.to_string(), r.to_string()])),
            }
        }
        ExperimentCmd::Visibility { vs, vz, grid } => visibility(cfg, *vs, *vz, *grid),
        ExperimentCmd::Montecarlo(a) => montecarlo(cfg, a),
    }
}

fn visibility_rate(cfg: &RunConfig, vs: f64, vz: f64) -> Result<f64, CliError> {
    let opts = MacOptions { upper_bound: false, ..mac_options(cfg)? };
    Ok(ba_mac_rate_sum(&visibility_channel(vs, vz)?, &opts)?.value_bits)
}

fn visibility(cfg: &RunConfig, vs: Option<f64>, vz: Option<f64>, grid: Option<usize>) -> Out {
    if let Some(g) = grid {
        if g < 2 {
            return Err(CliError::Usage("--grid must be at least 2".into()));
        }
        let axis: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
        let mut rows = Vec::new();
        for s in &axis {
            for z in &axis {
                rows.push((*s, *z, visibility_rate(cfg, *s, *z)?));
            }
        }
        return match format_or(cfg, Format::Csv) {
            Format::Json => Ok(json(cfg, "visibility_surface", Points { points: rows })),
            Format::Csv => csv_bytes(
                &["v_sagnac", "v_mz", "rate_sum_bits"],
                rows.iter().map(|(s, z, r)| vec![s.to_string(), z.to_string(), r.to_string()]),
            ),
        };
    }
    json_only(cfg, "a single visibility point")?;
    let op = ExperimentConfig::operating_point();
    let (vs, vz) = (vs.unwrap_or(op.v_sagnac), vz.unwrap_or(op.v_mz));
    #[derive(Serialize)]
    struct Body {
        v_sagnac: f64,
        v_mz: f64,
        rate_sum_bits: f64,
    }
    Ok(json(cfg, "visibility", Body { v_sagnac: vs, v_mz: vz, rate_sum_bits: visibility_rate(cfg, vs, vz)? }))
}

fn montecarlo(cfg: &RunConfig, a: &MonteCarloArgs) -> Out {
    let priors = if a.prior.is_empty() { reference_prior_display() } else { binary_priors(&a.prior, 2)? };
    let config = ExperimentConfig {
        eta: a.eta,
        v_sagnac: a.vs,
        v_mz: a.vz,
        counts_per_setting: a.m,
        random_bits: a.n,
        seed: cfg.seed,
        priors,
    };
    let tm = config.channel()?;
    if a.runs > 1 {
        json_only(cfg, "a Monte Carlo batch")?;
        let start = Instant::now();
        let b = monte_carlo_batch(&config, &tm, McMode::Joint, a.runs)?;
        eprintln!("{} runs in {:.2}s", a.runs, start.elapsed().as_secs_f64());
        #[derive(Serialize)]
        struct Body {
            config: ExperimentConfig,
            #[serde(flatten)]
            batch: spmac_core::experiment::montecarlo::BatchSummary,
        }
        return Ok(json(cfg, "montecarlo_batch", Body { config, batch: b }));
    }
    let run = monte_carlo_joint(&config, &tm)?;
    match format_or(cfg, Format::Json) {
        // the run already records its seed
        Format::Json => Ok(Artifact::Json(Report::new("montecarlo", &run).to_json())),
        Format::Csv => csv_bytes(
            &["x1", "x2", "y", "count"],
            run.table.rows().into_iter().map(|(x, y, c)| vec![x[0].to_string(), x[1].to_string(), y.to_string(), c.to_string()]),
        ),
    }
}
