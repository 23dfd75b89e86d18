use std::fs;
use std::io::{self, Write};
use std::path::Path;

use cohkit::aklt::{aklt_row, AkltParams, SINGULAR_EPS};
use cohkit::channels::{c2b_campaign, truncation_violation_scan, ScanConfig};
use cohkit::coherence::{coherence_total, report, CoherenceReport};
use cohkit::dynamics::{evolve_squeezing, SqueezeBasis, SqueezingConfig, Trajectory};
use cohkit::family::family_row;
use cohkit::io::{parse_expectations, parse_harness, parse_state};
use cohkit::{NormChoice, ObservableBasis};

use crate::{AkltArgs, CliError, CoherenceArgs, Fig1Args, GGrid, HarnessArgs, NormArgs, Panel, SqueezeArgs};

type Result<T> = std::result::Result<T, CliError>;

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).map_err(|e| {
            CliError::Io(format!("{}: {e}", p.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn norm_choice(args: &NormArgs, basis: &ObservableBasis) -> NormChoice {
    let mut choice = NormChoice::default_for(basis);
    if let Some(norm) = args.norm {
        choice.norm = norm;
    }
    choice.approximate = args.approximate;
    if args.approximate && !basis.is_complete() && choice.norm == cohkit::Norm::Schatten1 {
        eprintln!("warning: Schatten-1 on a truncated basis is not a guaranteed lower bound");
    }
    choice
}

fn full_factor(d: usize) -> String {
    if d == 2 {
        "pauli".into()
    } else {
        format!("gellmann:{d}")
    }
}

pub fn coherence(args: CoherenceArgs) -> Result<()> {
    let (basis, outcome) = if let Some(path) = &args.expectations {
        let file = parse_expectations(&read(path)?)?;
        let choice = norm_choice(&args.norm, &file.basis);
        let outcome = if file.basis.factors().is_some() {
            Outcome::Report(file.data.report(&file.basis, choice)?)
        } else {
            Outcome::Total(file.data.coherence(&file.basis, choice)?, choice)
        };
        (file.basis, outcome)
    } else {
        let path = args.state.as_ref().expect("clap enforces --state or --expectations");
        let mut rho = parse_state(&read(path)?)?;
        let tag = match (&args.basis, rho.split()) {
            (Some(t), _) => t.clone(),
            (None, Some((a, b))) if a >= 2 && b >= 2 => format!("prod({},{})", full_factor(a), full_factor(b)),
            (None, _) => format!("standard:{}", rho.dim()),
        };
        let basis = ObservableBasis::from_tag(&tag).map_err(CliError::usage)?;
        if rho.split().is_none() {
            if let Some((a, b)) = basis.factors() {
                rho = rho.with_split(a.dim(), b.dim())?;
            }
        }
        let choice = norm_choice(&args.norm, &basis);
        let outcome = if basis.factors().is_some() {
            Outcome::Report(report(&rho, &basis, choice)?)
        } else {
            Outcome::Total(coherence_total(&rho, &basis, choice)?, choice)
        };
        (basis, outcome)
    };

    println!("basis     = {}", basis.tag());
    match &outcome {
        Outcome::Report(r) => println!("{r}"),
        Outcome::Total(c, choice) => {
            println!("C         = {c:.12}");
            println!("norm      = {}", choice.norm);
            println!("truncated = {}", !basis.is_complete());
        }
    }
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_writer(sink(Some(path))?);
        w.write_record(["C", "C_L", "delta", "slack", "norm", "truncated", "basis"])?;
        let row: Vec<String> = match &outcome {
            Outcome::Report(r) => vec![
                r.c.to_string(),
                r.c_l.to_string(),
                r.delta.to_string(),
                r.slack.to_string(),
                r.norm.to_string(),
                r.truncated.to_string(),
            ],
            Outcome::Total(c, choice) => vec![
                c.to_string(),
                String::new(),
                String::new(),
                String::new(),
                choice.norm.to_string(),
                (!basis.is_complete()).to_string(),
            ],
        };
        w.write_record(row.iter().map(String::as_str).chain([basis.tag()]))?;
        w.flush()?;
    }
    Ok(())
}

enum Outcome {
    Report(CoherenceReport),
    Total(f64, NormChoice),
}

fn mu_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(CliError::usage("--mu-points must be at least 2"));
    }
    Ok((0..points).map(|i| i as f64 / (points - 1) as f64).collect())
}

fn g_values(grid: &GGrid, explicit: &[f64]) -> Result<Vec<f64>> {
    let values: Vec<f64> = if !explicit.is_empty() {
        explicit.to_vec()
    } else {
        if grid.g_points < 2 || grid.g_max.partial_cmp(&grid.g_min) != Some(std::cmp::Ordering::Greater) {
            return Err(CliError::usage("g grid needs --g-points >= 2 and --g-max > --g-min"));
        }
        let step = (grid.g_max - grid.g_min) / (grid.g_points - 1) as f64;
        (0..grid.g_points).map(|i| grid.g_min + i as f64 * step).collect()
    };
    // The two-site state is undefined at 1 + 2g = 0.
    Ok(values
        .into_iter()
        .filter(|g| {
            let keep = (1.0 + 2.0 * g).abs() >= SINGULAR_EPS;
            if !keep {
                eprintln!("note: skipping singular point g = {g}");
            }
            keep
        })
        .collect())
}

fn write_aklt(grid: &GGrid, explicit: &[f64], form: cohkit::aklt::RdmForm, out: Option<&Path>) -> Result<()> {
    let gs = g_values(grid, explicit)?;
    let mut w = csv::Writer::from_writer(sink(out)?);
    // Header comes from the row type.
    for &r in &grid.r {
        for &g in &gs {
            let p = AkltParams::new(g, r).map_err(CliError::usage)?;
            w.serialize(aklt_row(p, form)?)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_trajectories(trajectories: &[Trajectory], out: Option<&Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(["t", "C", "C_L", "delta", "norm", "basis"])?;
    for traj in trajectories {
        for (t, r) in traj.times.iter().zip(&traj.reports) {
            w.write_record([
                t.to_string(),
                r.c.to_string(),
                r.c_l.to_string(),
                r.delta.to_string(),
                r.norm.to_string(),
                traj.basis_tag.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn fig1(args: Fig1Args) -> Result<()> {
    let out = args.out.as_deref();
    match args.panel {
        Panel::A | Panel::B => {
            let (d, truncated) = if args.panel == Panel::A { (2, false) } else { (3, true) };
            let mut w = csv::Writer::from_writer(sink(out)?);
            for mu in mu_grid(args.mu_points)? {
                w.serialize(family_row(d, mu, truncated)?)?;
            }
            w.flush()?;
        }
        Panel::C => {
            let mut runs = Vec::new();
            for &n in &args.n {
                for basis in [SqueezeBasis::Full, SqueezeBasis::Truncated] {
                    let cfg = SqueezingConfig {
                        gamma: args.gamma,
                        t_max: args.t_max,
                        dt: args.dt,
                        sample_every: args.sample_every,
                        basis,
                        ..SqueezingConfig::new(n)
                    };
                    runs.push(evolve_squeezing(&cfg).map_err(usage_if_params)?);
                }
            }
            write_trajectories(&runs, out)?;
        }
        Panel::D => write_aklt(&args.grid, &[], Default::default(), out)?,
    }
    Ok(())
}

fn usage_if_params(e: cohkit::Error) -> CliError {
    match e {
        cohkit::Error::InvalidParams(_) => CliError::usage(e),
        other => CliError::Domain(other),
    }
}

pub fn aklt(args: AkltArgs) -> Result<()> {
    write_aklt(&args.grid, &args.g, args.form, args.out.as_deref())
}

pub fn squeeze(args: SqueezeArgs) -> Result<()> {
    let basis = args.basis.build(args.n.clamp(1, 10))?;
    let norm = if args.norm.norm.is_some() || args.norm.approximate {
        Some(norm_choice(&args.norm, &basis))
    } else {
        None
    };
    let cfg = SqueezingConfig {
        gamma: args.gamma,
        t_max: args.t_max,
        dt: args.dt,
        sample_every: args.sample_every,
        dephase: args.dephase,
        basis: args.basis,
        norm,
        ..SqueezingConfig::new(args.n)
    };
    let traj = evolve_squeezing(&cfg).map_err(usage_if_params)?;
    if let Some((t, c)) = traj.first_peak() {
        eprintln!("first coherence maximum C = {c:.6} at t = {t:.3}");
    }
    write_trajectories(&[traj], args.out.as_deref())
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("COHKIT_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::usage(format!("COHKIT_SEED = '{s}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

pub fn harness(args: HarnessArgs) -> Result<()> {
    let cfg = parse_harness(&read(&args.config)?)?;
    let seed = match args.seed.or(cfg.seed) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    eprintln!("seed = {seed}");

    let mut c2b_violations = 0;
    if !cfg.c2b.is_empty() {
        let mut w = csv::Writer::from_writer(sink(args.c2b_out.as_deref())?);
        w.write_record(["dim", "n_kraus", "trials", "violations", "frequency", "worst_excess", "ensemble"])?;
        for (i, job) in cfg.c2b.iter().enumerate() {
            let s = c2b_campaign(&[(job.dim, job.n_kraus)], job.trials, job.ensemble, seed.wrapping_add(i as u64))?;
            let s = &s[0];
            c2b_violations += s.violations;
            let freq = if s.trials == 0 { 0.0 } else { s.violations as f64 / s.trials as f64 };
            eprintln!(
                "c2b  D={} n={}: {}/{} violations ({})",
                s.dim,
                s.n_kraus,
                s.violations,
                s.trials,
                job.ensemble.as_str()
            );
            w.write_record([
                s.dim.to_string(),
                s.n_kraus.to_string(),
                s.trials.to_string(),
                s.violations.to_string(),
                freq.to_string(),
                s.worst_excess.to_string(),
                job.ensemble.as_str().to_string(),
            ])?;
        }
        w.flush()?;
    }

    if !cfg.scan.is_empty() {
        let mut w = csv::Writer::from_writer(sink(args.out.as_deref())?);
        w.write_record(["dim", "trials", "violations", "frequency", "mean_violation"])?;
        for (i, job) in cfg.scan.iter().enumerate() {
            let scan = ScanConfig {
                split_rule: job.split_rule,
                ensemble: job.ensemble,
                norm: job.norm,
                ..ScanConfig::new(job.dim, job.trials, seed.wrapping_add(1_000 + i as u64))
            };
            let r = truncation_violation_scan(&scan)?;
            eprintln!(
                "scan D={} ({}, {}): {}/{} violations, frequency {:.4}, mean {:.4}",
                r.dim,
                job.split_rule.as_str(),
                job.norm,
                r.violations,
                r.trials,
                r.violation_frequency,
                r.mean_violation
            );
            w.write_record([
                r.dim.to_string(),
                r.trials.to_string(),
                r.violations.to_string(),
                r.violation_frequency.to_string(),
                r.mean_violation.to_string(),
            ])?;
        }
        w.flush()?;
    }

    if c2b_violations > 0 {
        return Err(CliError::Domain(cohkit::Error::DomainError(format!(
            "{c2b_violations} violations of channel-average monotonicity"
        ))));
    }
    Ok(())
}
