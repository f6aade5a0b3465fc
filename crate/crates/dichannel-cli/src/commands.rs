//! Implementations of the subcommands.

use clap::{Args, ValueEnum};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use dichannel::channel::{ChannelSpec, D2Channel, CANON_TOL};
use dichannel::estimate::{choi_fidelity, mle_d2, mle_general, FitReport};
use dichannel::geometry::{self, Region, BOUNDARY_DIRECTIONS};
use dichannel::protocol::{
    di_cc_with, di_tv_with, equivalence_class, parameter_ranges, ClassReport, Verdict,
    DI_CC_RESTARTS,
};
use dichannel::sim::{
    frequencies, grid_settings, read_correlations_csv, read_counts_json, simulate_counts,
    to_points, tomography_settings, write_correlations_csv, write_counts_json, PointRecord,
};

use crate::config::{resolve, FileConfig};
use crate::fail::Failure;
use crate::svg::{figure, Curve, Scatter};

/// Reads a channel file: either a bare channel spec or a fit report.
fn load_channel_spec(path: &Path) -> Result<ChannelSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if let Ok(spec) = serde_json::from_str::<ChannelSpec>(&text) {
        return Ok(spec);
    }
    if let Ok(rep) = serde_json::from_str::<FitReport>(&text) {
        return Ok(rep.channel);
    }
    Err(Failure::Input(format!(
        "{}: neither a channel spec nor a fit report",
        path.display()
    )))
}

/// Validates physicality and reduces to the canonical dihedral form (the
/// correlation set only depends on the canonical parameters).
fn to_d2(spec: &ChannelSpec) -> Result<D2Channel, Failure> {
    spec.validate()?;
    let (ch, _, _) = spec.to_affine().canonicalize(CANON_TOL)?;
    Ok(ch)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        Failure::Input(format!("{}: {e}", path.display()))
    })?))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Failure::Numeric(format!("{}: {e}", path.display())))?;
    w.flush()?;
    Ok(())
}

fn scatter_xy(points: &[PointRecord]) -> Vec<[f64; 2]> {
    points.iter().map(|r| [r.point.p11, r.point.p12]).collect()
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    /// Amplitude damping with efficiency --lambda.
    Ad,
    /// The identity channel.
    Identity,
    /// Channel spec read from --file.
    File,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub channel: ChannelKind,
    /// Amplitude-damping efficiency (required for --channel ad).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Optional transverse dephasing visibility applied on top.
    #[arg(long)]
    pub visibility: Option<f64>,
    /// Channel spec JSON (required for --channel file).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Angles per axis of the state/measurement grid (2 n^2 settings).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Use the 18 Pauli tomography settings instead of a grid.
    #[arg(long, conflicts_with = "grid")]
    pub tomography: bool,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output counts JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional paired-correlations CSV derived from the same counts.
    #[arg(long)]
    pub correlations: Option<PathBuf>,
}

pub fn simulate(args: SimulateArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let mut ch = match args.channel {
        ChannelKind::Ad => {
            let lambda = args
                .lambda
                .ok_or_else(|| Failure::Input("--channel ad requires --lambda".into()))?;
            D2Channel::amplitude_damping(lambda)?
        }
        ChannelKind::Identity => D2Channel::IDENTITY,
        ChannelKind::File => {
            let path = args
                .file
                .as_deref()
                .ok_or_else(|| Failure::Input("--channel file requires --file".into()))?;
            to_d2(&load_channel_spec(path)?)?
        }
    };
    if let Some(v) = args.visibility {
        ch = ch.dephase(v)?;
    }
    let settings = if args.tomography {
        tomography_settings()
    } else {
        grid_settings(resolve(args.grid, cfg.grid, 29))?
    };
    let shots = resolve(args.shots, cfg.shots, 100_000);
    let seed = resolve(args.seed, cfg.seed, 0);
    let counts = simulate_counts(&ch, &settings, shots, seed)?;
    let mut w = create(&args.out)?;
    write_counts_json(&mut w, &counts)?;
    w.flush()?;
    if let Some(path) = &args.correlations {
        let points = to_points(&frequencies(&counts)?);
        let mut w = create(path)?;
        write_correlations_csv(&mut w, &points)?;
        w.flush()?;
    }
    println!(
        "simulated {} settings x {} shots (seed {}) -> {}",
        counts.settings.len(),
        shots,
        seed,
        args.out.display()
    );
    Ok(())
}

// --------------------------------------------------------------------- qpt

#[derive(Args)]
pub struct QptArgs {
    /// Input counts JSON.
    #[arg(long)]
    pub counts: PathBuf,
    /// Fit only the dihedrally covariant model.
    #[arg(long, conflicts_with = "general")]
    pub restrict_d2: bool,
    /// Fit only the unrestricted 12-parameter model.
    #[arg(long)]
    pub general: bool,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output channel spec JSON (the preferred fit).
    #[arg(long)]
    pub out: PathBuf,
    /// Optional fit-report JSON (one report per fitted model).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn qpt(args: QptArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let counts = read_counts_json(BufReader::new(
        File::open(&args.counts).map_err(|e| Failure::Input(format!("{}: {e}", args.counts.display())))?,
    ))?;
    let freq = frequencies(&counts)?;
    let restarts = resolve(args.restarts, cfg.restarts, 200);
    let seed = resolve(args.seed, cfg.seed, counts.seed);
    let run_d2 = !args.general;
    let run_general = !args.restrict_d2;
    let mut reports = Vec::new();
    let d2_fit = if run_d2 {
        let fit = mle_d2(&freq, &counts.settings, restarts, seed)?;
        println!(
            "d2 fit: (d1, d2, d3, c3) = ({:.4}, {:.4}, {:.4}, {:.4}), loglik {:.6}",
            fit.channel.d1, fit.channel.d2, fit.channel.d3, fit.channel.c3, fit.loglik
        );
        reports.push(FitReport::from_d2(&fit));
        Some(fit)
    } else {
        None
    };
    let general_fit = if run_general {
        let fit = mle_general(&freq, &counts.settings, restarts, seed)?;
        println!("general fit: loglik {:.6}", fit.loglik);
        reports.push(FitReport::from_general(&fit));
        Some(fit)
    } else {
        None
    };
    if let (Some(d2), Some(g)) = (&d2_fit, &general_fit) {
        let f = choi_fidelity(&d2.channel.to_affine(), &g.channel)?;
        println!("choi fidelity (d2 vs general): {f:.6}");
    }
    let spec = match (&d2_fit, &general_fit) {
        (Some(d2), _) => ChannelSpec::from_d2(&d2.channel),
        (None, Some(g)) => ChannelSpec::from_affine(&g.channel),
        (None, None) => unreachable!("at least one model always runs"),
    };
    write_json(&args.out, &spec)?;
    if let Some(path) = &args.report {
        write_json(path, &reports)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- validate

#[derive(Args)]
pub struct ValidateArgs {
    /// Hypothesis channel JSON (spec or fit report).
    #[arg(long)]
    pub channel: PathBuf,
    /// Correlations CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Sigma multiplier for the containment test.
    #[arg(long)]
    pub k: Option<f64>,
    /// Restarts for the embedded DI-CC fit behind the Delta metric.
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also bisect per-parameter validation ranges.
    #[arg(long)]
    pub ranges: bool,
    /// Output verdict JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional figure.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn read_points(path: &Path) -> Result<Vec<PointRecord>, Failure> {
    let f = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(read_correlations_csv(BufReader::new(f))?)
}

pub fn validate(args: ValidateArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let hyp = to_d2(&load_channel_spec(&args.channel)?)?;
    let data = read_points(&args.data)?;
    let k = resolve(args.k, cfg.k, 2.0);
    let restarts = resolve(args.restarts, cfg.restarts, DI_CC_RESTARTS);
    let seed = resolve(args.seed, cfg.seed, 0);
    let mut verdict = di_tv_with(&hyp, &data, k, restarts, seed)?;
    if args.ranges {
        verdict.ranges = Some(parameter_ranges(&hyp, &data, verdict.delta.max(0.01))?);
    }
    if verdict.validated {
        println!(
            "VALIDATED at {k} sigma: {} points inside, delta = {:.4}",
            data.len(),
            verdict.delta
        );
    } else {
        let worst = verdict
            .offenders
            .iter()
            .map(|o| o.margin)
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "FALSIFIED at {k} sigma: {} of {} points outside (worst margin {:.4})",
            verdict.offenders.len(),
            data.len(),
            worst
        );
    }
    write_json(&args.out, &verdict)?;
    if let Some(path) = &args.svg {
        let region = Region::boundary(&hyp, BOUNDARY_DIRECTIONS)?;
        let offenders: Vec<[f64; 2]> = verdict
            .offenders
            .iter()
            .map(|o| [o.point.p11, o.point.p12])
            .collect();
        let inside: Vec<[f64; 2]> = data
            .iter()
            .filter(|r| {
                !verdict
                    .offenders
                    .iter()
                    .any(|o| o.pair_id == r.pair_id && o.meas_id == r.meas_id)
            })
            .map(|r| [r.point.p11, r.point.p12])
            .collect();
        let svg = figure(
            &[Curve {
                points: region.vertices.clone(),
                color: "#cc0000",
                width: 2.0,
                dashed: false,
                label: "hypothesis boundary".into(),
            }],
            &[
                Scatter {
                    points: inside,
                    color: "#1f4fa0",
                    radius: 2.5,
                    label: "data".into(),
                },
                Scatter {
                    points: offenders,
                    color: "#ff8800",
                    radius: 4.0,
                    label: "offender".into(),
                },
            ],
        );
        create(path)?.write_all(svg.as_bytes())?;
    }
    Ok(())
}

// ------------------------------------------------------------ characterize

#[derive(Args)]
pub struct CharacterizeArgs {
    /// Correlations CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Containment allowance in standard errors (0 = strict).
    #[arg(long)]
    pub k: Option<f64>,
    /// Optional reference channel for the Delta column and figure.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Output class-report JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional figure.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

pub fn characterize(args: CharacterizeArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let data = read_points(&args.data)?;
    let restarts = resolve(args.restarts, cfg.restarts, 200);
    let seed = resolve(args.seed, cfg.seed, 0);
    let k = args.k.unwrap_or(0.0);
    let (mut rep, region) = di_cc_with(&data, restarts, seed, k)?;
    let mut reference = None;
    if let Some(path) = &args.reference {
        let ref_ch = to_d2(&load_channel_spec(path)?)?;
        let ref_region = Region::boundary(&ref_ch, BOUNDARY_DIRECTIONS)?;
        rep.delta = Some(geometry::delta(&region, &ref_region)?);
        reference = Some(ref_region);
    }
    if rep.degenerate {
        eprintln!(
            "warning: fitted region is degenerate (area {:.3e}); the data do not \
             constrain a two-dimensional correlation set",
            region.area()
        );
    }
    match rep.mu {
        Some(mu) => println!(
            "minimal surviving hypothesis: (d2, d3, c3) = ({:.4}, {:.4}, {:.4}), mu = {:.4}",
            rep.d2, rep.d3, rep.c3, mu
        ),
        None => println!(
            "minimal surviving hypothesis: (d2, d3, c3) = ({:.4}, {:.4}, {:.4}), mu undefined",
            rep.d2, rep.d3, rep.c3
        ),
    }
    if let Some(d) = rep.delta {
        println!("delta vs reference: {d:.4}");
    }
    write_json(&args.out, &rep)?;
    if let Some(path) = &args.svg {
        let mut curves = vec![Curve {
            points: region.vertices.clone(),
            color: "#1a9c3f",
            width: 2.0,
            dashed: false,
            label: "fitted boundary".into(),
        }];
        if let Some(ref_region) = &reference {
            curves.push(Curve {
                points: ref_region.vertices.clone(),
                color: "#777777",
                width: 1.5,
                dashed: true,
                label: "reference boundary".into(),
            });
        }
        let svg = figure(
            &curves,
            &[Scatter {
                points: scatter_xy(&data),
                color: "#1f4fa0",
                radius: 2.5,
                label: "data".into(),
            }],
        );
        create(path)?.write_all(svg.as_bytes())?;
    }
    Ok(())
}

// ---------------------------------------------------------------- boundary

#[derive(Args)]
pub struct BoundaryArgs {
    /// Channel JSON (spec or fit report).
    #[arg(long)]
    pub channel: PathBuf,
    /// Number of support directions.
    #[arg(long)]
    pub n: Option<usize>,
    /// Output polyline CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Output figure.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

pub fn boundary(args: BoundaryArgs, cfg: &FileConfig) -> Result<(), Failure> {
    if args.csv.is_none() && args.svg.is_none() {
        return Err(Failure::Input("specify --csv and/or --svg".into()));
    }
    let ch = to_d2(&load_channel_spec(&args.channel)?)?;
    let n = resolve(args.n, cfg.n, BOUNDARY_DIRECTIONS);
    let region = Region::boundary(&ch, n)?;
    if let Some(path) = &args.csv {
        let mut w = create(path)?;
        region.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(path) = &args.svg {
        let svg = figure(
            &[Curve {
                points: region.vertices.clone(),
                color: "#cc0000",
                width: 2.0,
                dashed: false,
                label: "boundary".into(),
            }],
            &[],
        );
        create(path)?.write_all(svg.as_bytes())?;
    }
    println!(
        "boundary of (d1, d2, d3, c3) = ({:.4}, {:.4}, {:.4}, {:.4}): area {:.6}",
        ch.d1,
        ch.d2,
        ch.d3,
        ch.c3,
        region.area()
    );
    Ok(())
}

// ------------------------------------------------------------------ report

#[derive(Args)]
pub struct ReportArgs {
    /// Result artifacts: verdict, class-report, or fit-report JSON files.
    #[arg(required = true)]
    pub artifacts: Vec<PathBuf>,
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn mu_of(d2: f64, d3: f64, c3: f64) -> String {
    match equivalence_class(d2, d3, c3) {
        Ok(rep) => format!("{:.3}", rep.mu.unwrap_or(f64::NAN)),
        Err(_) => "-".into(),
    }
}

fn fmt_range(r: (f64, f64)) -> String {
    format!("(-{:.3}, +{:.3})", r.0, r.1)
}

pub fn report(args: ReportArgs) -> Result<(), Failure> {
    let mut verdicts: Vec<(String, Verdict)> = Vec::new();
    let mut classes: Vec<(String, ClassReport)> = Vec::new();
    let mut fits: Vec<(String, Vec<FitReport>)> = Vec::new();
    for path in &args.artifacts {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let label = label_of(path);
        if let Ok(v) = serde_json::from_str::<Verdict>(&text) {
            verdicts.push((label, v));
        } else if let Ok(c) = serde_json::from_str::<ClassReport>(&text) {
            classes.push((label, c));
        } else if let Ok(f) = serde_json::from_str::<Vec<FitReport>>(&text) {
            fits.push((label, f));
        } else if let Ok(f) = serde_json::from_str::<FitReport>(&text) {
            fits.push((label, vec![f]));
        } else {
            return Err(Failure::Input(format!(
                "{}: not a recognized artifact",
                path.display()
            )));
        }
    }
    if !verdicts.is_empty() {
        println!("Validation");
        println!(
            "{:<12} {:<34} {:<46} {:>8} {:>8}",
            "", "(d1, d2, d3, c3)", "Parameters' variation range", "Delta", "mu"
        );
        for (label, v) in &verdicts {
            let ch = to_d2(&v.hypothesis)?;
            let params = format!(
                "({:.3}, {:.3}, {:.3}, {:.3})",
                ch.d1, ch.d2, ch.d3, ch.c3
            );
            let ranges = match &v.ranges {
                Some(r) => format!(
                    "(-, -), {}, {}, {}",
                    fmt_range(r.d2),
                    fmt_range(r.d3),
                    fmt_range(r.c3)
                ),
                None => "-".into(),
            };
            println!(
                "{:<12} {:<34} {:<46} {:>8.3} {:>8}",
                label,
                params,
                ranges,
                v.delta,
                mu_of(ch.d2, ch.d3, ch.c3)
            );
        }
        println!();
    }
    if !classes.is_empty() {
        println!("Characterization");
        println!(
            "{:<12} {:<26} {:>8} {:>8}",
            "", "(d2, d3, c3)", "Delta", "mu"
        );
        for (label, c) in &classes {
            let delta = c
                .delta
                .map(|d| format!("{d:.3}"))
                .unwrap_or_else(|| "-".into());
            let mu = c
                .mu
                .map(|m| format!("{m:.3}"))
                .unwrap_or_else(|| "-".into());
            println!(
                "{:<12} {:<26} {:>8} {:>8}",
                label,
                format!("({:.3}, {:.3}, {:.3})", c.d2, c.d3, c.c3),
                delta,
                mu
            );
        }
        println!();
    }
    if !fits.is_empty() {
        println!("Tomographic fits");
        println!(
            "{:<12} {:<10} {:>14} {:>12}",
            "", "model", "loglik", "cp margin"
        );
        for (label, reports) in &fits {
            for r in reports {
                println!(
                    "{:<12} {:<10} {:>14.4} {:>12.3e}",
                    label, r.kind, r.loglik, r.constraint_margin
                );
            }
        }
    }
    Ok(())
}
