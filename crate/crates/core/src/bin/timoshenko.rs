use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use timoshenko::output::{self, digits_from_env};
use timoshenko::{
    classify_decay, run_simulation_with, run_sweep, EnergyKind, EnergyTrace, Error, FitOptions, FitReport, Level, Preset,
    Result, RunConfig64, Settings, System,
};

#[derive(Parser, Debug)]
#[command(name = "timoshenko", version, about = "Damped Timoshenko beam simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write the trace, snapshots, plots and fit report.
    Run(RunArgs),
    /// Classify the energy decay of an existing trace CSV.
    Fit(FitArgs),
    /// Repeat a run at successively halved time steps.
    Sweep(SweepArgs),
    /// Run a named preset (fig1..fig8); without a name, list them.
    Preset(PresetArgs),
}

#[derive(Args, Debug, Clone)]
struct SetupArgs {
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a preset; the file and overrides apply on top.
    #[arg(long)]
    preset: Option<Preset>,
    /// Use the explicit damping variants.
    #[arg(long)]
    literal_paper: bool,
    /// `key=value` overrides.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct FitFlags {
    /// Leading fraction of the trace excluded from the fits.
    #[arg(long, default_value_t = 0.1)]
    window_fraction: f64,
    /// Fit `E_paper` instead of `E_phys`.
    #[arg(long)]
    paper_energy: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    setup: SetupArgs,
    #[command(flatten)]
    fit: FitFlags,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Trace CSV written by `run`.
    trace: PathBuf,
    #[command(flatten)]
    fit: FitFlags,
    /// Also write `fit_report.txt` into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    setup: SetupArgs,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PresetArgs {
    name: Option<Preset>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    literal_paper: bool,
    #[command(flatten)]
    fit: FitFlags,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl SetupArgs {
    fn config(&self) -> Result<RunConfig64> {
        let mut settings = self.preset.map(Preset::settings).unwrap_or_default();
        if let Some(path) = &self.config {
            settings.merge(&Settings::from_file(path)?);
        }
        if self.literal_paper {
            settings.set("literal_paper", "true")?;
        }
        for o in &self.overrides {
            settings.set_pair(o)?;
        }
        settings.build()
    }
}

impl FitFlags {
    fn options(&self) -> Result<FitOptions<f64>> {
        let f = self.window_fraction;
        if !(0.0..1.0).contains(&f) {
            return Err(Error::Config {
                key: "window-fraction".into(),
                reason: format!("must lie in [0, 1), got {f}"),
            });
        }
        Ok(FitOptions {
            window_fraction: f,
            ..FitOptions::default()
        })
    }

    fn energy(&self) -> EnergyKind {
        if self.paper_energy {
            EnergyKind::Paper
        } else {
            EnergyKind::Physical
        }
    }
}

fn warn_if_unstable(config: &RunConfig64) -> Result<()> {
    let system = System::new(config.mesh()?, config.materials, config.damping)?;
    let omega_dt = system.max_frequency()? * config.dt()?;
    if omega_dt >= 1.0 {
        eprintln!(
            "warning: ω_max·Δt = {omega_dt:.3} ≥ 1, the scheme is outside its stability region for this mesh (reduce c or refine the mesh)"
        );
    }
    Ok(())
}

fn fit_report(trace: &EnergyTrace<f64>, flags: &FitFlags) -> Result<FitReport> {
    let kind = flags.energy();
    let c = classify_decay(trace, kind, &flags.options()?)?;
    Ok(FitReport::new(&c, &trace.fingerprint, kind))
}

fn run(config: &RunConfig64, flags: &FitFlags, out: &Path) -> Result<()> {
    let digits = digits_from_env()?;
    flags.options()?;
    warn_if_unstable(config)?;
    fs::create_dir_all(out)?;

    let dt = config.dt()?;
    let wanted: BTreeMap<usize, ()> = config
        .snapshot_times
        .iter()
        .map(|&t| ((t / dt).round() as usize, ()))
        .collect();
    let mut snapshots: Vec<(usize, Level<f64>)> = Vec::new();
    let (_, trace) = run_simulation_with(config, |n, _, level| {
        if wanted.contains_key(&n) {
            snapshots.push((n, level.clone()));
        }
    })?;

    output::write_trace(&out.join("trace.csv"), &trace, digits)?;
    let mesh = config.mesh()?;
    for (n, level) in &snapshots {
        fs::write(out.join(output::snapshot_name(*n)), output::render_snapshot(&mesh, level, digits)?)?;
    }
    output::write_plots(out, &trace, flags.energy(), digits)?;
    fs::write(out.join("config.txt"), config.canonical())?;

    println!("fingerprint {}", trace.fingerprint);
    println!("levels {} dt {:e}", trace.len(), dt);
    println!("max relative drift {:e}", trace.max_relative_drift());
    println!("max |identity residual| {:e}", trace.max_abs_residual());
    let report_path = out.join("fit_report.txt");
    match fit_report(&trace, flags) {
        Ok(report) => {
            fs::write(&report_path, report.render())?;
            println!("selected {}", report.selected);
        }
        // a short or fully decayed trace has nothing to classify; the run itself succeeded
        Err(Error::Fit(reason)) => {
            fs::write(&report_path, format!("fingerprint {}\nno fit: {reason}\n", trace.fingerprint))?;
            println!("no fit: {reason}");
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn fit(args: &FitArgs) -> Result<()> {
    let trace = output::read_trace(&args.trace)?;
    let report = fit_report(&trace, &args.fit)?;
    print!("{}", report.render());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("fit_report.txt"), report.render())?;
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let digits = digits_from_env()?;
    let config = args.setup.config()?;
    warn_if_unstable(&config)?;
    let (table, _) = run_sweep(&config, args.levels)?;
    let text = table.render(digits);
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("sweep.csv"), &text)?;
    print!("{text}");
    Ok(())
}

fn preset(args: &PresetArgs) -> Result<()> {
    let Some(name) = args.name else {
        for p in Preset::ALL {
            let line = p.settings().to_string().lines().collect::<Vec<_>>().join(" ");
            println!("{p}: {line}");
        }
        return Ok(());
    };
    let setup = SetupArgs {
        config: args.config.clone(),
        preset: Some(name),
        literal_paper: args.literal_paper,
        overrides: args.overrides.clone(),
    };
    run(&setup.config()?, &args.fit, &args.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => a.setup.config().and_then(|c| run(&c, &a.fit, &a.out)),
        Command::Fit(a) => fit(a),
        Command::Sweep(a) => sweep(a),
        Command::Preset(a) => preset(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
