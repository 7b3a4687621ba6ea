use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use ucc_core::calibration::conformal_scale;
use ucc_core::cost::{isocost_slope, min_cost};
use ucc_core::curve::{auucc_gain, build_curve, constant_reference};
use ucc_core::fixture::generate_gap_fixture;
use ucc_core::inference::{compare_auucc_with, Alternative, CompareOptions};
use ucc_core::io::{read_batch, write_batch_csv, InputFormat};
use ucc_core::report::{CurveSummary, InputDigest, Metadata, Report};
use ucc_core::svg::render_svg;
use ucc_core::{Batch, CoordinateSystem, Rule, Window};

#[derive(Parser)]
#[command(name = "ucc", version, about = "Evaluate regression prediction intervals with uncertainty characteristics curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    CsvBounds,
    CsvBands,
    Json,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::CsvBounds => InputFormat::CsvBounds,
            FormatArg::CsvBands => InputFormat::CsvBands,
            FormatArg::Json => InputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CoordsArg {
    BwMiss,
    ExMiss,
    ExDef,
}

impl From<CoordsArg> for CoordinateSystem {
    fn from(c: CoordsArg) -> Self {
        match c {
            CoordsArg::BwMiss => CoordinateSystem::BandwidthMissRate,
            CoordsArg::ExMiss => CoordinateSystem::ExcessMissRate,
            CoordsArg::ExDef => CoordinateSystem::ExcessDeficit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Rect,
    Trap,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Rect => Rule::Rectangular,
            RuleArg::Trap => Rule::Trapezoidal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlternativeArg {
    TwoSided,
    Less,
    Greater,
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Self {
        match a {
            AlternativeArg::TwoSided => Alternative::TwoSided,
            AlternativeArg::Less => Alternative::Less,
            AlternativeArg::Greater => Alternative::Greater,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the curve of a batch and its constant-band reference.
    Curve {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to the file extension (and the CSV header).
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long, value_enum, default_value = "bw-miss")]
        coords: CoordsArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Area gain of a batch over its constant-band reference.
    Gain {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long, value_enum, default_value = "bw-miss")]
        coords: CoordsArg,
        /// Y-axis window `LO:HI` for a partial area.
        #[arg(long)]
        window: Option<Window>,
        #[arg(long, value_enum, default_value = "rect")]
        rule: RuleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired permutation test for the difference in area of two batches.
    Compare {
        #[arg(long)]
        input_a: PathBuf,
        #[arg(long)]
        input_b: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long, default_value_t = 1000)]
        n_perm: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        window: Option<Window>,
        #[arg(long, value_enum, default_value = "bw-miss")]
        coords: CoordsArg,
        #[arg(long, value_enum, default_value = "rect")]
        rule: RuleArg,
        #[arg(long, value_enum, default_value = "two-sided")]
        alternative: AlternativeArg,
        /// Enumerate all swap masks (at most 20 samples).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conformal scale for a target miss level.
    Calibrate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum of `c * bandwidth + (1 - c) * miss rate` over the scale.
    Cost {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the synthetic gap fixture as band-form CSV files.
    Fixture {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

type CliResult<T> = Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path, format: Option<FormatArg>) -> CliResult<(Batch, InputDigest)> {
    let format = match format {
        Some(f) => f.into(),
        None => InputFormat::infer(path).map_err(|e| e.to_string())?,
    };
    let batch = read_batch(path, format).map_err(|e| format!("{}: {e}", path.display()))?;
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    Ok((batch, digest))
}

fn metadata(inputs: Vec<InputDigest>, seed: Option<u64>) -> Metadata {
    Metadata {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        inputs,
        seed,
    }
}

fn write_report(report: &Report, out: Option<&Path>) -> CliResult<()> {
    if let Some(path) = out {
        let text = report.to_json().map_err(|e| e.to_string())?;
        fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn fmt_window(window: Option<Window>) -> String {
    match window {
        Some(w) => format!("[{}, {}]", w.lo(), w.hi()),
        None => "full".to_string(),
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Curve {
            input,
            format,
            coords,
            out,
            svg,
        } => {
            let (batch, digest) = load(&input, format)?;
            let coords = coords.into();
            let model = build_curve(&batch, coords).map_err(|e| e.to_string())?;
            let reference =
                build_curve(&constant_reference(&batch), coords).map_err(|e| e.to_string())?;
            let mut report = Report::new(metadata(vec![digest], None));
            report.curves.push(CurveSummary::new("model", model));
            report.curves.push(CurveSummary::new("constant", reference));
            write_report(&report, Some(&out))?;
            if let Some(svg_path) = svg {
                let named: Vec<(&str, &ucc_core::Curve)> = report
                    .curves
                    .iter()
                    .map(|s| (s.name.as_str(), &s.curve))
                    .collect();
                let text = render_svg(&named, &[], None).map_err(|e| e.to_string())?;
                fs::write(&svg_path, text).map_err(|e| format!("{}: {e}", svg_path.display()))?;
            }
            for s in &report.curves {
                let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| v.to_string());
                println!(
                    "{}: {} points, miss floor {}, auucc rect {}, trap {}",
                    s.name,
                    s.curve.points().len(),
                    s.curve.miss_floor(),
                    show(s.auucc_rect),
                    show(s.auucc_trap)
                );
            }
        }
        Command::Gain {
            input,
            format,
            coords,
            window,
            rule,
            out,
        } => {
            let (batch, digest) = load(&input, format)?;
            let gain =
                auucc_gain(&batch, coords.into(), window, rule.into()).map_err(|e| e.to_string())?;
            println!("window: {}", fmt_window(window));
            println!("auucc model: {}", gain.auucc_model);
            println!("auucc constant: {}", gain.auucc_const);
            println!("gain percent: {}", gain.gain_percent);
            let mut report = Report::new(metadata(vec![digest], None));
            report.gain = Some(gain);
            write_report(&report, out.as_deref())?;
        }
        Command::Compare {
            input_a,
            input_b,
            format,
            n_perm,
            seed,
            window,
            coords,
            rule,
            alternative,
            exact,
            out,
        } => {
            let (a, digest_a) = load(&input_a, format)?;
            let (b, digest_b) = load(&input_b, format)?;
            let options = CompareOptions {
                coords: coords.into(),
                window,
                rule: rule.into(),
                alternative: alternative.into(),
                exact,
                ..CompareOptions::default()
            };
            let test = compare_auucc_with(&a, &b, n_perm, seed, &options).map_err(|e| e.to_string())?;
            println!("observed difference: {}", test.observed_diff);
            println!("p-value: {}", test.p_value);
            println!("permutations: {}", test.n_permutations);
            let mut report = Report::new(metadata(vec![digest_a, digest_b], Some(seed)));
            report.test = Some(test);
            write_report(&report, out.as_deref())?;
        }
        Command::Calibrate {
            input,
            format,
            alpha,
            out,
        } => {
            let (batch, digest) = load(&input, format)?;
            let result = conformal_scale(&batch, alpha).map_err(|e| e.to_string())?;
            println!("q_hat: {}", result.q_hat);
            println!("achieved coverage: {}", result.achieved_coverage);
            let mut report = Report::new(metadata(vec![digest], None));
            report.calibration = Some(result);
            write_report(&report, out.as_deref())?;
        }
        Command::Cost { input, format, c, out } => {
            let (batch, digest) = load(&input, format)?;
            let curve = min_cost(&batch, c).map_err(|e| e.to_string())?;
            let slope = isocost_slope(c).map_err(|e| e.to_string())?;
            println!("k_star: {}", curve.k_star);
            println!("min cost: {}", curve.min_cost);
            println!("isocost slope: {slope}");
            let mut report = Report::new(metadata(vec![digest], None));
            report.cost = Some(curve);
            write_report(&report, out.as_deref())?;
        }
        Command::Fixture { n, seed, out_dir } => {
            let fixture = generate_gap_fixture(n, seed).map_err(|e| e.to_string())?;
            fs::create_dir_all(&out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
            for (name, batch) in [
                ("informative.csv", &fixture.informative),
                ("shuffled.csv", &fixture.shuffled),
            ] {
                let path = out_dir.join(name);
                let file = fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                write_batch_csv(batch, file).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let path = out_dir.join("description.txt");
            fs::write(&path, format!("{}\n", fixture.description))
                .map_err(|e| format!("{}: {e}", path.display()))?;
            println!("{}", fixture.description);
        }
    }
    Ok(())
}
