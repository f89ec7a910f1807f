//! `railmask` binary: edge extraction, mask smoothing, and the three-arm
//! ablation runner.
//!
//! Exit codes: 0 success, 2 bad input data, 64 bad usage, 65 manifest schema
//! violation, 70 training divergence, 1 other failures.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use railmask_cli::{
    load_manifest, read_pgm, run_experiment, write_pgm, CliError, PgmFormat, RunOptions,
};
use railmask_core::{extract_edges, jaggedness, prepare_gt, EdgeOperator, GtConfig, PaddingMode};

#[derive(Parser)]
#[command(
    name = "railmask",
    version,
    about = "Edge-aware mask-loss pipeline: edge maps, anti-jag smoothing, and ablation runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a normalized edge map from a PGM image.
    EdgeExtract(EdgeExtractArgs),
    /// Downscale a binary PGM mask and box-filter it; prints the jaggedness
    /// of the raw and smoothed results.
    Smooth(SmoothArgs),
    /// Train the baseline, edge, and edge+smoothing arms of a manifest.
    Run(RunArgs),
}

#[derive(Args)]
struct EdgeExtractArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = OperatorArg::Laplacian)]
    operator: OperatorArg,
    #[arg(long, value_enum, default_value_t = PaddingArg::Replicate)]
    padding: PaddingArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
    format: FormatArg,
}

#[derive(Args)]
struct SmoothArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Output resolution as HEIGHTxWIDTH, e.g. 200x200.
    #[arg(long, value_parser = parse_size)]
    target_size: (usize, usize),
    #[arg(long, default_value_t = 3)]
    box_size: usize,
    #[arg(long, value_enum, default_value_t = PaddingArg::Replicate)]
    padding: PaddingArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
    format: FormatArg,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Train the three arms on separate threads.
    #[arg(long)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Sobel,
    Laplacian,
}

impl From<OperatorArg> for EdgeOperator {
    fn from(arg: OperatorArg) -> Self {
        match arg {
            OperatorArg::Sobel => EdgeOperator::Sobel,
            OperatorArg::Laplacian => EdgeOperator::Laplacian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PaddingArg {
    Zero,
    Replicate,
}

impl From<PaddingArg> for PaddingMode {
    fn from(arg: PaddingArg) -> Self {
        match arg {
            PaddingArg::Zero => PaddingMode::Zero,
            PaddingArg::Replicate => PaddingMode::Replicate,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Ascii,
    Binary,
}

impl From<FormatArg> for PgmFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Ascii => PgmFormat::Ascii,
            FormatArg::Binary => PgmFormat::Binary,
        }
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HEIGHTxWIDTH, got '{s}'"))?;
    let parse = |part: &str| {
        part.trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| format!("'{part}' is not a positive integer"))
    };
    Ok((parse(h)?, parse(w)?))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = dispatch(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::EdgeExtract(args) => edge_extract(args),
        Command::Smooth(args) => smooth(args),
        Command::Run(args) => run(args),
    }
}

fn edge_extract(args: EdgeExtractArgs) -> Result<(), CliError> {
    let mask = read_pgm(&args.input)?;
    let edges = extract_edges(&mask, args.operator.into(), args.padding.into())
        .map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    write_pgm(&args.output, edges.grid(), args.format.into())
}

fn smooth(args: SmoothArgs) -> Result<(), CliError> {
    let mask = read_pgm(&args.input)?;
    if !mask.is_binary() {
        return Err(CliError::Input(format!(
            "{}: smoothing expects a binary mask (values 0 or 1)",
            args.input.display()
        )));
    }
    let cfg = GtConfig {
        source_size: mask.dims(),
        target_size: args.target_size,
        box_size: args.box_size,
        smoothing_enabled: true,
        padding: args.padding.into(),
        edge_from_raw: false,
    };
    // Violations here come from the flags (target size, box size), not the
    // input data.
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let label = prepare_gt(&mask, &cfg, EdgeOperator::Laplacian)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let raw = jaggedness(&label.mask_raw).map_err(|e| CliError::Failure(e.to_string()))?;
    let smoothed =
        jaggedness(&label.mask_smoothed).map_err(|e| CliError::Failure(e.to_string()))?;
    write_pgm(&args.output, &label.mask_smoothed, args.format.into())?;
    println!("{raw:.6} {smoothed:.6}");
    Ok(())
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let options = RunOptions {
        output_root: std::env::var_os("RAILMASK_OUTPUT_DIR").map(PathBuf::from),
        parallel: args.parallel,
    };
    let outcomes = run_experiment(&manifest, &options)?;
    for o in &outcomes {
        println!(
            "{}: iou={:.4} boundary_f1={:.4} jaggedness={:.6} final_loss={:.6} -> {}",
            o.name,
            o.mean_iou,
            o.mean_boundary_f1,
            o.mean_jaggedness,
            o.final_loss.total,
            o.directory.display()
        );
    }
    Ok(())
}
