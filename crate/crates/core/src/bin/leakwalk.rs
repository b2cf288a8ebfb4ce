use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use leakwalk::harness::{
    compare_rows, emit_figure_data, parse_spec, r_sq_label, read_rows_csv, run_sweep,
    write_artifacts, ExperimentSpec, FigureId, HarnessError, OutputFormat,
};
use leakwalk::lattice::LayerParity;
use leakwalk::mesh::compile_walk;

#[derive(Parser, Debug)]
#[command(
    name = "leakwalk",
    version,
    about = "Leaky-boundary quantum walk simulator and mesh compiler"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides `out_dir` in the experiment file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Artifact format (overrides `formats` in the experiment file).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Parity of the first layer.
    #[arg(long, global = true, value_enum)]
    parity: Option<Parity>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every point of a spec's sweep and write one artifact per run.
    Run { spec: PathBuf },
    /// Write the panel CSVs of a figure.
    Figure { id: String, spec: PathBuf },
    /// Per-step differences between two long-form run CSVs.
    Compare { a: PathBuf, b: PathBuf },
    /// Compile each (r_sq, steps) point of a spec to a mesh program.
    Compile { spec: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Parity {
    Full,
    Offset,
}

fn load(cli: &Cli, path: &Path) -> Result<ExperimentSpec, HarnessError> {
    let mut spec = parse_spec(path)?;
    if let Some(out) = &cli.out {
        spec.out_dir = out.clone();
    }
    if let Some(f) = cli.format {
        spec.formats = vec![match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }];
    }
    if let Some(p) = cli.parity {
        spec.base.first_layer = match p {
            Parity::Full => LayerParity::Full,
            Parity::Offset => LayerParity::Offset,
        };
    }
    Ok(spec)
}

fn cmd_run(cli: &Cli, path: &Path) -> Result<(), HarnessError> {
    let spec = load(cli, path)?;
    let artifacts = run_sweep(&spec)?;
    let mut first_err = None;
    for result in write_artifacts(&artifacts, &spec.out_dir, &spec.formats) {
        match result {
            Ok(paths) => paths.iter().for_each(|p| println!("{}", p.display())),
            Err(e) => {
                eprintln!("error: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_err {
        return Err(e);
    }
    for p in emit_figure_data(spec.figure, &artifacts, &spec.out_dir)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn cmd_figure(cli: &Cli, id: &str, path: &Path) -> Result<(), HarnessError> {
    let figure = FigureId::parse(id)
        .ok_or_else(|| HarnessError::spec("figure", format!("unknown figure {id:?}")))?;
    let spec = load(cli, path)?;
    let artifacts = run_sweep(&spec)?;
    for p in emit_figure_data(Some(figure), &artifacts, &spec.out_dir)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn cmd_compare(cli: &Cli, a: &Path, b: &Path) -> Result<(), HarnessError> {
    let report = compare_rows(&read_rows_csv(a)?, &read_rows_csv(b)?)?;
    println!("{report}");
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let path = dir.join("comparison.csv");
        fs::write(&path, report.to_csv()).map_err(|e| HarnessError::io(&path, e))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_compile(cli: &Cli, path: &Path) -> Result<(), HarnessError> {
    let spec = load(cli, path)?;
    let dir = &spec.out_dir;
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    for &r_sq in &spec.r_sq {
        for &n in &spec.horizons {
            let config = spec.base.clone().with_r_sq(r_sq)?.with_steps(n);
            let program = compile_walk(&config, n)?;
            let out = dir.join(format!("mesh_r{}_n{n}.json", r_sq_label(r_sq)));
            fs::write(&out, program.to_json()).map_err(|e| HarnessError::io(&out, e))?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run { spec } => cmd_run(&cli, spec),
        Command::Figure { id, spec } => cmd_figure(&cli, id, spec),
        Command::Compare { a, b } => cmd_compare(&cli, a, b),
        Command::Compile { spec } => cmd_compile(&cli, spec),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
