//! Command-line interface: scene in, canonical report out (stdout), SVG and
//! report copies to files on request. Exit codes: 0 success, 1 usage,
//! 2 scene parse error, 3 invariant violation, 4 computation failure.

use clap::{Parser, Subcommand};
use polyscat::run::{run, Command, RunFlags};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "polyscat",
    version,
    about = "Polyhedral scatterer geometry, reflection groups, flat-point traces and measurement certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,

    /// Scene JSON file.
    #[arg(long, global = true)]
    scene: Option<PathBuf>,

    /// Write the report JSON here as well as to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write the SVG rendering here (trace, render).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,

    /// Seed for the deterministic sampling grids.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Sphere-grid density per great circle (certify) or sample count
    /// (reflect-check).
    #[arg(long, global = true, default_value_t = 256)]
    grid_density: usize,

    /// Iteration cap for the trace.
    #[arg(long, global = true, default_value_t = 32)]
    max_iters: usize,

    /// Grid resolution for trace fills (default: adapted to the scene).
    #[arg(long, global = true)]
    resolution: Option<f64>,

    /// Vanishing threshold override for certificates.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Certify the measurement plan for general polyhedral scatterers.
    Certify,
    /// Certify the measurement plan for polyhedral obstacles.
    CertifyObstacle,
    /// Verify the reflection principle numerically for the scene's waves.
    ReflectCheck,
    /// Close the scene's hyperplane set under mutual reflection and build
    /// the generated group.
    Group,
    /// Trace a flat point to a reflection-hyperplane witness (2D).
    Trace,
    /// Face complex, minimum face distance and vertex normal spans.
    Faces,
    /// Render the scene as SVG.
    Render,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's help/version on stdout with success, everything
            // else is a usage error (exit 1).
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return ExitCode::SUCCESS;
                }
                _ => {
                    eprint!("{e}");
                    return ExitCode::from(1);
                }
            }
        }
    };
    let command = match cli.command {
        CliCommand::Certify => Command::Certify,
        CliCommand::CertifyObstacle => Command::CertifyObstacle,
        CliCommand::ReflectCheck => Command::ReflectCheck,
        CliCommand::Group => Command::Group,
        CliCommand::Trace => Command::Trace,
        CliCommand::Faces => Command::Faces,
        CliCommand::Render => Command::Render,
    };
    let Some(scene_path) = cli.scene else {
        eprintln!("error: --scene <path> is required");
        return ExitCode::from(1);
    };
    let scene_text = match std::fs::read_to_string(&scene_path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", scene_path.display());
            return ExitCode::from(2);
        }
    };
    let flags = RunFlags {
        seed: cli.seed,
        grid_density: cli.grid_density,
        max_iters: cli.max_iters,
        resolution: cli.resolution,
        tolerance: cli.tolerance,
    };
    if command == Command::Render && cli.svg.is_none() {
        eprintln!("error: render requires --svg <path>");
        return ExitCode::from(1);
    }
    match run(command, &scene_text, &flags) {
        Ok(output) => {
            let report = output.report.to_canonical_json();
            print!("{report}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &report) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(4);
                }
            }
            if let (Some(path), Some(svg)) = (&cli.svg, &output.svg) {
                if let Err(e) = std::fs::write(path, svg) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(4);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
