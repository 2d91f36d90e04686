//! `troptangent` — exact tropical tangents, Gauss images, dual and
//! tangential varieties of space curves.
//!
//! Usage: `troptangent <stage> --input spec.json [--output out.json]
//! [--svg out.svg] [--projection "a,b,c;d,e,f"] [--seed N]`
//!
//! Exit codes: 0 on success, 2 when the input violates a mathematical
//! hypothesis of the method, 1 on any other error. Results (or the
//! error document) are written to `--output` or standard output. No
//! network access and no environment variables are used.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::Parser;

use troptangent_core::io::{
    error_document, parse_problem, parse_projection, render_svg, run_pipeline, shape_for_stage,
    Projection, Stage,
};
use troptangent_core::Error;

#[derive(Parser)]
#[command(
    name = "troptangent",
    about = "Exact tropical tangent lines, Gauss images, dual and tangential \
             varieties of space curves",
    version
)]
struct Cli {
    /// Pipeline stage: curve | tangents | gauss | dual | tau | newton.
    stage: String,

    /// Input problem file (JSON).
    #[arg(long)]
    input: PathBuf,

    /// Where to write the JSON result (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,

    /// Also render an SVG figure of the result to this path.
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Projection matrix "a,b,c;d,e,f" for the figure (two rows of
    /// rationals). Defaults to a seeded pseudo-random projection.
    #[arg(long)]
    projection: Option<String>,

    /// Seed for the pseudo-random projection (default 0).
    #[arg(long)]
    seed: Option<u64>,
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let stage = Stage::from_str(&cli.stage)?;
    let spec = parse_problem(&cli.input)?;
    let doc = run_pipeline(&spec, stage)?;
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    text.push('\n');
    emit(cli, &text)?;
    if let Some(svg_path) = &cli.svg {
        let shape = shape_for_stage(&spec, stage)?;
        let projection = match &cli.projection {
            Some(p) => Projection::Matrix(parse_projection(p)?),
            None => Projection::Seeded(cli.seed.unwrap_or(0)),
        };
        let svg = render_svg(&shape, &projection)?;
        std::fs::write(svg_path, svg).map_err(|e| {
            Error::InvalidInput(format!("cannot write {}: {e}", svg_path.display()))
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let doc = error_document(&err);
            let mut text = serde_json::to_string_pretty(&doc)
                .unwrap_or_else(|_| "{\"error\":{\"code\":\"inconsistency\"}}".into());
            text.push('\n');
            // Best effort: the error document replaces the result.
            let _ = emit(&cli, &text);
            if err.is_hypothesis() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
