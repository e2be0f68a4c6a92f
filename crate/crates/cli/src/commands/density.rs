use rsbench::distributions::{mode_normalize, DensityCurve};
use serde_json::json;

use crate::commands::{resolve_seed, start};
use crate::config::{self, DensityConfig, DensityKind};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, CsvReport};
use crate::CommonArgs;

pub const FILE: &str = "density.csv";
pub const COLUMNS: &[&str] = &["distribution", "dim", "r", "density", "r_over_mode", "density_mode_normalized"];

fn curve(kind: DensityKind, d: usize, points: usize) -> rsbench::Result<DensityCurve> {
    match kind {
        DensityKind::Gaussian => DensityCurve::gaussian(d, points, (d as f64).sqrt() + 10.0),
        DensityKind::Sphere => DensityCurve::uniform_sphere(d, points),
    }
}

pub fn run(args: &CommonArgs) -> CliResult<()> {
    let mut cfg: DensityConfig = config::load(&args.config)?;
    cfg.seed = resolve_seed(args, cfg.seed);
    if cfg.dims.is_empty() || cfg.grid_points < 3 {
        return Err(CliError::config("dims must be non-empty and grid_points at least 3"));
    }
    let mut rec = start("density", args, cfg.seed, &cfg)?;

    let mut report = CsvReport::new(FILE, COLUMNS)?;
    for &kind in &cfg.distributions {
        for &d in &cfg.dims {
            let c = curve(kind, d, cfg.grid_points)?;
            let scaled = mode_normalize(&c)?;
            for ((r, p), (rs, ps)) in c.r_values.iter().zip(&c.density).zip(scaled.r_values.iter().zip(&scaled.density)) {
                report.row(&[
                    kind.as_str().to_string(),
                    d.to_string(),
                    fmt_f64(*r),
                    format!("{p:.6e}"),
                    fmt_f64(*rs),
                    format!("{ps:.6e}"),
                ])?;
            }
            rec.summary(
                &format!("{}_d{d}", kind.as_str()),
                json!({ "mode": c.mode(), "fwhm_mode_normalized": scaled.fwhm() }),
            );
        }
    }
    report.write(&args.out, &mut rec)?;
    rec.finish(&args.out)?;
    Ok(())
}
