use rsbench::isotonic::collect_training_pairs;
use rsbench::fit_isotonic;

use crate::commands::{load_dataset, resolve_seed, start};
use crate::config::{self, FitConfig};
use crate::error::{CliError, CliResult};
use crate::CommonArgs;

pub const MODEL_FILE: &str = "model.csv";

pub fn run(args: &CommonArgs) -> CliResult<()> {
    let mut cfg: FitConfig = config::load(&args.config)?;
    cfg.seed = resolve_seed(args, cfg.seed);
    if !(cfg.r2_max >= 0.0 && cfg.r2_max.is_finite()) {
        return Err(CliError::config(format!("r2_max must be finite and non-negative, got {}", cfg.r2_max)));
    }
    let mut rec = start("fit", args, cfg.seed, &cfg)?;
    let ds = load_dataset(&cfg.dataset, &mut rec)?;

    let nq = cfg.train_queries;
    if nq == 0 || nq >= ds.train.len() {
        return Err(CliError::config(format!(
            "train_queries must be in 1..{}, got {nq}",
            ds.train.len()
        )));
    }
    let queries = ds.train.slice_rows(0, nq)?;
    let db = ds.train.slice_rows(nq, ds.train.len())?;
    let oracle = &ds.oracle;
    let setting = cfg.setting;
    let pairs = collect_training_pairs(
        &queries,
        &db,
        |q, x| oracle.label_items(oracle.train_item(q), oracle.train_item(x + nq as u32), setting),
        cfg.r2_max,
        cfg.n_far,
        cfg.seed,
    )?;
    let positives = pairs.iter().filter(|p| p.label == 1).count();
    if positives == 0 {
        return Err(CliError::data(format!(
            "no positive pairs found among {} training pairs; increase r2_max (currently {})",
            pairs.len(),
            cfg.r2_max
        )));
    }
    let model = fit_isotonic(&pairs)?;
    model.write_csv(args.out.join(MODEL_FILE))?;
    rec.csv_output(MODEL_FILE, &["dist2", "value"]);
    rec.summary("training_pairs", pairs.len());
    rec.summary("positive_pairs", positives);
    rec.summary("crossing_0_5", model.crossing(0.5));
    rec.finish(&args.out)?;
    Ok(())
}
