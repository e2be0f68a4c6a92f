use rsbench::{generate, OracleSetting};

use crate::commands::{resolve_seed, start};
use crate::config::{self, GenConfig};
use crate::error::CliResult;
use crate::CommonArgs;

pub const FILES: [&str; 4] = ["queries.fvecs", "db.fvecs", "train.fvecs", "config.json"];

pub fn run(args: &CommonArgs) -> CliResult<()> {
    let mut cfg: GenConfig = config::load(&args.config)?;
    cfg.seed = resolve_seed(args, cfg.seed);
    cfg.validate()?;
    let mut rec = start("gen", args, cfg.seed, &cfg)?;

    let ds = generate(&cfg)?;
    ds.save(&args.out)?;
    for f in FILES {
        rec.output(f);
    }
    rec.csv_output("labels.csv", &["item_id", "group_id"]);

    for setting in [OracleSetting::Strict, OracleSetting::Relaxed] {
        let pairs = ds.positive_pairs(setting);
        let counts = pairs.per_query_counts(ds.queries.len());
        let empty = counts.iter().filter(|&&c| c == 0).count();
        rec.summary(&format!("{setting}_positive_pairs"), pairs.len());
        rec.summary(&format!("{setting}_queries_without_positives"), empty);
    }
    rec.finish(&args.out)?;
    Ok(())
}
