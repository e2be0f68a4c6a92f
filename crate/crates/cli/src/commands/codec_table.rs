use rsbench::rsm::{budget_shortlists, BudgetMode};
use rsbench::search::knn_search;
use rsbench::{rsm_score, OracleSetting};

use crate::commands::{
    ascending, build_index, exact_nearest, first_per_query, load_dataset, load_model, recall_at_1, resolve_seed,
    start, train_codec, train_coarse,
};
use crate::config::{self, CodecRow, CodecSpec, CodecTableConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, CsvReport};
use crate::CommonArgs;

pub const FILE: &str = "codec_table.csv";
pub const COLUMNS: &[&str] = &["code_size", "codec", "residual", "rsm_strict", "rsm_relaxed", "recall_at_1"];

const SETTINGS: [OracleSetting; 2] = [OracleSetting::Strict, OracleSetting::Relaxed];

pub fn run(args: &CommonArgs) -> CliResult<()> {
    let mut cfg: CodecTableConfig = config::load(&args.config)?;
    cfg.seed = resolve_seed(args, cfg.seed);
    if cfg.nprobe == 0 || cfg.nprobe > cfg.ivf.k {
        return Err(CliError::config(format!("nprobe {} outside 1..={}", cfg.nprobe, cfg.ivf.k)));
    }
    let mut rec = start("codec-table", args, cfg.seed, &cfg)?;
    let ds = load_dataset(&cfg.dataset, &mut rec)?;
    let models = [
        load_model(&cfg.models.strict, &mut rec)?,
        load_model(&cfg.models.relaxed, &mut rec)?,
    ];
    let budgets = ascending(&[cfg.budgets.strict, cfg.budgets.relaxed]);

    let coarse = train_coarse(&ds, &cfg.ivf, cfg.seed)?;
    let truth = exact_nearest(&ds.queries, &ds.db)?;

    let flat = CodecRow {
        codec: CodecSpec::Flat,
        residual: false,
    };
    let mut report = CsvReport::new(FILE, COLUMNS)?;
    for row in std::iter::once(&flat).chain(&cfg.codecs) {
        let codec = train_codec(&coarse, row.codec, row.residual, cfg.seed)?;
        let index = build_index(&ds.db, &coarse, codec, row.residual)?;
        let probe = index.probe(cfg.nprobe)?;
        let lists = budget_shortlists(&probe, &ds.queries, &budgets, BudgetMode::Range)?;
        let mut rsm = [0.0; 2];
        for (i, setting) in SETTINGS.into_iter().enumerate() {
            let budget = *cfg.budgets.get(setting);
            let (_, list) = lists.iter().find(|(b, _)| *b == budget).expect("budget was requested");
            rsm[i] = rsm_score(&models[i], list, &ds.queries, &ds.db)?;
        }
        let top = first_per_query(&knn_search(&probe, &ds.queries, 1)?, ds.queries.len());
        report.row(&[
            index.code_size().to_string(),
            row.codec.to_string(),
            row.residual.to_string(),
            fmt_f64(rsm[0]),
            fmt_f64(rsm[1]),
            fmt_f64(recall_at_1(&top, &truth)),
        ])?;
    }
    report.write(&args.out, &mut rec)?;
    rec.finish(&args.out)?;
    Ok(())
}
