use rsbench::rsm::{budget_shortlists, BudgetMode};
use rsbench::search::knn_search;
use rsbench::{rsm_score, ExactIndex, PairList, SearchIndex, SynthDataset};

use crate::commands::{
    ascending, exact_nearest, first_per_query, load_dataset, load_index, load_model, recall_at_1, resolve_seed, start,
};
use crate::config::{self, SweepBudgetConfig, SweepNprobeConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, CsvReport};
use crate::CommonArgs;

pub const BUDGET_FILE: &str = "sweep_budget.csv";
pub const BUDGET_COLUMNS: &[&str] = &["mode", "budget", "realized_pairs", "rsm_estimate", "oracle_positives"];
pub const NPROBE_FILE: &str = "sweep_nprobe.csv";
pub const NPROBE_COLUMNS: &[&str] = &[
    "nprobe",
    "rsm",
    "rsm_fraction_of_max",
    "recall_at_1",
    "recall_fraction_of_max",
];

fn shortlists<I: SearchIndex>(
    index: &I,
    ds: &SynthDataset,
    budgets: &[usize],
    mode: BudgetMode,
) -> CliResult<Vec<(usize, PairList)>> {
    Ok(budget_shortlists(index, &ds.queries, budgets, mode)?)
}

pub fn run_budget(args: &CommonArgs) -> CliResult<()> {
    let mut cfg: SweepBudgetConfig = config::load(&args.config)?;
    cfg.seed = resolve_seed(args, cfg.seed);
    if cfg.budgets.is_empty() || cfg.modes.is_empty() {
        return Err(CliError::config("budgets and modes must be non-empty"));
    }
    let mut rec = start("sweep-budget", args, cfg.seed, &cfg)?;
    let ds = load_dataset(&cfg.dataset, &mut rec)?;
    let model = load_model(&cfg.model, &mut rec)?;
    let budgets = ascending(&cfg.budgets);
    let index = match &cfg.index {
        Some(r) => Some((load_index(&r.path, &ds.db, &mut rec)?, r.nprobe)),
        None => None,
    };

    let mut report = CsvReport::new(BUDGET_FILE, BUDGET_COLUMNS)?;
    for &mode in &cfg.modes {
        let lists = match &index {
            Some((ix, nprobe)) => shortlists(&ix.probe(*nprobe)?, &ds, &budgets, mode)?,
            None => shortlists(&ExactIndex::new(&ds.db), &ds, &budgets, mode)?,
        };
        for (budget, list) in lists {
            let rsm = rsm_score(&model, &list, &ds.queries, &ds.db)?;
            let positives = list.iter().filter(|p| ds.oracle.label(p.query, p.db, cfg.setting)).count();
            report.row(&[
                mode.as_str().to_string(),
                budget.to_string(),
                list.len().to_string(),
                fmt_f64(rsm),
                positives.to_string(),
            ])?;
        }
    }
    report.write(&args.out, &mut rec)?;
    rec.finish(&args.out)?;
    Ok(())
}

fn fraction(x: f64, max: f64) -> f64 {
    if max > 0.0 {
        x / max
    } else {
        0.0
    }
}

pub fn run_nprobe(args: &CommonArgs) -> CliResult<()> {
    let mut cfg: SweepNprobeConfig = config::load(&args.config)?;
    cfg.seed = resolve_seed(args, cfg.seed);
    if cfg.nprobes.is_empty() {
        return Err(CliError::config("nprobes must be non-empty"));
    }
    let mut rec = start("sweep-nprobe", args, cfg.seed, &cfg)?;
    let ds = load_dataset(&cfg.dataset, &mut rec)?;
    let model = load_model(&cfg.model, &mut rec)?;
    let index = load_index(&cfg.index, &ds.db, &mut rec)?;
    let nprobes = ascending(&cfg.nprobes);
    if let Some(&bad) = nprobes.iter().find(|&&n| n == 0 || n > index.k()) {
        return Err(CliError::config(format!("nprobe {bad} outside 1..={}", index.k())));
    }

    let truth = exact_nearest(&ds.queries, &ds.db)?;
    let mut rows = Vec::with_capacity(nprobes.len());
    for &nprobe in &nprobes {
        let probe = index.probe(nprobe)?;
        let (_, list) = shortlists(&probe, &ds, &[cfg.budget], BudgetMode::Range)?
            .pop()
            .expect("one budget in, one shortlist out");
        let rsm = rsm_score(&model, &list, &ds.queries, &ds.db)?;
        let top = first_per_query(&knn_search(&probe, &ds.queries, 1)?, ds.queries.len());
        rows.push((nprobe, rsm, recall_at_1(&top, &truth)));
    }
    let max_rsm = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_recall = rows.iter().map(|r| r.2).fold(0.0, f64::max);

    let mut report = CsvReport::new(NPROBE_FILE, NPROBE_COLUMNS)?;
    for (nprobe, rsm, recall) in rows {
        report.row(&[
            nprobe.to_string(),
            fmt_f64(rsm),
            fmt_f64(fraction(rsm, max_rsm)),
            fmt_f64(recall),
            fmt_f64(fraction(recall, max_recall)),
        ])?;
    }
    report.write(&args.out, &mut rec)?;
    rec.finish(&args.out)?;
    Ok(())
}
