use rsbench::index::ivf::Codec;
use rsbench::index::save_ivf;

use crate::commands::{build_index, load_dataset, resolve_seed, start, train_codec, train_coarse};
use crate::config::{self, BuildConfig};
use crate::error::CliResult;
use crate::CommonArgs;

pub fn run(args: &CommonArgs) -> CliResult<()> {
    let mut cfg: BuildConfig = config::load(&args.config)?;
    cfg.seed = resolve_seed(args, cfg.seed);
    let mut rec = start("build", args, cfg.seed, &cfg)?;
    let ds = load_dataset(&cfg.dataset, &mut rec)?;

    let coarse = train_coarse(&ds, &cfg.ivf, cfg.seed)?;
    let codec = train_codec(&coarse, cfg.codec, cfg.residual, cfg.seed)?;
    let index = build_index(&ds.db, &coarse, codec, cfg.residual)?;
    save_ivf(&index, &args.out, cfg.seed)?;

    for f in ["meta.json", "centroids.fvecs", "lists.bin"] {
        rec.output(f);
    }
    match index.codec() {
        Codec::Pq(_) => rec.output("pq_codewords.fvecs"),
        Codec::Itq(_) => rec.output("itq.json"),
        Codec::Flat => {}
    }
    if cfg.ivf.assigner != crate::config::AssignerSpec::Exact {
        rec.output("assigner_codewords.fvecs");
    }
    let sizes: Vec<usize> = index.lists().iter().map(|l| l.ids.len()).collect();
    rec.summary("code_size", index.code_size());
    rec.summary("largest_list", sizes.iter().copied().max().unwrap_or(0));
    rec.summary("empty_lists", sizes.iter().filter(|&&s| s == 0).count());
    rec.finish(&args.out)?;
    Ok(())
}
