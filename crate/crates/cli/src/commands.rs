use std::fs;
use std::io::Write;
use std::path::Path;

use bundlefair::exposure::{aggregate_exposure, BrowsingModel};
use bundlefair::grouping::{build_groups, AuditGroups, EntityKind};
use bundlefair::ingest::{
    dataset_stats, load_dataset, load_recommendations, split_user_bundle, write_dataset, InteractionDataset,
    RecommendationRun, SplitDataset, SplitRatios,
};
use bundlefair::metrics::{evaluate, gini_counts, gini_index, EvalConfig, Levels, Smoothing};
use bundlefair::report::fmt_f64;
use bundlefair::testkit::{
    generate_synthetic, item_affinity_recommender, most_popular_recommender, random_recommender, SyntheticConfig,
};

use crate::error::{CliError, CliResult, Code};
use crate::output::{write_file, write_histogram};
use crate::{AuditArgs, GenerateArgs, Level, StatsArgs};

const BASELINES: [&str; 3] = ["most_popular", "random", "item_affinity"];

/// Everything the three audit-style commands share.
struct Prepared {
    dataset: InteractionDataset,
    splits: SplitDataset,
    groups: AuditGroups,
    run: RecommendationRun,
    /// Baseline name when the run was generated here.
    baseline: Option<&'static str>,
    config: EvalConfig,
}

impl Prepared {
    fn included_users(&self) -> Vec<usize> {
        (0..self.dataset.n_users())
            .filter(|&u| self.splits.test.row_len(u) > 0)
            .collect()
    }
}

fn config_error(message: impl Into<String>) -> CliError {
    CliError::new(Code::Config, message)
}

fn validate(args: &AuditArgs) -> CliResult<EvalConfig> {
    if args.k == 0 {
        return Err(config_error("--k must be at least 1"));
    }
    if !(args.pop_share > 0.0 && args.pop_share < 1.0) {
        return Err(config_error(format!("--pop-share must be in (0, 1), got {}", args.pop_share)));
    }
    if args.tendency_lo.is_nan() || args.tendency_hi.is_nan() || args.tendency_lo > args.tendency_hi {
        return Err(config_error(format!(
            "--tendency-lo {} exceeds --tendency-hi {}",
            args.tendency_lo, args.tendency_hi
        )));
    }
    if args.levels.is_empty() {
        return Err(config_error("--levels must name at least one of bundle, item"));
    }
    let model = BrowsingModel::geometric(args.gamma).map_err(|e| config_error(e.to_string()))?;
    Ok(EvalConfig {
        k: args.k,
        model,
        smoothing: if args.no_smoothing { Smoothing::Strict } else { Smoothing::default() },
        levels: Levels {
            bundle: args.levels.contains(&Level::Bundle),
            item: args.levels.contains(&Level::Item),
        },
    })
}

fn prepare(args: &AuditArgs) -> CliResult<Prepared> {
    let config = validate(args)?;
    let loaded = load_dataset(&args.dataset_dir).map_err(CliError::dataset)?;
    let dataset = loaded.dataset;
    let splits = match loaded.splits {
        Some(s) => s,
        None => split_user_bundle(&dataset.user_bundle, SplitRatios::default(), args.seed).map_err(CliError::eval)?,
    };
    let groups = build_groups(
        &splits.train,
        &dataset.user_item,
        &dataset.bundle_item,
        args.pop_share,
        args.tendency_lo,
        args.tendency_hi,
    )
    .map_err(CliError::eval)?;

    let path = Path::new(&args.predictions);
    let baseline = BASELINES.iter().copied().find(|b| *b == args.predictions && !path.exists());
    let run = match baseline {
        Some(name) => match name {
            "most_popular" => most_popular_recommender(&splits.train, args.k),
            "random" => random_recommender(dataset.n_bundles(), args.k, args.seed, &splits.train),
            _ => item_affinity_recommender(&splits.train, &dataset.user_item, &dataset.bundle_item, args.k),
        }
        .map_err(CliError::eval)?,
        None => load_recommendations(path, args.k, dataset.n_users(), dataset.n_bundles())
            .map_err(CliError::predictions)?,
    };

    Ok(Prepared {
        dataset,
        splits,
        groups,
        run,
        baseline,
        config,
    })
}

fn output_dir(args: &AuditArgs) -> CliResult<&Path> {
    let dir = args.output_dir.as_path();
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir)
}

pub fn audit(args: &AuditArgs) -> CliResult<()> {
    let p = prepare(args)?;
    let report = evaluate(
        &p.run,
        &p.dataset,
        &p.splits,
        &p.groups.bundles,
        &p.groups.items,
        &p.groups.tendency,
        &p.config,
    )
    .map_err(CliError::eval)?;
    let dir = output_dir(args)?;

    let path = dir.join("report.json");
    fs::write(&path, report.to_json_string()).map_err(|e| CliError::io(&path, e))?;
    write_file(&dir.join("report.csv"), |out| report.write_csv(out))?;
    write_file(&dir.join("groups_bundle.csv"), |out| p.groups.bundles.write_csv(out))?;
    write_file(&dir.join("groups_item.csv"), |out| p.groups.items.write_csv(out))?;
    write_file(&dir.join("groups_user.csv"), |out| p.groups.tendency.write_csv(out))?;

    let users = p.included_users();
    for (enabled, level, name) in [
        (p.config.levels.bundle, EntityKind::Bundle, "exposure_bundle.csv"),
        (p.config.levels.item, EntityKind::Item, "exposure_item.csv"),
    ] {
        if enabled {
            let a = aggregate_exposure(&p.run, &p.config.model, level, &p.dataset.bundle_item, &users)
                .map_err(CliError::eval)?;
            write_file(&dir.join(name), |out| a.write_csv(out))?;
        }
    }
    if p.baseline.is_some() {
        write_file(&dir.join("recommendations.tsv"), |out| p.run.write_tsv(out))?;
    }
    Ok(())
}

/// Per-entity frequencies behind the distribution and Gini outputs:
/// interactions from the training split, recommendations as exposure summed
/// over evaluable users.
struct Frequencies {
    bundle_interactions: Vec<f64>,
    item_interactions: Vec<f64>,
    bundle_run: Vec<f64>,
    item_run: Vec<f64>,
}

fn frequencies(p: &Prepared) -> CliResult<Frequencies> {
    let users = p.included_users();
    let exposure = |level| {
        aggregate_exposure(&p.run, &p.config.model, level, &p.dataset.bundle_item, &users)
            .map(|a| a.values)
            .map_err(CliError::eval)
    };
    Ok(Frequencies {
        bundle_interactions: p.groups.bundle_frequency.iter().map(|&c| c as f64).collect(),
        item_interactions: p.groups.item_frequency.raw.iter().map(|&c| c as f64).collect(),
        bundle_run: exposure(EntityKind::Bundle)?,
        item_run: exposure(EntityKind::Item)?,
    })
}

pub fn distributions(args: &AuditArgs) -> CliResult<()> {
    let p = prepare(args)?;
    let f = frequencies(&p)?;
    let dir = output_dir(args)?;
    for (name, values) in [
        ("hist_bundle_interactions.csv", &f.bundle_interactions),
        ("hist_bundle_recommendations.csv", &f.bundle_run),
        ("hist_item_interactions.csv", &f.item_interactions),
        ("hist_item_recommendations.csv", &f.item_run),
    ] {
        write_histogram(&dir.join(name), values)?;
    }

    let z = &p.dataset.bundle_item;
    let item_freq = &p.groups.item_frequency.raw;
    write_file(&dir.join("scatter.csv"), |out| {
        writeln!(out, "bundle_id,bundle_freq,avg_item_freq")?;
        for (b, &freq) in p.groups.bundle_frequency.iter().enumerate() {
            let items = z.row(b);
            if freq == 0 || items.is_empty() {
                continue;
            }
            let avg = items.iter().map(|&i| item_freq[i as usize] as f64).sum::<f64>() / items.len() as f64;
            writeln!(out, "{b},{freq},{}", fmt_f64(avg))?;
        }
        Ok(())
    })
}

pub fn gini(args: &AuditArgs) -> CliResult<()> {
    let p = prepare(args)?;
    let f = frequencies(&p)?;
    let dir = output_dir(args)?;
    let counts = |v: &[u64]| gini_counts(v).ok();
    let rows = [
        ("bundle", "interactions", counts(&p.groups.bundle_frequency)),
        ("bundle", "run", gini_index(&f.bundle_run).ok()),
        ("item", "interactions", counts(&p.groups.item_frequency.raw)),
        ("item", "run", gini_index(&f.item_run).ok()),
    ];
    write_file(&dir.join("gini.csv"), |out| {
        writeln!(out, "level,source,gini")?;
        for (level, source, g) in rows {
            writeln!(out, "{level},{source},{}", fmt_f64(g.unwrap_or(f64::NAN)))?;
        }
        Ok(())
    })
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let cfg = SyntheticConfig {
        n_users: args.n_users,
        n_bundles: args.n_bundles,
        n_items: args.n_items,
        bundle_size_mean: args.bundle_size_mean,
        bundle_popularity_skew: args.bundle_skew,
        item_popularity_skew: args.item_skew,
        interactions_per_user_ub: args.ub_per_user,
        interactions_per_user_ui: args.ui_per_user,
        seed: args.seed,
    };
    let ds = generate_synthetic(&cfg).map_err(|e| config_error(e.to_string()))?;
    let splits = if args.no_split {
        None
    } else {
        Some(split_user_bundle(&ds.user_bundle, SplitRatios::default(), args.seed).map_err(CliError::eval)?)
    };
    write_dataset(&args.output_dir, &ds, splits.as_ref()).map_err(|e| CliError::new(Code::Io, e.to_string()))
}

pub fn stats(args: &StatsArgs) -> CliResult<()> {
    let loaded = load_dataset(&args.dataset_dir).map_err(CliError::dataset)?;
    let stats = dataset_stats(&loaded.dataset);
    let mut value = serde_json::to_value(stats).map_err(|e| CliError::new(Code::Eval, e.to_string()))?;
    value["duplicate_lines"] = loaded.duplicate_lines.into();
    value["pre_split"] = loaded.splits.is_some().into();
    println!("{}", serde_json::to_string_pretty(&value).expect("stats serialize"));
    Ok(())
}
