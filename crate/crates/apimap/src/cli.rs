//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use apimap_core::baselines::LtrWeights;
use apimap_core::corpus::{ApiLibrary, MavenCoordinates};
use apimap_core::eval::{
    leave_one_rule_out, recommend_top1, training_size_curve, training_size_significance, Approach, EvalConfig,
    EvalDataset, FeatureSelection, LtrMode, LtrScorer, MsScorer, PairScorer, RapimConfig, RapimScorer, TmapScorer,
};
use apimap_core::features::{FeatureExtractor, FeatureVector, DEFAULT_TRAINED_FEATURES};
use apimap_core::learner::{grid_search_tune, GbdtHyperparams, HyperparamGrid};
use apimap_core::textops::StopWords;
use apimap_core::vsm::{IdfMode, VsmConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::{api_json, archive, dataset, feature_csv, javadoc, maven, model_io, report, service};

#[derive(Debug, Parser)]
#[command(
    name = "apimap",
    version,
    about = "Recommend method mappings between two Java APIs",
    arg_required_else_help = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Seed for every shuffle and split.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Stop-word list replacing the built-in one, one word per line.
    #[arg(long, global = true, value_name = "FILE")]
    stop_words: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = IdfArg::Smoothed)]
    idf: IdfArg,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IdfArg {
    Smoothed,
    Literal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelectionArg {
    /// Train on φ1–φ8.
    Fixed,
    /// Keep features whose |Pearson| with the label reaches the threshold.
    Filter,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LtrArg {
    Trained,
    Published,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Protocol {
    Loro,
    Curve,
    All,
}

#[derive(Debug, Args)]
struct HyperArgs {
    #[arg(long, default_value_t = GbdtHyperparams::default().max_leaves)]
    leaves: usize,
    #[arg(long, default_value_t = GbdtHyperparams::default().min_leaf_instances)]
    min_leaf: usize,
    #[arg(long, default_value_t = GbdtHyperparams::default().learning_rate)]
    rate: f64,
    #[arg(long, default_value_t = GbdtHyperparams::default().num_trees)]
    trees: usize,
    #[arg(long, value_enum, default_value_t = SelectionArg::Fixed)]
    selection: SelectionArg,
    #[arg(long, default_value_t = apimap_core::features::DEFAULT_SELECTION_THRESHOLD)]
    selection_threshold: f64,
}

impl HyperArgs {
    fn rapim(&self, seed: u64) -> Result<RapimConfig> {
        let hyperparams = GbdtHyperparams {
            max_leaves: self.leaves,
            min_leaf_instances: self.min_leaf,
            learning_rate: self.rate,
            num_trees: self.trees,
            seed,
        };
        hyperparams.validate()?;
        let selection = match self.selection {
            SelectionArg::Fixed => FeatureSelection::default(),
            SelectionArg::Filter => FeatureSelection::Filter { threshold: self.selection_threshold },
        };
        Ok(RapimConfig { hyperparams, selection, threshold: 0.5 })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Download a javadoc archive from a Maven repository.
    Fetch {
        /// group:artifact:version
        coords: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Repository base URL (default: $APIMAP_MAVEN_BASE_URL or Maven Central).
        #[arg(long)]
        base_url: Option<String>,
        /// Also extract the archive into this directory.
        #[arg(long)]
        extract: Option<PathBuf>,
    },
    /// Parse a directory of Javadoc HTML into API JSON.
    ParseDocs {
        dir: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long)]
        version: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compute feature vectors for every labeled pair of a mapping dataset.
    Features {
        /// API JSON file; repeat for each library.
        #[arg(long = "library", required = true)]
        libraries: Vec<PathBuf>,
        #[arg(long)]
        mapping: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Train the boosted-tree classifier on a feature CSV.
    Train {
        features: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        hp: HyperArgs,
    },
    /// Grid-search hyperparameters on a stratified validation split.
    Tune {
        features: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 6, 8, 16])]
        leaves: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 10, 20, 47, 100])]
        min_leaf: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.14, 0.2, 0.4])]
        rate: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [10, 50, 100, 233, 500])]
        trees: Vec<usize>,
        #[arg(long, default_value_t = 0.3)]
        validation: f64,
    },
    /// Recommend one target method for every source method.
    Recommend {
        /// Required for the rapim approach.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value = "rapim")]
        approach: Approach,
        /// Write the recommendation set as JSON here instead of text to stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Leave-one-rule-out evaluation and the training-size curve.
    Evaluate {
        #[arg(long = "library", required = true)]
        libraries: Vec<PathBuf>,
        #[arg(long)]
        mapping: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Protocol::All)]
        protocol: Protocol,
        #[arg(long, value_enum, default_value_t = LtrArg::Trained)]
        ltr: LtrArg,
        /// Seeds for the training-size significance test; 0 skips it.
        #[arg(long, default_value_t = 10)]
        significance_seeds: usize,
        #[command(flatten)]
        hp: HyperArgs,
    },
    /// Serve recommendations over HTTP.
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

/// Parses `args` (including the program name) and runs the command. Usage
/// errors exit with 2, failures with 1.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2));
        }
    };
    let level = match cli.global.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn extractor(g: &GlobalArgs) -> Result<FeatureExtractor> {
    let stop_words = match &g.stop_words {
        Some(p) => StopWords::parse(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => StopWords::embedded(),
    };
    let idf = match g.idf {
        IdfArg::Smoothed => IdfMode::Smoothed,
        IdfArg::Literal => IdfMode::Literal,
    };
    Ok(FeatureExtractor::new(stop_words, VsmConfig { idf, ..VsmConfig::default() }))
}

fn load_libraries(paths: &[PathBuf]) -> Result<Vec<ApiLibrary>> {
    paths.iter().map(|p| Ok(api_json::load_api_json(p)?)).collect()
}

fn labels_of(vectors: &[FeatureVector]) -> Result<Vec<bool>> {
    vectors.iter().map(|v| v.is_valid_label().with_context(|| format!("pair {:?} has no label", v.pair))).collect()
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn execute(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Fetch { coords, out, base_url, extract } => {
            let coords: MavenCoordinates = coords.parse()?;
            let base = base_url.unwrap_or_else(maven::default_base_url);
            let jar = maven::fetch_from(&coords, &base, &out)?;
            println!("{}", jar.display());
            if let Some(dir) = extract {
                let n = archive::extract_archive(&jar, &dir)?;
                println!("extracted {n} files into {}", dir.display());
            }
        }
        Command::ParseDocs { dir, name, version, out } => {
            let parsed = javadoc::parse_javadoc_html(&dir, &name, &version)?;
            for w in &parsed.warnings {
                eprintln!("warning: {}: {}", w.page.display(), w.reason);
            }
            api_json::save_api_json(&parsed.library, &out)?;
            println!("{} methods written to {}", parsed.library.len(), out.display());
        }
        Command::Features { libraries, mapping, out } => {
            let libs = load_libraries(&libraries)?;
            let ds = dataset::load_mapping_dataset(&mapping, &libs)?;
            let data = EvalDataset::build(&ds, &extractor(g)?);
            let vectors: Vec<FeatureVector> = data.vectors().cloned().collect();
            feature_csv::save_features(&out, &vectors)?;
            println!("{} feature vectors written to {}", vectors.len(), out.display());
        }
        Command::Train { features, out, hp } => {
            let cfg = hp.rapim(g.seed)?;
            let vectors = feature_csv::load_features(&features)?;
            let model = cfg.train(&vectors)?;
            model_io::save_model(&model, &out)?;
            println!(
                "model with {} trees over features {:?} written to {}",
                model.trees.len(),
                model.feature_indices,
                out.display()
            );
        }
        Command::Tune { features, out, leaves, min_leaf, rate, trees, validation } => {
            if !(0.0..1.0).contains(&validation) || validation == 0.0 {
                bail!("--validation must be in (0, 1)");
            }
            let vectors = feature_csv::load_features(&features)?;
            let labels = labels_of(&vectors)?;
            let rows: Vec<&[f64]> = vectors.iter().map(|v| &v.phi[..]).collect();
            let grid = HyperparamGrid {
                max_leaves: leaves,
                min_leaf_instances: min_leaf,
                learning_rate: rate,
                num_trees: trees,
            };
            let result = grid_search_tune(&rows, &labels, &DEFAULT_TRAINED_FEATURES, &grid, validation, g.seed)?;
            write_json(&result, &out)?;
            let b = result.best;
            println!(
                "best: leaves={} min_leaf={} rate={} trees={} error={:.4}",
                b.max_leaves, b.min_leaf_instances, b.learning_rate, b.num_trees, result.best_error
            );
        }
        Command::Recommend { model, source, target, approach, out } => {
            let fx = extractor(g)?;
            let src = api_json::load_api_json(&source)?;
            let tgt = api_json::load_api_json(&target)?;
            let scorer: Box<dyn PairScorer> = match approach {
                Approach::Rapim => {
                    let path = model.context("--model is required for the rapim approach")?;
                    Box::new(RapimScorer::new(fx, model_io::load_model(&path)?)?)
                }
                Approach::Ltr => Box::new(LtrScorer::new(fx, LtrWeights::published())),
                Approach::Tmap => Box::new(TmapScorer::new(fx)),
                Approach::Ms => Box::new(MsScorer::new(fx)),
            };
            let set = recommend_top1(scorer.as_ref(), &src, &tgt)?;
            match out {
                Some(path) => report::write_recommendations(&set, &path)?,
                None => print!("{}", report::recommendations_text(&set)),
            }
        }
        Command::Evaluate { libraries, mapping, out_dir, protocol, ltr, significance_seeds, hp } => {
            let rapim = hp.rapim(g.seed)?;
            let libs = load_libraries(&libraries)?;
            let ds = dataset::load_mapping_dataset(&mapping, &libs)?;
            let data = EvalDataset::build(&ds, &extractor(g)?);
            let vectors: Vec<FeatureVector> = data.vectors().cloned().collect();
            std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            let curve = if protocol == Protocol::Loro {
                Vec::new()
            } else {
                training_size_curve(&vectors, &rapim, g.seed).context("training-size curve")?
            };
            if protocol == Protocol::Curve {
                std::fs::write(out_dir.join("curve.csv"), report::curve_csv(&curve))?;
            } else {
                let ltr = match ltr {
                    LtrArg::Trained => LtrMode::Trained,
                    LtrArg::Published => LtrMode::Published,
                };
                let mut rep = leave_one_rule_out(&data, &EvalConfig { rapim: rapim.clone(), ltr })?;
                rep.curve = curve;
                report::write_evaluation(&rep, &out_dir)?;
                print!("{}", report::text_table(&rep));
            }
            if protocol != Protocol::Loro && significance_seeds > 0 {
                let seeds: Vec<u64> = (0..significance_seeds as u64).map(|i| g.seed.wrapping_add(i)).collect();
                let sig = training_size_significance(&vectors, &rapim, &seeds).context("training-size significance")?;
                write_json(&sig, &out_dir.join("significance.json"))?;
                println!(
                    "k=2 vs k=3..9: U={} p={:.4}{}",
                    sig.test.u_a,
                    sig.test.p_value,
                    if sig.test.reliable { "" } else { " (small sample)" }
                );
            }
        }
        Command::Serve { model, source, target, host, port } => {
            let scorer = RapimScorer::new(extractor(g)?, model_io::load_model(&model)?)?;
            let src = api_json::load_api_json(&source)?;
            let tgt = api_json::load_api_json(&target)?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                service::serve(listener, scorer, src, tgt).await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}
