//! Batch front end: generate or ingest data, train, print, predict and
//! evaluate. Exit status 0 on success, 1 for usage errors, 2 for data or
//! format errors, 3 for training errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use retain::c45::C45Params;
use retain::model::{Algorithm, ModelFile, ModelKind};
use retain::{adtree, arff, c45, eval, id3, schema};
use retain::{AlgoSpec, Dataset, Error, Prediction};

#[derive(Parser)]
#[command(name = "retain", version, about = "Decision-tree toolkit for student retention data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TrainAlgo {
    Id3,
    C45,
    Adt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalAlgo {
    Id3,
    C45,
    Adt,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic student cohort and write it as ARFF
    Gen {
        /// Number of instances
        #[arg(long)]
        n: usize,
        /// Expected dropout fraction in (0, 1)
        #[arg(long = "dropout-rate", default_value_t = schema::DEFAULT_DROPOUT_RATE)]
        dropout_rate: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Probability that a predictor cell is blanked to '?'
        #[arg(long = "missing-rate", default_value_t = 0.0)]
        missing_rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode raw admission-form CSV records into the retention ARFF schema
    Ingest {
        /// CSV file with a sex,cat,...,ret header row
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a classifier on an ARFF file and save the model as JSON
    Train {
        data: PathBuf,
        #[arg(long)]
        algo: TrainAlgo,
        #[arg(long)]
        out: PathBuf,
        /// C4.5 pruning confidence factor
        #[arg(long, default_value_t = 0.25)]
        cf: f64,
        /// C4.5 minimum branch weight
        #[arg(long = "min-leaf", default_value_t = 2.0)]
        min_leaf: f64,
        /// ADT boosting rounds
        #[arg(long, default_value_t = 10)]
        iterations: usize,
    },
    /// Print a saved model as text
    Print { model: PathBuf },
    /// Predict every instance of an ARFF file with a saved model
    Predict {
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Write predictions here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stratified cross-validation of one or all algorithms
    Eval {
        data: PathBuf,
        #[arg(long, default_value = "all")]
        algo: EvalAlgo,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.25)]
        cf: f64,
        #[arg(long = "min-leaf", default_value_t = 2.0)]
        min_leaf: f64,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        /// Class label treated as the positive (hit) class
        #[arg(long = "positive-class", default_value = "0")]
        positive_class: String,
        /// Also write the reports as a JSON array
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("retain: {e}");
            ExitCode::from(if e.is_training_error() { 3 } else { 2 })
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Gen {
            n,
            dropout_rate,
            seed,
            missing_rate,
            out,
        } => {
            let mut config = schema::GeneratorConfig::new(n, dropout_rate, seed);
            config.missing_rate = missing_rate;
            let d = schema::generate(&config)?;
            if (n as f64 * dropout_rate) < 10.0 {
                eprintln!(
                    "warning: fewer than 10 expected dropouts; stratified 10-fold \
                     evaluation will be thin"
                );
            }
            fs::write(&out, arff::write(&d))?;
            let dist = d.class_distribution();
            println!(
                "generated {} instances (seed {}, dropout-rate {}, dropouts {}) -> {}",
                n,
                seed,
                dropout_rate,
                dist[0],
                out.display()
            );
            Ok(())
        }
        Command::Ingest { csv, out } => {
            let file = fs::File::open(&csv)?;
            let d = schema::ingest_csv(file)?;
            fs::write(&out, arff::write(&d))?;
            println!(
                "encoded {} records over the retention schema -> {}",
                d.num_instances(),
                out.display()
            );
            Ok(())
        }
        Command::Train {
            data,
            algo,
            out,
            cf,
            min_leaf,
            iterations,
        } => {
            let d = load_arff(&data)?;
            let file = match algo {
                TrainAlgo::Id3 => {
                    let tree = id3::train(&d)?;
                    println!("trained ID3: {} nodes", tree.node_count());
                    ModelFile::new(Algorithm::Id3, &d, ModelKind::Tree(tree))
                }
                TrainAlgo::C45 => {
                    let params = C45Params {
                        confidence_factor: cf,
                        min_leaf_weight: min_leaf,
                        ..C45Params::default()
                    };
                    let tree = c45::train(&d, &params)?;
                    println!("trained C4.5 (cf {cf}): {} nodes", tree.node_count());
                    ModelFile::new(Algorithm::C45, &d, ModelKind::Tree(tree))
                }
                TrainAlgo::Adt => {
                    let model = adtree::train(&d, iterations)?;
                    println!("trained ADT: {} splitter nodes", model.splitters.len());
                    ModelFile::new(Algorithm::Adt, &d, ModelKind::Adt(model))
                }
            };
            file.save(&out)?;
            println!("model saved -> {}", out.display());
            Ok(())
        }
        Command::Print { model } => {
            let file = ModelFile::load(&model)?;
            match &file.model {
                ModelKind::Tree(t) => print!("{}", t.render(&file.attributes, file.class_index)),
                ModelKind::Adt(m) => print!("{}", adtree::render(m, &file.attributes)),
            }
            Ok(())
        }
        Command::Predict { data, model, out } => {
            let file = ModelFile::load(&model)?;
            let d = load_arff(&data)?;
            file.check_compatible(&d)?;
            let class_values = file.class_values();
            let mut lines = String::new();
            for (i, x) in d.instances.iter().enumerate() {
                match &file.model {
                    ModelKind::Tree(t) if file.algorithm == Algorithm::Id3 => {
                        match id3::predict(t, x)? {
                            Prediction::Class(c) => {
                                lines.push_str(&format!("{i}\t{}\n", class_values[c]))
                            }
                            Prediction::Unclassified => lines.push_str(&format!("{i}\t?\n")),
                        }
                    }
                    ModelKind::Tree(t) => {
                        let (label, dist) = c45::predict(t, x)?;
                        lines.push_str(&format!(
                            "{i}\t{}\t{:.6}\n",
                            class_values[label], dist[label]
                        ));
                    }
                    ModelKind::Adt(m) => {
                        let score = adtree::score(m, x)?;
                        let label = if score >= 0.0 {
                            m.plus_class
                        } else {
                            m.minus_class
                        };
                        lines.push_str(&format!("{i}\t{}\t{score:.6}\n", class_values[label]));
                    }
                }
            }
            match out {
                Some(path) => fs::write(&path, lines)?,
                None => print!("{lines}"),
            }
            Ok(())
        }
        Command::Eval {
            data,
            algo,
            folds,
            seed,
            cf,
            min_leaf,
            iterations,
            positive_class,
            out,
        } => {
            let d = load_arff(&data)?;
            let positive = d
                .class_values()
                .iter()
                .position(|v| *v == positive_class)
                .ok_or_else(|| Error::UnknownClassLabel(positive_class.clone()))?;
            let c45_params = C45Params {
                confidence_factor: cf,
                min_leaf_weight: min_leaf,
                ..C45Params::default()
            };
            let specs: Vec<AlgoSpec> = match algo {
                EvalAlgo::Id3 => vec![AlgoSpec::Id3],
                EvalAlgo::C45 => vec![AlgoSpec::C45(c45_params)],
                EvalAlgo::Adt => vec![AlgoSpec::Adt { iterations }],
                EvalAlgo::All => vec![
                    AlgoSpec::Id3,
                    AlgoSpec::C45(c45_params),
                    AlgoSpec::Adt { iterations },
                ],
            };
            let mut reports = Vec::new();
            for spec in &specs {
                reports.push(eval::cross_validate(&d, spec, folds, seed, positive)?);
            }
            print!("{}", eval::render_report_table(&reports));
            if let Some(path) = out {
                fs::write(&path, serde_json::to_string_pretty(&reports)?)?;
                println!("report written -> {}", path.display());
            }
            Ok(())
        }
    }
}

fn load_arff(path: &Path) -> Result<Dataset, Error> {
    let text = fs::read_to_string(path)?;
    arff::parse(&text)
}
