//! Soft-margin SVM training with sequential minimal optimization, F-score
//! feature ranking, and an experiment harness for the Wisconsin breast
//! cancer data.
//!
//! ```no_run
//! use wbcsvm::dataset::{load_wbc, partition, LoadOptions, PartitionSpec};
//! use wbcsvm::svm::{self, TrainParams};
//!
//! let file = std::io::BufReader::new(std::fs::File::open("breast-cancer-wisconsin.data")?);
//! let ds = load_wbc(file, LoadOptions::default())?;
//! let (train, test) = partition(&ds, &PartitionSpec::default())?;
//! let model = svm::train(&train, &TrainParams::default())?;
//! println!("test accuracy {:.1}%", svm::accuracy(&model, &test)?);
//! # Ok::<(), wbcsvm::Error>(())
//! ```

pub mod dataset;
pub mod error;
pub mod eval;
pub mod format;
pub mod fscore;
pub mod svm;

pub use dataset::{Dataset, FeatureSet, Instance, Label, Orientation, PartitionSpec, Scaling};
pub use error::{Error, Result};
pub use eval::{AccuracyRecord, EvalSettings, SweepReport};
pub use fscore::{FScoreRanking, RankingScope};
pub use svm::{KernelSpec, SvmModel, TrainParams};

/// The UCI `breast-cancer-wisconsin.data` file (699 records).
pub const WBC_DATA: &str = include_str!("../data/breast-cancer-wisconsin.data");
