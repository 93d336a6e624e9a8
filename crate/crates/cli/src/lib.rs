//! The `wbcsvm` command-line tool. Every artifact starts with a
//! `# key=value` block holding the complete effective configuration, and
//! `wbcsvm rerun FILE` repeats the recorded run byte for byte.

pub mod args;
pub mod commands;
pub mod config;

use anyhow::Result;

use args::{Cli, Command};
use config::CommandKind;

pub fn execute(cli: Cli) -> Result<()> {
    let (kind, options) = match cli.command {
        Command::Rerun { artifact } => return commands::rerun(&artifact),
        Command::Fscore(o) => (CommandKind::Fscore, o),
        Command::Train(o) => (CommandKind::Train, o),
        Command::Predict(o) => (CommandKind::Predict, o),
        Command::Sweep(o) => (CommandKind::Sweep, o),
        Command::Ablate(o) => (CommandKind::Ablate, o),
        Command::Report(o) => (CommandKind::Report, o),
    };
    commands::run(&options.into_config(kind)?)
}
