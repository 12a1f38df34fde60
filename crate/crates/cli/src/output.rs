use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use crate::error::CliResult;

/// Where artifacts go: files under a directory, or the primary artifact on
/// stdout and the summary on stderr.
#[derive(Debug, Clone)]
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> CliResult<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir })
    }

    /// The main CSV of a command.
    pub fn primary(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        match &self.dir {
            Some(d) => fs::write(d.join(name), bytes)?,
            None => io::stdout().lock().write_all(bytes)?,
        }
        Ok(())
    }

    /// Extra artifacts; dropped when there is no directory.
    pub fn secondary(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        if let Some(d) = &self.dir {
            fs::write(d.join(name), bytes)?;
        }
        Ok(())
    }

    /// JSON summary: `summary.json` in the directory, otherwise stderr.
    pub fn summary(&self, value: &serde_json::Value) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
        text.push('\n');
        match &self.dir {
            Some(d) => fs::write(d.join("summary.json"), text)?,
            None => io::stderr().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}
