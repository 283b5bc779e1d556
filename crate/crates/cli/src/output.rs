//! Self-describing output files. JSON reports wrap their payload in an
//! envelope; CSV and SVG files carry the same facts in comment lines.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const TOOL: &str = "psomotif";
pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    /// Input file names (no directories, so reruns elsewhere match).
    pub inputs: Vec<String>,
    pub config: &'a RunConfig,
    pub result: T,
}

/// Where a command writes, plus what every file must echo.
pub struct Sink<'a> {
    pub dir: &'a Path,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub inputs: Vec<String>,
    pub written: Vec<PathBuf>,
}

impl<'a> Sink<'a> {
    pub fn new(
        dir: &'a Path,
        command: &'a str,
        config: &'a RunConfig,
        inputs: &[&Path],
    ) -> Result<Sink<'a>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Sink {
            dir,
            command,
            config,
            inputs: inputs.iter().map(|p| file_name(p)).collect(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, result: T) -> Result<(), CliError> {
        let env = Envelope {
            tool: TOOL,
            version: VERSION,
            command: self.command,
            seed: self.config.seed,
            inputs: self.inputs.clone(),
            config: self.config,
            result,
        };
        let mut text = serde_json::to_string_pretty(&env).expect("report types serialize");
        text.push('\n');
        self.write(name, &text)
    }

    fn provenance(&self) -> String {
        format!(
            "{TOOL} {VERSION} command={} seed={} inputs={} config={}",
            self.command,
            self.config.seed,
            self.inputs.join(","),
            serde_json::to_string(self.config).expect("config serializes")
        )
    }

    /// CSV body preceded by `#` comment lines.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let text = format!("# {}\n{body}", self.provenance());
        self.write(name, &text)
    }

    /// SVG with the provenance as an XML comment after the root tag.
    pub fn svg(&mut self, name: &str, svg: &str) -> Result<(), CliError> {
        let comment = format!("<!-- {} -->\n", self.provenance().replace("--", "- -"));
        let text = match svg.find('\n') {
            Some(i) => format!("{}{comment}{}", &svg[..=i], &svg[i + 1..]),
            None => format!("{svg}\n{comment}"),
        };
        self.write(name, &text)
    }
}

pub fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}
