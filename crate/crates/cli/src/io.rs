//! File plumbing shared by the subcommands.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

fn normalized(path: &Path) -> PathBuf {
    if let Ok(p) = path.canonicalize() {
        return p;
    }
    // not yet created: resolve the parent and keep the file name
    let absolute = std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf());
    match (absolute.parent(), absolute.file_name()) {
        (Some(parent), Some(name)) => parent
            .canonicalize()
            .map(|p| p.join(name))
            .unwrap_or(absolute.clone()),
        _ => absolute,
    }
}

/// Rejects any output path that coincides with an input or another output.
pub fn ensure_distinct(inputs: &[&Path], outputs: &[&Path]) -> Result<(), CliError> {
    let outs: Vec<PathBuf> = outputs.iter().map(|p| normalized(p)).collect();
    for (i, out) in outs.iter().enumerate() {
        if let Some(input) = inputs.iter().find(|p| normalized(p) == *out) {
            return Err(CliError::Usage(format!(
                "output {} would overwrite input {}",
                outputs[i].display(),
                input.display()
            )));
        }
        if outs[..i].contains(out) {
            return Err(CliError::Usage(format!(
                "output {} given twice",
                outputs[i].display()
            )));
        }
    }
    Ok(())
}

/// Destination for a command's results: a file or standard output.
pub enum Sink {
    File(PathBuf, BufWriter<File>),
    Stdout(io::StdoutLock<'static>),
}

impl Sink {
    pub fn new(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => File::create(p)
                .map(|f| Sink::File(p.to_path_buf(), BufWriter::new(f)))
                .map_err(|e| CliError::io(p, e)),
            None => Ok(Sink::Stdout(io::stdout().lock())),
        }
    }

    fn describe(&self) -> PathBuf {
        match self {
            Sink::File(p, _) => p.clone(),
            Sink::Stdout(_) => PathBuf::from("<stdout>"),
        }
    }

    pub fn line(&mut self, text: &str) -> Result<(), CliError> {
        let result = match self {
            Sink::File(_, w) => writeln!(w, "{text}"),
            Sink::Stdout(w) => writeln!(w, "{text}"),
        };
        result.map_err(|e| CliError::io(&self.describe(), e))
    }

    pub fn json<T: serde::Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string(value)?;
        self.line(&text)
    }

    pub fn finish(self) -> Result<(), CliError> {
        let path = self.describe();
        let result = match self {
            Sink::File(_, mut w) => w.flush(),
            Sink::Stdout(mut w) => w.flush(),
        };
        result.map_err(|e| CliError::io(&path, e))
    }
}
