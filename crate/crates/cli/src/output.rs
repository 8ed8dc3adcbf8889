use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use crate::{CliError, CliResult, OutputArgs};

/// Where a command's data goes, with the path kept for error messages.
pub struct Sink {
    path: String,
    writer: Box<dyn Write>,
}

impl Sink {
    pub fn open(args: &OutputArgs) -> CliResult<Self> {
        match &args.out {
            None => Ok(Sink { path: "<stdout>".into(), writer: Box::new(io::stdout().lock()) }),
            Some(path) => {
                let file = File::create(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                Ok(Sink { path: path.clone(), writer: Box::new(BufWriter::new(file)) })
            }
        }
    }

    fn io_err(&self, source: io::Error) -> CliError {
        CliError::Io { path: self.path.clone(), source }
    }

    pub fn json<T: Serialize>(mut self, value: &T) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut self.writer, value).map_err(|e| self.io_err(e.into()))?;
        writeln!(self.writer).map_err(|e| self.io_err(e))?;
        self.writer.flush().map_err(|e| self.io_err(e))
    }

    /// Write `rows` under `header`; the header is written even with no rows.
    pub fn csv(self, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let path = self.path.clone();
        let wrap = |e: csv::Error| CliError::Io { path: path.clone(), source: e.into() };
        let mut w = csv::Writer::from_writer(self.writer);
        w.write_record(header).map_err(wrap)?;
        for row in rows {
            w.write_record(row).map_err(wrap)?;
        }
        w.flush().map_err(|source| CliError::Io { path: path.clone(), source })
    }
}
