//! JSON-lines episode datasets.
//!
//! The first line is a header with the feature dimension and, for generated
//! data, the generator configuration; every following line is one episode in
//! the single-episode JSON format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GeneratorConfig, Split};
use crate::error::{Error, Result};
use crate::types::Episode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetHeader {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub episodes: Vec<Episode>,
}

pub fn write_dataset<W: Write>(dataset: &Dataset, mut out: W) -> Result<()> {
    for (i, ep) in dataset.episodes.iter().enumerate() {
        if ep.dim() != dataset.header.dim {
            return Err(Error::InvalidEpisode(format!(
                "episode {i} has dim {}, header says {}",
                ep.dim(),
                dataset.header.dim
            )));
        }
    }
    serde_json::to_writer(&mut out, &dataset.header)?;
    out.write_all(b"\n")?;
    for ep in &dataset.episodes {
        serde_json::to_writer(&mut out, ep)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dataset<R: BufRead>(input: R) -> Result<Dataset> {
    let mut lines = input.lines().enumerate();
    let header: DatasetHeader = loop {
        match lines.next() {
            None => return Err(Error::Parse { line: 1, message: "missing dataset header".into() }),
            Some((n, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                break serde_json::from_str(&line).map_err(|e| Error::Parse {
                    line: n + 1,
                    message: format!("bad header: {e}"),
                })?;
            }
        }
    };
    let mut episodes = Vec::new();
    for (n, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ep: Episode = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        if ep.dim() != header.dim {
            return Err(Error::Parse {
                line: n + 1,
                message: format!("episode dim {} does not match header dim {}", ep.dim(), header.dim),
            });
        }
        episodes.push(ep);
    }
    Ok(Dataset { header, episodes })
}

pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset(dataset, BufWriter::new(File::create(path)?))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    read_dataset(BufReader::new(File::open(path)?))
}
