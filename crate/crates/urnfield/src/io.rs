//! JSON and CSV files. Every output file names the manifest that produced it:
//! JSON outputs carry a top-level `"manifest"` key and CSV outputs start with
//! a `# manifest: ...` line.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

/// Manifest file written next to `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn manifest_name(out: &Path) -> String {
    manifest_path(out).file_name().unwrap_or_default().to_string_lossy().into_owned()
}

/// Writes `value` as JSON with an added `"manifest"` key.
pub fn write_json<T: Serialize>(path: &Path, value: &T, pretty: bool) -> Result<(), CliError> {
    let json_err = |source| CliError::Json { path: path.to_path_buf(), source };
    let mut v = serde_json::to_value(value).map_err(json_err)?;
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("manifest".into(), manifest_name(path).into());
    }
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    if pretty {
        serde_json::to_writer_pretty(&mut w, &v).map_err(json_err)?;
    } else {
        serde_json::to_writer(&mut w, &v).map_err(json_err)?;
    }
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Plain JSON without a manifest reference (the manifest itself).
pub fn write_plain_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

fn csv_sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).map_err(io_err(p))?);
            writeln!(f, "# manifest: {}", manifest_name(p)).map_err(io_err(p))?;
            Box::new(f)
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn finish_csv(path: Option<&Path>, w: csv::Writer<Box<dyn Write>>) -> Result<(), CliError> {
    let target = path.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut sink = w.into_inner().map_err(|e| CliError::Io { path: target.clone(), source: e.into_error() })?;
    sink.flush().map_err(|source| CliError::Io { path: target, source })
}

fn csv_error(path: Option<&Path>) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv { path: path.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("<stdout>")), source }
}

/// CSV rows to `path` (after the manifest comment line) or, without a path,
/// to stdout.
pub fn write_csv<S: Serialize>(path: Option<&Path>, rows: &[S]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(csv_sink(path)?);
    for r in rows {
        w.serialize(r).map_err(csv_error(path))?;
    }
    finish_csv(path, w)
}

/// Like [`write_csv`] for a header known only at run time.
pub fn write_csv_table(path: Option<&Path>, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(csv_sink(path)?);
    w.write_record(header).map_err(csv_error(path))?;
    for r in rows {
        w.write_record(r).map_err(csv_error(path))?;
    }
    finish_csv(path, w)
}

/// Reads CSV written by [`write_csv`], skipping the manifest line.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|source| CliError::Csv { path: path.to_path_buf(), source })?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|source| CliError::Csv { path: path.to_path_buf(), source })
}
