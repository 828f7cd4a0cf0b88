use std::io::Write;

use krgraph::report::Real;
use serde::Serialize;

use crate::config::RunConfig;
use crate::Failure;

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: &'a T,
}

pub fn json<T: Serialize>(config: &RunConfig, body: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(&Report { config, body })
        .map_err(|e| Failure::Run(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// CSV with the run configuration as a leading `#` comment line.
pub fn csv(config: &RunConfig, header: &[&str], rows: &[Vec<String>]) -> Result<String, Failure> {
    let cfg = serde_json::to_string(config).map_err(|e| Failure::Run(e.to_string()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| Failure::Run(e.to_string()))?;
    for row in rows {
        w.write_record(row)
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Failure::Run(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| Failure::Run(e.to_string()))?;
    Ok(format!("# config: {cfg}\n{body}"))
}

pub fn real(x: f64) -> String {
    Real(x).render().unwrap_or_default()
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn emit(config: &RunConfig, text: &str) -> Result<(), Failure> {
    match &config.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
