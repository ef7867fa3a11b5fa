//! External detector and transform plug-ins.
//!
//! A plug-in is any executable speaking newline-delimited JSON on its
//! standard streams: one request `{"id": "...", "path": "..."}` per line
//! in, one response per request out, in any order. Detectors answer
//! `{"id": "...", "score": s}` with `s` in [0, 1]; transforms answer
//! `{"id": "...", "path": "..."}` naming the output file they wrote. The
//! child must exit when its input closes.
//!
//! Requests are pipelined in bounded batches. A response gap longer than
//! the endpoint timeout marks the batch's missing items failed (they are
//! excluded and reported, never silently dropped); a child that dies
//! before answering everything is a detector error carrying the partial
//! result count.

use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How to launch and pace one external plug-in process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorEndpoint {
    /// Display name used in reports.
    pub name: String,
    /// Argument vector; `command[0]` is the executable.
    pub command: Vec<String>,
    /// Longest tolerated silence while responses are outstanding.
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: f64,
    /// Maximum in-flight requests.
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
}

fn default_timeout_secs() -> f64 {
    30.0
}

fn default_batch_size() -> usize {
    16
}

impl DetectorEndpoint {
    pub fn new(name: impl Into<String>, command: Vec<String>) -> Self {
        Self {
            name: name.into(),
            command,
            timeout_secs: default_timeout_secs(),
            batch_size: default_batch_size(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.command.is_empty() {
            return Err(Error::Param("detector command must be nonempty".into()));
        }
        if self.timeout_secs.is_nan() || self.timeout_secs <= 0.0 {
            return Err(Error::Param(format!(
                "detector timeout must be > 0, got {}",
                self.timeout_secs
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Param("detector batch size must be >= 1".into()));
        }
        Ok(())
    }

    fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }
}

/// Scores plus the ids that timed out and were excluded.
#[derive(Debug, Clone, Default)]
pub struct ScoreBatch {
    pub scores: Vec<(String, f64)>,
    pub failed: Vec<String>,
}

/// Transform outputs plus the ids that timed out and were excluded.
#[derive(Debug, Clone, Default)]
pub struct TransformBatch {
    pub outputs: Vec<(String, PathBuf)>,
    pub failed: Vec<String>,
}

/// Anything that can score a batch of image files. Implemented by
/// [`DetectorEndpoint`] (subprocess) and by in-process detectors such as
/// [`crate::toy::HighFreqDetector`].
pub trait Scorer {
    fn name(&self) -> &str;
    fn score_images(&mut self, items: &[(String, PathBuf)]) -> Result<ScoreBatch>;
}

impl Scorer for DetectorEndpoint {
    fn name(&self) -> &str {
        &self.name
    }

    fn score_images(&mut self, items: &[(String, PathBuf)]) -> Result<ScoreBatch> {
        score_images(self, items)
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    id: &'a str,
    path: &'a str,
}

#[derive(Deserialize)]
struct ScoreReply {
    id: String,
    score: f64,
}

#[derive(Deserialize)]
struct TransformReply {
    id: String,
    path: String,
}

/// Score every item through the endpoint's wire protocol.
pub fn score_images(
    endpoint: &DetectorEndpoint,
    items: &[(String, PathBuf)],
) -> Result<ScoreBatch> {
    let mut batch = ScoreBatch::default();
    drive(endpoint, items, &mut |line, expected| {
        let reply: ScoreReply = serde_json::from_str(line)
            .map_err(|e| Error::Protocol(format!("bad detector response {line:?}: {e}")))?;
        if !expected.contains(&reply.id.as_str()) {
            return Err(Error::Protocol(format!(
                "unexpected or duplicate response id {:?}",
                reply.id
            )));
        }
        if !reply.score.is_finite() || !(0.0..=1.0).contains(&reply.score) {
            return Err(Error::Protocol(format!(
                "score {} for item {:?} outside [0, 1]",
                reply.score, reply.id
            )));
        }
        let id = reply.id.clone();
        batch.scores.push((reply.id, reply.score));
        Ok(id)
    })
    .map(|failed| {
        batch.failed = failed;
        batch
    })
}

/// Run every item through a transform plug-in; responses name the output
/// file written for each item.
pub fn transform_images(
    endpoint: &DetectorEndpoint,
    items: &[(String, PathBuf)],
) -> Result<TransformBatch> {
    let mut batch = TransformBatch::default();
    drive(endpoint, items, &mut |line, expected| {
        let reply: TransformReply = serde_json::from_str(line)
            .map_err(|e| Error::Protocol(format!("bad transform response {line:?}: {e}")))?;
        if !expected.contains(&reply.id.as_str()) {
            return Err(Error::Protocol(format!(
                "unexpected or duplicate response id {:?}",
                reply.id
            )));
        }
        let out = PathBuf::from(&reply.path);
        if !out.is_file() {
            return Err(Error::Protocol(format!(
                "transform output for item {:?} does not exist: {}",
                reply.id, reply.path
            )));
        }
        let id = reply.id.clone();
        batch.outputs.push((reply.id, out));
        Ok(id)
    })
    .map(|failed| {
        batch.failed = failed;
        batch
    })
}

/// Spawn the endpoint, pipeline requests in `batch_size` windows, and
/// hand each response line to `on_reply`, which validates it and returns
/// the settled id. Returns the ids that timed out.
fn drive(
    endpoint: &DetectorEndpoint,
    items: &[(String, PathBuf)],
    on_reply: &mut dyn FnMut(&str, &std::collections::HashSet<&str>) -> Result<String>,
) -> Result<Vec<String>> {
    endpoint.validate()?;
    if items.is_empty() {
        return Ok(Vec::new());
    }

    let mut child = Command::new(&endpoint.command[0])
        .args(&endpoint.command[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| Error::Detector(format!("spawn {:?}: {e}", endpoint.command[0])))?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let stdout = child.stdout.take().expect("piped stdout");

    // Reader thread so response waits can time out.
    let (tx, rx) = mpsc::channel::<Option<String>>();
    let reader = std::thread::spawn(move || {
        let mut lines = BufReader::new(stdout).lines();
        while let Some(Ok(line)) = lines.next() {
            if tx.send(Some(line)).is_err() {
                return;
            }
        }
        let _ = tx.send(None);
    });

    let mut failed = Vec::new();
    let mut settled = 0usize;
    let run = (|| -> Result<()> {
        for chunk in items.chunks(endpoint.batch_size) {
            let mut payload = String::new();
            for (id, path) in chunk {
                let req = WireRequest {
                    id,
                    path: &path.to_string_lossy(),
                };
                payload.push_str(&serde_json::to_string(&req).expect("request serializes"));
                payload.push('\n');
            }
            stdin.write_all(payload.as_bytes()).map_err(|_| {
                Error::Detector(format!(
                    "{} exited before completion ({settled} of {} items answered)",
                    endpoint.name,
                    items.len()
                ))
            })?;
            stdin.flush().ok();

            let mut expected: std::collections::HashSet<&str> =
                chunk.iter().map(|(id, _)| id.as_str()).collect();
            while !expected.is_empty() {
                match rx.recv_timeout(endpoint.timeout()) {
                    Ok(Some(line)) => {
                        if line.trim().is_empty() {
                            continue;
                        }
                        let id = on_reply(&line, &expected)?;
                        expected.remove(id.as_str());
                        settled += 1;
                    }
                    Ok(None) => {
                        return Err(Error::Detector(format!(
                            "{} exited before completion ({settled} of {} items answered)",
                            endpoint.name,
                            items.len()
                        )));
                    }
                    Err(mpsc::RecvTimeoutError::Timeout) => {
                        // Everything still outstanding in this window is
                        // marked failed; later windows get a fresh clock.
                        failed.extend(expected.drain().map(str::to_owned));
                    }
                    Err(mpsc::RecvTimeoutError::Disconnected) => {
                        return Err(Error::Detector(format!(
                            "{} closed its output ({settled} of {} items answered)",
                            endpoint.name,
                            items.len()
                        )));
                    }
                }
            }
        }
        Ok(())
    })();

    drop(stdin); // closed input tells the child to exit
    let reap = reap_child(&mut child);
    reader.join().ok();
    run?;
    reap?;
    failed.sort();
    Ok(failed)
}

/// Wait briefly for the child to exit on its own, then kill it.
fn reap_child(child: &mut Child) -> Result<()> {
    let deadline = Instant::now() + Duration::from_secs(5);
    loop {
        match child.try_wait() {
            Ok(Some(_)) => return Ok(()),
            Ok(None) if Instant::now() < deadline => {
                std::thread::sleep(Duration::from_millis(10));
            }
            Ok(None) => {
                child.kill().ok();
                child.wait().ok();
                return Ok(());
            }
            Err(e) => return Err(Error::Detector(format!("wait on child: {e}"))),
        }
    }
}
