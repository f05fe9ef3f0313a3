//! Report envelopes and output.
//!
//! Every JSON report carries the tool version, the command and a SHA-256 of
//! its inputs; nothing time- or host-dependent is written, so equal inputs give
//! byte-identical output.

use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use sha2::{Digest, Sha256};

use newton_strata::isocrystal::{SampleSummary, SamplerConfig};
use newton_strata::strata::{FixtureDiff, TripleCandidate};
use newton_strata::{CartanData, Coweight, DiagramAutomorphism, IsoClass, WeylElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// A fixture comparison that did not match.
#[derive(Debug)]
pub struct Mismatch(pub String);

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn json<T: Serialize>(body: &T) -> Result<serde_json::Value> {
    serde_json::to_value(body).context("serializing report")
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    input_sha256: &'a str,
    report: serde_json::Value,
}

pub fn emit(
    format: Format,
    output: Option<&Path>,
    command: &str,
    input_sha256: &str,
    body: serde_json::Value,
    text: &str,
) -> Result<()> {
    let envelope =
        Envelope { tool: "newton-strata", version: newton_strata::VERSION, command, input_sha256, report: body };
    let mut rendered = serde_json::to_string_pretty(&envelope)?;
    rendered.push('\n');
    if let Some(path) = output {
        std::fs::write(path, &rendered).with_context(|| format!("writing {}", path.display()))?;
    }
    match format {
        Format::Json => print!("{rendered}"),
        Format::Text => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
pub struct SearchReport<'a> {
    cartan_type: String,
    rank: usize,
    sigma: &'a [usize],
    count: usize,
    triples: &'a [TripleCandidate],
    #[serde(skip_serializing_if = "Option::is_none")]
    fixture: Option<FixtureReport<'a>>,
}

#[derive(Serialize)]
struct FixtureReport<'a> {
    path: &'a str,
    matches: bool,
    diff: &'a FixtureDiff,
}

impl<'a> SearchReport<'a> {
    pub fn new(
        cartan: &CartanData,
        sigma: &'a DiagramAutomorphism,
        triples: &'a [TripleCandidate],
        comparison: Option<&'a (String, FixtureDiff)>,
    ) -> Self {
        SearchReport {
            cartan_type: cartan.cartan_type().to_string(),
            rank: cartan.rank(),
            sigma: sigma.images(),
            count: triples.len(),
            triples,
            fixture: comparison.map(|(path, diff)| FixtureReport { path, matches: diff.is_match(), diff }),
        }
    }
}

#[derive(Serialize)]
pub struct DotReport<'a> {
    pub vertices: usize,
    pub edges: usize,
    pub dot: &'a str,
}

#[derive(Serialize)]
pub struct DistanceReport<'a> {
    pub from: &'a WeylElement,
    pub to: &'a WeylElement,
    pub distance: usize,
    pub weight: &'a Coweight,
}

#[derive(Serialize)]
pub struct SampleReport<'a> {
    pub sampler: &'a SamplerConfig,
    pub formula: Option<&'a IsoClass>,
    pub all_below_formula: Option<bool>,
    pub summary: &'a SampleSummary,
}

#[derive(Serialize)]
pub struct ListReport<'a, T: Serialize> {
    pub lower: &'a IsoClass,
    pub upper: &'a IsoClass,
    pub items: &'a [T],
}

#[derive(Serialize)]
pub struct LengthReport<'a> {
    pub lower: &'a IsoClass,
    pub upper: &'a IsoClass,
    pub chain_length: u64,
}
