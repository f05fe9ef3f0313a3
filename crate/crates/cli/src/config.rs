//! Run configuration files.
//!
//! Numbers are written as strings (`mu = "150,75,0,-75,-150"`, `p = "101"`)
//! so that no floating-point value ever crosses the boundary; bare TOML
//! integers are accepted too.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use newton_strata::isocrystal::SamplerConfig;
use newton_strata::strata::TripleCandidate;
use newton_strata::{AffineElement, CartanData, CartanType, Coweight, DiagramAutomorphism, IsoClass, WeylElement};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Text(String),
    Int(i64),
}

impl Num {
    fn parse<T: std::str::FromStr>(&self, field: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let text = match self {
            Num::Text(s) => s.trim().to_string(),
            Num::Int(v) => v.to_string(),
        };
        text.parse::<T>().map_err(|e| anyhow!("{field}: cannot parse {text:?}: {e}"))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    #[serde(rename = "type")]
    pub cartan_type: String,
    pub rank: Num,
    /// Images of `1..=rank` under the diagram automorphism; empty for the identity.
    #[serde(default)]
    pub sigma: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSection {
    pub v: String,
    pub w: String,
    pub s: Num,
    pub mu: String,
    pub superregularity_bound: Num,
    /// Expected Kottwitz point; checked against the sum of `mu` when given.
    pub kappa: Option<Num>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub p: Option<Num>,
    pub samples: Option<Num>,
    pub deg_cap: Option<Num>,
    pub seed: Option<Num>,
    pub stability_recheck: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub group: GroupSection,
    pub element: ElementSection,
    #[serde(default)]
    pub classes: Vec<String>,
    pub sampler: Option<SamplerSection>,
}

/// A validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub cartan: CartanData,
    pub sigma: DiagramAutomorphism,
    pub triple: TripleCandidate,
    pub mu: Coweight,
    pub bound: u64,
    pub classes: Vec<IsoClass>,
    pub sampler: Option<SamplerSection>,
    /// Raw bytes of the file, for hashing.
    pub source: Vec<u8>,
}

pub fn cartan_from(kind: &str, rank: usize) -> Result<CartanData> {
    let cartan_type: CartanType = kind.parse()?;
    Ok(CartanData::new(cartan_type, rank)?)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let source = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let text = std::str::from_utf8(&source).context("config is not UTF-8")?;
        let raw: RawConfig = toml::from_str(text).with_context(|| format!("parsing {}", path.display()))?;
        Self::from_raw(raw, source)
    }

    pub fn from_raw(raw: RawConfig, source: Vec<u8>) -> Result<Self> {
        let rank: usize = raw.group.rank.parse("group.rank")?;
        let cartan = cartan_from(&raw.group.cartan_type, rank)?;
        let sigma = DiagramAutomorphism::parse(&cartan, &raw.group.sigma)?;
        let e = &raw.element;
        let v = WeylElement::parse_word(rank, &e.v).context("element.v")?;
        let w = WeylElement::parse_word(rank, &e.w).context("element.w")?;
        let s: usize = e.s.parse("element.s")?;
        let triple = TripleCandidate::new(v, w, s, sigma.clone())?;
        let mu: Coweight = e.mu.parse().context("element.mu")?;
        if mu.len() != cartan.dim() {
            bail!("element.mu has {} entries, type {}{} needs {}", mu.len(), raw.group.cartan_type, rank, cartan.dim());
        }
        if let Some(kappa) = &e.kappa {
            let kappa: i64 = kappa.parse("element.kappa")?;
            if kappa != mu.sum() {
                bail!("element.kappa = {kappa} but mu sums to {}", mu.sum());
            }
        }
        let bound: u64 = e.superregularity_bound.parse("element.superregularity_bound")?;
        let classes = raw
            .classes
            .iter()
            .map(|c| c.parse::<IsoClass>().with_context(|| format!("classes entry {c:?}")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = classes.iter().find(|c| c.dim() != cartan.dim()) {
            bail!("class {bad} has the wrong number of slopes");
        }
        Ok(RunConfig { cartan, sigma, triple, mu, bound, classes, sampler: raw.sampler, source })
    }

    pub fn element(&self) -> Result<AffineElement> {
        Ok(AffineElement::from_normal_form(self.triple.v.clone(), self.mu.clone(), self.triple.w.clone())?)
    }

    /// Sampler settings for `x`, with command-line overrides taking precedence.
    pub fn sampler_config(
        &self,
        x: &AffineElement,
        samples: Option<u64>,
        prime: Option<u32>,
        seed: Option<u64>,
    ) -> Result<SamplerConfig> {
        let section = self.sampler.clone().unwrap_or(SamplerSection {
            p: None,
            samples: None,
            deg_cap: None,
            seed: None,
            stability_recheck: None,
        });
        let mut cfg = SamplerConfig::for_element(x, 1000, 0);
        if let Some(p) = &section.p {
            cfg.p = p.parse("sampler.p")?;
        }
        if let Some(n) = &section.samples {
            cfg.samples = n.parse("sampler.samples")?;
        }
        if let Some(d) = &section.deg_cap {
            cfg.deg_cap = d.parse("sampler.deg_cap")?;
        }
        if let Some(s) = &section.seed {
            cfg.rng_seed = s.parse("sampler.seed")?;
        }
        if let Some(flag) = section.stability_recheck {
            cfg.stability_recheck = flag;
        }
        cfg.samples = samples.unwrap_or(cfg.samples);
        cfg.p = prime.unwrap_or(cfg.p);
        cfg.rng_seed = seed.unwrap_or(cfg.rng_seed);
        cfg.validate(x)?;
        Ok(cfg)
    }
}
