//! Problem files: JSON with complex scalars written as `[re, im]`.

use std::path::Path;

use chanbound::applications::{adc_channel, grover_oracle};
use chanbound::bounds::DiscriminationProblem;
use chanbound::qmat::serial::{from_rows, ComplexRows};
use chanbound::qmat::KrausChannel;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntry {
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub kraus: Option<Vec<ComplexRows>>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default, rename = "N")]
    pub n_items: Option<usize>,
    #[serde(default)]
    pub marked: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpecFile {
    pub channels: Vec<ChannelEntry>,
    pub priors: Vec<f64>,
    #[serde(default)]
    pub groups: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub reference_channel: Option<ChannelEntry>,
}

/// A loaded problem together with its optional reference channel.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub problem: DiscriminationProblem,
    pub reference: Option<KrausChannel>,
}

impl LoadedProblem {
    /// The two channels and priors of a two-channel identification problem.
    pub fn two_channel(&self) -> Option<(f64, &KrausChannel, f64, &KrausChannel)> {
        let p = &self.problem;
        let g = p.groups();
        if p.len() != 2 || g.len() != 2 || g[0].len() != 1 || g[1].len() != 1 || g[0][0] == g[1][0] {
            return None;
        }
        let (p0, c0) = &p.oracles()[g[0][0]];
        let (p1, c1) = &p.oracles()[g[1][0]];
        Some((*p0, c0, *p1, c1))
    }
}

/// 1-based line of the first occurrence of the JSON key `key`.
fn key_line(src: &str, key: &str) -> Option<usize> {
    let pat = format!("\"{key}\"");
    let pos = src.find(&pat)?;
    Some(src[..pos].matches('\n').count() + 1)
}

fn at(src: &str, key: &str, field: &str, msg: impl std::fmt::Display) -> CliError {
    match key_line(src, key) {
        Some(line) => CliError::Input(format!("line {line}, field `{field}`: {msg}")),
        None => CliError::Input(format!("field `{field}`: {msg}")),
    }
}

fn build_channel(src: &str, key: &str, field: &str, e: &ChannelEntry) -> Result<KrausChannel, CliError> {
    let err = |msg: String| at(src, key, field, msg);
    match (e.kind.as_deref(), &e.kraus) {
        (None, Some(ops)) => {
            if e.r.is_some() || e.n_items.is_some() || e.marked.is_some() {
                return Err(err("`kraus` cannot be combined with `r`, `N` or `marked`".into()));
            }
            let mats = ops
                .iter()
                .enumerate()
                .map(|(i, rows)| from_rows(rows).map_err(|x| err(format!("kraus[{i}]: {x}"))))
                .collect::<Result<Vec<_>, _>>()?;
            KrausChannel::new(mats).map_err(|x| err(x.to_string()))
        }
        (Some("amplitude_damping"), None) => {
            let r = e.r.ok_or_else(|| err("amplitude_damping needs `r`".into()))?;
            adc_channel(r).map_err(|x| err(x.to_string()))
        }
        (Some("grover_oracle"), None) => {
            let n = e.n_items.ok_or_else(|| err("grover_oracle needs `N`".into()))?;
            let marked = e.marked.as_ref().ok_or_else(|| err("grover_oracle needs `marked`".into()))?;
            grover_oracle(n, marked).map_err(|x| err(x.to_string()))
        }
        (Some(k), None) => Err(err(format!("unknown channel kind `{k}`"))),
        (Some(_), Some(_)) => Err(err("give either `kind` or `kraus`, not both".into())),
        (None, None) => Err(err("channel needs `kraus` or `kind`".into())),
    }
}

pub fn parse_problem(src: &str) -> Result<LoadedProblem, CliError> {
    let de = &mut serde_json::Deserializer::from_str(src);
    let file: ProblemSpecFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        CliError::Input(format!(
            "line {}, column {}, field `{}`: {}",
            inner.line(),
            inner.column(),
            e.path(),
            inner
        ))
    })?;
    if file.channels.is_empty() {
        return Err(at(src, "channels", "channels", "at least one channel is required"));
    }
    let channels = file
        .channels
        .iter()
        .enumerate()
        .map(|(i, e)| build_channel(src, "channels", &format!("channels[{i}]"), e))
        .collect::<Result<Vec<_>, _>>()?;
    if file.priors.len() != channels.len() {
        return Err(at(
            src,
            "priors",
            "priors",
            format!("{} priors for {} channels", file.priors.len(), channels.len()),
        ));
    }
    let reference = file
        .reference_channel
        .as_ref()
        .map(|e| build_channel(src, "reference_channel", "reference_channel", e))
        .transpose()?;
    let groups = file.groups.clone().unwrap_or_else(|| (0..channels.len()).map(|i| vec![i]).collect());
    let oracles: Vec<_> = file.priors.iter().copied().zip(channels).collect();
    let problem = DiscriminationProblem::new(oracles, groups).map_err(|e| match e {
        chanbound::Error::InvalidPriors(m) => at(src, "priors", "priors", m),
        e @ chanbound::Error::DimensionMismatch { .. } => at(src, "channels", "channels", e),
        other => at(src, "groups", "groups", other),
    })?;
    if let Some(r) = &reference {
        let (_, first) = &problem.oracles()[0];
        if r.dim_in() != first.dim_in() || r.dim_out() != first.dim_out() {
            return Err(at(
                src,
                "reference_channel",
                "reference_channel",
                format!(
                    "maps {}→{}, but the oracles map {}→{}",
                    r.dim_in(),
                    r.dim_out(),
                    first.dim_in(),
                    first.dim_out()
                ),
            ));
        }
    }
    Ok(LoadedProblem { problem, reference })
}

pub fn load_problem(path: &Path) -> Result<LoadedProblem, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_problem(&src).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}
