//! Experiment plans: a flat `key = value` text format with dotted keys.
//!
//! ```text
//! # bias/variance study
//! process.kind = chain          # chain | iid (default chain)
//! process.d = 1
//! process.r = 0.25
//! process.rho = 0.25            # required for chain, forbidden for iid
//! estimator.k = 1,2,3           # default 1,2,3; one report per k
//! estimator.metric = euclidean  # default euclidean
//! grid = 128,256,512,1024,2048,4096
//! replicates = 200
//! seed = 42
//! ```

use std::collections::BTreeMap;

use knn_entropy::math::gaussian_entropy;
use knn_entropy::processes::GaussianChainSpec;
use knn_entropy::{Error, Metric, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    Chain,
    Iid,
}

impl ProcessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProcessKind::Chain => "chain",
            ProcessKind::Iid => "iid",
        }
    }
}

/// A fully resolved experiment plan.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub kind: ProcessKind,
    pub dim: usize,
    pub band: f64,
    /// Temporal correlation; zero for iid plans.
    pub temporal: f64,
    pub ks: Vec<usize>,
    pub metric: Metric,
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    /// Closed-form entropy of the stationary marginal.
    pub true_entropy: f64,
}

impl ExperimentPlan {
    /// Builds and validates a plan from raw fields.
    #[allow(clippy::too_many_arguments)]
    pub fn resolve(
        kind: ProcessKind,
        dim: usize,
        band: f64,
        temporal: f64,
        ks: Vec<usize>,
        metric: Metric,
        sample_sizes: Vec<usize>,
        replicates: usize,
        seed: u64,
    ) -> Result<Self> {
        if sample_sizes.is_empty() {
            return Err(Error::Parse("plan field `grid`: must be nonempty".into()));
        }
        if !sample_sizes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Parse(
                "plan field `grid`: sample sizes must be strictly ascending".into(),
            ));
        }
        if replicates < 2 {
            return Err(Error::Parse(
                "plan field `replicates`: need at least 2 for a variance".into(),
            ));
        }
        if ks.is_empty() {
            return Err(Error::Parse(
                "plan field `estimator.k`: must be nonempty".into(),
            ));
        }
        for &k in &ks {
            if k == 0 {
                return Err(Error::Parse(
                    "plan field `estimator.k`: k must be positive".into(),
                ));
            }
            if let Some(&n) = sample_sizes.iter().find(|&&n| n <= k) {
                return Err(Error::Parse(format!(
                    "plan field `grid`: sample size {n} must exceed estimator.k = {k}"
                )));
            }
        }
        // The parameters must define a valid process; this also covers iid
        // (temporal = 0) and yields the closed-form entropy.
        GaussianChainSpec::new(dim, band, temporal)
            .map_err(|e| Error::Parse(format!("plan fields `process.*`: {e}")))?;
        let true_entropy = gaussian_entropy(dim, band)
            .map_err(|e| Error::Parse(format!("plan fields `process.*`: {e}")))?;
        Ok(Self {
            kind,
            dim,
            band,
            temporal,
            ks,
            metric,
            sample_sizes,
            replicates,
            seed,
            true_entropy,
        })
    }

    /// Parses the key = value plan format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("plan line {}: expected `key = value`", lineno + 1))
            })?;
            let value = value.split('#').next().unwrap_or("");
            let (key, value) = (key.trim(), value.trim());
            if fields.insert(key, value).is_some() {
                return Err(Error::Parse(format!("plan field `{key}`: given twice")));
            }
        }

        const KNOWN: [&str; 9] = [
            "process.kind",
            "process.d",
            "process.r",
            "process.rho",
            "estimator.k",
            "estimator.metric",
            "grid",
            "replicates",
            "seed",
        ];
        for key in fields.keys() {
            if !KNOWN.contains(key) {
                return Err(Error::Parse(format!("plan field `{key}`: unknown key")));
            }
        }

        let kind = match fields.get("process.kind").copied() {
            None | Some("chain") => ProcessKind::Chain,
            Some("iid") => ProcessKind::Iid,
            Some(other) => {
                return Err(Error::Parse(format!(
                    "plan field `process.kind`: expected chain or iid, got {other:?}"
                )))
            }
        };
        let dim = parse_field::<usize>(&fields, "process.d")?;
        let band = parse_field::<f64>(&fields, "process.r")?;
        let temporal = match (kind, fields.get("process.rho")) {
            (ProcessKind::Chain, Some(v)) => parse_value::<f64>("process.rho", v)?,
            (ProcessKind::Chain, None) => {
                return Err(Error::Parse(
                    "plan field `process.rho`: required for chain plans".into(),
                ))
            }
            (ProcessKind::Iid, Some(_)) => {
                return Err(Error::Parse(
                    "plan field `process.rho`: not allowed for iid plans".into(),
                ))
            }
            (ProcessKind::Iid, None) => 0.0,
        };
        let ks = match fields.get("estimator.k") {
            Some(v) => parse_list::<usize>("estimator.k", v)?,
            None => vec![1, 2, 3],
        };
        let metric = match fields.get("estimator.metric") {
            Some(v) => v
                .parse::<Metric>()
                .map_err(|e| Error::Parse(format!("plan field `estimator.metric`: {e}")))?,
            None => Metric::Euclidean,
        };
        let sample_sizes = parse_list::<usize>("grid", fields.get("grid").copied().unwrap_or(""))?;
        let replicates = parse_field::<usize>(&fields, "replicates")?;
        let seed = parse_field::<u64>(&fields, "seed")?;

        Self::resolve(
            kind,
            dim,
            band,
            temporal,
            ks,
            metric,
            sample_sizes,
            replicates,
            seed,
        )
    }
}

fn parse_field<T: std::str::FromStr>(fields: &BTreeMap<&str, &str>, key: &str) -> Result<T> {
    let raw = fields
        .get(key)
        .ok_or_else(|| Error::Parse(format!("plan field `{key}`: missing")))?;
    parse_value(key, raw)
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse::<T>()
        .map_err(|_| Error::Parse(format!("plan field `{key}`: cannot parse {raw:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    if raw.trim().is_empty() {
        return Err(Error::Parse(format!("plan field `{key}`: missing")));
    }
    raw.split(',')
        .map(|cell| parse_value(key, cell.trim()))
        .collect()
}
