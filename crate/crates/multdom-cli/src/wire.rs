//! Wire format and input parsing for the command line.
//!
//! Channels travel as `{"dim": d, "kraus": [[[re, im], …], …]}` with each
//! Kraus operator a flat row-major list of `[re, im]` pairs. Inputs may also
//! be named builtins of the form `builtin:<family>[/<params>…]`.

use serde::{Deserialize, Serialize};

use multdom::builders::ChannelSpec;
use multdom::linalg::{CMatrix, Tolerance};
use multdom::{analysis::InputEcho, Error, KrausChannel64, Result};

/// JSON carrier for a channel's Kraus data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim: usize,
    /// One flat row-major matrix per Kraus operator, entries as [re, im].
    pub kraus: Vec<Vec<[f64; 2]>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel64) -> Self {
        let dim = ch.dim();
        let kraus = ch
            .kraus()
            .iter()
            .map(|k| k.data().iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self { dim, kraus }
    }

    pub fn to_channel(&self, tol: &Tolerance<f64>) -> Result<KrausChannel64> {
        if self.kraus.is_empty() {
            return Err(Error::Shape("channel file contains no Kraus operators".into()));
        }
        let mut mats = Vec::with_capacity(self.kraus.len());
        for (i, flat) in self.kraus.iter().enumerate() {
            if flat.len() != self.dim * self.dim {
                return Err(Error::Shape(format!(
                    "kraus[{i}] has {} entries, expected {}",
                    flat.len(),
                    self.dim * self.dim
                )));
            }
            let data = flat.iter().map(|&[re, im]| multdom::C64::new(re, im)).collect();
            mats.push(CMatrix::from_vec(self.dim, self.dim, data)?);
        }
        KrausChannel64::new(mats, tol)
    }
}

/// Parses a channel input: a `builtin:` name or a path to a channel JSON
/// file.
pub fn load_channel(input: &str, tol: &Tolerance<f64>) -> Result<(KrausChannel64, InputEcho)> {
    if let Some(rest) = input.strip_prefix("builtin:") {
        return build_builtin(rest, tol);
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::Precondition(format!("cannot read '{input}': {e}")))?;
    let file: ChannelFile = serde_json::from_str(&text)
        .map_err(|e| Error::Precondition(format!("malformed channel JSON in '{input}': {e}")))?;
    check_dim(file.dim)?;
    let ch = file.to_channel(tol)?;
    let echo = InputEcho::Kraus { dim: ch.dim(), count: ch.kraus().len() };
    Ok((ch, echo))
}

/// Parses a generator spec: inline JSON `ChannelSpec`, or a builtin string.
pub fn parse_spec(input: &str, tol: &Tolerance<f64>) -> Result<(KrausChannel64, InputEcho)> {
    let trimmed = input.trim();
    if trimmed.starts_with('{') {
        let spec: ChannelSpec = serde_json::from_str(trimmed)
            .map_err(|e| Error::Precondition(format!("malformed ChannelSpec JSON: {e}")))?;
        if let Some(dim) = spec_dim(&spec) {
            check_dim(dim)?;
        }
        let ch = spec.build::<f64>(tol)?;
        return Ok((ch, InputEcho::Spec(spec)));
    }
    let rest = trimmed.strip_prefix("builtin:").unwrap_or(trimmed);
    build_builtin(rest, tol)
}

/// System dimension a spec will instantiate, when it is parameterised.
fn spec_dim(spec: &ChannelSpec) -> Option<usize> {
    match spec {
        ChannelSpec::Unitary { dim, .. }
        | ChannelSpec::Weyl { dim, .. }
        | ChannelSpec::Fourier { dim }
        | ChannelSpec::RandomUnitaryMixture { dim, .. } => Some(*dim),
        _ => None,
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Precondition(format!("cannot parse {what} from '{s}'")))
}

fn parse_probs(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| parse_num::<f64>(p.trim(), "probability"))
        .collect()
}

/// Rejects dimensions above the cap before any O(d³) construction runs.
fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > multdom::analysis::DEFAULT_DIM_CAP {
        return Err(Error::Precondition(format!(
            "dimension {dim} is outside 1..={}",
            multdom::analysis::DEFAULT_DIM_CAP
        )));
    }
    Ok(())
}

fn build_builtin(name: &str, tol: &Tolerance<f64>) -> Result<(KrausChannel64, InputEcho)> {
    let parts: Vec<&str> = name.split('/').collect();
    let spec: ChannelSpec = match parts.as_slice() {
        ["fourier", d] => ChannelSpec::Fourier { dim: parse_num(d, "dimension")? },
        ["kappa3"] => ChannelSpec::Kappa3,
        ["projective"] => ChannelSpec::Projective,
        ["path", t] => ChannelSpec::PathT { t: parse_num(t, "path parameter")? },
        ["pauli", probs] => {
            let p = parse_probs(probs)?;
            if p.len() != 4 {
                return Err(Error::Precondition(
                    "pauli builtin needs 4 comma-separated probabilities".into(),
                ));
            }
            ChannelSpec::Pauli { probs: [p[0], p[1], p[2], p[3]] }
        }
        ["weyl", d, probs] => ChannelSpec::Weyl {
            dim: parse_num(d, "dimension")?,
            probs: parse_probs(probs)?,
        },
        ["unitary", d] => ChannelSpec::Unitary { dim: parse_num(d, "dimension")?, name: None, seed: Some(0) },
        ["unitary", d, tail] => {
            let dim = parse_num(d, "dimension")?;
            if let Ok(seed) = tail.parse::<u64>() {
                ChannelSpec::Unitary { dim, name: None, seed: Some(seed) }
            } else {
                ChannelSpec::Unitary { dim, name: Some(tail.to_string()), seed: None }
            }
        }
        ["random", d, k, seed] => ChannelSpec::RandomUnitaryMixture {
            dim: parse_num(d, "dimension")?,
            kraus: parse_num(k, "kraus count")?,
            seed: parse_num(seed, "seed")?,
        },
        ["identity", d] => {
            let dim: usize = parse_num(d, "dimension")?;
            check_dim(dim)?;
            let ch = KrausChannel64::identity(dim);
            return Ok((ch, InputEcho::Kraus { dim, count: 1 }));
        }
        ["counterexample"] => {
            let ch = multdom::ucp::counterexample_phi::<f64>(tol)?;
            return Ok((ch, InputEcho::Kraus { dim: 3, count: 4 }));
        }
        _ => {
            return Err(Error::Precondition(format!(
                "unknown builtin '{name}'; known: fourier/<d>, kappa3, projective, path/<t>, \
                 pauli/<p,p,p,p>, weyl/<d>/<p,…>, unitary/<d>[/<name|seed>], \
                 random/<d>/<k>/<seed>, identity/<d>, counterexample"
            )));
        }
    };
    if let Some(dim) = spec_dim(&spec) {
        check_dim(dim)?;
    }
    let ch = spec.build::<f64>(tol)?;
    let echo = InputEcho::Spec(spec);
    Ok((ch, echo))
}
