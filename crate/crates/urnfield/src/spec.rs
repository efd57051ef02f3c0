//! The small spec languages used on the command line for reinforcement laws
//! and boundary data.
//!
//! Laws: `delta:V`, `bernoulli:p=P,scale=S`, `uniform:A,B`, `file:PATH`.
//! Boundary data: `delta`, `constant:LAW`, `power:gamma=G`,
//! `hdelta:kmu=A,knu=B`, `file:PATH`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use urnfield_core::boundary::BoundaryDatum;
use urnfield_core::dist::{mixture_with, QuantileDist, Regrid};

use crate::error::CliError;
use crate::io::read_json;

#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Delta(f64),
    Bernoulli { p: f64, scale: f64 },
    Uniform { a: f64, b: f64 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Delta,
    Constant(DistSpec),
    Power { gamma: f64 },
    HDelta { k_mu: f64, k_nu: f64 },
    File(PathBuf),
}

fn malformed(token: &str, reason: impl Into<String>) -> CliError {
    CliError::Spec { token: token.to_string(), reason: reason.into() }
}

fn number(token: &str, s: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| malformed(token, format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(malformed(token, format!("`{s}` is not finite")));
    }
    Ok(v)
}

/// Parses `k1=v1,k2=v2` with exactly the given keys, in any order.
fn keyed<const N: usize>(token: &str, body: &str, keys: [&str; N]) -> Result<[f64; N], CliError> {
    let mut out = [None; N];
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| malformed(token, format!("expected key=value, got `{part}`")))?;
        let slot = keys
            .iter()
            .position(|key| *key == k.trim())
            .ok_or_else(|| malformed(token, format!("unknown key `{}` (expected {})", k.trim(), keys.join(", "))))?;
        if out[slot].is_some() {
            return Err(malformed(token, format!("key `{}` given twice", keys[slot])));
        }
        out[slot] = Some(number(token, v)?);
    }
    let mut vals = [0.0; N];
    for (i, v) in out.iter().enumerate() {
        vals[i] = v.ok_or_else(|| malformed(token, format!("missing key `{}`", keys[i])))?;
    }
    Ok(vals)
}

impl FromStr for DistSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (kind, body) = s.split_once(':').ok_or_else(|| malformed(s, "expected KIND:ARGS"))?;
        match kind {
            "delta" => Ok(Self::Delta(number(s, body)?)),
            "bernoulli" => {
                let [p, scale] = keyed(s, body, ["p", "scale"])?;
                Ok(Self::Bernoulli { p, scale })
            }
            "uniform" => {
                let (a, b) = body.split_once(',').ok_or_else(|| malformed(s, "expected uniform:A,B"))?;
                Ok(Self::Uniform { a: number(s, a)?, b: number(s, b)? })
            }
            "file" if !body.is_empty() => Ok(Self::File(PathBuf::from(body))),
            _ => Err(malformed(s, format!("unknown law `{kind}` (expected delta, bernoulli, uniform or file)"))),
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Delta(v) => write!(f, "delta:{v}"),
            Self::Bernoulli { p, scale } => write!(f, "bernoulli:p={p},scale={scale}"),
            Self::Uniform { a, b } => write!(f, "uniform:{a},{b}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl DistSpec {
    /// Smallest support bound containing the law.
    pub fn natural_upper(&self) -> Result<f64, CliError> {
        Ok(match self {
            Self::Delta(v) => *v,
            Self::Bernoulli { scale, .. } => *scale,
            Self::Uniform { b, .. } => *b,
            Self::File(p) => {
                let d: QuantileDist = read_json(p)?;
                d.quantiles()[d.k() - 1]
            }
        })
    }

    /// The law on `[0, upper]` with `k` quantiles. File laws with a different
    /// `K` are re-gridded.
    pub fn build(&self, upper: f64, k: usize) -> Result<QuantileDist, CliError> {
        Ok(match self {
            Self::Delta(v) => QuantileDist::point_mass(*v, upper, k)?,
            Self::Bernoulli { p, scale } => QuantileDist::bernoulli(*p, *scale, upper, k)?,
            Self::Uniform { a, b } => QuantileDist::uniform(*a, *b, upper, k)?,
            Self::File(p) => {
                let d: QuantileDist = read_json(p)?;
                let d = d.with_upper(upper)?;
                if d.k() == k {
                    d
                } else {
                    mixture_with(&[(1.0, &d)], k, Regrid::Midpoint)?
                }
            }
        })
    }
}

impl FromStr for BoundarySpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "delta" {
            return Ok(Self::Delta);
        }
        let (kind, body) = s.split_once(':').ok_or_else(|| malformed(s, "expected delta or KIND:ARGS"))?;
        match kind {
            "constant" => Ok(Self::Constant(body.parse().map_err(|e| match e {
                CliError::Spec { reason, .. } => malformed(s, reason),
                other => other,
            })?)),
            "power" => {
                let [gamma] = keyed(s, body, ["gamma"])?;
                Ok(Self::Power { gamma })
            }
            "hdelta" => {
                let [k_mu, k_nu] = keyed(s, body, ["kmu", "knu"])?;
                Ok(Self::HDelta { k_mu, k_nu })
            }
            "file" if !body.is_empty() => Ok(Self::File(PathBuf::from(body))),
            _ => Err(malformed(s, format!("unknown boundary `{kind}` (expected delta, constant, power, hdelta or file)"))),
        }
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Delta => write!(f, "delta"),
            Self::Constant(d) => write!(f, "constant:{d}"),
            Self::Power { gamma } => write!(f, "power:gamma={gamma}"),
            Self::HDelta { k_mu, k_nu } => write!(f, "hdelta:kmu={k_mu},knu={k_nu}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl BoundarySpec {
    pub fn build(&self, t_nodes: usize, k: usize) -> Result<BoundaryDatum, CliError> {
        Ok(match self {
            Self::Delta => BoundaryDatum::delta(t_nodes, k)?,
            Self::Constant(d) => BoundaryDatum::constant(&d.build(1.0, k)?, t_nodes)?,
            Self::Power { gamma } => BoundaryDatum::power(*gamma, t_nodes, k)?,
            Self::HDelta { k_mu, k_nu } => BoundaryDatum::hdelta(*k_mu, *k_nu, t_nodes, k)?,
            Self::File(p) => {
                let b: BoundaryDatum = read_json(p)?;
                if b.k() != k {
                    return Err(CliError::Core(urnfield_core::Error::Dimension(format!(
                        "boundary file {} has K = {}, run uses K = {k}",
                        p.display(),
                        b.k()
                    ))));
                }
                b
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_laws() {
        assert_eq!("delta:1".parse::<DistSpec>().unwrap(), DistSpec::Delta(1.0));
        assert_eq!(
            "bernoulli:scale=2,p=0.25".parse::<DistSpec>().unwrap(),
            DistSpec::Bernoulli { p: 0.25, scale: 2.0 }
        );
        assert_eq!("uniform:0,3".parse::<DistSpec>().unwrap(), DistSpec::Uniform { a: 0.0, b: 3.0 });
        assert_eq!("file:a/b.json".parse::<DistSpec>().unwrap(), DistSpec::File("a/b.json".into()));
    }

    #[test]
    fn rejects_malformed_laws_naming_the_token() {
        for bad in ["delta", "delta:x", "gauss:1", "bernoulli:p=0.5", "bernoulli:p=0.5,scale=1,q=2", "uniform:1", "file:"] {
            let err = bad.parse::<DistSpec>().unwrap_err();
            assert!(err.to_string().contains(bad), "{bad}: {err}");
        }
    }

    #[test]
    fn parses_boundaries() {
        assert_eq!("delta".parse::<BoundarySpec>().unwrap(), BoundarySpec::Delta);
        assert_eq!(
            "constant:uniform:0,1".parse::<BoundarySpec>().unwrap(),
            BoundarySpec::Constant(DistSpec::Uniform { a: 0.0, b: 1.0 })
        );
        assert_eq!("power:gamma=2".parse::<BoundarySpec>().unwrap(), BoundarySpec::Power { gamma: 2.0 });
        assert_eq!(
            "hdelta:kmu=2,knu=1".parse::<BoundarySpec>().unwrap(),
            BoundarySpec::HDelta { k_mu: 2.0, k_nu: 1.0 }
        );
        assert!("power:g=2".parse::<BoundarySpec>().is_err());
        assert!("constant:nope".parse::<BoundarySpec>().unwrap_err().to_string().contains("constant:nope"));
    }

    #[test]
    fn display_round_trips() {
        for s in ["delta:0.5", "bernoulli:p=0.25,scale=2", "uniform:0,1"] {
            assert_eq!(s.parse::<DistSpec>().unwrap().to_string(), s);
        }
        for s in ["delta", "constant:delta:0.5", "power:gamma=2", "hdelta:kmu=2,knu=1"] {
            assert_eq!(s.parse::<BoundarySpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn builds_laws_and_data() {
        let d = "bernoulli:p=0.25,scale=2".parse::<DistSpec>().unwrap();
        assert_eq!(d.natural_upper().unwrap(), 2.0);
        assert!((d.build(2.0, 64).unwrap().mean() - 0.5).abs() < 1e-15);
        let b = "hdelta:kmu=2,knu=1".parse::<BoundarySpec>().unwrap().build(11, 16).unwrap();
        assert_eq!(b.t_nodes(), 11);
    }
}
