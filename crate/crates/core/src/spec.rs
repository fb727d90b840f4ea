//! JSON schemas for channels and superchannels, plus the `name:arg` builder shorthand.
//!
//! Complex entries are `[re, im]` pairs (a bare number is read as real); matrices
//! are row-major nested arrays.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{c64, ComplexMatrix};
use crate::protocols;
use crate::qobj::{QobjError, QuantumChannel};
use crate::random;
use crate::supermap::{self, Branch, Realization, SuperDims, Superchannel, SupermapError};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Qobj(#[from] QobjError),
    #[error(transparent)]
    Supermap(#[from] SupermapError),
}

fn field(field: &str, message: impl Into<String>) -> SpecError {
    SpecError::Field { field: field.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<EntryDe>>")]
pub struct MatrixSpec(pub Vec<Vec<[f64; 2]>>);

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(transparent)]
struct EntryDe(Entry);

impl From<Vec<Vec<EntryDe>>> for MatrixSpec {
    fn from(rows: Vec<Vec<EntryDe>>) -> Self {
        MatrixSpec(
            rows.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|e| match e.0 {
                            Entry::Complex(z) => z,
                            Entry::Real(x) => [x, 0.0],
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

impl MatrixSpec {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixSpec(m.to_rows().into_iter().map(|r| r.into_iter().map(|z| [z.re, z.im]).collect()).collect())
    }

    pub fn to_matrix(&self, name: &str) -> Result<ComplexMatrix, SpecError> {
        let rows: Vec<Vec<_>> = self.0.iter().map(|r| r.iter().map(|z| c64(z[0], z[1])).collect()).collect();
        if rows.is_empty() {
            return Err(field(name, "empty matrix"));
        }
        ComplexMatrix::from_rows(&rows).map_err(|e| field(name, e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// Normalised Choi matrix on `in ⊗ out` (set `normalized: false` for `Σ |i⟩⟨j| ⊗ N(|i⟩⟨j|)`).
    Choi {
        din: usize,
        dout: usize,
        matrix: MatrixSpec,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        normalized: bool,
    },
    Kraus {
        din: usize,
        dout: usize,
        operators: Vec<MatrixSpec>,
    },
    Builder {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dout: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<MatrixSpec>,
    },
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl ChannelSpec {
    pub fn from_channel(n: &QuantumChannel) -> Self {
        ChannelSpec::Choi { din: n.din(), dout: n.dout(), matrix: MatrixSpec::from_matrix(n.choi()), normalized: true }
    }

    /// Parses `name:arg[:arg]`, e.g. `qft:3`, `deterministic:2:0,0`, `random:2:7`.
    pub fn parse_shorthand(s: &str) -> Result<Self, SpecError> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let name = parts[0].to_ascii_lowercase();
        let num = |i: usize, what: &str| -> Result<u64, SpecError> {
            let raw = parts.get(i).ok_or_else(|| SpecError::Parse(format!("'{s}': missing {what}")))?;
            raw.parse::<u64>().map_err(|_| SpecError::Parse(format!("'{s}': {what} '{raw}' is not a non-negative integer")))
        };
        let builder = |d: Option<usize>, dout: Option<usize>, table: Option<Vec<usize>>, seed: Option<u64>| ChannelSpec::Builder {
            name: name.clone(),
            d,
            dout,
            table,
            seed,
            matrix: None,
        };
        let spec = match name.as_str() {
            "qft" | "dephasing" | "identity" | "replacement" => {
                if parts.len() != 2 {
                    return Err(SpecError::Parse(format!("'{s}': expected {name}:<d>")));
                }
                builder(Some(num(1, "dimension")? as usize), None, None, None)
            }
            "deterministic" => {
                if parts.len() != 3 {
                    return Err(SpecError::Parse(format!("'{s}': expected deterministic:<dout>:<f0,f1,...>")));
                }
                let table = parts[2]
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|_| SpecError::Parse(format!("'{s}': bad table entry '{x}'"))))
                    .collect::<Result<Vec<_>, _>>()?;
                builder(None, Some(num(1, "output dimension")? as usize), Some(table), None)
            }
            "random" | "random-unitary" => {
                if parts.len() != 3 {
                    return Err(SpecError::Parse(format!("'{s}': expected {name}:<d>:<seed>")));
                }
                builder(Some(num(1, "dimension")? as usize), None, None, Some(num(2, "seed")?))
            }
            _ => return Err(SpecError::Parse(format!("unknown builder '{}' in '{s}'", parts[0]))),
        };
        Ok(spec)
    }

    pub fn build(&self) -> Result<QuantumChannel, SpecError> {
        match self {
            ChannelSpec::Choi { din, dout, matrix, normalized } => {
                let m = matrix.to_matrix("matrix")?;
                let m = if *normalized { m } else { m.scale_real(1.0 / *din as f64) };
                Ok(QuantumChannel::from_choi(*din, *dout, m)?)
            }
            ChannelSpec::Kraus { din, dout, operators } => {
                let ks =
                    operators.iter().enumerate().map(|(k, m)| m.to_matrix(&format!("operators[{k}]"))).collect::<Result<Vec<_>, _>>()?;
                Ok(QuantumChannel::from_kraus(*din, *dout, &ks)?)
            }
            ChannelSpec::Builder { name, d, dout, table, seed, matrix } => {
                let need_d = || d.filter(|&d| d >= 1).ok_or_else(|| field("d", format!("builder '{name}' needs a dimension d >= 1")));
                let need_seed = || seed.ok_or_else(|| field("seed", format!("builder '{name}' needs a seed")));
                Ok(match name.as_str() {
                    "qft" => protocols::qft_any(need_d()?),
                    "dephasing" => QuantumChannel::dephasing(need_d()?),
                    "identity" => QuantumChannel::identity(need_d()?),
                    "replacement" => QuantumChannel::replacement(need_d()?),
                    "deterministic" => {
                        let table = table.as_ref().ok_or_else(|| field("table", "deterministic builder needs a table"))?;
                        let dout = dout.ok_or_else(|| field("dout", "deterministic builder needs dout"))?;
                        QuantumChannel::deterministic(table.len(), dout, table)?
                    }
                    "unitary" => {
                        let u = matrix.as_ref().ok_or_else(|| field("matrix", "unitary builder needs a matrix"))?;
                        QuantumChannel::from_unitary(&u.to_matrix("matrix")?)?
                    }
                    "random" => {
                        let d = need_d()?;
                        random::random_channel(&mut random::seeded(need_seed()?), d, d, d)
                    }
                    "random-unitary" => random::random_unitary_channel(&mut random::seeded(need_seed()?), need_d()?),
                    other => return Err(field("name", format!("unknown builder '{other}'"))),
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub affine: f64,
    pub coeff: f64,
    pub effect: MatrixSpec,
    pub target: ChannelSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuperchannelSpec {
    Prepost {
        pre: ChannelSpec,
        post: ChannelSpec,
        env: usize,
    },
    MeasurePrepare {
        a0: usize,
        a1: usize,
        branches: Vec<BranchSpec>,
    },
    Linear {
        a0: usize,
        a1: usize,
        b0: usize,
        b1: usize,
        matrix: MatrixSpec,
    },
    /// `identity`, `dephasing`, `omega`, `replacement-from-qft` (need `d`) or `golden-unit` (needs `target`).
    Builder {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<Box<ChannelSpec>>,
    },
}

impl SuperchannelSpec {
    pub fn from_superchannel(t: &Superchannel) -> Self {
        let d = t.dims();
        match t.realization() {
            Realization::PrePost { pre, post, env } => {
                SuperchannelSpec::Prepost { pre: ChannelSpec::from_channel(pre), post: ChannelSpec::from_channel(post), env: *env }
            }
            Realization::MeasurePrepare { branches } => SuperchannelSpec::MeasurePrepare {
                a0: d.a0,
                a1: d.a1,
                branches: branches
                    .iter()
                    .map(|b| BranchSpec {
                        affine: b.affine,
                        coeff: b.coeff,
                        effect: MatrixSpec::from_matrix(&b.effect),
                        target: ChannelSpec::from_channel(&b.target),
                    })
                    .collect(),
            },
            Realization::Linear { matrix } => {
                SuperchannelSpec::Linear { a0: d.a0, a1: d.a1, b0: d.b0, b1: d.b1, matrix: MatrixSpec::from_matrix(matrix) }
            }
        }
    }

    pub fn build(&self) -> Result<Superchannel, SpecError> {
        match self {
            SuperchannelSpec::Prepost { pre, post, env } => Ok(Superchannel::pre_post(pre.build()?, post.build()?, *env)?),
            SuperchannelSpec::MeasurePrepare { a0, a1, branches } => {
                let bs = branches
                    .iter()
                    .enumerate()
                    .map(|(k, b)| {
                        Ok(Branch {
                            affine: b.affine,
                            coeff: b.coeff,
                            effect: b.effect.to_matrix(&format!("branches[{k}].effect"))?,
                            target: b.target.build()?,
                        })
                    })
                    .collect::<Result<Vec<_>, SpecError>>()?;
                Ok(Superchannel::measure_prepare(*a0, *a1, bs)?)
            }
            SuperchannelSpec::Linear { a0, a1, b0, b1, matrix } => {
                Ok(Superchannel::linear(SuperDims::new(*a0, *a1, *b0, *b1), matrix.to_matrix("matrix")?)?)
            }
            SuperchannelSpec::Builder { name, d, target } => {
                let need_d = || d.filter(|&d| d >= 1).ok_or_else(|| field("d", format!("builder '{name}' needs d >= 1")));
                let proto = |e: protocols::ProtocolError| field("name", e.to_string());
                Ok(match name.as_str() {
                    "identity" => Superchannel::identity(need_d()?, need_d()?),
                    "dephasing" => supermap::dephasing_super(need_d()?, need_d()?),
                    "omega" => protocols::build_omega(need_d()?).map_err(proto)?,
                    "replacement-from-qft" => protocols::replacement_from_qft_disc(need_d()?).map_err(proto)?,
                    "golden-unit" => {
                        let t = target.as_ref().ok_or_else(|| field("target", "golden-unit builder needs a target channel"))?;
                        protocols::golden_unit_misc(&t.build()?).map_err(proto)?
                    }
                    other => return Err(field("name", format!("unknown superchannel builder '{other}'"))),
                })
            }
        }
    }
}

fn json_error(e: serde_json::Error) -> SpecError {
    // Internally tagged enums buffer their input, so data errors come without a position.
    if e.line() == 0 {
        SpecError::Parse(e.to_string())
    } else {
        SpecError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    }
}

pub fn parse_channel_json(text: &str) -> Result<ChannelSpec, SpecError> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn parse_superchannel_json(text: &str) -> Result<SuperchannelSpec, SpecError> {
    serde_json::from_str(text).map_err(json_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_builds_named_channels() {
        let f = ChannelSpec::parse_shorthand("qft:3").unwrap().build().unwrap();
        assert_eq!((f.din(), f.dout()), (3, 3));
        let q = ChannelSpec::parse_shorthand("deterministic:2:1,1,0").unwrap().build().unwrap();
        assert_eq!((q.din(), q.dout()), (3, 2));
        let a = ChannelSpec::parse_shorthand("random:2:5").unwrap().build().unwrap();
        let b = ChannelSpec::parse_shorthand("random:2:5").unwrap().build().unwrap();
        assert_eq!(a.choi(), b.choi());
        assert!(ChannelSpec::parse_shorthand("qft").is_err());
        assert!(ChannelSpec::parse_shorthand("nope:2").is_err());
    }

    #[test]
    fn channel_json_roundtrip() {
        let n = ChannelSpec::parse_shorthand("random:2:1").unwrap().build().unwrap();
        let text = serde_json::to_string(&ChannelSpec::from_channel(&n)).unwrap();
        let back = parse_channel_json(&text).unwrap().build().unwrap();
        assert!(back.choi().max_abs_diff(n.choi()) < 1e-15);
    }

    #[test]
    fn real_entries_and_kraus() {
        let text = r#"{"kind":"kraus","din":2,"dout":2,"operators":[[[0,1],[1,0]]]}"#;
        let x = parse_channel_json(text).unwrap().build().unwrap();
        assert!((x.choi()[(1, 2)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_errors_carry_position_and_field() {
        let err = parse_channel_json("{\"kind\":\"choi\",\n\"din\":2,}").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_channel_json(r#"{"kind":"choi","din":2}"#).unwrap_err().to_string();
        assert!(err.contains("dout"), "{err}");
        let err = parse_channel_json(r#"{"kind":"builder","name":"qft"}"#).unwrap().build().unwrap_err().to_string();
        assert!(err.starts_with("d:"), "{err}");
    }

    #[test]
    fn superchannel_json_roundtrip() {
        let om = protocols::build_omega(2).unwrap();
        let spec = SuperchannelSpec::from_superchannel(&om);
        let text = serde_json::to_string(&spec).unwrap();
        let back = parse_superchannel_json(&text).unwrap().build().unwrap();
        assert!(supermap::action_distance(&om, &back).unwrap() < 1e-15);
    }
}
