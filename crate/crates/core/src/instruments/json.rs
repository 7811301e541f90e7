//! Model wire format.
//!
//! ```text
//! {"type": "uniform",    "D": 2, "E": 2, "table": [{"a": 0, "b": 0, "channel": {..}}, ..]}
//! {"type": "nonuniform", "D": 2, "E": 2, "table": [{"a": 0, "b": 0, "j": 1, "channel": {..}}, ..]}
//! {"type": "general",    "D": 2, "E": 2, "branches": [{"dim_in": .., "dim_out": .., "kraus": [..]}, ..]}
//! ```
//!
//! Omitted table entries are zero maps.

use serde::{Deserialize, Serialize};

use crate::channels::json::{KrausChannelJson, StochasticChannelJson};
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{InstrumentImplementation, NonUniformStochasticModel, UniformStochasticModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntryJson {
    pub a: usize,
    pub b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    pub channel: StochasticChannelJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelJson {
    Uniform {
        #[serde(rename = "D")]
        d: usize,
        #[serde(rename = "E")]
        e: usize,
        table: Vec<TableEntryJson>,
    },
    Nonuniform {
        #[serde(rename = "D")]
        d: usize,
        #[serde(rename = "E")]
        e: usize,
        table: Vec<TableEntryJson>,
    },
    General {
        #[serde(rename = "D")]
        d: usize,
        #[serde(rename = "E")]
        e: usize,
        branches: Vec<KrausChannelJson>,
    },
}

/// Any of the three supported noise descriptions of a subsystem measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorModel<T> {
    Uniform(UniformStochasticModel<T>),
    NonUniform(NonUniformStochasticModel<T>),
    General(InstrumentImplementation<T>),
}

impl<T: Real> ErrorModel<T> {
    pub fn d(&self) -> usize {
        match self {
            Self::Uniform(m) => m.d(),
            Self::NonUniform(m) => m.d(),
            Self::General(m) => m.d(),
        }
    }

    pub fn e(&self) -> usize {
        match self {
            Self::Uniform(m) => m.e(),
            Self::NonUniform(m) => m.e(),
            Self::General(m) => m.e(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Uniform(_) => "uniform",
            Self::NonUniform(_) => "nonuniform",
            Self::General(_) => "general",
        }
    }

    pub fn implementation(&self) -> InstrumentImplementation<T> {
        match self {
            Self::Uniform(m) => m.expand(),
            Self::NonUniform(m) => m.expand(),
            Self::General(m) => m.clone(),
        }
    }

    pub fn to_wire(&self) -> ModelJson {
        let entry = |a, b, j, ch: &crate::channels::StochasticChannel<T>| TableEntryJson {
            a,
            b,
            j,
            channel: ch.into(),
        };
        match self {
            Self::Uniform(m) => {
                let d = m.d();
                let table = (0..d * d)
                    .filter(|&k| !m.table()[k].is_zero())
                    .map(|k| entry(k / d, k % d, None, &m.table()[k]))
                    .collect();
                ModelJson::Uniform { d, e: m.e(), table }
            }
            Self::NonUniform(m) => {
                let d = m.d();
                let table = (0..d * d * d)
                    .filter(|&k| !m.table()[k].is_zero())
                    .map(|k| entry(k / (d * d), (k / d) % d, Some(k % d), &m.table()[k]))
                    .collect();
                ModelJson::Nonuniform { d, e: m.e(), table }
            }
            Self::General(m) => ModelJson::General {
                d: m.d(),
                e: m.e(),
                branches: m.branches().iter().map(KrausChannelJson::from).collect(),
            },
        }
    }

    /// Validates every model invariant; the error names the one that failed.
    pub fn from_wire(wire: &ModelJson) -> Result<Self> {
        let channel = |k: usize, e: &TableEntryJson| {
            e.channel
                .to_channel::<T>()
                .map_err(|err| Error::InvalidModel(format!("table entry {k}: {err}")))
        };
        match wire {
            ModelJson::Uniform { d, e, table } => {
                let mut entries = Vec::with_capacity(table.len());
                let mut seen = std::collections::HashSet::new();
                for (k, t) in table.iter().enumerate() {
                    if t.j.is_some() {
                        return Err(Error::InvalidModel(format!("table entry {k}: uniform entries carry no \"j\"")));
                    }
                    if !seen.insert((t.a, t.b)) {
                        return Err(Error::InvalidModel(format!("duplicate entry ({}, {})", t.a, t.b)));
                    }
                    entries.push((t.a, t.b, channel(k, t)?));
                }
                Ok(Self::Uniform(UniformStochasticModel::from_entries(*d, *e, entries)?))
            }
            ModelJson::Nonuniform { d, e, table } => {
                let mut entries = Vec::with_capacity(table.len());
                let mut seen = std::collections::HashSet::new();
                for (k, t) in table.iter().enumerate() {
                    let j = t
                        .j
                        .ok_or_else(|| Error::InvalidModel(format!("table entry {k}: missing \"j\"")))?;
                    if !seen.insert((t.a, t.b, j)) {
                        return Err(Error::InvalidModel(format!("duplicate entry ({}, {}, {j})", t.a, t.b)));
                    }
                    entries.push((t.a, t.b, j, channel(k, t)?));
                }
                Ok(Self::NonUniform(NonUniformStochasticModel::from_entries(*d, *e, entries)?))
            }
            ModelJson::General { d, e, branches } => {
                let branches = branches
                    .iter()
                    .enumerate()
                    .map(|(j, b)| {
                        b.to_channel::<T>()
                            .map_err(|err| Error::InvalidModel(format!("branch {j}: {err}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::General(InstrumentImplementation::new(*d, *e, branches)?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("model serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_wire(&serde_json::from_str(s)?)
    }
}
