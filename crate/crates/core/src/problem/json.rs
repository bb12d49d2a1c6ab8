//! JSON form: `{alphabet, active: {degree, confs}, passive, meta}` with
//! labels spelled by name.

use serde::{Deserialize, Serialize};

use super::{id_lookup, Configuration, Constraint, Group, Problem, ProblemError};
use crate::labels::LabelSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub members: Vec<String>,
    pub exp: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub degree: usize,
    pub confs: Vec<Vec<GroupJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemJson {
    pub alphabet: Vec<String>,
    pub active: ConstraintJson,
    pub passive: ConstraintJson,
    #[serde(default)]
    pub meta: Option<String>,
}

fn constraint_json(p: &Problem, c: &Constraint) -> ConstraintJson {
    ConstraintJson {
        degree: c.degree(),
        confs: c
            .configs()
            .iter()
            .map(|conf| {
                conf.groups()
                    .iter()
                    .map(|g| GroupJson { members: p.set_names(g.members), exp: g.exp })
                    .collect()
            })
            .collect(),
    }
}

impl From<&Problem> for ProblemJson {
    fn from(p: &Problem) -> Self {
        ProblemJson {
            alphabet: p.alphabet().to_vec(),
            active: constraint_json(p, p.active()),
            passive: constraint_json(p, p.passive()),
            meta: p.meta().map(str::to_string),
        }
    }
}

impl TryFrom<ProblemJson> for Problem {
    type Error = ProblemError;

    fn try_from(json: ProblemJson) -> Result<Self, Self::Error> {
        let ids = id_lookup(&json.alphabet);
        let build = |c: &ConstraintJson| -> Result<Constraint, ProblemError> {
            let configs = c
                .confs
                .iter()
                .map(|groups| {
                    let groups = groups
                        .iter()
                        .map(|g| {
                            let members = g
                                .members
                                .iter()
                                .map(|m| ids.get(m.as_str()).copied().ok_or_else(|| ProblemError::UnknownLabel(m.clone())))
                                .collect::<Result<LabelSet, _>>()?;
                            Ok(Group::new(members, g.exp))
                        })
                        .collect::<Result<Vec<_>, ProblemError>>()?;
                    Configuration::new(groups)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Constraint::new(c.degree, configs)
        };
        let active = build(&json.active)?;
        let passive = build(&json.passive)?;
        Problem::new(json.alphabet, active, passive, json.meta)
    }
}

impl Serialize for Problem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ProblemJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Problem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = ProblemJson::deserialize(deserializer)?;
        Problem::try_from(json).map_err(serde::de::Error::custom)
    }
}
