//! JSON documents: Krivine-structure instance files and model files.
//!
//! An instance file names its carriers and gives the three tables by name;
//! all names must resolve and matrices must match the declared dimensions.
//! The optional `qp` field upgrades the structure to an abstract one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hol::{Model, Value};
use crate::oca::TableOca;
use crate::paks::{FiniteAks, FinitePaks};
use crate::rl::{PushTable, RealizabilityLattice, TermSet};
use crate::syntax::{self, Symbols};
use crate::Result;

/// On-disk form of a finite Krivine structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub terms: Vec<String>,
    pub stacks: Vec<String>,
    /// Term-name matrix: `app[t][u]` is the name of `t u`.
    pub app: Vec<Vec<String>>,
    /// Stack-name matrix: `push[t][pi]` is the name of `t . pi`.
    pub push: Vec<Vec<String>>,
    /// Term names indexed by stack: the saved continuation of each stack.
    pub save: Vec<String>,
    #[serde(rename = "K")]
    pub k: String,
    #[serde(rename = "S")]
    pub s: String,
    pub cc: String,
    pub pole: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qp: Option<Vec<String>>,
}

/// A parsed instance: pre-abstract, or abstract when quasi-proofs are given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Paks(FinitePaks),
    Aks(FiniteAks),
}

impl Instance {
    pub fn paks(&self) -> &FinitePaks {
        match self {
            Instance::Paks(p) => p,
            Instance::Aks(a) => a.paks(),
        }
    }

    /// The abstract structure, adding the minimal quasi-proof set when the
    /// document declared none.
    pub fn into_aks(self) -> FiniteAks {
        match self {
            Instance::Paks(p) => FiniteAks::with_minimal_qp(p),
            Instance::Aks(a) => a,
        }
    }
}

impl InstanceDoc {
    pub fn parse(text: &str) -> Result<InstanceDoc> {
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))
    }

    /// Canonical rendering; fixture files are stored in exactly this form,
    /// so serialize-then-parse is byte identical.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    /// Resolve names, validate shapes, build the structure and run the axiom
    /// sweep. The structure carries its report whether or not it is valid.
    pub fn to_instance(&self) -> Result<Instance> {
        let rl = RealizabilityLattice::new(
            self.terms.clone(),
            self.stacks.clone(),
            &self
                .pole
                .iter()
                .map(|(t, s)| {
                    Ok((
                        lookup(&self.terms, t, "pole term")?,
                        lookup(&self.stacks, s, "pole stack")?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        let nt = self.terms.len();
        let ns = self.stacks.len();
        if self.app.len() != nt || self.app.iter().any(|r| r.len() != nt) {
            return Err(Error::SchemaError(format!(
                "app matrix must be {nt}x{nt}"
            )));
        }
        if self.push.len() != nt || self.push.iter().any(|r| r.len() != ns) {
            return Err(Error::SchemaError(format!(
                "push matrix must be {nt}x{ns}"
            )));
        }
        if self.save.len() != ns {
            return Err(Error::SchemaError(format!(
                "save list must have {ns} entries"
            )));
        }
        let app = self
            .app
            .iter()
            .map(|row| {
                row.iter()
                    .map(|name| lookup(&self.terms, name, "app entry"))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let push_rows = self
            .push
            .iter()
            .map(|row| {
                row.iter()
                    .map(|name| lookup(&self.stacks, name, "push entry"))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let save = self
            .save
            .iter()
            .map(|name| lookup(&self.terms, name, "save entry"))
            .collect::<Result<Vec<_>>>()?;
        let paks = FinitePaks::new(
            rl,
            app,
            PushTable::new(push_rows, nt, ns)?,
            save,
            lookup(&self.terms, &self.k, "K")?,
            lookup(&self.terms, &self.s, "S")?,
            lookup(&self.terms, &self.cc, "cc")?,
        )?;
        match &self.qp {
            None => Ok(Instance::Paks(paks)),
            Some(names) => {
                let mut qp = TermSet::EMPTY;
                for name in names {
                    qp.insert(lookup(&self.terms, name, "qp entry")?);
                }
                Ok(Instance::Aks(FiniteAks::new(paks, qp)?))
            }
        }
    }

    pub fn from_paks(paks: &FinitePaks) -> InstanceDoc {
        let rl = paks.rl();
        let term = |t: usize| rl.term_name(t).to_string();
        let stack = |s: usize| rl.stack_name(s).to_string();
        InstanceDoc {
            terms: rl.term_names().to_vec(),
            stacks: rl.stack_names().to_vec(),
            app: paks
                .app_table()
                .iter()
                .map(|row| row.iter().map(|&t| term(t)).collect())
                .collect(),
            push: paks
                .push_table()
                .rows()
                .iter()
                .map(|row| row.iter().map(|&s| stack(s)).collect())
                .collect(),
            save: paks.save_table().iter().map(|&t| term(t)).collect(),
            k: term(paks.k()),
            s: term(paks.s()),
            cc: term(paks.cc()),
            pole: rl
                .pole_pairs()
                .into_iter()
                .map(|(t, s)| (term(t), stack(s)))
                .collect(),
            qp: None,
        }
    }

    pub fn from_aks(aks: &FiniteAks) -> InstanceDoc {
        let mut doc = Self::from_paks(aks.paks());
        doc.qp = Some(
            aks.qp()
                .iter()
                .map(|t| aks.paks().rl().term_name(t).to_string())
                .collect(),
        );
        doc
    }
}

fn lookup(names: &[String], name: &str, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::SchemaError(format!("{what} references unknown name {name}")))
}

/// On-disk form of a finite model: an algebra snapshot, base-kind sizes, and
/// constant interpretations (atoms as numbers, functions as nested arrays).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub oca: TableOca,
    #[serde(default)]
    pub kinds: BTreeMap<String, usize>,
    #[serde(default)]
    pub consts: BTreeMap<String, ConstDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_space: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstDoc {
    pub kind: String,
    pub value: serde_json::Value,
}

impl ModelDoc {
    pub fn parse(text: &str) -> Result<ModelDoc> {
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))
    }

    /// Build the model borrowing this document's algebra tables.
    pub fn to_model(&self) -> Result<Model<'_, TableOca>> {
        self.oca.validate()?;
        let mut model = Model::new(&self.oca);
        if let Some(bound) = self.max_space {
            model.max_space = bound;
        }
        for (name, size) in &self.kinds {
            model.kind_sizes.insert(name.clone(), *size);
        }
        for (name, doc) in &self.consts {
            let kind = syntax::parse_kind(&doc.kind)?;
            let value = value_from_json(&doc.value)?;
            model.consts.insert(name.clone(), (kind, value));
        }
        model.validate()?;
        Ok(model)
    }

    /// Formula-parsing symbols: every interpreted constant with its kind.
    pub fn symbols(&self) -> Result<Symbols> {
        let mut symbols = Symbols::default();
        for (name, doc) in &self.consts {
            symbols
                .consts
                .insert(name.clone(), syntax::parse_kind(&doc.kind)?);
        }
        Ok(symbols)
    }
}

pub fn value_from_json(v: &serde_json::Value) -> Result<Value> {
    match v {
        serde_json::Value::Number(n) => {
            let i = n
                .as_u64()
                .ok_or_else(|| Error::SchemaError(format!("bad atom {n}")))?;
            Ok(Value::Atom(i as usize))
        }
        serde_json::Value::Array(items) => Ok(Value::Func(
            items
                .iter()
                .map(value_from_json)
                .collect::<Result<Vec<_>>>()?,
        )),
        other => Err(Error::SchemaError(format!(
            "constant values are numbers or arrays, found {other}"
        ))),
    }
}

pub fn value_to_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Atom(i) => serde_json::Value::from(*i),
        Value::Func(table) => serde_json::Value::Array(table.iter().map(value_to_json).collect()),
    }
}
