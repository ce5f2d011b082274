//! JSON documents shared by the command line tool.
//!
//! Tensors and supports use one schema,
//! `{"shape":[a,b,c],"entries":[{"idx":[i,j,k],"coef":"p/q"}, ...]}`, where a
//! support omits every `coef`. Witnesses are `{"tauA":[..],"tauB":[..],"tauC":[..]}`.
//! Output is canonical: entries sorted by index, coefficients reduced with a
//! positive denominator.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::deciders::TightWitness;
use crate::error::{Error, Result};
use crate::tensor::{format_rational, parse_rational, Shape, Support, Tensor, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    idx: Triple,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coef: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentJson {
    shape: [usize; 3],
    entries: Vec<EntryJson>,
}

/// A parsed document: a support when no entry carries a coefficient, else a tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Support(Support),
    Tensor(Tensor),
}

impl Document {
    pub fn support(&self) -> Support {
        match self {
            Document::Support(s) => s.clone(),
            Document::Tensor(t) => t.support(),
        }
    }

    /// A support reads as the tensor with coefficient one on each of its triples.
    pub fn tensor(&self) -> Tensor {
        match self {
            Document::Support(s) => Tensor::from_support(s),
            Document::Tensor(t) => t.clone(),
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        match self {
            Document::Support(s) => support_to_value(s),
            Document::Tensor(t) => tensor_to_value(t),
        }
    }
}

pub fn support_to_value(s: &Support) -> serde_json::Value {
    let doc = DocumentJson {
        shape: s.shape().dims(),
        entries: s.iter().map(|&idx| EntryJson { idx, coef: None }).collect(),
    };
    serde_json::to_value(doc).expect("plain data serializes")
}

pub fn tensor_to_value(t: &Tensor) -> serde_json::Value {
    let doc = DocumentJson {
        shape: t.shape().dims(),
        entries: t
            .entries()
            .iter()
            .map(|(&idx, c)| EntryJson { idx, coef: Some(format_rational(c)) })
            .collect(),
    };
    serde_json::to_value(doc).expect("plain data serializes")
}

/// Parses a document. Rejects mixed entries, repeated indices and zero coefficients.
pub fn parse_document(text: &str) -> Result<Document> {
    let doc: DocumentJson = serde_json::from_str(text)?;
    let [a, b, c] = doc.shape;
    let shape = Shape::new(a, b, c)?;
    let mut seen = BTreeSet::new();
    if let Some(e) = doc.entries.iter().find(|e| !seen.insert(e.idx)) {
        return Err(Error::InvalidInput(format!("index {:?} listed twice", e.idx)));
    }
    let with_coef = doc.entries.iter().filter(|e| e.coef.is_some()).count();
    if with_coef == 0 {
        return Ok(Document::Support(Support::new(shape, doc.entries.iter().map(|e| e.idx))?));
    }
    if with_coef != doc.entries.len() {
        return Err(Error::InvalidInput("either every entry has a coef or none does".into()));
    }
    let mut t = Tensor::zero(shape);
    for e in &doc.entries {
        let coef = parse_rational(e.coef.as_deref().expect("checked above"))?;
        if num::Zero::is_zero(&coef) {
            return Err(Error::InvalidInput(format!("zero coefficient at {:?}", e.idx)));
        }
        t.add_term(e.idx, coef)?;
    }
    Ok(Document::Tensor(t))
}

pub fn read_document(path: &Path) -> Result<Document> {
    parse_document(&std::fs::read_to_string(path)?)
}

/// Parses a witness and checks injectivity, which deserialization alone does not.
pub fn parse_witness(text: &str) -> Result<TightWitness> {
    let raw: TightWitness = serde_json::from_str(text)?;
    TightWitness::new(raw.tau_a().to_vec(), raw.tau_b().to_vec(), raw.tau_c().to_vec())
}

pub fn read_witness(path: &Path) -> Result<TightWitness> {
    parse_witness(&std::fs::read_to_string(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    std::fs::write(path, to_pretty(value)?)?;
    Ok(())
}


#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;
    use crate::deciders::decide_tight;
    use crate::strategies::{support, tensor};

    proptest! {
        #[test]
        fn documents_round_trip(s in support(4), t in tensor(3)) {
            let text = to_pretty(&support_to_value(&s)).unwrap();
            prop_assert_eq!(parse_document(&text).unwrap(), Document::Support(s.clone()));
            if t.nnz() > 0 {
                let text = to_pretty(&tensor_to_value(&t)).unwrap();
                let back = parse_document(&text).unwrap();
                prop_assert_eq!(to_pretty(&back.to_value()).unwrap(), text);
                prop_assert_eq!(back, Document::Tensor(t));
            }
            if let Some(w) = decide_tight(&s).witness() {
                prop_assert_eq!(&parse_witness(&to_pretty(w).unwrap()).unwrap(), w);
            }
        }
    }
}
