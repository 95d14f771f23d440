//! JSON form of a [`VarietyModel`]. Entries are expression strings (or bare
//! integers) in the weight variables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FixedPoint, VarietyModel};
use crate::algebra::{RatFn, SquareMatrix};
use crate::error::{Error, Result};
use crate::expr::{parse_ratfn, SymbolContext};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    name: String,
    tangent: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bundle_endo: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    line_weight: Option<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    twist_weight: Option<Entry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    dim: usize,
    rank: usize,
    symbolic: bool,
    points: Vec<PointFile>,
}

fn entry_value(e: &Entry, at: &str) -> Result<RatFn> {
    match e {
        Entry::Int(n) => Ok(RatFn::from_int(*n)),
        Entry::Text(s) => parse_ratfn(s, &SymbolContext::any()).map_err(|err| match err {
            Error::Schema(_) => err,
            other => Error::Schema(format!("{at}: {other}")),
        }),
    }
}

fn matrix_value(rows: &[Vec<Entry>], at: &str) -> Result<SquareMatrix> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, e)| entry_value(e, &format!("{at}[{i}][{j}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SquareMatrix::from_rows(parsed).map_err(|e| Error::Schema(format!("{at}: {e}")))
}

fn matrix_entries(m: &SquareMatrix) -> Vec<Vec<Entry>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|e| Entry::Text(e.to_string())).collect())
        .collect()
}

pub fn model_from_json(text: &str) -> Result<VarietyModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let mut points = Vec::with_capacity(file.points.len());
    for (k, p) in file.points.iter().enumerate() {
        let at = format!("points[{k}]");
        let mut fp = FixedPoint::new(p.name.clone(), matrix_value(&p.tangent, &format!("{at}.tangent"))?);
        if let Some(b) = &p.bundle_endo {
            fp.bundle_endo = Some(matrix_value(b, &format!("{at}.bundle_endo"))?);
        }
        if let Some(w) = &p.line_weight {
            fp.line_weight = Some(entry_value(w, &format!("{at}.line_weight"))?);
        }
        if let Some(w) = &p.twist_weight {
            fp.twist_weight = Some(entry_value(w, &format!("{at}.twist_weight"))?);
        }
        points.push(fp);
    }
    let model = VarietyModel::new(file.dim, file.rank, points)?;
    if model.symbolic() && !file.symbolic {
        return Err(Error::Schema(
            "`symbolic` is false but entries contain weight variables".into(),
        ));
    }
    Ok(model)
}

pub fn model_to_json(m: &VarietyModel) -> String {
    let file = ModelFile {
        dim: m.dim(),
        rank: m.rank(),
        symbolic: m.symbolic(),
        points: m
            .points()
            .iter()
            .map(|p| PointFile {
                name: p.name.clone(),
                tangent: matrix_entries(&p.tangent),
                bundle_endo: p.bundle_endo.as_ref().map(matrix_entries),
                line_weight: p.line_weight.as_ref().map(|w| Entry::Text(w.to_string())),
                twist_weight: p.twist_weight.as_ref().map(|w| Entry::Text(w.to_string())),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("model serializes")
}

pub fn load_model(path: impl AsRef<Path>) -> Result<VarietyModel> {
    model_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_model(m: &VarietyModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model_to_json(m) + "\n")?;
    Ok(())
}
