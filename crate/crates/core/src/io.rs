//! Reading and writing datasets (CSV), hierarchies and categories (JSON).

use std::collections::HashSet;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::dataset::{format_weight, parse_weight, AttributeSchema, Dataset, Dimension, Instance};
use crate::error::{Error, Result};
use crate::hierarchy::{Category, Hierarchy, Level};
use crate::Rational;

const ID_COLUMN: &str = "id";
const WEIGHT_COLUMN: &str = "weight";

/// Parses a comma-separated dataset. The header names the attribute
/// dimensions; optional `id` and `weight` columns are reserved. Values of a
/// dimension are ordered by first appearance. Rows without an `id` column are
/// named by their 1-based row number.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_line, header) = lines.next().ok_or(Error::Csv {
        line: 1,
        message: "missing header row".into(),
    })?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();

    let mut seen = HashSet::new();
    let mut id_col = None;
    let mut weight_col = None;
    let mut dim_cols = Vec::new();
    for (col, &name) in names.iter().enumerate() {
        let csv_err = |message: String| Error::Csv {
            line: header_line,
            message,
        };
        if name.is_empty() {
            return Err(csv_err(format!("column {} has an empty name", col + 1)));
        }
        if !seen.insert(name) {
            return Err(csv_err(format!("duplicate column `{name}`")));
        }
        match name {
            ID_COLUMN => id_col = Some(col),
            WEIGHT_COLUMN => weight_col = Some(col),
            _ => dim_cols.push(col),
        }
    }
    if dim_cols.is_empty() {
        return Err(Error::Csv {
            line: header_line,
            message: "no attribute columns".into(),
        });
    }

    let mut values: Vec<Vec<String>> = vec![Vec::new(); dim_cols.len()];
    let mut instances = Vec::new();
    let mut ids = HashSet::new();
    for (row, (line_no, line)) in lines.enumerate() {
        let err = |message: String| Error::Csv {
            line: line_no,
            message,
        };
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != names.len() {
            return Err(err(format!(
                "ragged row: {} cells under {} headers",
                cells.len(),
                names.len()
            )));
        }
        if let Some(col) = cells.iter().position(|c| c.is_empty()) {
            return Err(err(format!("empty cell in column `{}`", names[col])));
        }
        let id = match id_col {
            Some(col) => cells[col].to_string(),
            None => (row + 1).to_string(),
        };
        if !ids.insert(id.clone()) {
            return Err(err(format!("duplicate id `{id}`")));
        }
        let weight = match weight_col {
            Some(col) => parse_weight(cells[col]).map_err(|_| {
                err(format!(
                    "invalid weight `{}` (expected a nonnegative number)",
                    cells[col]
                ))
            })?,
            None => Rational::one(),
        };
        let vals = dim_cols
            .iter()
            .zip(values.iter_mut())
            .map(|(&col, seen)| {
                let cell = cells[col];
                seen.iter().position(|v| v == cell).unwrap_or_else(|| {
                    seen.push(cell.to_string());
                    seen.len() - 1
                })
            })
            .collect();
        instances.push(Instance::new(id, vals).with_weight(weight));
    }
    if instances.is_empty() {
        return Err(Error::Csv {
            line: header_line,
            message: "no data rows".into(),
        });
    }
    let schema = AttributeSchema::new(
        dim_cols
            .iter()
            .zip(values)
            .map(|(&col, vals)| Dimension::new(names[col], vals))
            .collect(),
    )?;
    Dataset::new(schema, instances)
}

/// Writes a dataset so that [`parse_dataset`] reads it back unchanged. The
/// `weight` column is written only when some weight differs from 1.
pub fn dataset_to_csv(d: &Dataset) -> String {
    let weighted = !d.has_unit_weights();
    let mut header = vec![ID_COLUMN.to_string()];
    if weighted {
        header.push(WEIGHT_COLUMN.into());
    }
    header.extend(d.schema().dimensions().iter().map(|dim| dim.name.clone()));
    let mut out = header.join(",");
    out.push('\n');
    for inst in d.instances() {
        let mut row = vec![inst.id.clone()];
        if weighted {
            row.push(format_weight(&inst.weight));
        }
        row.extend(
            inst.values
                .iter()
                .enumerate()
                .map(|(k, &v)| d.schema().dimension(k).values[v].clone()),
        );
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct CategoryFile {
    name: String,
    members: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LevelFile {
    name: String,
    categories: Vec<CategoryFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct HierarchyFile {
    levels: Vec<LevelFile>,
}

fn category_from_file(d: &Dataset, c: CategoryFile, context: &str) -> Result<Category> {
    Category::from_ids(d, c.name.clone(), &c.members).map_err(|e| match e {
        Error::UnknownId(id) => Error::Hierarchy(format!(
            "{context}category `{}`: unknown instance id `{id}`",
            c.name
        )),
        Error::Hierarchy(msg) => Error::Hierarchy(format!("{context}category `{}`: {msg}", c.name)),
        other => other,
    })
}

/// Parses a hierarchy file
/// `{"levels":[{"name":..,"categories":[{"name":..,"members":[ids]}]}]}`
/// (most general level first) and validates it against `d`.
pub fn parse_hierarchy(text: &str, d: &Dataset) -> Result<Hierarchy> {
    let file: HierarchyFile = serde_json::from_str(text)?;
    let levels = file
        .levels
        .into_iter()
        .map(|l| {
            let context = format!("level `{}`, ", l.name);
            let categories = l
                .categories
                .into_iter()
                .map(|c| category_from_file(d, c, &context))
                .collect::<Result<Vec<_>>>()?;
            Ok(Level::new(l.name, categories))
        })
        .collect::<Result<Vec<_>>>()?;
    Hierarchy::new(d, levels)
}

pub fn hierarchy_to_json(d: &Dataset, h: &Hierarchy) -> String {
    let file = HierarchyFile {
        levels: h
            .levels()
            .iter()
            .map(|l| LevelFile {
                name: l.name.clone(),
                categories: l.categories.iter().map(|c| category_file(d, c)).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("hierarchy serializes") + "\n"
}

fn category_file(d: &Dataset, c: &Category) -> CategoryFile {
    CategoryFile {
        name: c.name().to_string(),
        members: c.ids(d).map(str::to_string).collect(),
    }
}

/// Parses a single category `{"name":..,"members":[ids]}`.
pub fn parse_category(text: &str, d: &Dataset) -> Result<Category> {
    let file: CategoryFile = serde_json::from_str(text)?;
    category_from_file(d, file, "")
}

pub fn category_to_json(d: &Dataset, c: &Category) -> String {
    serde_json::to_string_pretty(&category_file(d, c)).expect("category serializes") + "\n"
}
