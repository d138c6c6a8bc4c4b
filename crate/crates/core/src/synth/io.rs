//! Dataset directory format:
//!
//! - `providers.csv`: `provider_id,v_e,v_b,y`
//! - `catalog.csv`: `item_id,provider_id`
//! - `relevance.csv`: `user_id,item_id,relevance` (sparse)
//!
//! External ids are arbitrary strings mapped to dense indices in order of
//! first appearance. Reals are written with 17 significant digits.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::domain::{Catalog, ItemId, ProviderId, ProviderProfile, RelevanceTable, UserId};
use crate::error::{Error, Result};

use super::Dataset;

pub const PROVIDERS_FILE: &str = "providers.csv";
pub const CATALOG_FILE: &str = "catalog.csv";
pub const RELEVANCE_FILE: &str = "relevance.csv";

/// What to do with relevance values above 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RescalePolicy {
    /// Divide the offending user's whole row by its maximum.
    #[default]
    RescaleRow,
    /// Reject the file.
    Strict,
}

pub(crate) fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn load_err(path: &Path, row: usize, msg: impl Into<String>) -> Error {
    Error::Load {
        path: path.to_path_buf(),
        row,
        msg: msg.into(),
    }
}

fn open(dir: &Path, name: &str, header: &[&str]) -> Result<(PathBuf, csv::Reader<fs::File>)> {
    let path = dir.join(name);
    let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(load_err(
            &path,
            1,
            format!("expected header '{}', found '{}'", header.join(","), found.join(",")),
        ));
    }
    Ok((path, reader))
}

fn parse_real(path: &Path, row: usize, field: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| load_err(path, row, format!("{field}: '{raw}' is not a finite number")))
}

/// Reads a dataset directory. Line numbers in errors count the header as
/// line 1.
pub fn load_dataset(dir: impl AsRef<Path>, rescale: RescalePolicy) -> Result<Dataset> {
    let dir = dir.as_ref();

    let (path, mut reader) = open(dir, PROVIDERS_FILE, &["provider_id", "v_e", "v_b", "y"])?;
    let mut provider_names = Vec::new();
    let mut provider_index = HashMap::new();
    let mut profiles = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        if rec.len() != 4 {
            return Err(load_err(&path, line, "expected 4 fields"));
        }
        let name = rec[0].to_string();
        let v_e = parse_real(&path, line, "v_e", &rec[1])?;
        let v_b = parse_real(&path, line, "v_b", &rec[2])?;
        let y = parse_real(&path, line, "y", &rec[3])?;
        let prof = ProviderProfile::new(v_e, v_b, y).map_err(|e| load_err(&path, line, e.to_string()))?;
        if provider_index.insert(name.clone(), profiles.len()).is_some() {
            return Err(load_err(&path, line, format!("duplicate provider '{name}'")));
        }
        provider_names.push(name);
        profiles.push(prof);
    }

    let (path, mut reader) = open(dir, CATALOG_FILE, &["item_id", "provider_id"])?;
    let mut item_names = Vec::new();
    let mut item_index = HashMap::new();
    let mut group_of = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        if rec.len() != 2 {
            return Err(load_err(&path, line, "expected 2 fields"));
        }
        let g = *provider_index
            .get(&rec[1])
            .ok_or_else(|| load_err(&path, line, format!("unknown provider '{}'", &rec[1])))?;
        let name = rec[0].to_string();
        if item_index.insert(name.clone(), group_of.len()).is_some() {
            return Err(load_err(&path, line, format!("duplicate item '{name}'")));
        }
        item_names.push(name);
        group_of.push(ProviderId::from(g));
    }
    let catalog = Catalog::new(group_of, profiles.len()).map_err(|e| load_err(&path, 0, e.to_string()))?;

    let (path, mut reader) = open(dir, RELEVANCE_FILE, &["user_id", "item_id", "relevance"])?;
    let mut user_names: Vec<String> = Vec::new();
    let mut user_index: HashMap<String, usize> = HashMap::new();
    let mut rows: Vec<Vec<(ItemId, f64)>> = Vec::new();
    let mut first_line: Vec<usize> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        if rec.len() != 3 {
            return Err(load_err(&path, line, "expected 3 fields"));
        }
        let item = *item_index
            .get(&rec[1])
            .ok_or_else(|| load_err(&path, line, format!("unknown item '{}'", &rec[1])))?;
        let r = parse_real(&path, line, "relevance", &rec[2])?;
        if r < 0.0 {
            return Err(load_err(&path, line, format!("negative relevance {r}")));
        }
        if r > 1.0 && rescale == RescalePolicy::Strict {
            return Err(load_err(&path, line, format!("relevance {r} above 1 (strict mode)")));
        }
        let u = *user_index.entry(rec[0].to_string()).or_insert_with(|| {
            user_names.push(rec[0].to_string());
            rows.push(Vec::new());
            first_line.push(line);
            user_names.len() - 1
        });
        if rows[u].iter().any(|&(it, _)| it.index() == item) {
            return Err(load_err(&path, line, format!("duplicate pair ('{}', '{}')", &rec[0], &rec[1])));
        }
        rows[u].push((ItemId::from(item), r));
    }
    if rows.is_empty() {
        return Err(load_err(&path, 1, "no relevance rows"));
    }
    for (u, row) in rows.iter_mut().enumerate() {
        let max = row.iter().map(|&(_, r)| r).fold(0.0, f64::max);
        if max > 1.0 {
            log::warn!(
                "{}: user '{}' has relevance up to {max}; row rescaled by 1/{max}",
                path.display(),
                user_names[u]
            );
            row.iter_mut().for_each(|(_, r)| *r /= max);
        }
    }
    let relevance = RelevanceTable::from_rows(catalog.item_count(), rows)
        .map_err(|e| load_err(&path, first_line.first().copied().unwrap_or(1), e.to_string()))?;

    let mut ds = Dataset::new(catalog, profiles, relevance)?;
    ds.item_names = item_names;
    ds.provider_names = provider_names;
    ds.user_names = user_names;
    Ok(ds)
}

/// Writes the three dataset files into `dir` (created if missing). Users
/// without any nonzero relevance get one explicit zero row so they survive
/// a reload.
pub fn save_dataset(dir: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let writer = |name: &str| -> Result<csv::Writer<fs::File>> {
        let path = dir.join(name);
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(csv::Writer::from_writer(file))
    };

    let mut w = writer(PROVIDERS_FILE)?;
    w.write_record(["provider_id", "v_e", "v_b", "y"])?;
    for (name, p) in ds.provider_names.iter().zip(&ds.profiles) {
        w.write_record([name.as_str(), &real(p.v_e), &real(p.v_b), &real(p.y)])?;
    }
    w.flush().map_err(|e| Error::io(dir.join(PROVIDERS_FILE), e))?;

    let mut w = writer(CATALOG_FILE)?;
    w.write_record(["item_id", "provider_id"])?;
    for (i, name) in ds.item_names.iter().enumerate() {
        let g = ds.catalog.group_of(ItemId::from(i));
        w.write_record([name.as_str(), ds.provider_names[g.index()].as_str()])?;
    }
    w.flush().map_err(|e| Error::io(dir.join(CATALOG_FILE), e))?;

    let mut w = writer(RELEVANCE_FILE)?;
    w.write_record(["user_id", "item_id", "relevance"])?;
    for (u, user) in ds.user_names.iter().enumerate() {
        let row = ds.relevance.row(UserId::from(u));
        if row.is_empty() {
            w.write_record([user.as_str(), ds.item_names[0].as_str(), &real(0.0)])?;
        }
        for &(item, r) in row {
            w.write_record([user.as_str(), ds.item_names[item.index()].as_str(), &real(r)])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir.join(RELEVANCE_FILE), e))?;
    Ok(())
}
