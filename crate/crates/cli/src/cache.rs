//! Versioned on-disk cache of computed global-basis entries, keyed by the
//! Cartan datum and the reduced word. Entries store the P-expansion of each
//! element; the elements themselves are rebuilt on load.

use std::path::Path;

use num::bigint::BigInt;
use serde::{Deserialize, Serialize};

use bosonext::cartan::CartanDatum;
use bosonext::globalbasis::{ExtCrystalIndex, GlobalBasis};
use bosonext::scalars::{LaurentHalf, RatFunc};

use crate::CliError;

pub const CACHE_VERSION: &str = "bosonext-cache-v1";

#[derive(Serialize, Deserialize)]
struct CoeffJson(Vec<(i64, String)>);

#[derive(Serialize, Deserialize)]
struct IndexJson(Vec<(i32, Vec<usize>)>);

#[derive(Serialize, Deserialize)]
struct EntryJson {
    index: IndexJson,
    expansion: Vec<(IndexJson, CoeffJson)>,
}

#[derive(Serialize, Deserialize)]
pub struct CacheFile {
    version: String,
    cartan_matrix: Vec<Vec<i64>>,
    symmetrizer: Vec<i64>,
    reduced_word: Vec<usize>,
    entries: Vec<EntryJson>,
}

fn index_to_json(b: &ExtCrystalIndex) -> IndexJson {
    IndexJson(b.entries.iter().map(|(k, v)| (*k, v.clone())).collect())
}

fn index_from_json(j: &IndexJson) -> ExtCrystalIndex {
    let mut b = ExtCrystalIndex::unit();
    for (k, v) in &j.0 {
        b.insert(*k, v.clone());
    }
    b
}

fn coeff_to_json(c: &RatFunc) -> Result<CoeffJson, CliError> {
    if !c.is_integer_laurent() {
        return Err(CliError::computation("cache coefficients must be integer Laurent"));
    }
    Ok(CoeffJson(c.num().iter().map(|(e, x)| (*e, x.to_string())).collect()))
}

fn coeff_from_json(j: &CoeffJson) -> Result<RatFunc, CliError> {
    let pairs: Result<Vec<(i64, BigInt)>, CliError> = j
        .0
        .iter()
        .map(|(e, s)| {
            s.parse::<BigInt>()
                .map(|c| (*e, c))
                .map_err(|_| CliError::computation("bad integer in cache"))
        })
        .collect();
    Ok(RatFunc::from_laurent(LaurentHalf::from_pairs(pairs?)))
}

pub fn save(
    path: &Path,
    cartan: &CartanDatum,
    rw: &[usize],
    gb: &GlobalBasis,
) -> Result<usize, CliError> {
    let rows = gb.export_entries();
    let entries: Result<Vec<EntryJson>, CliError> = rows
        .iter()
        .map(|(index, expansion)| {
            let expansion: Result<Vec<_>, CliError> = expansion
                .iter()
                .map(|(b, c)| Ok((index_to_json(b), coeff_to_json(c)?)))
                .collect();
            Ok(EntryJson { index: index_to_json(index), expansion: expansion? })
        })
        .collect();
    let n = cartan.rank();
    let file = CacheFile {
        version: CACHE_VERSION.to_string(),
        cartan_matrix: (0..n).map(|i| (0..n).map(|j| cartan.c(i, j)).collect()).collect(),
        symmetrizer: (0..n).map(|i| cartan.d(i)).collect(),
        reduced_word: rw.to_vec(),
        entries: entries?,
    };
    let text = serde_json::to_string(&file)
        .map_err(|e| CliError::computation(format!("cache serialization: {e}")))?;
    let count = file.entries.len();
    std::fs::write(path, text)
        .map_err(|e| CliError::computation(format!("cannot write cache: {e}")))?;
    Ok(count)
}

/// Load entries matching the key; a stale or mismatching cache is ignored.
pub fn load(
    path: &Path,
    cartan: &CartanDatum,
    rw: &[usize],
    gb: &GlobalBasis,
) -> Result<usize, CliError> {
    let Ok(text) = std::fs::read_to_string(path) else {
        return Ok(0);
    };
    let Ok(file) = serde_json::from_str::<CacheFile>(&text) else {
        return Ok(0);
    };
    let n = cartan.rank();
    let matrix: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| cartan.c(i, j)).collect()).collect();
    let sym: Vec<i64> = (0..n).map(|i| cartan.d(i)).collect();
    if file.version != CACHE_VERSION
        || file.cartan_matrix != matrix
        || file.symmetrizer != sym
        || file.reduced_word != rw
    {
        return Ok(0);
    }
    let rows: Result<Vec<_>, CliError> = file
        .entries
        .iter()
        .map(|e| {
            let expansion: Result<Vec<_>, CliError> = e
                .expansion
                .iter()
                .map(|(b, c)| Ok((index_from_json(b), coeff_from_json(c)?)))
                .collect();
            Ok((index_from_json(&e.index), expansion?))
        })
        .collect();
    Ok(gb.import_entries(rows?)?)
}
