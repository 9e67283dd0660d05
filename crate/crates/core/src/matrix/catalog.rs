//! The evaluation suite: SuiteSparse matrices with their collection group,
//! declared pattern and expected dimensions, plus the generated matrices.

use crate::model::Pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// SuiteSparse group, or `None` for generated matrices.
    pub group: Option<&'static str>,
    pub pattern: Pattern,
    pub n: u64,
    /// Entry count after symmetric expansion.
    pub nnz: u64,
}

const fn ss(
    name: &'static str,
    group: &'static str,
    pattern: Pattern,
    n: u64,
    nnz: u64,
) -> CatalogEntry {
    CatalogEntry {
        name,
        group: Some(group),
        pattern,
        n,
        nnz,
    }
}

const fn generated(name: &'static str, pattern: Pattern, n: u64, nnz: u64) -> CatalogEntry {
    CatalogEntry {
        name,
        group: None,
        pattern,
        n,
        nnz,
    }
}

pub const CATALOG: &[CatalogEntry] = &[
    ss(
        "road_usa",
        "DIMACS10",
        Pattern::Blocked,
        23_947_347,
        57_708_624,
    ),
    ss(
        "hugebubbles-00010",
        "DIMACS10",
        Pattern::Blocked,
        19_458_087,
        58_359_528,
    ),
    ss(
        "asia_osm",
        "DIMACS10",
        Pattern::Blocked,
        11_950_757,
        25_423_206,
    ),
    ss("333SP", "DIMACS10", Pattern::Blocked, 3_712_815, 22_217_266),
    ss(
        "com-Orkut",
        "SNAP",
        Pattern::ScaleFree,
        3_072_441,
        234_370_166,
    ),
    ss(
        "com-LiveJournal",
        "SNAP",
        Pattern::ScaleFree,
        3_997_962,
        69_362_378,
    ),
    ss(
        "uk-2002",
        "LAW",
        Pattern::ScaleFree,
        18_520_486,
        298_113_762,
    ),
    ss("rajat31", "Rajat", Pattern::Diagonal, 4_690_002, 20_316_253),
    generated("ideal_diagonal_22", Pattern::Diagonal, 4_194_304, 4_194_304),
    generated("er_22_1", Pattern::Random, 4_194_304, 4_194_304),
    generated("er_22_10", Pattern::Random, 4_194_304, 41_942_990),
    generated("er_22_20", Pattern::Random, 4_194_304, 83_885_880),
];

pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}
