#![allow(dead_code)]

use std::path::PathBuf;

use passage_core::io::{read_table, Format};
use passage_core::TransitionCountTable;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn life_table() -> TransitionCountTable {
    let text = std::fs::read_to_string(data_path("eratyrus.counts")).unwrap();
    read_table(&text, Format::Generic).unwrap()
}

pub fn life_table_stages() -> TransitionCountTable {
    let text = std::fs::read_to_string(data_path("eratyrus.stages")).unwrap();
    read_table(&text, Format::Stage).unwrap()
}
