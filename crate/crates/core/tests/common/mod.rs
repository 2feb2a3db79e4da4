#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DVector;
use sweeping::scenario::{load_scenario, Prepared};

pub fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn corpus(name: &str) -> Prepared {
    load_scenario(&corpus_dir().join(format!("{name}.json"))).expect("corpus scenario parses")
}

pub fn corpus_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "json").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

/// Closed-form projection onto `Ball(c, r)`.
pub fn ball_projection(c: &DVector<f64>, r: f64, x: &DVector<f64>) -> DVector<f64> {
    let d = x - c;
    let n = d.norm();
    if n <= r {
        x.clone()
    } else {
        c + d * (r / n)
    }
}

/// `e(Ball(c1, r1), Ball(c2, r2)) = max(0, ‖c1 − c2‖ + r1 − r2)`.
pub fn ball_excess(c1: &DVector<f64>, r1: f64, c2: &DVector<f64>, r2: f64) -> f64 {
    ((c1 - c2).norm() + r1 - r2).max(0.0)
}
