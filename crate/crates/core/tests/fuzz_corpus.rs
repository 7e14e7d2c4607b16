//! Replays the checked-in fuzz seed corpora through the parsers.

use std::path::{Path, PathBuf};

use optophase::config::parse_config;
use optophase::sweep::{decode_sweep_csv, decode_sweep_json};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

fn accepted(p: &Path) -> bool {
    let name = p.file_stem().unwrap().to_str().unwrap();
    !matches!(name, "duplicate" | "nonfinite" | "ragged" | "future_schema")
}

#[test]
fn config_seeds() {
    for (p, text) in seeds("parse_config") {
        let r = parse_config(&text);
        assert_eq!(r.is_ok(), accepted(&p), "{}", p.display());
        if let Ok(cfg) = r {
            cfg.resolve().unwrap();
        }
    }
}

#[test]
fn csv_seeds() {
    for (p, text) in seeds("decode_sweep_csv") {
        let r = decode_sweep_csv(&text);
        assert_eq!(r.is_ok(), accepted(&p), "{}", p.display());
        if let Ok(s) = r {
            if s.rows.iter().flatten().all(|v| v.is_finite()) {
                assert_eq!(decode_sweep_csv(&s.to_csv()).unwrap(), s);
            }
        }
    }
}

#[test]
fn json_seeds() {
    for (p, text) in seeds("decode_sweep_json") {
        let r = decode_sweep_json(&text);
        assert_eq!(r.is_ok(), accepted(&p), "{}", p.display());
        if let Ok(s) = r {
            assert_eq!(decode_sweep_json(&s.to_json().unwrap()).unwrap(), s);
        }
    }
}
