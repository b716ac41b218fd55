//! Replays the checked-in fuzz seeds through the parsers.

use std::fs;
use std::path::PathBuf;

use mm_access::harness::{parse_config, parse_results_csv, sweep_spec, write_csv};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds() {
    let rejected = ["bad_count.cfg", "duplicate.cfg", "huge_range.cfg"];
    for (path, text) in seeds("fuzz_config") {
        let name = path.file_name().unwrap().to_str().unwrap();
        match parse_config(&text) {
            Ok(cfg) => {
                assert!(!rejected.contains(&name), "{name} parsed");
                sweep_spec(&cfg).validate().unwrap();
            }
            Err(e) => assert!(rejected.contains(&name), "{name}: {e}"),
        }
    }
}

#[test]
fn results_csv_seeds_reach_a_fixed_point() {
    let mut parsed = 0;
    for (_, text) in seeds("fuzz_results_csv") {
        let Ok(first) = parse_results_csv(&text) else {
            continue;
        };
        parsed += 1;
        let mut a = Vec::new();
        write_csv(&first.rows, &first.metadata, &mut a).unwrap();
        let second = parse_results_csv(std::str::from_utf8(&a).unwrap()).unwrap();
        let mut b = Vec::new();
        write_csv(&second.rows, &second.metadata, &mut b).unwrap();
        assert_eq!(a, b);
    }
    assert_eq!(parsed, 2);
}
