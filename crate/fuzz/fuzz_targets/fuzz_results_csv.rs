#![no_main]

use libfuzzer_sys::fuzz_target;
use mm_access::harness::{parse_results_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(first) = parse_results_csv(text) else {
        return;
    };
    let mut a = Vec::new();
    if write_csv(&first.rows, &first.metadata, &mut a).is_err() {
        return;
    }
    // Re-emitting parsed output is a fixed point.
    let second = parse_results_csv(std::str::from_utf8(&a).unwrap()).expect("own output parses");
    let mut b = Vec::new();
    write_csv(&second.rows, &second.metadata, &mut b).unwrap();
    let third = parse_results_csv(std::str::from_utf8(&b).unwrap()).unwrap();
    let mut c = Vec::new();
    write_csv(&third.rows, &third.metadata, &mut c).unwrap();
    assert_eq!(b, c);
});
