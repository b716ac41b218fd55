#![no_main]

use libfuzzer_sys::fuzz_target;
use mm_access::harness::{parse_config, sweep_spec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config(text) {
        // Validation must reject bad combinations without panicking.
        let _ = sweep_spec(&cfg).validate();
    }
});
