#![no_main]

use libfuzzer_sys::fuzz_target;
use optophase::sweep::decode_sweep_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sweep) = decode_sweep_csv(text) {
            let _ = sweep.to_csv();
            let _ = sweep.to_json();
        }
    }
});
