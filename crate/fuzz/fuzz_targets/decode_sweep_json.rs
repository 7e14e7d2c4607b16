#![no_main]

use libfuzzer_sys::fuzz_target;
use optophase::sweep::decode_sweep_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sweep) = decode_sweep_json(text) {
            let again = decode_sweep_json(&sweep.to_json().expect("decoded JSON holds finite values"));
            assert_eq!(again.ok().as_ref(), Some(&sweep));
        }
    }
});
