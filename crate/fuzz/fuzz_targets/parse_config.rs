#![no_main]

use libfuzzer_sys::fuzz_target;
use optophase::config::parse_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config(text) {
            // Accepted files must either resolve or fail validation cleanly.
            let _ = cfg.resolve();
        }
    }
});
