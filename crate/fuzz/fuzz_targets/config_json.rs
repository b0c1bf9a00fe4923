//! Arbitrary bytes through the JSON experiment-config parser: parsing
//! may fail, but it must never panic, and anything accepted must also
//! survive validation without panicking.

#![no_main]

use isidec_cli::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = serde_json::from_str::<ExperimentConfig>(text) {
        let _ = cfg.validate();
        let _ = cfg.require_h();
        let _ = cfg.snr_db.values();
        let _ = cfg.rate_axis.values();
    }
});
