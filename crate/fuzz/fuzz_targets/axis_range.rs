//! Arbitrary strings through the `start:stop:count` axis parser; any
//! accepted axis must materialise its points without panicking.

#![no_main]

use isidec_cli::config::AxisSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(axis) = text.parse::<AxisSpec>() {
        let values = axis.values();
        assert_eq!(values.len(), axis.count);
        assert!(values.iter().all(|v| v.is_finite()));
    }
});
