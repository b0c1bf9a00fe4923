//! Arbitrary strings through the comma-separated tap parser; accepted
//! taps are pushed through the spectral helpers, which must stay total.

#![no_main]

use isidec::spectral::{autocorrelation, spectral_density, IsiVector};
use isidec_cli::config::TapList;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(TapList(taps)) = text.parse::<TapList>() else {
        return;
    };
    if taps.len() > 64 {
        return;
    }
    let h = IsiVector::new(taps).expect("parser only accepts finite, non-empty taps");
    let r = autocorrelation(&h);
    assert!(r.zero_lag() >= 0.0);
    for xi in [0.0, 0.7, 2.9] {
        assert!(spectral_density(&h, xi) >= 0.0);
    }
});
