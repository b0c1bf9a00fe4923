//! Raw bytes reinterpreted as input/output blocks (including NaN and
//! infinity bit patterns) through the lattice estimator: it may reject,
//! but it must never panic.

#![no_main]

use isidec::grid::{estimate_isi_type, residual_correlations, ParamGrid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let n = 16 + (data[0] as usize % 49); // 16..=64
    let isi_len = data[1] as usize % 4; // fitted memory 0..=3
    let mut values = data[2..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")));
    let x: Vec<f64> = (0..n).map(|_| values.next().unwrap_or(0.5)).collect();
    let y: Vec<f64> = (0..n + isi_len).map(|_| values.next().unwrap_or(0.0)).collect();

    let Ok(mut grid) = ParamGrid::for_block_len(n) else {
        return;
    };
    grid.isi_len = isi_len;
    if let Ok(est) = estimate_isi_type(&x, &y, &grid) {
        assert!(est.h_hat.taps().iter().all(|t| t.abs() < grid.tap_bound));
        let _ = est.params();
        let _ = residual_correlations(&x, &y, &est.h_hat);
    }
});
