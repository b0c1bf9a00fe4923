//! Raw bytes reinterpreted as a codebook and a received block through
//! the blind decoder; decoding may fail on degenerate input, but it must
//! never panic.

#![no_main]

use isidec::channel::Codebook;
use isidec::decoder::decode_mmi;
use isidec::grid::ParamGrid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() < 3 {
        return;
    }
    let n = 16 + (data[0] as usize % 17); // 16..=32
    let m = 1 + (data[1] as usize % 4); // 1..=4 messages
    let isi_len = data[2] as usize % 3;
    let mut values = data[3..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")));

    let words: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| values.next().unwrap_or(0.1)).collect())
        .collect();
    let Ok(cb) = Codebook::from_words(words, 0) else {
        return;
    };
    let y: Vec<f64> = (0..n + isi_len).map(|_| values.next().unwrap_or(0.0)).collect();

    let Ok(mut grid) = ParamGrid::for_block_len(n) else {
        return;
    };
    grid.isi_len = isi_len;
    if let Ok(outcome) = decode_mmi(&y, &cb, &grid) {
        assert_eq!(outcome.scores.len(), cb.num_words());
        let _ = outcome.winner();
    }
});
