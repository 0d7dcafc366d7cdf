#![no_main]
use bicutan::stats::input::{read_blocks, read_groups, read_points};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_groups(data);
    let _ = read_blocks(data);
    let _ = read_points(data);
});
