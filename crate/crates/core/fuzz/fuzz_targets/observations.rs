#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = bicutan::demand::ingest_observations(data) {
        for r in &records {
            assert!(r.exit_time_s > r.entry_time_s);
        }
    }
});
