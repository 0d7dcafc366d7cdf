#![no_main]
use bicutan::harness::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

// Anything that parses must survive a render/parse round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = ScenarioConfig::parse(text) {
        assert_eq!(ScenarioConfig::parse(&c.render()).unwrap(), c);
    }
});
