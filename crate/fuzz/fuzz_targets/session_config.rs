#![no_main]

use desk_notary::harness::SessionConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = SessionConfig::from_json(text) {
        assert_eq!(
            SessionConfig::from_json(&c.to_json()).expect("re-encoded config loads"),
            c
        );
    }
});
