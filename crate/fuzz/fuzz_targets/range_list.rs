#![no_main]

use desk_notary::notarize::Range;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for part in text.split(',') {
        if let Ok(r) = part.parse::<Range>() {
            assert_eq!(r.to_string().parse::<Range>(), Ok(r));
        }
    }
});
