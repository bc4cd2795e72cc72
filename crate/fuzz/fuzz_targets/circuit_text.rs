#![no_main]

use desk_notary::circuits::{parse_circuit, serialize_circuit};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_circuit(text) {
        let again = parse_circuit(&serialize_circuit(&c)).expect("serialized circuit parses");
        assert_eq!(again, c);
    }
});
