#![no_main]

use desk_notary::transport::PartyMessage;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = PartyMessage::decode(data) {
        assert_eq!(m.encode(), data);
    }
});
