#![no_main]

use desk_notary::record::EncryptedRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = EncryptedRecord::decode(data) {
        assert_eq!(r.encode(), data);
    }
});
