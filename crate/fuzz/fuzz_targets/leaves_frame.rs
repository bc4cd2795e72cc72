#![no_main]

use desk_notary::notarize::{decode_leaves, encode_leaves};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(leaves) = decode_leaves(data) {
        assert_eq!(encode_leaves(&leaves), data);
    }
});
