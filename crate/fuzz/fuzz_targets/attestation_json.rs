#![no_main]

use desk_notary::notarize::{verify_attestation, Attestation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(att) = Attestation::from_json(text) {
        assert_eq!(
            Attestation::from_json(&att.to_json()).expect("re-encoded attestation loads"),
            att
        );
        // Verification must not panic on any structurally valid document.
        let _ = verify_attestation(&att, &[0u8; 32], None);
        let _ = att.redact(&[desk_notary::notarize::Range::new(0, 1)]);
    }
});
