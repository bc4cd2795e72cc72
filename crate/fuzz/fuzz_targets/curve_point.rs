#![no_main]

use desk_notary::algebra::Curve;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for curve in [Curve::toy(), Curve::p256()] {
        if let Ok(p) = curve.decode_point(data) {
            assert!(p.is_on_curve());
            assert_eq!(curve.decode_point(&p.encode()).expect("re-encoded point decodes"), p);
        }
    }
});
