#![no_main]

use desk_notary::garble::GarbledCircuit;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(gc) = GarbledCircuit::from_bytes(data) {
        assert_eq!(gc.to_bytes(), data);
    }
});
