#![no_main]

use libfuzzer_sys::fuzz_target;
use rcs_bounds::costmodel::HardwareProfile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = HardwareProfile::from_json(text) {
        let again = HardwareProfile::from_json(&p.to_json().unwrap()).expect("written profile must parse");
        assert_eq!(again, p);
    }
});
