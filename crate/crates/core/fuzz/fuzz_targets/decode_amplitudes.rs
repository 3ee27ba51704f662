#![no_main]

use libfuzzer_sys::fuzz_target;
use rcs_bounds::statevec::{decode_amplitudes, write_amplitudes, SimConfig};

fuzz_target!(|data: &[u8]| {
    let cfg = SimConfig { max_qubits: 12 };
    if let Ok(state) = decode_amplitudes(data, &cfg) {
        let mut out = Vec::new();
        write_amplitudes(&state, &mut out).unwrap();
        assert_eq!(out.len(), data.len());
    }
});
