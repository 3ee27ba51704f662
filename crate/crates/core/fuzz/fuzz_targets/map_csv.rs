#![no_main]

use libfuzzer_sys::fuzz_target;
use rcs_bounds::frontier::{parse_map_csv, write_contours_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(map) = parse_map_csv(data) {
        let mut out = Vec::new();
        write_contours_json(&map, 3.15e9, &mut out).unwrap();
    }
});
