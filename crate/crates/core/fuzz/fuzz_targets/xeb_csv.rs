#![no_main]

use libfuzzer_sys::fuzz_target;
use rcs_bounds::xeb::read_xeb_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_xeb_csv(data);
});
