#![no_main]

use libfuzzer_sys::fuzz_target;
use rcs_bounds::fidmodel::{extrapolate_error, read_trend_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(trend) = read_trend_csv(data) {
        let _ = extrapolate_error(&trend, 2030.0, None);
    }
});
