#![no_main]

use libfuzzer_sys::fuzz_target;
use rcs_bounds::fidmodel::{fit, read_dataset_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(ds) = read_dataset_csv(data) {
        if let Ok(report) = fit(&ds) {
            assert_eq!(report.residuals.len(), ds.records.len());
        }
    }
});
