#![no_main]

use libfuzzer_sys::fuzz_target;
use psd::harness::io::parse_poly_json;

fuzz_target!(|data: &[u8]| {
    // the polynomial record parser must never panic on any input
    let _ = parse_poly_json(data);
});
