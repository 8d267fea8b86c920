#![no_main]

use libfuzzer_sys::fuzz_target;
use psd::harness::io::parse_components_json;

fuzz_target!(|data: &[u8]| {
    let _ = parse_components_json(data);
});
