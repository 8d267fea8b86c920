#![no_main]

use libfuzzer_sys::fuzz_target;
use psd::harness::io::parse_instance_json;

fuzz_target!(|data: &[u8]| {
    let _ = parse_instance_json(data);
});
