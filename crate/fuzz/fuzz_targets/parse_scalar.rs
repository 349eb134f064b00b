#![no_main]
use abelia::input::{parse_scalar, parse_scalar_str, scalar_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(z) = parse_scalar_str(data) {
        assert_eq!(parse_scalar(&scalar_to_json(&z), "$").ok(), Some(z));
    }
});
