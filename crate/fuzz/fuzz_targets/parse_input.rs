#![no_main]
use abelia::input::InputDescription;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(input) = InputDescription::parse(data) {
        let _ = input.build();
        assert_eq!(InputDescription::parse(&input.to_json_string()).ok(), Some(input));
    }
});
