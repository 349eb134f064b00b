#![no_main]
use abelia::report::ReportDocument;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = ReportDocument::parse(data);
});
