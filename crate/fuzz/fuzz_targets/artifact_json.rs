//! Result artifacts (verdicts, class reports, fit reports) must decode
//! without panicking and re-serialize.

#![no_main]

use libfuzzer_sys::fuzz_target;

use dichannel::estimate::FitReport;
use dichannel::protocol::{ClassReport, Verdict};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = serde_json::from_str::<Verdict>(text) {
        let _ = serde_json::to_string(&v);
    }
    if let Ok(c) = serde_json::from_str::<ClassReport>(text) {
        let _ = serde_json::to_string(&c);
    }
    if let Ok(f) = serde_json::from_str::<FitReport>(text) {
        let _ = serde_json::to_string(&f);
    }
});
