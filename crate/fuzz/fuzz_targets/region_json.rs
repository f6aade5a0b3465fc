//! Region decoding and its geometric queries must never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

use dichannel::geometry::{CorrelationPoint, Region};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(region) = serde_json::from_str::<Region>(text) else {
        return;
    };
    let finite = region
        .directions
        .iter()
        .chain(region.vertices.iter())
        .flatten()
        .chain(region.support_values.iter())
        .all(|v| v.is_finite());
    if !finite {
        return;
    }
    let _ = region.area();
    let _ = region.margin(&CorrelationPoint::new(0.25, 0.75));
    let _ = region.intersect_area(&region.clone());
    let mut buf = Vec::new();
    let _ = region.write_csv(&mut buf);
});
