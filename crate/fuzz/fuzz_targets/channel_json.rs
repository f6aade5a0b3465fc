//! Channel-spec decoding and downstream validation must never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

use dichannel::channel::ChannelSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = serde_json::from_str::<ChannelSpec>(text) else {
        return;
    };
    let affine = spec.to_affine();
    if affine.a.0.iter().flatten().chain(affine.b.0.iter()).any(|v| !v.is_finite()) {
        return;
    }
    let _ = spec.validate();
    let _ = affine.choi_min_eigenvalue();
    let _ = affine.canonicalize(1e-6);
});
