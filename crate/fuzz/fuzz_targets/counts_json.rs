//! Counts-file decoder must never panic and accepted tables must
//! round-trip.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(counts) = dichannel::sim::read_counts_json(data) {
        let mut buf = Vec::new();
        dichannel::sim::write_counts_json(&mut buf, &counts).expect("accepted table serializes");
        let back = dichannel::sim::read_counts_json(buf.as_slice())
            .expect("serialized table re-parses");
        assert_eq!(back, counts);
    }
});
