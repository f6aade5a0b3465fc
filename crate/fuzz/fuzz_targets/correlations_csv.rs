//! Correlations-CSV decoder must never panic; accepted rows must carry
//! in-range probabilities and round-trip bit-exactly.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(points) = dichannel::sim::read_correlations_csv(data) {
        for r in &points {
            assert!((0.0..=1.0).contains(&r.point.p11));
            assert!((0.0..=1.0).contains(&r.point.p12));
        }
        let mut buf = Vec::new();
        dichannel::sim::write_correlations_csv(&mut buf, &points)
            .expect("accepted rows serialize");
        let back = dichannel::sim::read_correlations_csv(buf.as_slice())
            .expect("serialized rows re-parse");
        assert_eq!(back.len(), points.len());
        for (a, b) in back.iter().zip(points.iter()) {
            assert_eq!(a.point.p11.to_bits(), b.point.p11.to_bits());
            assert_eq!(a.point.p12.to_bits(), b.point.p12.to_bits());
        }
    }
});
