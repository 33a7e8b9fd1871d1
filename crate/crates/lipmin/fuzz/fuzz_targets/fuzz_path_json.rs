#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // parsing untrusted path JSON must never panic; a successfully parsed
    // path must survive a serialize/parse round trip
    if let Ok(path) = lipmin::paths::parse_path_json(text) {
        let json = lipmin::paths::path_to_json(&path).unwrap();
        let back = lipmin::paths::parse_path_json(&json).unwrap();
        assert_eq!(
            std::mem::discriminant(&path),
            std::mem::discriminant(&back)
        );
        // downstream consumers assume a validated path never errors here
        let (tmin, tmax) = path.window();
        assert!(tmin <= tmax);
        let _ = lipmin::minorant::compute_minorant(&path, 1.0);
    }
});
