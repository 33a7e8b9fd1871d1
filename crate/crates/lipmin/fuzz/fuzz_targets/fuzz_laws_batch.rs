#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // batch evaluation reports per-entry errors; it must never panic on
    // arbitrary request JSON
    let _ = lipmin::cli::eval_laws_batch_json(text);
});
