#![no_main]

use distenergy::monotone::{parse_step, StepDoc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(f) = parse_step(text) else { return };
    // round trip through the document form
    let doc = serde_json::to_string(&StepDoc::from_step(&f)).expect("serializable");
    assert_eq!(parse_step(&doc).expect("reparse"), f);
    if f.sup() > 0.0 && f.len() <= 64 {
        let _ = distenergy::monotone::psi(&f);
        let _ = distenergy::monotone::phi(&f, 1.0);
    }
});
