#![no_main]

use distenergy::amenable::{parse_stencil, StencilDoc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(s) = parse_stencil(text) else { return };
    let doc = serde_json::to_string(&StencilDoc::from_stencil(&s)).expect("serializable");
    assert_eq!(parse_stencil(&doc).expect("reparse"), s);
    let (lo, hi) = s.symbol_bounds();
    assert!(lo <= hi);
});
