#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(g) = distenergy::continuum::parse_grid(text) else { return };
    let (dx, dxi) = g.plancherel_defect();
    assert!(dx.is_finite() && dxi.is_finite());
});
