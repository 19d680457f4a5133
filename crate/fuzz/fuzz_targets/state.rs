#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rho) = distenergy::model::io::parse_state(text) else { return };
    let d = distenergy::model::Density::of_state(&rho);
    assert!(d.per_point().iter().all(|&x| x >= -1e-9 * rho.trace().max(1.0)));
});
