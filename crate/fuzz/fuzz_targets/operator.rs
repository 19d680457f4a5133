#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(a) = distenergy::model::io::parse_operator(text) else { return };
    if a.dim() > 64 {
        return;
    }
    let spec = a.spectral();
    assert_eq!(spec.eigenvalues().len(), a.dim());
    assert!(spec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
});
