#![no_main]

use std::sync::Arc;

use libfuzzer_sys::fuzz_target;
use specinv::coeff::scalar_algebra;
use specinv::smoothk::{sk_multiply, SmoothCompacts};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let sk = SmoothCompacts::new(Arc::new(scalar_algebra()));
    if let Ok(x) = sk.parse_literal(text) {
        if x.radius() <= 64 {
            let _ = sk_multiply(&x, &x);
        }
    }
});
