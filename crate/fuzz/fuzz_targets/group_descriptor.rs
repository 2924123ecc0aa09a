#![no_main]

use std::str::FromStr;

use libfuzzer_sys::fuzz_target;
use specinv::groups::{make_group, GroupDescriptor};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(desc) = GroupDescriptor::from_str(text) {
        if let Ok(g) = make_group(&desc) {
            let e = g.identity();
            for u in g.generators() {
                assert_eq!(g.multiply(u, &g.inverse(u)), e);
            }
        }
    }
});
