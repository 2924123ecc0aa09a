#![no_main]

use std::sync::Arc;

use libfuzzer_sys::fuzz_target;
use specinv::coeff::{make_action, scalar_algebra, ActionRule};
use specinv::crossed::{parse_element_literal, CrossedElement, CrossedProduct};
use specinv::groups::{make_group, GroupDescriptor};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_element_literal(text);
    let group = Arc::new(make_group(&GroupDescriptor::FreeAbelian(2)).unwrap());
    let ctx = CrossedProduct::new(make_action(group, Arc::new(scalar_algebra()), ActionRule::Trivial).unwrap());
    if let Ok(x) = CrossedElement::from_literal(&ctx, text) {
        // round trip through the literal form
        let back = serde_json::to_string(&x.to_literal()).unwrap();
        let y = CrossedElement::from_literal(&ctx, &back).unwrap();
        assert_eq!(x.terms(), y.terms());
    }
});
