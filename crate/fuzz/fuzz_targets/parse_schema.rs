#![no_main]

use eqproof::syntax::{parse_schema, render_schema};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_schema(src) {
        let text = render_schema(&t);
        assert_eq!(parse_schema(&text).as_ref(), Ok(&t), "{text}");
    }
});
