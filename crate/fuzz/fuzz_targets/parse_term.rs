#![no_main]

use eqproof::syntax::{parse_term, render_term};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_term(src) {
        // rendering is canonical, so it must parse back to the same term
        let text = render_term(&t);
        assert_eq!(parse_term(&text).as_ref(), Ok(&t), "{text}");
    }
});
