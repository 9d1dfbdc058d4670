#![no_main]

use eqproof::syntax::{parse_path, render_path};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_path(src) {
        assert_eq!(parse_path(&render_path(&p)), Ok(p));
    }
});
