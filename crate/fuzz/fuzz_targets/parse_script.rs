#![no_main]

use eqproof::script::{parse_script, replay};
use eqproof::seed::seed_stack;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(script) = parse_script(src) {
        let _ = replay(&seed_stack(), &script);
    }
});
