#![no_main]

use eqproof::theory::TheoryStack;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(stack) = TheoryStack::from_json(src, "fuzz") {
        // whatever loads must save and reload to an equal stack
        let text = stack.to_json();
        let again = TheoryStack::from_json(&text, "fuzz").expect("saved stack reloads");
        assert_eq!(again, stack);
    }
});
