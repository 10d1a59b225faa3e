#![no_main]

use adascale::datagen::SimScenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(v) = SimScenario::from_record(text) else { return };
    let written = v.to_record();
    let again = SimScenario::from_record(&written).expect("re-parsing a written record");
    assert_eq!(written, again.to_record());
});
