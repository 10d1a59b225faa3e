#![no_main]

use adascale::harness::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ExperimentConfig::parse(text) else { return };
    let _ = cfg.validate();
    let written = cfg.to_config();
    let again = ExperimentConfig::parse(&written).expect("re-parsing a written config");
    assert_eq!(written, again.to_config());
});
