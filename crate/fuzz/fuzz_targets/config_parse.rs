#![no_main]

use ergolab::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ExperimentConfig::from_json(text) else { return };
    let echoed = cfg.to_json();
    let again = ExperimentConfig::from_json(&echoed).expect("canonical form parses");
    assert_eq!(echoed, again.to_json());
});
