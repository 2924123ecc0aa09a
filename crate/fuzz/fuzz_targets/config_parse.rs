#![no_main]

use libfuzzer_sys::fuzz_target;
use specinv_cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::parse(text) {
        // anything that parses must validate, and its group must build
        assert!(cfg.validate().is_ok());
        if cfg.group.is_some() {
            let _ = cfg.group_or_z();
        }
    }
});
