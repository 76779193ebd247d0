#![no_main]

use libfuzzer_sys::fuzz_target;
use nested_dynamics::games::presets;
use nested_dynamics_cli::{cmd_classify, parse_list};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(point) = parse_list(text) else { return };
    if let Ok(r) = cmd_classify(&presets::commuting(), point, 1e-9) {
        assert!(!r.report.is_nash || r.report.is_restricted_eq);
    }
});
