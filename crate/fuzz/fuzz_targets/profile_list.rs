#![no_main]

use libfuzzer_sys::fuzz_target;
use nested_dynamics_cli::{cmd_convert, parse_list, ProfileSource};

// A list accepted as rates or temperatures converts with a passing round trip.
fuzz_target!(|data: &[u8]| {
    let Some((&which, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let Ok(values) = parse_list(text) else { return };
    let source = if which % 2 == 0 {
        ProfileSource::Rates(values)
    } else {
        ProfileSource::Temps(values)
    };
    if let Ok(set) = cmd_convert(source) {
        set.check().expect("accepted profiles round-trip");
    }
});
