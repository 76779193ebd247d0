#![no_main]

use libfuzzer_sys::fuzz_target;
use nested_dynamics_cli::{parse_config, resolve};

// Parsing and resolution must return errors, never panic. Runs are not
// started: a hostile t_end would only measure the integrator.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config(text) {
        if let Ok(exp) = resolve(&cfg, Some(0)) {
            assert_eq!(exp.init.x0.len(), exp.game.n());
            assert_eq!(exp.tree.n(), exp.game.n());
        }
    }
});
