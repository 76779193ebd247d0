//! Stable-toolchain stand-in for the fuzz targets: replays the fuzz corpus
//! seeds and throws arbitrary strings at each parser.

use std::fs;
use std::path::PathBuf;

use nested_dynamics::games::presets;
use nested_dynamics::hierarchy::SimilarityTree;
use nested_dynamics_cli::config::{resolve_tree, TreeConfig};
use nested_dynamics_cli::{
    cmd_classify, cmd_convert, parse_config, parse_list, resolve, ProfileSource,
};
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "no seeds for {target}");
    seeds
}

fn config_input(data: &[u8]) -> bool {
    let Ok(text) = std::str::from_utf8(data) else {
        return false;
    };
    let Ok(cfg) = parse_config(text) else {
        return false;
    };
    match resolve(&cfg, Some(0)) {
        Ok(exp) => {
            assert_eq!(exp.init.x0.len(), exp.game.n());
            assert_eq!(exp.tree.n(), exp.game.n());
            true
        }
        Err(_) => false,
    }
}

fn tree_input(data: &[u8]) -> bool {
    let Some((&n, rest)) = data.split_first() else {
        return false;
    };
    let n = (n % 16) as usize + 1;
    let Ok(text) = std::str::from_utf8(rest) else {
        return false;
    };
    let Ok(tree) = serde_json::from_str::<TreeConfig>(text) else {
        return false;
    };
    let labels: Vec<String> = (0..n).map(|a| format!("a{a}")).collect();
    match resolve_tree(Some(&tree), n, Some(&labels)) {
        Ok(t) => {
            let again = SimilarityTree::build(n, &t.partitions())
                .expect("partitions of a valid tree rebuild");
            assert_eq!(again.partitions(), t.partitions());
            for a in 0..n {
                assert_eq!(t.degree(a, a).unwrap(), t.depth() - 1);
            }
            true
        }
        Err(_) => false,
    }
}

fn profile_input(data: &[u8]) -> bool {
    let Some((&which, rest)) = data.split_first() else {
        return false;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return false;
    };
    let Ok(values) = parse_list(text) else {
        return false;
    };
    let source = if which % 2 == 0 {
        ProfileSource::Rates(values)
    } else {
        ProfileSource::Temps(values)
    };
    match cmd_convert(source) {
        Ok(set) => {
            set.check().unwrap();
            true
        }
        Err(_) => false,
    }
}

fn point_input(data: &[u8]) -> bool {
    let Ok(text) = std::str::from_utf8(data) else {
        return false;
    };
    let Ok(point) = parse_list(text) else {
        return false;
    };
    match cmd_classify(&presets::commuting(), point, 1e-9) {
        Ok(r) => {
            assert!(!r.report.is_nash || r.report.is_restricted_eq);
            true
        }
        Err(_) => false,
    }
}

#[test]
fn corpus_seeds_are_accepted() {
    for seed in corpus("config_parser") {
        assert!(config_input(&seed), "{}", String::from_utf8_lossy(&seed));
    }
    for seed in corpus("tree_parser") {
        assert!(tree_input(&seed), "{}", String::from_utf8_lossy(&seed));
    }
    for seed in corpus("profile_list") {
        assert!(profile_input(&seed), "{}", String::from_utf8_lossy(&seed));
    }
    for seed in corpus("point_parser") {
        assert!(point_input(&seed), "{}", String::from_utf8_lossy(&seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parsers_never_panic(data in proptest::collection::vec(any::<u8>(), 0..200)) {
        config_input(&data);
        tree_input(&data);
        profile_input(&data);
        point_input(&data);
    }

    #[test]
    fn numeric_lists_never_panic(text in "[0-9.,e+-]{0,40}", which in any::<u8>()) {
        let mut data = vec![which];
        data.extend_from_slice(text.as_bytes());
        profile_input(&data);
        point_input(text.as_bytes());
    }

    #[test]
    fn tree_blocks_never_panic(
        n in 1u8..10,
        levels in proptest::collection::vec(
            proptest::collection::vec(proptest::collection::vec(0usize..12, 0..5), 0..5),
            0..4,
        ),
    ) {
        let block = serde_json::json!({ "levels": levels });
        let mut data = vec![n - 1];
        data.extend_from_slice(block.to_string().as_bytes());
        tree_input(&data);
    }
}
