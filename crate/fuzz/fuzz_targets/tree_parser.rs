#![no_main]

use libfuzzer_sys::fuzz_target;
use nested_dynamics::hierarchy::SimilarityTree;
use nested_dynamics_cli::config::{resolve_tree, TreeConfig};

// First byte picks the action count, the rest is a tree block in JSON.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    let n = (n % 16) as usize + 1;
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let Ok(tree) = serde_json::from_str::<TreeConfig>(text) else {
        return;
    };
    let labels: Vec<String> = (0..n).map(|a| format!("a{a}")).collect();
    if let Ok(t) = resolve_tree(Some(&tree), n, Some(&labels)) {
        let again =
            SimilarityTree::build(n, &t.partitions()).expect("partitions of a valid tree rebuild");
        assert_eq!(again.partitions(), t.partitions());
        for a in 0..n {
            assert_eq!(t.degree(a, a).unwrap(), t.depth() - 1);
        }
    }
});
