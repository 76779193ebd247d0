//! Similarity structures: towers of nested partitions of a finite action set.
//!
//! A [`SimilarityTree`] of depth `N` holds `N + 1` partitions. Level 0 is the
//! trivial partition (one class with every action) and level `N` resolves
//! the set into singletons. Every class at level `ℓ ≥ 1` sits inside exactly
//! one class at level `ℓ - 1`, its parent. Classes are addressed by
//! [`ClassId`] handles, which carry their level: the same member set at two
//! levels is two distinct classes.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite set of actions `0..n`, optionally labelled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl ActionSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLabels("action set must be nonempty".into()));
        }
        Ok(Self { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidLabels("action set must be nonempty".into()));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidLabels(format!("duplicate label {label:?}")));
            }
        }
        Ok(Self {
            n: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of an action, falling back to its index.
    pub fn label(&self, action: usize) -> String {
        match &self.labels {
            Some(labels) => labels[action].clone(),
            None => action.to_string(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }
}

/// Handle for a class of a [`SimilarityTree`]: a `(level, index)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassId {
    level: usize,
    index: usize,
}

impl ClassId {
    pub fn level(self) -> usize {
        self.level
    }

    /// Position of the class within its level.
    pub fn index(self) -> usize {
        self.index
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    /// Sorted member lists, ordered by smallest member.
    members: Vec<Vec<usize>>,
    /// Parent index one level up (empty for level 0).
    parent: Vec<usize>,
    /// Child indices one level down (empty for level N).
    children: Vec<Vec<usize>>,
}

/// A validated similarity hierarchy. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityTree {
    actions: ActionSet,
    levels: Vec<Level>,
    /// `lineage[a][ℓ]` is the index of the level-ℓ class containing `a`.
    lineage: Vec<Vec<usize>>,
}

impl SimilarityTree {
    /// Builds a tree over `n` actions.
    ///
    /// `partitions` lists either the interior levels only (the trivial and
    /// singleton levels are then added), or the full tower starting with the
    /// one-class partition and ending with singletons. Levels may be given in
    /// any order; they are sorted coarse to fine by class count, which is the
    /// only order a valid refinement chain admits.
    pub fn build(n: usize, partitions: &[Vec<Vec<usize>>]) -> Result<Self> {
        Self::with_actions(ActionSet::new(n)?, partitions)
    }

    pub fn with_actions(actions: ActionSet, partitions: &[Vec<Vec<usize>>]) -> Result<Self> {
        let n = actions.len();
        let mut raw: Vec<Vec<Vec<usize>>> = Vec::with_capacity(partitions.len() + 2);
        for (pos, level) in partitions.iter().enumerate() {
            raw.push(normalize_level(n, level, pos + 1)?);
        }
        raw.sort_by_key(|level| level.len());

        let trivial = vec![(0..n).collect::<Vec<_>>()];
        let singletons: Vec<Vec<usize>> = (0..n).map(|a| vec![a]).collect();
        let is_full = raw.len() >= 2 && raw[0] == trivial && raw[raw.len() - 1] == singletons;
        if !is_full {
            raw.insert(0, trivial);
            raw.push(singletons);
        }
        Self::from_levels(actions, raw)
    }

    /// Tree with no interior levels (depth 1): the plain, non-nested setting.
    pub fn flat(n: usize) -> Result<Self> {
        Self::build(n, &[])
    }

    fn from_levels(actions: ActionSet, raw: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let n = actions.len();
        let depth = raw.len() - 1;
        let mut owner: Vec<Vec<usize>> = vec![vec![0; n]; raw.len()];
        for (l, level) in raw.iter().enumerate() {
            for (k, class) in level.iter().enumerate() {
                for &a in class {
                    owner[l][a] = k;
                }
            }
        }

        let mut levels: Vec<Level> = Vec::with_capacity(raw.len());
        for (l, members) in raw.into_iter().enumerate() {
            let mut parent = Vec::new();
            if l > 0 {
                for (k, class) in members.iter().enumerate() {
                    let p = owner[l - 1][class[0]];
                    if class.iter().any(|&a| owner[l - 1][a] != p) {
                        return Err(Error::NotNested { level: l, class: k });
                    }
                    parent.push(p);
                }
            }
            let children = vec![Vec::new(); members.len()];
            levels.push(Level {
                members,
                parent,
                children,
            });
        }
        for l in 1..=depth {
            for k in 0..levels[l].members.len() {
                let p = levels[l].parent[k];
                levels[l - 1].children[p].push(k);
            }
        }

        let lineage = (0..n)
            .map(|a| (0..=depth).map(|l| owner[l][a]).collect())
            .collect();
        Ok(Self {
            actions,
            levels,
            lineage,
        })
    }

    /// Number of actions.
    pub fn n(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &ActionSet {
        &self.actions
    }

    /// Number of refinement levels `N` (the singleton level index).
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn root(&self) -> ClassId {
        ClassId { level: 0, index: 0 }
    }

    pub fn singleton(&self, action: usize) -> Result<ClassId> {
        self.ancestor(action, self.depth())
    }

    pub fn class_count(&self, level: usize) -> Result<usize> {
        self.check_level(level)?;
        Ok(self.levels[level].members.len())
    }

    /// Classes of one level, in storage order.
    pub fn classes_at(&self, level: usize) -> Result<impl Iterator<Item = ClassId> + '_> {
        let count = self.class_count(level)?;
        Ok((0..count).map(move |index| ClassId { level, index }))
    }

    /// Every class of the tree, coarse levels first.
    pub fn classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.levels.iter().enumerate().flat_map(|(level, lv)| {
            (0..lv.members.len()).map(move |index| ClassId { level, index })
        })
    }

    /// The level-ℓ class containing `action`.
    pub fn ancestor(&self, action: usize, level: usize) -> Result<ClassId> {
        self.check_action(action)?;
        self.check_level(level)?;
        Ok(ClassId {
            level,
            index: self.lineage[action][level],
        })
    }

    /// Index within level `ℓ` of the class containing `action`. Unchecked.
    pub(crate) fn ancestor_index(&self, action: usize, level: usize) -> usize {
        self.lineage[action][level]
    }

    /// Finest level `ℓ ≤ N - 1` at which `a` and `b` share a class.
    ///
    /// For `a == b` this returns `N - 1`, the top of the range over which the
    /// degree is defined; no formula in the crate evaluates that case.
    pub fn degree(&self, a: usize, b: usize) -> Result<usize> {
        self.check_action(a)?;
        self.check_action(b)?;
        let top = self.depth() - 1;
        Ok((0..=top)
            .rev()
            .find(|&l| self.lineage[a][l] == self.lineage[b][l])
            .unwrap_or(0))
    }

    pub fn members(&self, class: ClassId) -> Result<&[usize]> {
        self.check_class(class)?;
        Ok(&self.levels[class.level].members[class.index])
    }

    pub fn parent(&self, class: ClassId) -> Result<Option<ClassId>> {
        self.check_class(class)?;
        if class.level == 0 {
            return Ok(None);
        }
        Ok(Some(ClassId {
            level: class.level - 1,
            index: self.levels[class.level].parent[class.index],
        }))
    }

    pub fn children(&self, class: ClassId) -> Result<Vec<ClassId>> {
        self.check_class(class)?;
        Ok(self.levels[class.level].children[class.index]
            .iter()
            .map(|&index| ClassId {
                level: class.level + 1,
                index,
            })
            .collect())
    }

    pub(crate) fn children_indices(&self, level: usize, index: usize) -> &[usize] {
        &self.levels[level].children[index]
    }

    /// Path of classes from the root down to `class`, inclusive.
    pub fn lineage(&self, class: ClassId) -> Result<Vec<ClassId>> {
        self.check_class(class)?;
        let mut chain = vec![class];
        let mut cur = class;
        while let Some(p) = self.parent(cur)? {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        Ok(chain)
    }

    /// `true` if `ancestor` contains `class` and sits at a coarser or equal level.
    pub fn is_ancestor_of(&self, ancestor: ClassId, class: ClassId) -> Result<bool> {
        self.check_class(ancestor)?;
        self.check_class(class)?;
        if ancestor.level > class.level {
            return Ok(false);
        }
        let rep = self.levels[class.level].members[class.index][0];
        Ok(self.lineage[rep][ancestor.level] == ancestor.index)
    }

    /// The full tower of partitions, level 0 through N.
    pub fn partitions(&self) -> Vec<Vec<Vec<usize>>> {
        self.levels.iter().map(|l| l.members.clone()).collect()
    }

    /// Per-action lineage table: entry `[a][ℓ]` is the level-ℓ class index of `a`.
    pub fn lineage_table(&self) -> &[Vec<usize>] {
        &self.lineage
    }

    /// Total share `x_K` of a class.
    pub fn class_mass(&self, x: &[f64], class: ClassId) -> Result<f64> {
        Ok(self.members(class)?.iter().map(|&a| x[a]).sum())
    }

    /// Class masses for every level: `masses[ℓ][k] = x_K` for the k-th class of level ℓ.
    pub fn masses(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.levels
            .iter()
            .map(|lv| {
                lv.members
                    .iter()
                    .map(|m| m.iter().map(|&a| x[a]).sum())
                    .collect()
            })
            .collect()
    }

    /// Human-readable member list of a class.
    pub fn describe(&self, class: ClassId) -> Result<String> {
        let names: Vec<String> = self
            .members(class)?
            .iter()
            .map(|&a| self.actions.label(a))
            .collect();
        Ok(format!("{{{}}}@{}", names.join(","), class.level))
    }

    fn check_action(&self, action: usize) -> Result<()> {
        if action >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: action,
                n: self.n(),
            });
        }
        Ok(())
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            return Err(Error::LevelOutOfRange {
                level,
                depth: self.depth(),
            });
        }
        Ok(())
    }

    fn check_class(&self, class: ClassId) -> Result<()> {
        match self.levels.get(class.level) {
            Some(lv) if class.index < lv.members.len() => Ok(()),
            _ => Err(Error::InvalidClass),
        }
    }
}

/// Validates one supplied level and returns its classes sorted for storage.
fn normalize_level(n: usize, level: &[Vec<usize>], pos: usize) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; n];
    let mut classes = Vec::with_capacity(level.len());
    for class in level {
        if class.is_empty() {
            return Err(Error::EmptyClass { level: pos });
        }
        let mut sorted = class.clone();
        sorted.sort_unstable();
        for &a in &sorted {
            if a >= n {
                return Err(Error::IndexOutOfRange { index: a, n });
            }
            if seen[a] {
                return Err(Error::NotAPartition {
                    level: pos,
                    detail: format!("action {a} appears in more than one class"),
                });
            }
            seen[a] = true;
        }
        classes.push(sorted);
    }
    if let Some(a) = seen.iter().position(|s| !s) {
        return Err(Error::NotAPartition {
            level: pos,
            detail: format!("action {a} is not covered"),
        });
    }
    classes.sort_by_key(|c| c[0]);
    Ok(classes)
}
