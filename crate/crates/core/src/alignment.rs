//! Energy-level alignment between a graph and a sparsified version of it.
//!
//! Level `k` of a graph is the set of assignments attaining its `k`-th
//! largest distinct cut value. Two graphs have level `k` aligned when one
//! level set contains the other.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{spectrum, Graph, Spectrum};

/// How the aligned-level count is read off the per-level flags.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentRule {
    /// Largest `k` such that levels `1..=k` are all aligned.
    #[default]
    Prefix,
    /// Largest `k` such that level `k` is aligned, gaps allowed.
    LargestAligned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Containment {
    Equal,
    /// The original graph's level set is inside the sparsified one's.
    OriginalInSparse,
    SparseInOriginal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDetail {
    /// 1-based level index.
    pub k: usize,
    pub original_size: usize,
    pub sparse_size: usize,
    pub containment: Option<Containment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub aligned_levels: usize,
    pub ground_state_aligned: bool,
    pub levels: Vec<LevelDetail>,
}

fn contained(inner: &[u32], level_of_outer: &[u32], k: u32) -> bool {
    inner.iter().all(|&x| level_of_outer[x as usize] == k)
}

/// Compares two precomputed spectra.
pub fn align_spectra(
    original: &Spectrum,
    sparse: &Spectrum,
    rule: AlignmentRule,
) -> Result<AlignmentReport> {
    if original.num_vertices != sparse.num_vertices {
        return input(format!(
            "spectra over {} and {} vertices",
            original.num_vertices, sparse.num_vertices
        ));
    }
    let (lo, ls) = (original.level_of(), sparse.level_of());
    let depth = original.levels.len().min(sparse.levels.len());
    let levels: Vec<LevelDetail> = (0..depth)
        .map(|k| {
            let (a, b) = (&original.levels[k].members, &sparse.levels[k].members);
            let a_in_b = contained(a, &ls, k as u32);
            let b_in_a = contained(b, &lo, k as u32);
            let containment = match (a_in_b, b_in_a) {
                (true, true) => Some(Containment::Equal),
                (true, false) => Some(Containment::OriginalInSparse),
                (false, true) => Some(Containment::SparseInOriginal),
                (false, false) => None,
            };
            LevelDetail {
                k: k + 1,
                original_size: a.len(),
                sparse_size: b.len(),
                containment,
            }
        })
        .collect();
    let aligned_levels = match rule {
        AlignmentRule::Prefix => levels
            .iter()
            .take_while(|l| l.containment.is_some())
            .count(),
        AlignmentRule::LargestAligned => levels
            .iter()
            .rev()
            .find(|l| l.containment.is_some())
            .map_or(0, |l| l.k),
    };
    Ok(AlignmentReport {
        aligned_levels,
        ground_state_aligned: levels.first().is_some_and(|l| l.containment.is_some()),
        levels,
    })
}

pub fn aligned_levels(g: &Graph, g_sparse: &Graph) -> Result<AlignmentReport> {
    aligned_levels_with(g, g_sparse, AlignmentRule::Prefix)
}

pub fn aligned_levels_with(
    g: &Graph,
    g_sparse: &Graph,
    rule: AlignmentRule,
) -> Result<AlignmentReport> {
    if g.num_vertices() != g_sparse.num_vertices() {
        return input(format!(
            "graphs have {} and {} vertices",
            g.num_vertices(),
            g_sparse.num_vertices()
        ));
    }
    align_spectra(&spectrum(g)?, &spectrum(g_sparse)?, rule)
}

/// One instance of the alignment study.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyInstance {
    pub original: Graph,
    pub sparse: Graph,
    pub ratio_sparse: f64,
    pub ratio_standard: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub aligned_levels: usize,
    pub ratio_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    pub aligned_levels: usize,
    pub count: usize,
    pub mean_delta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub rows: Vec<StudyRow>,
    pub buckets: Vec<BucketSummary>,
}

/// Pairs each instance's alignment with `ratio_sparse - ratio_standard`
/// and summarizes the deltas per aligned-level count.
pub fn alignment_ratio_study(instances: &[StudyInstance]) -> Result<StudyTable> {
    let mut rows = Vec::with_capacity(instances.len());
    for inst in instances {
        for r in [inst.ratio_sparse, inst.ratio_standard] {
            if !(-1e-9..=1.0 + 1e-9).contains(&r) {
                return input(format!("approximation ratio {r} outside [0, 1]"));
            }
        }
        rows.push(StudyRow {
            aligned_levels: aligned_levels(&inst.original, &inst.sparse)?.aligned_levels,
            ratio_delta: inst.ratio_sparse - inst.ratio_standard,
        });
    }
    Ok(StudyTable {
        buckets: summarize(&rows),
        rows,
    })
}

pub fn summarize(rows: &[StudyRow]) -> Vec<BucketSummary> {
    let mut groups: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for row in rows {
        let e = groups.entry(row.aligned_levels).or_default();
        e.0 += 1;
        e.1 += row.ratio_delta;
    }
    groups
        .into_iter()
        .map(|(aligned_levels, (count, sum))| BucketSummary {
            aligned_levels,
            count,
            mean_delta: sum / count as f64,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_graphs_align_everywhere() {
        let g = Graph::cycle(5).unwrap();
        let r = aligned_levels(&g, &g).unwrap();
        assert_eq!(r.aligned_levels, spectrum(&g).unwrap().levels.len());
        assert!(r.ground_state_aligned);
        assert!(r
            .levels
            .iter()
            .all(|l| l.containment == Some(Containment::Equal)));
    }

    #[test]
    fn path_versus_single_edge() {
        let p3 = Graph::path(3).unwrap();
        let sparse = Graph::new(3, [(0, 1)]).unwrap();
        let r = aligned_levels(&p3, &sparse).unwrap();
        assert_eq!(r.aligned_levels, 1);
        assert_eq!(r.levels[0].containment, Some(Containment::OriginalInSparse));
        assert_eq!(r.levels[1].containment, None);
        assert_eq!(aligned_levels(&sparse, &p3).unwrap().aligned_levels, 1);
    }

    #[test]
    fn edgeless_sparsification_contains_ground_state() {
        let g = Graph::complete(4).unwrap();
        let r = aligned_levels(&g, &Graph::empty(4).unwrap()).unwrap();
        assert!(r.aligned_levels >= 1);
        assert_eq!(r.levels.len(), 1);
    }

    #[test]
    fn rules_differ_on_gaps() {
        // Constructed spectra: level 1 misaligned, level 2 aligned.
        let s = |levels: Vec<(usize, Vec<u32>)>| Spectrum {
            num_vertices: 2,
            levels: levels
                .into_iter()
                .map(|(c, m)| crate::graph::Level {
                    cut_value: c,
                    members: m,
                })
                .collect(),
        };
        let a = s(vec![(2, vec![0, 1]), (1, vec![2]), (0, vec![3])]);
        let b = s(vec![(2, vec![1, 3]), (1, vec![2]), (0, vec![0])]);
        assert_eq!(
            align_spectra(&a, &b, AlignmentRule::Prefix)
                .unwrap()
                .aligned_levels,
            0
        );
        assert_eq!(
            align_spectra(&a, &b, AlignmentRule::LargestAligned)
                .unwrap()
                .aligned_levels,
            2
        );
    }

    #[test]
    fn study_examples() {
        assert_eq!(alignment_ratio_study(&[]).unwrap(), StudyTable::default());
        let g = Graph::cycle(5).unwrap();
        let table = alignment_ratio_study(&[StudyInstance {
            original: g.clone(),
            sparse: g.clone(),
            ratio_sparse: 0.8,
            ratio_standard: 0.8,
        }])
        .unwrap();
        assert_eq!(table.rows[0].ratio_delta, 0.0);
        assert_eq!(
            table.rows[0].aligned_levels,
            spectrum(&g).unwrap().levels.len()
        );
        assert!(alignment_ratio_study(&[StudyInstance {
            original: g.clone(),
            sparse: g,
            ratio_sparse: 1.5,
            ratio_standard: 0.8,
        }])
        .is_err());
    }
}
