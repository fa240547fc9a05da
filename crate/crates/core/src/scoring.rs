//! Outlier scores over a [`NeighborTable`] and selection of the z points to
//! remove.
//!
//! All rank arithmetic is defined here once, in self-inclusive terms (rank 1
//! is the point itself), so both removal algorithms and the constant-K
//! ablation share one convention. Each [`ScoreVector`] records the rank
//! bounds it used so the convention can be audited.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::knn::NeighborTable;
use crate::scalar::Real;

/// The scoring rule that produced a [`ScoreVector`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum ScoreRule<F: Real> {
    /// Distance to the rank-floor((c+1)z/2) neighbor.
    VanillaRadius { c: F },
    /// Summed distances to neighbors ranked z+1 through floor(cz).
    MidRangeSum { c: F },
    /// Classic fixed-K heuristic: distance to the K-th nearest other point.
    ConstantK { k: usize },
}

/// One nonnegative outlier score per point plus the rule and self-inclusive
/// rank bounds that produced it.
#[derive(Debug, Clone)]
pub struct ScoreVector<F: Real> {
    scores: Vec<F>,
    rule: ScoreRule<F>,
    z: usize,
    rank_lo: usize,
    rank_hi: usize,
}

impl<F: Real> ScoreVector<F> {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[F] {
        &self.scores
    }

    pub fn rule(&self) -> ScoreRule<F> {
        self.rule
    }

    pub fn z(&self) -> usize {
        self.z
    }

    /// Self-inclusive rank bounds (lo, hi) the rule consumed.
    pub fn rank_bounds(&self) -> (usize, usize) {
        (self.rank_lo, self.rank_hi)
    }
}

/// The self-inclusive rank used by the radius rule: floor((c+1)z/2).
pub fn vanilla_rank<F: Real>(c: F, z: usize) -> usize {
    ((c.to_f64_lossy() + 1.0) * z as f64 / 2.0).floor() as usize
}

/// The top of the mid-range summation window: floor(cz).
pub fn midrange_max_rank<F: Real>(c: F, z: usize) -> usize {
    (c.to_f64_lossy() * z as f64).floor() as usize
}

fn check_c<F: Real>(c: F) -> Result<()> {
    if c <= F::one() {
        return Err(Error::contract(format!("c must exceed 1, got {c}")));
    }
    Ok(())
}

fn check_table_width<F: Real>(table: &NeighborTable<F>, required: usize) -> Result<()> {
    if table.k() < required {
        return Err(Error::contract(format!(
            "neighbor table holds K={} ranks but the rule needs K>={required}",
            table.k()
        )));
    }
    Ok(())
}

/// Radius score: distance to the floor((c+1)z/2)-th self-inclusive neighbor.
pub fn score_vanilla<F: Real>(table: &NeighborTable<F>, z: usize, c: F) -> Result<ScoreVector<F>> {
    check_c(c)?;
    if z == 0 {
        return Err(Error::contract("radius score needs z >= 1".to_string()));
    }
    let rank = vanilla_rank(c, z);
    check_table_width(table, rank)?;
    let scores = (0..table.n()).map(|i| table.dist(i, rank)).collect();
    Ok(ScoreVector {
        scores,
        rule: ScoreRule::VanillaRadius { c },
        z,
        rank_lo: rank,
        rank_hi: rank,
    })
}

/// Mid-range sum score: summed distances to neighbors ranked z+1 through
/// floor(cz), self-inclusive. An empty window (floor(cz) < z+1) yields
/// all-zero scores.
pub fn score_midrange_sum<F: Real>(
    table: &NeighborTable<F>,
    z: usize,
    c: F,
) -> Result<ScoreVector<F>> {
    check_c(c)?;
    if z == 0 {
        return Err(Error::contract("mid-range score needs z >= 1".to_string()));
    }
    let hi = midrange_max_rank(c, z);
    check_table_width(table, hi)?;
    let lo = z + 1;
    let scores = (0..table.n())
        .map(|i| {
            if hi < lo {
                F::zero()
            } else {
                (lo..=hi).map(|r| table.dist(i, r)).sum()
            }
        })
        .collect();
    Ok(ScoreVector {
        scores,
        rule: ScoreRule::MidRangeSum { c },
        z,
        rank_lo: lo,
        rank_hi: hi,
    })
}

/// Classic constant-K score: distance to the K-th nearest *other* point,
/// i.e. self-inclusive rank K+1.
pub fn score_constant_k<F: Real>(table: &NeighborTable<F>, k: usize) -> Result<ScoreVector<F>> {
    if k == 0 {
        return Err(Error::contract("constant-K score needs K >= 1".to_string()));
    }
    let rank = k + 1;
    check_table_width(table, rank)?;
    let scores = (0..table.n()).map(|i| table.dist(i, rank)).collect();
    Ok(ScoreVector {
        scores,
        rule: ScoreRule::ConstantK { k },
        z: 0,
        rank_lo: rank,
        rank_hi: rank,
    })
}

/// The `z` indices with the largest scores, ties broken toward the lower
/// index; returned ascending.
pub fn select_outliers<F: Real>(scores: &ScoreVector<F>, z: usize) -> Result<Vec<usize>> {
    let n = scores.len();
    if z > n {
        return Err(Error::contract(format!(
            "cannot select z={z} outliers from {n} points"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        scores.scores[b]
            .partial_cmp(&scores.scores[a])
            .expect("scores are finite")
            .then(a.cmp(&b))
    });
    let mut selected = order[..z].to_vec();
    selected.sort_unstable();
    Ok(selected)
}

/// Writes `index,score,selected` rows for debugging.
pub fn export_scores_csv<F: Real>(
    scores: &ScoreVector<F>,
    selected: &[usize],
    mut writer: impl Write,
) -> Result<()> {
    writeln!(writer, "index,score,selected")?;
    for (i, s) in scores.scores.iter().enumerate() {
        let flag = u8::from(selected.binary_search(&i).is_ok());
        writeln!(writer, "{i},{s},{flag}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::knn::knn_table;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn table_1d(values: &[f64], k: usize) -> NeighborTable<f64> {
        let arr = Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap();
        knn_table(&Dataset::new(arr).unwrap(), k).unwrap()
    }

    #[test]
    fn vanilla_rank_arithmetic() {
        assert_eq!(vanilla_rank(3.0, 1), 2);
        assert_eq!(vanilla_rank(3.0, 2), 4); // the 2z-th neighbor
        assert_eq!(vanilla_rank(2.0, 3), 4); // floor(4.5)
    }

    #[test]
    fn vanilla_scores_hand_example() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0], 2);
        let sv = score_vanilla(&table, 1, 3.0).unwrap();
        let want = [1.0, 1.0, 2.0, 4.0];
        for (got, want) in sv.scores().iter().zip(want) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        assert_eq!(sv.rank_bounds(), (2, 2));
    }

    #[test]
    fn vanilla_degenerate_all_identical() {
        let table = table_1d(&[2.0, 2.0, 2.0, 2.0], 2);
        let sv = score_vanilla(&table, 1, 3.0).unwrap();
        assert!(sv.scores().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn vanilla_rejects_narrow_table() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0], 1);
        let err = score_vanilla(&table, 1, 3.0).unwrap_err();
        assert!(err.to_string().contains("K>=2"), "{err}");
    }

    #[test]
    fn midrange_scores_hand_example() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0], 3);
        let sv = score_midrange_sum(&table, 1, 3.0).unwrap();
        let want = [4.0, 3.0, 5.0, 10.0];
        for (got, want) in sv.scores().iter().zip(want) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        assert_eq!(sv.rank_bounds(), (2, 3));
    }

    #[test]
    fn midrange_single_term_equals_vanilla_rank() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0], 2);
        let mid = score_midrange_sum(&table, 1, 2.0).unwrap(); // ranks 2..2
        let van = score_vanilla(&table, 1, 3.0).unwrap(); // rank 2
        assert_eq!(mid.scores(), van.scores());
    }

    #[test]
    fn midrange_all_identical_is_zero() {
        let table = table_1d(&[5.0; 6], 3);
        let sv = score_midrange_sum(&table, 1, 3.0).unwrap();
        assert!(sv.scores().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn constant_k_hand_example() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0], 3);
        let sv = score_constant_k(&table, 2).unwrap();
        let want = [3.0, 2.0, 3.0, 6.0];
        for (got, want) in sv.scores().iter().zip(want) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn constant_k1_is_nearest_other_point() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0], 2);
        let k1 = score_constant_k(&table, 1).unwrap();
        let van = score_vanilla(&table, 1, 3.0).unwrap();
        assert_eq!(k1.scores(), van.scores());
    }

    #[test]
    fn constant_k_duplicate_pair_scores_zero() {
        let arr = Array2::from_shape_vec((3, 2), vec![1.0, 2.0, 1.0, 2.0, 9.0, 9.0]).unwrap();
        let table = knn_table(&Dataset::new(arr).unwrap(), 2).unwrap();
        let sv = score_constant_k(&table, 1).unwrap();
        assert_eq!(sv.scores()[0], 0.0);
        assert_eq!(sv.scores()[1], 0.0);
    }

    #[test]
    fn select_picks_largest_and_breaks_ties_low() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0], 3);
        let sv = score_midrange_sum(&table, 1, 3.0).unwrap(); // [4,3,5,10]
        assert_eq!(select_outliers(&sv, 1).unwrap(), vec![3]);
        assert_eq!(select_outliers(&sv, 0).unwrap(), Vec::<usize>::new());

        let flat = table_1d(&[5.0; 4], 2);
        let sv = score_vanilla(&flat, 1, 3.0).unwrap(); // all equal
        assert_eq!(select_outliers(&sv, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn selection_is_invariant_to_score_shift() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0, 2.5, -4.0], 3);
        let sv = score_midrange_sum(&table, 1, 3.0).unwrap();
        let shifted = ScoreVector {
            scores: sv.scores.iter().map(|s| s + 123.5).collect(),
            ..sv.clone()
        };
        for z in 0..=6 {
            assert_eq!(
                select_outliers(&sv, z).unwrap(),
                select_outliers(&shifted, z).unwrap()
            );
        }
    }

    #[test]
    fn export_scores_csv_shape() {
        let table = table_1d(&[0.0, 1.0, 3.0, 7.0], 3);
        let sv = score_midrange_sum(&table, 1, 3.0).unwrap();
        let selected = select_outliers(&sv, 1).unwrap();
        let mut buf = Vec::new();
        export_scores_csv(&sv, &selected, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,score,selected");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].ends_with(",1"));
    }
}
