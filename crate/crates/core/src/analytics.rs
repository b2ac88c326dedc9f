//! Exact expected switch counts and distribution distances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{ChannelGrid, OrderingKind};
use crate::popularity::{PopularityModel, SwitchingKind, SwitchingModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchCountReport {
    pub ordering: String,
    pub switching: SwitchingKind,
    pub session_count: usize,
    pub shape: f64,
    pub expected_switches: f64,
}

/// `E[D] = Σ_i π(i) Σ_{j≠i} p(i,j) · d_min(i,j)` over the grid.
pub fn expected_switches(grid: &ChannelGrid, switching: &SwitchingModel<'_>) -> Result<f64> {
    let n = grid.session_count();
    let pop = switching.popularity();
    if n < 2 {
        return invalid("expected switch count needs at least two sessions");
    }
    if pop.session_count() != n {
        return invalid(format!(
            "grid has {n} sessions but popularity model has {}",
            pop.session_count()
        ));
    }
    let mut total = 0.0;
    for i in 1..=n {
        let from = grid.position(i);
        let mut row = 0.0;
        for j in (1..=n).filter(|&j| j != i) {
            let d = grid.position_distances(from, grid.position(j)).min;
            row += switching.switch_prob(i, j)? * d as f64;
        }
        total += pop.prob(i) * row;
    }
    Ok(total)
}

/// Expected switch count for one deterministic ordering.
pub fn switch_count_report(
    ordering: OrderingKind,
    session_count: usize,
    shape: f64,
    switching: SwitchingKind,
) -> Result<SwitchCountReport> {
    let grid = ChannelGrid::build(ordering, session_count)?;
    report_for_grid(&grid, ordering.label(), shape, switching)
}

pub fn report_for_grid(
    grid: &ChannelGrid,
    label: &str,
    shape: f64,
    switching: SwitchingKind,
) -> Result<SwitchCountReport> {
    let pop = PopularityModel::zipf(grid.session_count(), shape)?;
    let model = SwitchingModel::new(switching, &pop);
    Ok(SwitchCountReport {
        ordering: label.to_string(),
        switching,
        session_count: grid.session_count(),
        shape,
        expected_switches: expected_switches(grid, &model)?,
    })
}

/// Euclidean distance between two position-indexed probability vectors.
pub fn distribution_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return invalid(format!("vector lengths differ: {} vs {}", a.len(), b.len()));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Summary of the distance between a reference grid's position
/// probabilities and those of many randomized client grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSummary {
    pub draws: usize,
    pub mean: f64,
    pub std_dev: f64,
}

pub fn randomized_distance(
    reference: &ChannelGrid,
    base: &PopularityModel,
    draws: usize,
    seed: u64,
) -> Result<DistanceSummary> {
    if draws == 0 {
        return invalid("at least one randomized draw is required");
    }
    let n = base.session_count();
    let reference_probs = reference.position_probabilities(base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniforms = vec![0.0; n];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        uniforms.iter_mut().for_each(|u| *u = rng.random());
        let grid = ChannelGrid::randomized(base, &uniforms)?;
        let remapped = crate::grid::remap_probabilities(base, reference, &grid)?;
        let d = distribution_distance(&reference_probs, &remapped)?;
        sum += d;
        sum_sq += d * d;
    }
    let mean = sum / draws as f64;
    let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
    Ok(DistanceSummary {
        draws,
        mean,
        std_dev: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn es(grid: &ChannelGrid, shape: f64) -> f64 {
        let pop = PopularityModel::zipf(grid.session_count(), shape).unwrap();
        expected_switches(grid, &SwitchingModel::destination_proportional(&pop)).unwrap()
    }

    #[test]
    fn tiny_grids_always_one_switch() {
        for g in [ChannelGrid::one_step(2).unwrap(), ChannelGrid::identity(3).unwrap()] {
            assert_abs_diff_eq!(es(&g, 1.0), 1.0, epsilon = 1e-12);
        }
        assert!(expected_switches(
            &ChannelGrid::identity(1).unwrap(),
            &SwitchingModel::destination_proportional(&PopularityModel::zipf(1, 1.0).unwrap())
        )
        .is_err());
    }

    #[test]
    fn one_step_hundred() {
        let v = es(&ChannelGrid::one_step(100).unwrap(), 1.0);
        assert_abs_diff_eq!(v, 15.4497, epsilon = 5e-5);
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let pop = PopularityModel::zipf(5, 1.0).unwrap();
        let g = ChannelGrid::one_step(6).unwrap();
        assert!(expected_switches(&g, &SwitchingModel::destination_proportional(&pop)).is_err());
    }

    #[test]
    fn interleaving_beats_identity() {
        for n in [100, 200, 300, 400, 500] {
            let id = es(&ChannelGrid::identity(n).unwrap(), 1.0);
            let one = es(&ChannelGrid::one_step(n).unwrap(), 1.0);
            assert!(id >= one, "n={n}: {id} < {one}");
        }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distribution_distance(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        let d = distribution_distance(&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert_abs_diff_eq!(d, 2f64.sqrt() / 3.0, epsilon = 1e-15);
        assert!(distribution_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    fn rotate_reflect(g: &ChannelGrid, shift: usize, reflect: bool) -> ChannelGrid {
        let n = g.session_count();
        let ranks = (0..n)
            .map(|p| {
                let src = if reflect { (n - p) % n } else { p };
                g.rank_at((src + shift) % n)
            })
            .collect();
        ChannelGrid::from_position_ranks(ranks, g.label()).unwrap()
    }

    proptest! {
        #[test]
        fn invariant_under_rotation_and_reflection(
            n in 2usize..40, shift in 0usize..40, reflect: bool
        ) {
            let g = ChannelGrid::two_step(n).unwrap();
            let h = rotate_reflect(&g, shift % n, reflect);
            prop_assert!((es(&g, 1.0) - es(&h, 1.0)).abs() < 1e-12);
        }

        #[test]
        fn report_within_bounds(n in 2usize..80, shape in 0.0f64..2.0) {
            let v = es(&ChannelGrid::one_step(n).unwrap(), shape);
            prop_assert!(v >= 1.0 - 1e-12 && v <= (n / 2) as f64 + 1e-12);
        }

        #[test]
        fn distance_is_a_metric(
            v in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 1..20)
        ) {
            let a: Vec<f64> = v.iter().map(|t| t.0).collect();
            let b: Vec<f64> = v.iter().map(|t| t.1).collect();
            let c: Vec<f64> = v.iter().map(|t| t.2).collect();
            let ab = distribution_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, distribution_distance(&b, &a).unwrap());
            let ac = distribution_distance(&a, &c).unwrap();
            let cb = distribution_distance(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
        }
    }
}
