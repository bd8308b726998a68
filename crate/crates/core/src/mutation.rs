//! The two mutation operators and the per-generation split of the population
//! between them.

use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// current-to-order-pbest/1: donors sorted by fitness before use.
    OrderPbest,
    /// current-to-pbest/1.
    Pbest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyAssignment {
    pub labels: Vec<Strategy>,
    pub gamma1: f64,
}

impl StrategyAssignment {
    pub fn count(&self, strategy: Strategy) -> usize {
        self.labels.iter().filter(|&&s| s == strategy).count()
    }
}

/// Clamps `gamma1` into `[gamma_min, 1 - gamma_min]`. A zero `gamma_min`
/// leaves the value in `[0, 1]`.
pub fn clamp_gamma(gamma1: f64, gamma_min: f64) -> f64 {
    gamma1.clamp(gamma_min, 1.0 - gamma_min)
}

/// Labels exactly `round(gamma1 * n)` individuals (after clamping) with
/// [`Strategy::OrderPbest`] and the rest with [`Strategy::Pbest`], as a
/// uniformly random partition.
pub fn assign_strategies(
    n: usize,
    gamma1: f64,
    gamma_min: f64,
    rng: &mut RngStream,
) -> StrategyAssignment {
    let gamma1 = clamp_gamma(gamma1, gamma_min);
    let n_order = ((gamma1 * n as f64).round() as usize).min(n);
    let mut labels: Vec<Strategy> = std::iter::repeat_n(Strategy::OrderPbest, n_order)
        .chain(std::iter::repeat_n(Strategy::Pbest, n - n_order))
        .collect();
    rng.shuffle(&mut labels);
    StrategyAssignment { labels, gamma1 }
}

/// `v = x_i + F (x_pbest - x_i) + F (x_r1 - x_r2)`.
pub fn mutate_pbest(x_i: &[f64], f: f64, x_pbest: &[f64], x_r1: &[f64], x_r2: &[f64]) -> Vec<f64> {
    x_i.iter()
        .zip(x_pbest)
        .zip(x_r1.iter().zip(x_r2))
        .map(|((&xi, &xp), (&a, &b))| xi + f * (xp - xi) + f * (a - b))
        .collect()
}

/// Positions of three fitness values in ascending order (best, median,
/// worst). Equal values keep their input order.
pub fn order_by_fitness(fitness: [f64; 3]) -> [usize; 3] {
    let mut idx = [0, 1, 2];
    idx.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
    idx
}

/// Sorts the three donors by fitness, then applies
/// `v = x_i + F (x_best - x_i) + F (x_median - x_worst)`.
pub fn mutate_ord_pbest(x_i: &[f64], f: f64, picks: [(&[f64], f64); 3]) -> Vec<f64> {
    let [b, m, w] = order_by_fitness([picks[0].1, picks[1].1, picks[2].1]);
    mutate_pbest(x_i, f, picks[b].0, picks[m].0, picks[w].0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use super::Strategy;

    #[test]
    fn pbest_worked_example() {
        let v = mutate_pbest(&[0.0, 0.0], 0.5, &[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]);
        assert_eq!(v, vec![0.5, 0.5]);
    }

    #[test]
    fn zero_scale_and_zero_differences() {
        let x = [1.5, -2.0, 3.0];
        assert_eq!(mutate_pbest(&x, 0.0, &[9.0; 3], &[4.0; 3], &[-7.0; 3]), x.to_vec());
        assert_eq!(mutate_pbest(&x, 0.8, &x, &x, &x), x.to_vec());
    }

    #[test]
    fn ord_pbest_worked_example() {
        let v = mutate_ord_pbest(&[0.0], 0.5, [(&[2.0], 1.0), (&[4.0], 2.0), (&[6.0], 3.0)]);
        assert_eq!(v, vec![0.0]);
        // Same donors presented out of order give the same vector.
        let w = mutate_ord_pbest(&[0.0], 0.5, [(&[6.0], 3.0), (&[2.0], 1.0), (&[4.0], 2.0)]);
        assert_eq!(w, vec![0.0]);
    }

    #[test]
    fn ord_pbest_roles() {
        assert_eq!(order_by_fitness([3.0, 1.0, 2.0]), [1, 2, 0]);
    }

    #[test]
    fn ord_pbest_identical_donors() {
        let a = [2.0, 4.0];
        let v = mutate_ord_pbest(&[1.0, 1.0], 0.3, [(&a, 1.0), (&a, 1.0), (&a, 1.0)]);
        let expected = mutate_pbest(&[1.0, 1.0], 0.3, &a, &[0.0, 0.0], &[0.0, 0.0]);
        assert_eq!(v, expected);
    }

    #[test]
    fn assignment_examples() {
        let mut rng = RngStream::new(0);
        let a = assign_strategies(10, 0.5, 0.1, &mut rng);
        assert_eq!(a.count(Strategy::OrderPbest), 5);
        assert_eq!(a.count(Strategy::Pbest), 5);
        assert_eq!(assign_strategies(10, 0.0, 0.1, &mut rng).count(Strategy::OrderPbest), 1);
        assert_eq!(assign_strategies(10, 1.0, 0.1, &mut rng).count(Strategy::OrderPbest), 9);
        assert_eq!(assign_strategies(10, 1.0, 0.0, &mut rng).count(Strategy::OrderPbest), 10);
    }

    #[test]
    fn assignment_is_a_uniform_partition() {
        let mut rng = RngStream::new(8);
        let trials = 20_000;
        let mut hits = [0usize; 4];
        for _ in 0..trials {
            let a = assign_strategies(4, 0.5, 0.1, &mut rng);
            for (h, s) in hits.iter_mut().zip(&a.labels) {
                if *s == Strategy::OrderPbest {
                    *h += 1;
                }
            }
        }
        let sigma = (trials as f64 * 0.25).sqrt();
        for &h in &hits {
            assert!((h as f64 - trials as f64 * 0.5).abs() < 3.0 * sigma);
        }
    }

    proptest! {
        #[test]
        fn ord_pbest_equals_pbest_on_sorted_donors(
            xs in proptest::collection::vec(-100.0f64..100.0, 12),
            f in 0.0f64..=1.0,
        ) {
            let (xi, rest) = xs.split_at(3);
            let (a, rest) = rest.split_at(3);
            let (b, c) = rest.split_at(3);
            let lhs = mutate_ord_pbest(xi, f, [(a, 1.0), (b, 2.0), (c, 3.0)]);
            prop_assert_eq!(lhs, mutate_pbest(xi, f, a, b, c));
        }

        #[test]
        fn operators_are_translation_equivariant(
            xs in proptest::collection::vec(-10.0f64..10.0, 8),
            t in proptest::collection::vec(-10.0f64..10.0, 2),
            f in 0.0f64..=1.0,
        ) {
            let shift = |v: &[f64]| -> Vec<f64> { v.iter().zip(&t).map(|(a, b)| a + b).collect() };
            let (xi, rest) = xs.split_at(2);
            let (p, rest) = rest.split_at(2);
            let (a, b) = rest.split_at(2);
            let base = mutate_pbest(xi, f, p, a, b);
            let moved = mutate_pbest(&shift(xi), f, &shift(p), &shift(a), &shift(b));
            for ((m, v), s) in moved.iter().zip(&base).zip(&t) {
                prop_assert!((m - (v + s)).abs() < 1e-9);
            }
            let base = mutate_ord_pbest(xi, f, [(p, 3.0), (a, 1.0), (b, 2.0)]);
            let (sp, sa, sb) = (shift(p), shift(a), shift(b));
            let moved = mutate_ord_pbest(&shift(xi), f, [(&sp, 3.0), (&sa, 1.0), (&sb, 2.0)]);
            for ((m, v), s) in moved.iter().zip(&base).zip(&t) {
                prop_assert!((m - (v + s)).abs() < 1e-9);
            }
        }

        #[test]
        fn label_counts_match_rounding(d in 1usize..=30, frac in 0.0f64..=1.0, gamma in 0.0f64..=1.0, seed in any::<u64>()) {
            let n = 4 + ((18 * d - 4) as f64 * frac) as usize;
            let mut rng = RngStream::new(seed);
            let a = assign_strategies(n, gamma, 0.1, &mut rng);
            let g = gamma.clamp(0.1, 0.9);
            prop_assert_eq!(a.labels.len(), n);
            prop_assert_eq!(a.count(Strategy::OrderPbest), (g * n as f64).round() as usize);
        }
    }
}
