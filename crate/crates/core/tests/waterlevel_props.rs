use polyflow::random::{random_load, random_oracle, rng};
use polyflow::waterlevel::{water_levels_alg1, water_levels_alg2, water_levels_brute};
use polyflow::ElementSet;
use proptest::prelude::*;

/// `max_S x(S)/f(S)` over sets with `f(S) > 0`, by enumeration.
fn densest_ratio(f: &dyn polyflow::SetFunction, x: &[f64]) -> f64 {
    let n = x.len();
    (1..1u64 << n)
        .filter_map(|mask| {
            let s = ElementSet::from_mask(n, mask);
            let fs = f.eval(&s);
            (fs > 1e-12).then(|| (0..n).filter(|&e| s.contains(e)).map(|e| x[e]).sum::<f64>() / fs)
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn top_level_is_the_densest_ratio(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let f = random_oracle(&mut r, n);
        let x = random_load(&mut r, n);
        let dec = water_levels_alg1(f.as_ref(), &x).unwrap();
        let truth = densest_ratio(f.as_ref(), &x);
        prop_assert!((dec.max_level() - truth).abs() <= 1e-9 * truth.max(1.0));
    }

    #[test]
    fn levels_scale_with_the_load(seed in any::<u64>(), n in 1usize..9, c in 0.1f64..10.0) {
        let mut r = rng(seed);
        let f = random_oracle(&mut r, n);
        let x = random_load(&mut r, n);
        let y: Vec<f64> = x.iter().map(|v| c * v).collect();
        let wx = water_levels_alg2(f.as_ref(), &x).unwrap().w;
        let wy = water_levels_alg2(f.as_ref(), &y).unwrap().w;
        for (a, b) in wx.iter().zip(&wy) {
            prop_assert!((c * a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn chain_is_nested_and_levels_decrease_along_it(seed in any::<u64>(), n in 1usize..11) {
        let mut r = rng(seed);
        let f = random_oracle(&mut r, n);
        let x = random_load(&mut r, n);
        let dec = water_levels_alg1(f.as_ref(), &x).unwrap();
        prop_assert_eq!(dec.chain.len(), dec.densities.len());
        prop_assert_eq!(dec.chain.last().map(Vec::len), Some(n));
        for pair in dec.chain.windows(2) {
            prop_assert!(pair[0].len() < pair[1].len());
            prop_assert!(pair[0].iter().all(|e| pair[1].contains(e)));
        }
        for pair in dec.densities.windows(2) {
            prop_assert!(pair[0] > pair[1]);
        }
        for e in 0..n {
            let block = dec.level_of(e).unwrap();
            prop_assert_eq!(dec.w[e], dec.densities[block]);
        }
    }

    #[test]
    fn saddle_orders_coincide(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let f = random_oracle(&mut r, n);
        let x = random_load(&mut r, n);
        for b in water_levels_brute(f.as_ref(), &x).unwrap() {
            prop_assert!((b.max_min - b.min_max).abs() <= 1e-9 * b.max_min.max(1.0));
        }
    }
}
