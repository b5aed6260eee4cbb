mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use wfc_terrain::gradient::{compute_gradients, transform_heightmap, GradientField, Transform};
use wfc_terrain::raster_io::{
    downsample_bilinear, encode_hgt, parse_hgt, read_ascii_grid, write_ascii_grid, HeightMap,
    TileId,
};
use wfc_terrain::reconstruct::{curl_residual, integrate, integrate_verified};
use wfc_terrain::stats::{histogram_pair, intersection, summarize};
use wfc_terrain::wfc::{Domain, Model};
use wfc_terrain::Grid;

fn heightmap(max_side: usize, lo: i32, hi: i32) -> impl Strategy<Value = HeightMap> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(r, c)| {
        prop::collection::vec(lo..=hi, r * c)
            .prop_map(move |v| HeightMap::new(Grid::from_vec(r, c, v).unwrap()).unwrap())
    })
}

fn terrain(max_side: usize) -> impl Strategy<Value = HeightMap> {
    heightmap(max_side, -500, 9000).prop_filter("at least 2x2", |h| h.rows() >= 2 && h.cols() >= 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hgt_round_trip(side in 1usize..12, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let hm = common::random_heightmap(&mut r, side, side, -500, 9000);
        let bytes = encode_hgt(&hm).unwrap();
        prop_assert_eq!(bytes.len(), 2 * side * side);
        let back = parse_hgt(&bytes, TileId::new(-3, 120)).unwrap();
        prop_assert_eq!(back.cells(), hm.cells());
    }

    #[test]
    fn ascii_round_trip(hm in heightmap(10, -32768, 9000)) {
        let back = read_ascii_grid(&write_ascii_grid(&hm)).unwrap();
        prop_assert_eq!(back.cells(), hm.cells());
        prop_assert_eq!(back.nodata(), hm.nodata());
    }

    #[test]
    fn downsampled_values_stay_within_input_range(hm in heightmap(24, -500, 9000), f in 1usize..5) {
        prop_assume!(f <= hm.rows() && f <= hm.cols());
        let (lo, hi) = hm.value_range().unwrap();
        let out = downsample_bilinear(&hm, f).unwrap();
        prop_assert_eq!((out.rows(), out.cols()), (hm.rows() / f, hm.cols() / f));
        prop_assert!(out.cells().iter().all(|&v| lo <= v && v <= hi));
    }

    #[test]
    fn factor_one_is_identity(hm in heightmap(12, -500, 9000)) {
        let out = downsample_bilinear(&hm, 1).unwrap();
        prop_assert_eq!(out.cells(), hm.cells());
    }

    #[test]
    fn gradients_ignore_constant_offsets(hm in terrain(16), k in -400i32..400) {
        let shifted = HeightMap::new(hm.cells().map(|&v| v + k)).unwrap();
        prop_assert_eq!(compute_gradients(&hm).unwrap(), compute_gradients(&shifted).unwrap());
    }

    #[test]
    fn gradients_are_curl_free(hm in terrain(16)) {
        let rep = curl_residual(&compute_gradients(&hm).unwrap());
        prop_assert_eq!(rep.max_abs_residual, 0);
    }

    #[test]
    fn hflip_negates_and_mirrors_gx(hm in terrain(16)) {
        let id = compute_gradients(&hm).unwrap();
        let fl = compute_gradients(&transform_heightmap(&hm, Transform::HorizontalFlip)).unwrap();
        let c = id.cols();
        for y in 0..id.rows() {
            for x in 0..c {
                prop_assert_eq!(fl.gx()[(y, x)], -id.gx()[(y, c - 1 - x)]);
            }
        }
    }

    #[test]
    fn double_flips_are_identity(hm in heightmap(12, -500, 9000)) {
        for t in Transform::ALL {
            let twice = transform_heightmap(&transform_heightmap(&hm, t), t);
            prop_assert_eq!(twice.cells(), hm.cells());
        }
    }

    #[test]
    fn integration_reproduces_the_field(hm in terrain(16), base in -1000i32..1000) {
        let gf = compute_gradients(&hm).unwrap();
        let (back, dev) = integrate_verified(&gf, base).unwrap();
        prop_assert_eq!(dev, 0);
        prop_assert_eq!(compute_gradients(&back).unwrap(), gf);
    }

    #[test]
    fn integration_recovers_all_but_the_corner(hm in terrain(16)) {
        let gf = compute_gradients(&hm).unwrap();
        let back = integrate(&gf, hm.get(0, 0)).unwrap();
        let (r, c) = (hm.rows() - 1, hm.cols() - 1);
        for y in 0..hm.rows() {
            for x in 0..hm.cols() {
                if (y, x) != (r, c) {
                    prop_assert_eq!(back.get(y, x), hm.get(y, x));
                }
            }
        }
    }

    #[test]
    fn summary_is_order_independent(mut v in prop::collection::vec(0.0f64..1e4, 1..200), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let a = summarize(&v).unwrap();
        v.shuffle(&mut common::rng(seed));
        let b = summarize(&v).unwrap();
        prop_assert_eq!(a.median, b.median);
        prop_assert!((a.mean - b.mean).abs() <= 1e-9 * a.mean.abs().max(1.0));
        prop_assert!((a.std - b.std).abs() <= 1e-6 * a.std.max(1.0));
    }

    #[test]
    fn summary_scales_linearly(v in prop::collection::vec(0.0f64..1e3, 1..100), k in 0.1f64..10.0) {
        let a = summarize(&v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
        let b = summarize(&scaled).unwrap();
        prop_assert!((b.mean - k * a.mean).abs() <= 1e-9 * b.mean.max(1.0));
        prop_assert!((b.median - k * a.median).abs() <= 1e-9 * b.median.max(1.0));
        prop_assert!((b.std - k * a.std).abs() <= 1e-6 * b.std.max(1.0));
    }

    #[test]
    fn intersection_is_symmetric_and_bounded(
        a in prop::collection::vec(0.0f64..50.0, 1..200),
        b in prop::collection::vec(0.0f64..50.0, 1..200),
        bins in 1usize..60,
    ) {
        let ab = histogram_pair(&a, &b, bins).unwrap();
        let ba = histogram_pair(&b, &a, bins).unwrap();
        prop_assert_eq!(ab.intersection_score, ba.intersection_score);
        prop_assert!((0.0..=1.0).contains(&ab.intersection_score));
        prop_assert_eq!(ab.counts_in.iter().sum::<u64>(), a.len() as u64);
        prop_assert_eq!(intersection(&ab.counts_in, &ab.counts_in), 1.0);
    }

    #[test]
    fn domain_matches_a_set(ops in prop::collection::vec((any::<bool>(), 0usize..150), 0..300)) {
        let mut d = Domain::empty(150);
        let mut s = BTreeSet::new();
        for (insert, id) in ops {
            if insert {
                prop_assert_eq!(d.insert(id), s.insert(id));
            } else {
                prop_assert_eq!(d.remove(id), s.remove(&id));
            }
            prop_assert_eq!(d.len(), s.len());
        }
        prop_assert_eq!(d.iter().collect::<BTreeSet<_>>(), s);
    }

    #[test]
    fn model_text_round_trip(hm in terrain(10)) {
        let gf: GradientField = compute_gradients(&hm).unwrap();
        prop_assume!(gf.rows() >= 2 && gf.cols() >= 2);
        let model = Model::from_fields(&[gf]).unwrap();
        let text = model.to_text();
        let back = Model::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back.catalog(), model.catalog());
    }
}
