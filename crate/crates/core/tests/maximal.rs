use lacuna::direction_sets::*;
use lacuna::generators::*;
use lacuna::maximal::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_grid(dims: Vec<usize>, rng: &mut ChaCha8Rng) -> GridFunction {
    GridFunction::from_fn(dims, 1.0, |_| rng.gen_range(-1.0..1.0)).unwrap()
}

fn random_directions(n: usize, count: usize, rng: &mut ChaCha8Rng) -> DirectionSet {
    let rows: Vec<Vec<f64>> = (0..count).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    DirectionSet::from_coords(&rows).unwrap()
}

fn axis_set(n: usize, a: usize) -> DirectionSet {
    let mut e = vec![0.0; n];
    e[a] = 1.0;
    DirectionSet::from_coords(&[e]).unwrap()
}

fn leq(a: &GridFunction, b: &GridFunction, slack: f64) -> bool {
    a.data().iter().zip(b.data()).all(|(x, y)| *x <= *y + slack)
}

#[test]
fn oracle_matches_bit_for_bit() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dims in [vec![16, 16], vec![32, 32], vec![8, 8, 8]] {
        let f = random_grid(dims.clone(), &mut rng);
        let omega = random_directions(dims.len(), 8, &mut rng);
        let radii = RadiusSet::dyadic(&f);
        let fast = directional_maximal(&f, &omega, &radii).unwrap();
        let slow = brute_oracle(&f, &omega, &radii).unwrap();
        assert!(fast.data().iter().zip(slow.data()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
    let odd = RadiusSet::new(vec![0.7, 2.3, 5.0]).unwrap();
    let f = random_grid(vec![20, 12], &mut rng);
    let omega = random_directions(2, 5, &mut rng);
    assert_eq!(directional_maximal(&f, &omega, &odd).unwrap(), brute_oracle(&f, &omega, &odd).unwrap());
    let big = GridFunction::zeros(vec![1001, 1000], 1.0).unwrap();
    assert!(brute_oracle(&big, &omega, &odd).is_err());
}

#[test]
fn delta_window_counts() {
    // Independent count: the window of half-width r ≥ d holds 2r+1 samples
    // and only one of them is 1, so the sup is attained at r = d.
    let mut g = GridFunction::zeros(vec![64], 1.0).unwrap();
    g.set(&[32], 1.0);
    let radii = RadiusSet::new((1..=40).map(f64::from).collect()).unwrap();
    let m = hl_1d(&g, 0, &radii).unwrap();
    for d in 1..=31usize {
        let expect = (d..=40).map(|r| 1.0 / (2 * r + 1) as f64).fold(0.0, f64::max);
        assert_eq!(m.get(&[32 - d]), expect);
        if 32 + d < 64 {
            assert_eq!(m.get(&[32 + d]), expect);
        }
    }
    assert!(hl_1d(&g, 1, &radii).is_err());
}

#[test]
fn constants_and_axis_agreement() {
    let one = GridFunction::from_fn(vec![40, 40], 0.5, |_| 1.0).unwrap();
    let radii = RadiusSet::new(vec![0.5, 1.0, 2.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let omega = random_directions(2, 6, &mut rng);
    let m = directional_maximal(&one, &omega, &radii).unwrap();
    let s = strong_maximal(&one, &radii).unwrap();
    let t = tube_maximal(&one, &omega, &[2.0], &[0.5]).unwrap();
    for i in 8..32 {
        for j in 8..32 {
            assert!((m.get(&[i, j]) - 1.0).abs() < 1e-12);
            assert!((s.get(&[i, j]) - 1.0).abs() < 1e-12);
            assert!((t.get(&[i, j]) - 1.0).abs() < 1e-12);
        }
    }

    let f = random_grid(vec![24, 24], &mut rng);
    let radii = RadiusSet::dyadic(&f);
    for a in 0..2 {
        let d = directional_maximal(&f, &axis_set(2, a), &radii).unwrap();
        assert_eq!(d, hl_1d(&f, a, &radii).unwrap());
        assert_eq!(brute_oracle(&f, &axis_set(2, a), &radii).unwrap(), d);
    }
    assert!(directional_maximal(&f, &DirectionSet::empty(2), &radii).is_err());
}

#[test]
fn strong_maximal_separates_on_a_delta() {
    let mut g = GridFunction::zeros(vec![33, 33], 1.0).unwrap();
    g.set(&[16, 16], 1.0);
    let radii = RadiusSet::dyadic(&g);
    let s = strong_maximal(&g, &radii).unwrap();
    let mut e = GridFunction::zeros(vec![33], 1.0).unwrap();
    e.set(&[16], 1.0);
    let one = hl_1d(&e, 0, &radii).unwrap();
    for i in 0..33 {
        for j in 0..33 {
            let want = one.get(&[i]) * one.get(&[j]);
            assert!((s.get(&[i, j]) - want).abs() <= 1e-14 * want);
        }
    }

    let boxed = GridFunction::from_fn(vec![32, 32], 1.0, |i| {
        ((8..20).contains(&i[0]) && (10..14).contains(&i[1])) as u8 as f64
    })
    .unwrap();
    let s = strong_maximal(&boxed, &RadiusSet::dyadic(&boxed)).unwrap();
    // The smallest window is 3 cells wide, so the box edge itself is not full.
    for i in 9..19 {
        for j in 11..13 {
            assert!(s.get(&[i, j]) >= 1.0);
        }
    }
}

#[test]
fn tube_dominates_half_the_line_maximal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..4 {
        let f = GridFunction::from_fn(vec![32, 32], 1.0, |_| rng.gen_range(0.0..1.0)).unwrap();
        let omega = random_directions(2, 4, &mut rng);
        let radii = RadiusSet::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        let lengths: Vec<f64> = radii.radii().iter().map(|r| 2.0 * r).collect();
        let line = directional_maximal(&f, &omega, &radii).unwrap();
        let tube = tube_maximal(&f, &omega, &lengths, &[1.0]).unwrap();
        assert!(line.data().iter().zip(tube.data()).all(|(l, t)| *t >= 0.5 * l));
    }
}

#[test]
fn single_tube_average() {
    let u = [0.6, 0.8];
    let center = [20usize, 20];
    let f = GridFunction::from_fn(vec![40, 40], 1.0, |i| {
        let d = [i[0] as f64 - 20.0, i[1] as f64 - 20.0];
        let along = d[0] * u[0] + d[1] * u[1];
        let across = (d[0] * u[1] - d[1] * u[0]).abs();
        if along.abs() <= 6.0 && across <= 1.5 {
            1.0 + 0.1 * i[0] as f64
        } else {
            0.0
        }
    })
    .unwrap();
    let (mut sum, mut cnt) = (0.0, 0.0);
    for v in f.data() {
        if *v != 0.0 {
            sum += v;
            cnt += 1.0;
        }
    }
    let avg = tube_average(&f, &center, &u, 12.0, 3.0);
    assert!((avg - sum / cnt).abs() < 1e-12, "{avg} vs {}", sum / cnt);
}

#[test]
fn segment_domination_spot_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_grid(vec![30, 30], &mut rng);
    let omega = random_directions(2, 5, &mut rng);
    let radii = RadiusSet::dyadic(&f);
    let m = directional_maximal(&f, &omega, &radii).unwrap();
    for _ in 0..50 {
        let x = [rng.gen_range(0..30usize), rng.gen_range(0..30usize)];
        let w = &omega.directions()[rng.gen_range(0..5)];
        let r = radii.radii()[rng.gen_range(0..radii.radii().len())];
        assert!(m.get(&x) >= line_average(&f, &x, &w.unit(), r));
    }
}

#[test]
fn norm_ratio_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = random_grid(vec![16, 16], &mut rng);
    let g = f.with_data(f.data().iter().map(|v| 2.0 * v).collect()).unwrap();
    assert_eq!(norm_ratio(&f, &f, 2.0).unwrap(), 1.0);
    assert!((norm_ratio(&f, &g, 2.0).unwrap() - 2.0).abs() < 1e-14);
    let m = directional_maximal(&f, &random_directions(2, 3, &mut rng), &RadiusSet::dyadic(&f)).unwrap();
    assert!(norm_ratio(&f, &m, 3.0).unwrap() >= 0.0);
    assert!(norm_ratio(&GridFunction::zeros(vec![16, 16], 1.0).unwrap(), &f, 2.0).is_err());
    assert!(norm_ratio(&f, &f, f64::INFINITY).is_err());
}

/// Pixel-centre count with Rectangle2D::contains on a fine raster.
fn pixel_area(fam: &RectangleFamily, dilation: f64, res: usize) -> f64 {
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for r in &fam.rectangles {
        let q = r.bbox(dilation);
        b = [b[0].min(q[0]), b[1].min(q[1]), b[2].max(q[2]), b[3].max(q[3])];
    }
    let (dx, dy) = ((b[2] - b[0]) / res as f64, (b[3] - b[1]) / res as f64);
    let mut hits = 0usize;
    for i in 0..res {
        for j in 0..res {
            let p = [b[0] + (i as f64 + 0.5) * dx, b[1] + (j as f64 + 0.5) * dy];
            if fam.rectangles.iter().any(|r| r.contains(p, dilation)) {
                hits += 1;
            }
        }
    }
    hits as f64 * dx * dy
}

#[test]
fn union_measure_against_pixel_count() {
    let fam = besicovitch_family(3, &Basis::standard(2), None).unwrap();
    for dil in [1u32, 3] {
        let a = measure_union(UnionInput::Family(&fam), 1024, dil).unwrap();
        let b = pixel_area(&fam, dil as f64, 1200);
        assert!((a - b).abs() <= 0.02 * b, "dilation {dil}: {a} vs {b}");
    }
    let rect = Rectangle2D::new([0.0, 0.0], [1.0, 0.0], 1.0, 0.1).unwrap();
    let one = RectangleFamily { rectangles: vec![rect], plane_basis: Basis::standard(2), levels: 0 };
    let a = measure_union(UnionInput::Family(&one), 256, 3).unwrap();
    assert!((a - 0.3).abs() <= 4.0 * 0.1 / 256.0);
    assert!(measure_union(UnionInput::Family(&one), 255, 1).is_err());
    assert!(measure_union(UnionInput::Family(&one), 256, 2).is_err());
}

#[test]
fn grid_binary_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = GridFunction::new(vec![3, 4, 5], 0.25, vec![1.0, -2.0, 0.5], (0..60).map(|_| rng.gen()).collect()).unwrap();
    let mut buf = Vec::new();
    f.write_to(&mut buf).unwrap();
    assert_eq!(&buf[..8], b"LACGRID1");
    assert_eq!(buf.len(), 8 + 4 + 3 * 4 + 8 + 3 * 8 + 60 * 8);
    let g = GridFunction::read_from(&mut buf.as_slice()).unwrap();
    assert_eq!(f, g);
    buf[0] = b'X';
    assert!(GridFunction::read_from(&mut buf.as_slice()).is_err());
    assert!(GridFunction::read_from(&mut &buf[..20]).is_err());
}

#[test]
fn lift_field_small() {
    let n = 3;
    let omega = rational_slope_set(n, 4).unwrap();
    let plane = Basis::axes(n, &[1, 0]);
    let sh = shadow(&omega, &Basis::axes(n, &[0, 1]));
    let fam = besicovitch_family(2, &plane, Some(&sh)).unwrap();
    let lift = kakeya_lift(&fam, &omega, &Basis::axes(n, &[1, 0, 2])).unwrap();
    let opts = LiftOptions { resolution: 128, slices: 8, margin: 0.1 };
    let field = LiftField::new(&lift, &opts).unwrap();
    let vals = field.maximal(&omega).unwrap();
    assert_eq!(vals.len(), 8);
    assert!(vals.iter().flatten().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
    // The shortest segment is one planar cell, so only half the full-coverage
    // value is guaranteed.
    for (t, s) in vals.iter().enumerate() {
        for (c, v) in s.iter().enumerate() {
            if field.chi().data()[c] == 1.0 {
                assert!(*v >= 0.5, "slice {t} cell {c}: {v}");
            }
        }
    }
    assert!(field.norm_ratio(&vals, 2.0).unwrap() > 1.0);
    let region = field.dilated_region();
    assert!(!region.is_empty());
    let interp = field.maximal_at(&omega, LineRule::Interpolated, &region[..50.min(region.len())]).unwrap();
    assert!(interp.iter().all(|v| *v > 0.0 && *v <= 1.0 + 1e-12));
}

fn small_grid() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    (
        prop::collection::vec(-1.0f64..1.0, 144),
        prop::collection::vec(-1.0f64..1.0, 144),
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..5),
    )
        .prop_filter("nonzero directions", |(_, _, d)| d.iter().all(|v| v[0].hypot(v[1]) > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn maximal_operators_are_sublinear_and_monotone((a, b, dirs) in small_grid(), c in 0.0f64..3.0) {
        let f = GridFunction::new(vec![12, 12], 1.0, vec![0.0; 2], a).unwrap();
        let g = GridFunction::new(vec![12, 12], 1.0, vec![0.0; 2], b).unwrap();
        let sum = f.with_data(f.data().iter().zip(g.data()).map(|(x, y)| x + y).collect()).unwrap();
        let scaled = f.with_data(f.data().iter().map(|x| c * x).collect()).unwrap();
        let bigger = f.with_data(f.data().iter().zip(g.data()).map(|(x, y)| x.abs() + y.abs()).collect()).unwrap();
        let omega = DirectionSet::from_coords(&dirs).unwrap();
        let radii = RadiusSet::dyadic(&f);
        let ops: Vec<Box<dyn Fn(&GridFunction) -> GridFunction>> = vec![
            Box::new(|h| directional_maximal(h, &omega, &radii).unwrap()),
            Box::new(|h| strong_maximal(h, &radii).unwrap()),
            Box::new(|h| tube_maximal(h, &omega, &[2.0, 5.0], &[1.0]).unwrap()),
        ];
        for op in &ops {
            let (mf, mg) = (op(&f), op(&g));
            let bound = mf.with_data(mf.data().iter().zip(mg.data()).map(|(x, y)| x + y).collect()).unwrap();
            prop_assert!(leq(&op(&sum), &bound, 1e-12));
            let ms = op(&scaled);
            prop_assert!(ms.data().iter().zip(mf.data()).all(|(x, y)| (x - c * y).abs() <= 1e-12 * (1.0 + y.abs())));
            prop_assert!(leq(&mf, &op(&bigger), 1e-12));
        }
    }

    #[test]
    fn union_of_sets_is_pointwise_max((a, _, dirs) in small_grid(), split in 0usize..4) {
        let f = GridFunction::new(vec![12, 12], 1.0, vec![0.0; 2], a).unwrap();
        let omega = DirectionSet::from_coords(&dirs).unwrap();
        let k = split.min(omega.len() - 1) + 1;
        let (p, q): (Vec<usize>, Vec<usize>) = (0..omega.len()).partition(|&i| i < k);
        let radii = RadiusSet::dyadic(&f);
        let whole = directional_maximal(&f, &omega, &radii).unwrap();
        let m1 = directional_maximal(&f, &omega.subset(&p), &radii).unwrap();
        if q.is_empty() {
            prop_assert_eq!(whole, m1);
        } else {
            let m2 = directional_maximal(&f, &omega.subset(&q), &radii).unwrap();
            for i in 0..whole.len() {
                prop_assert_eq!(whole.data()[i], m1.data()[i].max(m2.data()[i]));
            }
        }
    }

    #[test]
    fn optimized_path_equals_oracle((a, _, dirs) in small_grid()) {
        let f = GridFunction::new(vec![12, 12], 0.5, vec![0.0; 2], a).unwrap();
        let omega = DirectionSet::from_coords(&dirs).unwrap();
        let radii = RadiusSet::new(vec![0.5, 1.3, 3.0]).unwrap();
        let fast = directional_maximal(&f, &omega, &radii).unwrap();
        let slow = brute_oracle(&f, &omega, &radii).unwrap();
        prop_assert!(fast.data().iter().zip(slow.data()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
