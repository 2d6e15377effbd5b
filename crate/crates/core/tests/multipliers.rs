use std::f64::consts::PI;

use lacuna::direction_sets::*;
use lacuna::maximal::{strong_maximal, GridFunction, RadiusSet};
use lacuna::multipliers::dft::{apply_multiplier, forward};
use lacuna::multipliers::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(j: usize, k: usize) -> SigmaPair {
    SigmaPair::new(j, k).unwrap()
}

fn random_grid(dims: Vec<usize>, rng: &mut ChaCha8Rng) -> GridFunction {
    GridFunction::from_fn(dims, 1.0, |_| rng.gen_range(-1.0..1.0)).unwrap()
}

fn l2(f: &GridFunction) -> f64 {
    f.data().iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(f: &GridFunction, g: &GridFunction) -> f64 {
    f.data().iter().zip(g.data()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Sum of cosines with the given integer frequencies on an E^n periodic grid.
fn waves(e: usize, n: usize, freqs: &[Vec<i64>]) -> GridFunction {
    GridFunction::from_fn(vec![e; n], 1.0, |i| {
        freqs
            .iter()
            .map(|k| (2.0 * PI * k.iter().zip(i).map(|(a, b)| *a as f64 * *b as f64).sum::<f64>() / e as f64).cos())
            .sum()
    })
    .unwrap()
}

fn transition(u: f64) -> f64 {
    let rho = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    rho(u) / (rho(u) + rho(1.0 - u))
}

#[test]
fn psi_axis_and_boundary_examples() {
    for n in 2..=4 {
        let c = ConeSpec::new(n, pair(1, 2), 0.25).unwrap();
        assert!(c.inner < c.outer && c.outer < 1.0);
        let mut xi = vec![0.7; n];
        xi[1] = 2.0;
        xi[0] = -0.25 * 2.0;
        assert_eq!(c.psi_eval(&xi), 1.0);
        xi[0] = 0.5;
        assert_eq!(c.psi_eval(&xi), 0.0);
        xi[0] = 0.0;
        xi[1] = 0.0;
        assert_eq!(c.psi_eval(&xi), 0.0);
    }
    // Midway through the shell the profile is the transition at 1/2.
    let c = ConeSpec::new(2, pair(1, 2), 1.0).unwrap();
    let u = 0.5 * (c.inner + c.outer);
    // ξ_1 = a, ξ_2 = −b with a, b > 0: ratio (a − b)/(a + b) = u.
    let xi = [1.0 + u, -(1.0 - u)];
    let want = transition((c.outer - u) / (c.outer - c.inner));
    assert!((c.psi_eval(&xi) - want).abs() < 1e-12);
    assert!((want - 0.5).abs() < 1e-12);
    assert!(ConeSpec::new(2, pair(1, 2), 0.0).is_err());
    assert!(ConeSpec::with_constants(pair(1, 2), 1.0, 0.9, 0.8).is_err());
}

#[test]
fn psi_support_discipline() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [2usize, 3, 4] {
        for (j, k) in [(1usize, 2usize), (1, n), (n - 1, n)] {
            if j >= k {
                continue;
            }
            let c = ConeSpec::new(n, pair(j, k), rng.gen_range(0.01..10.0)).unwrap();
            for _ in 0..100_000 {
                let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let (a, b) = (c.theta * xi[k - 1], xi[j - 1]);
                let (num, den) = ((a + b).abs(), a.abs() + b.abs());
                let p = c.psi_eval(&xi);
                assert!((0.0..=1.0).contains(&p));
                if p > 0.0 {
                    assert!(num < c.outer * den);
                }
                if num <= c.inner * den && den > 0.0 {
                    assert_eq!(p, 1.0);
                }
                let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
                assert_eq!(c.psi_eval(&neg), p);
                let dbl: Vec<f64> = xi.iter().map(|x| 2.0 * x).collect();
                assert_eq!(c.psi_eval(&dbl), p);
                let mut other = xi.clone();
                for (a, x) in other.iter_mut().enumerate() {
                    if a != j - 1 && a != k - 1 {
                        *x = 17.0;
                    }
                }
                assert_eq!(c.psi_eval(&other), p);
            }
        }
    }
}

#[test]
fn profiles_against_direct_quadrature() {
    // Oracle: Simpson's rule on ∫ φ(s) φ(t − s) ds with the raw bump, divided
    // by (∫ bump)^2, computed here from scratch.
    let bump = |t: f64| if t.abs() < 0.5 { (-1.0 / (0.25 - t * t)).exp() } else { 0.0 };
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, m: usize| {
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for i in 1..m {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let z = simpson(&bump, -0.5, 0.5, 2000);
    assert!((simpson(&phi_o, -0.5, 0.5, 2000) - 1.0).abs() < 1e-9);
    for t in [0.0, 0.1, 0.3, 0.5, 0.77, 0.95] {
        let conv = simpson(&|s| bump(s) * bump(t - s), t - 0.5, 0.5, 4000) / (z * z);
        assert!((m_o(t) - conv).abs() < 1e-4 * conv.max(1.0), "t = {t}: {} vs {conv}", m_o(t));
        assert_eq!(m_o(t), m_o(-t));
    }
    assert_eq!(m_o(1.0), 0.0);
    assert_eq!(m_o(-1.5), 0.0);
    assert_eq!(phi_o(0.5), 0.0);

    for n in 2..=4 {
        let n2 = (n * n) as f64;
        let mut xi = vec![0.0; n];
        xi[0] = n2;
        assert_eq!(eta_o(n, &xi), 1.0);
        xi[0] = 4.0 * n2;
        assert_eq!(eta_o(n, &xi), 0.0);
        xi[0] = 3.0 * n2;
        assert!((eta_o(n, &xi) - transition(0.5)).abs() < 1e-15);
    }
}

#[test]
fn t_symbol_examples() {
    let n = 3;
    let n2: f64 = 9.0;
    let w = Direction::new(vec![1.0, 2.0, 2.0]).unwrap().unit();
    // Scaled frequency inside the ball of radius 2n².
    let xi: Vec<f64> = w.iter().map(|_| 1.0).collect();
    assert_eq!(t_multiplier(1.0, &w, &xi), 0.0);
    // Scaled frequency with 𝟏·z ≥ 1.
    let far: Vec<f64> = vec![100.0; 3];
    assert_eq!(t_multiplier(1.0, &w, &far), 0.0);
    // |z| = 3n² and 𝟏·z = 1/2: z = (1/6)𝟏 + 3n²·v with v a unit vector ⊥ 𝟏.
    let v = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
    let a = ((3.0 * n2) * (3.0 * n2) - 1.0 / 12.0).sqrt();
    let z: Vec<f64> = v.iter().map(|x| 1.0 / 6.0 + a * x).collect();
    let r = 0.5;
    let xi: Vec<f64> = z.iter().zip(&w).map(|(zz, ww)| zz / (r * ww)).collect();
    let want = m_o(0.5) * (1.0 - transition(0.5));
    assert!((t_multiplier(r, &w, &xi) - want).abs() < 1e-12);
    assert!((m_multiplier(n, &z) - want).abs() < 1e-12);
}

#[test]
fn plancherel_under_the_documented_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for dims in [vec![64], vec![16, 32], vec![8, 8, 8]] {
        let f = random_grid(dims, &mut rng);
        let spec = forward(&f).unwrap();
        let lhs: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        let rhs = f.len() as f64 * f.data().iter().map(|v| v * v).sum::<f64>();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }
    let bad = GridFunction::zeros(vec![12, 16], 1.0).unwrap();
    assert!(forward(&bad).is_err());
    let stack = MultiplierStack::dyadic(2).unwrap();
    assert!(apply_k(&bad, pair(1, 2), 0, &stack).is_err());
}

#[test]
fn k_is_one_or_zero_on_pure_cone_frequencies() {
    let stack = MultiplierStack::dyadic(2).unwrap();
    let s = pair(1, 2);
    let theta = stack.sequence(s).unwrap().theta(0);
    assert_eq!(theta, 1.0);
    // (−3, 3) lies on the axis ξ_1 = −θξ_2; (3, 3) has ratio 1.
    let on = waves(32, 2, &[vec![-3, 3], vec![-5, 5]]);
    let off = waves(32, 2, &[vec![3, 3], vec![7, 6]]);
    let k_on = apply_k(&on, s, 0, &stack).unwrap();
    let k_off = apply_k(&off, s, 0, &stack).unwrap();
    assert!(dist(&k_on, &on) <= 1e-12 * l2(&on));
    assert!(l2(&k_off) <= 1e-12 * l2(&off));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [2, 3] {
        let stack = MultiplierStack::dyadic(n).unwrap();
        let dims = if n == 2 { vec![32, 32] } else { vec![16, 8, 16] };
        for i in -2..=2 {
            let f = random_grid(dims.clone(), &mut rng);
            let g = apply_k(&f, pair(1, n), i, &stack).unwrap();
            assert!(l2(&g) <= l2(&f) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn r_examples_and_idempotence() {
    let stack = MultiplierStack::dyadic(2).unwrap();
    let s = pair(1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let f = random_grid(vec![32, 32], &mut rng);
    for i in -2..=2 {
        let idx: CellIndex = [(s, i)].into_iter().collect();
        let r = apply_r(&f, &idx, &stack).unwrap();
        let k = apply_k(&f, s, i, &stack).unwrap();
        let diff = f.with_data(f.data().iter().zip(k.data()).map(|(a, b)| a - b).collect()).unwrap();
        assert!(dist(&r, &diff) <= 1e-12 * l2(&f));
    }

    let idx: CellIndex = [(s, 0)].into_iter().collect();
    let inside = waves(32, 2, &[vec![-3, 3], vec![-6, 6]]);
    assert!(l2(&apply_r(&inside, &idx, &stack).unwrap()) <= 1e-12 * l2(&inside));

    // Only ψ ∈ {0, 1} on the support: R is a projection there.
    let mixed = waves(32, 2, &[vec![-3, 3], vec![3, 3], vec![9, 1], vec![2, 11]]);
    let once = apply_r(&mixed, &idx, &stack).unwrap();
    let twice = apply_r(&once, &idx, &stack).unwrap();
    assert!(dist(&once, &twice) <= 1e-12 * l2(&mixed));
    assert!(l2(&once) > 0.5 * l2(&mixed));

    let stack3 = MultiplierStack::dyadic(3).unwrap();
    let short: CellIndex = [(pair(1, 2), 0)].into_iter().collect();
    let g = random_grid(vec![8, 8, 8], &mut rng);
    assert!(apply_r(&g, &short, &stack3).is_err());
}

#[test]
fn inclusion_exclusion_in_three_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let stack = MultiplierStack::dyadic(3).unwrap();
    for _ in 0..10 {
        let f = random_grid(vec![16, 16, 16], &mut rng);
        let w = Direction::new((0..3).map(|_| rng.gen_range(0.05..1.0)).collect()).unwrap().unit();
        let idx: CellIndex = stack.sequences().keys().map(|s| (*s, rng.gen_range(-3..4))).collect();
        let r = 2f64.powf(rng.gen_range(-1.0..3.0));
        assert!(inclusion_exclusion_residual(&f, r, &w, &idx, &stack).unwrap() <= 1e-10);
    }
    let zero = GridFunction::zeros(vec![16, 16, 16], 1.0).unwrap();
    let idx: CellIndex = stack.sequences().keys().map(|s| (*s, 0)).collect();
    assert_eq!(inclusion_exclusion_residual(&zero, 1.0, &[0.6, 0.0, 0.8], &idx, &stack).unwrap(), 0.0);
}

fn cell_of(w: &Direction, stack: &MultiplierStack) -> CellIndex {
    let b = Basis::standard(stack.n());
    stack
        .sequences()
        .iter()
        .map(|(s, q)| match segment_index(w, *s, q, &b).unwrap() {
            SegmentIndex::Finite(i) => (*s, i),
            SegmentIndex::Infinite => panic!("zero coordinate"),
        })
        .collect()
}

#[test]
fn vanishing_inside_a_cell_and_witness_outside() {
    let lattice = FrequencyLattice { half: 64, spacing: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in [2usize, 3] {
        let stack = MultiplierStack::uniform(n, &LacunarySequence::dyadic().refine()).unwrap();
        for _ in 0..3 {
            let w = Direction::new((0..n).map(|_| rng.gen_range(0.05..1.0)).collect()).unwrap();
            let idx = cell_of(&w, &stack);
            for e in [-6, 0, 5] {
                let v = vanishing_check(2f64.powi(e), &w, &idx, &stack, &lattice).unwrap();
                assert_eq!(v.max, 0.0);
                assert!(v.witness.is_none());
            }
        }
    }

    let stack = MultiplierStack::uniform(2, &LacunarySequence::dyadic().refine()).unwrap();
    let s = pair(1, 2);
    let w = Direction::new(vec![1.0, 0.175]).unwrap();
    let idx: CellIndex = [(s, 0)].into_iter().collect();
    assert!(matches!(vanishing_check(1.0, &w, &idx, &stack, &lattice), Err(lacuna::Error::Precondition(_))));
    let v = vanishing_max(1.0, &w.unit(), &idx, &stack, &lattice).unwrap();
    assert!(v.max > 0.0);
    let x = v.witness.unwrap();
    let direct = t_multiplier(1.0, &w.unit(), &x) * (1.0 - stack.cone(s, 0).unwrap().psi_eval(&x));
    assert_eq!(direct.abs(), v.max);

    // The unrefined dyadic stack has cells wider than 3/2.
    let coarse = MultiplierStack::dyadic(2).unwrap();
    let w = Direction::new(vec![1.0, 0.7]).unwrap();
    assert!(vanishing_check(1.0, &w, &cell_of(&w, &coarse), &coarse, &lattice).is_err());
    let neg = Direction::new(vec![1.0, -0.7]).unwrap();
    assert!(check_cell(&neg, &cell_of(&w, &stack), &stack).is_err());
}

#[test]
fn vanishing_scales_with_r() {
    let stack = MultiplierStack::uniform(2, &LacunarySequence::dyadic().refine()).unwrap();
    let idx: CellIndex = [(pair(1, 2), 0)].into_iter().collect();
    let w = Direction::new(vec![1.0, 0.175]).unwrap().unit();
    for r in [0.25, 4.0] {
        let a = vanishing_max(r, &w, &idx, &stack, &FrequencyLattice { half: 64, spacing: 1.0 }).unwrap();
        let b = vanishing_max(1.0, &w, &idx, &stack, &FrequencyLattice { half: 64, spacing: r }).unwrap();
        assert_eq!(a.max, b.max);
    }
}

#[test]
fn emptiness_small_runs() {
    let opts = EmptinessOptions { samples: 20_000, ..EmptinessOptions::default() };
    for (n, res) in [(2usize, 256usize), (3, 64), (4, 24)] {
        assert!(region_emptiness_search(n, 1.0, res, &opts).unwrap().is_empty());
        assert!(region_emptiness_search(n, 0.125, res, &opts).unwrap().is_empty());
    }
    // The all-equal ray: |ξ| ≥ 2n² forces Σξ = n·t ≥ 2n^{3/2} > 1.
    for n in 2..=6usize {
        let t = 2.0 * (n * n) as f64 / (n as f64).sqrt();
        assert!(n as f64 * t > 1.0);
    }
    // Dropping the pairwise constant to zero leaves a nonempty region, so
    // the search does see points when there are any.
    let loose = EmptinessOptions { samples: 20_000, cond3: Some(0.0), ..EmptinessOptions::default() };
    let hits = region_emptiness_search(2, 1.0, 256, &loose).unwrap();
    assert!(!hits.is_empty());
    for h in &hits {
        assert!(h.iter().sum::<f64>().abs() <= 1.0);
        assert!(h.iter().map(|x| x * x).sum::<f64>().sqrt() >= 8.0);
    }
}

#[test]
fn overlap_counts() {
    let s = pair(1, 2);
    let single = MultiplierStack::uniform(2, &LacunarySequence::geometric(1.0, 0.01).unwrap()).unwrap();
    assert_eq!(overlap_count(&single, s, 64).unwrap(), 1);
    // Independent count for dyadic cones: ψ_i(ξ) > 0 exactly when
    // ρ = |ξ_1/ξ_2| and θ_i = 2^{−i} satisfy |θ_i − ρ| < c(θ_i + ρ) with
    // opposite signs, i.e. θ_i/ρ ∈ ((1−c)/(1+c), (1+c)/(1−c)).
    for n in [2usize, 3] {
        let c = n as f64 / (n as f64 + 1.0);
        let (lo, hi) = ((1.0 - c) / (1.0 + c), (1.0 + c) / (1.0 - c));
        let mut best = 0;
        for a in 1..=64i64 {
            for b in 1..=64i64 {
                let rho = a as f64 / b as f64;
                let cnt = (-12..=12)
                    .filter(|&i| {
                        let q = 2f64.powi(-i) / rho;
                        q > lo && q < hi
                    })
                    .count();
                best = best.max(cnt);
            }
        }
        let stack = MultiplierStack::dyadic(n).unwrap();
        assert_eq!(overlap_count(&stack, s, 64).unwrap(), best);
    }
}

#[test]
fn square_function_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let s = pair(1, 2);
    let stack = MultiplierStack::dyadic(2).unwrap();
    let bound = overlap_count(&stack, s, 64).unwrap() as f64;
    for _ in 0..10 {
        let f = random_grid(vec![32, 32], &mut rng);
        let (l, r) = square_function_p2(&f, &stack, s).unwrap();
        assert!(l <= bound * r);
    }
    assert_eq!(square_function_p2(&GridFunction::zeros(vec![8, 8], 1.0).unwrap(), &stack, s).unwrap(), (0.0, 0.0));
    // Frequencies in the ψ_0 = 1 region of a widely spaced stack only.
    let sparse = MultiplierStack::uniform(2, &LacunarySequence::geometric(1.0, 0.01).unwrap()).unwrap();
    let f = waves(32, 2, &[vec![-3, 3], vec![-5, 5]]);
    let (l, r) = square_function_p2(&f, &sparse, s).unwrap();
    assert!((l - r).abs() <= 1e-12 * r);
}

#[test]
fn s_is_dominated_by_the_strong_maximal_function() {
    // Nonnegative bump away from the boundary so periodic and zero-extended
    // evaluations see the same data.
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let f = GridFunction::from_fn(vec![64, 64], 1.0, |i| {
        if (20..44).contains(&i[0]) && (20..44).contains(&i[1]) {
            rng.gen_range(0.0..1.0)
        } else {
            0.0
        }
    })
    .unwrap();
    let mstr = strong_maximal(&f, &RadiusSet::dyadic(&f)).unwrap();
    let mut worst = 0.0f64;
    for (r, w) in [(1.0, [0.6, 0.8]), (2.0, [1.0, 0.0]), (0.5, [0.28, 0.96])] {
        let sf = apply_multiplier(&f, |xi| s_multiplier(r, &w, xi)).unwrap();
        for (a, b) in sf.data().iter().zip(mstr.data()) {
            if *b > 1e-3 {
                worst = worst.max(a.abs() / b);
            }
        }
    }
    // Only "a constant multiple" is claimed; 16 is a loose sanity ceiling.
    assert!(worst <= 16.0, "|S f| / M_str f reached {worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inclusion_exclusion_is_exact(seed in any::<u64>(), n in 2usize..=3, r_exp in -2.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = if n == 2 { vec![16, 16] } else { vec![8, 8, 8] };
        let f = random_grid(dims, &mut rng);
        let stack = MultiplierStack::dyadic(n).unwrap();
        let w = Direction::new((0..n).map(|_| rng.gen_range(0.05..1.0)).collect()).unwrap().unit();
        let idx: CellIndex = stack.sequences().keys().map(|s| (*s, rng.gen_range(-3..4))).collect();
        prop_assert!(inclusion_exclusion_residual(&f, 2f64.powf(r_exp), &w, &idx, &stack).unwrap() <= 1e-10);
    }

    #[test]
    fn psi_is_degree_zero(theta in 0.01f64..100.0, a in -10.0f64..10.0, b in -10.0f64..10.0, t in 0.001f64..1000.0) {
        let c = ConeSpec::new(3, pair(1, 3), theta).unwrap();
        let xi = [a, 0.3, b];
        let scaled = [t * a, 0.3, t * b];
        let p = c.psi_eval(&xi);
        prop_assert!((c.psi_eval(&scaled) - p).abs() <= 1e-9);
    }
}
