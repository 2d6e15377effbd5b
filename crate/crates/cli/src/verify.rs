use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use lacuna::direction_sets::{segment_index, sigma_pairs, Basis, Direction, LacunarySequence, SegmentIndex};
use lacuna::maximal::GridFunction;
use lacuna::multipliers::{
    inclusion_exclusion_residual, overlap_count, region_emptiness_search, square_function_p2, vanishing_check,
    CellIndex, EmptinessOptions, FrequencyLattice, MultiplierStack,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{json_text, Outputs};
use crate::Finished;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Emptiness,
    Vanishing,
    InclusionExclusion,
    SquareFunction,
    Overlap,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Emptiness => "emptiness",
            Check::Vanishing => "vanishing",
            Check::InclusionExclusion => "inclusion-exclusion",
            Check::SquareFunction => "square-function",
            Check::Overlap => "overlap",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
}

/// Options common to `verify` and `report`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct CheckOptions {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Random trials (vanishing, inclusion-exclusion, square-function).
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Grid points per axis for the emptiness scan (default 512 for n = 2,
    /// 128 for n = 3, 48 above).
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Random samples for the emptiness search.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Required bound for the overlap count (default ⌈log2((2n+1)²)⌉).
    #[arg(long)]
    pub bound: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    pub report: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    #[command(flatten)]
    #[serde(flatten)]
    pub options: CheckOptions,
}

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub options: CheckOptions,
}

/// Tolerance for identities that hold exactly up to rounding.
const RESIDUAL_TOL: f64 = 1e-10;

fn random_grid(dims: Vec<usize>, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    Ok(GridFunction::from_fn(dims, 1.0, |_| rng.gen_range(-1.0..1.0))?)
}

fn positive_direction(n: usize, rng: &mut ChaCha8Rng) -> Result<Direction> {
    Ok(Direction::new((0..n).map(|_| rng.gen_range(0.05..1.0)).collect())?)
}

fn cube(n: usize, side: usize) -> Vec<usize> {
    vec![side; n]
}

fn run_check(check: Check, o: &CheckOptions, seed: u64) -> Result<Value> {
    let n = o.n;
    if n < 2 {
        bail!("--n must be at least 2");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = json!({ "n": n, "seed": seed });
    let body = match check {
        Check::Emptiness => {
            let res = o.resolution.unwrap_or(match n {
                2 => 512,
                3 => 128,
                _ => 48,
            });
            let opts = EmptinessOptions { samples: o.samples, seed, cond3: None };
            let hits = region_emptiness_search(n, 1.0, res, &opts)?;
            params["resolution"] = json!(res);
            params["samples"] = json!(o.samples);
            json!({ "witnesses": hits, "pass": hits.is_empty() })
        }
        Check::Vanishing => {
            let stack = MultiplierStack::uniform(n, &LacunarySequence::dyadic().refine())?;
            let lattice = FrequencyLattice::default();
            let basis = Basis::standard(n);
            let mut worst = 0.0f64;
            let mut witnesses = Vec::new();
            for _ in 0..o.trials {
                let w = positive_direction(n, &mut rng)?;
                let mut idx = CellIndex::new();
                for (s, q) in stack.sequences() {
                    match segment_index(&w, *s, q, &basis)? {
                        SegmentIndex::Finite(i) => idx.insert(*s, i),
                        SegmentIndex::Infinite => bail!("direction with a zero coordinate"),
                    };
                }
                for e in -10..=10 {
                    let r = 2f64.powi(e);
                    let v = vanishing_check(r, &w, &idx, &stack, &lattice)?;
                    worst = worst.max(v.max);
                    if let Some(xi) = v.witness {
                        witnesses.push(json!({ "omega": w.unit(), "r": r, "xi": xi, "value": v.max }));
                    }
                }
            }
            params["trials"] = json!(o.trials);
            params["radii"] = json!("2^-10..2^10");
            json!({ "max_residual": worst, "witnesses": witnesses, "pass": worst == 0.0 })
        }
        Check::InclusionExclusion => {
            let stack = MultiplierStack::dyadic(n)?;
            let side = if n == 2 { 32 } else { 16 };
            let mut worst = 0.0f64;
            for _ in 0..o.trials {
                let f = random_grid(cube(n, side), &mut rng)?;
                let w = positive_direction(n, &mut rng)?.unit();
                let idx: CellIndex = stack.sequences().keys().map(|s| (*s, rng.gen_range(-3..4))).collect();
                let r = 2f64.powf(rng.gen_range(-1.0..3.0));
                worst = worst.max(inclusion_exclusion_residual(&f, r, &w, &idx, &stack)?);
            }
            params["trials"] = json!(o.trials);
            params["grid"] = json!(cube(n, side));
            params["tolerance"] = json!(RESIDUAL_TOL);
            json!({ "max_residual": worst, "pass": worst <= RESIDUAL_TOL })
        }
        Check::SquareFunction => {
            let stack = MultiplierStack::dyadic(n)?;
            let mut dims = vec![64, 64];
            dims.extend(std::iter::repeat(16).take(n - 2));
            let mut worst = 0.0f64;
            let mut pass = true;
            let mut counts = serde_json::Map::new();
            for sigma in sigma_pairs(n) {
                let count = overlap_count(&stack, sigma, 256)?;
                let mut local = 0.0f64;
                for _ in 0..o.trials {
                    let f = random_grid(dims.clone(), &mut rng)?;
                    let (l, r) = square_function_p2(&f, &stack, sigma)?;
                    if r > 0.0 {
                        local = local.max(l / r);
                    }
                }
                // Σ_i |ψ_i|² ≤ #overlaps pointwise, so Plancherel bounds the ratio.
                pass &= local <= count as f64 * (1.0 + RESIDUAL_TOL);
                worst = worst.max(local);
                counts.insert(sigma.to_string(), json!({ "overlap_count": count, "max_ratio": local }));
            }
            params["trials"] = json!(o.trials);
            params["grid"] = json!(dims);
            json!({ "max_ratio": worst, "sigmas": counts, "pass": pass })
        }
        Check::Overlap => {
            let stack = MultiplierStack::dyadic(n)?;
            let side = (2 * n + 1) as f64;
            let bound = o.bound.unwrap_or((2.0 * side.log2()).ceil() as usize);
            let mut counts = serde_json::Map::new();
            let mut worst = 0;
            for sigma in sigma_pairs(n) {
                let c = overlap_count(&stack, sigma, 256)?;
                worst = worst.max(c);
                counts.insert(sigma.to_string(), json!(c));
            }
            params["half"] = json!(256);
            params["bound"] = json!(bound);
            json!({ "max_overlap": worst, "sigmas": counts, "pass": worst <= bound })
        }
    };
    let mut report = body;
    report["check"] = json!(check.name());
    report["parameters"] = params;
    Ok(report)
}

fn emit(report: &Value, o: &CheckOptions, out: &mut Outputs) -> Result<()> {
    match &o.out {
        Some(p) => out.write_json(p, report),
        None => {
            print!("{}", json_text(report)?);
            Ok(())
        }
    }
}

pub fn verify(a: &VerifyArgs, seed: u64, out: &mut Outputs) -> Result<Finished> {
    let report = run_check(a.check, &a.options, seed)?;
    emit(&report, &a.options, out)?;
    let success = report["pass"] == json!(true);
    if !success {
        eprintln!("check {} failed", a.check.name());
    }
    Ok(Finished { primary: a.options.out.clone(), success })
}

pub fn report(a: &ReportArgs, seed: u64, out: &mut Outputs) -> Result<Finished> {
    let checks = [Check::Emptiness, Check::Vanishing, Check::InclusionExclusion, Check::SquareFunction, Check::Overlap];
    let mut all = Vec::new();
    let mut success = true;
    for c in checks {
        let r = run_check(c, &a.options, seed)?;
        success &= r["pass"] == json!(true);
        all.push(r);
    }
    let report = json!({ "checks": all, "pass": success });
    emit(&report, &a.options, out)?;
    Ok(Finished { primary: a.options.out.clone(), success })
}
