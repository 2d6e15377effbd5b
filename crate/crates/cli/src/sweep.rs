use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use lacuna::direction_sets::{Basis, DirectionSet, LacunarySequence};
use lacuna::generators::{besicovitch_family, nsw_directions};
use lacuna::maximal::{measure_union, LiftField, LiftOptions, UnionInput};
use serde::Serialize;

use crate::families::{parse_range, rational_lift, Family};
use crate::output::{Csv, Outputs};
use crate::Finished;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaKind {
    /// The rational-slope set that shades the lift.
    Rational,
    /// 2^N members of the nsw family with exponents 1..n.
    Nsw,
}

#[derive(Args, Debug, Serialize)]
pub struct NormSweepArgs {
    #[arg(long, value_enum, default_value = "besicovitch")]
    pub family: Family,
    /// Inclusive range of levels N.
    #[arg(long = "N", default_value = "2..8")]
    pub levels: String,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Raster points per side of the planar grid.
    #[arg(long, default_value_t = 512)]
    pub resolution: usize,
    /// Samples of the transverse coordinates.
    #[arg(long, default_value_t = 16)]
    pub slices: usize,
    #[arg(long, value_enum, default_value = "rational")]
    pub omega: OmegaKind,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn emit_csv(csv: &Csv, path: Option<&std::path::Path>, out: &mut Outputs) -> Result<()> {
    match path {
        Some(p) => out.write(p, csv.as_str().as_bytes()),
        None => {
            print!("{}", csv.as_str());
            Ok(())
        }
    }
}

fn levels(spec: &str) -> Result<Vec<usize>> {
    let r = parse_range(spec)?;
    if *r.start() < 1 || *r.end() > 20 {
        bail!("levels must lie in 1..20, got {spec}");
    }
    Ok(r.map(|v| v as usize).collect())
}

pub fn norm_sweep(a: &NormSweepArgs, out: &mut Outputs) -> Result<Finished> {
    if a.family != Family::Besicovitch {
        bail!("norm-sweep supports --family besicovitch only");
    }
    if !(a.p >= 1.0 && a.p.is_finite()) {
        bail!("--p must be a finite number >= 1");
    }
    let opts = LiftOptions { resolution: a.resolution, slices: a.slices, ..LiftOptions::default() };
    let mut csv = Csv::new(&["N", "directions", "alpha", "ratio", "min_dilated"]);
    for nn in levels(&a.levels)? {
        let (rational, lift) = rational_lift(a.n, nn)?;
        let omega: DirectionSet = match a.omega {
            OmegaKind::Rational => rational,
            OmegaKind::Nsw => {
                let exps: Vec<f64> = (1..=a.n).map(|e| e as f64).collect();
                nsw_directions(&exps, &LacunarySequence::dyadic(), 1 << nn)?.directions
            }
        };
        let field = LiftField::new(&lift, &opts)?;
        let vals = field.maximal(&omega)?;
        let ratio = field.norm_ratio(&vals, a.p)?;
        let min = field.dilated_region().iter().map(|&(c, t)| vals[t][c]).fold(f64::INFINITY, f64::min);
        csv.row(&[
            nn.to_string(),
            omega.len().to_string(),
            field.alpha().to_string(),
            ratio.to_string(),
            min.to_string(),
        ]);
    }
    emit_csv(&csv, a.csv.as_deref(), out)?;
    Ok(Finished { primary: a.csv.clone(), success: true })
}

#[derive(Args, Debug, Serialize)]
pub struct BesicovitchArgs {
    /// Inclusive range of levels N.
    #[arg(long = "N", default_value = "1..8")]
    pub levels: String,
    /// Raster points per side of the unit square.
    #[arg(long, default_value_t = 4096)]
    pub resolution: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn besicovitch(a: &BesicovitchArgs, out: &mut Outputs) -> Result<Finished> {
    let plane = Basis::standard(2);
    let mut csv = Csv::new(&["N", "rectangles", "union", "dilated_union", "ratio"]);
    for nn in levels(&a.levels)? {
        let fam = besicovitch_family(nn, &plane, None)?;
        let u = measure_union(UnionInput::Family(&fam), a.resolution, 1)?;
        let d = measure_union(UnionInput::Family(&fam), a.resolution, 3)?;
        csv.row(&[nn.to_string(), fam.rectangles.len().to_string(), u.to_string(), d.to_string(), (u / d).to_string()]);
    }
    emit_csv(&csv, a.csv.as_deref(), out)?;
    Ok(Finished { primary: a.csv.clone(), success: true })
}
