use std::ops::RangeInclusive;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use lacuna::direction_sets::{parse_rational, shadow, Basis, DirectionSet, LacunaryCertificate, LacunarySequence};
use lacuna::generators::{
    besicovitch_family, carbery_certificate, carbery_directions, kakeya_lift, nsw_directions, rational_slope_set,
    rotated_accumulating_set, KakeyaLift, NswFamily,
};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Nsw,
    Carbery,
    Rational,
    Rotated,
    Besicovitch,
}

/// Options shared by every command that builds a named family.
#[derive(Args, Debug, Clone, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Ambient dimension (carbery, rational, rotated).
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Number of directions (nsw, rational, rotated).
    #[arg(long, default_value_t = 16)]
    pub count: usize,
    /// Exponents a_1 < … < a_n of the nsw family.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 3.0])]
    pub exponents: Vec<f64>,
    /// Ratio of the geometric sequence ϑ_i = ratio^i used by nsw.
    #[arg(long, default_value = "1/2")]
    pub ratio: String,
    /// Inclusive exponent range k of the carbery family, as `a..b`.
    #[arg(long, default_value = "0..2")]
    pub k_range: String,
    /// Rotation budget of the rotated family.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Levels N of the Besicovitch family (2^N rectangles).
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Lift the Besicovitch family to R^n along a rational-slope set.
    #[arg(long)]
    pub lift: bool,
}

/// `a..b` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let a: i64 = a.parse().with_context(|| format!("bad range start in {s:?}"))?;
    let b: i64 = b.parse().with_context(|| format!("bad range end in {s:?}"))?;
    if a > b {
        bail!("empty range {s:?}");
    }
    Ok(a..=b)
}

pub fn parse_axes(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|t| t.trim().parse::<usize>().with_context(|| format!("bad axis {t:?}"))).collect()
}

pub fn sequence(ratio: &str) -> Result<LacunarySequence> {
    let r = parse_rational(ratio)?;
    Ok(LacunarySequence::geometric_exact(parse_rational("1")?, r)?)
}

/// E_N lifted from the plane of the first two coordinates (first axis
/// swapped in so slopes are positive), shaded by a rational-slope set of
/// 2^N directions in R^n.
pub fn rational_lift(n: usize, levels: usize) -> Result<(DirectionSet, KakeyaLift)> {
    if n < 3 {
        bail!("the lift needs n >= 3, got {n}");
    }
    let count = 1usize.checked_shl(levels as u32).filter(|_| levels < 24).context("too many levels")?;
    let omega = rational_slope_set(n, count)?;
    let plane = Basis::axes(n, &[1, 0]);
    let sh = shadow(&omega, &Basis::axes(n, &[0, 1]));
    let fam = besicovitch_family(levels, &plane, Some(&sh))?;
    let mut axes = vec![1, 0];
    axes.extend(2..n);
    let lift = kakeya_lift(&fam, &omega, &Basis::axes(n, &axes))?;
    Ok((omega, lift))
}

pub enum Built {
    Directions { set: DirectionSet, nsw: Option<NswFamily> },
    Rectangles(lacuna::generators::RectangleFamily),
    Lift(KakeyaLift),
}

impl FamilyArgs {
    pub fn build(&self) -> Result<Built> {
        let family = self.family.context("--family is required")?;
        Ok(match family {
            Family::Nsw => {
                let fam = nsw_directions(&self.exponents, &sequence(&self.ratio)?, self.count)?;
                Built::Directions { set: fam.directions.clone(), nsw: Some(fam) }
            }
            Family::Carbery => {
                Built::Directions { set: carbery_directions(self.n, parse_range(&self.k_range)?)?, nsw: None }
            }
            Family::Rational => Built::Directions { set: rational_slope_set(self.n, self.count)?, nsw: None },
            Family::Rotated => Built::Directions {
                set: rotated_accumulating_set(self.n, self.count, self.delta)?.directions,
                nsw: None,
            },
            Family::Besicovitch if self.lift => Built::Lift(rational_lift(self.n, self.levels)?.1),
            Family::Besicovitch => Built::Rectangles(besicovitch_family(self.levels, &Basis::standard(2), None)?),
        })
    }

    /// The family's own certificate, when it has one.
    pub fn canonical_certificate(&self, built: &Built) -> Result<LacunaryCertificate> {
        match (self.family, built) {
            (_, Built::Directions { nsw: Some(f), .. }) => Ok(f.certificate()?),
            (Some(Family::Carbery), Built::Directions { set, .. }) => Ok(carbery_certificate(set)?),
            (f, _) => bail!("no canonical certificate for family {f:?}"),
        }
    }
}
