use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use lacuna::direction_sets::{
    shadow as project, verify_lacunary_certificate, Basis, DirectionSet, LacunaryCertificate, Verdict,
};
use lacuna::maximal::{brute_oracle, directional_maximal, GridFunction, RadiusSet};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::families::{parse_axes, Built, FamilyArgs};
use crate::output::{json_text, Outputs};
use crate::Finished;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

/// Writes JSON to `out`, or prints it when no path is given.
fn emit<T: Serialize>(value: &T, path: Option<&Path>, out: &mut Outputs) -> Result<()> {
    match path {
        Some(p) => out.write_json(p, value),
        None => {
            print!("{}", json_text(value)?);
            Ok(())
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn generate(a: &GenerateArgs, out: &mut Outputs) -> Result<Finished> {
    let path = a.out.as_deref();
    match a.family.build()? {
        Built::Directions { set, .. } => emit(&set, path, out)?,
        Built::Rectangles(f) => emit(&f, path, out)?,
        Built::Lift(l) => emit(&l, path, out)?,
    }
    Ok(Finished { primary: a.out.clone(), success: true })
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    /// Direction set JSON, instead of a named family.
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// `auto` (built by recursive dissection), `canonical` (the family's
    /// own), or a certificate JSON file.
    #[arg(long, default_value = "auto")]
    pub certificate: String,
    /// Maximum dissection depth for `auto` (default n + 1).
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Also write the certificate as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn classify(a: &ClassifyArgs, out: &mut Outputs) -> Result<Finished> {
    let (omega, built) = match &a.input {
        Some(p) => (read_json::<DirectionSet>(p)?, None),
        None => match a.family.build()? {
            Built::Directions { set, nsw } => (set.clone(), Some(Built::Directions { set, nsw })),
            _ => bail!("classify needs a direction family, not rectangles"),
        },
    };
    let cert = match a.certificate.as_str() {
        "auto" => {
            let depth = a.max_depth.unwrap_or(omega.n() + 1);
            LacunaryCertificate::auto(&omega, None, depth)
                .with_context(|| format!("no certificate within depth {depth} (see --max-depth)"))?
        }
        "canonical" => {
            let b = built.as_ref().context("--certificate canonical needs --family")?;
            a.family.canonical_certificate(b)?
        }
        file => read_json(Path::new(file))?,
    };
    if let Some(p) = &a.out {
        out.write_json(p, &cert)?;
    }
    match verify_lacunary_certificate(&omega, &cert) {
        Verdict::Valid { order } => {
            println!("order {order}");
            Ok(Finished { primary: a.out.clone(), success: true })
        }
        Verdict::Invalid(w) => {
            println!("invalid certificate");
            println!("witness {w}");
            Ok(Finished { primary: a.out.clone(), success: false })
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ShadowArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Coordinate axes spanning the target subspace, e.g. `0,1`.
    #[arg(long, default_value = "0,1")]
    pub axes: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn shadow(a: &ShadowArgs, out: &mut Outputs) -> Result<Finished> {
    let omega: DirectionSet = read_json(&a.input)?;
    let axes = parse_axes(&a.axes)?;
    if let Some(&bad) = axes.iter().find(|&&x| x >= omega.n()) {
        bail!("axis {bad} out of range for n = {}", omega.n());
    }
    let sh = project(&omega, &Basis::axes(omega.n(), &axes));
    emit(&sh, a.out.as_deref(), out)?;
    Ok(Finished { primary: a.out.clone(), success: true })
}

#[derive(Args, Debug, Serialize)]
pub struct MaxopArgs {
    /// Grid in the LACGRID1 binary format.
    #[arg(long)]
    pub input: PathBuf,
    /// Direction set JSON.
    #[arg(long)]
    pub directions: PathBuf,
    /// `dyadic` or `explicit:r1,r2,…`.
    #[arg(long, default_value = "dyadic")]
    pub radii: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Use the brute-force reference evaluator.
    #[arg(long)]
    pub oracle: bool,
}

pub fn maxop(a: &MaxopArgs, out: &mut Outputs) -> Result<Finished> {
    let file = fs::File::open(&a.input).with_context(|| format!("cannot open {}", a.input.display()))?;
    let f = GridFunction::read_from(&mut BufReader::new(file))
        .with_context(|| format!("cannot read grid {}", a.input.display()))?;
    let omega: DirectionSet = read_json(&a.directions)?;
    let radii = RadiusSet::parse(&a.radii, &f)?;
    let m = if a.oracle { brute_oracle(&f, &omega, &radii)? } else { directional_maximal(&f, &omega, &radii)? };
    let mut bytes = Vec::new();
    m.write_to(&mut bytes)?;
    out.write(&a.out, &bytes)?;
    Ok(Finished { primary: Some(a.out.clone()), success: true })
}
