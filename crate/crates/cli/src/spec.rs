//! Space tags (`s+:2`, `e:3`, `h:3`) and the body mini-language
//! `kind:key=val,...`.
//!
//! Keys mirror the JSON profile fields. Lists are separated by `/`, so
//! `ellipsoid:semiaxes=1/0.5/2`. Ridge terms repeat their keys, each
//! `direction` opening a new term. A spec naming an existing file, or
//! starting with `@`, is read as a JSON body.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use busemann::bodies::{
    make_ball, make_ellipsoid, make_lune, make_perturbed_ball, ConeBase, RadialProfile, RidgeTerm, StarBody,
};
use busemann::spaces::Direction;
use busemann::SpaceSpec;

use crate::CliError;

pub fn parse_space(s: &str) -> Result<SpaceSpec, CliError> {
    let (tag, dim) = s
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("--space: expected `tag:dim`, got `{s}`")))?;
    let dim: usize = dim
        .parse()
        .map_err(|_| CliError::usage(format!("--space: dimension `{dim}` is not an integer")))?;
    let delta = match tag {
        "s+" | "s" => 1,
        "e" | "r" => 0,
        "h" => -1,
        _ => {
            return Err(CliError::usage(format!(
                "--space: unknown tag `{tag}` (use s+, e or h)"
            )))
        }
    };
    SpaceSpec::new(delta, dim).map_err(|e| CliError::usage(format!("--space: {e}")))
}

struct Fields<'a> {
    kind: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(spec: &'a str) -> Result<Self, CliError> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let pairs = rest
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.split_once('=')
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .ok_or_else(|| CliError::usage(format!("--body: expected key=value, got `{p}`")))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            kind: kind.trim(),
            pairs,
        })
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn num(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key).map(|v| number(key, v)).transpose()
    }

    fn req(&self, key: &str) -> Result<f64, CliError> {
        self.num(key)?
            .ok_or_else(|| CliError::usage(format!("--body: `{}` needs `{key}=`", self.kind)))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.get(key).map(|v| list(key, v)).transpose()
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for (k, _) in &self.pairs {
            if *k != "symmetric" && !allowed.contains(k) {
                return Err(CliError::usage(format!(
                    "--body: `{}` has no parameter `{k}`",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

fn number(key: &str, v: &str) -> Result<f64, CliError> {
    let x = match v {
        "pi" => std::f64::consts::PI,
        "pi/2" => FRAC_PI_2,
        _ => v
            .parse()
            .map_err(|_| CliError::usage(format!("--body: `{key}={v}` is not a number")))?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::usage(format!("--body: `{key}` must be finite")))
    }
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split('/').map(|x| number(key, x.trim())).collect()
}

fn pairs(key: &str, v: Vec<f64>) -> Result<Vec<[f64; 2]>, CliError> {
    if v.len() % 2 != 0 {
        return Err(CliError::usage(format!(
            "--body: `{key}` needs an even number of entries"
        )));
    }
    Ok(v.chunks(2).map(|c| [c[0], c[1]]).collect())
}

fn direction(key: &str, v: Vec<f64>, n: usize) -> Result<Direction, CliError> {
    if v.len() != n {
        return Err(CliError::usage(format!(
            "--body: `{key}` needs {n} coordinates, got {}",
            v.len()
        )));
    }
    Direction::normalized(v).map_err(|e| CliError::usage(format!("--body: `{key}`: {e}")))
}

/// Reads a body from a JSON file or the mini-language.
pub fn parse_body(spec: &str, space: Option<SpaceSpec>) -> Result<StarBody, CliError> {
    let path = spec.strip_prefix('@').unwrap_or(spec);
    if spec.starts_with('@') || (spec.ends_with(".json") && Path::new(path).is_file()) {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("--body: cannot read `{path}`: {e}")))?;
        let body = StarBody::from_json(&text).map_err(|e| CliError::usage(format!("--body `{path}`: {e}")))?;
        if let Some(s) = space {
            if *body.space() != s {
                return Err(CliError::usage(format!(
                    "--body `{path}` lives in {}, but --space is {s}",
                    body.space()
                )));
            }
        }
        return Ok(body);
    }
    let f = Fields::parse(spec)?;
    let space = space.ok_or_else(|| CliError::usage("--body needs --space (or --dim) to place the body"))?;
    let n = space.dim();
    let wrap = |e: busemann::Error| CliError::from_core("--body", e);
    let symmetric = match f.get("symmetric") {
        None => None,
        Some("true") => Some(true),
        Some("false") => Some(false),
        Some(v) => return Err(CliError::usage(format!("--body: symmetric={v} is not true or false"))),
    };
    let body = match f.kind {
        "ball" => {
            f.check_keys(&["r"])?;
            make_ball(space, f.req("r")?).map_err(wrap)?
        }
        "ellipsoid" => {
            f.check_keys(&["semiaxes"])?;
            let axes = f
                .list("semiaxes")?
                .ok_or_else(|| CliError::usage("--body: ellipsoid needs `semiaxes=`"))?;
            if axes.len() != n {
                return Err(CliError::usage(format!("--body: semiaxes needs {n} entries")));
            }
            if space != SpaceSpec::euclidean(n).map_err(wrap)? {
                return Err(CliError::usage(format!(
                    "--body: ellipsoids live in e:{n}, not {space}"
                )));
            }
            make_ellipsoid(axes).map_err(wrap)?
        }
        "lune" => {
            f.check_keys(&["w", "axis"])?;
            let axis = match f.list("axis")? {
                Some(v) => direction("axis", v, 2)?,
                None => Direction::axis(2, 0),
            };
            make_lune(f.req("w")?, axis).map_err(wrap)?
        }
        "harmonic" => {
            f.check_keys(&["r", "beta", "degree", "axis", "alpha"])?;
            let axis = match f.list("axis")? {
                Some(v) => direction("axis", v, n)?,
                None => Direction::axis(n, n - 1),
            };
            let degree = f.req("degree")?;
            if degree < 0.0 || degree.fract() != 0.0 {
                return Err(CliError::usage("--body: `degree` must be a non-negative integer"));
            }
            let (r, beta) = (f.req("r")?, f.req("beta")?);
            match f.num("alpha")? {
                None => {
                    if space != SpaceSpec::hemisphere(n).map_err(wrap)? {
                        return Err(CliError::usage(
                            "--body: harmonic without `alpha` is volume-matched in s+:n",
                        ));
                    }
                    make_perturbed_ball(r, beta, degree as usize, axis).map_err(wrap)?.body
                }
                Some(alpha) => {
                    let params = busemann::bodies::HarmonicParams {
                        r,
                        alpha,
                        beta,
                        degree: degree as usize,
                        axis,
                    };
                    let profile =
                        RadialProfile::Harmonic(busemann::bodies::HarmonicProfile::new(params).map_err(wrap)?);
                    with_symmetry(space, profile, symmetric)?
                }
            }
        }
        kind => with_symmetry(space, profile(&f, kind, n)?, symmetric)?,
    };
    match symmetric {
        Some(s) if s != body.is_symmetric() => StarBody::new(space, body.profile().clone(), s).map_err(wrap),
        _ => Ok(body),
    }
}

fn profile(f: &Fields<'_>, kind: &str, n: usize) -> Result<RadialProfile, CliError> {
    Ok(match kind {
        "gnomonic_ellipsoid" => {
            f.check_keys(&["semiaxes"])?;
            RadialProfile::GnomonicEllipsoid {
                semiaxes: f
                    .list("semiaxes")?
                    .ok_or_else(|| CliError::usage("--body: needs `semiaxes=`"))?,
            }
        }
        "gnomonic_slabs" => {
            f.check_keys(&["normals", "heights"])?;
            let flat = f
                .list("normals")?
                .ok_or_else(|| CliError::usage("--body: needs `normals=`"))?;
            if flat.len() % n != 0 {
                return Err(CliError::usage(format!(
                    "--body: normals needs a multiple of {n} entries"
                )));
            }
            let normals = flat
                .chunks(n)
                .map(|c| direction("normals", c.to_vec(), n))
                .collect::<Result<_, _>>()?;
            RadialProfile::GnomonicSlabs {
                normals,
                heights: f
                    .list("heights")?
                    .ok_or_else(|| CliError::usage("--body: needs `heights=`"))?,
            }
        }
        "cone" => {
            f.check_keys(&["arcs", "axis", "bands", "radius"])?;
            let base = match (f.list("arcs")?, f.list("bands")?) {
                (Some(a), None) => ConeBase::arcs(pairs("arcs", a)?),
                (None, Some(b)) => {
                    let axis = match f.list("axis")? {
                        Some(v) => direction("axis", v, n)?,
                        None => Direction::axis(n, n - 1),
                    };
                    ConeBase::zonal(axis, pairs("bands", b)?)
                }
                _ => return Err(CliError::usage("--body: cone needs exactly one of `arcs=` or `bands=`")),
            }
            .map_err(|e| CliError::from_core("--body", e))?;
            RadialProfile::Cone {
                base,
                radius: f.num("radius")?.unwrap_or(FRAC_PI_2),
            }
        }
        "ridge" => ridge(f, n)?,
        "grid" => {
            f.check_keys(&["values"])?;
            RadialProfile::Grid(busemann::bodies::CircleGrid {
                values: f
                    .list("values")?
                    .ok_or_else(|| CliError::usage("--body: grid needs `values=`"))?,
            })
        }
        other => {
            return Err(CliError::usage(format!(
                "--body: unknown kind `{other}` (ball, ellipsoid, gnomonic_ellipsoid, gnomonic_slabs, lune, \
                 cone, ridge, harmonic, grid)"
            )))
        }
    })
}

fn ridge(f: &Fields<'_>, n: usize) -> Result<RadialProfile, CliError> {
    f.check_keys(&["base", "direction", "amplitude", "power", "threshold"])?;
    let mut terms: Vec<RidgeTerm> = Vec::new();
    for (k, v) in &f.pairs {
        match *k {
            "direction" => terms.push(RidgeTerm {
                direction: direction("direction", list(k, v)?, n)?,
                amplitude: 0.0,
                power: 1,
                threshold: None,
            }),
            "amplitude" | "power" | "threshold" => {
                let t = terms
                    .last_mut()
                    .ok_or_else(|| CliError::usage(format!("--body: `{k}` before any `direction`")))?;
                let x = number(k, v)?;
                match *k {
                    "amplitude" => t.amplitude = x,
                    "power" if x >= 1.0 && x.fract() == 0.0 => t.power = x as u32,
                    "power" => return Err(CliError::usage("--body: `power` must be a positive integer")),
                    _ => t.threshold = Some(x),
                }
            }
            _ => {}
        }
    }
    Ok(RadialProfile::Ridge {
        base: f.req("base")?,
        terms,
    })
}

/// Uses the requested symmetry claim, or claims symmetry whenever the
/// profile passes the check.
fn with_symmetry(space: SpaceSpec, profile: RadialProfile, symmetric: Option<bool>) -> Result<StarBody, CliError> {
    let wrap = |e| CliError::from_core("--body", e);
    match symmetric {
        Some(s) => StarBody::new(space, profile, s).map_err(wrap),
        None => StarBody::new(space, profile.clone(), true)
            .or_else(|_| StarBody::new(space, profile, false))
            .map_err(wrap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spaces_parse() {
        assert_eq!(parse_space("s+:2").unwrap(), SpaceSpec::hemisphere(2).unwrap());
        assert_eq!(parse_space("h:3").unwrap(), SpaceSpec::hyperbolic(3).unwrap());
        assert!(parse_space("x:2").is_err());
        assert!(parse_space("e").is_err());
        assert!(parse_space("e:1").is_err());
    }

    #[test]
    fn mini_language() {
        let s = SpaceSpec::hemisphere(2).unwrap();
        let b = parse_body("ball:r=0.7", Some(s)).unwrap();
        assert!(b.is_symmetric());
        let c = parse_body("cone:arcs=0.1/0.5/3.2415926535897931/3.6415926535897931", Some(s)).unwrap();
        assert!(c.is_symmetric());
        let r = parse_body(
            "ridge:base=0.6,direction=1/0,amplitude=0.2,power=1,direction=0/1,amplitude=-0.1,power=2",
            Some(s),
        )
        .unwrap();
        assert!(!r.is_symmetric());
        match r.profile() {
            RadialProfile::Ridge { terms, .. } => assert_eq!(terms.len(), 2),
            _ => unreachable!(),
        }
        let e = parse_body("ellipsoid:semiaxes=1/2/0.5", Some(SpaceSpec::euclidean(3).unwrap())).unwrap();
        assert_eq!(e.dim(), 3);
    }

    #[test]
    fn malformed_specs_name_the_parameter() {
        let s = SpaceSpec::hemisphere(2).unwrap();
        let msg = |spec: &str| match parse_body(spec, Some(s)) {
            Err(CliError::Usage(m)) => m,
            other => panic!("{spec}: {other:?}"),
        };
        assert!(msg("ball:radius=1").contains("radius"));
        assert!(msg("ball:r=abc").contains("r=abc"));
        assert!(msg("blob:r=1").contains("blob"));
        assert!(msg("ball:r=2").contains("r = 2"));
        assert!(msg("ellipsoid:semiaxes=1/2/3").contains("semiaxes"));
        assert!(msg("ellipsoid:semiaxes=1/2").contains("e:2"));
    }
}
