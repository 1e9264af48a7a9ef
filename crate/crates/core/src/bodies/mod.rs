//! Star bodies described by radial functions, and the constructions that
//! realise the equality cases and extremal sequences.

mod angular;
mod cone;
mod construct;
mod convex;
mod profile;
pub mod random;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::SphereRule;
use crate::spaces::{Curvature, SpaceSpec};

pub use angular::{exchange_comparison, inverse_angular_area, AngularArea, ExchangeComparison, ShellRegion};
pub(crate) use cone::zonal_section as zonal_section_measure;
pub use cone::{striped_cap_subset, striped_cap_with_strips, ConeBase, StripedCap};
pub use construct::{
    make_ball, make_cone, make_ellipsoid, make_lune, make_perturbed_ball, make_striped_cone, make_vanishing_body,
    PerturbedBall, StripedCone, VanishingBody,
};
pub use convex::{is_convex_euclidean, is_convex_spherical};
pub use profile::{CircleGrid, HarmonicParams, HarmonicProfile, RadialProfile, RidgeTerm};

/// Version tag written into serialized bodies.
pub const BODY_FORMAT_VERSION: u32 = 1;

/// A star-shaped set about the origin of a model space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBody", into = "RawBody")]
pub struct StarBody {
    space: SpaceSpec,
    profile: RadialProfile,
    symmetric: bool,
}

#[derive(Serialize, Deserialize)]
struct RawBody {
    #[serde(default = "default_version")]
    format_version: u32,
    space: SpaceSpec,
    profile: RadialProfile,
    #[serde(default)]
    symmetric: bool,
}

fn default_version() -> u32 {
    BODY_FORMAT_VERSION
}

impl TryFrom<RawBody> for StarBody {
    type Error = Error;

    fn try_from(raw: RawBody) -> Result<Self> {
        if raw.format_version != BODY_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported body format_version {}",
                raw.format_version
            )));
        }
        StarBody::new(raw.space, raw.profile, raw.symmetric)
    }
}

impl From<StarBody> for RawBody {
    fn from(b: StarBody) -> Self {
        RawBody {
            format_version: BODY_FORMAT_VERSION,
            space: b.space,
            profile: b.profile,
            symmetric: b.symmetric,
        }
    }
}

impl StarBody {
    /// Validates the profile against the space; a `symmetric` claim is
    /// checked on quadrature nodes to `1e-10`.
    pub fn new(space: SpaceSpec, profile: RadialProfile, symmetric: bool) -> Result<Self> {
        let n = space.dim();
        profile.validate(n)?;
        let needs = |c: Curvature, what: &str| {
            if space.curvature() != c {
                Err(Error::Applicability(format!(
                    "{what} bodies require the space {c:?}, got {space}"
                )))
            } else {
                Ok(())
            }
        };
        match &profile {
            RadialProfile::Ellipsoid { .. } => needs(Curvature::Flat, "ellipsoid")?,
            RadialProfile::GnomonicEllipsoid { .. }
            | RadialProfile::GnomonicSlabs { .. }
            | RadialProfile::Lune { .. } => needs(Curvature::Spherical, profile.kind())?,
            _ => {}
        }
        let (lo, hi) = profile.bounds();
        if !profile.is_cone_type() && !(lo > 0.0) {
            return Err(Error::domain(
                "radial minimum",
                lo,
                "star bodies need a positive radial function",
            ));
        }
        if lo < 0.0 || hi > space.max_radius() || !hi.is_finite() {
            return Err(Error::domain(
                "radial maximum",
                hi,
                format!("radial function leaves the radius range of {space}"),
            ));
        }
        let body = Self {
            space,
            profile,
            symmetric,
        };
        if symmetric {
            body.check_symmetry()?;
        }
        Ok(body)
    }

    fn check_symmetry(&self) -> Result<()> {
        let n = self.space.dim();
        let rule = SphereRule::<f64>::new(n - 1, 11)?;
        let mut probes: Vec<Vec<f64>> = rule.iter().map(|(u, _)| u.to_vec()).collect();
        if n == 2 {
            for a in self.profile.kinks() {
                probes.extend([a - 1e-7, a + 1e-7].map(|b| vec![b.cos(), b.sin()]));
            }
        }
        for u in probes {
            let m: Vec<f64> = u.iter().map(|x| -x).collect();
            let d = (self.radial(&u) - self.radial(&m)).abs();
            if d > 1e-10 {
                return Err(Error::Precondition(format!(
                    "body claimed symmetric but rho(u) - rho(-u) = {d:e} at u = {u:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn radial(&self, u: &[f64]) -> f64 {
        self.profile.radial(u)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Direction;

    #[test]
    fn rejects_out_of_range_profiles() {
        let s = SpaceSpec::hemisphere(2).unwrap();
        assert!(StarBody::new(s, RadialProfile::Ball { r: 1.6 }, true).is_err());
        let e = SpaceSpec::euclidean(2).unwrap();
        assert!(StarBody::new(
            e,
            RadialProfile::Lune {
                w: 0.3,
                axis: Direction::axis(2, 0)
            },
            true
        )
        .is_err());
    }

    #[test]
    fn symmetric_claim_is_checked() {
        let e = SpaceSpec::euclidean(3).unwrap();
        let odd = RadialProfile::Ridge {
            base: 1.0,
            terms: vec![RidgeTerm {
                direction: Direction::axis(3, 0),
                amplitude: 0.2,
                power: 1,
                threshold: None,
            }],
        };
        assert!(StarBody::new(e, odd.clone(), true).is_err());
        assert!(StarBody::new(e, odd, false).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let s = SpaceSpec::hemisphere(2).unwrap();
        let b = StarBody::new(
            s,
            RadialProfile::Lune {
                w: 0.3,
                axis: Direction::axis(2, 1),
            },
            true,
        )
        .unwrap();
        let j = b.to_json().unwrap();
        assert!(j.contains("format_version"));
        assert_eq!(StarBody::from_json(&j).unwrap(), b);
        let bad = j.replace("0.3", "1.7");
        assert!(StarBody::from_json(&bad).is_err());
    }
}
