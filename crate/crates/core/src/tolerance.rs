//! Named tolerance profiles.
//!
//! Every tolerance is relative to a scale stated where it is used. The
//! profile can be chosen at run time through [`PROFILE_ENV`].

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ghp::MIXED_TRIANGLE_TOL;
use crate::prokhorov::CUT_SLACK;
use crate::space::TRIANGLE_TOL;
use crate::tree::QUOTIENT_TOL;

/// Environment variable naming the tolerance profile.
pub const PROFILE_ENV: &str = "GHP_TOLERANCE_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Default,
    Strict,
    Loose,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Profile::Default),
            "strict" => Ok(Profile::Strict),
            "loose" => Ok(Profile::Loose),
            other => Err(Error::Malformed(format!(
                "unknown tolerance profile {other:?} (expected default, strict or loose)"
            ))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Default => "default",
            Profile::Strict => "strict",
            Profile::Loose => "loose",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub profile: Profile,
    /// Triangle inequality, relative to the largest distance.
    pub triangle: f64,
    /// Mixed triangle inequalities of cross metrics, same scale.
    pub mixed_triangle: f64,
    /// Min-cut comparisons in the Prokhorov solver, absolute.
    pub cut_slack: f64,
    /// Gap at which GHP bounds count as certified, relative to the largest
    /// diameter or mass (at least 1).
    pub certify: f64,
    /// Quotient identification in tree coding, relative to `max f`.
    pub quotient: f64,
}

impl Tolerances {
    pub fn profile(profile: Profile) -> Self {
        let k = match profile {
            Profile::Default => 1.0,
            Profile::Strict => 1e-3,
            Profile::Loose => 1e3,
        };
        Tolerances {
            profile,
            triangle: TRIANGLE_TOL * k,
            mixed_triangle: MIXED_TRIANGLE_TOL * k,
            cut_slack: CUT_SLACK,
            certify: 1e-6 * k,
            quotient: QUOTIENT_TOL * k,
        }
    }

    /// The profile named by [`PROFILE_ENV`], or the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PROFILE_ENV) {
            Ok(name) => Ok(Tolerances::profile(name.parse()?)),
            Err(_) => Ok(Tolerances::default()),
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::profile(Profile::Default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_scale_and_stay_positive() {
        let d = Tolerances::default();
        assert_eq!(d.triangle, 1e-9);
        assert_eq!(d.certify, 1e-6);
        for p in [Profile::Default, Profile::Strict, Profile::Loose] {
            let t = Tolerances::profile(p);
            assert!(t.triangle > 0.0 && t.certify > 0.0 && t.quotient > 0.0);
            assert_eq!(p.to_string().parse::<Profile>().unwrap(), p);
        }
        assert!(Tolerances::profile(Profile::Strict).certify < d.certify);
        assert!("tight".parse::<Profile>().is_err());
    }
}
