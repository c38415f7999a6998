use serde::{Deserialize, Serialize};

use super::{
    make_bump_power, make_capped_power, make_gaussian, make_glued, make_positive_power, make_power,
    make_shifted_power, ProfileFlags, RadialProfile,
};
use crate::error::{Error, Result};

/// Declarative profile description: `name` plus positional `params`.
///
/// Names: power(γ), positive_power(γ, s), shifted_power(q, s),
/// bump_power(α, e), gaussian(β), capped_power(γ[, ε]),
/// glued_power(γ, R), glued_log(γ, R).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub scale: Option<f64>,
    /// Overrides the declared flags.
    #[serde(default)]
    pub flags: Option<ProfileFlags>,
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        let p = &self.params;
        let arity = |n: usize| -> Result<()> {
            if p.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!(
                    "profile {} takes {n} parameters, got {}",
                    self.name,
                    p.len()
                )))
            }
        };
        let mut prof = match self.name.as_str() {
            "power" => {
                arity(1)?;
                make_power(p[0])?
            }
            "positive_power" => {
                arity(2)?;
                make_positive_power(p[0], p[1])?
            }
            "shifted_power" => {
                arity(2)?;
                make_shifted_power(p[0], p[1])?
            }
            "bump_power" => {
                arity(2)?;
                make_bump_power(p[0], p[1])?
            }
            "gaussian" => {
                arity(1)?;
                make_gaussian(p[0])?
            }
            "capped_power" => {
                if p.len() == 1 {
                    make_capped_power(p[0], 1.0)?
                } else {
                    arity(2)?;
                    make_capped_power(p[0], p[1])?
                }
            }
            "glued_power" => {
                arity(2)?;
                make_glued(p[0], p[1], false)?
            }
            "glued_log" => {
                arity(2)?;
                make_glued(p[0], p[1], true)?
            }
            other => return Err(Error::InvalidParams(format!("unknown profile '{other}'"))),
        };
        if let Some(a) = self.scale {
            prof = prof.scaled(a);
        }
        if let Some(f) = self.flags {
            prof = prof.with_flags(f);
        }
        Ok(prof)
    }
}

/// Parse `name:p1,p2,...` into a profile.
pub fn parse_profile(text: &str) -> Result<RadialProfile> {
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (text.trim(), ""),
    };
    let params = rest
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<f64>()
                .map_err(|_| Error::InvalidParams(format!("bad number '{x}' in profile '{text}'")))
        })
        .collect::<Result<Vec<f64>>>()?;
    ProfileSpec {
        name: name.to_string(),
        params,
        scale: None,
        flags: None,
    }
    .build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let p = parse_profile("power:0.4").unwrap();
        assert_eq!(p.name(), "power:0.4");
        let g = parse_profile("gaussian: 2").unwrap();
        assert!((g.eval(1.0) - (-2f64).exp()).abs() < 1e-15);
        assert!(parse_profile("nope:1").is_err());
        assert!(parse_profile("power:x").is_err());
        assert!(parse_profile("power:0.1,0.2").is_err());
    }
}
