use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{invalid, Error};

/// Textual potential descriptor: `well:V0,R`, `gauss:V0,R` or `file:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    SquareWell { depth: f64, radius: f64 },
    Gaussian { depth: f64, width: f64 },
    File(PathBuf),
}

impl FromStr for PotentialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("potential spec `{s}` lacks a `kind:` prefix")))?;
        let pair = || -> Result<(f64, f64), Error> {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| invalid(format!("expected `V0,R` in `{s}`")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("bad number `{t}` in `{s}`")))
            };
            Ok((parse(a)?, parse(b)?))
        };
        match kind {
            "well" => {
                let (depth, radius) = pair()?;
                Ok(PotentialSpec::SquareWell { depth, radius })
            }
            "gauss" => {
                let (depth, width) = pair()?;
                Ok(PotentialSpec::Gaussian { depth, width })
            }
            "file" if !rest.is_empty() => Ok(PotentialSpec::File(PathBuf::from(rest))),
            _ => Err(invalid(format!("unknown potential spec `{s}`"))),
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::SquareWell { depth, radius } => write!(f, "well:{depth},{radius}"),
            PotentialSpec::Gaussian { depth, width } => write!(f, "gauss:{depth},{width}"),
            PotentialSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        assert_eq!(
            "well:2.5,1".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::SquareWell {
                depth: 2.5,
                radius: 1.0
            }
        );
        assert_eq!(
            "gauss:1, 0.5".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::Gaussian { depth: 1.0, width: 0.5 }
        );
        assert_eq!(
            "file:data/v.csv".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::File("data/v.csv".into())
        );
        for bad in ["well", "well:1", "cube:1,2", "gauss:a,b", "file:"] {
            assert!(bad.parse::<PotentialSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        let s = PotentialSpec::Gaussian { depth: 0.8, width: 1.5 };
        assert_eq!(s.to_string().parse::<PotentialSpec>().unwrap(), s);
    }
}
