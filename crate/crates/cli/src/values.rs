//! Value types accepted on the command line and in config files.

use crate::config::Echo;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

fn numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers"));
    }
    parts.iter().map(|p| p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"))).collect()
}

/// A complex number written `re,im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cplx(pub Complex64);

impl FromStr for Cplx {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = numbers(s, 2)?;
        Ok(Cplx(Complex64::new(v[0], v[1])))
    }
}

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?},{:?}", self.0.re, self.0.im)
    }
}

/// An interval written `lo,hi` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval(pub f64, pub f64);

impl FromStr for Interval {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = numbers(s, 2)?;
        if !(v[0] < v[1]) {
            return Err("need lo < hi".into());
        }
        Ok(Interval(v[0], v[1]))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?},{:?}", self.0, self.1)
    }
}

/// A box in the frequency plane written `re_lo,re_hi,im_lo,im_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec(pub [f64; 4]);

impl FromStr for BoxSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = numbers(s, 4)?;
        if !(v[0] < v[1] && v[2] < v[3]) {
            return Err("need re_lo < re_hi and im_lo < im_hi".into());
        }
        Ok(BoxSpec([v[0], v[1], v[2], v[3]]))
    }
}

impl fmt::Display for BoxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a:?},{b:?},{c:?},{d:?}")
    }
}

/// A grid of cells written `NxM`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid(pub usize, pub usize);

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once('x').ok_or("expected NxM")?;
        let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
        if a == 0 || b == 0 {
            return Err("grid sizes must be positive".into());
        }
        Ok(Grid(a, b))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.0, self.1)
    }
}

/// A list written `a,b,c` or an inclusive range `lo..hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T> FromStr for List<T>
where
    T: FromStr + TryFrom<i64>,
    T::Err: fmt::Display,
{
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |p: &str| p.trim().parse::<T>().map_err(|e| format!("`{}`: {e}", p.trim()));
        if let Some((lo, hi)) = s.split_once("..") {
            let int = |p: &str| p.trim().parse::<i64>().map_err(|e| format!("`{}`: {e}", p.trim()));
            let (lo, hi) = (int(lo)?, int(hi)?);
            if lo > hi {
                return Err("empty range".into());
            }
            let items =
                (lo..=hi).map(|v| T::try_from(v).map_err(|_| "out of range".to_string())).collect::<Result<_, _>>()?;
            return Ok(List(items));
        }
        let items = s.split(',').map(parse).collect::<Result<Vec<T>, _>>()?;
        if items.is_empty() {
            return Err("empty list".into());
        }
        Ok(List(items))
    }
}

impl<T: fmt::Display> fmt::Display for List<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Reals(pub Vec<f64>);

impl FromStr for Reals {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let items = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", p.trim())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Reals(items))
    }
}

impl fmt::Display for Reals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| format!("{v:?}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Initial-data profile: `zero`, `gaussian:center,width,amplitude` or
/// `bump:center,half_width,amplitude`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec(pub kdsqnm::tdwave::Profile);

impl FromStr for ProfileSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        use kdsqnm::tdwave::Profile;
        let s = s.trim();
        if s == "zero" {
            return Ok(ProfileSpec(Profile::Zero));
        }
        let (kind, args) = s.split_once(':').ok_or("expected zero, gaussian:c,w,A or bump:c,h,A")?;
        let v = numbers(args, 3)?;
        match kind {
            "gaussian" if v[1] > 0.0 => {
                Ok(ProfileSpec(Profile::Gaussian { center: v[0], width: v[1], amplitude: v[2] }))
            }
            "bump" if v[1] > 0.0 => Ok(ProfileSpec(Profile::Bump { center: v[0], half_width: v[1], amplitude: v[2] })),
            "gaussian" | "bump" => Err("width must be positive".into()),
            other => Err(format!("unknown profile `{other}`")),
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use kdsqnm::tdwave::Profile;
        match self.0 {
            Profile::Zero => write!(f, "zero"),
            Profile::Gaussian { center, width, amplitude } => write!(f, "gaussian:{center:?},{width:?},{amplitude:?}"),
            Profile::Bump { center, half_width, amplitude } => {
                write!(f, "bump:{center:?},{half_width:?},{amplitude:?}")
            }
        }
    }
}

/// Angular shape of the resolvent source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceShape {
    /// `bump(r) (1 − μ²)^{|k|/2}`
    Bump,
    /// `bump(r) μ (1 − μ²)^{|k|/2}`
    BumpMu,
}

impl FromStr for SourceShape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "bump" => Ok(SourceShape::Bump),
            "bump-mu" => Ok(SourceShape::BumpMu),
            other => Err(format!("unknown source `{other}` (bump, bump-mu)")),
        }
    }
}

impl fmt::Display for SourceShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceShape::Bump => "bump",
            SourceShape::BumpMu => "bump-mu",
        })
    }
}

macro_rules! echo_display {
    ($($t:ty),*) => {
        $(impl Echo for $t {
            fn echo(&self) -> String {
                self.to_string()
            }
        })*
    };
}

echo_display!(Cplx, Interval, BoxSpec, Grid, Reals, ProfileSpec, SourceShape);

impl<T: fmt::Display> Echo for List<T> {
    fn echo(&self) -> String {
        self.to_string()
    }
}
