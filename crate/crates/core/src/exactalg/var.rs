use std::fmt;
use std::str::FromStr;

/// A torus variable: `t0`, or `t[r][s]` for a residue `r` mod n and a block `s`.
///
/// The derived order is the canonical variable order: `T0` first, then
/// `Rot` sorted by `(s, r)` (field order matters here).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    T0,
    Rot { s: u32, r: u32 },
}

impl VarId {
    /// `t[r mod n][s]`.
    pub fn rot(r: i64, s: u32, n: u32) -> Self {
        assert!(n >= 1, "n must be positive");
        VarId::Rot {
            s,
            r: r.rem_euclid(i64::from(n)) as u32,
        }
    }

    /// Shifts the residue of a `Rot` variable; `T0` is fixed.
    pub fn shifted(self, steps: i64, n: u32) -> Self {
        match self {
            VarId::T0 => VarId::T0,
            VarId::Rot { s, r } => VarId::rot(i64::from(r) + steps, s, n),
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::T0 => write!(f, "t0"),
            VarId::Rot { s, r } => write!(f, "t[{r}][{s}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid variable name `{0}` (expected `t0` or `t[r][s]`)")]
pub struct ParseVarError(pub String);

impl FromStr for VarId {
    type Err = ParseVarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseVarError(s.to_string());
        let t = s.trim();
        if t == "t0" {
            return Ok(VarId::T0);
        }
        let rest = t.strip_prefix("t[").ok_or_else(err)?;
        let (r, rest) = rest.split_once("][").ok_or_else(err)?;
        let s_idx = rest.strip_suffix(']').ok_or_else(err)?;
        let r: u32 = r.parse().map_err(|_| err())?;
        let s_idx: u32 = s_idx.parse().map_err(|_| err())?;
        if s_idx == 0 {
            return Err(err());
        }
        Ok(VarId::Rot { s: s_idx, r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_t0_then_block_then_residue() {
        let mut v = vec![
            VarId::rot(1, 1, 3),
            VarId::rot(0, 2, 3),
            VarId::T0,
            VarId::rot(2, 1, 3),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                VarId::T0,
                VarId::rot(1, 1, 3),
                VarId::rot(2, 1, 3),
                VarId::rot(0, 2, 3)
            ]
        );
    }

    #[test]
    fn names_round_trip() {
        for v in [VarId::T0, VarId::rot(-1, 4, 5)] {
            assert_eq!(v.to_string().parse::<VarId>().unwrap(), v);
        }
        assert_eq!(VarId::rot(-1, 4, 5).to_string(), "t[4][4]");
        assert!("t[1][0]".parse::<VarId>().is_err());
        assert!("x".parse::<VarId>().is_err());
    }
}
