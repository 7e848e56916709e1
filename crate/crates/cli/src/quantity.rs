//! Unit-suffixed scalar values such as `"42 keV"` or `"35 um"`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Energy,
    Angle,
    SolidAngle,
    Time,
    Length,
    Intensity,
    Rate,
    Density,
    MolarMass,
}

impl Dimension {
    /// Canonical unit used when serializing.
    pub fn base_unit(self) -> &'static str {
        match self {
            Dimension::Energy => "keV",
            Dimension::Angle => "rad",
            Dimension::SolidAngle => "sr",
            Dimension::Time => "s",
            Dimension::Length => "m",
            Dimension::Intensity => "W/cm2",
            Dimension::Rate => "1/s",
            Dimension::Density => "g/cm3",
            Dimension::MolarMass => "g/mol",
        }
    }

    /// Unit names with their decimal exponent relative to the base unit.
    fn units(self) -> &'static [(&'static str, i32)] {
        match self {
            Dimension::Energy => &[("eV", -3), ("keV", 0), ("MeV", 3)],
            Dimension::Angle => &[("rad", 0), ("mrad", -3), ("urad", -6)],
            Dimension::SolidAngle => &[("sr", 0), ("msr", -3), ("usr", -6)],
            Dimension::Time => &[("s", 0), ("ms", -3), ("us", -6), ("ns", -9), ("ps", -12), ("fs", -15)],
            Dimension::Length => &[("m", 0), ("cm", -2), ("mm", -3), ("um", -6), ("nm", -9)],
            Dimension::Intensity => &[("W/cm2", 0), ("W/m2", -4)],
            Dimension::Rate => &[("1/s", 0), ("/s", 0)],
            Dimension::Density => &[("g/cm3", 0), ("kg/m3", -3)],
            Dimension::MolarMass => &[("g/mol", 0)],
        }
    }

    fn unit_list(self) -> String {
        self.units().iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Energy => "energy",
            Dimension::Angle => "angle",
            Dimension::SolidAngle => "solid angle",
            Dimension::Time => "time",
            Dimension::Length => "length",
            Dimension::Intensity => "intensity",
            Dimension::Rate => "rate",
            Dimension::Density => "density",
            Dimension::MolarMass => "molar mass",
        };
        f.write_str(s)
    }
}

/// Parses `"<number> <unit>"` into the dimension's base unit.
pub fn parse(s: &str, dim: Dimension) -> Result<f64, String> {
    let s = s.trim();
    let split = s.find(|c: char| c.is_whitespace()).ok_or_else(|| {
        format!(
            "expected \"<number> <unit>\" with a {dim} unit ({}), got {s:?}",
            dim.unit_list()
        )
    })?;
    let (num, unit) = (&s[..split], s[split..].trim());
    let v: f64 = num.parse().map_err(|_| format!("{num:?} is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{num:?} is not finite"));
    }
    let exp = dim
        .units()
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, e)| *e)
        .ok_or_else(|| format!("unknown {dim} unit {unit:?}; expected one of {}", dim.unit_list()))?;
    // powers of ten up to 1e22 are exact, so "100 um" lands on 1e-4 exactly
    Ok(if exp >= 0 {
        v * 10f64.powi(exp)
    } else {
        v / 10f64.powi(-exp)
    })
}

/// Shortest round-trip spelling, in scientific notation for very small or
/// large magnitudes.
pub fn format(v: f64, dim: Dimension) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e6).contains(&a) {
        format!("{v:e} {}", dim.base_unit())
    } else {
        format!("{v} {}", dim.base_unit())
    }
}
