//! Tagged SI scalars and the unit conversions accepted at API boundaries.
//!
//! Every quantity stores its SI value. Non-SI units (eV, meV, Å, nm, ps) are
//! only accepted when constructing a quantity or reading one back out; a unit
//! belonging to a different dimension is rejected.

use serde::{Deserialize, Serialize};

use crate::constants::ELEMENTARY_CHARGE;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    Joule,
    ElectronVolt,
    MilliElectronVolt,
    Kilogram,
    Meter,
    Angstrom,
    Nanometer,
    Kelvin,
    RadianPerSecond,
    PerSecond,
    Second,
    Picosecond,
    Femtosecond,
}

macro_rules! quantity {
    ($(#[$doc:meta])* $name:ident, $kind:literal, { $($unit:ident => $factor:expr),+ $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(f64);

        impl $name {
            pub const KIND: &'static str = $kind;

            /// Builds the quantity from a value expressed in `unit`.
            pub fn new(value: f64, unit: Unit) -> Result<Self> {
                Ok(Self(value * Self::factor(unit)?))
            }

            pub const fn from_si(value: f64) -> Self {
                Self(value)
            }

            pub const fn si(self) -> f64 {
                self.0
            }

            /// Reads the value back in `unit`.
            pub fn to(self, unit: Unit) -> Result<f64> {
                Ok(self.0 / Self::factor(unit)?)
            }

            fn factor(unit: Unit) -> Result<f64> {
                match unit {
                    $(Unit::$unit => Ok($factor),)+
                    #[allow(unreachable_patterns)]
                    other => Err(Error::UnitMismatch { kind: $kind, unit: other }),
                }
            }
        }

        impl std::ops::Mul<f64> for $name {
            type Output = Self;
            fn mul(self, rhs: f64) -> Self {
                Self(self.0 * rhs)
            }
        }
    };
}

quantity!(Energy, "energy", {
    Joule => 1.0,
    ElectronVolt => ELEMENTARY_CHARGE,
    MilliElectronVolt => 1e-3 * ELEMENTARY_CHARGE,
});

quantity!(Mass, "mass", { Kilogram => 1.0 });

quantity!(Length, "length", {
    Meter => 1.0,
    Angstrom => 1e-10,
    Nanometer => 1e-9,
});

quantity!(Temperature, "temperature", { Kelvin => 1.0 });

quantity!(AngularFrequency, "angular frequency", { RadianPerSecond => 1.0 });

quantity!(
    /// An event rate in 1/s.
    Rate, "rate", { PerSecond => 1.0 }
);

quantity!(Time, "time", {
    Second => 1.0,
    Picosecond => 1e-12,
    Femtosecond => 1e-15,
});

impl Energy {
    pub fn ev(value: f64) -> Self {
        Self(value * ELEMENTARY_CHARGE)
    }

    pub fn mev(value: f64) -> Self {
        Self(value * 1e-3 * ELEMENTARY_CHARGE)
    }

    pub fn in_ev(self) -> f64 {
        self.0 / ELEMENTARY_CHARGE
    }
}

impl Length {
    pub fn angstrom(value: f64) -> Self {
        Self(value * 1e-10)
    }

    pub fn nm(value: f64) -> Self {
        Self(value * 1e-9)
    }

    pub fn in_nm(self) -> f64 {
        self.0 / 1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mismatched_unit_is_rejected() {
        assert_eq!(
            Energy::new(1.0, Unit::Kelvin),
            Err(Error::UnitMismatch { kind: "energy", unit: Unit::Kelvin })
        );
        assert!(Length::new(1.0, Unit::ElectronVolt).is_err());
        assert!(Mass::new(1.0, Unit::Meter).is_err());
        assert!(Time::new(1.0, Unit::PerSecond).is_err());
        assert!(Rate::new(1.0, Unit::Second).is_err());
    }

    #[test]
    fn boundary_units_convert() {
        let e = Energy::new(24.8, Unit::MilliElectronVolt).unwrap();
        assert!((e.si() - 24.8e-3 * ELEMENTARY_CHARGE).abs() < 1e-33);
        assert!((e.to(Unit::ElectronVolt).unwrap() - 0.0248).abs() < 1e-15);
        let d = Length::new(0.82, Unit::Angstrom).unwrap();
        assert!((d.si() - 0.82e-10).abs() < 1e-25);
        assert!((Length::nm(2.5).to(Unit::Angstrom).unwrap() - 25.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn si_round_trip_is_exact(x in proptest::num::f64::NORMAL) {
            prop_assert_eq!(Energy::from_si(Energy::from_si(x).si()), Energy::from_si(x));
            prop_assert_eq!(Length::from_si(x).si(), x);
            prop_assert_eq!(Rate::from_si(x).si(), x);
        }
    }
}
