//! Decibel and power-unit conversions.

/// Power ratio in dB.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Linear power ratio from dB.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    to_db(watts / 1e-3)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * from_db(dbm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(to_db(10.0), 10.0);
        assert_eq!(from_db(-30.0), 1e-3);
        assert!((watts_to_dbm(1e-3)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn db_round_trip(db in -200.0f64..200.0) {
            let back = to_db(from_db(db));
            prop_assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
        }

        #[test]
        fn dbm_round_trip(w in 1e-20f64..1.0) {
            let back = dbm_to_watts(watts_to_dbm(w));
            prop_assert!(((back - w) / w).abs() < 1e-12);
        }
    }
}
