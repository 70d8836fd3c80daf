//! JSON rendering of reports with 17 significant digits per float.
//!
//! Report schema:
//!
//! ```text
//! {"state": str, "n": int, "alpha": float|null, "quantum_value": float,
//!  "lhv_bound": float, "violation_factor": float,
//!  "settings": [{"theta1": f, "phi1": f, "theta2": f, "phi2": f}, ...],
//!  "method": str, "seed": int|null}
//! ```

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::analysis::ViolationReport;
use crate::observables::ObserverSettings;

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_owned();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_owned()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

/// A float that serializes through [`format_g17`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct G17(pub f64);

impl Serialize for G17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format_g17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[derive(Serialize)]
struct SettingJson {
    theta1: G17,
    phi1: G17,
    theta2: G17,
    phi2: G17,
}

impl From<&ObserverSettings> for SettingJson {
    fn from(s: &ObserverSettings) -> Self {
        SettingJson {
            theta1: G17(s.setting_1.theta),
            phi1: G17(s.setting_1.phi),
            theta2: G17(s.setting_2.theta),
            phi2: G17(s.setting_2.phi),
        }
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    state: &'a str,
    n: usize,
    alpha: Option<G17>,
    quantum_value: G17,
    lhv_bound: G17,
    violation_factor: G17,
    settings: Vec<SettingJson>,
    method: &'static str,
    seed: Option<u64>,
}

impl Serialize for ViolationReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ReportJson {
            state: &self.state_name,
            n: self.n,
            alpha: self.alpha.map(G17),
            quantum_value: G17(self.quantum_value),
            lhv_bound: G17(self.lhv_bound),
            violation_factor: G17(self.violation_factor),
            settings: self.settings.iter().map(SettingJson::from).collect(),
            method: self.method.as_str(),
            seed: self.seed,
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Method;
    use crate::observables::Observable;
    use proptest::prelude::*;

    #[test]
    fn g17_examples() {
        assert_eq!(format_g17(std::f64::consts::SQRT_2), "1.4142135623730951");
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(-2.0), "-2");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(f64::NAN), "null");
    }

    proptest! {
        #[test]
        fn g17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let s = format_g17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), if x == 0.0 { x.to_bits() } else { x.to_bits() });
            let v: serde_json::Value = serde_json::from_str(&s).unwrap();
            prop_assert!(v.is_number());
        }
    }

    #[test]
    fn report_schema() {
        let r = ViolationReport::new(
            "ghz",
            3,
            std::f64::consts::SQRT_2,
            1.0,
            vec![ObserverSettings::new(Observable::x(), Observable::y())],
            Method::ClosedForm,
        )
        .with_alpha(std::f64::consts::FRAC_PI_4);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"quantum_value\":1.4142135623730951"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["state", "n", "alpha", "quantum_value", "lhv_bound", "violation_factor", "settings", "method", "seed"] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["method"], "closed-form");
        assert!(v["seed"].is_null());
        assert_eq!(v["settings"][0]["phi2"].as_f64().unwrap(), std::f64::consts::FRAC_PI_2);
    }
}
