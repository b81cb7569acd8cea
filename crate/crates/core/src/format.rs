//! Number formatting shared by the CSV writers and the CLI.

/// 17 significant digits, round-trippable.
pub fn machine(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        non_finite(x)
    }
}

/// `digits` significant digits in the style of C's `%g`.
pub fn significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return non_finite(x);
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

/// 12 significant digits.
pub fn human(x: f64) -> String {
    significant(x, 12)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn non_finite(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn human_output() {
        assert_eq!(human(0.3), "0.3");
        assert_eq!(human(0.1 + 0.2), "0.3");
        assert_eq!(human(0.0), "0");
        assert_eq!(human(1.0 / 3.0), "0.333333333333");
        assert_eq!(human(1234.5), "1234.5");
        assert_eq!(human(2.5e-9), "2.5e-9");
        assert_eq!(human(f64::INFINITY), "inf");
    }

    #[test]
    fn machine_output_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-7, 12345.678] {
            let s = machine(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }
}
