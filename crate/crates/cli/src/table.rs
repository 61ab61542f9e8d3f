//! CSV emission with a fixed number of significant digits.

pub const SIGNIFICANT: usize = 9;

/// Formats `x` with [`SIGNIFICANT`] significant digits, in positional
/// notation for moderate magnitudes and scientific notation otherwise.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
    format!(
        "{:.*}",
        decimals,
        mantissa.parse::<f64>().expect("mantissa") * 10f64.powi(exp)
    )
}

/// Empty cell for missing values.
pub fn cell(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}

pub struct Table {
    out: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            out: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}
