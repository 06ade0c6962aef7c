//! Fixed-schema CSV text.

pub const CCDF_HEADER: &str = "variant,cr,threshold_db,ccdf,samples";
pub const BER_HEADER: &str = "variant,cr,ebn0_db,bit_errors,bits_total,ber,confident";
pub const CCDF_SUMMARY_HEADER: &str = "cr,papr_previous_db,papr_proposed_db,improvement_db";
pub const BER_SUMMARY_HEADER: &str = "cr,ber_previous,ber_proposed,difference";
pub const ANALYTICAL_HEADER: &str = "scheme,ebn0_db,ber";
pub const TELEMETRY_HEADER: &str = "symbol,variant,cr,papr_pre_db,papr_clip_db,papr_filt_db";

/// Six significant digits, `%g` style: fixed notation for exponents in
/// `-4..6`, scientific otherwise, trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `"nan"` for a missing value.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), fmt_sig)
}

/// Reference rows without clipping carry `cr = inf`.
pub fn fmt_cr(cr: Option<f64>) -> String {
    fmt_sig(cr.unwrap_or(f64::INFINITY))
}
