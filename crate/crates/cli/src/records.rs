//! Output records. Every exact rational appears as a `"p/q"` string; every
//! decimal rendering is a faithful rounding — enclosure bounds round outward
//! (lower toward zero, upper away) so printed digits still bracket the true
//! value. Field order is declaration order, so identical inputs serialize
//! byte-identically.

use serde::Serialize;

use cantorprod_core::{
    decimal_sig, format_rat, ChainConditionReport, ComponentsReport, CoverageCheck, CurvePoint,
    MeasureEnclosure, Params, Rat, Round, SandwichReport,
};

const SIG_DIGITS: u32 = 12;

pub fn dec_lower(x: &Rat) -> String {
    decimal_sig(x, SIG_DIGITS, Round::TowardZero).0
}

pub fn dec_upper(x: &Rat) -> String {
    decimal_sig(x, SIG_DIGITS, Round::AwayFromZero).0
}

pub fn dec_nearest(x: &Rat) -> String {
    decimal_sig(x, SIG_DIGITS, Round::Nearest).0
}

#[derive(Serialize)]
pub struct MeasureRecord {
    pub m: u32,
    pub lambda: String,
    pub rank_k: u32,
    #[serde(rename = "depth_N")]
    pub depth_n: u32,
    pub lower: String,
    pub lower_decimal: String,
    pub upper_decimal: String,
    pub certified: bool,
}

pub fn measure_record(p: &Params, enc: &MeasureEnclosure) -> MeasureRecord {
    MeasureRecord {
        m: p.m(),
        lambda: format_rat(p.lambda()),
        rank_k: enc.rank_k,
        depth_n: enc.depth_n,
        lower: format_rat(&enc.lower),
        lower_decimal: dec_lower(&enc.lower),
        upper_decimal: dec_upper(&enc.upper),
        certified: enc.certified,
    }
}

#[derive(Serialize)]
pub struct StructureRecord {
    pub m: u32,
    pub lambda: String,
    pub rank_k: u32,
    pub component_count: u64,
    pub total_length: String,
    pub total_length_decimal: String,
    pub degenerate_dropped: u64,
    pub min: Option<String>,
    pub max: Option<String>,
    /// Leading/trailing components as ["p/q", "p/q"] pairs.
    pub first: Vec<[String; 2]>,
    pub last: Vec<[String; 2]>,
    /// (floor of log10 of component length, how many components).
    pub length_histogram: Vec<(i64, u64)>,
}

pub fn structure_record(
    p: &Params,
    rank_k: u32,
    report: &ComponentsReport,
    min: Option<&Rat>,
    max: Option<&Rat>,
) -> StructureRecord {
    let pairs = |v: &[cantorprod_core::RatInterval]| {
        v.iter()
            .map(|iv| [format_rat(iv.lo()), format_rat(iv.hi())])
            .collect()
    };
    StructureRecord {
        m: p.m(),
        lambda: format_rat(p.lambda()),
        rank_k,
        component_count: report.count,
        total_length: format_rat(&report.total_length),
        total_length_decimal: dec_nearest(&report.total_length),
        degenerate_dropped: report.degenerate_dropped,
        min: min.map(format_rat),
        max: max.map(format_rat),
        first: pairs(&report.first),
        last: pairs(&report.last),
        length_histogram: report.length_histogram.clone(),
    }
}

#[derive(Serialize)]
pub struct CurvePointRecord {
    pub lambda: String,
    pub lambda_decimal: String,
    pub lower: String,
    pub lower_decimal: String,
    pub upper: String,
    pub upper_decimal: String,
    pub rank_k: u32,
    #[serde(rename = "depth_N")]
    pub depth_n: u32,
    pub certified: bool,
    pub met_target: bool,
}

pub fn curve_point_record(pt: &CurvePoint) -> CurvePointRecord {
    CurvePointRecord {
        lambda: format_rat(&pt.lambda),
        lambda_decimal: dec_nearest(&pt.lambda),
        lower: format_rat(&pt.lower),
        lower_decimal: dec_lower(&pt.lower),
        upper: format_rat(&pt.upper),
        upper_decimal: dec_upper(&pt.upper),
        rank_k: pt.rank_k,
        depth_n: pt.depth_n,
        certified: pt.certified,
        met_target: pt.met_target,
    }
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from(
        "lambda_decimal,lambda_exact,lower_decimal,upper_decimal,rank_k,depth_N,certified\n",
    );
    for pt in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            dec_nearest(&pt.lambda),
            format_rat(&pt.lambda),
            dec_lower(&pt.lower),
            dec_upper(&pt.upper),
            pt.rank_k,
            pt.depth_n,
            pt.certified,
        ));
    }
    out
}

/// Whitespace-separated table with a comment header, ready for
/// `plot "file" using 1:2 ... with lines`.
pub fn curve_plot(m: u32, points: &[CurvePoint]) -> String {
    let mut out = format!("# product-set measure enclosures, m={m}\n");
    out.push_str("# lambda lower upper rank_k depth_N certified met_target\n");
    for pt in points {
        out.push_str(&format!(
            "{} {} {} {} {} {} {}\n",
            dec_nearest(&pt.lambda),
            dec_lower(&pt.lower),
            dec_upper(&pt.upper),
            pt.rank_k,
            pt.depth_n,
            u8::from(pt.certified),
            u8::from(pt.met_target),
        ));
    }
    out
}

#[derive(Serialize)]
pub struct NearHalfRecord {
    pub rank_k: u32,
    pub target_lo: String,
    pub target_hi: String,
    pub contained: bool,
    pub coverage_gap: String,
    pub coverage_gap_decimal: String,
}

pub fn near_half_record(rank_k: u32, c: &CoverageCheck) -> NearHalfRecord {
    NearHalfRecord {
        rank_k,
        target_lo: format_rat(c.target.lo()),
        target_hi: format_rat(c.target.hi()),
        contained: c.contained,
        coverage_gap: format_rat(&c.coverage_gap),
        coverage_gap_decimal: dec_upper(&c.coverage_gap),
    }
}

#[derive(Serialize)]
pub struct VerifyRecord {
    pub m: u32,
    pub lambda: String,
    pub quantity_h: String,
    pub quantity_h_decimal: String,
    pub quantity_v: String,
    pub quantity_v_decimal: String,
    pub quantity_claim: String,
    pub quantity_claim_decimal: String,
    pub all_pass: bool,
    /// Populated only where the closed-form coverage target applies
    /// (m = 2, 11/25 < λ < 1/2).
    pub near_half: Option<NearHalfRecord>,
}

pub fn verify_record(
    p: &Params,
    chain: &ChainConditionReport,
    near_half: Option<NearHalfRecord>,
) -> VerifyRecord {
    VerifyRecord {
        m: p.m(),
        lambda: format_rat(p.lambda()),
        quantity_h: format_rat(&chain.quantity_h),
        quantity_h_decimal: dec_nearest(&chain.quantity_h),
        quantity_v: format_rat(&chain.quantity_v),
        quantity_v_decimal: dec_nearest(&chain.quantity_v),
        quantity_claim: format_rat(&chain.quantity_claim),
        quantity_claim_decimal: dec_nearest(&chain.quantity_claim),
        all_pass: chain.all_pass,
        near_half,
    }
}

#[derive(Serialize)]
pub struct OracleRecord {
    pub m: u32,
    pub lambda: String,
    pub level: u32,
    pub rank_k: u32,
    #[serde(rename = "depth_N")]
    pub depth_n: u32,
    pub lower: String,
    pub lower_decimal: String,
    pub outer: String,
    pub outer_decimal: String,
    pub ok: bool,
}

pub fn oracle_record(
    p: &Params,
    level: u32,
    rank_k: u32,
    depth_n: u32,
    rep: &SandwichReport,
) -> OracleRecord {
    OracleRecord {
        m: p.m(),
        lambda: format_rat(p.lambda()),
        level,
        rank_k,
        depth_n,
        lower: format_rat(&rep.lower),
        lower_decimal: dec_lower(&rep.lower),
        outer: format_rat(&rep.outer),
        outer_decimal: dec_upper(&rep.outer),
        ok: rep.ok,
    }
}

#[derive(Serialize)]
pub struct ErrorRecord {
    pub code: &'static str,
    pub message: String,
}
