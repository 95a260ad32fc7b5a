//! CSV traces of the Newton iterates of a barrier run.

use std::io::{self, Write};

use convexopt::model::ConvexProblem;
use convexopt::solver::SolveReport;

pub const TRACE_HEADER: &str = "outer,t,inner,f0,barrier,step,gap_bound";

/// One accepted Newton step of one centering.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub outer: usize,
    pub t: f64,
    pub inner: usize,
    pub f0: f64,
    /// `t·f0 + φ` after the step.
    pub barrier: f64,
    pub step: f64,
    pub gap_bound: f64,
}

/// Formats `x` with 9 significant digits, `%g` style: fixed notation for
/// decimal exponents in `[-4, 9)`, scientific otherwise, trailing zeros
/// trimmed.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// One row per accepted Newton step, in run order.
pub fn trace_rows(prob: &ConvexProblem, report: &SolveReport) -> Vec<TraceRow> {
    let m = prob.m() as f64;
    let mut rows = Vec::new();
    for (k, rec) in report.outer.iter().enumerate() {
        for (j, step) in rec.trace.records.iter().enumerate() {
            rows.push(TraceRow {
                outer: k + 1,
                t: rec.t,
                inner: j + 1,
                f0: prob.objective().value(&step.x),
                barrier: step.value,
                step: step.step,
                gap_bound: m / rec.t,
            });
        }
    }
    rows
}

/// Writes the header and `rows`; returns the number of bytes written.
pub fn write_trace(rows: &[TraceRow], sink: &mut dyn Write) -> io::Result<usize> {
    let mut out = String::with_capacity(TRACE_HEADER.len() + 1 + rows.len() * 64);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.outer.to_string(),
            format_number(r.t),
            r.inner.to_string(),
            format_number(r.f0),
            format_number(r.barrier),
            format_number(r.step),
            format_number(r.gap_bound),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(out.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(87500.0), "87500");
        assert_eq!(format_number(10.0), "10");
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(200000.0 / 3.0), "66666.6667");
        assert_eq!(format_number(400.0 / 3.0), "133.333333");
        assert_eq!(format_number(3e-11), "3e-11");
        assert_eq!(format_number(0.3), "0.3");
        assert_eq!(format_number(1e-4), "0.0001");
        assert_eq!(format_number(1e-5), "1e-5");
        assert_eq!(format_number(1e-6), "1e-6");
        assert_eq!(format_number(123456789.0), "123456789");
        assert_eq!(format_number(1234567890.0), "1.23456789e9");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(f64::INFINITY), "inf");
        // Rounding that carries into the next decade.
        assert_eq!(format_number(9.9999999999), "10");
    }

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        let n = write_trace(&[], &mut buf).unwrap();
        assert_eq!(buf, b"outer,t,inner,f0,barrier,step,gap_bound\n");
        assert_eq!(n, buf.len());
    }

    #[test]
    fn one_row() {
        let row = TraceRow {
            outer: 1,
            t: 10.0,
            inner: 1,
            f0: 87500.0,
            barrier: 875000.0,
            step: 1.0,
            gap_bound: 0.3,
        };
        let mut buf = Vec::new();
        write_trace(std::slice::from_ref(&row), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec![TRACE_HEADER, "1,10,1,87500,875000,1,0.3"]);

        let mut again = Vec::new();
        write_trace(&[row], &mut again).unwrap();
        assert_eq!(text.as_bytes(), again.as_slice());
    }
}
