//! Self-contained SVG charts. No external fonts or assets; output is a pure
//! function of the input.

use std::fmt::Write;

use crate::corpus::VariantKind;
use crate::evaluation::{AnnotationSet, EvalResult};
use crate::ranking::RankedList;

const FONT: &str = "font-family=\"monospace\" font-size=\"11\"";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>"
    );
}

const PLOT_LEFT: f64 = 56.0;
const PLOT_TOP: f64 = 30.0;
const PLOT_HEIGHT: f64 = 240.0;

fn y_axis(out: &mut String, width: f64, lo: f64, hi: f64) {
    let bottom = PLOT_TOP + PLOT_HEIGHT;
    let _ = writeln!(
        out,
        "<line x1=\"{PLOT_LEFT}\" y1=\"{PLOT_TOP}\" x2=\"{PLOT_LEFT}\" y2=\"{bottom}\" stroke=\"#000000\"/>"
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = bottom - PLOT_HEIGHT * i as f64 / 4.0;
        let _ = writeln!(
            out,
            "<line x1=\"{PLOT_LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\"/>",
            width - 10.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" {FONT}>{v:.2}</text>",
            PLOT_LEFT - 6.0,
            y + 4.0
        );
    }
}

/// One bar per bug on a fixed `[0, 1]` axis with the value printed above.
pub fn render_ndcg_chart(evals: &[EvalResult]) -> String {
    const BAR: f64 = 40.0;
    const STEP: f64 = 70.0;
    let width = PLOT_LEFT + STEP * evals.len() as f64 + 20.0;
    let height = PLOT_TOP + PLOT_HEIGHT + 60.0;
    let bottom = PLOT_TOP + PLOT_HEIGHT;

    let mut out = String::new();
    header(&mut out, width, height, "nDCG per bug");
    y_axis(&mut out, width, 0.0, 1.0);
    for (i, e) in evals.iter().enumerate() {
        let x = PLOT_LEFT + 15.0 + STEP * i as f64;
        let h = PLOT_HEIGHT * e.ndcg.clamp(0.0, 1.0);
        let _ = writeln!(
            out,
            "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{BAR}\" height=\"{h:.2}\" fill=\"#4c72b0\"><title>{}</title></rect>",
            bottom - h,
            escape(&e.bug_id)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>{:.2}</text>",
            x + BAR / 2.0,
            bottom - h - 4.0,
            e.ndcg
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>{}</text>",
            x + BAR / 2.0,
            bottom + 16.0,
            escape(&e.bug_id)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn relevance_color(rel: Option<f64>) -> &'static str {
    match rel {
        None => "#ffffff",
        Some(r) if r >= 3.0 => "#d4a017",
        Some(r) if r >= 2.0 => "#2e7d32",
        Some(r) if r >= 1.0 => "#1565c0",
        Some(r) if r >= 0.0 => "#9e9e9e",
        Some(_) => "#c62828",
    }
}

/// Scores in rank order. The developer fix is drawn as a diamond; fill
/// colour encodes the annotated relevance band (white when unannotated).
pub fn render_similarity_chart(ranked: &RankedList, annotations: Option<&AnnotationSet>) -> String {
    const STEP: f64 = 18.0;
    let n = ranked.entries.len();
    let width = PLOT_LEFT + STEP * n.max(1) as f64 + 30.0;
    let height = PLOT_TOP + PLOT_HEIGHT + 80.0;
    let bottom = PLOT_TOP + PLOT_HEIGHT;

    let (mut lo, mut hi) = ranked
        .entries
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e.score), hi.max(e.score))
        });
    if !lo.is_finite() || !hi.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.1).max(1e-3);
    let (lo, hi) = (lo - pad, hi + pad);

    let mut out = String::new();
    header(
        &mut out,
        width,
        height,
        &format!(
            "{} similarity to original ({})",
            ranked.bug_id, ranked.metric
        ),
    );
    y_axis(&mut out, width, lo, hi);
    for e in &ranked.entries {
        let x = PLOT_LEFT + STEP * (e.rank as f64 - 0.5);
        let y = bottom - PLOT_HEIGHT * (e.score - lo) / (hi - lo);
        let rel = annotations
            .and_then(|a| a.get(&e.doc_id))
            .map(|r| r.value());
        let fill = relevance_color(rel);
        let tip = escape(&e.doc_id);
        if e.kind == VariantKind::DeveloperFix {
            let _ = writeln!(
                out,
                "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"2\"><title>{tip}</title></polygon>",
                x, y - 7.0, x + 7.0, y, x, y + 7.0, x - 7.0, y,
                relevance_color(rel.or(Some(3.0)))
            );
        } else {
            let _ = writeln!(
                out,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{fill}\" stroke=\"#424242\"><title>{tip}</title></circle>"
            );
        }
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>rank</text>",
        PLOT_LEFT + STEP * n as f64 / 2.0,
        bottom + 18.0
    );

    let legend = [
        ("developer fix", "#d4a017"),
        ("2 syntactic", "#2e7d32"),
        ("1 semantic", "#1565c0"),
        ("0 uncertain", "#9e9e9e"),
        ("-1 incorrect", "#c62828"),
    ];
    for (i, (label, color)) in legend.iter().enumerate() {
        let lx = 10.0 + 110.0 * i as f64;
        let ly = bottom + 45.0;
        let _ = writeln!(
            out,
            "<rect x=\"{lx:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{color}\" stroke=\"#424242\"/>",
            ly - 9.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{ly:.2}\" {FONT}>{label}</text>",
            lx + 14.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::Metric;

    fn eval(bug: &str, ndcg: f64) -> EvalResult {
        EvalResult {
            bug_id: bug.into(),
            p: 1,
            dcg: 0.0,
            idcg: 0.0,
            ndcg,
            flags: Default::default(),
        }
    }

    #[test]
    fn bars_match_values() {
        let svg = render_ndcg_chart(&[eval("b1", 1.0), eval("b<2>", 0.5)]);
        assert_eq!(svg.matches("<rect x=\"").count(), 1 + 2);
        assert!(svg.contains("height=\"240.00\""));
        assert!(svg.contains("height=\"120.00\""));
        assert!(svg.contains(">1.00</text>") && svg.contains(">0.50</text>"));
        assert!(svg.contains("b&lt;2&gt;"));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn single_bar() {
        let svg = render_ndcg_chart(&[eval("only", 0.25)]);
        assert!(svg.contains("height=\"60.00\""));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn developer_marker_distinguished() {
        let r = RankedList::from_scores(
            "b",
            Metric::Cosmul,
            vec![
                ("b/developer".into(), VariantKind::DeveloperFix, 0.9),
                ("b/candidates/c1".into(), VariantKind::Candidate, 0.8),
            ],
        );
        let svg = render_similarity_chart(&r, None);
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
        let one = RankedList::from_scores(
            "b",
            Metric::Cosmul,
            vec![("b/developer".into(), VariantKind::DeveloperFix, 0.9)],
        );
        assert!(render_similarity_chart(&one, None).contains("<polygon"));
    }
}
