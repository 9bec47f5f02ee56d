use patchsim_core::report::{
    render_ndcg_chart, render_similarity_chart, render_summary_csv, BugSummary, ReportBundle,
    CSV_HEADER,
};
use patchsim_core::{AnnotationSet, EvalResult, Metric, RankedList, RelevanceScore, VariantKind};

fn bundle() -> ReportBundle {
    let ranked = |bug: &str, dev_score: f64| {
        RankedList::from_scores(
            bug,
            Metric::Cosmul,
            vec![
                (
                    format!("{bug}/developer"),
                    VariantKind::DeveloperFix,
                    dev_score,
                ),
                (format!("{bug}/candidates/p1"), VariantKind::Candidate, 0.5),
                (format!("{bug}/candidates/p2"), VariantKind::Candidate, 0.25),
            ],
        )
    };
    ReportBundle {
        bugs: vec![
            BugSummary {
                bug_id: "a<&>".into(),
                candidates: 2,
                syntactic_matches: 0,
            },
            BugSummary {
                bug_id: "b".into(),
                candidates: 2,
                syntactic_matches: 1,
            },
            BugSummary {
                bug_id: "c".into(),
                candidates: 5,
                syntactic_matches: 0,
            },
        ],
        rankings: vec![ranked("a<&>", 0.9), ranked("b", 0.3)],
        evals: vec![
            EvalResult {
                bug_id: "a<&>".into(),
                p: 3,
                dcg: 7.123_456_789,
                idcg: 7.5,
                ndcg: 0.949_794_238_5,
                flags: Default::default(),
            },
            EvalResult {
                bug_id: "b".into(),
                p: 3,
                dcg: 1.0,
                idcg: 3.0,
                ndcg: 1.0 / 3.0,
                flags: Default::default(),
            },
        ],
    }
}

#[test]
fn csv_round_trips_at_six_decimals() {
    let b = bundle();
    let text = render_summary_csv(&b).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        CSV_HEADER
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);

    for row in &rows {
        let bug = b.bugs.iter().find(|x| x.bug_id == row[0]).unwrap();
        assert_eq!(row[1].parse::<usize>().unwrap(), bug.candidates);
        assert_eq!(row[6].parse::<usize>().unwrap(), bug.syntactic_matches);
        match b.evals.iter().find(|e| e.bug_id == row[0]) {
            Some(e) => {
                for (cell, want) in [(&row[3], e.dcg), (&row[4], e.idcg), (&row[5], e.ndcg)] {
                    assert_eq!(cell.split('.').nth(1).unwrap().len(), 6);
                    assert!((cell.parse::<f64>().unwrap() - want).abs() <= 5e-7);
                }
            }
            None => assert!(row[3].is_empty() && row[5].is_empty()),
        }
    }
    assert_eq!(&rows[0][2], "1");
    assert_eq!(&rows[1][2], "2");
    assert_eq!(&rows[2][2], "");
}

#[test]
fn charts_are_deterministic_and_escaped() {
    let b = bundle();
    assert_eq!(render_ndcg_chart(&b.evals), render_ndcg_chart(&b.evals));
    let chart = render_ndcg_chart(&b.evals);
    assert!(chart.starts_with("<svg"));
    assert!(chart.contains("a&lt;&amp;&gt;"));
    assert!(!chart.contains("a<&>"));
    assert!(chart.contains("0.95"));
    assert!(chart.contains("0.33"));

    let mut ann = AnnotationSet::new("b", "x");
    ann.insert("b/candidates/p1", RelevanceScore::new(2.0).unwrap());
    let s1 = render_similarity_chart(&b.rankings[1], Some(&ann));
    let s2 = render_similarity_chart(&b.rankings[1], Some(&ann));
    assert_eq!(s1, s2);
    assert!(s1.contains("<polygon"));
    assert!(s1.matches("<circle").count() >= 2);
    assert_ne!(s1, render_similarity_chart(&b.rankings[1], None));
}
