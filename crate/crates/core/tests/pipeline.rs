use specreg::harness::{
    emit_plot, fit_rate, parse_raw_csv, render_plot, run_experiment, write_experiment, ExperimentConfig, RateReport,
    SummaryRow,
};

fn small_config(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(&format!(
        r#"
n_grid = [40, 80, 160]
repetitions = 3
c = [1.0, 5.0]
test_points = 400
base_seed = 17
output_dir = "{}"
stem = "small"
"#,
        dir.display()
    ))
    .unwrap()
}

#[test]
fn experiment_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let runs = run_experiment(&cfg).unwrap();
    let written = write_experiment(&cfg, &runs).unwrap();
    // raw, summary, rate and plot for each c, plus one metadata file
    assert_eq!(written.len(), 2 * 4 + 1);
    let raw = std::fs::read_to_string(dir.path().join("small_krr_c1_raw.csv")).unwrap();
    assert!(raw.starts_with("n,repetition,seed,nu,error\n"));
    assert_eq!(raw.lines().count(), 1 + 3 * 3);
    assert_eq!(specreg::harness::raw_csv(&parse_raw_csv(&raw).unwrap()), raw);
    assert_eq!(parse_raw_csv(&raw).unwrap().len(), runs[0].rows.len());
    let summary = std::fs::read_to_string(dir.path().join("small_krr_c5_summary.csv")).unwrap();
    assert!(summary.starts_with("n,mean_error,std_error,count\n"));
    let rate = std::fs::read_to_string(dir.path().join("small_krr_c5_rate.csv")).unwrap();
    assert!(rate.starts_with("slope,intercept,r_squared,theoretical_rate\n"));
    let meta = std::fs::read_to_string(dir.path().join("small.meta")).unwrap();
    assert!(meta.contains("ChaCha8Rng"));
}

#[test]
fn paper_setting_row_count() {
    let mut cfg = ExperimentConfig::paper();
    cfg.n_grid = vec![1000];
    cfg.test_points = 1000;
    let runs = run_experiment(&cfg).unwrap();
    assert_eq!(runs[0].rows.len(), 50);
    assert!(runs[0].rows.iter().all(|r| r.error.is_ok()));
}

#[test]
fn error_decreases_with_n_in_paper_setting() {
    let mut cfg = ExperimentConfig::desk();
    cfg.n_grid = vec![500, 2000];
    cfg.test_points = 2000;
    let runs = run_experiment(&cfg).unwrap();
    let report = specreg::harness::summarize(&runs[0].rows);
    assert!(report[1].mean_error < report[0].mean_error, "{report:?}");
}

fn svg_paths(svg: &str) -> usize {
    let doc = roxmltree::Document::parse(svg).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    doc.descendants().filter(|n| n.has_tag_name("path")).count()
}

#[test]
fn two_point_plot_is_valid_svg() {
    let summary = vec![
        SummaryRow { n: 100, mean_error: 0.5, std_error: 0.1, count: 10 },
        SummaryRow { n: 1000, mean_error: 0.2, std_error: 0.05, count: 10 },
    ];
    let report = RateReport {
        summary: summary.clone(),
        slope: (0.2f64 / 0.5).log10(),
        intercept: 0.5f64.ln() - (0.2f64 / 0.5).log10() * 100f64.ln(),
        r_squared: 1.0,
        theoretical_rate: -4.0 / 9.0,
    };
    let svg = render_plot(&summary, &report).unwrap();
    assert!(svg_paths(&svg) >= 3);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    for class in ["band", "mean", "fit"] {
        assert!(doc.descendants().any(|n| n.attribute("class") == Some(class)), "missing {class}");
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.svg");
    emit_plot(&summary, &report, &path).unwrap();
    assert_eq!(std::fs::read_to_string(path).unwrap(), svg);
}

#[test]
fn slope_annotation_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let runs = run_experiment(&cfg).unwrap();
    let report = fit_rate(&runs[0].rows, cfg.s, cfg.beta).unwrap();
    let svg = render_plot(&report.summary, &report).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let text = doc.descendants().find(|n| n.attribute("class") == Some("slope")).unwrap().text().unwrap().to_string();
    assert_eq!(text, format!("r = {:.3}", report.slope));
    assert!(svg.contains("stroke-dasharray"));
}
