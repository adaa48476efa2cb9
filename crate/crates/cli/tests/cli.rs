mod common;

use common::{assert_valid, f, umbilic, umbilic_env};
use std::f64::consts::PI;

#[test]
fn metric_identity_average_parameters() {
    let run = umbilic(&["metric", "--alpha", "0.25", "--beta", "1.75"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = run.json();
    assert_valid(&doc);
    assert!((f(&doc, "/result/ratio") - 5.0).abs() < 1e-12);
    assert!((f(&doc, "/result/sigma") - 0.745356).abs() < 1e-6);
    assert!((f(&doc, "/result/relative_eigenvalues/plus") - 0.2).abs() < 1e-10);
    assert!((f(&doc, "/result/relative_eigenvalues/minus") + 1.0).abs() < 1e-10);
    assert!((f(&doc, "/result/v_plus") + f(&doc, "/result/v_minus") - PI * PI / 2.0).abs() < 1e-12);
    assert_eq!(doc["config"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn metric_boundary_is_rejected() {
    let run = umbilic(&["metric", "--alpha", "1", "--beta", "1"]);
    assert_eq!(run.code, 2);
    let doc = run.json();
    assert_valid(&doc);
    assert_eq!(doc["result"]["admissible"], false);
    assert!(doc["result"]["diagnostic"].as_str().unwrap().contains("not admissible"));
}

#[test]
fn metric_balanced_line() {
    let run = umbilic(&["metric", "--alpha", "-0.2", "--beta", "1"]);
    assert_eq!(run.code, 0);
    assert!((f(&run.json(), "/result/ratio") - 1.0).abs() < 1e-12);
}

#[test]
fn metric_from_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("metric.json");
    let path_str = path.to_str().unwrap();
    let first = umbilic(&["metric", "--alpha", "0.1234567890123", "--beta", "2.718281828459045", "--out", path_str]);
    assert_eq!(first.code, 0);
    let original: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let second = umbilic(&["metric", "--from-json", path_str]);
    assert_eq!(second.code, 0, "{}", second.stderr);
    let replay = second.json();
    assert_valid(&replay);
    assert_eq!(replay["result"], original["result"]);
}

#[test]
fn metric_from_missing_file_is_io_error() {
    let run = umbilic(&["metric", "--from-json", "/nonexistent/metric.json"]);
    assert_eq!(run.code, 4);
}

#[test]
fn average_examples() {
    let run = umbilic(&["average", "1", "0", "0", "0", "1", "0", "0", "1", "0", "1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = run.json();
    assert_valid(&doc);
    assert_eq!(f(&doc, "/result/alpha"), 0.25);
    assert_eq!(f(&doc, "/result/beta"), 1.75);
    assert!(f(&doc, "/result/residual") <= 1e-10);

    let doc = umbilic(&["average", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0"]).json();
    assert_eq!((f(&doc, "/result/alpha"), f(&doc, "/result/beta")), (0.0, 0.0));
    assert_eq!(doc["result"]["admissible"], false);

    // Q(0, 3): diagonal (1, 3, 3, 1), no off-diagonal terms
    let doc = umbilic(&["average", "1", "0", "0", "0", "3", "0", "0", "3", "0", "1"]).json();
    assert!(f(&doc, "/result/alpha").abs() < 1e-15);
    assert!((f(&doc, "/result/beta") - 3.0).abs() < 1e-15);
    assert!(f(&doc, "/result/residual") <= 1e-10);
}

#[test]
fn average_rejects_malformed_input() {
    assert_eq!(umbilic(&["average", "1", "0", "0"]).code, 2);
    assert_eq!(umbilic(&["average", "1", "0", "0", "0", "1", "0", "0", "1", "0", "x"]).code, 2);
    assert_eq!(umbilic(&["average", "1", "0", "0", "0", "1", "0", "0", "1", "0", "1", "--nodes", "4"]).code, 2);
}

#[test]
fn mc_ratio_and_volume() {
    let run = umbilic(&["mc", "--alpha", "0", "--beta", "3", "--n", "1000000", "--seed", "42", "--mode", "ratio"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = run.json();
    assert_valid(&doc);
    assert!(f(&doc, "/result/z_score").abs() <= 3.0);
    assert_eq!(f(&doc, "/result/target"), 3.0);

    let doc = umbilic(&["mc", "--alpha", "0", "--beta", "3", "--n", "1000000", "--seed", "42", "--mode", "volume"]).json();
    assert_valid(&doc);
    let est = f(&doc, "/result/estimate");
    assert!((est - 4.9348).abs() <= 3.0 * f(&doc, "/result/std_error"));
}

#[test]
fn mc_census_and_ball_modes() {
    for extra in [["--mode", "census"], ["--sampling", "ball"]] {
        let mut args = vec!["mc", "--alpha", "0.25", "--beta", "1.75", "--n", "200000", "--seed", "3"];
        args.extend(extra);
        let run = umbilic(&args);
        assert_eq!(run.code, 0, "{}", run.stderr);
        let doc = run.json();
        assert_valid(&doc);
        assert!(f(&doc, "/result/z_score").abs() <= 3.0);
    }
}

#[test]
fn mc_is_byte_identical_across_runs_and_threads() {
    let args = ["mc", "--alpha", "0.1", "--beta", "2", "--n", "300000", "--seed", "7"];
    let a = umbilic_env(&args, &[("UMBILIC_THREADS", "1")]);
    let b = umbilic_env(&args, &[("UMBILIC_THREADS", "3")]);
    let c = umbilic(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn mc_error_paths() {
    assert_eq!(umbilic(&["mc", "--alpha", "2", "--beta", "1", "--n", "100000"]).code, 2);
    assert_eq!(umbilic(&["mc", "--alpha", "0", "--beta", "3", "--n", "100"]).code, 2);
    assert_eq!(umbilic_env(&["mc", "--alpha", "0", "--beta", "3"], &[("UMBILIC_THREADS", "zero")]).code, 2);
    assert_eq!(umbilic(&["mc", "--alpha", "0", "--beta", "3", "--format", "svg"]).code, 2);
}

#[test]
fn census_json_and_csv() {
    let base = ["census", "--alpha", "0", "--beta", "3", "--alpha", "-0.2", "--beta", "1", "--n", "200000", "--seed", "11"];
    let run = umbilic(&base);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = run.json();
    assert_valid(&doc);
    let rows = doc["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[1]["target"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    for row in rows {
        assert!(row["z_score"].as_f64().unwrap().abs() <= 3.0);
    }

    let mut csv_args = base.to_vec();
    csv_args.extend(["--format", "csv"]);
    let run = umbilic(&csv_args);
    assert_eq!(run.code, 0);
    let mut reader = csv::Reader::from_reader(run.stdout.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "command");
    assert!(headers.iter().any(|h| h == "seed"));
    let records: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 2);
    let est: f64 = records[0][7].parse().unwrap();
    assert_eq!(est, rows[0]["estimate"].as_f64().unwrap());

    assert_eq!(umbilic(&["census", "--alpha", "0", "--n", "20000"]).code, 2);
    assert_eq!(umbilic(&["census", "--alpha", "0", "--alpha", "1", "--beta", "3", "--n", "20000"]).code, 2);
}

#[test]
fn index_examples() {
    let run = umbilic(&["index", "3", "0", "1", "0", "--k", "1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = run.json();
    assert_valid(&doc);
    assert_eq!(f(&doc, "/result/t"), 2.0);
    assert_eq!(f(&doc, "/result/index"), 0.5);
    assert_eq!(f(&doc, "/result/winding"), 0.5);
    assert_eq!(doc["result"]["agree"], true);

    let doc = umbilic(&["index", "0", "1", "0", "0"]).json();
    assert_eq!(f(&doc, "/result/t"), -1.0);
    assert_eq!(f(&doc, "/result/index"), -0.5);
    assert_eq!(doc["result"]["index_label"], "-1/2");

    let run = umbilic(&["index", "1", "0", "1", "0"]);
    assert_eq!(run.code, 2);
    let doc = run.json();
    assert_valid(&doc);
    assert_eq!(f(&doc, "/result/t"), 0.0);
    assert_eq!(doc["result"]["transversal"], false);
}

#[test]
fn index_accepts_negative_coefficients() {
    let run = umbilic(&["index", "-1", "0", "1", "0", "--k", "-0.5"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(f(&run.json(), "/result/index"), -0.5);
}

fn svg_for(args: &[&str]) -> (String, roxmltree::Document<'static>) {
    let run = umbilic(args);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let text: &'static str = Box::leak(run.stdout.into_boxed_str());
    let doc = roxmltree::Document::parse(text).expect("well-formed SVG");
    (text.to_owned(), doc)
}

#[test]
fn foliation_svg_structure() {
    let (text, doc) = svg_for(&["foliation", "3", "0", "1", "0", "--density", "8"]);
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("width"), Some("800"));
    assert_eq!(root.attribute("viewBox"), Some("-1.000000 -1.000000 2.000000 2.000000"));
    let polylines: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("polyline")).collect();
    assert!(polylines.len() >= 16);
    for class in ["family-1", "family-2"] {
        assert!(polylines.iter().any(|p| p.attribute("class") == Some(class)));
    }
    assert!(doc.descendants().any(|n| n.has_tag_name("circle") && n.attribute("class") == Some("umbilic")));
    let caption = doc
        .descendants()
        .find(|n| n.attribute("class") == Some("caption"))
        .and_then(|n| n.text())
        .unwrap();
    assert!(caption.contains("index = +1/2"), "{caption}");
    assert!(caption.contains("T = 2"));

    let (again, _) = svg_for(&["foliation", "3", "0", "1", "0", "--density", "8"]);
    assert_eq!(text, again);
}

#[test]
fn foliation_negative_index_caption() {
    let (_, doc) = svg_for(&["foliation", "0", "1", "0", "0"]);
    let caption = doc
        .descendants()
        .find(|n| n.attribute("class") == Some("caption"))
        .and_then(|n| n.text())
        .unwrap();
    assert!(caption.contains("index = -1/2"), "{caption}");
}

#[test]
fn foliation_error_paths() {
    assert_eq!(umbilic(&["foliation", "1", "0", "1", "0"]).code, 2);
    assert_eq!(umbilic(&["foliation", "3", "0", "1", "0", "--out", "/nonexistent-dir/x.svg"]).code, 4);
    assert_eq!(umbilic(&["foliation", "3", "0", "1", "0", "--format", "json"]).code, 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.svg");
    let run = umbilic(&["foliation", "3", "0", "1", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    roxmltree::Document::parse(&text).unwrap();
}
