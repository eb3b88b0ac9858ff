use nbimmune_web::{generate_edges, immunization_traces, prediction_scatter, spectral};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn generators_are_seeded() {
    for kind in ["er", "ba", "sbm", "powerlaw"] {
        let a = generate_edges(kind, 120, 4).unwrap();
        assert_eq!(a, generate_edges(kind, 120, 4).unwrap(), "{kind}");
        assert!(!a.is_empty());
    }
    assert!(generate_edges("lattice", 10, 1).is_err());
}

#[test]
fn spectral_view_of_k4() {
    let v = parse(&spectral("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap());
    assert!((v["lambda1"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["edges"].as_array().unwrap().len(), 6);
    let c = v["centrality"].as_array().unwrap();
    assert!(c.iter().all(|x| (x.as_f64().unwrap() - c[0].as_f64().unwrap()).abs() < 1e-9));
}

#[test]
fn bad_input_is_an_error_message() {
    assert!(spectral("0 1\n2\n").unwrap_err().contains("line 2"));
    let big: String = (0..6000).map(|i| format!("{i} {}\n", i + 1)).collect();
    assert!(spectral(&big).unwrap_err().contains("at most"));
}

#[test]
fn scatter_points_are_positive_drops() {
    let e = generate_edges("ba", 200, 2).unwrap();
    let v = parse(&prediction_scatter(&e, 0.1, 5).unwrap());
    let pts = v["points"].as_array().unwrap();
    assert!(!pts.is_empty());
    for p in pts {
        let t = p["true_drop"].as_f64().unwrap();
        let hat = p["predicted_exact"].as_f64().unwrap();
        assert!(t > 0.0);
        assert!((t - hat).abs() / t < 0.2);
    }
    assert!(prediction_scatter("0 1\n1 2\n2 0\n", 0.5, 1).is_err());
}

#[test]
fn traces_have_one_entry_per_removal() {
    let e = generate_edges("er", 150, 3).unwrap();
    let v = parse(&immunization_traces(&e, 4, "degree, xdeg,xnb").unwrap());
    let traces = v.as_array().unwrap();
    assert_eq!(traces.len(), 3);
    assert_eq!(traces[1]["strategy"], "xdeg");
    for t in traces {
        assert_eq!(t["lambda_after_each"].as_array().unwrap().len(), 4);
        assert_eq!(t["removed"].as_array().unwrap().len(), 4);
    }
    assert!(immunization_traces(&e, 1, "degree,bogus").is_err());
}
