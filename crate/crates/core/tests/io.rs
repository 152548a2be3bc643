use std::path::Path;

use expsearch::io::{
    generate, parse_instance, read_instance, render_instance, write_instance, Family, GeneratorSpec, Probabilities,
};
use proptest::prelude::*;

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn spec(family: Family, n: usize, density: f64, weighted: bool, seed: u64) -> GeneratorSpec {
    GeneratorSpec { family, n, density, weighted, seed }
}

#[test]
fn generators_match_golden_files() {
    let cases = [
        (spec(Family::DensityControlled, 8, 0.4, true, 7), "density-controlled-n8-d40-w-s7.inst"),
        (spec(Family::Euclidean, 6, 0.0, false, 3), "euclidean-n6-u-s3.inst"),
    ];
    for (s, file) in cases {
        let made = generate(&s).unwrap();
        assert_eq!(format!("{}.inst", s.default_name()), file);
        assert_eq!(render_instance(&made).unwrap(), golden(file), "{file}");
    }
}

#[test]
fn golden_lengths_follow_coordinates() {
    let file = parse_instance(&golden("density-controlled-n8-d40-w-s7.inst")).unwrap();
    let coords = file.coords.as_ref().unwrap();
    assert_eq!(file.instance.edges().len(), 11);
    for e in file.instance.edges() {
        let l1: i64 = coords[e.u].iter().zip(&coords[e.v]).map(|(a, b)| (a - b).abs()).sum();
        assert_eq!(e.length, l1 as f64);
    }
    let Probabilities::Weights { weights, total } = &file.probabilities else { panic!("weights expected") };
    assert_eq!(weights[0], 0);
    assert_eq!(weights.iter().sum::<u64>(), *total);

    let file = parse_instance(&golden("euclidean-n6-u-s3.inst")).unwrap();
    let coords = file.coords.as_ref().unwrap();
    assert_eq!(file.instance.edges().len(), 15);
    for e in file.instance.edges() {
        let d2: i64 = coords[e.u].iter().zip(&coords[e.v]).map(|(a, b)| (a - b) * (a - b)).sum();
        assert_eq!(e.length, (d2 as f64).sqrt().round().max(1.0));
    }
    for v in 1..6 {
        assert_eq!(file.instance.prob(v), 0.2);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let made = generate(&spec(Family::RandomMetric, 9, 0.0, true, 11)).unwrap();
    let path = dir.path().join("x.inst");
    write_instance(&path, &made).unwrap();
    assert_eq!(read_instance(&path).unwrap(), made);
    let err = read_instance(dir.path().join("missing.inst")).unwrap_err();
    assert!(err.to_string().contains("missing.inst"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn render_parse_round_trip(n in 2usize..14, density in 0.3f64..1.0, weighted: bool, seed: u64, fam in 0usize..3) {
        let family = [Family::RandomMetric, Family::Euclidean, Family::DensityControlled][fam];
        let made = generate(&spec(family, n, density, weighted, seed));
        let pairs = (n * (n - 1) / 2) as f64;
        if family == Family::DensityControlled && ((density * pairs).round() as usize) < n - 1 {
            prop_assert!(matches!(made, Err(expsearch::Error::InfeasibleRequest(_))));
            return Ok(());
        }
        let made = made.unwrap();
        let text = render_instance(&made).unwrap();
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &made);
        prop_assert_eq!(render_instance(&back).unwrap(), text);
        prop_assert!((made.instance.total_prob() - 1.0).abs() < 1e-9);
    }
}
