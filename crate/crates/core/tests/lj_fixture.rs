use std::path::Path;

use symquot::shape::{isotropy, lj_energy, lj_jet, load_configurations, IsotropyOptions};
use symquot::symmetry::moving_average_density;

fn fixture() -> Vec<symquot::shape::ConfigurationRecord> {
    load_configurations(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/lj_fixture.xyz")).unwrap()
}

#[test]
fn recorded_energies_match_the_potential() {
    let recs = fixture();
    assert_eq!(recs.len(), 20);
    for r in &recs {
        let e = lj_energy(&r.config).unwrap();
        assert!((e - r.energy.unwrap()).abs() < 1e-9, "{} vs {:?}", e, r.energy);
        // every block is a stationary point
        let g = lj_jet(&r.config).unwrap().grad;
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-8);
    }
}

#[test]
fn symmetric_points_crowd_the_bottom() {
    let mut recs = fixture();
    recs.sort_by(|a, b| a.energy.unwrap().total_cmp(&b.energy.unwrap()));
    let opts = IsotropyOptions::default();
    let orders: Vec<usize> = recs
        .iter()
        .map(|r| isotropy(&r.config, &opts).unwrap().edge_order)
        .collect();
    assert!((recs[0].energy.unwrap() + 11.0817).abs() < 1e-4);
    assert_eq!(orders[0], 120);
    let flags: Vec<bool> = orders.iter().map(|&o| o > 1).collect();
    let curve = moving_average_density(&flags, 5).unwrap();
    assert!(curve.values[0] > curve.baseline);
    assert!(curve.values[19] <= curve.baseline);
}
