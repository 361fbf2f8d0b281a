//! Regenerates `tests/data/lj_fixture.xyz`: critical points of the
//! 13-particle Lennard-Jones cluster found by Newton from perturbed
//! icosahedra, plus the relaxed icosahedron itself.

use rand::Rng;
use symquot::search::{search_from, Outcome, SearchOptions};
use symquot::shape::{icosahedron13, write_configurations, ConfigurationRecord, Configuration, LjCluster};
use symquot::RngStream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/core/tests/data/lj_fixture.xyz".into());
    let lj = LjCluster { n: 13, d: 3 };
    let opts = SearchOptions::default();
    let ico = icosahedron13(1.1);
    let mut found: Vec<(f64, Vec<f64>, usize)> = Vec::new();
    fn keep(found: &mut Vec<(f64, Vec<f64>, usize)>, x: Vec<f64>, e: f64, index: usize) {
        if found.iter().all(|(f, _, _)| (f - e).abs() > 1e-6) {
            found.push((e, x, index));
        }
    }
    if let Outcome::Converged(p) = search_from(&lj, ico.coords(), &opts)? {
        keep(&mut found, p.x, p.energy, p.morse_index);
    }
    let stream = RngStream::new(13, 0);
    let mut j = 0;
    while found.len() < 20 && j < 20000 {
        let mut rng = stream.split(j).rng();
        let noise = [0.05, 0.15, 0.3, 0.45][j as usize % 4];
        let x0: Vec<f64> = ico.coords().iter().map(|v| v + noise * rng.random_range(-1.0..=1.0)).collect();
        if let Ok(Outcome::Converged(p)) = search_from(&lj, &x0, &opts) {
            if p.polished && p.energy.is_finite() && p.energy < -5.0 {
                keep(&mut found, p.x, p.energy, p.morse_index);
            }
        }
        j += 1;
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let records: Vec<ConfigurationRecord> = found
        .into_iter()
        .map(|(e, x, index)| {
            Ok(ConfigurationRecord {
                config: Configuration::new(3, x)?.centered(),
                energy: Some(e),
                comment: format!("morse_index={index}"),
            })
        })
        .collect::<symquot::Result<_>>()?;
    write_configurations(std::fs::File::create(&out)?, &records)?;
    println!("{} configurations after {j} starts -> {out}", records.len());
    Ok(())
}
