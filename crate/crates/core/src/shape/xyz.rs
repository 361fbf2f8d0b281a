//! Stationary-point files: blocks of a particle count line, a comment line
//! (optionally holding `energy=<float>`), and one line of `d`
//! whitespace-separated floats per particle. Blank lines between blocks are
//! ignored. Configurations are centered on load.

use std::io::Write;
use std::path::Path;

use super::Configuration;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigurationRecord {
    pub config: Configuration,
    pub energy: Option<f64>,
    pub comment: String,
}

fn parse_energy(comment: &str, line: usize) -> Result<Option<f64>> {
    let Some(tok) = comment.split_whitespace().find_map(|t| t.strip_prefix("energy=")) else {
        return Ok(None);
    };
    tok.parse().map(Some).map_err(|_| Error::Parse {
        line,
        msg: format!("bad energy value `{tok}`"),
    })
}

pub fn parse_configurations(text: &str) -> Result<Vec<ConfigurationRecord>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    let mut k = 0;
    let mut dim: Option<usize> = None;
    loop {
        while k < lines.len() && lines[k].trim().is_empty() {
            k += 1;
        }
        if k == lines.len() {
            break;
        }
        let count_line = k + 1;
        let n: usize = lines[k].trim().parse().map_err(|_| Error::Parse {
            line: count_line,
            msg: format!("expected a particle count, found `{}`", lines[k].trim()),
        })?;
        if n == 0 {
            return Err(Error::Parse {
                line: count_line,
                msg: "particle count must be positive".into(),
            });
        }
        let comment = *lines.get(k + 1).ok_or(Error::Parse {
            line: count_line + 1,
            msg: "missing comment line".into(),
        })?;
        let energy = parse_energy(comment, count_line + 1)?;
        let mut coords = Vec::new();
        for i in 0..n {
            let ln = k + 2 + i;
            let row = lines.get(ln).ok_or(Error::Parse {
                line: ln + 1,
                msg: format!("block ends after {i} of {n} particles"),
            })?;
            let vals: Vec<f64> = row
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| Error::Parse {
                        line: ln + 1,
                        msg: format!("bad coordinate `{t}`"),
                    })
                })
                .collect::<Result<_>>()?;
            let d = *dim.get_or_insert(vals.len());
            if vals.is_empty() || vals.len() != d {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: format!("expected {d} coordinates, found {}", vals.len()),
                });
            }
            coords.extend(vals);
        }
        let d = dim.expect("set by the first particle");
        out.push(ConfigurationRecord {
            config: Configuration::new(d, coords)?.centered(),
            energy,
            comment: comment.trim().to_string(),
        });
        k += 2 + n;
    }
    if out.is_empty() {
        return Err(Error::NoBlocks);
    }
    Ok(out)
}

pub fn load_configurations(path: impl AsRef<Path>) -> Result<Vec<ConfigurationRecord>> {
    parse_configurations(&std::fs::read_to_string(path)?)
}

/// Writes records in the same grammar; floats use shortest round-trip
/// formatting. A record's energy replaces any `energy=` token in its
/// comment.
pub fn write_configurations<W: Write>(mut w: W, records: &[ConfigurationRecord]) -> Result<()> {
    for r in records {
        writeln!(w, "{}", r.config.n())?;
        let mut comment: Vec<String> = r
            .comment
            .split_whitespace()
            .filter(|t| !t.starts_with("energy="))
            .map(str::to_string)
            .collect();
        if let Some(e) = r.energy {
            comment.insert(0, format!("energy={e:?}"));
        }
        writeln!(w, "{}", comment.join(" "))?;
        for i in 0..r.config.n() {
            let row: Vec<String> = r.config.point(i).iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::center;
    use super::*;

    #[test]
    fn two_blocks() {
        let text = "2\nenergy=-0.25 dimer\n0 0 0\n1.12 0 0\n\n3\nno energy\n0 0 0\n1 0 0\n0 1 0\n";
        let recs = parse_configurations(text).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].energy, Some(-0.25));
        assert_eq!(recs[1].energy, None);
        assert!(recs[1].config.is_centered());
        assert_eq!(recs[1].comment, "no energy");
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse_configurations(""), Err(Error::NoBlocks)));
        assert!(matches!(parse_configurations("\n \n"), Err(Error::NoBlocks)));
        let e = parse_configurations("2\nc\n0 0\n1 x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = parse_configurations("2\nc\n0 0\n1 0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }));
        let e = parse_configurations("3\nc\n0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }));
        let e = parse_configurations("two\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_configurations("1\nenergy=abc\n0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn round_trip() {
        let c = center(3, &[0.1, 0.2, 0.3, -1.0 / 3.0, 2.5e-7, 1e10, 0.7, -0.9, 0.0]).unwrap();
        let recs = vec![ConfigurationRecord {
            config: c.clone(),
            energy: Some(-1.0 / 7.0),
            comment: "energy=5 tag".into(),
        }];
        let mut buf = Vec::new();
        write_configurations(&mut buf, &recs).unwrap();
        let back = parse_configurations(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back[0].energy, Some(-1.0 / 7.0));
        assert_eq!(back[0].comment, format!("energy={:?} tag", -1.0 / 7.0));
        for (a, b) in back[0].config.coords().iter().zip(c.coords()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}
