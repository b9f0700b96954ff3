//! Text output shared by the CSV and VTK writers.

use std::io::{self, Write};

/// Twelve significant digits in scientific notation. Re-parsing and
/// re-formatting reproduces the same text.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.11e}")
    }
}

/// Writes a header row and numeric rows as comma-separated values.
pub fn write_csv<W: Write>(mut out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| sig12(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Parses text written by [`write_csv`] back into its header and rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().ok_or("empty CSV")?.split(',').map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| format!("line {}: {e}", n + 2)))
            .collect::<Result<Vec<f64>, String>>()?;
        if row.len() != header.len() {
            return Err(format!("line {}: expected {} fields, found {}", n + 2, header.len(), row.len()));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(0.8333333333333334), "8.33333333333e-1");
        assert_eq!(sig12(-1.0), "-1.00000000000e0");
        assert_eq!(sig12(f64::NAN), "nan");
    }

    proptest! {
        #[test]
        fn reformat_is_stable(x in -1e300f64..1e300) {
            let s = sig12(x);
            prop_assert_eq!(sig12(s.parse::<f64>().unwrap()), s);
        }
    }
}
