use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Rows plus the name of the experiment that produced them.
pub struct CsvTable<'a, T> {
    pub experiment: &'a str,
    pub rows: &'a [T],
}

/// Writes `# `-prefixed provenance lines (experiment name and the resolved
/// config) followed by the CSV body.
pub fn write_csv<T: Serialize>(path: &Path, table: CsvTable<'_, T>, resolved_config: &str) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_header(&mut out, table.experiment, resolved_config)?;
    let mut w = csv::Writer::from_writer(&mut out);
    for row in table.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

pub(crate) fn write_header<W: Write>(out: &mut W, experiment: &str, resolved_config: &str) -> Result<()> {
    writeln!(out, "# experiment: {experiment}")?;
    writeln!(out, "# resolved config:")?;
    for line in resolved_config.lines() {
        if line.is_empty() {
            writeln!(out, "#")?;
        } else {
            writeln!(out, "#   {line}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        x: f64,
        label: &'static str,
    }

    #[test]
    fn header_then_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        let rows = [Row { x: 0.1, label: "a" }, Row { x: 2.0, label: "b" }];
        write_csv(&p, CsvTable { experiment: "demo", rows: &rows }, "seed = 1\n\n[s]\nk = 2\n").unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(
            text,
            "# experiment: demo\n# resolved config:\n#   seed = 1\n#\n#   [s]\n#   k = 2\nx,label\n0.1,a\n2.0,b\n"
        );
    }
}
