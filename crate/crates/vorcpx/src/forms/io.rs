//! Text format for form lists: `#` comments, then per form a `form <name>`
//! line, a `dim N` line, and N rows of N integers.

use std::io::{BufRead, Write};

use crate::linalg::Mat;

use super::{FormError, GramForm};

pub fn write_forms(forms: &[(String, GramForm)], w: &mut impl Write) -> std::io::Result<()> {
    for (name, f) in forms {
        writeln!(w, "form {name}")?;
        writeln!(w, "dim {}", f.dim())?;
        for row in f.gram().rows() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    Ok(())
}

pub fn read_forms(r: &mut impl BufRead) -> Result<Vec<(String, GramForm)>, FormError> {
    let bad = |msg: &str| FormError::Parse(msg.to_string());
    let mut lines = Vec::new();
    for line in r.lines() {
        let line = line.map_err(|e| FormError::Parse(e.to_string()))?;
        let trimmed = line.trim().to_string();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push(trimmed);
    }
    let mut out = Vec::new();
    let mut it = lines.into_iter().peekable();
    while let Some(header) = it.next() {
        let name = header
            .strip_prefix("form ")
            .ok_or_else(|| bad("expected 'form <name>'"))?
            .to_string();
        let dim_line = it.next().ok_or_else(|| bad("missing dim line"))?;
        let dim: usize = dim_line
            .strip_prefix("dim ")
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| bad("expected 'dim N'"))?;
        let mut rows = Vec::with_capacity(dim);
        for _ in 0..dim {
            let row_line = it.next().ok_or_else(|| bad("truncated matrix"))?;
            let row: Vec<i64> = row_line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad integer")))
                .collect::<Result<_, _>>()?;
            if row.len() != dim {
                return Err(bad("row length mismatch"));
            }
            rows.push(row);
        }
        out.push((name, GramForm::new(Mat::from_rows(rows))?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_exact() {
        let forms = vec![
            ("a2".to_string(), GramForm::a_n(2)),
            ("i3".to_string(), GramForm::identity(3)),
        ];
        let mut buf = Vec::new();
        write_forms(&forms, &mut buf).unwrap();
        let back = read_forms(&mut buf.as_slice()).unwrap();
        assert_eq!(back, forms);
        let mut buf2 = Vec::new();
        write_forms(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn comments_ignored() {
        let text = "# generated list\nform x\ndim 2\n2 1\n1 2\n";
        let forms = read_forms(&mut text.as_bytes()).unwrap();
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0].0, "x");
    }
}
