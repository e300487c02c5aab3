//! CSV and report emission. Floats use Rust's shortest round-trip
//! formatting, which never depends on the locale.

use std::io::Write;
use std::path::Path;

use bec_squeeze::EffectiveParams;

use crate::config::Resolved;
use crate::error::CliError;

/// Comment lines shared by every command: the resolved configuration and the
/// effective model it produced.
pub fn header(command: &str, r: &Resolved) -> Vec<String> {
    let mut lines = vec![format!("becsq {command}"), "resolved configuration:".into()];
    lines.extend(r.echo().lines().map(|l| format!("  {l}")));
    lines.push("effective model:".into());
    lines.extend(effective_lines(&r.effective).into_iter().map(|l| format!("  {l}")));
    lines
}

pub fn effective_lines(e: &EffectiveParams) -> Vec<String> {
    vec![
        format!("unit = {}", e.unit()),
        format!("g1 = {}", e.g1()),
        format!("g2 = {}", e.g2()),
        format!("omega_prime = {}", e.omega_prime()),
        format!("kappa1 = {}", e.kappa1()),
        format!("kappa2 = {}", e.kappa2()),
        format!("n_atoms = {}", e.n_atoms()),
        format!("chi1 = {}", e.chi1()),
        format!("chi2 = {}", e.chi2()),
        format!("chi = {}", e.chi()),
    ]
}

/// `#`-prefixed comments, a header row and data rows, `\n`-terminated.
pub fn csv_document(
    comments: &[String],
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    for c in comments {
        if c.is_empty() {
            buf.extend_from_slice(b"#\n");
        } else {
            buf.extend_from_slice(format!("# {c}\n").as_bytes());
        }
    }
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        let fail = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(columns).map_err(fail)?;
        for r in rows {
            w.write_record(r).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    }
    Ok(buf)
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let doc = csv_document(
            &["a".into(), String::new()],
            &["omega", "S_plus"],
            &[vec!["-0.5".into(), "1".into()]],
        )
        .unwrap();
        assert_eq!(String::from_utf8(doc).unwrap(), "# a\n#\nomega,S_plus\n-0.5,1\n");
    }

    #[test]
    fn float_formatting_is_plain() {
        assert_eq!(format!("{}", 0.1 + 0.2), "0.30000000000000004");
        assert_eq!(format!("{}", 10000.0f64), "10000");
        assert_eq!(format!("{}", -2.5e-7f64), "-0.00000025");
    }
}
