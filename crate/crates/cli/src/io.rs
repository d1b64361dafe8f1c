//! Input parsing: two-column CSV pairs and comma-separated number lists.

use std::io::Read;

use num_complex::Complex64;

use crate::CliError;

/// Reads `x,y` records. Lines starting with `#` are comments; a first record
/// that does not parse as numbers is taken as a header.
pub fn read_pairs<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Usage(format!("CSV: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::Usage(format!(
                "CSV record {} has {} fields, expected 2",
                i + 1,
                record.len()
            )));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ if i == 0 => continue,
            _ => {
                return Err(CliError::Usage(format!(
                    "CSV record {} is not numeric: {:?}",
                    i + 1,
                    record.iter().collect::<Vec<_>>()
                )))
            }
        }
    }
    Ok((xs, ys))
}

/// Parses `1,2.5,-3`.
pub fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("not a number: {t:?}")))
        })
        .collect()
}

/// Parses `1,0,1+2i,-i`.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<Complex64>()
                .map_err(|_| CliError::Usage(format!("not a complex number: {t:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_with_header_and_comments() {
        let text = "# sample\nx,y\n1,2\n 3 , 4\n\n# end\n5,6\n";
        let (xs, ys) = read_pairs(text.as_bytes()).unwrap();
        assert_eq!(xs, [1.0, 3.0, 5.0]);
        assert_eq!(ys, [2.0, 4.0, 6.0]);
    }

    #[test]
    fn pairs_reject_bad_rows() {
        assert!(read_pairs("1,2\n3,x\n".as_bytes()).is_err());
        assert!(read_pairs("1,2,3\n".as_bytes()).is_err());
    }

    #[test]
    fn complex_lists() {
        let v = parse_complex_list("1,0,1+2i,-1i").unwrap();
        assert_eq!(v[2], Complex64::new(1.0, 2.0));
        assert_eq!(v[3], Complex64::new(0.0, -1.0));
        assert!(parse_list("1,,2").is_err());
    }
}
