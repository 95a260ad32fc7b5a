//! Point-list files: one point per line, coordinates separated by commas.
//! Blank lines and lines starting with `#` are skipped.

use crate::CliError;

pub fn parse_points(text: &str, source: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let point = parse_csv_vector(line).map_err(|message| CliError::Points {
            file: source.to_string(),
            line: i + 1,
            message,
        })?;
        if let Some(first) = points.first() {
            if first.len() != point.len() {
                return Err(CliError::Points {
                    file: source.to_string(),
                    line: i + 1,
                    message: format!(
                        "point has {} coordinates, earlier points have {}",
                        point.len(),
                        first.len()
                    ),
                });
            }
        }
        points.push(point);
    }
    if points.is_empty() {
        return Err(CliError::Points {
            file: source.to_string(),
            line: 0,
            message: "no points".into(),
        });
    }
    Ok(points)
}

pub fn parse_csv_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|field| {
            let field = field.trim();
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("invalid coordinate {field:?}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let pts = parse_points("0,0\n\n# note\n 2.5, -1 \n", "p").unwrap();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![2.5, -1.0]]);
    }

    #[test]
    fn reports_bad_lines() {
        match parse_points("0,0\n1,x\n", "p") {
            Err(CliError::Points { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_points("0,0\n1\n", "p"), Err(CliError::Points { line: 2, .. })));
        assert!(parse_points("\n", "p").is_err());
        assert!(parse_csv_vector("1,nan").is_err());
    }
}
