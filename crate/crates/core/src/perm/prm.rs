use super::{Perm, PermError};

/// Parses a PRM file: `degree <n>` then one permutation per line as `n`
/// 1-based images. Blank lines and `#` comments are skipped.
pub fn parse_prm(source: &str) -> Result<(usize, Vec<Perm>), PermError> {
    let mut degree: Option<usize> = None;
    let mut perms = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |msg: String| PermError::Syntax { line: line_no, msg };
        let Some(n) = degree else {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("degree") {
                return Err(syntax("expected `degree <n>`".into()));
            }
            let n: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| syntax("bad degree".into()))?;
            if n == 0 || parts.next().is_some() {
                return Err(syntax("bad degree".into()));
            }
            degree = Some(n);
            continue;
        };
        let images: Vec<u32> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .ok()
                    .filter(|&v| v >= 1 && v as usize <= n)
                    .map(|v| v - 1)
                    .ok_or_else(|| syntax(format!("bad image `{t}`")))
            })
            .collect::<Result<_, _>>()?;
        if images.len() != n {
            return Err(PermError::DegreeMismatch {
                expected: n,
                found: images.len(),
            });
        }
        let p = Perm::from_images(images).map_err(|_| syntax("not a permutation".into()))?;
        perms.push(p);
    }
    let n = degree.ok_or(PermError::Syntax {
        line: 0,
        msg: "missing `degree` line".into(),
    })?;
    Ok((n, perms))
}

pub fn write_prm(degree: usize, perms: &[Perm]) -> String {
    let mut out = format!("degree {degree}\n");
    for p in perms {
        let imgs: Vec<String> = p.images().iter().map(|i| (i + 1).to_string()).collect();
        out.push_str(&imgs.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let src = "# A5\ndegree 5\n2 3 4 5 1\n2 3 1 4 5\n";
        let (n, perms) = parse_prm(src).unwrap();
        assert_eq!(n, 5);
        assert_eq!(perms[0].to_string(), "(1,2,3,4,5)");
        assert_eq!(perms[1].to_string(), "(1,2,3)");
        assert_eq!(parse_prm(&write_prm(n, &perms)).unwrap(), (n, perms));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_prm("degree 3\n1 2\n"),
            Err(PermError::DegreeMismatch {
                expected: 3,
                found: 2
            })
        ));
        assert!(matches!(
            parse_prm("degree 3\n1 1 2\n"),
            Err(PermError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_prm("3\n"),
            Err(PermError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_prm("degree 3\n1 2 4\n"),
            Err(PermError::Syntax { .. })
        ));
        assert!(parse_prm("# nothing\n").is_err());
    }
}
