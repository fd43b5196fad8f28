//! Parsers for `--phi` and `--grid` arguments.

use specshift::{Family, TestFunction};

/// `family:a:b:amplitude`, with `plateau:a:b:amplitude[:c:d]` taking an
/// optional inner interval (default: the middle half of `[a, b]`).
pub fn parse_phi(text: &str) -> Result<TestFunction, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{t}' is not a number in --phi '{text}'"))
    };
    if parts.len() < 4 {
        return Err(format!("--phi '{text}': expected family:a:b:amplitude"));
    }
    let (a, b, amp) = (num(parts[1])?, num(parts[2])?, num(parts[3])?);
    let family = match (parts[0].trim(), parts.len()) {
        ("bump" | "smooth-bump", 4) => Family::SmoothBump,
        ("cosine" | "raised-cosine", 4) => Family::RaisedCosine,
        ("spline" | "cubic-spline-hat", 4) => Family::CubicSplineHat,
        ("plateau", 4) => {
            let q = 0.25 * (b - a);
            Family::Plateau {
                inner_lo: a + q,
                inner_hi: b - q,
            }
        }
        ("plateau", 6) => Family::Plateau {
            inner_lo: num(parts[4])?,
            inner_hi: num(parts[5])?,
        },
        (name, _) => {
            return Err(format!(
                "--phi '{text}': unknown family or arity for '{name}'"
            ))
        }
    };
    TestFunction::new(family, a, b, amp).map_err(|e| e.to_string())
}

/// `a:b:n` → `n` evenly spaced points from `a` to `b` inclusive.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("--grid '{text}': expected a:b:n"));
    }
    let a: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("--grid '{text}': bad start"))?;
    let b: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("--grid '{text}': bad end"))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("--grid '{text}': bad count"))?;
    if !(a.is_finite() && b.is_finite()) || n == 0 {
        return Err(format!("--grid '{text}': need finite ends and n >= 1"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    if !(a < b) {
        return Err(format!("--grid '{text}': need a < b"));
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k + 1 == n { b } else { a + h * k as f64 })
        .collect())
}
