//! Flag-value parsers: complex literals, state triples, couplings, ranges.
//!
//! Complex literal grammar: `RE` or `RE(+|-)IMi` with decimal floats, e.g.
//! `1.25-0.5i`. A state triple is three comma-separated complex literals.

use aristotle_core::{Couplings, State3};

pub type C64 = aristotle_core::C64;

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(body) = t.strip_suffix('i') {
        let bytes = body.as_bytes();
        let mut sep = None;
        for i in (1..bytes.len()).rev() {
            let ch = bytes[i];
            if (ch == b'+' || ch == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                sep = Some(i);
                break;
            }
        }
        let sep =
            sep.ok_or_else(|| format!("'{t}': expected RE or RE(+|-)IMi with decimal floats"))?;
        let re: f64 = body[..sep]
            .trim()
            .parse()
            .map_err(|_| format!("'{t}': bad real part '{}'", &body[..sep]))?;
        let im: f64 = body[sep..]
            .trim()
            .parse()
            .map_err(|_| format!("'{t}': bad imaginary part '{}'", &body[sep..]))?;
        Ok(C64::new(re, im))
    } else {
        let re: f64 = t
            .parse()
            .map_err(|_| format!("'{t}': expected a decimal float"))?;
        Ok(C64::new(re, 0.0))
    }
}

pub fn parse_state(s: &str) -> Result<State3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!(
            "state must be three comma-separated complex literals, got '{s}'"
        ));
    }
    Ok(State3::new(
        parse_complex(parts[0])?,
        parse_complex(parts[1])?,
        parse_complex(parts[2])?,
    ))
}

pub fn parse_couplings(s: &str, omega: f64) -> Result<Couplings, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("couplings must be 'a,b,c', got '{s}'"));
    }
    let mut vals = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse()
            .map_err(|_| format!("bad coupling '{p}' in '{s}'"))?;
    }
    Ok(Couplings::with_omega(vals[0], vals[1], vals[2], omega))
}

/// `lo:hi:n` with inclusive endpoints and `n >= 1` grid points.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range must be 'lo:hi:n', got '{s}'"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad range start '{}'", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad range end '{}'", parts[1]))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad range count '{}'", parts[2]))?;
    if n == 0 {
        return Err("range count must be at least 1".into());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2").unwrap(), C64::new(2.0, 0.0));
        assert_eq!(parse_complex("-1.5").unwrap(), C64::new(-1.5, 0.0));
        assert_eq!(parse_complex("1.25-0.5i").unwrap(), C64::new(1.25, -0.5));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(
            parse_complex("3.5e-2+1e-3i").unwrap(),
            C64::new(3.5e-2, 1e-3)
        );
        assert_eq!(parse_complex("0+1i").unwrap(), C64::new(0.0, 1.0));
        assert!(parse_complex("i").is_err());
        assert!(parse_complex("1+i").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn state_and_couplings() {
        let s = parse_state("2,1,0").unwrap();
        assert_eq!(s.u.re, 2.0);
        assert!(parse_state("1,2").is_err());
        let c = parse_couplings("1,1,-2", 1.0).unwrap();
        assert_eq!(c.c, -2.0);
        assert!(parse_couplings("1,x,0", 1.0).is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("2:9:1").unwrap(), vec![2.0]);
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
    }
}
