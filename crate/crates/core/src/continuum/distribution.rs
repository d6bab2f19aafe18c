use std::fmt;
use std::str::FromStr;

use crate::error::ContinuumError;

/// Slack when snapping the end masses of a knot list to 0 and 1.
const END_MASS_TOL: f64 = 1e-9;

/// Distribution of a posterior belief on `[0, 1]`.
///
/// The CDF is stored as knots `(position, cumulative mass)` sorted by
/// position. Between two distinct positions the CDF is linear, so each such
/// segment carries a uniform density. Two knots at the same position encode
/// an atom equal to the jump in cumulative mass. The CDF is 0 before the
/// first knot and 1 from the last knot on; the first knot has mass 0 and the
/// last has mass 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDistribution {
    knots: Vec<(f64, f64)>,
    mean: f64,
}

impl PosteriorDistribution {
    /// Builds a distribution from CDF knots.
    pub fn from_knots(mut knots: Vec<(f64, f64)>) -> Result<Self, ContinuumError> {
        let invalid = |m: String| Err(ContinuumError::InvalidDistribution(m));
        if knots.len() < 2 {
            return invalid("at least two knots are required".into());
        }
        for (i, &(p, c)) in knots.iter().enumerate() {
            if !p.is_finite() || !c.is_finite() {
                return invalid(format!("knot {i} is not finite"));
            }
            if !(0.0..=1.0).contains(&p) {
                return invalid(format!("knot {i} position {p} outside [0, 1]"));
            }
        }
        for (i, w) in knots.windows(2).enumerate() {
            if w[1].0 < w[0].0 {
                return invalid(format!("positions decrease at knot {}", i + 1));
            }
            if w[1].1 < w[0].1 {
                return invalid(format!("cumulative mass decreases at knot {}", i + 1));
            }
        }
        let first = knots[0].1;
        let last = knots[knots.len() - 1].1;
        if first.abs() > END_MASS_TOL {
            return invalid(format!("first cumulative mass is {first}, expected 0"));
        }
        if (last - 1.0).abs() > END_MASS_TOL {
            return invalid(format!("last cumulative mass is {last}, expected 1"));
        }
        knots[0].1 = 0.0;
        let n = knots.len();
        knots[n - 1].1 = 1.0;
        for k in knots.iter_mut() {
            k.1 = k.1.clamp(0.0, 1.0);
        }
        let mean = knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) * 0.5 * (w[0].0 + w[1].0))
            .sum();
        Ok(PosteriorDistribution { knots, mean })
    }

    /// All mass at `p`.
    pub fn point_mass(p: f64) -> Result<Self, ContinuumError> {
        Self::from_knots(vec![(p, 0.0), (p, 1.0)])
    }

    /// Uniform on `[a, b]` with `a < b`.
    pub fn uniform(a: f64, b: f64) -> Result<Self, ContinuumError> {
        if !(a < b) {
            return Err(ContinuumError::InvalidDistribution(format!(
                "uniform support [{a}, {b}] is empty"
            )));
        }
        Self::from_knots(vec![(a, 0.0), (b, 1.0)])
    }

    /// Finitely many atoms given as `(position, mass)`.
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self, ContinuumError> {
        let mut atoms = atoms.to_vec();
        if atoms.iter().any(|a| a.1 < 0.0 || !a.1.is_finite()) {
            return Err(ContinuumError::InvalidDistribution(
                "atom masses must be finite and nonnegative".into(),
            ));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut knots = Vec::with_capacity(2 * atoms.len());
        let mut c = 0.0;
        for (p, m) in atoms {
            knots.push((p, c));
            c += m;
            knots.push((p, c));
        }
        Self::from_knots(knots)
    }

    /// Uniform densities on disjoint cells `(a, b, mass)` listed left to
    /// right.
    pub fn piecewise_uniform(cells: &[(f64, f64, f64)]) -> Result<Self, ContinuumError> {
        let mut knots = Vec::with_capacity(2 * cells.len());
        let mut c = 0.0;
        for &(a, b, m) in cells {
            if !(a < b) || m < 0.0 {
                return Err(ContinuumError::InvalidDistribution(format!(
                    "cell [{a}, {b}] with mass {m} is not a valid cell"
                )));
            }
            knots.push((a, c));
            c += m;
            knots.push((b, c));
        }
        Self::from_knots(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Atoms as `(position, mass)`.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in self.knots.windows(2) {
            if w[0].0 == w[1].0 && w[1].1 > w[0].1 {
                match out.last_mut() {
                    Some(last) if last.0 == w[0].0 => last.1 += w[1].1 - w[0].1,
                    _ => out.push((w[0].0, w[1].1 - w[0].1)),
                }
            }
        }
        out
    }

    /// No point carries positive mass.
    pub fn is_atomless(&self) -> bool {
        self.atoms().is_empty()
    }

    /// Distinct knot positions in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.knots.iter().map(|k| k.0).collect();
        out.dedup();
        out
    }

    /// `P(mu <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        let i = self.knots.partition_point(|k| k.0 <= t);
        self.interpolate(i, t)
    }

    /// `P(mu < t)`.
    pub fn cdf_left(&self, t: f64) -> f64 {
        let i = self.knots.partition_point(|k| k.0 < t);
        self.interpolate(i, t)
    }

    /// CDF at `t` given that knot `i` is the first one past `t`.
    fn interpolate(&self, i: usize, t: f64) -> f64 {
        if i == 0 {
            return 0.0;
        }
        if i == self.knots.len() {
            return 1.0;
        }
        let (p0, c0) = self.knots[i - 1];
        let (p1, c1) = self.knots[i];
        if p1 == p0 {
            return c1;
        }
        c0 + (c1 - c0) * (t - p0) / (p1 - p0)
    }

    /// `int_0^t G(s) ds`, exact.
    pub fn cdf_integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for w in self.knots.windows(2) {
            let (p0, c0) = w[0];
            let (p1, c1) = w[1];
            if p1 == p0 || t <= p0 {
                continue;
            }
            let r = t.min(p1);
            let c_r = c0 + (c1 - c0) * (r - p0) / (p1 - p0);
            acc += 0.5 * (c0 + c_r) * (r - p0);
        }
        let last = self.knots[self.knots.len() - 1].0;
        if t > last {
            acc += t - last;
        }
        acc
    }

    /// `int_[c, 1] (2 mu - 1) dG(mu)`, including any atom at `c`. Exact.
    pub fn value_above(&self, c: f64) -> f64 {
        let antiderivative = |m: f64| m * m - m;
        let mut acc = 0.0;
        for w in self.knots.windows(2) {
            let (p0, c0) = w[0];
            let (p1, c1) = w[1];
            let mass = c1 - c0;
            if mass == 0.0 {
                continue;
            }
            if p1 == p0 {
                if p0 >= c {
                    acc += mass * (2.0 * p0 - 1.0);
                }
            } else if p1 > c {
                let lo = p0.max(c);
                acc += mass / (p1 - p0) * (antiderivative(p1) - antiderivative(lo));
            }
        }
        acc
    }
}

impl fmt::Display for PosteriorDistribution {
    /// One header line, then one `position cumulative_mass` pair per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# posterior mean={} atoms={} atomless={}",
            self.mean,
            self.atoms().len(),
            self.is_atomless()
        )?;
        for (p, c) in &self.knots {
            writeln!(f, "{p} {c}")?;
        }
        Ok(())
    }
}

struct Header {
    mean: Option<f64>,
    atoms: Option<usize>,
    atomless: Option<bool>,
}

fn parse_header(line: usize, rest: &str) -> Result<Header, ContinuumError> {
    let err = |message: String| ContinuumError::Parse { line, message };
    let mut h = Header {
        mean: None,
        atoms: None,
        atomless: None,
    };
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{field}`")))?;
        match key {
            "mean" => {
                h.mean = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("bad mean `{value}`")))?,
                )
            }
            "atoms" => {
                h.atoms = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("bad atom count `{value}`")))?,
                )
            }
            "atomless" => {
                h.atomless = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("bad flag `{value}`")))?,
                )
            }
            _ => return Err(err(format!("unknown header field `{key}`"))),
        }
    }
    Ok(h)
}

impl FromStr for PosteriorDistribution {
    type Err = ContinuumError;

    /// Parses the format written by `Display`. Blank lines and `#` comments
    /// are skipped; a `# posterior` header, if present, is checked against
    /// the parsed knots.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut header = None;
        let mut knots = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim();
            if let Some(rest) = text.strip_prefix("# posterior") {
                header = Some((line, parse_header(line, rest)?));
                continue;
            }
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let mut parts = text.split_whitespace();
            let mut next = |what: &str| -> Result<f64, ContinuumError> {
                let tok = parts.next().ok_or_else(|| ContinuumError::Parse {
                    line,
                    message: format!("missing {what}"),
                })?;
                tok.parse().map_err(|_| ContinuumError::Parse {
                    line,
                    message: format!("bad {what} `{tok}`"),
                })
            };
            let p = next("position")?;
            let c = next("cumulative mass")?;
            if parts.next().is_some() {
                return Err(ContinuumError::Parse {
                    line,
                    message: "expected exactly two columns".into(),
                });
            }
            knots.push((p, c));
        }
        let dist = PosteriorDistribution::from_knots(knots)?;
        if let Some((line, h)) = header {
            let err = |message: String| ContinuumError::Parse { line, message };
            if let Some(m) = h.mean {
                if (m - dist.mean).abs() > 1e-9 {
                    return Err(err(format!("header mean {m} but knots give {}", dist.mean)));
                }
            }
            if let Some(a) = h.atoms {
                if a != dist.atoms().len() {
                    return Err(err(format!(
                        "header lists {a} atoms, knots give {}",
                        dist.atoms().len()
                    )));
                }
            }
            if let Some(flag) = h.atomless {
                if flag != dist.is_atomless() {
                    return Err(err(format!("header atomless={flag} contradicts knots")));
                }
            }
        }
        Ok(dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_basics() {
        let u = PosteriorDistribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.mean(), 0.5);
        assert!(u.is_atomless());
        assert_eq!(u.cdf(0.25), 0.25);
        assert_eq!(u.cdf(-1.0), 0.0);
        assert_eq!(u.cdf(1.0), 1.0);
        assert!((u.cdf_integral(1.0) - 0.5).abs() < 1e-15);
        assert!((u.value_above(0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn atoms_are_right_continuous() {
        let d = PosteriorDistribution::discrete(&[(0.2, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(d.cdf(0.2), 0.5);
        assert_eq!(d.cdf_left(0.2), 0.0);
        assert_eq!(d.cdf(0.99), 0.5);
        assert_eq!(d.cdf_left(1.0), 0.5);
        assert!((d.mean() - 0.6).abs() < 1e-15);
        assert_eq!(d.atoms(), vec![(0.2, 0.5), (1.0, 0.5)]);
        assert!(!d.is_atomless());
        assert!((d.value_above(0.2) - (0.5 * -0.6 + 0.5)).abs() < 1e-15);
        assert!((d.value_above(0.21) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn point_mass_mean_and_integral() {
        let d = PosteriorDistribution::point_mass(0.3).unwrap();
        assert_eq!(d.mean(), 0.3);
        assert!((d.cdf_integral(1.0) - 0.7).abs() < 1e-15);
        assert_eq!(d.cdf_integral(0.3), 0.0);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(PosteriorDistribution::from_knots(vec![(0.5, 0.0)]).is_err());
        assert!(PosteriorDistribution::from_knots(vec![(0.5, 0.0), (0.4, 1.0)]).is_err());
        assert!(PosteriorDistribution::from_knots(vec![(0.1, 0.2), (0.4, 1.0)]).is_err());
        assert!(PosteriorDistribution::from_knots(vec![(0.1, 0.0), (0.4, 0.9)]).is_err());
        assert!(PosteriorDistribution::from_knots(vec![(0.1, 0.0), (1.4, 1.0)]).is_err());
        assert!(PosteriorDistribution::uniform(0.5, 0.5).is_err());
    }

    #[test]
    fn text_round_trip() {
        let d =
            PosteriorDistribution::piecewise_uniform(&[(0.1, 0.2, 0.3), (0.6, 0.9, 0.7)]).unwrap();
        let text = d.to_string();
        assert!(text.starts_with("# posterior mean="));
        let back: PosteriorDistribution = text.parse().unwrap();
        assert_eq!(back, d);

        let atoms = PosteriorDistribution::discrete(&[(0.25, 0.5), (0.75, 0.5)]).unwrap();
        assert_eq!(
            atoms.to_string().parse::<PosteriorDistribution>().unwrap(),
            atoms
        );
    }

    #[test]
    fn header_is_checked() {
        let bad = "# posterior mean=0.9 atoms=0 atomless=true\n0 0\n1 1\n";
        assert!(matches!(
            bad.parse::<PosteriorDistribution>(),
            Err(ContinuumError::Parse { line: 1, .. })
        ));
        let bad = "0 0\n1 x\n";
        assert!(matches!(
            bad.parse::<PosteriorDistribution>(),
            Err(ContinuumError::Parse { line: 2, .. })
        ));
        let ok = "# a comment\n\n0 0\n1 1\n";
        assert_eq!(ok.parse::<PosteriorDistribution>().unwrap().mean(), 0.5);
    }
}
