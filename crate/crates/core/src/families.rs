//! Named test distributions and a plain-text weights loader.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::distribution::Pmf;
use crate::error::{Error, Result};

/// Share of the total mass carried by each of the four spikes.
pub const SPIKE_MASS: f64 = 0.24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `p_i ∝ (i + 1)^20`.
    Pow20,
    /// `p_i ∝ (i mod 32 + 1)^25`.
    Mod32Pow25,
    /// `p_i ∝ (i mod 64 + 1)^35`.
    Mod64Pow35,
    /// Four spikes at `(2k + 1) n / 8` holding [`SPIKE_MASS`] each, the rest
    /// spread evenly over the other indices.
    FourSpikes,
    Uniform,
    /// `sin(π (i + 0.5) / n)`.
    HalfSine,
    /// `p_i ∝ 2^-i`.
    Geometric,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Pow20,
        Family::Mod32Pow25,
        Family::Mod64Pow35,
        Family::FourSpikes,
        Family::Uniform,
        Family::HalfSine,
        Family::Geometric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Pow20 => "pow20",
            Family::Mod32Pow25 => "mod32pow25",
            Family::Mod64Pow35 => "mod64pow35",
            Family::FourSpikes => "spikes4",
            Family::Uniform => "uniform",
            Family::HalfSine => "halfsine",
            Family::Geometric => "geometric",
        }
    }

    pub fn weights(self, n: usize) -> Vec<f64> {
        let power = |i: usize, p: i32| ((i + 1) as f64).powi(p);
        match self {
            Family::Pow20 => (0..n).map(|i| power(i, 20)).collect(),
            Family::Mod32Pow25 => (0..n).map(|i| power(i % 32, 25)).collect(),
            Family::Mod64Pow35 => (0..n).map(|i| power(i % 64, 35)).collect(),
            Family::FourSpikes => four_spikes(n),
            Family::Uniform => vec![1.0; n],
            Family::HalfSine => (0..n)
                .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / n as f64).sin())
                .collect(),
            Family::Geometric => (0..n).map(|i| 0.5f64.powi(i as i32)).collect(),
        }
    }

    pub fn pmf(self, n: usize) -> Result<Pmf> {
        Pmf::new(self.weights(n))
    }
}

fn four_spikes(n: usize) -> Vec<f64> {
    let mut spike = vec![false; n];
    for k in 0..4 {
        if let Some(s) = spike.get_mut((2 * k + 1) * n / 8) {
            *s = true;
        }
    }
    let spikes = spike.iter().filter(|&&s| s).count();
    let rest = n - spikes;
    let fill = if rest == 0 {
        0.0
    } else {
        (1.0 - 4.0 * SPIKE_MASS) / rest as f64
    };
    spike
        .into_iter()
        .map(|s| if s { SPIKE_MASS } else { fill })
        .collect()
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown distribution family '{s}'"))
    }
}

/// Parses weights separated by whitespace or commas; `#` starts a comment.
pub fn parse_weights(text: &str) -> Result<Pmf> {
    let mut weights = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let content = line.split('#').next().unwrap_or("");
        let mut col = 0;
        for token in content.split(|c: char| c.is_whitespace() || c == ',') {
            if !token.is_empty() {
                let w: f64 = token
                    .parse()
                    .map_err(|_| Error::parse(offset + col, format!("invalid weight '{token}'")))?;
                weights.push(w);
            }
            col += token.len() + 1;
        }
        offset += line.len();
    }
    Pmf::new(weights)
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<Pmf> {
    parse_weights(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
            assert_eq!(f.weights(100).len(), 100);
            assert!(f.pmf(1024).is_ok());
        }
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn power_families() {
        let w = Family::Pow20.weights(3);
        assert_eq!(w, vec![1.0, 2f64.powi(20), 3f64.powi(20)]);
        let w = Family::Mod32Pow25.weights(40);
        assert_eq!(w[32], 1.0);
        assert_eq!(w[31], 32f64.powi(25));
        let w = Family::Mod64Pow35.weights(130);
        assert_eq!(w[128], 1.0);
        assert_eq!(w[63], 2f64.powi(210));
    }

    #[test]
    fn four_spikes_layout() {
        let p = Family::FourSpikes.pmf(1024).unwrap().probabilities();
        for s in [128, 384, 640, 896] {
            assert!((p[s] - 0.24).abs() < 1e-15);
        }
        assert!((p[0] - 0.04 / 1020.0).abs() < 1e-18);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_sine_is_symmetric() {
        let w = Family::HalfSine.weights(64);
        for i in 0..32 {
            assert!((w[i] - w[63 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_text() {
        let pmf = parse_weights("1, 2 3\n# comment\n4 # trailing\n").unwrap();
        assert_eq!(pmf.weights(), &[1.0, 2.0, 3.0, 4.0]);
        match parse_weights("1 2\n3 x\n") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_weights("# nothing\n").is_err());
        assert!(parse_weights("1 -2").is_err());
    }
}
