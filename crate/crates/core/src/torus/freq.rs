use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::{Error, Result};

/// An integer frequency vector `k ∈ Z^n`, ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Freq(pub Vec<i32>);

impl Freq {
    pub fn zero(n: usize) -> Self {
        Freq(vec![0; n])
    }

    /// `j e_axis`.
    pub fn axis(n: usize, axis: usize, j: i32) -> Self {
        let mut k = vec![0; n];
        k[axis] = j;
        Freq(k)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn sup_norm(&self) -> i32 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&x| x as f64).collect()
    }

    /// `|2π k|²`.
    pub fn eigenvalue(&self) -> f64 {
        let s: f64 = self.0.iter().map(|&x| (x as f64).powi(2)).sum();
        4.0 * std::f64::consts::PI.powi(2) * s
    }

    /// All nonzero frequencies with `|k|∞ ≤ r`.
    pub fn ball(n: usize, r: i32) -> Vec<Freq> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i32>| {
                    (-r..=r).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(Freq).filter(|k| !k.is_zero()).collect()
    }
}

impl Add for &Freq {
    type Output = Freq;
    fn add(self, o: &Freq) -> Freq {
        Freq(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Freq {
    type Output = Freq;
    fn sub(self, o: &Freq) -> Freq {
        Freq(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Freq {
    type Output = Freq;
    fn neg(self) -> Freq {
        Freq(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k{self}")
    }
}

impl std::str::FromStr for Freq {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Invalid(format!("frequency `{s}` must look like (1,0,-2)")))?;
        let v = inner
            .split(',')
            .map(|t| t.trim().parse::<i32>().map_err(|_| Error::Invalid(format!("frequency `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Freq(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_size_and_parse() {
        assert_eq!(Freq::ball(3, 1).len(), 26);
        let k = Freq(vec![1, -2, 0]);
        assert_eq!(k.to_string().parse::<Freq>().unwrap(), k);
        assert_eq!(&k + &(-&k), Freq::zero(3));
        assert!(Freq(vec![-1, 5]) < Freq(vec![0, -3]));
    }
}
