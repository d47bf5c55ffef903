use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letters for ℓ = 0..6 in spectroscopic notation.
const SHELL_LETTERS: [char; 7] = ['s', 'p', 'd', 'f', 'g', 'h', 'i'];

/// A bound level indexed by radial quantum number `n` (node count) and
/// orbital angular momentum `l`.
///
/// The principal quantum number is N = n + ℓ + 1, so the spectroscopic
/// label "4f" means N = 4, ℓ = 3 and therefore n = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumState {
    n: u32,
    l: u32,
}

impl QuantumState {
    pub fn new(n: u32, l: u32) -> Self {
        QuantumState { n, l }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Principal quantum number N = n + ℓ + 1.
    pub fn principal(&self) -> u32 {
        self.n + self.l + 1
    }

    /// N_{n+1} = n + ℓ + 2, the next rung used by the second-order
    /// superpotential.
    pub fn principal_next(&self) -> u32 {
        self.n + self.l + 2
    }

    /// The centrifugal factor L = ℓ(ℓ + 1).
    pub fn angular_barrier(&self) -> f64 {
        let l = self.l as f64;
        l * (l + 1.0)
    }

    /// All states of one shell: fixed N, ℓ = 0..min(N−1, l_max).
    pub fn shell(principal: u32, l_max: u32) -> Vec<QuantumState> {
        assert!(principal >= 1, "principal quantum number starts at 1");
        (0..principal.min(l_max + 1))
            .map(|l| QuantumState::new(principal - 1 - l, l))
            .collect()
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.l as usize;
        if l < SHELL_LETTERS.len() {
            write!(f, "{}{}", self.principal(), SHELL_LETTERS[l])
        } else {
            // Beyond 'i' there is no single-letter convention here; fall back
            // to an explicit pair.
            write!(f, "(n={},l={})", self.n, self.l)
        }
    }
}

impl FromStr for QuantumState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |reason: &str| Error::BadLabel {
            label: s.to_string(),
            reason: reason.to_string(),
        };
        if s.is_empty() {
            return Err(bad("empty label"));
        }
        let split = s
            .char_indices()
            .find(|(_, c)| !c.is_ascii_digit())
            .map(|(i, _)| i)
            .ok_or_else(|| bad("missing shell letter"))?;
        if split == 0 {
            return Err(bad("missing principal quantum number"));
        }
        let principal: u32 = s[..split]
            .parse()
            .map_err(|_| bad("unreadable principal quantum number"))?;
        if principal == 0 {
            return Err(bad("principal quantum number starts at 1"));
        }
        let rest = &s[split..];
        let mut chars = rest.chars();
        let letter = chars.next().unwrap().to_ascii_lowercase();
        if chars.next().is_some() {
            return Err(bad("trailing characters after shell letter"));
        }
        let l = SHELL_LETTERS
            .iter()
            .position(|&c| c == letter)
            .ok_or_else(|| bad("unknown shell letter (expected one of s p d f g h i)"))?
            as u32;
        if l >= principal {
            return Err(bad("angular momentum must satisfy l < N"));
        }
        Ok(QuantumState::new(principal - 1 - l, l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantum_numbers() {
        let s = QuantumState::new(0, 3); // 4f
        assert_eq!(s.principal(), 4);
        assert_eq!(s.principal_next(), 5);
        assert_eq!(s.angular_barrier(), 12.0);
    }

    #[test]
    fn parse_4f() {
        let s: QuantumState = "4f".parse().unwrap();
        assert_eq!((s.n(), s.l()), (0, 3));
        assert_eq!(s.to_string(), "4f");
    }

    #[test]
    fn parse_accepts_uppercase_and_whitespace() {
        let s: QuantumState = " 3D ".parse().unwrap();
        assert_eq!((s.n(), s.l()), (0, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "x", "0s", "2x", "s", "2ss", "1p", "2.5s"] {
            assert!(bad.parse::<QuantumState>().is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn label_round_trip_bijection() {
        // Every label from 1s through 7i maps to a unique state and back.
        let mut seen = std::collections::HashSet::new();
        for principal in 1..=7u32 {
            for l in 0..principal.min(7) {
                let label = format!("{}{}", principal, SHELL_LETTERS[l as usize]);
                let state: QuantumState = label.parse().unwrap();
                assert_eq!(state.to_string(), label);
                assert!(seen.insert(state), "duplicate state for {label}");
                assert_eq!(state.principal(), principal);
            }
        }
        assert_eq!(seen.len(), 1 + 2 + 3 + 4 + 5 + 6 + 7);
    }

    #[test]
    fn shell_enumeration() {
        let shell = QuantumState::shell(4, 3);
        let labels: Vec<String> = shell.iter().map(|s| s.to_string()).collect();
        assert_eq!(labels, ["4s", "4p", "4d", "4f"]);
        // l_max caps the list
        assert_eq!(QuantumState::shell(7, 2).len(), 3);
    }
}
