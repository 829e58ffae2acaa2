//! Exact relative information loss of piecewise-constant filters with
//! rational band edges under M-fold decimation.
//!
//! The positive half-band (0, π] is split into L·M equal sub-bands. Under
//! decimation the sub-band processes collapse onto L distinct output bands
//! (each hit by exactly M sub-bands); a group contributes a full-dimension
//! output coordinate iff at least one of its sub-bands is passed. The loss
//! is the exactly-rational 1 − K/(LM), K being the number of such groups.

use std::fmt;

use crate::error::{Error, Result};

/// An exact nonnegative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LossFraction {
    num: u64,
    den: u64,
}

impl LossFraction {
    /// Reduced fraction num/den; `den` must be nonzero.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Range {
                name: "denominator",
                value: 0.0,
                requirement: "denominator must be nonzero",
            });
        }
        let g = gcd(num.max(1), den).max(1);
        let g = if num == 0 { den } else { g };
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    #[inline]
    pub fn numer(&self) -> u64 {
        self.num
    }

    #[inline]
    pub fn denom(&self) -> u64 {
        self.den
    }

    /// The fraction as a float (for display and plotting only; comparisons
    /// should use the exact ordering).
    #[inline]
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for LossFraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LossFraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for LossFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A piecewise-constant binary filter whose band edges lie on multiples of
/// π/(L·M): `pass[i-1]` tells whether sub-band i, the frequency interval
/// ((i−1)π/(LM), iπ/(LM)] (mirrored evenly to negative frequencies), is
/// passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalBandMask {
    l: usize,
    m: usize,
    pass: Vec<bool>,
}

impl RationalBandMask {
    pub fn new(l: usize, m: usize, pass: Vec<bool>) -> Result<Self> {
        if l == 0 || m == 0 {
            return Err(Error::Range {
                name: "l*m",
                value: (l * m) as f64,
                requirement: "need l >= 1 and m >= 1",
            });
        }
        if pass.len() != l * m {
            return Err(Error::LengthMismatch {
                left_name: "l*m",
                left: l * m,
                right_name: "pass",
                right: pass.len(),
            });
        }
        Ok(Self { l, m, pass })
    }

    /// All-pass filter (every sub-band passed).
    pub fn all_pass(l: usize, m: usize) -> Result<Self> {
        Self::new(l, m, vec![true; l * m])
    }

    /// Low-pass filter passing the first `passed` sub-bands.
    pub fn lowpass(l: usize, m: usize, passed: usize) -> Result<Self> {
        if passed > l * m {
            return Err(Error::Range {
                name: "passed",
                value: passed as f64,
                requirement: "cannot pass more than l*m sub-bands",
            });
        }
        let mut pass = vec![false; l * m];
        pass[..passed].fill(true);
        Self::new(l, m, pass)
    }

    #[inline]
    pub fn l(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn pass(&self) -> &[bool] {
        &self.pass
    }

    /// Group index (1-based, in 1..=L) of 1-based sub-band i: sub-bands
    /// whose decimated brick-wall responses coincide share a group. The
    /// responses are 2L-periodic in i and reflect at the half-period.
    pub fn group_of(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.l * self.m);
        let j = (i - 1) % (2 * self.l) + 1;
        if j <= self.l {
            j
        } else {
            2 * self.l - j + 1
        }
    }
}

/// The loss together with the surviving-group count it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelativeLossResult {
    pub loss: LossFraction,
    pub surviving_groups: usize,
}

/// Partition of the 1-based sub-band indices {1,…,LM} into L groups of M,
/// ordered by group index.
pub fn subband_groups(mask: &RationalBandMask) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::with_capacity(mask.m()); mask.l()];
    for i in 1..=mask.l() * mask.m() {
        groups[mask.group_of(i) - 1].push(i);
    }
    groups
}

/// Relative information loss rate of the mask under M-fold decimation:
/// 1 − K/(LM), where K is the number of groups with at least one passed
/// sub-band. Always ≥ (M−1)/M; exactly (M−1)/M for the all-pass mask.
pub fn relative_loss_rate(mask: &RationalBandMask) -> RelativeLossResult {
    let mut covered = vec![false; mask.l()];
    for (idx, &p) in mask.pass().iter().enumerate() {
        if p {
            covered[mask.group_of(idx + 1) - 1] = true;
        }
    }
    let k = covered.iter().filter(|&&c| c).count();
    let lm = (mask.l() * mask.m()) as u64;
    RelativeLossResult {
        loss: LossFraction::new(lm - k as u64, lm).expect("lm > 0"),
        surviving_groups: k,
    }
}

/// Brackets the loss of a filter with arbitrary real band edges between two
/// rational-edge masks on the π/(LM) grid.
///
/// `edges` are ascending toggle points in [0, π]; the filter passes
/// `(0, edges[0])`, blocks `(edges[0], edges[1])`, and so on. The lower bound
/// rounds every pass interval outward (a filter that passes more cannot
/// lose more); the upper bound rounds inward.
pub fn irrational_edge_bounds(
    edges: &[f64],
    m: usize,
    l: usize,
) -> Result<(RelativeLossResult, RelativeLossResult)> {
    if l == 0 || m == 0 {
        return Err(Error::Range {
            name: "l*m",
            value: (l * m) as f64,
            requirement: "need l >= 1 and m >= 1",
        });
    }
    for (idx, &e) in edges.iter().enumerate() {
        let ok = e >= 0.0 && e <= std::f64::consts::PI + 1e-12;
        let ascending = idx == 0 || edges[idx - 1] <= e;
        if !ok || !ascending {
            return Err(Error::Range {
                name: "edge",
                value: e,
                requirement: "edges must ascend within [0, pi]",
            });
        }
    }
    let lm = l * m;
    let delta = std::f64::consts::PI / lm as f64;

    // pass_intervals(widen): interval p of the filter is
    // (edges[2p-1], edges[2p]) in toggle order, starting passing at 0.
    let build = |widen: bool| -> Result<RationalBandMask> {
        let mut pass = vec![false; lm];
        let mut bounds = Vec::with_capacity(edges.len() + 2);
        bounds.push(0.0);
        bounds.extend_from_slice(edges);
        bounds.push(std::f64::consts::PI);
        for p in 0..(bounds.len() - 1).div_ceil(2) {
            let (lo, hi) = (bounds[2 * p], bounds[2 * p + 1]);
            if hi <= lo {
                continue;
            }
            let (lo_idx, hi_idx) = if widen {
                ((lo / delta).floor() as usize, (hi / delta).ceil() as usize)
            } else {
                ((lo / delta).ceil() as usize, (hi / delta).floor() as usize)
            };
            for band in pass.iter_mut().take(hi_idx.min(lm)).skip(lo_idx) {
                *band = true;
            }
        }
        RationalBandMask::new(l, m, pass)
    };

    let lower = relative_loss_rate(&build(true)?);
    let upper = relative_loss_rate(&build(false)?);
    Ok((lower, upper))
}
