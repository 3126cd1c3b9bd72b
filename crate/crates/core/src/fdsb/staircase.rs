//! Staircase functions and their piecewise-linear integrals.

use std::fmt;

use num::{Signed, Zero};

use crate::degree::DegreeSequence;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, q_usize, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub end: Q,
    pub level: Q,
}

/// Non-increasing, non-negative, piecewise-constant function on `(0, end]`.
///
/// Segment `k` covers `(end_{k-1}, end_k]` with `end_{-1} = 0`; the function is
/// zero past the last end.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StaircaseFn {
    segs: Vec<Segment>,
}

impl StaircaseFn {
    pub fn new(segs: Vec<(Q, Q)>) -> Result<Self> {
        let mut prev_end = Q::zero();
        let mut prev_level: Option<Q> = None;
        for (k, (end, level)) in segs.iter().enumerate() {
            if *end <= prev_end {
                return Err(Error::InvalidSequence(format!(
                    "staircase segment {} ends at {} which is not past {}",
                    k + 1,
                    fmt_q(end),
                    fmt_q(&prev_end)
                )));
            }
            if level.is_negative() {
                return Err(Error::InvalidSequence(format!(
                    "staircase segment {} has negative level {}",
                    k + 1,
                    fmt_q(level)
                )));
            }
            if prev_level.as_ref().is_some_and(|p| level > p) {
                return Err(Error::InvalidSequence(format!(
                    "staircase segment {} rises to {}",
                    k + 1,
                    fmt_q(level)
                )));
            }
            prev_end = end.clone();
            prev_level = Some(level.clone());
        }
        Ok(Self::merged(
            segs.into_iter().map(|(end, level)| Segment { end, level }),
        ))
    }

    fn merged(segs: impl IntoIterator<Item = Segment>) -> Self {
        let mut out: Vec<Segment> = Vec::new();
        for s in segs {
            match out.last_mut() {
                Some(last) if last.level == s.level => last.end = s.end,
                _ => out.push(s),
            }
        }
        Self { segs: out }
    }

    pub fn constant(end: Q, level: Q) -> Result<Self> {
        Self::new(vec![(end, level)])
    }

    /// Exact run-length representation of a degree sequence.
    pub fn from_degrees(seq: &DegreeSequence) -> Self {
        Self::merged((1..=seq.len()).map(|r| Segment {
            end: q_usize(r),
            level: seq.get(r),
        }))
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segs
    }

    pub fn segment_count(&self) -> usize {
        self.segs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn end(&self) -> Q {
        self.segs.last().map_or_else(Q::zero, |s| s.end.clone())
    }

    pub fn first_level(&self) -> Q {
        self.segs.first().map_or_else(Q::zero, |s| s.level.clone())
    }

    /// Value at `x`; points at or left of zero read the first level.
    pub fn eval(&self, x: &Q) -> Q {
        let k = self.segs.partition_point(|s| s.end < *x);
        self.segs.get(k).map_or_else(Q::zero, |s| s.level.clone())
    }

    pub fn at_rank(&self, r: usize) -> Q {
        self.eval(&q_usize(r))
    }

    pub fn total(&self) -> Q {
        let mut prev = Q::zero();
        let mut acc = Q::zero();
        for s in &self.segs {
            acc += &s.level * (&s.end - &prev);
            prev = s.end.clone();
        }
        acc
    }

    pub fn has_integer_ends(&self) -> bool {
        self.segs.iter().all(|s| s.end.is_integer())
    }

    /// `self(r) >= seq(r)` at every rank of `seq`.
    pub fn dominates(&self, seq: &DegreeSequence) -> bool {
        (1..=seq.len()).all(|r| self.at_rank(r) >= seq.get(r))
    }

    pub fn cdf(&self) -> PwlCdf {
        let mut points = vec![(Q::zero(), Q::zero())];
        let mut acc = Q::zero();
        let mut prev = Q::zero();
        for s in &self.segs {
            acc += &s.level * (&s.end - &prev);
            prev = s.end.clone();
            points.push((s.end.clone(), acc.clone()));
        }
        PwlCdf { points }
    }
}

impl fmt::Display for StaircaseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segs
            .iter()
            .map(|s| format!("{}@{}", fmt_q(&s.level), fmt_q(&s.end)))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Continuous, non-decreasing, piecewise-linear function with `F(0) = 0`,
/// constant past its last breakpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PwlCdf {
    points: Vec<(Q, Q)>,
}

impl PwlCdf {
    pub fn from_points(points: Vec<(Q, Q)>) -> Result<Self> {
        if points.first() != Some(&(Q::zero(), Q::zero())) {
            return Err(Error::Range(
                "piecewise-linear CDF must start at (0, 0)".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 < w[0].1 {
                return Err(Error::Range(
                    "breakpoints must increase in x and not decrease in y".into(),
                ));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(Q, Q)] {
        &self.points
    }

    pub fn total(&self) -> Q {
        self.points.last().expect("starts at origin").1.clone()
    }

    pub fn end(&self) -> Q {
        self.points.last().expect("starts at origin").0.clone()
    }

    pub fn eval(&self, x: &Q) -> Q {
        if !x.is_positive() {
            return Q::zero();
        }
        let k = self.points.partition_point(|(px, _)| px < x);
        if k == self.points.len() {
            return self.total();
        }
        let (x1, y1) = &self.points[k];
        if x1 == x {
            return y1.clone();
        }
        let (x0, y0) = &self.points[k - 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Leftmost `x` with `F(x) = v`.
    pub fn inverse_left(&self, v: &Q) -> Result<Q> {
        if v.is_negative() || *v > self.total() {
            return Err(Error::Range(format!(
                "{} outside [0, {}]",
                fmt_q(v),
                fmt_q(&self.total())
            )));
        }
        if v.is_zero() {
            return Ok(Q::zero());
        }
        // First breakpoint whose value reaches v; the segment before it rises strictly.
        let k = self.points.partition_point(|(_, py)| py < v);
        let (x1, y1) = &self.points[k];
        let (x0, y0) = &self.points[k - 1];
        Ok(x0 + (x1 - x0) * (v - y0) / (y1 - y0))
    }

    /// `sup { x : F(x) <= v }`, or `None` when that set is unbounded.
    pub fn sup_at_most(&self, v: &Q) -> Option<Q> {
        if *v >= self.total() {
            return None;
        }
        if v.is_negative() {
            return Some(Q::zero());
        }
        // First breakpoint strictly above v.
        let k = self.points.partition_point(|(_, py)| py <= v);
        let (x1, y1) = &self.points[k];
        let (x0, y0) = &self.points[k - 1];
        Some(x0 + (x1 - x0) * (v - y0) / (y1 - y0))
    }
}

/// `outer ∘ inner`, exact: breakpoints are those of `inner` plus the preimages
/// under `inner` of the breakpoints of `outer`.
pub fn pwl_compose(outer: &PwlCdf, inner: &PwlCdf) -> PwlCdf {
    let mut xs: Vec<Q> = inner.points.iter().map(|(x, _)| x.clone()).collect();
    for (ox, _) in &outer.points {
        if ox.is_positive() && *ox <= inner.total() {
            xs.push(inner.inverse_left(ox).expect("in range"));
        }
    }
    xs.sort();
    xs.dedup();
    let mut points: Vec<(Q, Q)> = Vec::with_capacity(xs.len());
    for x in xs {
        let y = outer.eval(&inner.eval(&x));
        // Drop collinear interior points so the representation stays minimal.
        if points.len() >= 2 {
            let (ax, ay) = &points[points.len() - 2];
            let (bx, by) = &points[points.len() - 1];
            if (by - ay) * (&x - bx) == (&y - by) * (bx - ax) {
                points.pop();
            }
        }
        points.push((x, y));
    }
    PwlCdf { points }
}

/// Pointwise product; past the shortest end the product is zero.
pub fn staircase_multiply(fs: &[StaircaseFn]) -> StaircaseFn {
    if fs.is_empty() {
        return StaircaseFn::default();
    }
    let end = fs.iter().map(StaircaseFn::end).min().expect("non-empty");
    let mut dividers: Vec<Q> = fs
        .iter()
        .flat_map(|f| f.segs.iter().map(|s| s.end.clone()))
        .filter(|e| *e <= end)
        .collect();
    dividers.sort();
    dividers.dedup();
    StaircaseFn::merged(dividers.into_iter().map(|d| {
        let level = fs
            .iter()
            .fold(Q::from_integer(1.into()), |acc, f| acc * f.eval(&d));
        Segment { end: d, level }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Buckets end at ranks 1, 2, 4, 8, ...; the last bucket runs to the end.
    #[default]
    GeometricRanks,
    /// Buckets of roughly equal mass.
    EquiDepth,
    /// Minimum added mass, by dynamic programming over runs of equal degrees.
    MinMassDp,
}

/// Upper-bounding staircase with at most `s` segments. Each bucket takes the
/// degree at its first rank. Sequences with at most `s` runs are kept exact.
pub fn compress(seq: &DegreeSequence, s: usize, strategy: Strategy) -> Result<StaircaseFn> {
    if s == 0 {
        return Err(Error::Range("bucket count must be at least 1".into()));
    }
    let exact = StaircaseFn::from_degrees(seq);
    if exact.segment_count() <= s {
        return Ok(exact);
    }
    let n = seq.len();
    let ends: Vec<usize> = match strategy {
        Strategy::GeometricRanks => {
            let mut ends = Vec::new();
            let mut e = 1usize;
            while ends.len() + 1 < s && e < n {
                ends.push(e);
                e *= 2;
            }
            ends.push(n);
            ends
        }
        Strategy::EquiDepth => {
            let cdf = seq.cdf();
            let total = cdf.total();
            let mut ends: Vec<usize> = Vec::new();
            for j in 1..s {
                let threshold = &total * q_usize(j) / q_usize(s);
                let r = (1..=n).find(|&r| cdf.at(r) >= threshold).unwrap_or(n);
                if r < n && ends.last().is_none_or(|&l| l < r) {
                    ends.push(r);
                }
            }
            ends.push(n);
            ends
        }
        Strategy::MinMassDp => min_mass_ends(&exact, s),
    };
    let mut segs = Vec::with_capacity(ends.len());
    let mut start = 1usize;
    for e in ends {
        segs.push((q_usize(e), seq.get(start)));
        start = e + 1;
    }
    StaircaseFn::new(segs)
}

/// Bucket ends (as ranks) minimising `Σ level(first run) × width` over at most
/// `s` buckets, with boundaries restricted to run boundaries.
fn min_mass_ends(runs: &StaircaseFn, s: usize) -> Vec<usize> {
    let k = runs.segs.len();
    let ends: Vec<Q> = runs.segs.iter().map(|r| r.end.clone()).collect();
    let start = |i: usize| {
        if i == 0 {
            Q::zero()
        } else {
            ends[i - 1].clone()
        }
    };
    // best[b][j]: least cost covering runs 0..j with b buckets; cut[b][j]: first run of the last bucket.
    let mut best: Vec<Vec<Option<Q>>> = vec![vec![None; k + 1]; s + 1];
    let mut cut = vec![vec![0usize; k + 1]; s + 1];
    best[0][0] = Some(Q::zero());
    for b in 1..=s {
        for j in 1..=k {
            for i in 0..j {
                let Some(prev) = &best[b - 1][i] else {
                    continue;
                };
                let cost = prev + &runs.segs[i].level * (&ends[j - 1] - start(i));
                if best[b][j].as_ref().is_none_or(|c| cost < *c) {
                    best[b][j] = Some(cost);
                    cut[b][j] = i;
                }
            }
        }
    }
    let b = (1..=s)
        .filter(|&b| best[b][k].is_some())
        .min_by(|&x, &y| best[x][k].cmp(&best[y][k]).then(x.cmp(&y)))
        .expect("one bucket always fits");
    let mut out = Vec::new();
    let (mut b, mut j) = (b, k);
    while j > 0 {
        out.push(crate::rational::to_usize(&ends[j - 1]).expect("integer ends"));
        j = cut[b][j];
        b -= 1;
    }
    out.reverse();
    out
}
