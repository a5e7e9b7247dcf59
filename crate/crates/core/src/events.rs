//! Five-way classification of a sample vector relative to the deviation
//! level `x` and the big-jump threshold `c·x`.
//!
//! Let `k = #{j : |X_j| > c·x}`. Then
//!
//! | class       | condition                                       |
//! |-------------|-------------------------------------------------|
//! | `ZeroBig`   | `k = 0`                                         |
//! | `MultiBig`  | `k >= 2`                                        |
//! | `OneMid`    | `k = 1`, `c·x < |X_i| <= x`                     |
//! | `OneNegBig` | `k = 1`, `X_i < -x`                             |
//! | `OnePosBig` | `k = 1`, `X_i > x`                              |
//!
//! Intersected with `{S_n > x}` these give the five terms whose sum is
//! `P(S_n > x)`. Comparisons follow a fixed strict/non-strict pattern:
//! `|X_j| <= cx`, `|X_i| > cx`, `X_i > x`, `|X_i| <= x`, `|S_n - X_i| <= bx`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventParams {
    n: u64,
    x: f64,
    c: f64,
    b: f64,
}

impl EventParams {
    pub fn new(n: u64, x: f64, c: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", n, "need at least one summand"));
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::invalid("x", x, "deviation level must be positive and finite"));
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::invalid("c", c, "big-jump fraction must lie in (0, 1)"));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::invalid("b", b, "residual fraction must lie in (0, 1)"));
        }
        Ok(Self { n, x, c, b })
    }

    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Big-jump threshold `c·x`.
    pub fn cx(&self) -> f64 {
        self.c * self.x
    }

    /// Residual-sum tolerance `b·x`.
    pub fn bx(&self) -> f64 {
        self.b * self.x
    }

    pub fn with_cb(&self, c: f64, b: f64) -> Result<Self> {
        Self::new(self.n, self.x, c, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    ZeroBig,
    MultiBig,
    OneMid,
    OneNegBig,
    OnePosBig,
}

impl Class {
    pub const ALL: [Class; 5] = [
        Class::ZeroBig,
        Class::MultiBig,
        Class::OneMid,
        Class::OneNegBig,
        Class::OnePosBig,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Name of the probability term this class carries on `{S_n > x}`.
    pub fn term(self) -> &'static str {
        match self {
            Class::ZeroBig => "p0",
            Class::MultiBig => "p_ge2",
            Class::OneMid => "p_1_0",
            Class::OneNegBig => "p_1_1_minus",
            Class::OnePosBig => "p_1_1_plus",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventClass {
    pub class: Class,
    /// Zero-based index of the unique coordinate with `|X_i| > cx`.
    pub big_index: Option<usize>,
    /// Whether `|S_n - X_i| <= bx`; only set for `OnePosBig`.
    pub refined: Option<bool>,
}

pub fn classify(sample: &[f64], params: &EventParams) -> Result<EventClass> {
    check_len(sample, params)?;
    Ok(classify_unchecked(sample, params))
}

fn check_len(sample: &[f64], params: &EventParams) -> Result<()> {
    if sample.len() as u64 != params.n {
        return Err(Error::Contract(format!(
            "sample has {} coordinates, params expect n = {}",
            sample.len(),
            params.n
        )));
    }
    Ok(())
}

pub(crate) fn classify_unchecked(sample: &[f64], params: &EventParams) -> EventClass {
    let cx = params.cx();
    let mut big = None;
    let mut k = 0u32;
    for (i, &v) in sample.iter().enumerate() {
        if v.abs() > cx {
            k += 1;
            if k >= 2 {
                return EventClass {
                    class: Class::MultiBig,
                    big_index: None,
                    refined: None,
                };
            }
            big = Some(i);
        }
    }
    let Some(i) = big else {
        return EventClass {
            class: Class::ZeroBig,
            big_index: None,
            refined: None,
        };
    };
    let xi = sample[i];
    let x = params.x;
    let (class, refined) = if xi > x {
        (Class::OnePosBig, Some(residual_within(sample, i, params.bx())))
    } else if xi < -x {
        (Class::OneNegBig, None)
    } else {
        (Class::OneMid, None)
    };
    EventClass {
        class,
        big_index: Some(i),
        refined,
    }
}

fn residual_within(sample: &[f64], i: usize, bx: f64) -> bool {
    let rest: f64 = sample
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, v)| v)
        .sum();
    rest.abs() <= bx
}

/// `|S_n - X_i| <= b·x` for the designated big coordinate of a `OnePosBig`
/// sample.
pub fn refined_ok(sample: &[f64], params: &EventParams, big_index: usize) -> Result<bool> {
    let ec = classify(sample, params)?;
    if ec.class != Class::OnePosBig || ec.big_index != Some(big_index) {
        return Err(Error::Contract(format!(
            "refined_ok needs a OnePosBig sample with big index {big_index}, got {:?} at {:?}",
            ec.class, ec.big_index
        )));
    }
    Ok(residual_within(sample, big_index, params.bx()))
}

/// Sum of the coordinates in index order.
pub fn sum(sample: &[f64]) -> f64 {
    sample.iter().sum()
}

/// Per-class counts on `{S_n > x}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PartitionCounts {
    pub by_class: [u64; 5],
    /// `OnePosBig` samples on `{S_n > x}` that also satisfy the refined condition.
    pub refined: u64,
    pub exceedances: u64,
    pub total: u64,
}

impl PartitionCounts {
    pub fn count(&self, class: Class) -> u64 {
        self.by_class[class.index()]
    }

    /// Tallies one sample vector.
    #[inline]
    pub fn record(&mut self, sample: &[f64], params: &EventParams) {
        self.total += 1;
        if sum(sample) > params.x {
            self.exceedances += 1;
            let ec = classify_unchecked(sample, params);
            self.by_class[ec.class.index()] += 1;
            if ec.refined == Some(true) {
                self.refined += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &PartitionCounts) {
        for (a, b) in self.by_class.iter_mut().zip(other.by_class) {
            *a += b;
        }
        self.refined += other.refined;
        self.exceedances += other.exceedances;
        self.total += other.total;
    }
}

pub fn partition_check<S: AsRef<[f64]>>(batch: &[S], params: &EventParams) -> Result<PartitionCounts> {
    if batch.is_empty() {
        return Err(Error::Contract("partition_check needs a nonempty batch".into()));
    }
    let mut counts = PartitionCounts::default();
    for s in batch {
        let s = s.as_ref();
        check_len(s, params)?;
        counts.record(s, params);
    }
    Ok(counts)
}
