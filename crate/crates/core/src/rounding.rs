//! Small/large classification, geometric rounding of large jobs, and
//! configuration tuples.
//!
//! For a target makespan `C` a job is small when `p <= εC`. Large jobs are
//! rounded up to the next grid value `εC(1+ε)^k`, `k = 1..=K`, where `K` is
//! the least integer with `ε(1+ε)^K >= 1`. A set of jobs is then described
//! by a [`ConfigTuple`]: one count per large class plus the small mass in
//! whole units of `εC`, rounded up.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Accuracy parameter, a reduced fraction in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Epsilon {
    numer: u64,
    denom: u64,
}

impl Epsilon {
    pub const ONE: Epsilon = Epsilon { numer: 1, denom: 1 };

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if numer == 0 || denom == 0 || numer > denom {
            return Err(Error::InvalidEpsilon(format!("{numer}/{denom}")));
        }
        let g = numer.gcd(&denom);
        Ok(Epsilon { numer: numer / g, denom: denom / g })
    }

    pub fn numer(&self) -> u64 {
        self.numer
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn value<Q: ExactScalar>(&self) -> Q {
        Q::from_fraction(self.numer, self.denom)
    }

    /// The approximation factor `1 + 4ε`.
    pub fn guarantee<Q: ExactScalar>(&self) -> Q {
        Q::one() + self.value::<Q>().mul_u64(4)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::InvalidEpsilon(format!("{s:?} is not of the form a/b")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidEpsilon(format!("{s:?} is not of the form a/b")))
        };
        Epsilon::new(parse(a)?, parse(b)?)
    }
}

/// Rounding grid for one target makespan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeGrid<Q> {
    target: u64,
    eps: Epsilon,
    small_threshold: Q,
    class_values: Vec<Q>,
    machine_cap: Q,
    schedule_bound: Q,
}

impl<Q: ExactScalar> SizeGrid<Q> {
    pub fn new(target: u64, eps: Epsilon) -> Self {
        assert!(target >= 1, "target makespan must be positive");
        let eps_value: Q = eps.value();
        let target_q = Q::from_u64(target);
        let growth = Q::one() + eps_value.clone();
        let small_threshold = eps_value.clone() * target_q.clone();

        let mut class_values = Vec::new();
        let mut value = small_threshold.clone();
        while value < target_q {
            value = value * growth.clone();
            class_values.push(value.clone());
        }

        let machine_cap = (Q::one() + eps_value.mul_u64(3)) * target_q.clone();
        let schedule_bound = eps.guarantee::<Q>() * target_q;
        SizeGrid { target, eps, small_threshold, class_values, machine_cap, schedule_bound }
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn epsilon(&self) -> Epsilon {
        self.eps
    }

    /// `εC`, also the size of one small-mass unit.
    pub fn small_threshold(&self) -> &Q {
        &self.small_threshold
    }

    /// Number of large classes `K`.
    pub fn class_count(&self) -> usize {
        self.class_values.len()
    }

    /// Rounded size of class `k`, 1-based.
    pub fn class_value(&self, k: usize) -> &Q {
        &self.class_values[k - 1]
    }

    pub fn class_values(&self) -> &[Q] {
        &self.class_values
    }

    /// Per-machine budget `(1+3ε)C` for rounded configurations.
    pub fn machine_cap(&self) -> &Q {
        &self.machine_cap
    }

    /// Final schedule bound `(1+4ε)C`.
    pub fn schedule_bound(&self) -> &Q {
        &self.schedule_bound
    }

    pub fn round_job(&self, size: u64) -> Result<SizeClass> {
        if size > self.target {
            return Err(Error::InfeasibleAtTarget { size, target: self.target });
        }
        let p = Q::from_u64(size);
        if p <= self.small_threshold {
            return Ok(SizeClass::Small);
        }
        // First class whose value is not below p; exists since the last value >= C >= p.
        let k = self.class_values.partition_point(|v| *v < p);
        Ok(SizeClass::Large(k + 1))
    }

    /// Rounded size of a job that [`round_job`](Self::round_job) accepted.
    pub fn rounded_size(&self, class: SizeClass, size: u64) -> Q {
        match class {
            SizeClass::Small => Q::from_u64(size),
            SizeClass::Large(k) => self.class_value(k).clone(),
        }
    }

    /// Configuration tuple of a job multiset.
    pub fn node_tuple(&self, sizes: impl IntoIterator<Item = u64>) -> Result<ConfigTuple> {
        let mut tuple = ConfigTuple::zero(self.class_count());
        let mut small_mass = 0u64;
        for size in sizes {
            match self.round_job(size)? {
                SizeClass::Small => small_mass += size,
                SizeClass::Large(k) => tuple.counts[k - 1] += 1,
            }
        }
        tuple.small_units = self.small_units_for(small_mass);
        Ok(tuple)
    }

    /// `⌈mass / εC⌉`.
    pub fn small_units_for(&self, mass: u64) -> u32 {
        let units = (Q::from_u64(mass) / self.small_threshold.clone()).ceil_u64();
        u32::try_from(units).expect("small unit count fits in u32")
    }

    /// Exact rounded size of a tuple.
    pub fn total_size(&self, tuple: &ConfigTuple) -> Q {
        debug_assert_eq!(tuple.counts.len(), self.class_count());
        let large = tuple
            .counts
            .iter()
            .zip(&self.class_values)
            .fold(Q::zero(), |acc, (&count, value)| acc + value.mul_u64(count.into()));
        large + self.small_threshold.mul_u64(tuple.small_units.into())
    }

    pub fn fits(&self, tuple: &ConfigTuple, cap: &Q) -> bool {
        self.total_size(tuple) <= *cap
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SizeClass {
    Small,
    /// Large class index `k`, 1-based.
    Large(usize),
}

/// Counts of large jobs per class plus small mass in units of `εC`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigTuple {
    pub counts: Vec<u32>,
    pub small_units: u32,
}

impl ConfigTuple {
    pub fn zero(class_count: usize) -> Self {
        ConfigTuple { counts: vec![0; class_count], small_units: 0 }
    }

    pub fn new(counts: Vec<u32>, small_units: u32) -> Self {
        ConfigTuple { counts, small_units }
    }

    pub fn is_zero(&self) -> bool {
        self.small_units == 0 && self.counts.iter().all(|&c| c == 0)
    }

    /// Componentwise `self <= other`.
    pub fn componentwise_le(&self, other: &ConfigTuple) -> bool {
        self.small_units <= other.small_units
            && self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &ConfigTuple) -> ConfigTuple {
        debug_assert_eq!(self.counts.len(), other.counts.len());
        ConfigTuple {
            counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect(),
            small_units: self.small_units + other.small_units,
        }
    }

    pub fn sub(&self, other: &ConfigTuple) -> Result<ConfigTuple> {
        if !other.componentwise_le(self) || self.counts.len() != other.counts.len() {
            return Err(Error::TupleUnderflow(format!("{self} - {other}")));
        }
        Ok(ConfigTuple {
            counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a - b).collect(),
            small_units: self.small_units - other.small_units,
        })
    }

    pub fn job_count_bound(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum::<u64>() + u64::from(self.small_units)
    }
}

impl fmt::Display for ConfigTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "; s={})", self.small_units)
    }
}
