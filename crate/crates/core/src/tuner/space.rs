use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionKind {
    Real,
    Integer,
    /// Encoded as 0.0 / 1.0.
    Boolean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub name: String,
    pub kind: DimensionKind,
    pub low: f64,
    pub high: f64,
}

impl Dimension {
    pub fn real(name: &str, low: f64, high: f64) -> Self {
        Self {
            name: name.into(),
            kind: DimensionKind::Real,
            low,
            high,
        }
    }

    pub fn integer(name: &str, low: f64, high: f64) -> Self {
        Self {
            name: name.into(),
            kind: DimensionKind::Integer,
            low,
            high,
        }
    }

    pub fn boolean(name: &str) -> Self {
        Self {
            name: name.into(),
            kind: DimensionKind::Boolean,
            low: 0.0,
            high: 1.0,
        }
    }

    /// Clips into bounds and rounds integer and boolean values.
    pub fn repair(&self, v: f64) -> f64 {
        let v = if v.is_nan() {
            self.low
        } else {
            v.clamp(self.low, self.high)
        };
        match self.kind {
            DimensionKind::Real => v,
            DimensionKind::Integer | DimensionKind::Boolean => v.round().clamp(self.low, self.high),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.low
            && v <= self.high
            && match self.kind {
                DimensionKind::Real => true,
                DimensionKind::Integer => v.fract() == 0.0,
                DimensionKind::Boolean => v == 0.0 || v == 1.0,
            }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            DimensionKind::Real => rng.gen_range(self.low..=self.high),
            DimensionKind::Integer => rng.gen_range(self.low as i64..=self.high as i64) as f64,
            DimensionKind::Boolean => f64::from(u8::from(rng.gen::<bool>())),
        }
    }
}

/// Ordered, uniquely named dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    dims: Vec<Dimension>,
}

impl ParamSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        let mut names = HashSet::new();
        for d in &dims {
            if !names.insert(d.name.as_str()) {
                return Err(Error::invalid(format!("duplicate dimension `{}`", d.name)));
            }
            let ok = match d.kind {
                DimensionKind::Boolean => d.low == 0.0 && d.high == 1.0,
                DimensionKind::Real => d.low < d.high,
                DimensionKind::Integer => d.low < d.high && d.low.fract() == 0.0 && d.high.fract() == 0.0,
            };
            if !ok || !d.low.is_finite() || !d.high.is_finite() {
                return Err(Error::invalid(format!("bad bounds on `{}`", d.name)));
            }
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        v.len() == self.dims.len() && self.dims.iter().zip(v).all(|(d, &x)| d.contains(x))
    }

    pub fn repair(&self, v: &mut [f64]) {
        for (d, x) in self.dims.iter().zip(v.iter_mut()) {
            *x = d.repair(*x);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.dims.iter().map(|d| d.sample(rng)).collect()
    }
}

/// A point of a [`ParamSpace`], with its fitness once evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub values: Vec<f64>,
    pub fitness: Option<f64>,
}
