use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Up to 64 assignments packed lane-wise: `words()[i]` holds `x_i` for
/// every lane. Keeps `|y|_1` per lane alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputBlock {
    words: Vec<u64>,
    lanes: usize,
    ones: Vec<u32>,
}

impl InputBlock {
    pub const WIDTH: usize = 64;

    pub fn pack(assignments: &[Vec<bool>]) -> Result<Self> {
        if assignments.len() > Self::WIDTH {
            return Err(Error::ResourceCap {
                what: alloc::string::String::from("input block lanes"),
                requested: assignments.len() as f64,
                limit: Self::WIDTH as f64,
            });
        }
        let n = assignments.first().map_or(0, Vec::len);
        let mut words = vec![0u64; n];
        let mut ones = Vec::with_capacity(assignments.len());
        for (lane, x) in assignments.iter().enumerate() {
            if x.len() != n {
                return Err(Error::ArityMismatch { expected: n, got: x.len() });
            }
            let mut count = 0;
            for (i, &b) in x.iter().enumerate() {
                if b {
                    words[i] |= 1 << lane;
                    count += 1;
                }
            }
            ones.push(count);
        }
        Ok(InputBlock { words, lanes: assignments.len(), ones })
    }

    /// Block from per-variable words; lanes beyond `lanes` are cleared.
    pub fn from_words(mut words: Vec<u64>, lanes: usize) -> Self {
        assert!(lanes <= Self::WIDTH);
        let mask = lane_mask(lanes);
        words.iter_mut().for_each(|w| *w &= mask);
        let ones = (0..lanes).map(|l| words.iter().filter(|&&w| (w >> l) & 1 == 1).count() as u32).collect();
        InputBlock { words, lanes, ones }
    }

    pub fn unpack(&self) -> Vec<Vec<bool>> {
        (0..self.lanes).map(|l| self.lane(l)).collect()
    }

    pub fn lane(&self, l: usize) -> Vec<bool> {
        self.words.iter().map(|w| (w >> l) & 1 == 1).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    pub fn num_vars(&self) -> usize {
        self.words.len()
    }

    pub fn lane_mask(&self) -> u64 {
        lane_mask(self.lanes)
    }

    /// `|y|_1` of lane `l`.
    pub fn ones(&self, l: usize) -> u32 {
        self.ones[l]
    }

    /// `|y|_0` of lane `l`.
    pub fn zeros(&self, l: usize) -> u32 {
        self.words.len() as u32 - self.ones[l]
    }
}

pub(crate) fn lane_mask(lanes: usize) -> u64 {
    if lanes >= 64 {
        !0
    } else {
        (1u64 << lanes) - 1
    }
}
