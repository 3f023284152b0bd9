//! Compensated (Neumaier) summation.

/// Running sum with Neumaier compensation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Fixed-width vector of compensated sums.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSums<const K: usize>(pub [CompensatedSum; K]);

impl<const K: usize> Default for CompensatedSums<K> {
    fn default() -> Self {
        Self([CompensatedSum::default(); K])
    }
}

impl<const K: usize> CompensatedSums<K> {
    #[inline]
    pub fn add_scaled(&mut self, w: f64, v: &[f64; K]) {
        for (acc, x) in self.0.iter_mut().zip(v) {
            acc.add(w * x);
        }
    }

    pub fn value(&self) -> [f64; K] {
        std::array::from_fn(|k| self.0[k].value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let mut s = CompensatedSum::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
