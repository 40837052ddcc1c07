//! Compensated (Neumaier) summation for the long residue scans.

use core::ops::AddAssign;

use num_complex::Complex64;

/// Kahan–Babuška–Neumaier accumulator: keeps a running compensation term so
/// that the error stays `O(ε)` independent of the number of terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
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

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}

/// Componentwise compensated sum of complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexSum {
    fn add_assign(&mut self, rhs: Complex64) {
        self.add(rhs);
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        iter.into_iter().for_each(|z| acc.add(z));
        acc
    }
}

pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

pub fn sum_complex<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    iter.into_iter().collect::<ComplexSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_is_recovered() {
        // Naive summation returns 0 here.
        assert_eq!(sum_f64([1.0, 1e100, 1.0, -1e100]), 2.0);
        let z = sum_complex([
            Complex64::new(1e100, 1.0),
            Complex64::new(1.0, 1e100),
            Complex64::new(-1e100, -1e100),
        ]);
        assert_eq!(z, Complex64::new(1.0, 1.0));
    }
}
