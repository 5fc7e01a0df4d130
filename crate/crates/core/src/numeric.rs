use num_complex::Complex64;

/// Neumaier-compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: Complex64) {
        let (re, cre) = two_sum(self.sum.re, value.re);
        let (im, cim) = two_sum(self.sum.im, value.im);
        self.sum = Complex64::new(re, im);
        self.carry += Complex64::new(cre, cim);
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.carry += other.carry;
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

/// Real compensated sum.
pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let (s, c) = two_sum(sum, v);
        sum = s;
        carry += c;
    }
    sum + carry
}

// Neumaier's branch form: returns the rounded sum and its rounding error.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, err)
}
