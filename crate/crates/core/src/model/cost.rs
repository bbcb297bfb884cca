use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;

/// Exact non-negative rational `num / den` used for every user cost and load.
///
/// Values are kept unreduced (the denominator is the machine speed, 1 on
/// identical and unrelated machines); equality and ordering compare the
/// represented rationals.
#[derive(Debug, Clone, Copy)]
pub struct Cost {
    num: u128,
    den: u128,
}

impl Cost {
    pub const ZERO: Cost = Cost { num: 0, den: 1 };

    pub fn new(num: u128, den: u128) -> Self {
        assert!(den > 0, "zero denominator");
        Cost { num, den }
    }

    pub fn integer(value: u128) -> Self {
        Cost { num: value, den: 1 }
    }

    pub fn numer(&self) -> u128 {
        self.num
    }

    pub fn denom(&self) -> u128 {
        self.den
    }

    pub fn to_ratio(self) -> Ratio<u128> {
        Ratio::new(self.num, self.den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Integer value when the rational is whole.
    pub fn as_integer(&self) -> Option<u128> {
        self.num.is_multiple_of(self.den).then(|| self.num / self.den)
    }
}

impl From<Ratio<u128>> for Cost {
    fn from(r: Ratio<u128>) -> Self {
        Cost::new(*r.numer(), *r.denom())
    }
}

/// Compares `a/b` with `c/d` without forming products, by walking the
/// continued-fraction expansions of both sides.
fn cmp_fractions(mut a: u128, mut b: u128, mut c: u128, mut d: u128) -> Ordering {
    let mut flipped = false;
    loop {
        let (q1, r1) = (a / b, a % b);
        let (q2, r2) = (c / d, c % d);
        let ord = match q1.cmp(&q2) {
            Ordering::Equal => match (r1 == 0, r2 == 0) {
                (true, true) => Ordering::Equal,
                (true, false) => Ordering::Less,
                (false, true) => Ordering::Greater,
                (false, false) => {
                    // a/b = q + r1/b; compare r1/b vs r2/d  <=>  d/r2 vs b/r1
                    (a, b, c, d) = (b, r1, d, r2);
                    flipped = !flipped;
                    continue;
                }
            },
            o => o,
        };
        return if flipped { ord.reverse() } else { ord };
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            self.num.cmp(&other.num)
        } else {
            cmp_fractions(self.num, self.den, other.num, other.den)
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Cost {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cost {}

/// `p/q` in lowest terms, or just `p` when the value is an integer.
impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.to_ratio().to_string())
    }
}
