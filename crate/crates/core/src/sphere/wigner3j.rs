//! Wigner 3j symbols by the Racah sum.
//!
//! Arguments are passed doubled (`2j`, `2m`) so half-integers are exact.
//! The first Racah term is evaluated from log-factorials; later terms follow
//! from the exact integer term ratio, so the log-factorial rounding is a
//! common factor that the alternating sum does not amplify. The recurrence
//! and the sum run in double-double arithmetic, which keeps the cancellation
//! at large spins (2J ~ 200) below 1e-13.

use std::sync::OnceLock;

const LN_FACTORIAL_TABLE: usize = 4096;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Neumaier-compensated running sum of ln(i).
        let mut table = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        table.push(0.0);
        for i in 1..LN_FACTORIAL_TABLE {
            let x = (i as f64).ln();
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        table
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    let table = ln_factorial_table();
    match table.get(n as usize) {
        Some(v) => *v,
        None => {
            // Stirling series beyond the table.
            let x = n as f64 + 1.0;
            (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
                - 1.0 / (360.0 * x.powi(3))
        }
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    #[inline]
    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self {
            hi: s,
            lo: b - (s - a),
        }
    }

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    #[inline]
    fn add(self, other: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        Self::quick_two_sum(s, e + self.lo + other.lo)
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        Self::quick_two_sum(p, e)
    }

    #[inline]
    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let p = q1 * b;
        let pe = q1.mul_add(b, -p);
        let (s, e) = Self::two_sum(self.hi, -p);
        let r = s + (e - pe + self.lo);
        Self::quick_two_sum(q1, r / b)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `(j1 j2 j3; m1 m2 m3)` with every argument doubled. Selection-rule
/// violations return 0.
pub fn wigner_3j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return 0.0;
    }
    if tm1 + tm2 + tm3 != 0 {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0 {
        return 0.0;
    }
    if (tj1 + tj2 + tj3) % 2 != 0 {
        return 0.0;
    }
    if tj3 > tj1 + tj2 || tj3 < (tj1 - tj2).abs() {
        return 0.0;
    }

    // Integer quantities of the Racah sum.
    let c = (tj1 + tj2 - tj3) / 2; // j1 + j2 - j3
    let d = (tj1 - tm1) / 2; // j1 - m1
    let e = (tj2 + tm2) / 2; // j2 + m2
    let a = (tj3 - tj2 + tm1) / 2; // j3 - j2 + m1
    let b = (tj3 - tj1 - tm2) / 2; // j3 - j1 - m2

    let t_min = 0.max(-a).max(-b);
    let t_max = c.min(d).min(e);
    if t_min > t_max {
        return 0.0;
    }

    let lf = |n: i32| ln_factorial(n as u32);
    let ln_delta = lf(c) + lf((tj1 - tj2 + tj3) / 2) + lf((-tj1 + tj2 + tj3) / 2)
        - lf((tj1 + tj2 + tj3) / 2 + 1);
    let ln_m = lf((tj1 + tm1) / 2)
        + lf((tj1 - tm1) / 2)
        + lf((tj2 + tm2) / 2)
        + lf((tj2 - tm2) / 2)
        + lf((tj3 + tm3) / 2)
        + lf((tj3 - tm3) / 2);
    let ln_first = 0.5 * (ln_delta + ln_m)
        - (lf(t_min)
            + lf(a + t_min)
            + lf(b + t_min)
            + lf(c - t_min)
            + lf(d - t_min)
            + lf(e - t_min));

    // Sum of terms relative to the first, with the exact ratio recurrence.
    // Numerator and denominator are integers below 2^53, hence exact.
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    for t in t_min..t_max {
        let num = -((c - t) as f64) * ((d - t) as f64) * ((e - t) as f64);
        let den = ((t + 1) as f64) * ((a + t + 1) as f64) * ((b + t + 1) as f64);
        term = term.mul_f64(num).div_f64(den);
        sum = sum.add(term);
    }
    let sum = sum.to_f64();

    // (-1)^(j1 - j2 - m3) (-1)^t_min
    let phase_exp = (tj1 - tj2 - tm3) / 2 + t_min;
    let sign = if phase_exp.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    sign * ln_first.exp() * sum
}
