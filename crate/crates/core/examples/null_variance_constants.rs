//! Derives the exact conditional kernel variances ζ_c of the degenerate rank
//! statistics under independence.
//!
//! For each length n = r..=2r-2 (r the kernel order) the exact variance of
//! the statistic is found by enumerating all n! relative-rank permutations.
//! Hoeffding's identity `C(n,r) Var U_n = Σ_c C(r,c) C(n-r,r-c) ζ_c` is then
//! a triangular system in ζ_2..ζ_r, solved here in exact rational arithmetic.
//!
//! Run with `cargo run --release -p wn-core --example null_variance_constants`.

use wn_core::corr::{bkr_r_ranks, hoeffding_d_ranks, tau_star_ranks, CorrValue};
use wn_core::Result;

#[derive(Clone, Copy, Debug)]
struct Frac {
    num: i128,
    den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    fn new(num: i128, den: i128) -> Self {
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Self {
            num: s * num / g,
            den: s * den / g,
        }
    }
    fn int(v: i128) -> Self {
        Self::new(v, 1)
    }
    fn add(self, o: Self) -> Self {
        Self::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    fn sub(self, o: Self) -> Self {
        self.add(Self::new(-o.num, o.den))
    }
    fn mul(self, o: Self) -> Self {
        let g1 = gcd(self.num, o.den).max(1);
        let g2 = gcd(o.num, self.den).max(1);
        Self::new((self.num / g1) * (o.num / g2), (self.den / g2) * (o.den / g1))
    }
    fn div(self, o: Self) -> Self {
        self.mul(Self::new(o.den, o.num))
    }
}

fn binom(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

fn falling(n: usize, k: usize) -> i128 {
    (0..k).map(|i| (n - i) as i128).product()
}

/// Statistic = scale · T + shift with T an integer count.
struct Spec {
    name: &'static str,
    order: usize,
    eval: fn(&[usize]) -> Result<CorrValue>,
    /// (scale, shift) at length n as exact fractions.
    affine: fn(usize) -> (Frac, Frac),
}

fn exact_variance(spec: &Spec, n: usize) -> Frac {
    let (scale, shift) = (spec.affine)(n);
    let to_count = |v: f64| -> i128 {
        let t = (v - shift.num as f64 / shift.den as f64) * scale.den as f64 / scale.num as f64;
        let rounded = t.round();
        assert!((t - rounded).abs() < 1e-6, "non-integral count {t}");
        rounded as i128
    };
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    let (mut s1, mut s2, mut count) = (0i128, 0i128, 0i128);
    let mut visit = |p: &[usize]| {
        let t = to_count((spec.eval)(p).unwrap().value);
        s1 += t;
        s2 += t * t;
        count += 1;
    };
    // Heap's algorithm.
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let var_t = Frac::new(count * s2 - s1 * s1, count * count);
    var_t.mul(scale).mul(scale)
}

fn main() {
    let specs = [
        Spec {
            name: "HoeffdingD",
            order: 5,
            eval: hoeffding_d_ranks,
            affine: |n| (Frac::new(15, 2 * falling(n, 5)), Frac::int(0)),
        },
        Spec {
            name: "TauStar",
            order: 4,
            eval: tau_star_ranks,
            affine: |n| (Frac::new(3, 2 * binom(n, 4)), Frac::new(-1, 2)),
        },
        Spec {
            name: "BkrR",
            order: 6,
            eval: bkr_r_ranks,
            affine: |n| (Frac::new(45, 2 * falling(n, 6)), Frac::int(0)),
        },
    ];
    for spec in &specs {
        let r = spec.order;
        // zeta[c] for c = 2..=r, filled from c = r downwards.
        let mut zeta = vec![Frac::int(0); r + 1];
        for n in r..=2 * r - 2 {
            let var = exact_variance(spec, n);
            let lowest = 2 * r - n;
            let mut rhs = var.mul(Frac::int(binom(n, r)));
            for (c, z) in zeta.iter().enumerate().skip(lowest + 1) {
                rhs = rhs.sub(z.mul(Frac::int(binom(r, c) * binom(n - r, r - c))));
            }
            zeta[lowest] = rhs.div(Frac::int(binom(r, lowest) * binom(n - r, r - lowest)));
            println!("{} n={n}: Var = {}/{}", spec.name, var.num, var.den);
        }
        for (c, z) in zeta.iter().enumerate().skip(2) {
            println!(
                "{} zeta_{c} = {}/{} = {:.17e}",
                spec.name,
                z.num,
                z.den,
                z.num as f64 / z.den as f64
            );
        }
    }
}
