use num_traits::{Signed, Zero};

use super::{Rational, RationalMatrix};

/// Whether `{x >= 0 : A x = b}` is nonempty.
///
/// Phase one of the simplex method over exact rationals with Bland's rule, so
/// it always terminates and never misjudges a degenerate instance.
pub fn feasible_nonnegative(a: &RationalMatrix, b: &[Rational]) -> bool {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m, "right-hand side length must match row count");
    if m == 0 {
        return true;
    }
    let width = n + m + 1;
    let rhs = width - 1;

    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.rows().iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut t = vec![Rational::zero(); width];
        for (j, x) in row.iter().enumerate() {
            t[j] = if flip { -x.clone() } else { x.clone() };
        }
        t[n + i] = Rational::from_integer(1.into());
        t[rhs] = if flip { -bi.clone() } else { bi.clone() };
        tab.push(t);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut obj = vec![Rational::zero(); width];
    for t in &tab {
        for j in 0..n {
            obj[j] -= &t[j];
        }
        obj[rhs] -= &t[rhs];
    }

    loop {
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, t) in tab.iter().enumerate() {
            if !t[enter].is_positive() {
                continue;
            }
            let ratio = &t[rhs] / &t[enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((pr, _)) = leave else {
            // Phase one is bounded below by zero; an unbounded ray cannot occur.
            unreachable!("phase-one objective is bounded");
        };
        let inv = tab[pr][enter].recip();
        for x in tab[pr].iter_mut() {
            *x *= &inv;
        }
        let pivot = tab[pr].clone();
        for (i, t) in tab.iter_mut().enumerate() {
            if i == pr || t[enter].is_zero() {
                continue;
            }
            let f = t[enter].clone();
            for (x, p) in t.iter_mut().zip(&pivot) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (x, p) in obj.iter_mut().zip(&pivot) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        basis[pr] = enter;
    }

    obj[rhs].is_zero()
}
