//! Integer encodings of the alternatives of a disjunction.
//!
//! Two recursive families are provided: the binary reflected Gray matrices
//! `K^s` and the zig-zag matrices `C^s`, both `2^s × s`. Arbitrary explicit
//! encodings are accepted too, but before any of them is used to emit a
//! formulation it has to pass two gates: its codes must be in convex position
//! (each code is a vertex of their hull) and hole-free (the hull holds no
//! other lattice point).

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{affine_hull, feasible_nonnegative, i64_vector_to_rational, rat, RationalMatrix, RationalVector};

/// Largest order accepted by [`gray_matrix`] and [`zigzag_matrix`].
pub const MAX_ORDER: u32 = 24;

/// Default cap on the number of bounding-box lattice points the hole-free check visits.
pub const DEFAULT_HOLE_CHECK_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncodingKind {
    #[serde(rename = "gray")]
    BinaryReflectedGray,
    #[serde(rename = "zigzag")]
    ZigZag,
    #[serde(rename = "explicit")]
    Explicit,
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::BinaryReflectedGray => "gray",
            EncodingKind::ZigZag => "zigzag",
            EncodingKind::Explicit => "explicit",
        })
    }
}

fn check_order(s: u32) -> Result<()> {
    if s == 0 || s > MAX_ORDER {
        return Err(Error::InvalidOrder);
    }
    Ok(())
}

/// The binary reflected Gray matrix `K^s`.
///
/// `K^1 = (0, 1)ᵀ`; `K^{s+1}` stacks `K^s` with a zero column on top of the
/// row-reversed `K^s` with a ones column.
pub fn gray_matrix(s: u32) -> Result<Vec<Vec<i64>>> {
    check_order(s)?;
    let mut k = vec![vec![0], vec![1]];
    for _ in 1..s {
        let mut next = Vec::with_capacity(2 * k.len());
        next.extend(k.iter().map(|row| with_last(row, 0)));
        next.extend(k.iter().rev().map(|row| with_last(row, 1)));
        k = next;
    }
    Ok(k)
}

/// The zig-zag matrix `C^s`.
///
/// `C^1 = (0, 1)ᵀ`; `C^{s+1}` stacks `C^s` with a zero column on top of
/// `C^s` shifted by its own last row, with a ones column.
pub fn zigzag_matrix(s: u32) -> Result<Vec<Vec<i64>>> {
    check_order(s)?;
    let mut c = vec![vec![0], vec![1]];
    for _ in 1..s {
        let last = c.last().cloned().unwrap();
        let mut next = Vec::with_capacity(2 * c.len());
        next.extend(c.iter().map(|row| with_last(row, 0)));
        next.extend(c.iter().map(|row| {
            let shifted: Vec<i64> = row.iter().zip(&last).map(|(a, b)| a + b).collect();
            with_last(&shifted, 1)
        }));
        c = next;
    }
    Ok(c)
}

fn with_last(row: &[i64], x: i64) -> Vec<i64> {
    let mut v = row.to_vec();
    v.push(x);
    v
}

/// `ceil(log2(d))` for `d >= 1`.
pub fn code_length(d: usize) -> u32 {
    d.next_power_of_two().trailing_zeros()
}

/// `d` distinct integer code vectors of a common dimension `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    kind: EncodingKind,
    rows: Vec<Vec<i64>>,
}

impl Encoding {
    /// Wraps caller-supplied code vectors after checking they are usable as an encoding.
    pub fn explicit(rows: Vec<Vec<i64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::TooFewAlternatives(rows.len()));
        }
        let r = rows[0].len();
        if r == 0 {
            return Err(Error::InvalidEncoding("code vectors must have dimension >= 1".into()));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != r) {
            return Err(Error::InvalidEncoding(format!("row {} has dimension {}, expected {r}", i + 1, row.len())));
        }
        let mut seen = HashSet::new();
        for (i, row) in rows.iter().enumerate() {
            if !seen.insert(row) {
                return Err(Error::InvalidEncoding(format!("row {} repeats an earlier code", i + 1)));
            }
        }
        Ok(Self { kind: EncodingKind::Explicit, rows })
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    /// Number of codes.
    pub fn d(&self) -> usize {
        self.rows.len()
    }

    /// Code dimension.
    pub fn r(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn rational_rows(&self) -> Vec<RationalVector> {
        self.rows.iter().map(|r| i64_vector_to_rational(r)).collect()
    }

    /// Per-coordinate `(min, max)` over the codes.
    pub fn coordinate_ranges(&self) -> Vec<(i64, i64)> {
        (0..self.r())
            .map(|k| {
                let col = self.rows.iter().map(|row| row[k]);
                (col.clone().min().unwrap(), col.max().unwrap())
            })
            .collect()
    }
}

/// The first `d` rows of `K^r` or `C^r` with `r = ceil(log2(d))`.
pub fn make_encoding(d: usize, kind: EncodingKind) -> Result<Encoding> {
    if d < 2 {
        return Err(Error::TooFewAlternatives(d));
    }
    let r = code_length(d);
    let full = match kind {
        EncodingKind::BinaryReflectedGray => gray_matrix(r)?,
        EncodingKind::ZigZag => zigzag_matrix(r)?,
        EncodingKind::Explicit => return Err(Error::NeedsExplicitRows),
    };
    Ok(Encoding { kind, rows: full.into_iter().take(d).collect() })
}

/// Exact test of whether `p` is a convex combination of `points`.
pub(crate) fn in_convex_hull(points: &[RationalVector], p: &[crate::linalg::Rational]) -> bool {
    if points.is_empty() {
        return false;
    }
    let r = p.len();
    let mut rows: Vec<RationalVector> = (0..r).map(|k| points.iter().map(|q| q[k].clone()).collect()).collect();
    rows.push(vec![rat(1); points.len()]);
    let mut rhs = p.to_vec();
    rhs.push(rat(1));
    let a = RationalMatrix::from_rows(points.len(), rows).expect("consistent dimensions");
    feasible_nonnegative(&a, &rhs)
}

/// True iff no code is a convex combination of the others.
pub fn is_in_convex_position(e: &Encoding) -> bool {
    let rows = e.rational_rows();
    (0..rows.len()).all(|i| {
        let others: Vec<RationalVector> =
            rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
        !in_convex_hull(&others, &rows[i])
    })
}

/// True iff the only lattice points in the hull of the codes are the codes.
///
/// Enumerates the bounding box of the codes; fails with
/// [`Error::HoleCheckTooLarge`] when the box holds more than `cap` points.
pub fn is_hole_free(e: &Encoding, cap: u128) -> Result<bool> {
    let ranges = e.coordinate_ranges();
    let points =
        ranges.iter().try_fold(1u128, |acc, (lo, hi)| acc.checked_mul((hi - lo + 1) as u128)).unwrap_or(u128::MAX);
    if points > cap {
        return Err(Error::HoleCheckTooLarge { points, cap });
    }
    let rows = e.rational_rows();
    let hull = affine_hull(&rows)?;
    let codes: HashSet<&Vec<i64>> = e.rows().iter().collect();
    let mut current: Vec<i64> = ranges.iter().map(|(lo, _)| *lo).collect();
    loop {
        if !codes.contains(&current) {
            let p = i64_vector_to_rational(&current);
            if hull.contains(&p) && in_convex_hull(&rows, &p) {
                return Ok(false);
            }
        }
        // odometer step
        let mut k = 0;
        loop {
            if k == current.len() {
                return Ok(true);
            }
            if current[k] < ranges[k].1 {
                current[k] += 1;
                break;
            }
            current[k] = ranges[k].0;
            k += 1;
        }
    }
}

/// Runs both gates and turns a failure into [`Error::EncodingNotIdealizable`].
pub fn check_gates(e: &Encoding, hole_cap: u128) -> Result<()> {
    if !is_in_convex_position(e) {
        return Err(Error::EncodingNotIdealizable("codes are not in convex position".into()));
    }
    if !is_hole_free(e, hole_cap)? {
        return Err(Error::EncodingNotIdealizable(
            "hull of the codes contains a lattice point that is not a code".into(),
        ));
    }
    Ok(())
}
