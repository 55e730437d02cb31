//! Quadrilateral relaxations of the annulus `L <= ||x|| <= U`.
//!
//! Piece `i` is the quadrilateral on `v^{2i−3}, v^{2i−2}, v^{2i−1}, v^{2i}`
//! (indices mod `2d`): odd vertices sit on the inner circle, even vertices
//! on a circle of radius `U·sec(π/d)` so that every piece covers its arc of
//! the outer circle. Consecutive pieces share an edge, and the first and
//! last pieces wrap around.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::RecoveryMap;
use crate::cdc::{base_equalities, Cdc};
use crate::encoding::{make_encoding, Encoding, EncodingKind};
use crate::error::{Error, Result};
use crate::formulation::{Formulation, GeneralRow, PipelinePath, Provenance};
use crate::linalg::Rational;

/// Smallest piece count for which vertex coordinates are produced.
pub const MIN_GEOMETRIC_PIECES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSpec {
    inner_radius: f64,
    outer_radius: f64,
    d: usize,
}

impl AnnulusSpec {
    pub fn new(inner_radius: f64, outer_radius: f64, d: usize) -> Result<Self> {
        if !(inner_radius.is_finite() && outer_radius.is_finite()) {
            return Err(Error::InvalidAnnulus("radii must be finite".into()));
        }
        if inner_radius < 0.0 {
            return Err(Error::InvalidAnnulus(format!("inner_radius {inner_radius} is negative")));
        }
        if outer_radius < inner_radius {
            return Err(Error::InvalidAnnulus(format!(
                "outer_radius {outer_radius} is smaller than inner_radius {inner_radius}"
            )));
        }
        check_power_of_two(d)?;
        Ok(Self { inner_radius, outer_radius, d })
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The inner ring collapses to the origin.
    pub fn is_degenerate(&self) -> bool {
        self.inner_radius == 0.0
    }
}

fn check_power_of_two(d: usize) -> Result<u32> {
    if d >= 2 && d.is_power_of_two() {
        Ok(d.trailing_zeros())
    } else {
        Err(Error::NotPowerOfTwo(d))
    }
}

/// `v^1..v^{2d}` in order: `v^{2i−1}` at radius `L` and `v^{2i}` at radius
/// `U·sec(π/d)`, both at angle `2πi/d`.
pub fn annulus_vertices(spec: &AnnulusSpec) -> Result<Vec<(f64, f64)>> {
    let d = spec.d;
    if d < MIN_GEOMETRIC_PIECES {
        return Err(Error::DegenerateSecant { d });
    }
    let outer = spec.outer_radius / (PI / d as f64).cos();
    let mut out = Vec::with_capacity(2 * d);
    for i in 1..=d {
        let theta = 2.0 * PI * i as f64 / d as f64;
        let (s, c) = theta.sin_cos();
        out.push((spec.inner_radius * c, spec.inner_radius * s));
        out.push((outer * c, outer * s));
    }
    Ok(out)
}

/// `T^i = {2i−3, 2i−2, 2i−1, 2i}` over `{1..2d}`, indices mod `2d`.
pub fn annulus_cdc(d: usize) -> Result<Cdc> {
    check_power_of_two(d)?;
    let n = 2 * d;
    let alternatives = (0..d).map(|i| (0..4).map(|s| (2 * i + s + n - 2) % n).collect()).collect();
    Cdc::new(n, alternatives)
}

/// Paired rows for each normal, written directly from the cyclic structure:
/// ground elements `2i−3` and `2i−2` lie in pieces `i−1` and `i` (piece 0
/// being piece `d`), so their coefficient is the min or max of `b·h` over
/// those two codes.
fn cyclic_rows(e: &Encoding, normals: &[Vec<Rational>]) -> Result<Vec<GeneralRow>> {
    let d = e.d();
    let codes = e.rational_rows();
    let mut rows = Vec::with_capacity(normals.len());
    for b in normals {
        let value = |i: usize| codes[i].iter().zip(b).fold(Rational::zero(), |acc, (h, w)| acc + h * w);
        let mut lower = vec![Rational::zero(); 2 * d];
        let mut upper = vec![Rational::zero(); 2 * d];
        for i in 0..d {
            let prev = (i + d - 1) % d;
            let (a, c) = (value(prev), value(i));
            let (lo, hi) = if a <= c { (a, c) } else { (c, a) };
            for v in [(2 * i + 2 * d - 2) % (2 * d), (2 * i + 2 * d - 1) % (2 * d)] {
                lower[v] = lo.clone();
                upper[v] = hi.clone();
            }
        }
        rows.push(GeneralRow::canonicalize(b, lower, upper)?);
    }
    rows.sort();
    Ok(rows)
}

fn unit_normals(r: usize) -> Vec<Vec<Rational>> {
    (0..r).map(|k| (0..r).map(|j| if j == k { Rational::one() } else { Rational::zero() }).collect()).collect()
}

fn closed_form(d: usize, kind: EncodingKind, normals: Vec<Vec<Rational>>) -> Result<Formulation> {
    let e = make_encoding(d, kind)?;
    Ok(Formulation {
        n_lambda: 2 * d,
        r_z: e.r(),
        equalities: base_equalities(2 * d, &e)?,
        general_rows: cyclic_rows(&e, &normals)?,
        z_bounds: e.coordinate_ranges(),
        provenance: Provenance { path: PipelinePath::ClosedForm, encoding: kind, kappa: None, connected: Some(true) },
    })
}

/// Gray-encoded annulus: `r` integer variables, one unit-normal row pair per
/// coordinate.
pub fn annulus_gray_formulation(d: usize) -> Result<Formulation> {
    let r = check_power_of_two(d)? as usize;
    closed_form(d, EncodingKind::BinaryReflectedGray, unit_normals(r))
}

/// Zig-zag-encoded annulus: unit-normal row pairs plus one pair per
/// coordinate pair `k < ℓ` with normal `2^{−ℓ}e^k − 2^{−k}e^ℓ`.
pub fn annulus_zigzag_formulation(d: usize) -> Result<Formulation> {
    let r = check_power_of_two(d)? as usize;
    let mut normals = unit_normals(r);
    for k in 1..=r {
        for l in k + 1..=r {
            let mut b = vec![Rational::zero(); r];
            b[k - 1] = Rational::new(BigInt::one(), BigInt::one() << l);
            b[l - 1] = -Rational::new(BigInt::one(), BigInt::one() << k);
            normals.push(b);
        }
    }
    closed_form(d, EncodingKind::ZigZag, normals)
}

/// Closed form for `kind` together with the vertex recovery map.
pub fn annulus_formulation(spec: &AnnulusSpec, kind: EncodingKind) -> Result<(Formulation, RecoveryMap)> {
    let f = match kind {
        EncodingKind::BinaryReflectedGray => annulus_gray_formulation(spec.d)?,
        EncodingKind::ZigZag => annulus_zigzag_formulation(spec.d)?,
        EncodingKind::Explicit => {
            return Err(Error::InvalidEncoding("annulus formulations take gray or zigzag".into()))
        }
    };
    let points = annulus_vertices(spec)?;
    Ok((f, RecoveryMap::Annulus { points }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdc::{difference_directions, hyperplane_formulation, intersection_digraph};
    use crate::verify::check_ideal;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn one_based(c: &Cdc, i: usize) -> Vec<usize> {
        let mut t: Vec<usize> = c.alternatives()[i].iter().map(|v| v + 1).collect();
        t.sort();
        t
    }

    #[test]
    fn spec_validation() {
        assert!(AnnulusSpec::new(2.0, 3.0, 8).is_ok());
        assert!(AnnulusSpec::new(-1.0, 3.0, 8).is_err());
        assert!(AnnulusSpec::new(3.0, 2.0, 8).is_err());
        assert_eq!(AnnulusSpec::new(1.0, 2.0, 6), Err(Error::NotPowerOfTwo(6)));
        assert!(AnnulusSpec::new(0.0, 2.0, 8).unwrap().is_degenerate());
    }

    #[test]
    fn cdc_windows() {
        let c = annulus_cdc(8).unwrap();
        assert_eq!(c.n(), 16);
        assert_eq!(one_based(&c, 0), vec![1, 2, 15, 16]);
        assert_eq!(one_based(&c, 1), vec![1, 2, 3, 4]);
        assert_eq!(one_based(&annulus_cdc(4).unwrap(), 0), vec![1, 2, 7, 8]);
        assert_eq!(annulus_cdc(12), Err(Error::NotPowerOfTwo(12)));
    }

    #[test]
    fn vertex_coordinates() {
        let v = annulus_vertices(&AnnulusSpec::new(2.0, 3.0, 8).unwrap()).unwrap();
        assert_eq!(v.len(), 16);
        let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9;
        assert!(close(v[0], (2f64.sqrt(), 2f64.sqrt())));
        assert!(close(v[1], (2.296100594190539, 2.2961005941905386)));
        assert!(close(v[15], (3.2471766008771823, 0.0)));
        assert!(close(v[14], (2.0, 0.0)));
        assert_eq!(annulus_vertices(&AnnulusSpec::new(1.0, 1.0, 4).unwrap()), Err(Error::DegenerateSecant { d: 4 }));
        let collapsed = annulus_vertices(&AnnulusSpec::new(0.0, 1.0, 8).unwrap()).unwrap();
        assert!(collapsed.iter().step_by(2).all(|&p| p == (0.0, 0.0)));
    }

    #[test]
    fn outer_vertices_cover_the_outer_arc() {
        // The chord between consecutive outer vertices stays at distance >= U
        // from the origin.
        let spec = AnnulusSpec::new(1.0, 2.5, 16).unwrap();
        let v = annulus_vertices(&spec).unwrap();
        let (a, b) = (v[1], v[3]);
        let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        assert!(((mid.0 * mid.0 + mid.1 * mid.1).sqrt() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn gray_counts() {
        for (d, r) in [(4usize, 2usize), (8, 3), (16, 4)] {
            let f = annulus_gray_formulation(d).unwrap();
            assert_eq!((f.n_lambda, f.r_z, f.general_inequality_count()), (2 * d, r, 2 * r));
        }
    }

    #[test]
    fn gray_d4_rows() {
        // K² = 00, 10, 11, 01. Element pairs (1,2), (3,4), (5,6), (7,8)
        // lie in pieces (1,2), (2,3), (3,4), (4,1).
        let f = annulus_gray_formulation(4).unwrap();
        let r = |v: &[i64]| v.iter().map(|&x| Rational::from_integer(x.into())).collect::<Vec<_>>();
        // First coordinate: codes 0,1,1,0.
        let first = f.general_rows.iter().find(|g| g.normal == big(&[1, 0])).unwrap();
        assert_eq!(first.lower, r(&[0, 0, 1, 1, 0, 0, 0, 0]));
        assert_eq!(first.upper, r(&[1, 1, 1, 1, 1, 1, 0, 0]));
        // Second coordinate: codes 0,0,1,1.
        let second = f.general_rows.iter().find(|g| g.normal == big(&[0, 1])).unwrap();
        assert_eq!(second.lower, r(&[0, 0, 0, 0, 1, 1, 0, 0]));
        assert_eq!(second.upper, r(&[0, 0, 1, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn zigzag_counts_and_normals() {
        let f = annulus_zigzag_formulation(4).unwrap();
        assert_eq!(f.gamma(), 3);
        assert!(f.general_rows.iter().any(|g| g.normal == big(&[1, -2])));
        let f = annulus_zigzag_formulation(8).unwrap();
        assert_eq!((f.gamma(), f.general_inequality_count()), (6, 12));
        for n in [[1, -2, 0], [1, 0, -4], [0, 1, -2]] {
            assert!(f.general_rows.iter().any(|g| g.normal == big(&n)));
        }
        let f = annulus_zigzag_formulation(32).unwrap();
        assert_eq!(f.gamma(), 5 + 10);
    }

    #[test]
    fn direction_sets() {
        for d in [8usize, 16] {
            let c = annulus_cdc(d).unwrap();
            let r = d.trailing_zeros() as usize;
            let units: Vec<Vec<BigInt>> =
                (0..r).map(|k| (0..r).map(|j| BigInt::from((j == k) as i64)).collect()).collect();
            let e = make_encoding(d, EncodingKind::BinaryReflectedGray).unwrap();
            let mut got = difference_directions(&intersection_digraph(&c), &e).unwrap().deduped;
            got.sort();
            let mut want = units.clone();
            want.sort();
            assert_eq!(got, want);

            let e = make_encoding(d, EncodingKind::ZigZag).unwrap();
            let mut got = difference_directions(&intersection_digraph(&c), &e).unwrap().deduped;
            got.sort();
            let mut want = units;
            want.push((0..r).map(|k| BigInt::one() << (r - 1 - k)).collect());
            want.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn closed_forms_match_general_pipeline() {
        for d in [4usize, 8, 16, 32] {
            let c = annulus_cdc(d).unwrap();
            for (kind, closed) in [
                (EncodingKind::BinaryReflectedGray, annulus_gray_formulation(d).unwrap()),
                (EncodingKind::ZigZag, annulus_zigzag_formulation(d).unwrap()),
            ] {
                let e = make_encoding(d, kind).unwrap();
                let general = hyperplane_formulation(&c, &e, &Default::default()).unwrap();
                assert_eq!(closed.general_rows, general.general_rows, "d = {d}, {kind}");
                assert_eq!(closed.equalities, general.equalities);
                assert_eq!(closed.z_bounds, general.z_bounds);
            }
        }
    }

    #[test]
    fn small_instances_are_ideal() {
        for d in [4usize, 8] {
            let c = annulus_cdc(d).unwrap();
            for (kind, f) in [
                (EncodingKind::BinaryReflectedGray, annulus_gray_formulation(d).unwrap()),
                (EncodingKind::ZigZag, annulus_zigzag_formulation(d).unwrap()),
            ] {
                let e = make_encoding(d, kind).unwrap();
                let report = check_ideal(&c, &e, &f, &Default::default()).unwrap();
                assert!(report.passed, "d = {d}, {kind}: {report:?}");
                assert_eq!(report.found, 4 * d);
            }
        }
    }
}
