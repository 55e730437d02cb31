//! Epigraphs of univariate piecewise linear functions, possibly discontinuous.
//!
//! Segment `i` joins `(t_i, a_i t_i + b_i)` and `(t_{i+1}, a_i t_{i+1} + b_i)`.
//! Segment endpoints that coincide at a breakpoint share one `λ`; at a jump
//! the left value gets its own index ahead of the right value.

use num_traits::{One, Zero};

use super::RecoveryMap;
use crate::cdc::{base_equalities, hyperplane_formulation, Cdc, FormulationOptions};
use crate::encoding::{make_encoding, EncodingKind};
use crate::error::{Error, Result};
use crate::formulation::{Formulation, GeneralRow, PipelinePath, Provenance};
use crate::linalg::Rational;

use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PwlFunction {
    breakpoints: Vec<Rational>,
    slopes: Vec<Rational>,
    intercepts: Vec<Rational>,
}

impl PwlFunction {
    pub fn new(breakpoints: Vec<Rational>, slopes: Vec<Rational>, intercepts: Vec<Rational>) -> Result<Self> {
        let d = slopes.len();
        if d < 2 {
            return Err(Error::InvalidPwl(format!("need at least 2 pieces, got {d}")));
        }
        if intercepts.len() != d {
            return Err(Error::InvalidPwl(format!("{d} slopes but {} intercepts", intercepts.len())));
        }
        if breakpoints.len() != d + 1 {
            return Err(Error::InvalidPwl(format!("{d} pieces need {} breakpoints, got {}", d + 1, breakpoints.len())));
        }
        if let Some(i) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPwl(format!(
                "breakpoints must be strictly increasing (t_{} = {} >= t_{} = {})",
                i + 1,
                breakpoints[i],
                i + 2,
                breakpoints[i + 1]
            )));
        }
        Ok(Self { breakpoints, slopes, intercepts })
    }

    /// Number of pieces.
    pub fn d(&self) -> usize {
        self.slopes.len()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[Rational] {
        &self.intercepts
    }

    /// Value of piece `i` (zero-based) at `x`.
    pub fn piece_value(&self, i: usize, x: &Rational) -> Rational {
        &self.slopes[i] * x + &self.intercepts[i]
    }

    /// Whether the pieces meeting at breakpoint `j` (zero-based, interior)
    /// agree there.
    pub fn continuous_at(&self, j: usize) -> bool {
        let t = &self.breakpoints[j];
        self.piece_value(j - 1, t) == self.piece_value(j, t)
    }

    /// Zero-based interior breakpoints where the function jumps.
    pub fn discontinuities(&self) -> Vec<usize> {
        (1..self.d()).filter(|&j| !self.continuous_at(j)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PwlGroundSet {
    pub points: Vec<(Rational, Rational)>,
    pub cdc: Cdc,
    pub kappa: usize,
}

pub fn pwl_ground_set(f: &PwlFunction) -> PwlGroundSet {
    let d = f.d();
    let t = f.breakpoints();
    let mut points = vec![(t[0].clone(), f.piece_value(0, &t[0]))];
    let mut alternatives = Vec::with_capacity(d);
    let mut start = 0;
    let mut kappa = 0;
    for j in 1..=d {
        let left = f.piece_value(j - 1, &t[j]);
        points.push((t[j].clone(), left.clone()));
        let end = points.len() - 1;
        alternatives.push(vec![start, end]);
        start = end;
        if j < d {
            let right = f.piece_value(j, &t[j]);
            if right != left {
                kappa += 1;
                points.push((t[j].clone(), right));
                start = points.len() - 1;
            }
        }
    }
    let cdc = Cdc::new(points.len(), alternatives).expect("segments cover every endpoint");
    PwlGroundSet { points, cdc, kappa }
}

fn power_of_two_exponent(d: usize) -> Option<u32> {
    d.is_power_of_two().then(|| d.trailing_zeros())
}

/// Zero-based breakpoint ranges `[d/4, d/2]` and `[d/2, 3d/4]`.
fn quarter_intervals(d: usize) -> [(usize, usize); 2] {
    [(d / 4, d / 2), (d / 2, 3 * d / 4)]
}

/// `d = 2^r` with `r >= 2` and no jump on one of the two quarter intervals.
pub fn pwl_closed_form_applicable(f: &PwlFunction) -> bool {
    let d = f.d();
    match power_of_two_exponent(d) {
        Some(r) if r >= 2 => quarter_intervals(d).iter().any(|&(lo, hi)| (lo..=hi).all(|j| f.continuous_at(j))),
        _ => false,
    }
}

fn closed_form(f: &PwlFunction, g: &PwlGroundSet, kind: EncodingKind) -> Result<Formulation> {
    let d = f.d();
    let e = make_encoding(d, kind)?;
    let r = e.r();
    // Segments (zero-based) touching each ground point, with codes clamped
    // at both ends.
    let mut touching: Vec<(usize, usize)> = vec![(0, 0)];
    for j in 1..d {
        if f.continuous_at(j) {
            touching.push((j - 1, j));
        } else {
            touching.push((j - 1, j - 1));
            touching.push((j, j));
        }
    }
    touching.push((d - 1, d - 1));
    debug_assert_eq!(touching.len(), g.points.len());

    let mut general_rows = Vec::with_capacity(r);
    for k in 0..r {
        let mut normal = vec![BigInt::zero(); r];
        normal[k] = BigInt::one();
        let (lower, upper) = touching
            .iter()
            .map(|&(s, t)| {
                let (a, b) = (e.row(s)[k], e.row(t)[k]);
                (Rational::from_integer(a.min(b).into()), Rational::from_integer(a.max(b).into()))
            })
            .unzip();
        general_rows.push(GeneralRow { normal, lower, upper });
    }
    let mut out = Formulation {
        n_lambda: g.points.len(),
        r_z: r,
        equalities: base_equalities(g.points.len(), &e)?,
        general_rows,
        z_bounds: e.coordinate_ranges(),
        provenance: Provenance {
            path: PipelinePath::ClosedForm,
            encoding: kind,
            kappa: Some(g.kappa),
            connected: None,
        },
    };
    out.sort_rows();
    Ok(out)
}

/// Ideal formulation of the epigraph over `(λ, z)`.
///
/// Uses unit normals directly when a quarter interval is jump-free and
/// `d = 2^r`, otherwise the general spanning-hyperplane construction.
pub fn pwl_formulation(f: &PwlFunction, kind: EncodingKind) -> Result<(Formulation, RecoveryMap)> {
    if kind == EncodingKind::Explicit {
        return Err(Error::InvalidEncoding("piecewise linear formulations take gray or zigzag".into()));
    }
    let g = pwl_ground_set(f);
    let map = RecoveryMap::Pwl { points: g.points.clone(), epigraph: true };
    if pwl_closed_form_applicable(f) {
        return Ok((closed_form(f, &g, kind)?, map));
    }
    let e = make_encoding(f.d(), kind)?;
    match hyperplane_formulation(&g.cdc, &e, &FormulationOptions::default()) {
        Ok(mut out) => {
            out.provenance.kappa = Some(g.kappa);
            Ok((out, map))
        }
        Err(Error::DimensionDeficit { rank, hull_dim, connected, .. }) => {
            let jumps: Vec<String> = f.discontinuities().iter().map(|j| format!("t_{}", j + 1)).collect();
            let mut detail = format!("jumps at {}", jumps.join(", "));
            if power_of_two_exponent(f.d()).is_some_and(|r| r >= 2) {
                let [(a, b), (c, e)] = quarter_intervals(f.d());
                detail.push_str(&format!(
                    "; neither [t_{}, t_{}] nor [t_{}, t_{}] is jump-free",
                    a + 1,
                    b + 1,
                    c + 1,
                    e + 1
                ));
            }
            Err(Error::DimensionDeficit { rank, hull_dim, connected, detail })
        }
        Err(other) => Err(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::verify::check_ideal;
    use proptest::prelude::*;

    /// Pieces on breakpoints `0..=d`, each given as `(slope, intercept)`.
    fn pwl(pieces: &[(i64, i64)]) -> PwlFunction {
        PwlFunction::new(
            (0..=pieces.len() as i64).map(rat).collect(),
            pieces.iter().map(|p| rat(p.0)).collect(),
            pieces.iter().map(|p| rat(p.1)).collect(),
        )
        .unwrap()
    }

    /// Continuous zig-zag: slopes alternate +1 / −1.
    fn continuous(d: usize) -> PwlFunction {
        let pieces: Vec<(i64, i64)> = (0..d as i64).map(|i| if i % 2 == 0 { (1, -i) } else { (-1, i + 1) }).collect();
        pwl(&pieces)
    }

    /// `continuous(d)` with the value after breakpoint `j` (one-based) shifted up by 10.
    fn with_jumps(d: usize, jumps: &[usize]) -> PwlFunction {
        let base = continuous(d);
        let mut shift = 0;
        let pieces: Vec<(i64, i64)> = (0..d)
            .map(|i| {
                if jumps.contains(&(i + 1)) {
                    shift += 10;
                }
                let a = base.slopes()[i].to_integer().try_into().unwrap();
                let b: i64 = base.intercepts()[i].to_integer().try_into().unwrap();
                (a, b + shift)
            })
            .collect();
        pwl(&pieces)
    }

    fn one_based(g: &PwlGroundSet) -> Vec<Vec<usize>> {
        g.cdc.alternatives().iter().map(|t| t.iter().map(|v| v + 1).collect()).collect()
    }

    #[test]
    fn validation() {
        assert!(PwlFunction::new(vec![rat(0), rat(1)], vec![rat(1)], vec![rat(0)]).is_err());
        assert!(PwlFunction::new(vec![rat(0), rat(2), rat(1)], vec![rat(1); 2], vec![rat(0); 2]).is_err());
        assert!(PwlFunction::new(vec![rat(0), rat(1), rat(2)], vec![rat(1); 2], vec![rat(0)]).is_err());
    }

    #[test]
    fn ground_set_examples() {
        let g = pwl_ground_set(&continuous(4));
        assert_eq!((g.kappa, g.points.len()), (0, 5));
        assert_eq!(one_based(&g), vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5]]);

        let g = pwl_ground_set(&with_jumps(4, &[3]));
        assert_eq!((g.kappa, g.points.len()), (1, 6));
        assert_eq!(one_based(&g), vec![vec![1, 2], vec![2, 3], vec![4, 5], vec![5, 6]]);
        // Left value comes first.
        assert!(g.points[2].1 < g.points[3].1);
        assert_eq!(g.points[2].0, g.points[3].0);

        let g = pwl_ground_set(&with_jumps(2, &[2]));
        assert_eq!((g.kappa, g.points.len()), (1, 4));
        assert_eq!(one_based(&g), vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn tent_function_is_continuous() {
        let f = PwlFunction::new(vec![rat(0), rat(1), rat(2)], vec![rat(1), rat(-1)], vec![rat(0), rat(2)]).unwrap();
        assert_eq!(pwl_ground_set(&f).kappa, 0);
    }

    #[test]
    fn applicability_examples() {
        assert!(pwl_closed_form_applicable(&with_jumps(4, &[4])));
        assert!(!pwl_closed_form_applicable(&with_jumps(4, &[2, 3])));
        assert!(!pwl_closed_form_applicable(&continuous(2)));
        assert!(!pwl_closed_form_applicable(&continuous(3)));
        // d = 8: [t_3, t_5] and [t_5, t_7].
        assert!(pwl_closed_form_applicable(&with_jumps(8, &[2, 6, 7, 8])));
        assert!(!pwl_closed_form_applicable(&with_jumps(8, &[3, 6])));
        assert!(!pwl_closed_form_applicable(&with_jumps(8, &[5])));
    }

    #[test]
    fn continuous_d4_matches_sos2() {
        let (f, map) = pwl_formulation(&continuous(4), EncodingKind::BinaryReflectedGray).unwrap();
        let sos2 = Cdc::from_one_based(&[vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5]]).unwrap();
        let e = make_encoding(4, EncodingKind::BinaryReflectedGray).unwrap();
        let general = hyperplane_formulation(&sos2, &e, &Default::default()).unwrap();
        assert_eq!(f.general_rows, general.general_rows);
        assert_eq!(f.equalities, general.equalities);
        assert_eq!(f.provenance.path, PipelinePath::ClosedForm);
        assert_eq!(map.len(), 5);
    }

    #[test]
    fn jump_at_last_interior_breakpoint() {
        let p = with_jumps(4, &[4]);
        let (f, map) = pwl_formulation(&p, EncodingKind::BinaryReflectedGray).unwrap();
        assert_eq!((f.n_lambda, f.r_z, f.general_inequality_count()), (6, 2, 4));
        assert_eq!(f.provenance.kappa, Some(1));
        assert_eq!(map.len(), 6);
        let g = pwl_ground_set(&p);
        let e = make_encoding(4, EncodingKind::BinaryReflectedGray).unwrap();
        assert!(check_ideal(&g.cdc, &e, &f, &Default::default()).unwrap().passed);
    }

    #[test]
    fn closed_form_matches_general_pipeline() {
        for kind in [EncodingKind::BinaryReflectedGray, EncodingKind::ZigZag] {
            for p in [continuous(8), with_jumps(8, &[2, 8]), with_jumps(16, &[2, 3, 14])] {
                let (f, _) = pwl_formulation(&p, kind).unwrap();
                let g = pwl_ground_set(&p);
                let e = make_encoding(p.d(), kind).unwrap();
                let general = hyperplane_formulation(&g.cdc, &e, &Default::default()).unwrap();
                assert_eq!(f.general_rows, general.general_rows);
                assert_eq!(f.equalities, general.equalities);
                assert_eq!(f.z_bounds, general.z_bounds);
            }
        }
    }

    #[test]
    fn general_path_and_refusal() {
        // d = 3 is not a power of two: general path, continuous, fine.
        let (f, _) = pwl_formulation(&continuous(3), EncodingKind::BinaryReflectedGray).unwrap();
        assert_eq!(f.provenance.path, PipelinePath::General);
        assert_eq!(f.provenance.kappa, Some(0));

        // Gray steps for d = 4 are e^2, e^1, e^2; jumps at t_2 and t_3 leave
        // only the last one.
        match pwl_formulation(&with_jumps(4, &[2, 3]), EncodingKind::BinaryReflectedGray) {
            Err(Error::DimensionDeficit { rank, hull_dim, detail, connected }) => {
                assert_eq!((rank, hull_dim), (1, 2));
                assert!(!connected);
                assert!(detail.contains("jumps at t_2, t_3"), "{detail}");
                assert!(detail.contains("[t_2, t_3]"), "{detail}");
            }
            other => panic!("expected a dimension deficit, got {other:?}"),
        }
        assert!(pwl_formulation(&continuous(4), EncodingKind::Explicit).is_err());
    }

    #[test]
    fn general_path_when_quarters_jump_but_span_is_full() {
        // Gray steps for d = 8 are e^3 e^2 e^3 e^1 e^3 e^2 e^3. Jumps at t_3
        // and t_6 drop one e^2 and one e^3 step and keep a full span.
        let p = with_jumps(8, &[3, 6]);
        assert!(!pwl_closed_form_applicable(&p));
        let (f, _) = pwl_formulation(&p, EncodingKind::BinaryReflectedGray).unwrap();
        assert_eq!(f.provenance.path, PipelinePath::General);
        let g = pwl_ground_set(&p);
        let e = make_encoding(8, EncodingKind::BinaryReflectedGray).unwrap();
        assert!(check_ideal(&g.cdc, &e, &f, &Default::default()).unwrap().passed);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ground_set_counts_jumps(pieces in proptest::collection::vec((-3i64..=3, -3i64..=3), 2..=8)) {
            let f = pwl(&pieces);
            let g = pwl_ground_set(&f);
            prop_assert_eq!(g.kappa, f.discontinuities().len());
            prop_assert_eq!(g.points.len(), f.d() + 1 + g.kappa);
            prop_assert_eq!(g.cdc.d(), f.d());
            for (i, t) in g.cdc.alternatives().iter().enumerate() {
                let (a, b) = (&g.points[t[0]], &g.points[t[1]]);
                prop_assert_eq!(&a.1, &f.piece_value(i, &a.0));
                prop_assert_eq!(&b.1, &f.piece_value(i, &b.0));
            }
        }
    }
}
