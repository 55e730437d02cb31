//! Combinatorial disjunctive constraints and the spanning-hyperplane formulation.
//!
//! Given alternatives `T^1..T^d` over a ground set `{1..n}` and an encoding
//! `h^1..h^d`, the construction is:
//!
//! 1. the intersection digraph: arcs `(i, j)`, `i < j`, with `T^i ∩ T^j ≠ ∅`;
//! 2. difference directions `h^j − h^i` over those arcs, spanning a space `L`;
//! 3. every hyperplane of `L` spanned by a subset of the directions, given by
//!    a normal `b^k` lying in `L`;
//! 4. for each normal, the paired row
//!    `Σ_v min_{s: v ∈ T^s} (b^k·h^s) λ_v <= b^k·z <= Σ_v max_{s: v ∈ T^s} (b^k·h^s) λ_v`,
//!    plus `λ` in the simplex and `z` in the affine hull of the codes.
//!
//! The resulting system describes the convex hull of the embedding exactly
//! whenever `dim span(directions) = dim aff(codes)`, and it is ideal when the
//! codes are in convex position and hole-free.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::encoding::{check_gates, Encoding, DEFAULT_HOLE_CHECK_CAP};
use crate::error::{Error, Result};
use crate::formulation::{Formulation, GeneralRow, LinearEquality, PipelinePath, Provenance};
use crate::linalg::{
    affine_hull, int_vector_to_rational, orthogonal_in_subspace, primitive_canonical, rank, Rational, RationalMatrix,
    RationalVector,
};

/// Default cap on distinct directions fed to hyperplane enumeration.
pub const DEFAULT_MAX_DIRECTIONS: usize = 20;

/// Alternatives `T^1..T^d` over the ground set `{0..n}` (zero-based internally).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cdc {
    n: usize,
    alternatives: Vec<Vec<usize>>,
}

impl Cdc {
    /// Alternatives are zero-based here; each is sorted and deduplicated.
    pub fn new(n: usize, alternatives: Vec<Vec<usize>>) -> Result<Self> {
        if alternatives.len() < 2 {
            return Err(Error::TooFewAlternatives(alternatives.len()));
        }
        let mut covered = vec![false; n];
        let mut cleaned = Vec::with_capacity(alternatives.len());
        for (i, mut t) in alternatives.into_iter().enumerate() {
            if t.is_empty() {
                return Err(Error::InvalidCdc(format!("alternative {} is empty", i + 1)));
            }
            t.sort_unstable();
            t.dedup();
            for &v in &t {
                if v >= n {
                    return Err(Error::InvalidCdc(format!(
                        "alternative {} mentions ground element {} outside 1..={n}",
                        i + 1,
                        v + 1
                    )));
                }
                covered[v] = true;
            }
            cleaned.push(t);
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidCdc(format!("ground element {} uncovered", v + 1)));
        }
        Ok(Self { n, alternatives: cleaned })
    }

    /// Builds from one-based alternatives, taking `n` as the largest element.
    pub fn from_one_based(alternatives: &[Vec<usize>]) -> Result<Self> {
        if alternatives.iter().flatten().any(|&v| v == 0) {
            return Err(Error::InvalidCdc("ground elements are numbered from 1".into()));
        }
        let n = alternatives.iter().flatten().copied().max().unwrap_or(0);
        Self::new(n, alternatives.iter().map(|t| t.iter().map(|v| v - 1).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.alternatives.len()
    }

    pub fn alternatives(&self) -> &[Vec<usize>] {
        &self.alternatives
    }

    /// Alternatives containing ground element `v`.
    pub fn containing(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.alternatives.iter().enumerate().filter(move |(_, t)| t.binary_search(&v).is_ok()).map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionDigraph {
    pub d: usize,
    /// Zero-based `(i, j)` with `i < j`, in lexicographic order.
    pub arcs: Vec<(usize, usize)>,
}

pub fn intersection_digraph(cdc: &Cdc) -> IntersectionDigraph {
    let alts = cdc.alternatives();
    let arcs = (0..alts.len()).tuple_combinations().filter(|&(i, j)| sorted_intersect(&alts[i], &alts[j])).collect();
    IntersectionDigraph { d: alts.len(), arcs }
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Connectivity of the underlying undirected graph.
pub fn is_weakly_connected(g: &IntersectionDigraph) -> bool {
    if g.d == 0 {
        return true;
    }
    let mut parent: Vec<usize> = (0..g.d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = g.d;
    for &(i, j) in &g.arcs {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components == 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceDirections {
    /// `h^j − h^i` for every arc, in arc order.
    pub raw: Vec<((usize, usize), Vec<i64>)>,
    /// Primitive canonical representatives, pairwise non-parallel, in order of first appearance.
    pub deduped: Vec<Vec<BigInt>>,
    pub dim: usize,
}

impl DifferenceDirections {
    /// Directions labelled by the arcs they come from. Zero vectors are rejected.
    pub fn from_arcs(raw: Vec<((usize, usize), Vec<i64>)>, dim: usize) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut deduped = Vec::new();
        for (_, v) in &raw {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            let c = primitive_canonical(&crate::linalg::i64_vector_to_rational(v))?;
            if seen.insert(c.clone()) {
                deduped.push(c);
            }
        }
        Ok(Self { raw, deduped, dim })
    }

    /// Unlabelled directions, as when studying an arrangement on its own.
    pub fn from_vectors(vectors: Vec<Vec<i64>>, dim: usize) -> Result<Self> {
        Self::from_arcs(vectors.into_iter().enumerate().map(|(i, v)| ((i, i), v)).collect(), dim)
    }

    pub fn raw_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_i64_rows(self.dim, &self.raw.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>())
            .expect("directions share the code dimension")
    }

    pub fn deduped_matrix(&self) -> RationalMatrix {
        deduped_to_matrix(&self.deduped, self.dim)
    }
}

fn deduped_to_matrix(vs: &[Vec<BigInt>], dim: usize) -> RationalMatrix {
    RationalMatrix::from_rows(dim, vs.iter().map(|v| int_vector_to_rational(v)).collect())
        .expect("directions share the code dimension")
}

pub fn difference_directions(g: &IntersectionDigraph, e: &Encoding) -> Result<DifferenceDirections> {
    if g.d != e.d() {
        return Err(Error::DimensionMismatch { expected: e.d(), found: g.d });
    }
    let raw: Vec<((usize, usize), Vec<i64>)> =
        g.arcs.iter().map(|&(i, j)| ((i, j), e.row(j).iter().zip(e.row(i)).map(|(a, b)| a - b).collect())).collect();
    DifferenceDirections::from_arcs(raw, e.r())
}

/// `(rank of the directions, dim aff(codes))`.
pub fn dimension_report(c: &DifferenceDirections, e: &Encoding) -> Result<(usize, usize)> {
    let hull = affine_hull(&e.rational_rows())?;
    Ok((rank(&c.raw_matrix()), hull.dim()))
}

/// `dim span(directions) == dim aff(codes)`.
pub fn check_dim_condition(c: &DifferenceDirections, e: &Encoding) -> bool {
    dimension_report(c, e).map(|(r, h)| r == h).unwrap_or(false)
}

/// Normals of every hyperplane of `L = span(directions)` spanned by a subset
/// of the directions, sorted lexicographically.
///
/// With `m = dim L`, every `(m−1)`-subset of the deduplicated directions is
/// tried; those of rank `m−1` span a hyperplane whose normal (taken inside
/// `L`) is kept. For `m = 1` the empty subset spans `{0}` and the normal is
/// the line's own direction.
pub fn spanned_hyperplane_normals(c: &DifferenceDirections, max_directions: usize) -> Result<Vec<Vec<BigInt>>> {
    if c.deduped.is_empty() {
        return Err(Error::NoDirections);
    }
    if c.deduped.len() > max_directions {
        return Err(Error::TooManyDirections { count: c.deduped.len(), cap: max_directions });
    }
    let all = c.deduped_matrix();
    let (basis, _) = all.rref();
    let m = basis.nrows();
    let mut normals = BTreeSet::new();
    for subset in (0..c.deduped.len()).combinations(m - 1) {
        let rows: Vec<RationalVector> = subset.iter().map(|&i| all.row(i).to_vec()).collect();
        let sub = RationalMatrix::from_rows(c.dim, rows)?;
        if rank(&sub) != m - 1 {
            continue;
        }
        let b = orthogonal_in_subspace(&basis, &sub)?;
        normals.insert(primitive_canonical(&b)?);
    }
    Ok(normals.into_iter().collect())
}

/// The paired row for normal `b`: per ground element, min and max of `b·h^s`
/// over the alternatives containing it.
pub fn general_row(cdc: &Cdc, e: &Encoding, normal: Vec<BigInt>) -> GeneralRow {
    let values: Vec<BigInt> =
        e.rows().iter().map(|h| h.iter().zip(&normal).map(|(x, b)| b * BigInt::from(*x)).sum()).collect();
    let (lower, upper) = (0..cdc.n())
        .map(|v| {
            let (lo, hi) =
                cdc.containing(v).map(|s| &values[s]).minmax().into_option().expect("every ground element is covered");
            (Rational::from_integer(lo.clone()), Rational::from_integer(hi.clone()))
        })
        .unzip();
    GeneralRow { normal, lower, upper }
}

/// `Σ λ = 1` followed by the affine hull equations of the codes applied to `z`.
pub fn base_equalities(n: usize, e: &Encoding) -> Result<Vec<LinearEquality>> {
    let r = e.r();
    let mut simplex = vec![Rational::one(); n];
    simplex.extend(std::iter::repeat_n(Rational::zero(), r));
    let mut eqs = vec![LinearEquality { coeffs: simplex, rhs: Rational::one() }];
    let hull = affine_hull(&e.rational_rows())?;
    for (a, b) in hull.eq_lhs.rows().iter().zip(&hull.eq_rhs) {
        let mut coeffs = vec![Rational::zero(); n];
        coeffs.extend(a.iter().cloned());
        eqs.push(LinearEquality { coeffs, rhs: b.clone() });
    }
    Ok(eqs)
}

#[derive(Debug, Clone, Copy)]
pub struct FormulationOptions {
    pub hole_check_cap: u128,
    pub max_directions: usize,
}

impl Default for FormulationOptions {
    fn default() -> Self {
        Self { hole_check_cap: DEFAULT_HOLE_CHECK_CAP, max_directions: DEFAULT_MAX_DIRECTIONS }
    }
}

/// Builds the spanning-hyperplane formulation for `cdc` under encoding `e`.
///
/// Refuses to emit when the encoding fails its gates or when the dimension
/// condition does not hold.
pub fn hyperplane_formulation(cdc: &Cdc, e: &Encoding, opts: &FormulationOptions) -> Result<Formulation> {
    if cdc.d() != e.d() {
        return Err(Error::InvalidCdc(format!("{} alternatives but the encoding has {} codes", cdc.d(), e.d())));
    }
    check_gates(e, opts.hole_check_cap)?;
    let g = intersection_digraph(cdc);
    let connected = is_weakly_connected(&g);
    let dirs = difference_directions(&g, e)?;
    let (rank, hull_dim) = dimension_report(&dirs, e)?;
    if rank != hull_dim {
        return Err(Error::DimensionDeficit { rank, hull_dim, connected, detail: String::new() });
    }
    let normals = spanned_hyperplane_normals(&dirs, opts.max_directions)?;
    let general_rows = normals.into_iter().map(|b| general_row(cdc, e, b)).collect();
    Ok(Formulation {
        n_lambda: cdc.n(),
        r_z: e.r(),
        equalities: base_equalities(cdc.n(), e)?,
        general_rows,
        z_bounds: e.coordinate_ranges(),
        provenance: Provenance {
            path: PipelinePath::General,
            encoding: e.kind(),
            kappa: None,
            connected: Some(connected),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{make_encoding, EncodingKind};
    use crate::linalg::rat;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn sos2(d: usize) -> Cdc {
        Cdc::from_one_based(&(1..=d).map(|i| vec![i, i + 1]).collect::<Vec<_>>()).unwrap()
    }

    fn annulus4() -> Cdc {
        // T^i = {2i−3, .., 2i} mod 8
        Cdc::from_one_based(&[vec![7, 8, 1, 2], vec![1, 2, 3, 4], vec![3, 4, 5, 6], vec![5, 6, 7, 8]]).unwrap()
    }

    #[test]
    fn cdc_validation() {
        assert!(matches!(
            Cdc::new(3, vec![vec![0], vec![2]]),
            Err(Error::InvalidCdc(msg)) if msg.contains("ground element 2 uncovered")
        ));
        assert!(Cdc::new(2, vec![vec![0, 1]]).is_err());
        assert!(Cdc::new(2, vec![vec![0], vec![]]).is_err());
        assert_eq!(Cdc::from_one_based(&[vec![1, 2], vec![2, 3]]).unwrap().n(), 3);
    }

    #[test]
    fn digraph_examples() {
        assert_eq!(intersection_digraph(&sos2(4)).arcs, vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(intersection_digraph(&annulus4()).arcs, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        let apart = Cdc::from_one_based(&[vec![1], vec![2]]).unwrap();
        assert!(intersection_digraph(&apart).arcs.is_empty());
    }

    #[test]
    fn connectivity_examples() {
        let g = |d, arcs: &[(usize, usize)]| IntersectionDigraph { d, arcs: arcs.to_vec() };
        assert!(is_weakly_connected(&g(4, &[(0, 1), (1, 2), (2, 3)])));
        assert!(!is_weakly_connected(&g(2, &[])));
        assert!(!is_weakly_connected(&g(4, &[(0, 1), (2, 3)])));
    }

    #[test]
    fn direction_examples() {
        let gray = make_encoding(4, EncodingKind::BinaryReflectedGray).unwrap();
        let zz = make_encoding(4, EncodingKind::ZigZag).unwrap();

        let c = difference_directions(&intersection_digraph(&sos2(4)), &gray).unwrap();
        let raw: Vec<Vec<i64>> = c.raw.iter().map(|(_, v)| v.clone()).collect();
        assert_eq!(raw, vec![vec![1, 0], vec![0, 1], vec![-1, 0]]);
        assert_eq!(c.deduped, vec![big(&[1, 0]), big(&[0, 1])]);
        assert!(check_dim_condition(&c, &gray));

        let c = difference_directions(&intersection_digraph(&annulus4()), &gray).unwrap();
        let raw: BTreeSet<Vec<i64>> = c.raw.iter().map(|(_, v)| v.clone()).collect();
        assert_eq!(raw, [vec![1, 0], vec![0, 1], vec![-1, 0]].into_iter().collect());
        assert_eq!(c.raw.len(), 4);
        assert_eq!(c.raw[1], ((0, 3), vec![0, 1]));
        assert_eq!(c.deduped.iter().cloned().collect::<BTreeSet<_>>(), [big(&[1, 0]), big(&[0, 1])].into());

        let c = difference_directions(&intersection_digraph(&annulus4()), &zz).unwrap();
        assert_eq!(
            c.deduped.iter().cloned().collect::<BTreeSet<_>>(),
            [big(&[1, 0]), big(&[0, 1]), big(&[2, 1])].into()
        );

        let split = Cdc::from_one_based(&[vec![1, 2], vec![3, 4]]).unwrap();
        let e = make_encoding(2, EncodingKind::BinaryReflectedGray).unwrap();
        let c = difference_directions(&intersection_digraph(&split), &e).unwrap();
        assert!(!check_dim_condition(&c, &e));
    }

    fn dirs(vs: &[&[i64]]) -> DifferenceDirections {
        DifferenceDirections {
            raw: vs.iter().map(|v| ((0, 1), v.to_vec())).collect(),
            deduped: vs.iter().map(|v| big(v)).collect(),
            dim: vs[0].len(),
        }
    }

    #[test]
    fn normal_examples() {
        let n = spanned_hyperplane_normals(&dirs(&[&[1, 0], &[0, 1]]), 20).unwrap();
        assert_eq!(n, vec![big(&[0, 1]), big(&[1, 0])]);
        let n = spanned_hyperplane_normals(&dirs(&[&[1, 0], &[0, 1], &[2, 1]]), 20).unwrap();
        assert_eq!(n, vec![big(&[0, 1]), big(&[1, -2]), big(&[1, 0])]);
        let n = spanned_hyperplane_normals(&dirs(&[&[1, 1]]), 20).unwrap();
        assert_eq!(n, vec![big(&[1, 1])]);
        let empty = DifferenceDirections { raw: vec![], deduped: vec![], dim: 2 };
        assert_eq!(spanned_hyperplane_normals(&empty, 20), Err(Error::NoDirections));
        assert!(matches!(
            spanned_hyperplane_normals(&dirs(&[&[1, 0], &[0, 1], &[2, 1]]), 2),
            Err(Error::TooManyDirections { count: 3, cap: 2 })
        ));
    }

    #[test]
    fn sos2_gray_d4_rows() {
        let f = hyperplane_formulation(
            &sos2(4),
            &make_encoding(4, EncodingKind::BinaryReflectedGray).unwrap(),
            &Default::default(),
        )
        .unwrap();
        let r = |v: &[i64]| v.iter().map(|&x| rat(x)).collect::<Vec<_>>();
        assert_eq!(f.gamma(), 2);
        // sorted: (0,1) then (1,0)
        assert_eq!(f.general_rows[0].normal, big(&[0, 1]));
        assert_eq!(f.general_rows[0].lower, r(&[0, 0, 0, 1, 1]));
        assert_eq!(f.general_rows[0].upper, r(&[0, 0, 1, 1, 1]));
        assert_eq!(f.general_rows[1].normal, big(&[1, 0]));
        assert_eq!(f.general_rows[1].lower, r(&[0, 0, 1, 0, 0]));
        assert_eq!(f.general_rows[1].upper, r(&[0, 1, 1, 1, 0]));
        assert_eq!(f.equalities.len(), 1);
        assert_eq!(f.z_bounds, vec![(0, 1), (0, 1)]);
    }

    #[test]
    fn sos2_d2_single_pair() {
        let f = hyperplane_formulation(&sos2(2), &make_encoding(2, EncodingKind::ZigZag).unwrap(), &Default::default())
            .unwrap();
        assert_eq!(f.gamma(), 1);
        assert_eq!(f.general_rows[0].lower, vec![rat(0), rat(0), rat(1)]);
        assert_eq!(f.general_rows[0].upper, vec![rat(0), rat(1), rat(1)]);
    }

    #[test]
    fn refuses_bad_encodings_and_deficient_dimensions() {
        let holey = Encoding::explicit(vec![vec![0, 0], vec![2, 0], vec![0, 2]]).unwrap();
        let cdc = Cdc::from_one_based(&[vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
        assert!(matches!(
            hyperplane_formulation(&cdc, &holey, &Default::default()),
            Err(Error::EncodingNotIdealizable(_))
        ));
        let split = Cdc::from_one_based(&[vec![1, 2], vec![3, 4]]).unwrap();
        let e = make_encoding(2, EncodingKind::BinaryReflectedGray).unwrap();
        match hyperplane_formulation(&split, &e, &Default::default()) {
            Err(Error::DimensionDeficit { rank: 0, hull_dim: 1, connected: false, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lower_dimensional_encoding_gets_hull_equations() {
        // codes on the plane z3 = 1
        let e = Encoding::explicit(vec![vec![0, 0, 1], vec![1, 0, 1], vec![1, 1, 1]]).unwrap();
        let cdc = Cdc::from_one_based(&[vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
        let f = hyperplane_formulation(&cdc, &e, &Default::default()).unwrap();
        assert_eq!(f.equalities.len(), 2);
        assert_eq!(f.equalities[1].coeffs[4..], [rat(0), rat(0), rat(1)]);
        for row in &f.general_rows {
            assert_eq!(row.normal[2], BigInt::from(0));
        }
    }

    fn random_cdc() -> impl Strategy<Value = Cdc> {
        (2usize..=6, 2usize..=5)
            .prop_flat_map(|(n, d)| proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), d))
            .prop_map(|masks| {
                let n = masks[0].len();
                let mut alts: Vec<Vec<usize>> =
                    masks.iter().map(|m| (0..n).filter(|&v| m[v]).collect::<Vec<_>>()).collect();
                for v in 0..n {
                    if !alts.iter().any(|t| t.contains(&v)) {
                        let i = v % alts.len();
                        alts[i].push(v);
                    }
                }
                for (i, t) in alts.iter_mut().enumerate() {
                    if t.is_empty() {
                        t.push(i % n);
                    }
                }
                Cdc::new(n, alts).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn embedding_points_are_feasible(cdc in random_cdc()) {
            let e = make_encoding(cdc.d(), EncodingKind::BinaryReflectedGray).unwrap();
            let connected = is_weakly_connected(&intersection_digraph(&cdc));
            match hyperplane_formulation(&cdc, &e, &Default::default()) {
                Ok(f) => {
                    prop_assert!(crate::verify::check_validity_only(&cdc, &e, &f));
                    for row in &f.general_rows {
                        prop_assert!(row.lower.iter().zip(&row.upper).all(|(l, u)| l <= u));
                    }
                }
                Err(Error::DimensionDeficit { .. }) => prop_assert!(!connected),
                Err(other) => prop_assert!(false, "unexpected {other:?}"),
            }
        }
    }
}
