//! Chain complexes over `GF(p)` and their homology.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{invalid, Error, Result};
use crate::field::PrimeField;
use crate::matrix::MatrixGF;
use crate::par_map;

/// Degree, rows, cols and entries of one matrix read back from a dump.
type DumpBlock = (i32, usize, usize, Vec<(usize, usize, i64)>);

/// Basis indices chosen in each degree, indexed like
/// [`ChainComplexGF::degrees`].
pub type Selection = Vec<Vec<usize>>;

/// A bounded chain complex `C_min ← … ← C_top` of finite-dimensional
/// `GF(p)` vector spaces.
#[derive(Clone, Debug)]
pub struct ChainComplexGF {
    field: PrimeField,
    min_degree: i32,
    dims: Vec<usize>,
    // boundaries[i]: C_{min+i} → C_{min+i-1}; boundaries[0] has zero rows
    boundaries: Vec<MatrixGF>,
    labels: Vec<Vec<String>>,
}

impl ChainComplexGF {
    /// Assembles a complex from its lowest degree, the boundary maps
    /// `∂_k: C_k → C_{k−1}` for `k = min+1, …` and basis labels per degree.
    pub fn new(
        field: PrimeField,
        min_degree: i32,
        dims: Vec<usize>,
        boundaries_above_min: Vec<MatrixGF>,
        labels: Vec<Vec<String>>,
    ) -> Result<Self> {
        if boundaries_above_min.len() + 1 != dims.len().max(1) || labels.len() != dims.len() {
            return Err(invalid("chain complex shape mismatch"));
        }
        let mut boundaries = Vec::with_capacity(dims.len());
        if !dims.is_empty() {
            boundaries.push(MatrixGF::zeros(field, 0, dims[0]));
        }
        for (i, m) in boundaries_above_min.into_iter().enumerate() {
            if m.cols() != dims[i + 1] || m.rows() != dims[i] {
                return Err(invalid(format!(
                    "boundary in degree {} is {}x{}, expected {}x{}",
                    min_degree + i as i32 + 1,
                    m.rows(),
                    m.cols(),
                    dims[i],
                    dims[i + 1]
                )));
            }
            boundaries.push(m);
        }
        for (l, d) in labels.iter().zip(&dims) {
            if l.len() != *d {
                return Err(invalid("label count does not match chain group dimension"));
            }
        }
        Ok(ChainComplexGF {
            field,
            min_degree,
            dims,
            boundaries,
            labels,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    /// Highest degree with a chain group, or `min_degree − 1` if there are none.
    pub fn top_degree(&self) -> i32 {
        self.min_degree + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> {
        self.min_degree..=self.top_degree()
    }

    fn offset(&self, k: i32) -> Option<usize> {
        let i = k - self.min_degree;
        (i >= 0 && (i as usize) < self.dims.len()).then_some(i as usize)
    }

    pub fn dim(&self, k: i32) -> usize {
        self.offset(k).map_or(0, |i| self.dims[i])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `∂_k: C_k → C_{k−1}`; `None` outside the stored range. The map out of
    /// the lowest degree is a zero matrix with no rows.
    pub fn boundary(&self, k: i32) -> Option<&MatrixGF> {
        self.offset(k).map(|i| &self.boundaries[i])
    }

    pub fn labels(&self, k: i32) -> &[String] {
        self.offset(k).map_or(&[], |i| &self.labels[i])
    }

    pub fn is_augmented(&self) -> bool {
        self.min_degree == -1
    }

    /// Verifies `∂_{k−1} ∘ ∂_k = 0` in every degree.
    pub fn check_boundary_squared(&self) -> Result<()> {
        self.check_boundary_squared_upto(self.top_degree())
    }

    fn check_boundary_squared_upto(&self, max_degree: i32) -> Result<()> {
        let degrees: Vec<i32> = (self.min_degree + 2..=max_degree.min(self.top_degree())).collect();
        let bad = par_map(&degrees, |&k| {
            let prod = self.boundary(k - 1).unwrap().mul(self.boundary(k).unwrap());
            !matches!(prod, Ok(m) if m.is_zero())
        });
        match degrees.iter().zip(bad).find(|(_, b)| *b) {
            Some((k, _)) => Err(Error::Inconsistent(format!(
                "boundary composition is non-zero in degree {k}"
            ))),
            None => Ok(()),
        }
    }

    /// Adds degree −1 with the all-ones augmentation `C_0 → GF(p)`.
    pub fn augment(&self) -> Result<ChainComplexGF> {
        if self.min_degree != 0 {
            return Err(invalid("only complexes starting in degree 0 can be augmented"));
        }
        let f = self.field;
        let n0 = self.dim(0);
        let eps = MatrixGF::from_triplets(f, 1, n0, (0..n0).map(|c| (0, c, 1)))?;
        let mut dims = vec![1];
        dims.extend_from_slice(&self.dims);
        let mut bs = vec![MatrixGF::zeros(f, 0, 1)];
        if !self.dims.is_empty() {
            bs.push(eps);
        }
        bs.extend(self.boundaries.iter().skip(1).cloned());
        let mut labels = vec![vec!["ε".to_string()]];
        labels.extend(self.labels.iter().cloned());
        Ok(ChainComplexGF {
            field: f,
            min_degree: -1,
            dims,
            boundaries: bs,
            labels,
        })
    }

    /// Plain-text dump: for each degree a header `degree K rows R cols C`
    /// followed by one `row col value` triplet per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# p {}", self.field.p()).unwrap();
        for k in self.degrees() {
            let m = self.boundary(k).unwrap();
            writeln!(out, "degree {k} rows {} cols {}", m.rows(), m.cols()).unwrap();
            for (r, c, v) in m.triplets() {
                writeln!(out, "{r} {c} {v}").unwrap();
            }
        }
        out
    }

    /// Parses [`dump`](Self::dump) output. Labels are regenerated as indices.
    pub fn parse_dump(text: &str) -> Result<ChainComplexGF> {
        let mut field = None;
        let mut blocks: Vec<DumpBlock> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<i64> {
                s.parse().map_err(|_| invalid(format!("bad number {s:?} in matrix dump")))
            };
            match parts.as_slice() {
                ["#", "p", p] => field = Some(PrimeField::new(num(p)? as u32)?),
                ["degree", k, "rows", r, "cols", c] => {
                    blocks.push((num(k)? as i32, num(r)? as usize, num(c)? as usize, Vec::new()))
                }
                [r, c, v] => blocks
                    .last_mut()
                    .ok_or_else(|| invalid("triplet before degree header"))?
                    .3
                    .push((num(r)? as usize, num(c)? as usize, num(v)?)),
                _ => return Err(invalid(format!("unrecognised dump line {line:?}"))),
            }
        }
        let field = field.ok_or_else(|| invalid("matrix dump lacks the '# p' line"))?;
        let min = blocks.first().map_or(0, |b| b.0);
        let dims: Vec<usize> = blocks.iter().map(|b| b.2).collect();
        let mut mats = Vec::new();
        for (k, r, c, t) in blocks.into_iter().skip(1) {
            let m = MatrixGF::from_triplets(field, r, c, t)?;
            if k != min + mats.len() as i32 + 1 {
                return Err(invalid("degrees in matrix dump are not consecutive"));
            }
            mats.push(m);
        }
        let labels = dims.iter().map(|d| (0..*d).map(|i| i.to_string()).collect()).collect();
        ChainComplexGF::new(field, min, dims, mats, labels)
    }

    /// Restricts to a subcomplex; `selected` must be closed under the boundary.
    pub fn subcomplex(&self, selected: &Selection) -> Result<ChainComplexGF> {
        self.check_selection(selected)?;
        for (i, k) in self.degrees().enumerate().skip(1) {
            let mut inside = vec![false; self.dims[i - 1]];
            for r in &selected[i - 1] {
                inside[*r] = true;
            }
            let m = self.boundary(k).unwrap();
            for c in &selected[i] {
                if m.column(*c).iter().any(|e| !inside[e.0 as usize]) {
                    return Err(invalid(format!(
                        "selection is not closed under the boundary: cell {} of degree {k}",
                        self.labels[i][*c]
                    )));
                }
            }
        }
        Ok(self.restrict(selected))
    }

    /// Quotient by the complement of `selected`, which must be a subcomplex.
    pub fn relative(&self, selected: &Selection) -> Result<ChainComplexGF> {
        self.check_selection(selected)?;
        for (i, k) in self.degrees().enumerate().skip(1) {
            let mut chosen = vec![false; self.dims[i - 1]];
            for r in &selected[i - 1] {
                chosen[*r] = true;
            }
            let mut chosen_here = vec![false; self.dims[i]];
            for c in &selected[i] {
                chosen_here[*c] = true;
            }
            let m = self.boundary(k).unwrap();
            for c in (0..self.dims[i]).filter(|c| !chosen_here[*c]) {
                if m.column(c).iter().any(|e| chosen[e.0 as usize]) {
                    return Err(invalid(format!(
                        "complement of the selection is not a subcomplex: cell {} of degree {k}",
                        self.labels[i][c]
                    )));
                }
            }
        }
        Ok(self.restrict(selected))
    }

    fn check_selection(&self, selected: &Selection) -> Result<()> {
        if selected.len() != self.dims.len() {
            return Err(invalid("selection must list every degree"));
        }
        for (s, d) in selected.iter().zip(&self.dims) {
            if s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|x| x >= d) {
                return Err(invalid("selection indices must be increasing and in range"));
            }
        }
        Ok(())
    }

    fn restrict(&self, selected: &Selection) -> ChainComplexGF {
        let dims: Vec<usize> = selected.iter().map(Vec::len).collect();
        let boundaries = (0..self.dims.len())
            .map(|i| {
                let rows: &[usize] = if i == 0 { &[] } else { &selected[i - 1] };
                self.boundaries[i].select(rows, &selected[i])
            })
            .collect();
        let labels = selected
            .iter()
            .zip(&self.labels)
            .map(|(s, l)| s.iter().map(|i| l[*i].clone()).collect())
            .collect();
        ChainComplexGF {
            field: self.field,
            min_degree: self.min_degree,
            dims,
            boundaries,
            labels,
        }
    }
}

/// Simplicial chain complex with the alternating-sign boundary on sorted
/// vertices; faces of each dimension in canonical order.
pub fn chain_complex(x: &SimplicialComplex, field: PrimeField, augmented: bool) -> ChainComplexGF {
    let top = x.dim().map_or(0, |d| d + 1);
    let dims: Vec<usize> = (0..top).map(|k| x.count_of_dim(k)).collect();
    let boundaries = (1..top)
        .map(|k| {
            let lower = x.dim_range(k - 1).start;
            let cols = x
                .dim_range(k)
                .map(|id| {
                    let mut col: Vec<(u32, u32)> = x
                        .face_boundary(id)
                        .iter()
                        .map(|&(f, s)| ((f - lower) as u32, field.sign(s)))
                        .collect();
                    col.sort_unstable_by_key(|e| e.0);
                    col
                })
                .collect();
            MatrixGF::from_columns(field, dims[k - 1], cols)
        })
        .collect();
    let labels = (0..top)
        .map(|k| x.faces_of_dim(k).iter().map(|s| s.to_string()).collect())
        .collect();
    let c = ChainComplexGF::new(field, 0, dims, boundaries, labels)
        .expect("simplicial chain complex is well formed");
    if augmented {
        c.augment().expect("degree-0 complex augments")
    } else {
        c
    }
}

/// Betti numbers by degree; reduced when computed on an augmented complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub p: u32,
    pub reduced: bool,
    pub betti: BTreeMap<i32, usize>,
}

impl HomologyProfile {
    pub fn get(&self, k: i32) -> usize {
        self.betti.get(&k).copied().unwrap_or(0)
    }

    /// Betti numbers for degrees `from..=to`, zero outside the computed range.
    pub fn table(&self, from: i32, to: i32) -> Vec<usize> {
        (from..=to).map(|k| self.get(k)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .map(|(k, b)| if k.rem_euclid(2) == 0 { *b as i64 } else { -(*b as i64) })
            .sum()
    }
}

/// Betti numbers `dim C_k − rank ∂_k − rank ∂_{k+1}` in every degree.
/// Fails if the boundary does not square to zero.
pub fn homology_of_chain_complex(c: &ChainComplexGF) -> Result<HomologyProfile> {
    homology_upto(c, c.top_degree())
}

/// Like [`homology_of_chain_complex`] but only for degrees `≤ max_degree`.
pub fn homology_upto(c: &ChainComplexGF, max_degree: i32) -> Result<HomologyProfile> {
    let last = max_degree.min(c.top_degree());
    c.check_boundary_squared_upto(last + 1)?;
    let rank_degrees: Vec<i32> = (c.min_degree() + 1..=(last + 1).min(c.top_degree())).collect();
    let ranks: BTreeMap<i32, usize> = rank_degrees
        .iter()
        .copied()
        .zip(par_map(&rank_degrees, |k| c.boundary(*k).unwrap().rank()))
        .collect();
    let rank = |k: i32| ranks.get(&k).copied().unwrap_or(0);
    let betti = (c.min_degree()..=last)
        .map(|k| (k, c.dim(k) - rank(k) - rank(k + 1)))
        .collect();
    Ok(HomologyProfile {
        p: c.field().p(),
        reduced: c.is_augmented(),
        betti,
    })
}

/// Reduced Betti numbers in degrees −1 through the dimension of `x`.
pub fn reduced_betti(x: &SimplicialComplex, field: PrimeField) -> HomologyProfile {
    homology_of_chain_complex(&chain_complex(x, field, true))
        .expect("simplicial boundary squares to zero")
}

/// Unreduced Betti numbers of `x`.
pub fn betti(x: &SimplicialComplex, field: PrimeField) -> HomologyProfile {
    homology_of_chain_complex(&chain_complex(x, field, false))
        .expect("simplicial boundary squares to zero")
}

/// Why a complex is not `n`-acyclic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcyclicityFailure {
    Empty,
    Degree { degree: i32, betti: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcyclicityVerdict {
    pub acyclic: bool,
    pub failure: Option<AcyclicityFailure>,
}

impl AcyclicityVerdict {
    fn holds() -> Self {
        AcyclicityVerdict {
            acyclic: true,
            failure: None,
        }
    }

    fn fails(f: AcyclicityFailure) -> Self {
        AcyclicityVerdict {
            acyclic: false,
            failure: Some(f),
        }
    }
}

/// `n`-acyclicity of a chain complex starting in degree 0: non-empty, and
/// vanishing reduced homology in degrees `0..=n`. For `n = −1` only
/// non-emptiness is tested; `n < −1` imposes nothing.
pub fn chain_is_n_acyclic(c: &ChainComplexGF, n: i32) -> Result<AcyclicityVerdict> {
    if n < -1 {
        return Ok(AcyclicityVerdict::holds());
    }
    if c.dim(0) == 0 {
        return Ok(AcyclicityVerdict::fails(AcyclicityFailure::Empty));
    }
    if n == -1 {
        return Ok(AcyclicityVerdict::holds());
    }
    let aug = if c.is_augmented() { c.clone() } else { c.augment()? };
    let h = homology_upto(&aug, n)?;
    Ok((0..=n)
        .find(|k| h.get(*k) != 0)
        .map(|k| {
            AcyclicityVerdict::fails(AcyclicityFailure::Degree {
                degree: k,
                betti: h.get(k),
            })
        })
        .unwrap_or_else(AcyclicityVerdict::holds))
}

/// `n`-acyclicity of a simplicial complex (see [`chain_is_n_acyclic`]).
pub fn is_n_acyclic(x: &SimplicialComplex, n: i32, field: PrimeField) -> AcyclicityVerdict {
    chain_is_n_acyclic(&chain_complex(x, field, false), n).expect("simplicial chain complex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Simplex;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn one_vertex_augmented() {
        let x = SimplicialComplex::simplex(0);
        let c = chain_complex(&x, gf(3), true);
        assert_eq!(c.min_degree(), -1);
        assert_eq!(c.dims(), &[1, 1]);
        assert_eq!(c.boundary(0).unwrap().to_dense(), vec![vec![1]]);
        let h = homology_of_chain_complex(&c).unwrap();
        assert!(h.betti.values().all(|b| *b == 0));
    }

    #[test]
    fn empty_complex_augmented() {
        let c = chain_complex(&SimplicialComplex::empty(), gf(2), true);
        assert_eq!(c.dims(), &[1]);
        let h = homology_of_chain_complex(&c).unwrap();
        assert_eq!(h.get(-1), 1);
        assert_eq!(reduced_betti(&SimplicialComplex::empty(), gf(5)).get(-1), 1);
    }

    #[test]
    fn hollow_triangle_mod_two() {
        let c = chain_complex(&SimplicialComplex::boundary_simplex(2), gf(2), false);
        assert_eq!(c.dims(), &[3, 3]);
        assert_eq!(c.boundary(1).unwrap().rank(), 2);
    }

    #[test]
    fn sphere_and_disk() {
        let h = reduced_betti(&SimplicialComplex::boundary_simplex(3), gf(2));
        assert_eq!(h.table(-1, 2), vec![0, 0, 0, 1]);
        for p in [2, 3, 5] {
            let h = reduced_betti(&SimplicialComplex::simplex(2), gf(p));
            assert!(h.betti.values().all(|b| *b == 0));
        }
        let two_points = SimplicialComplex::boundary_simplex(1);
        assert_eq!(reduced_betti(&two_points, gf(7)).get(0), 1);
    }

    #[test]
    fn sphere_table_small() {
        for p in [2, 3] {
            for n in 0..=5usize {
                let h = reduced_betti(&SimplicialComplex::boundary_simplex(n + 1), gf(p));
                for k in -1..=(n as i32 + 1) {
                    assert_eq!(h.get(k), usize::from(k == n as i32), "n={n} k={k} p={p}");
                }
            }
        }
    }

    #[test]
    fn acyclicity_cases() {
        let f = gf(2);
        let v = is_n_acyclic(&SimplicialComplex::empty(), -1, f);
        assert_eq!(v.failure, Some(AcyclicityFailure::Empty));
        assert!(is_n_acyclic(&SimplicialComplex::simplex(0), 100, f).acyclic);
        let s2 = SimplicialComplex::boundary_simplex(3);
        assert!(is_n_acyclic(&s2, 1, f).acyclic);
        let v = is_n_acyclic(&s2, 2, f);
        assert_eq!(v.failure, Some(AcyclicityFailure::Degree { degree: 2, betti: 1 }));
        assert!(is_n_acyclic(&SimplicialComplex::empty(), -2, f).acyclic);
    }

    #[test]
    fn zero_boundaries_give_dimensions() {
        let f = gf(3);
        let c = ChainComplexGF::new(
            f,
            0,
            vec![2, 3],
            vec![MatrixGF::zeros(f, 2, 3)],
            vec![vec!["a".into(), "b".into()], vec!["x".into(), "y".into(), "z".into()]],
        )
        .unwrap();
        let h = homology_of_chain_complex(&c).unwrap();
        assert_eq!(h.table(0, 1), vec![2, 3]);
    }

    #[test]
    fn non_complex_is_rejected() {
        let f = gf(2);
        let one = |r, c| MatrixGF::from_triplets(f, r, c, (0..r.min(c)).map(|i| (i, i, 1))).unwrap();
        let c = ChainComplexGF::new(
            f,
            0,
            vec![1, 1, 1],
            vec![one(1, 1), one(1, 1)],
            vec![vec!["a".into()], vec!["b".into()], vec!["c".into()]],
        )
        .unwrap();
        assert!(matches!(homology_of_chain_complex(&c), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn relative_and_subcomplex() {
        let f = gf(5);
        let c = chain_complex(&SimplicialComplex::simplex(1), f, false);
        // everything
        let all: Selection = vec![vec![0, 1], vec![0]];
        let rel = c.relative(&all).unwrap();
        assert_eq!(rel.dims(), c.dims());
        // nothing
        let none: Selection = vec![vec![], vec![]];
        let rel = c.relative(&none).unwrap();
        assert_eq!(homology_of_chain_complex(&rel).unwrap().betti.values().sum::<usize>(), 0);
        // edge modulo its endpoints
        let pair: Selection = vec![vec![], vec![0]];
        let rel = c.relative(&pair).unwrap();
        let h = homology_of_chain_complex(&rel).unwrap();
        assert_eq!(h.table(0, 1), vec![0, 1]);
        // the edge alone is not a subcomplex, and its vertices are not a quotient
        assert!(c.subcomplex(&pair).is_err());
        assert!(c.relative(&vec![vec![0, 1], vec![]]).is_err());
        assert!(c.subcomplex(&vec![vec![0, 1], vec![]]).is_ok());
    }

    #[test]
    fn dump_round_trip() {
        let c = chain_complex(&SimplicialComplex::boundary_simplex(3), gf(3), true);
        let text = c.dump();
        assert!(text.contains("degree 1 rows 4 cols 6"));
        let back = ChainComplexGF::parse_dump(&text).unwrap();
        assert_eq!(back.dims(), c.dims());
        for k in c.degrees() {
            assert_eq!(back.boundary(k), c.boundary(k));
        }
    }

    #[test]
    fn cone_is_acyclic() {
        let x = SimplicialComplex::from_facets(vec![vec![0, 1], vec![2, 3], vec![4]]).unwrap();
        let c = x.cone(9).unwrap();
        assert!(reduced_betti(&c, gf(2)).betti.values().all(|b| *b == 0));
        assert!(c.contains(&Simplex::new(vec![2, 3, 9]).unwrap()));
    }
}
