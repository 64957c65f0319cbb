//! The deleted product `X^(r)`: the cell complex whose cells are products
//! `σ_1 × … × σ_r` of pairwise disjoint faces, together with its cellular
//! chain complex, the projection to a factor, and the action of `Z_a^m`
//! permuting factors through the left-regular representation.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::ChainComplexGF;
use crate::complex::{FaceTuple, Simplex, SimplicialComplex};
use crate::error::{invalid, Error, Result};
use crate::field::{is_prime, PrimeField};
use crate::matrix::MatrixGF;

/// Default cap on the number of cells built for one deleted product.
pub const DEFAULT_MAX_CELLS: usize = 5_000_000;

/// Factor the projection `X^(r) → X` reads.
pub const PROJECTION_COORDINATE: usize = 0;

/// A product cell `σ_1 × … × σ_r`; serialized as an array of vertex arrays.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Simplex>", into = "Vec<Simplex>")]
pub struct ProductCell {
    factors: FaceTuple,
}

impl ProductCell {
    pub fn new(factors: Vec<Simplex>) -> Result<Self> {
        if factors.is_empty() {
            return Err(invalid("a product cell needs at least one factor"));
        }
        Ok(ProductCell {
            factors: FaceTuple::new(factors)?,
        })
    }

    pub fn factors(&self) -> &[Simplex] {
        self.factors.faces()
    }

    pub fn r(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors.total_dim()
    }

    /// The `coordinate`-th factor.
    pub fn project(&self, coordinate: usize) -> Result<&Simplex> {
        self.factors().get(coordinate).ok_or_else(|| {
            invalid(format!(
                "coordinate {coordinate} out of range for a product of {} factors",
                self.r()
            ))
        })
    }
}

impl fmt::Debug for ProductCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ProductCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.factors().iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<Simplex>> for ProductCell {
    type Error = Error;
    fn try_from(v: Vec<Simplex>) -> Result<Self> {
        ProductCell::new(v)
    }
}

impl From<ProductCell> for Vec<Simplex> {
    fn from(c: ProductCell) -> Self {
        c.factors.into()
    }
}

/// The projection `π` onto the first factor.
pub fn project(cell: &ProductCell, coordinate: usize) -> Result<Simplex> {
    cell.project(coordinate).cloned()
}

/// All ordered `r`-tuples of pairwise disjoint faces of a base complex,
/// grouped by total dimension. Within a dimension, cells are in lexicographic
/// order of their face ids (canonical face order of the base).
#[derive(Clone, Debug)]
pub struct DeletedProductComplex {
    r: usize,
    base: SimplicialComplex,
    cells: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
}

impl DeletedProductComplex {
    pub fn build(base: &SimplicialComplex, r: usize) -> Result<Self> {
        Self::build_capped(base, r, DEFAULT_MAX_CELLS)
    }

    /// Builds `X^(r)`, refusing once more than `max_cells` cells appear.
    pub fn build_capped(base: &SimplicialComplex, r: usize, max_cells: usize) -> Result<Self> {
        if r < 1 {
            return Err(invalid("deleted product needs r >= 1"));
        }
        let mut cells: Vec<Vec<Vec<u32>>> = Vec::new();
        let mut total = 0usize;
        for ids in base.disjoint_tuple_ids(r, None, true) {
            total += 1;
            if total > max_cells {
                return Err(Error::ResourceLimit {
                    what: format!("cells of the {r}-fold deleted product"),
                    limit: max_cells,
                });
            }
            let dim: usize = ids.iter().map(|id| base.face(*id).dim()).sum();
            if cells.len() <= dim {
                cells.resize(dim + 1, Vec::new());
            }
            cells[dim].push(ids.into_iter().map(|i| i as u32).collect());
        }
        let index = cells
            .iter()
            .map(|level| {
                level
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.clone(), i as u32))
                    .collect()
            })
            .collect();
        Ok(DeletedProductComplex {
            r,
            base: base.clone(),
            cells,
            index,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Top cell dimension; `None` when there are no cells.
    pub fn dim(&self) -> Option<usize> {
        self.cells.len().checked_sub(1)
    }

    pub fn num_cells(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn count_of_dim(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    /// Face ids (into the base complex) of cell `i` in dimension `k`.
    pub fn cell_ids(&self, k: usize, i: usize) -> &[u32] {
        &self.cells[k][i]
    }

    pub fn cell(&self, k: usize, i: usize) -> ProductCell {
        self.materialize(&self.cells[k][i])
    }

    fn materialize(&self, ids: &[u32]) -> ProductCell {
        ProductCell {
            factors: FaceTuple::new(ids.iter().map(|id| self.base.face(*id as usize).clone()).collect())
                .expect("stored cells are disjoint"),
        }
    }

    /// Position `(dimension, index)` of a cell given by face ids.
    pub fn locate_ids(&self, ids: &[u32]) -> Option<(usize, usize)> {
        let dim: usize = ids.iter().map(|id| self.base.face(*id as usize).dim()).sum();
        self.index
            .get(dim)?
            .get(ids)
            .map(|i| (dim, *i as usize))
    }

    pub fn locate(&self, cell: &ProductCell) -> Option<(usize, usize)> {
        let ids: Option<Vec<u32>> = cell
            .factors()
            .iter()
            .map(|s| self.base.face_id(s).map(|i| i as u32))
            .collect();
        ids.and_then(|ids| self.locate_ids(&ids))
    }

    /// Every cell, by dimension then index.
    pub fn cells(&self) -> impl Iterator<Item = ProductCell> + '_ {
        self.cells
            .iter()
            .flat_map(move |level| level.iter().map(move |ids| self.materialize(ids)))
    }

    /// Dimension of the first factor of a cell.
    pub fn first_factor_dim(&self, k: usize, i: usize) -> usize {
        self.base.face(self.cells[k][i][PROJECTION_COORDINATE] as usize).dim()
    }

    /// Cellular chain complex with the graded Leibniz boundary
    /// `∂(c_1×…×c_r) = Σ_i (−1)^(d_1+…+d_{i−1}) c_1×…×∂c_i×…×c_r`.
    pub fn cellular_chain_complex(&self, field: PrimeField, augmented: bool) -> ChainComplexGF {
        let top = self.cells.len();
        let dims = self.cell_counts();
        let boundaries = (1..top)
            .map(|k| {
                let cols = self.cells[k]
                    .iter()
                    .map(|ids| {
                        let mut col: Vec<(u32, u32)> = Vec::new();
                        let mut prefix = 0usize;
                        let mut work = ids.clone();
                        for i in 0..ids.len() {
                            let f = ids[i] as usize;
                            for &(g, s) in self.base.face_boundary(f) {
                                work[i] = g as u32;
                                let row = self.index[k - 1][&work];
                                let sign = if prefix.is_multiple_of(2) { s } else { -s };
                                col.push((row, field.sign(sign)));
                            }
                            work[i] = ids[i];
                            prefix += self.base.face(f).dim();
                        }
                        col.sort_unstable_by_key(|e| e.0);
                        col
                    })
                    .collect();
                MatrixGF::from_columns(field, dims[k - 1], cols)
            })
            .collect();
        let labels = self
            .cells
            .iter()
            .map(|level| level.iter().map(|ids| self.materialize(ids).to_string()).collect())
            .collect();
        let c = ChainComplexGF::new(field, 0, dims, boundaries, labels)
            .expect("cellular chain complex is well formed");
        if augmented {
            c.augment().expect("degree-0 complex augments")
        } else {
            c
        }
    }

    /// Matrix in dimension `k` of the chain map induced by permuting factors
    /// with `g`, including the Koszul sign `(−1)^(Σ d_i d_j)` over the pairs
    /// `i < j` whose order `g` reverses.
    pub fn action_chain_map(&self, g: &[usize], k: usize, field: PrimeField) -> Result<MatrixGF> {
        check_permutation(g, self.r)?;
        let n = self.count_of_dim(k);
        let mut triplets = Vec::with_capacity(n);
        for (c, ids) in self.cells.get(k).map(|v| v.as_slice()).unwrap_or(&[]).iter().enumerate() {
            let moved = act_ids(g, ids);
            let row = self.index[k][&moved] as usize;
            let dims: Vec<usize> = ids.iter().map(|f| self.base.face(*f as usize).dim()).collect();
            let mut exponent = 0;
            for i in 0..self.r {
                for j in i + 1..self.r {
                    if g[i] > g[j] {
                        exponent += dims[i] * dims[j];
                    }
                }
            }
            triplets.push((row, c, if exponent % 2 == 0 { 1 } else { -1 }));
        }
        MatrixGF::from_triplets(field, n, n, triplets)
    }
}

fn check_permutation(g: &[usize], r: usize) -> Result<()> {
    let mut seen = vec![false; r];
    if g.len() != r {
        return Err(invalid(format!("permutation of length {} acting on {r} factors", g.len())));
    }
    for &x in g {
        if x >= r || std::mem::replace(&mut seen[x], true) {
            return Err(invalid(format!("{g:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Factor `i` of the input lands in position `g(i)` of the output, so factor
/// `j` of the output is factor `g⁻¹(j)` of the input.
pub(crate) fn act_ids(g: &[usize], ids: &[u32]) -> Vec<u32> {
    let mut out = vec![0; ids.len()];
    for (i, id) in ids.iter().enumerate() {
        out[g[i]] = *id;
    }
    out
}

/// Left action of a permutation on the factors of a cell.
pub fn act(g: &[usize], cell: &ProductCell) -> Result<ProductCell> {
    check_permutation(g, cell.r())?;
    let mut out = cell.factors().to_vec();
    for (i, s) in cell.factors().iter().enumerate() {
        out[g[i]] = s.clone();
    }
    ProductCell::new(out)
}

/// `Z_a^m` as permutations of its own `r = a^m` elements by left shifts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    pub a: u32,
    pub m: u32,
    pub r: usize,
    /// `perms[g][h]` is the index of `g + h`; `perms[0]` is the identity.
    pub perms: Vec<Vec<usize>>,
}

/// Enumerates `Z_a^m` with element `i` having base-`a` digits (least
/// significant first) as coordinates; element `g` maps `h ↦ g + h`.
pub fn regular_representation(a: u32, m: u32) -> Result<GroupAction> {
    if !is_prime(a as u64) {
        return Err(invalid(format!("{a} is not prime")));
    }
    if m < 1 {
        return Err(invalid("exponent m must be at least 1"));
    }
    let r = (a as usize)
        .checked_pow(m)
        .filter(|r| *r <= 1 << 20)
        .ok_or_else(|| invalid(format!("group order {a}^{m} too large")))?;
    let a = a as usize;
    let add = |g: usize, h: usize| -> usize {
        let (mut g, mut h, mut out, mut place) = (g, h, 0, 1);
        for _ in 0..m {
            out += ((g % a + h % a) % a) * place;
            g /= a;
            h /= a;
            place *= a;
        }
        out
    };
    let perms = (0..r).map(|g| (0..r).map(|h| add(g, h)).collect()).collect();
    Ok(GroupAction {
        a: a as u32,
        m,
        r,
        perms,
    })
}

impl GroupAction {
    /// The trivial group acting on a single factor.
    pub fn trivial() -> Self {
        GroupAction {
            a: 1,
            m: 0,
            r: 1,
            perms: vec![vec![0]],
        }
    }

    pub fn is_identity(g: &[usize]) -> bool {
        g.iter().enumerate().all(|(i, x)| i == *x)
    }

    /// Checks closure, commutativity, exponent `a` and fixed-point freeness
    /// of the non-identity elements.
    pub fn verify_structure(&self) -> bool {
        let compose = |g: &[usize], h: &[usize]| -> Vec<usize> { h.iter().map(|x| g[*x]).collect() };
        let set: std::collections::HashSet<&Vec<usize>> = self.perms.iter().collect();
        if set.len() != self.r || !Self::is_identity(&self.perms[0]) {
            return false;
        }
        for g in &self.perms {
            if !Self::is_identity(g) && g.iter().enumerate().any(|(i, x)| i == *x) {
                return false;
            }
            let mut power = g.clone();
            for _ in 1..self.a.max(1) {
                power = compose(g, &power);
            }
            if !Self::is_identity(&power) {
                return false;
            }
            for h in &self.perms {
                let gh = compose(g, h);
                if gh != compose(h, g) || !set.contains(&gh) {
                    return false;
                }
            }
        }
        true
    }
}

/// Outcome of an exhaustive freeness check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub free: bool,
    pub cells_checked: usize,
    pub group_order: usize,
    /// A non-identity element and a cell it fixes.
    pub offending: Option<(Vec<usize>, ProductCell)>,
}

/// True iff no non-identity group element maps any cell of `d` to itself.
pub fn check_free_cellular_action(
    d: &DeletedProductComplex,
    action: &GroupAction,
) -> Result<FreenessReport> {
    if action.r != d.r {
        return Err(invalid(format!(
            "group permutes {} points but the deleted product has {} factors",
            action.r, d.r
        )));
    }
    for g in &action.perms {
        check_permutation(g, d.r)?;
    }
    let mut checked = 0;
    for level in &d.cells {
        for ids in level {
            checked += 1;
            for g in action.perms.iter().filter(|g| !GroupAction::is_identity(g)) {
                if act_ids(g, ids) == *ids {
                    return Ok(FreenessReport {
                        free: false,
                        cells_checked: checked,
                        group_order: action.perms.len(),
                        offending: Some((g.clone(), d.materialize(ids))),
                    });
                }
            }
        }
    }
    Ok(FreenessReport {
        free: true,
        cells_checked: checked,
        group_order: action.perms.len(),
        offending: None,
    })
}
