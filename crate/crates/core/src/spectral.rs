//! The filtration of `X^(r)` by preimages of the skeleta of `X` under the
//! first-factor projection, computed explicitly: relative homology of
//! consecutive levels (the `E¹` page), its comparison with the homology of
//! the fibers `F_σ = (X − σ)^(r−1)`, and the row-zero differential `d¹`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::acyclicity::fiber_condition_check_capped;
use crate::chain::{homology_of_chain_complex, homology_upto, ChainComplexGF, Selection};
use crate::complex::SimplicialComplex;
use crate::deleted::{DeletedProductComplex, DEFAULT_MAX_CELLS};
use crate::dense::{kernel, DenseVec, Echelon};
use crate::error::{invalid, Result};
use crate::field::PrimeField;
use crate::matrix::MatrixGF;
use crate::par_map;

/// Level `p` of the filtration selects the cells whose first factor has
/// dimension `≤ p`. Levels run from `−1` (empty) to the dimension of the base.
#[derive(Clone, Debug)]
pub struct Filtration {
    levels: Vec<Selection>,
}

impl Filtration {
    /// Selection for level `p`, indexed by cell dimension. Levels above the
    /// top are the whole complex.
    pub fn level(&self, p: i32) -> &Selection {
        let i = (p + 1).clamp(0, self.levels.len() as i32 - 1);
        &self.levels[i as usize]
    }

    pub fn top(&self) -> i32 {
        self.levels.len() as i32 - 2
    }
}

pub fn filtration_subcomplexes(d: &DeletedProductComplex) -> Filtration {
    let top = d.base().dim().map_or(-1, |t| t as i32);
    let ncell_dims = d.dim().map_or(0, |t| t + 1);
    let levels = (-1..=top)
        .map(|p| {
            (0..ncell_dims)
                .map(|k| {
                    (0..d.count_of_dim(k))
                        .filter(|&i| (d.first_factor_dim(k, i) as i32) <= p)
                        .collect()
                })
                .collect()
        })
        .collect();
    Filtration { levels }
}

/// Cells of dimension `k` whose first factor has dimension exactly `p`.
fn stratum(d: &DeletedProductComplex, k: usize, p: usize) -> Vec<usize> {
    (0..d.count_of_dim(k))
        .filter(|&i| d.first_factor_dim(k, i) == p)
        .collect()
}

/// Quotient complex `level p / level p−1`.
pub fn relative_level(c: &ChainComplexGF, filt: &Filtration, p: i32) -> Result<ChainComplexGF> {
    let upper = filt.level(p);
    let lower = filt.level(p - 1);
    let sub = c.subcomplex(upper)?;
    let rel: Selection = upper
        .iter()
        .zip(lower)
        .map(|(up, low)| {
            let mut low_iter = low.iter().peekable();
            up.iter()
                .enumerate()
                .filter_map(|(pos, cell)| {
                    if low_iter.peek() == Some(&cell) {
                        low_iter.next();
                        None
                    } else {
                        Some(pos)
                    }
                })
                .collect()
        })
        .collect();
    sub.relative(&rel)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Entry {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
    pub fiber_sum_dim: usize,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// `dim E¹_{n+1,0}` against the number of `(n+1)`-faces of the base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientCheck {
    pub p: usize,
    pub e1_dim: usize,
    pub faces: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct E1Page {
    pub r: usize,
    pub prime: u32,
    pub cap: usize,
    pub entries: Vec<E1Entry>,
    /// `dim E¹_{p,0}` for `p = 0..`.
    pub row0_dims: Vec<usize>,
    /// Homology of `(E¹_{•,0}, d¹)`, i.e. `dim E²_{p,0}`.
    pub row0_homology: Vec<usize>,
    /// Ranks of `d¹: E¹_{p,0} → E¹_{p−1,0}` for `p = 1..`.
    pub d1_ranks: Vec<usize>,
    pub all_match: bool,
    /// `Σ_p dim(level p / level p−1)_k = dim C_k(X^(r))` in every degree.
    pub strata_stack: bool,
    pub quotient_check: Option<QuotientCheck>,
    #[serde(skip)]
    pub row0_complex: ChainComplexGF,
}

impl E1Page {
    pub fn get(&self, p: usize, q: usize) -> Option<&E1Entry> {
        self.entries.iter().find(|e| e.p == p && e.q == q)
    }
}

/// Unreduced homology of `F_σ = (X − σ)^(r−1)` up to degree `max_q`; for
/// `r = 1` the fiber is a point.
fn fiber_homology(x: &SimplicialComplex, face: usize, r: usize, f: PrimeField, max_q: usize, max_cells: usize) -> Result<Vec<usize>> {
    let mut out = vec![0; max_q + 1];
    if r == 1 {
        out[0] = 1;
        return Ok(out);
    }
    let fiber = DeletedProductComplex::build_capped(&x.delete(x.face(face)), r - 1, max_cells)?;
    let h = homology_upto(&fiber.cellular_chain_complex(f, false), max_q as i32)?;
    for (q, o) in out.iter_mut().enumerate() {
        *o = h.get(q as i32);
    }
    Ok(out)
}

pub fn e1_page(x: &SimplicialComplex, r: usize, f: PrimeField, cap: usize, n: Option<i32>) -> Result<E1Page> {
    e1_page_capped(x, r, f, cap, n, DEFAULT_MAX_CELLS)
}

/// Computes `E¹_{p,q}` for `p + q ≤ cap` as relative homology of
/// consecutive filtration levels and compares each with
/// `Σ_{dim σ = p} dim H_q(F_σ)`. With `n` given, also reports
/// `dim E¹_{n+1,0} ≥ #(n+1)-faces`.
pub fn e1_page_capped(
    x: &SimplicialComplex,
    r: usize,
    f: PrimeField,
    cap: usize,
    n: Option<i32>,
    max_cells: usize,
) -> Result<E1Page> {
    let d = DeletedProductComplex::build_capped(x, r, max_cells)?;
    let c = d.cellular_chain_complex(f, false);
    let filt = filtration_subcomplexes(&d);
    let top_p = x.dim().map_or(-1, |t| t as i32).min(cap as i32);

    let mut entries = Vec::new();
    let mut stacked = vec![0usize; c.dims().len()];
    for p in 0..=top_p.max(-1) {
        let rel = relative_level(&c, &filt, p)?;
        for (k, dk) in rel.dims().iter().enumerate() {
            stacked[k] += dk;
        }
        let h = homology_of_chain_complex(&rel)?;
        let p = p as usize;
        let max_q = cap - p;
        let faces: Vec<usize> = x.dim_range(p).collect();
        let fibers = par_map(&faces, |id| fiber_homology(x, *id, r, f, max_q, max_cells));
        let mut sums = vec![0usize; max_q + 1];
        for fib in fibers {
            for (s, v) in sums.iter_mut().zip(fib?) {
                *s += v;
            }
        }
        for (q, fiber_sum_dim) in sums.into_iter().enumerate() {
            let dim = h.get((p + q) as i32);
            entries.push(E1Entry {
                p,
                q,
                dim,
                fiber_sum_dim,
                matches: dim == fiber_sum_dim,
            });
        }
    }
    // strata beyond the cap still count towards the total
    for p in (top_p + 1).max(0)..=x.dim().map_or(-1, |t| t as i32) {
        for (k, s) in stacked.iter_mut().enumerate() {
            *s += stratum(&d, k, p as usize).len();
        }
    }
    let strata_stack = stacked == c.dims();

    let row = row0_differentials(&d, f, cap, None)?;
    let row_h = homology_of_chain_complex(&row.complex)?;
    let row0_homology = (0..row.dims.len()).map(|p| row_h.get(p as i32)).collect();
    let quotient_check = n.and_then(|n| {
        let p = (n + 1) as usize;
        (n >= -1 && p < row.dims.len()).then(|| QuotientCheck {
            p,
            e1_dim: row.dims[p],
            faces: x.count_of_dim(p),
            holds: row.dims[p] >= x.count_of_dim(p),
        })
    });
    Ok(E1Page {
        r,
        prime: f.p(),
        cap,
        all_match: entries.iter().all(|e| e.matches),
        entries,
        row0_dims: row.dims,
        row0_homology,
        d1_ranks: row.ranks,
        strata_stack,
        quotient_check,
        row0_complex: row.complex,
    })
}

/// The row `(E¹_{•,0}, d¹)` in explicit bases.
#[derive(Clone, Debug)]
pub struct RowZero {
    pub dims: Vec<usize>,
    /// `d¹_p` in the chosen homology bases, for `p = 1..`.
    pub differentials: Vec<MatrixGF>,
    pub ranks: Vec<usize>,
    pub complex: ChainComplexGF,
}

/// Homology of the relative stratum in degree `p` with an explicit basis.
struct StratumHomology {
    cells: Vec<usize>,
    // boundaries of the stratum inserted first, then the representatives
    echelon: Echelon,
    boundary_rank: usize,
    reps: Vec<DenseVec>,
    // chains of the stratum one degree up, for perturbing representatives
    up_images: Vec<DenseVec>,
}

fn dense_block(c: &ChainComplexGF, k: usize, rows: &[usize], cols: &[usize]) -> Vec<Vec<u32>> {
    let Some(m) = c.boundary(k as i32) else {
        return vec![vec![0; cols.len()]; rows.len()];
    };
    let sub = m.select(rows, cols).to_dense();
    if rows.is_empty() {
        Vec::new()
    } else {
        sub
    }
}

fn stratum_homology(d: &DeletedProductComplex, c: &ChainComplexGF, p: usize, f: PrimeField) -> StratumHomology {
    let cells = stratum(d, p, p);
    let below = if p == 0 { Vec::new() } else { stratum(d, p - 1, p) };
    let above = stratum(d, p + 1, p);
    let out = dense_block(c, p, &below, &cells);
    let cycles = kernel(f, &out, cells.len());
    let into = dense_block(c, p + 1, &cells, &above);
    let up_images: Vec<DenseVec> = (0..above.len())
        .map(|j| into.iter().map(|row| row[j]).collect())
        .collect();
    let mut echelon = Echelon::new(f, cells.len());
    for v in &up_images {
        echelon.insert(v);
    }
    let boundary_rank = echelon.rank();
    let mut reps = Vec::new();
    for z in cycles {
        if echelon.insert(&z) {
            reps.push(z);
        }
    }
    StratumHomology {
        cells,
        echelon,
        boundary_rank,
        reps,
        up_images,
    }
}

/// Computes `d¹_p: E¹_{p,0} → E¹_{p−1,0}` as a connecting map: lift a
/// relative cycle to `X^(r)`, apply the boundary, project to the next
/// stratum and read off its class. With `perturb`, representatives are
/// shifted by random boundaries and lifts by random chains of lower
/// filtration; the resulting matrices must not change.
pub fn row0_differentials(
    d: &DeletedProductComplex,
    f: PrimeField,
    cap: usize,
    perturb: Option<u64>,
) -> Result<RowZero> {
    let c = d.cellular_chain_complex(f, false);
    let top = d.base().dim().map_or(-1, |t| t as i32).min(cap as i32);
    if top < 0 {
        let complex = ChainComplexGF::new(f, 0, Vec::new(), Vec::new(), Vec::new())?;
        return Ok(RowZero {
            dims: Vec::new(),
            differentials: Vec::new(),
            ranks: Vec::new(),
            complex,
        });
    }
    let strata: Vec<StratumHomology> = (0..=top as usize).map(|p| stratum_homology(d, &c, p, f)).collect();
    let mut rng = perturb.map(ChaCha8Rng::seed_from_u64);
    let mut differentials = Vec::new();
    for p in 1..=top as usize {
        let (src, dst) = (&strata[p], &strata[p - 1]);
        let Some(bd) = c.boundary(p as i32) else {
            differentials.push(MatrixGF::zeros(f, dst.reps.len(), src.reps.len()));
            continue;
        };
        // lower-filtration cells of dimension p for perturbing lifts
        let lower: Vec<usize> = (0..d.count_of_dim(p)).filter(|&i| d.first_factor_dim(p, i) < p).collect();
        let mut dst_pos = vec![usize::MAX; d.count_of_dim(p - 1)];
        for (pos, cell) in dst.cells.iter().enumerate() {
            dst_pos[*cell] = pos;
        }
        let mut triplets = Vec::new();
        for (col, rep) in src.reps.iter().enumerate() {
            let mut rep = rep.clone();
            let mut lift: Vec<(u32, u32)> = Vec::new();
            if let Some(rng) = rng.as_mut() {
                for img in &src.up_images {
                    let a = rng.gen_range(0..f.p());
                    for (x, y) in rep.iter_mut().zip(img) {
                        *x = f.add(*x, f.mul(a, *y));
                    }
                }
                for cell in &lower {
                    let a = rng.gen_range(0..f.p());
                    if a != 0 {
                        lift.push((*cell as u32, a));
                    }
                }
            }
            for (pos, v) in rep.iter().enumerate() {
                if *v != 0 {
                    lift.push((src.cells[pos] as u32, *v));
                }
            }
            lift.sort_unstable_by_key(|e| e.0);
            let image = bd.apply(&lift);
            let mut projected = vec![0u32; dst.cells.len()];
            for (row, v) in image {
                let pos = dst_pos[row as usize];
                if pos != usize::MAX {
                    projected[pos] = v;
                }
            }
            let coords = dst
                .echelon
                .coordinates(&projected)
                .ok_or_else(|| invalid("projected boundary is not a relative cycle"))?;
            for (i, v) in coords[dst.boundary_rank..].iter().enumerate() {
                if *v != 0 {
                    triplets.push((i, col, *v as i64));
                }
            }
        }
        differentials.push(MatrixGF::from_triplets(f, dst.reps.len(), src.reps.len(), triplets)?);
    }
    let dims: Vec<usize> = strata.iter().map(|s| s.reps.len()).collect();
    let ranks = differentials.iter().map(MatrixGF::rank).collect();
    let labels = dims
        .iter()
        .enumerate()
        .map(|(p, n)| (0..*n).map(|i| format!("E1[{p},0]#{i}")).collect())
        .collect();
    let complex = ChainComplexGF::new(f, 0, dims.clone(), differentials.clone(), labels)?;
    complex.check_boundary_squared()?;
    Ok(RowZero {
        dims,
        differentials,
        ranks,
        complex,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row0Comparison {
    pub n: i32,
    /// `dim E²_{p,0}` for `p = 0..=n`.
    pub e2: Vec<usize>,
    /// `dim H_p(X)` for `p = 0..=n`.
    pub base_homology: Vec<usize>,
    pub matches: bool,
}

/// Homology of the row complex in degrees `≤ n` against `H_p(X)`.
pub fn e2_row0(x: &SimplicialComplex, r: usize, f: PrimeField, n: i32) -> Result<Row0Comparison> {
    if n < 0 {
        return Ok(Row0Comparison {
            n,
            e2: Vec::new(),
            base_homology: Vec::new(),
            matches: true,
        });
    }
    let d = DeletedProductComplex::build(x, r)?;
    let row = row0_differentials(&d, f, (n + 1) as usize, None)?;
    let h = homology_of_chain_complex(&row.complex)?;
    let e2: Vec<usize> = (0..=n).map(|p| h.get(p)).collect();
    let hx = homology_upto(&crate::chain::chain_complex(x, f, false), n)?;
    let base_homology: Vec<usize> = (0..=n).map(|p| hx.get(p)).collect();
    Ok(Row0Comparison {
        n,
        matches: e2 == base_homology,
        e2,
        base_homology,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub r: usize,
    pub n: i32,
    pub p: u32,
    /// Whether every `F_σ` is `(n − dim σ)`-acyclic; absent for `r = 1`.
    pub fiber_condition: Option<bool>,
    pub cells: usize,
    /// `dim H_s(X^(r))` for `s = 0..=n`.
    pub deleted_product: Vec<usize>,
    /// `dim H_s(X)` for `s = 0..=n`.
    pub base: Vec<usize>,
    pub equal: bool,
}

pub fn lemma_crcon_verify(x: &SimplicialComplex, r: usize, n: i32, f: PrimeField) -> Result<LemmaReport> {
    lemma_crcon_verify_capped(x, r, n, f, DEFAULT_MAX_CELLS)
}

/// Compares `dim H_s(X^(r))` with `dim H_s(X)` for all `s ≤ n` by direct
/// computation on both sides. The fiber condition is reported, not enforced.
pub fn lemma_crcon_verify_capped(
    x: &SimplicialComplex,
    r: usize,
    n: i32,
    f: PrimeField,
    max_cells: usize,
) -> Result<LemmaReport> {
    let d = DeletedProductComplex::build_capped(x, r, max_cells)?;
    let fiber_condition = if r >= 2 {
        Some(fiber_condition_check_capped(x, r, n, f, max_cells)?.holds)
    } else {
        None
    };
    let hd = homology_upto(&d.cellular_chain_complex(f, false), n)?;
    let hx = homology_upto(&crate::chain::chain_complex(x, f, false), n)?;
    let deleted_product: Vec<usize> = (0..=n).map(|s| hd.get(s)).collect();
    let base: Vec<usize> = (0..=n).map(|s| hx.get(s)).collect();
    Ok(LemmaReport {
        r,
        n,
        p: f.p(),
        fiber_condition,
        cells: d.num_cells(),
        equal: deleted_product == base,
        deleted_product,
        base,
    })
}
