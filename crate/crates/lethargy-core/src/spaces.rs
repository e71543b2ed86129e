//! Strictly nested subspace chains and their generators.
//!
//! A chain stores raw bases (columns = basis vectors). Validation checks
//! full column rank, strict nesting, and room for an exterior point; it
//! reports per-invariant verdicts instead of failing, so callers can show
//! the offending level. Generators produce polynomial chains on a grid,
//! coordinate chains, seeded random chains, and the dyadic interleaving
//! used by the two-sided synthesis pipeline.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use crate::linalg::{
    self, norm2, orthonormalize, Matrix, Orthonormal, RANK_REL_TOL,
};
use crate::rng::{self, rng_from_seed};
use crate::sequences::{TailModel, TargetSequence};

#[derive(Debug, Clone)]
pub struct SubspaceChain {
    ambient_dim: usize,
    bases: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainError {
    Empty,
    WrongAmbient { level: usize, rows: usize, ambient: usize },
    NonFinite { level: usize },
    NoColumns { level: usize },
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainError::Empty => write!(f, "chain needs at least one level"),
            ChainError::WrongAmbient { level, rows, ambient } => {
                write!(f, "level {level} has {rows} rows, ambient dimension is {ambient}")
            }
            ChainError::NonFinite { level } => write!(f, "level {level} has non-finite entries"),
            ChainError::NoColumns { level } => write!(f, "level {level} has no basis columns"),
        }
    }
}

impl SubspaceChain {
    pub fn new(ambient_dim: usize, bases: Vec<Matrix>) -> Result<Self, ChainError> {
        if bases.is_empty() {
            return Err(ChainError::Empty);
        }
        for (k, b) in bases.iter().enumerate() {
            if b.rows() != ambient_dim {
                return Err(ChainError::WrongAmbient {
                    level: k + 1,
                    rows: b.rows(),
                    ambient: ambient_dim,
                });
            }
            if !b.all_finite() {
                return Err(ChainError::NonFinite { level: k + 1 });
            }
            if b.cols() == 0 {
                return Err(ChainError::NoColumns { level: k + 1 });
            }
        }
        Ok(SubspaceChain { ambient_dim, bases })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn basis(&self, level: usize) -> &Matrix {
        &self.bases[level]
    }

    pub fn bases(&self) -> &[Matrix] {
        &self.bases
    }

    pub fn last_basis(&self) -> &Matrix {
        self.bases.last().unwrap()
    }

    /// Orthonormalized basis of one level.
    pub fn orthonormal(&self, level: usize) -> Orthonormal {
        orthonormalize(&self.bases[level], RANK_REL_TOL)
    }

    /// Chain restricted to the given levels (must be increasing).
    pub fn subchain(&self, levels: &[usize]) -> SubspaceChain {
        SubspaceChain {
            ambient_dim: self.ambient_dim,
            bases: levels.iter().map(|&k| self.bases[k].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LevelReport {
    /// 1-based level index.
    pub level: usize,
    pub columns: usize,
    pub rank: usize,
    pub full_column_rank: bool,
    /// Strictly larger rank than the previous level (first level: vacuous).
    pub rank_increases: bool,
    /// Every column lies in the span of the next level (last level: vacuous).
    pub nested_in_next: bool,
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    pub levels: Vec<LevelReport>,
    /// rank of the last level stays below the ambient dimension, leaving
    /// room for an exterior point.
    pub exterior_room: bool,
    pub pass: bool,
}

impl ChainReport {
    /// First offending level, if any invariant fails.
    pub fn first_failure(&self) -> Option<usize> {
        self.levels
            .iter()
            .find(|l| !(l.full_column_rank && l.rank_increases && l.nested_in_next))
            .map(|l| l.level)
    }
}

/// Checks full column rank, strict nesting, strictly increasing ranks, and
/// exterior room. Pure report; the verdicts are representation-independent
/// because they only look at spans.
pub fn validate_chain(chain: &SubspaceChain) -> ChainReport {
    let m = chain.len();
    let orthos: Vec<Orthonormal> = (0..m).map(|k| chain.orthonormal(k)).collect();
    let mut levels = Vec::with_capacity(m);
    for k in 0..m {
        let b = chain.basis(k);
        let rank = orthos[k].rank;
        let full_column_rank = rank == b.cols();
        let rank_increases = if k == 0 { true } else { rank > orthos[k - 1].rank };
        let nested_in_next = if k + 1 == m {
            true
        } else {
            let scale = b.max_col_norm();
            (0..b.cols()).all(|j| {
                linalg::span_contains(&orthos[k + 1].q, &b.col(j), RANK_REL_TOL, scale)
            })
        };
        levels.push(LevelReport {
            level: k + 1,
            columns: b.cols(),
            rank,
            full_column_rank,
            rank_increases,
            nested_in_next,
        });
    }
    let exterior_room = orthos[m - 1].rank < chain.ambient_dim();
    let pass = exterior_room
        && levels
            .iter()
            .all(|l| l.full_column_rank && l.rank_increases && l.nested_in_next);
    ChainReport { levels, exterior_room, pass }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainBuildError {
    DegenerateGrid,
    DegreesNotIncreasing,
    NoDegrees,
    DependentColumns { degree: usize },
    BadRanks,
    Chain(ChainError),
}

impl fmt::Display for ChainBuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainBuildError::DegenerateGrid => {
                write!(f, "grid points must be strictly increasing and distinct")
            }
            ChainBuildError::DegreesNotIncreasing => {
                write!(f, "degrees must be strictly increasing")
            }
            ChainBuildError::NoDegrees => write!(f, "at least one degree is required"),
            ChainBuildError::DependentColumns { degree } => {
                write!(f, "monomials up to degree {degree} are dependent on this grid")
            }
            ChainBuildError::BadRanks => write!(f, "ranks must be strictly increasing and positive"),
            ChainBuildError::Chain(e) => write!(f, "{e}"),
        }
    }
}

impl From<ChainError> for ChainBuildError {
    fn from(e: ChainError) -> Self {
        ChainBuildError::Chain(e)
    }
}

/// Polynomial chain sampled on a grid: level `k` spans the monomials of
/// degree `<= degrees[k]`. Columns are orthonormalized in degree order,
/// which preserves every level's span while taming Vandermonde
/// conditioning.
pub fn chain_polynomials(grid: &[f64], degrees: &[usize]) -> Result<SubspaceChain, ChainBuildError> {
    if degrees.is_empty() {
        return Err(ChainBuildError::NoDegrees);
    }
    if degrees.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ChainBuildError::DegreesNotIncreasing);
    }
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ChainBuildError::DegenerateGrid);
    }
    let dim = grid.len();
    let max_deg = *degrees.last().unwrap();

    // ordered Gram-Schmidt over monomial columns
    let mut q_cols: Vec<Vec<f64>> = Vec::with_capacity(max_deg + 1);
    for deg in 0..=max_deg {
        let mut col: Vec<f64> = grid.iter().map(|t| t.powi(deg as i32)).collect();
        for _ in 0..2 {
            for qc in &q_cols {
                let c = linalg::dot(qc, &col);
                linalg::axpy(-c, qc, &mut col);
            }
        }
        let nrm = norm2(&col);
        if nrm <= RANK_REL_TOL * (dim as f64).sqrt() {
            return Err(ChainBuildError::DependentColumns { degree: deg });
        }
        q_cols.push(linalg::scaled(&col, 1.0 / nrm));
    }

    let bases = degrees
        .iter()
        .map(|&d| Matrix::from_cols(dim, &q_cols[0..=d]))
        .collect();
    Ok(SubspaceChain::new(dim, bases)?)
}

/// `span{e_1..e_r}` chain for the given strictly increasing ranks.
pub fn coordinate_chain(dim: usize, ranks: &[usize]) -> Result<SubspaceChain, ChainBuildError> {
    if ranks.is_empty()
        || ranks[0] == 0
        || ranks.windows(2).any(|w| w[1] <= w[0])
        || *ranks.last().unwrap() > dim
    {
        return Err(ChainBuildError::BadRanks);
    }
    let bases = ranks
        .iter()
        .map(|&r| {
            let cols: Vec<Vec<f64>> = (0..r)
                .map(|i| {
                    let mut e = vec![0.0; dim];
                    e[i] = 1.0;
                    e
                })
                .collect();
            Matrix::from_cols(dim, &cols)
        })
        .collect();
    Ok(SubspaceChain::new(dim, bases)?)
}

/// Seeded random chain: a Haar-ish orthonormal frame, truncated at each rank.
pub fn random_chain(dim: usize, ranks: &[usize], seed: u64) -> Result<SubspaceChain, ChainBuildError> {
    if ranks.is_empty()
        || ranks[0] == 0
        || ranks.windows(2).any(|w| w[1] <= w[0])
        || *ranks.last().unwrap() > dim
    {
        return Err(ChainBuildError::BadRanks);
    }
    let max_rank = *ranks.last().unwrap();
    let mut rng = rng_from_seed(seed);
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(max_rank);
    while frame.len() < max_rank {
        let mut v = rng::normal_vec(&mut rng, dim);
        for q in &frame {
            let c = linalg::dot(q, &v);
            linalg::axpy(-c, q, &mut v);
        }
        let nrm = norm2(&v);
        if nrm > 1e-6 {
            frame.push(linalg::scaled(&v, 1.0 / nrm));
        }
    }
    let bases = ranks
        .iter()
        .map(|&r| Matrix::from_cols(dim, &frame[0..r]))
        .collect();
    Ok(SubspaceChain::new(dim, bases)?)
}

/// Relative tolerance for value ties between the dyadic ladder and the
/// prescribed sequence.
const TIE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RungLevel {
    /// 0-based index into the merged chain/sequence.
    pub merged_index: usize,
    /// Dyadic exponent `i` of the rung value `K * 2^-i`.
    pub exponent: i32,
    pub value: f64,
    /// False when the rung reuses an original level (exact value tie).
    pub inserted: bool,
}

#[derive(Debug, Clone)]
pub struct Interleaved {
    pub chain: SubspaceChain,
    pub values: TargetSequence,
    /// Original level -> merged level (0-based on both sides).
    pub index_map: Vec<usize>,
    pub rungs: Vec<RungLevel>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InterleaveError {
    /// Not enough rank room to host an inserted level at this position
    /// (1-based original gap index; 0 means before the first level,
    /// `len` means after the last).
    InsufficientDimension { gap: usize },
    /// Reserved: a tie pattern in the sequence that cannot reuse a dyadic
    /// level. The first-occurrence reuse strategy resolves every tie
    /// pattern we know how to produce, so this is defensive.
    NonMergeable { index: usize },
    NotStrictlyPositive,
    LengthMismatch { chain: usize, sequence: usize },
    InvalidChain { level: usize },
    BadScale,
}

impl fmt::Display for InterleaveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterleaveError::InsufficientDimension { gap } => {
                write!(f, "no rank room to insert a dyadic level at gap {gap}")
            }
            InterleaveError::NonMergeable { index } => {
                write!(f, "tie at index {index} blocks strict interleaving")
            }
            InterleaveError::NotStrictlyPositive => {
                write!(f, "interleaving requires strictly positive sequence values")
            }
            InterleaveError::LengthMismatch { chain, sequence } => {
                write!(f, "chain has {chain} levels but sequence has {sequence}")
            }
            InterleaveError::InvalidChain { level } => {
                write!(f, "chain fails validation at level {level}")
            }
            InterleaveError::BadScale => write!(f, "ladder scale K must be positive and finite"),
        }
    }
}

/// Merges the dyadic ladder `{K 2^-i}` into `(chain, d)` so that the ladder
/// values appear as a subfamily of the merged sequence. Exact value ties
/// reuse the original level; strictly interleaved rungs get one new basis
/// direction drawn (seeded) from the orthogonal complement of the level
/// below inside the level above (or of the whole chain, for trailing
/// rungs). Original pairs are preserved exactly.
pub fn interleave_chain(
    chain: &SubspaceChain,
    d: &TargetSequence,
    k_scale: f64,
    i0: Option<i32>,
    seed: u64,
) -> Result<Interleaved, InterleaveError> {
    if !(k_scale > 0.0) || !k_scale.is_finite() {
        return Err(InterleaveError::BadScale);
    }
    if chain.len() != d.len() {
        return Err(InterleaveError::LengthMismatch {
            chain: chain.len(),
            sequence: d.len(),
        });
    }
    if !d.all_positive() {
        return Err(InterleaveError::NotStrictlyPositive);
    }
    let report = validate_chain(chain);
    if !report.pass {
        return Err(InterleaveError::InvalidChain {
            level: report.first_failure().unwrap_or(chain.len()),
        });
    }

    let values = d.values();
    let d_first = values[0];
    let d_last = *values.last().unwrap();

    // ladder start: the first rung at or above d_1 (honoring a caller i0)
    let tie = |a: f64, b: f64| (a - b).abs() <= TIE_REL_TOL * a.max(b);
    let mut i_start = (k_scale / d_first).log2().floor() as i32;
    while k_scale * 2.0_f64.powi(-i_start) < d_first && !tie(k_scale * 2.0_f64.powi(-i_start), d_first)
    {
        i_start -= 1;
    }
    // avoid an unnecessary rung strictly above d_1 when the next one ties
    if tie(k_scale * 2.0_f64.powi(-(i_start + 1)), d_first) {
        i_start += 1;
    }
    if let Some(forced) = i0 {
        // a forced earlier start adds rungs above d_1 (hosted inside the
        // first level); a later start would lose the bracket above d_1, so
        // it is clamped
        i_start = i_start.min(forced);
    }
    // ladder end: first rung at or below d_last
    let mut i_end = i_start;
    while k_scale * 2.0_f64.powi(-i_end) > d_last && !tie(k_scale * 2.0_f64.powi(-i_end), d_last) {
        i_end += 1;
    }

    let rung_values: Vec<(i32, f64)> = (i_start..=i_end)
        .map(|i| (i, k_scale * 2.0_f64.powi(-i)))
        .collect();

    // precompute orthonormal bases and gap complements
    let orthos: Vec<Orthonormal> = (0..chain.len()).map(|k| chain.orthonormal(k)).collect();
    let mut rng = rng_from_seed(seed);

    // plan the merge: walk positions 0..=len over the original sequence;
    // position g means "before original level g"
    #[derive(Clone)]
    enum Item {
        Original(usize),
        Rung { exponent: i32, value: f64, gap: usize },
        RungReuse { exponent: i32, original: usize },
    }
    let mut items: Vec<Item> = Vec::new();
    let mut rung_iter = rung_values.iter().peekable();
    for (n, &dn) in values.iter().enumerate() {
        while let Some(&&(i, rv)) = rung_iter.peek() {
            if tie(rv, dn) {
                // reuse this original level as the rung carrier unless an
                // earlier tied original already carries it
                items.push(Item::Original(n));
                items.push(Item::RungReuse { exponent: i, original: n });
                rung_iter.next();
                break;
            } else if rv > dn {
                items.push(Item::Rung { exponent: i, value: rv, gap: n });
                rung_iter.next();
            } else {
                break;
            }
        }
        if !matches!(items.last(), Some(Item::RungReuse { original, .. }) if *original == n) {
            items.push(Item::Original(n));
        }
    }
    for &(i, rv) in rung_iter {
        items.push(Item::Rung { exponent: i, value: rv, gap: values.len() });
    }

    // count insertions per gap and check rank room
    let rank_at = |level: usize| orthos[level].rank;
    let mut per_gap: Vec<usize> = vec![0; values.len() + 1];
    for it in &items {
        if let Item::Rung { gap, .. } = it {
            per_gap[*gap] += 1;
        }
    }
    for (gap, &count) in per_gap.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let room = if gap == 0 {
            rank_at(0).saturating_sub(1)
        } else if gap == values.len() {
            (chain.ambient_dim() - 1).saturating_sub(rank_at(values.len() - 1))
        } else {
            rank_at(gap).saturating_sub(rank_at(gap - 1) + 1)
        };
        if room < count {
            return Err(InterleaveError::InsufficientDimension { gap });
        }
    }

    // gap complement directions, sampled once per gap
    let mut gap_dirs: Vec<Vec<Vec<f64>>> = vec![Vec::new(); values.len() + 1];
    for (gap, &count) in per_gap.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let dim = chain.ambient_dim();
        // orthonormal basis of the space new directions may come from
        let (inner, outer): (Option<&Orthonormal>, Option<&Orthonormal>) = if gap == 0 {
            (None, Some(&orthos[0]))
        } else if gap == values.len() {
            (Some(&orthos[values.len() - 1]), None)
        } else {
            (Some(&orthos[gap - 1]), Some(&orthos[gap]))
        };
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(count);
        let mut guard = 0;
        while dirs.len() < count && guard < 64 * count {
            guard += 1;
            // draw inside the outer span when one exists, else in ambient
            let mut v = match outer {
                Some(out) => {
                    let coeffs = rng::normal_vec(&mut rng, out.rank);
                    out.q.matvec(&coeffs)
                }
                None => rng::normal_vec(&mut rng, dim),
            };
            if let Some(inn) = inner {
                v = linalg::reject(&inn.q, &v);
            }
            for prev in &dirs {
                let c = linalg::dot(prev, &v);
                linalg::axpy(-c, prev, &mut v);
            }
            let nrm = norm2(&v);
            if nrm > 1e-8 {
                dirs.push(linalg::scaled(&v, 1.0 / nrm));
            }
        }
        if dirs.len() < count {
            return Err(InterleaveError::InsufficientDimension { gap });
        }
        gap_dirs[gap] = dirs;
    }

    // assemble merged chain and sequence
    let mut merged_bases: Vec<Matrix> = Vec::new();
    let mut merged_values: Vec<f64> = Vec::new();
    let mut index_map = vec![usize::MAX; values.len()];
    let mut rungs: Vec<RungLevel> = Vec::new();
    let mut used_per_gap: Vec<usize> = vec![0; values.len() + 1];

    for it in &items {
        match it {
            Item::Original(n) => {
                // columns of the original basis plus nothing: original pairs
                // are preserved exactly
                index_map[*n] = merged_bases.len();
                merged_bases.push(chain.basis(*n).clone());
                merged_values.push(values[*n]);
            }
            Item::RungReuse { exponent, original } => {
                rungs.push(RungLevel {
                    merged_index: index_map[*original],
                    exponent: *exponent,
                    value: values[*original],
                    inserted: false,
                });
            }
            Item::Rung { exponent, value, gap } => {
                let dir_idx = used_per_gap[*gap];
                used_per_gap[*gap] += 1;
                // base columns: everything below this insertion point
                let mut cols: Vec<Vec<f64>> = if *gap == 0 {
                    Vec::new()
                } else {
                    chain.basis(*gap - 1).columns()
                };
                for extra in gap_dirs[*gap].iter().take(dir_idx + 1) {
                    cols.push(extra.clone());
                }
                rungs.push(RungLevel {
                    merged_index: merged_bases.len(),
                    exponent: *exponent,
                    value: *value,
                    inserted: true,
                });
                merged_bases.push(Matrix::from_cols(chain.ambient_dim(), &cols));
                merged_values.push(*value);
            }
        }
    }

    let merged_chain = SubspaceChain::new(chain.ambient_dim(), merged_bases)
        .map_err(|_| InterleaveError::InvalidChain { level: 0 })?;
    let merged_seq = TargetSequence::new(merged_values, 1, TailModel::None)
        .map_err(|_| InterleaveError::NonMergeable { index: 0 })?;

    Ok(Interleaved {
        chain: merged_chain,
        values: merged_seq,
        index_map,
        rungs,
    })
}
