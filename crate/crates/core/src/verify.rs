//! The verification engine: a grid of contexts and depths expanded into
//! independent check tasks, each re-deriving a structural identity and
//! reporting pass/fail with a witness on failure.
//!
//! The checks, by name:
//!
//! | name | claim |
//! |------|-------|
//! | `oracle-agreement` | digit product = coefficient of `x^b` in the truncated logarithm |
//! | `roots-of-unity-agreement` | digit product = literal root-of-unity average |
//! | `additivity` | the `p` refinements of a coset sum to the coset's value |
//! | `matrix-identities` | digit factors resum to the companion matrix; `R_{k+1} = C^{−1}·R_k` |
//! | `vanishing-adjacent` | adjacent nonzero digits force the zero matrix |
//! | `digit-parity` | `p = 3`, `a_p = 0`: vanishing ⟺ some interior zero-run is even, and the surviving entry is a sign in the parity-determined slot |
//! | `eval-lemma` | depth-`n` logarithm reduces to depth-`k` below the level-`k` cyclotomic |
//! | `valuation-ordinary` | first-column entries have nonnegative unit-root valuation |
//! | `valuation-supersingular` | entry valuations stay above `−(n+3)/2` (odd `p`) |
//! | `window-lemma` | random in-window Laurent sums equal `p^n`·(constant term) |
//! | `hensel` | the lifted unit root satisfies the Hecke polynomial at every precision |
//! | `kronecker` | two-variable values are additive in each variable |
//! | `conjugation-covariance` | entrywise conjugation = column swap |
//!
//! Tasks are deterministic (seeded) and independent, so they can run
//! sequentially or data-parallel with identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::digits::digits;
use crate::distribution::{chromatic, mu, mu_matrix, mu_two_variable};
use crate::error::{Error, Result};
use crate::hecke::{Classification, HeckeData};
use crate::laurent::{constant_term_sum, LaurentPoly};
use crate::logmatrix::eval_lemma_check;
use crate::matrix::QuadMat2;
use crate::oracle::{AveragingOracle, CoefficientOracle, DEFAULT_ROOTS_GATE};
use crate::poly::{PolyQ, Quotient};
use crate::quad::QuadRing;
use crate::rational::{pow_big, pow_u64, rat, ExtValuation};
use crate::tensor::TwoVarValue;

/// Every check name the engine can emit, in report order.
pub const CHECK_NAMES: [&str; 13] = [
    "oracle-agreement",
    "roots-of-unity-agreement",
    "additivity",
    "matrix-identities",
    "vanishing-adjacent",
    "digit-parity",
    "eval-lemma",
    "valuation-ordinary",
    "valuation-supersingular",
    "window-lemma",
    "hensel",
    "kronecker",
    "conjugation-covariance",
];

/// Ceiling on the summed coset count of a grid (fixed-residue cells count
/// once); exceeding it is a configuration error, not a slow run.
pub const DEFAULT_GRID_CAP: u64 = 200_000;

/// Random trials per `(p, n)` pair in the window-lemma check.
const WINDOW_TRIALS: u64 = 200;

/// One (context, depth) pair, optionally restricted to a single residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCell {
    pub ctx: HeckeData,
    pub n: u32,
    pub b: Option<BigInt>,
}

impl GridCell {
    /// `p^n`, guaranteed representable by grid construction.
    pub fn pn(&self) -> u64 {
        pow_u64(self.ctx.p(), self.n).expect("validated at grid construction")
    }

    /// The residues this cell sweeps: one fixed residue, or all of them.
    pub fn cosets(&self) -> Vec<BigInt> {
        match &self.b {
            Some(b) => vec![b.clone()],
            None => (0..self.pn()).map(BigInt::from).collect(),
        }
    }

    fn params(&self) -> String {
        match &self.b {
            Some(b) => format!("{} n={} b={}", self.ctx, self.n, b),
            None => format!("{} n={}", self.ctx, self.n),
        }
    }
}

/// A validated, size-capped collection of grid cells.
#[derive(Debug, Clone)]
pub struct Grid {
    cells: Vec<GridCell>,
}

impl Grid {
    fn from_cells(cells: Vec<GridCell>, cap: u64) -> Result<Grid> {
        let mut size: u128 = 0;
        for cell in &cells {
            let pn = pow_u64(cell.ctx.p(), cell.n).ok_or_else(|| {
                Error::InvalidGrid(format!(
                    "p^n does not fit in 64 bits at p={} n={}",
                    cell.ctx.p(),
                    cell.n
                ))
            })?;
            size += if cell.b.is_some() { 1 } else { u128::from(pn) };
        }
        if size > u128::from(cap) {
            return Err(Error::GridTooLarge {
                size: size.min(u128::from(u64::MAX)) as u64,
                cap,
            });
        }
        Ok(Grid { cells })
    }

    /// The cells, in deterministic construction order.
    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Total number of coset evaluations a full sweep performs.
    pub fn total_cosets(&self) -> u64 {
        self.cells
            .iter()
            .map(|c| if c.b.is_some() { 1 } else { c.pn() })
            .sum()
    }
}

fn default_eps() -> Vec<i8> {
    vec![1, -1]
}

fn default_n_min() -> u32 {
    1
}

/// A declarative grid: the cross product of the listed parameters over the
/// depth range, optionally restricted to one residue.  Residues are decimal
/// strings so arbitrarily large values survive JSON exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub p: Vec<u32>,
    pub ap: Vec<i64>,
    #[serde(default = "default_eps")]
    pub eps: Vec<i8>,
    #[serde(default = "default_n_min")]
    pub n_min: u32,
    pub n_max: u32,
    #[serde(default)]
    pub b: Option<String>,
    #[serde(default)]
    pub cap: Option<u64>,
}

impl GridSpec {
    /// Expand into a concrete cell list, validating every parameter and the
    /// total size.
    pub fn expand(&self) -> Result<Grid> {
        if self.p.is_empty() || self.ap.is_empty() || self.eps.is_empty() {
            return Err(Error::InvalidGrid(
                "p, ap, and eps lists must be nonempty".into(),
            ));
        }
        if self.n_min < 1 || self.n_min > self.n_max {
            return Err(Error::InvalidGrid(format!(
                "depth range {}..={} is empty or starts below 1",
                self.n_min, self.n_max
            )));
        }
        let b = match &self.b {
            Some(s) => Some(
                BigInt::from_str(s)
                    .map_err(|e| Error::Parse(format!("coset residue {s:?}: {e}")))?,
            ),
            None => None,
        };
        let mut cells = Vec::new();
        for &p in &self.p {
            for &ap in &self.ap {
                for &eps in &self.eps {
                    for n in self.n_min..=self.n_max {
                        // depth n+1 is reachable so refinement checks fit
                        let ctx = HeckeData::with_n_max(p, ap, eps, n + 1)?;
                        cells.push(GridCell {
                            ctx,
                            n,
                            b: b.clone(),
                        });
                    }
                }
            }
        }
        Grid::from_cells(cells, self.cap.unwrap_or(DEFAULT_GRID_CAP))
    }
}

/// The built-in verification grid: both classifications at `p ∈ {2, 3, 5}`
/// with every residue swept — 158 cells, 14 336 coset evaluations.
pub fn default_grid() -> Grid {
    let families: [(u32, &[i64], u32); 3] = [
        (2, &[0, 2, -2, 1, -1], 5),
        (3, &[0, 3, -3, 1, -1, 2], 5),
        (5, &[0, 5, -5, 1, -1, 2], 4),
    ];
    let mut cells = Vec::new();
    for (p, aps, n_top) in families {
        for &ap in aps {
            for eps in [1i8, -1] {
                for n in 1..=n_top {
                    let ctx = HeckeData::with_n_max(p, ap, eps, n + 1)
                        .expect("built-in grid parameters are valid");
                    cells.push(GridCell { ctx, n, b: None });
                }
            }
        }
    }
    Grid::from_cells(cells, DEFAULT_GRID_CAP).expect("built-in grid fits the cap")
}

/// Whether the crate was built with data-parallel execution support.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// How to drive the task list.  [`ExecMode::Parallel`] silently degrades to
/// sequential execution when the `parallel` feature is disabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

/// One independent unit of verification work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Task {
    OracleAgreement(GridCell),
    RootsAgreement(GridCell),
    Additivity(GridCell),
    MatrixIdentities(GridCell),
    VanishingAdjacent(GridCell),
    DigitParity { eps: i8 },
    EvalLemma(GridCell),
    ValuationOrdinary(GridCell),
    ValuationSupersingular(GridCell),
    WindowLemma { p: u32, n: u32, seed: u64 },
    Hensel(HeckeData),
    Kronecker { eps: i8 },
    ConjugationCovariance(GridCell),
}

impl Task {
    /// The check name this task contributes to.
    pub fn check(&self) -> &'static str {
        match self {
            Task::OracleAgreement(_) => "oracle-agreement",
            Task::RootsAgreement(_) => "roots-of-unity-agreement",
            Task::Additivity(_) => "additivity",
            Task::MatrixIdentities(_) => "matrix-identities",
            Task::VanishingAdjacent(_) => "vanishing-adjacent",
            Task::DigitParity { .. } => "digit-parity",
            Task::EvalLemma(_) => "eval-lemma",
            Task::ValuationOrdinary(_) => "valuation-ordinary",
            Task::ValuationSupersingular(_) => "valuation-supersingular",
            Task::WindowLemma { .. } => "window-lemma",
            Task::Hensel(_) => "hensel",
            Task::Kronecker { .. } => "kronecker",
            Task::ConjugationCovariance(_) => "conjugation-covariance",
        }
    }

    /// A human-readable parameter summary.
    pub fn params(&self) -> String {
        match self {
            Task::OracleAgreement(c)
            | Task::RootsAgreement(c)
            | Task::Additivity(c)
            | Task::MatrixIdentities(c)
            | Task::VanishingAdjacent(c)
            | Task::EvalLemma(c)
            | Task::ValuationOrdinary(c)
            | Task::ValuationSupersingular(c)
            | Task::ConjugationCovariance(c) => c.params(),
            Task::DigitParity { eps } => format!("p=3 ap=0 eps={eps:+} n<=6"),
            Task::WindowLemma { p, n, seed } => {
                format!("p={p} n={n} trials={WINDOW_TRIALS} seed={seed}")
            }
            Task::Hensel(ctx) => format!("{ctx} precision<=8"),
            Task::Kronecker { eps } => format!("p=3 ap=0 eps={eps:+} refined depth<=3"),
        }
    }

    /// Execute the task to completion.
    pub fn run(&self) -> CheckOutcome {
        let (cases, witness) = match self {
            Task::OracleAgreement(c) => oracle_agreement(c),
            Task::RootsAgreement(c) => roots_agreement(c),
            Task::Additivity(c) => additivity(c),
            Task::MatrixIdentities(c) => matrix_identities(c),
            Task::VanishingAdjacent(c) => vanishing_adjacent(c),
            Task::DigitParity { eps } => digit_parity(*eps),
            Task::EvalLemma(c) => eval_lemma(c),
            Task::ValuationOrdinary(c) => valuation_ordinary(c),
            Task::ValuationSupersingular(c) => valuation_supersingular(c),
            Task::WindowLemma { p, n, seed } => window_lemma(*p, *n, *seed),
            Task::Hensel(ctx) => hensel(ctx),
            Task::Kronecker { eps } => kronecker(*eps),
            Task::ConjugationCovariance(c) => conjugation_covariance(c),
        };
        CheckOutcome {
            check: self.check().to_string(),
            params: self.params(),
            cases,
            pass: witness.is_none(),
            witness,
        }
    }
}

fn mix_seed(seed: u64, p: u32, n: u32) -> u64 {
    seed ^ u64::from(p).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ u64::from(n).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Expand a grid into the deterministic task list.
pub fn build_tasks(grid: &Grid, seed: u64) -> Vec<Task> {
    let mut tasks = Vec::new();
    let mut hensel_ctxs: BTreeSet<(u32, i64, i8)> = BTreeSet::new();
    let mut parity_eps: BTreeSet<i8> = BTreeSet::new();
    let mut window: BTreeSet<(u32, u32)> = BTreeSet::new();
    for cell in grid.cells() {
        let ctx = &cell.ctx;
        tasks.push(Task::OracleAgreement(cell.clone()));
        if cell.pn() <= DEFAULT_ROOTS_GATE {
            tasks.push(Task::RootsAgreement(cell.clone()));
        }
        tasks.push(Task::Additivity(cell.clone()));
        tasks.push(Task::MatrixIdentities(cell.clone()));
        tasks.push(Task::VanishingAdjacent(cell.clone()));
        tasks.push(Task::EvalLemma(cell.clone()));
        tasks.push(Task::ConjugationCovariance(cell.clone()));
        match ctx.classify() {
            Classification::Ordinary => {
                tasks.push(Task::ValuationOrdinary(cell.clone()));
                hensel_ctxs.insert((ctx.p(), ctx.ap(), ctx.eps()));
            }
            Classification::Supersingular => {
                if ctx.p() != 2 {
                    tasks.push(Task::ValuationSupersingular(cell.clone()));
                }
            }
        }
        if ctx.p() == 3 && ctx.ap() == 0 {
            parity_eps.insert(ctx.eps());
        }
        if cell.pn() <= 81 {
            window.insert((ctx.p(), cell.n));
        }
    }
    for (p, ap, eps) in hensel_ctxs {
        tasks.push(Task::Hensel(
            HeckeData::new(p, ap, eps).expect("validated by the grid"),
        ));
    }
    for &eps in &parity_eps {
        tasks.push(Task::DigitParity { eps });
    }
    for &eps in &parity_eps {
        tasks.push(Task::Kronecker { eps });
    }
    for (p, n) in window {
        tasks.push(Task::WindowLemma {
            p,
            n,
            seed: mix_seed(seed, p, n),
        });
    }
    tasks
}

/// Run tasks to outcomes, preserving task order in the output.
pub fn run_tasks(tasks: &[Task], mode: ExecMode) -> Vec<CheckOutcome> {
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return tasks.par_iter().map(Task::run).collect();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = mode;
    tasks.iter().map(Task::run).collect()
}

/// Expand, run, and aggregate in one step.
pub fn run_checks(grid: &Grid, seed: u64, mode: ExecMode) -> Report {
    let tasks = build_tasks(grid, seed);
    Report::from_outcomes(run_tasks(&tasks, mode))
}

/// The result of one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub params: String,
    /// Elementary comparisons performed before success or first failure.
    pub cases: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Aggregate counts over a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub cases: u64,
}

/// All outcomes of a verification run plus their aggregate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub summary: Summary,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    /// Wrap raw outcomes with their aggregate counts.
    pub fn from_outcomes(checks: Vec<CheckOutcome>) -> Report {
        let total = checks.len();
        let passed = checks.iter().filter(|c| c.pass).count();
        let cases = checks.iter().map(|c| c.cases).sum();
        Report {
            summary: Summary {
                total,
                passed,
                failed: total - passed,
                cases,
            },
            checks,
        }
    }

    /// Whether every task passed.
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        struct Group {
            runs: usize,
            cases: u64,
            failures: Vec<(String, String)>,
        }
        let mut groups: BTreeMap<&str, Group> = BTreeMap::new();
        let mut order: Vec<&str> = Vec::new();
        for name in CHECK_NAMES {
            if self.checks.iter().any(|c| c.check == name) {
                order.push(name);
            }
        }
        for c in &self.checks {
            if !order.contains(&c.check.as_str()) {
                order.push(&c.check);
            }
            let g = groups.entry(c.check.as_str()).or_insert(Group {
                runs: 0,
                cases: 0,
                failures: Vec::new(),
            });
            g.runs += 1;
            g.cases += c.cases;
            if !c.pass {
                g.failures.push((
                    c.params.clone(),
                    c.witness
                        .clone()
                        .unwrap_or_else(|| "unspecified failure".into()),
                ));
            }
        }
        for name in &order {
            let g = &groups[name];
            let status = if g.failures.is_empty() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{status}  {name:<26} {:>5} runs  {:>8} cases",
                g.runs, g.cases
            )?;
            for (params, witness) in g.failures.iter().take(3) {
                writeln!(f, "        {params}: {witness}")?;
            }
            if g.failures.len() > 3 {
                writeln!(f, "        ... and {} more failures", g.failures.len() - 3)?;
            }
        }
        write!(
            f,
            "overall: {} - {} runs, {} passed, {} failed, {} cases",
            if self.passed() { "PASS" } else { "FAIL" },
            self.summary.total,
            self.summary.passed,
            self.summary.failed,
            self.summary.cases
        )
    }
}

fn fmt_mat(m: &QuadMat2) -> String {
    serde_json::to_string(m).expect("matrices serialize")
}

macro_rules! try_case {
    ($cases:expr, $expr:expr, $what:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return ($cases, Some(format!("{} failed: {e}", $what))),
        }
    };
}

fn oracle_agreement(cell: &GridCell) -> (u64, Option<String>) {
    let mut cases = 0;
    let oracle = try_case!(cases, CoefficientOracle::new(&cell.ctx, cell.n), "oracle setup");
    for b in cell.cosets() {
        cases += 1;
        let lhs = try_case!(cases, mu_matrix(&cell.ctx, &b, cell.n), "digit product");
        let rhs = try_case!(cases, oracle.value(&b), "coefficient extraction");
        if lhs != rhs {
            return (
                cases,
                Some(format!(
                    "b={b}: digit product {} != coefficient oracle {}",
                    fmt_mat(&lhs),
                    fmt_mat(&rhs)
                )),
            );
        }
    }
    (cases, None)
}

fn roots_agreement(cell: &GridCell) -> (u64, Option<String>) {
    let mut cases = 0;
    let oracle = try_case!(cases, AveragingOracle::new(&cell.ctx, cell.n), "oracle setup");
    for b in cell.cosets() {
        cases += 1;
        let lhs = try_case!(cases, mu_matrix(&cell.ctx, &b, cell.n), "digit product");
        let rhs = oracle.value(&b);
        if lhs != rhs {
            return (
                cases,
                Some(format!(
                    "b={b}: digit product {} != root-of-unity average {}",
                    fmt_mat(&lhs),
                    fmt_mat(&rhs)
                )),
            );
        }
    }
    (cases, None)
}

fn additivity(cell: &GridCell) -> (u64, Option<String>) {
    let ctx = &cell.ctx;
    let mut cases = 0;
    let pn = BigInt::from(cell.pn());
    for b in cell.cosets() {
        cases += 1;
        let coarse = try_case!(cases, mu_matrix(ctx, &b, cell.n), "digit product");
        let mut sum = QuadMat2::zero(ctx.ring());
        for j in 0..ctx.p() {
            let refined = &b + BigInt::from(j) * &pn;
            let part = try_case!(
                cases,
                mu_matrix(ctx, &refined, cell.n + 1),
                "refined digit product"
            );
            sum = try_case!(cases, sum.checked_add(&part), "matrix sum");
        }
        if sum != coarse {
            return (
                cases,
                Some(format!(
                    "b={b}: refinements sum to {} instead of {}",
                    fmt_mat(&sum),
                    fmt_mat(&coarse)
                )),
            );
        }
    }
    (cases, None)
}

fn matrix_identities(cell: &GridCell) -> (u64, Option<String>) {
    let ctx = &cell.ctx;
    let mut cases = 0;
    let companion = ctx.companion();
    let z = try_case!(cases, chromatic(ctx, 0), "zero-digit factor");
    let nz = try_case!(cases, chromatic(ctx, 1), "nonzero-digit factor");
    for d in 2..ctx.p() {
        cases += 1;
        let yd = try_case!(cases, chromatic(ctx, d), "digit factor");
        if yd != nz {
            return (
                cases,
                Some(format!("digit factors for d=1 and d={d} differ")),
            );
        }
    }
    cases += 1;
    let resum = try_case!(
        cases,
        z.checked_add(&nz.scale(&rat(i64::from(ctx.p()) - 1))),
        "factor sum"
    );
    if resum != companion {
        return (
            cases,
            Some(format!(
                "digit factors resum to {} instead of the companion matrix {}",
                fmt_mat(&resum),
                fmt_mat(&companion)
            )),
        );
    }
    let cinv = try_case!(cases, companion.inverse(), "companion inverse");
    for k in 0..=cell.n {
        cases += 1;
        let lhs = ctx.root_matrix(k + 1);
        let rhs = try_case!(cases, cinv.checked_mul(&ctx.root_matrix(k)), "recursion step");
        if lhs != rhs {
            return (
                cases,
                Some(format!(
                    "normalization recursion fails at depth {}: {} != C^-1 * R_{k}",
                    k + 1,
                    fmt_mat(&lhs)
                )),
            );
        }
    }
    (cases, None)
}

fn vanishing_adjacent(cell: &GridCell) -> (u64, Option<String>) {
    let mut cases = 0;
    for b in cell.cosets() {
        let ds = try_case!(cases, digits(&b, cell.n, cell.ctx.p()), "digit expansion");
        if !ds.has_adjacent_nonzero() {
            continue;
        }
        cases += 1;
        let m = try_case!(cases, mu_matrix(&cell.ctx, &b, cell.n), "digit product");
        if !m.is_zero() {
            return (
                cases,
                Some(format!(
                    "b={b}: adjacent nonzero digits {:?} but nonzero matrix {}",
                    ds.digits(),
                    fmt_mat(&m)
                )),
            );
        }
    }
    (cases, None)
}

fn digit_parity(eps: i8) -> (u64, Option<String>) {
    let mut cases = 0;
    let ctx = try_case!(cases, HeckeData::with_n_max(3, 0, eps, 7), "context");
    let z = try_case!(cases, chromatic(&ctx, 0), "zero-digit factor");
    for n in 1..=6u32 {
        let rn_inv = try_case!(cases, ctx.root_matrix(n).inverse(), "normalization inverse");
        let pn = 3i64.pow(n);
        for b in 0..pn {
            cases += 1;
            let v = try_case!(cases, mu(&ctx, &BigInt::from(b), n), "digit product");
            let interior_odd = v.runs.interior_runs().iter().all(|m| m % 2 == 1);
            if v.matrix.is_zero() == interior_odd {
                return (
                    cases,
                    Some(format!(
                        "b={b} n={n}: vanishing disagrees with zero-run parity (runs {:?})",
                        v.runs.runs()
                    )),
                );
            }
            if !interior_odd {
                continue;
            }
            let w = try_case!(cases, v.matrix.checked_mul(&rn_inv), "unnormalized product");
            let runs = v.runs.runs();
            if v.runs.nonzero_count() == 0 {
                let expected = try_case!(cases, z.pow(i64::from(n)), "zero-digit power");
                if w != expected {
                    return (
                        cases,
                        Some(format!(
                            "b={b} n={n}: all-zero digits give {} instead of {}",
                            fmt_mat(&w),
                            fmt_mat(&expected)
                        )),
                    );
                }
                continue;
            }
            let row = usize::from(runs[0] % 2 != 1);
            let col = usize::from(runs[runs.len() - 1] % 2 == 1);
            for i in 0..2 {
                for j in 0..2 {
                    let x = w.entry(i, j);
                    if (i, j) == (row, col) {
                        if !(x.is_rational() && x.c0().abs() == rat(1)) {
                            return (
                                cases,
                                Some(format!(
                                    "b={b} n={n}: surviving slot ({i},{j}) holds {x}, not a sign"
                                )),
                            );
                        }
                    } else if !x.is_zero() {
                        return (
                            cases,
                            Some(format!(
                                "b={b} n={n}: unexpected nonzero entry at ({i},{j}): {x}"
                            )),
                        );
                    }
                }
            }
        }
    }
    (cases, None)
}

fn eval_lemma(cell: &GridCell) -> (u64, Option<String>) {
    let mut cases = 0;
    let lo = cell.n.saturating_sub(3).max(1);
    for k in lo..=cell.n {
        cases += 1;
        let ok = try_case!(
            cases,
            eval_lemma_check(&cell.ctx, k, cell.n),
            "reduction comparison"
        );
        if !ok {
            return (
                cases,
                Some(format!(
                    "depth {} does not reduce to depth {k} below the level-{k} cyclotomic",
                    cell.n
                )),
            );
        }
    }
    (cases, None)
}

fn valuation_ordinary(cell: &GridCell) -> (u64, Option<String>) {
    let ctx = &cell.ctx;
    let mut cases = 0;
    let floor = ExtValuation::finite_int(0);
    for b in cell.cosets() {
        let m = try_case!(cases, mu_matrix(ctx, &b, cell.n), "digit product");
        for i in 0..2 {
            cases += 1;
            let v = try_case!(cases, ctx.hensel_vp_auto(m.entry(i, 0)), "unit-root valuation");
            if v < floor {
                return (
                    cases,
                    Some(format!(
                        "b={b}: first-column entry ({i},0) has valuation {v} below 0"
                    )),
                );
            }
        }
    }
    (cases, None)
}

fn valuation_supersingular(cell: &GridCell) -> (u64, Option<String>) {
    let mut cases = 0;
    let floor = ExtValuation::finite_ratio(-(i64::from(cell.n) + 3), 2);
    for b in cell.cosets() {
        cases += 1;
        let m = try_case!(cases, mu_matrix(&cell.ctx, &b, cell.n), "digit product");
        let v = try_case!(cases, m.min_quad_vp(), "matrix valuation");
        if v < floor {
            return (
                cases,
                Some(format!(
                    "b={b}: entry valuation {v} drops below -(n+3)/2 = {floor}"
                )),
            );
        }
    }
    (cases, None)
}

fn window_lemma(p: u32, n: u32, seed: u64) -> (u64, Option<String>) {
    let mut cases = 0;
    let ring = try_case!(cases, QuadRing::new(p, 0, 1), "coefficient ring");
    let pn = pow_u64(p, n).expect("gated by task construction");
    let quotient = try_case!(cases, Quotient::cyclotomic(ring, n), "cyclotomic quotient");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let bound = pn as i64;
    for _ in 0..WINDOW_TRIALS {
        cases += 1;
        let k = rng.gen_range(1..=8);
        let mut terms = Vec::with_capacity(k);
        for _ in 0..k {
            let e = rng.gen_range(-(bound - 1)..=(bound - 1));
            let c0 = crate::rational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
            let c1 = crate::rational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
            terms.push((e, ring.elem(c0, c1)));
        }
        let f = try_case!(cases, LaurentPoly::from_terms(ring, terms), "random polynomial");
        let shortcut = try_case!(cases, constant_term_sum(&f, p, n), "window shortcut");
        // Brute force: fold exponents to [0, p^n), substitute x ↦ x^j for
        // every j, and reduce by the primitive root's minimal polynomial.
        let mut folded = PolyQ::zero(ring);
        for (e, c) in f.terms() {
            let fe = e.rem_euclid(bound) as usize;
            folded = try_case!(
                cases,
                folded.checked_add(&PolyQ::monomial(c.clone(), fe)),
                "exponent folding"
            );
        }
        let mut total = PolyQ::zero(ring);
        for j in 0..pn {
            total = try_case!(
                cases,
                total.checked_add(&folded.substitute_power(j, pn)),
                "substitution sum"
            );
        }
        let reduced = quotient.reduce(&total);
        if reduced != PolyQ::constant(shortcut.clone()) {
            return (
                cases,
                Some(format!(
                    "brute-force sum of {f} disagrees with p^n * constant term = {shortcut}"
                )),
            );
        }
    }
    (cases, None)
}

fn hensel(ctx: &HeckeData) -> (u64, Option<String>) {
    let mut cases = 0;
    let p_big = BigInt::from(ctx.p());
    let mut prev: Option<BigInt> = None;
    for precision in 1..=8u32 {
        cases += 1;
        let root = try_case!(cases, ctx.hensel_unit_root(precision), "unit-root lift");
        let r = BigInt::from(root);
        let value = &r * &r - BigInt::from(ctx.ap()) * &r
            + BigInt::from(i64::from(ctx.eps()) * i64::from(ctx.p()));
        let modulus = BigInt::from(pow_big(ctx.p(), precision));
        if !value.mod_floor(&modulus).is_zero() {
            return (
                cases,
                Some(format!(
                    "precision {precision}: the Hecke polynomial does not vanish mod p^{precision} at {r}"
                )),
            );
        }
        if precision == 1 {
            cases += 1;
            if !(&r - BigInt::from(ctx.ap())).mod_floor(&p_big).is_zero() {
                return (
                    cases,
                    Some(format!("unit-root branch violated: {r} is not a_p mod p")),
                );
            }
        }
        if let Some(prev_r) = &prev {
            cases += 1;
            let m = BigInt::from(pow_big(ctx.p(), precision - 1));
            if !(&r - prev_r).mod_floor(&m).is_zero() {
                return (
                    cases,
                    Some(format!(
                        "lift at precision {precision} is incoherent with precision {}",
                        precision - 1
                    )),
                );
            }
        }
        prev = Some(r);
    }
    (cases, None)
}

fn kronecker(eps: i8) -> (u64, Option<String>) {
    let mut cases = 0;
    let c1 = try_case!(cases, HeckeData::with_n_max(3, 0, eps, 4), "context");
    let c2 = try_case!(cases, HeckeData::with_n_max(3, 3, eps, 4), "context");
    let fixed: [(i64, u32); 4] = [(0, 1), (1, 2), (4, 2), (2, 3)];
    // refine the first variable against fixed second factors
    for n1 in 1..=2u32 {
        let pn1 = 3i64.pow(n1);
        for b1 in 0..pn1 {
            for &(b2, n2) in &fixed {
                cases += 1;
                let coarse = try_case!(
                    cases,
                    mu_two_variable(&c1, &BigInt::from(b1), n1, &c1, &BigInt::from(b2), n2),
                    "two-variable value"
                );
                let mut sum: Option<TwoVarValue> = None;
                for j in 0..3 {
                    let part = try_case!(
                        cases,
                        mu_two_variable(
                            &c1,
                            &BigInt::from(b1 + j * pn1),
                            n1 + 1,
                            &c1,
                            &BigInt::from(b2),
                            n2
                        ),
                        "refined value"
                    );
                    sum = Some(match sum {
                        None => part,
                        Some(s) => try_case!(cases, s.checked_add(&part), "tensor sum"),
                    });
                }
                if sum.as_ref() != Some(&coarse) {
                    return (
                        cases,
                        Some(format!(
                            "first-variable additivity fails at b1={b1} n1={n1}, b2={b2} n2={n2}"
                        )),
                    );
                }
            }
        }
    }
    // refine the second variable, against a same-ring and a mixed-ring left factor
    for &(b1, n1) in &fixed {
        for n2 in 1..=2u32 {
            let pn2 = 3i64.pow(n2);
            for b2 in 0..pn2 {
                for other in [&c1, &c2] {
                    cases += 1;
                    let coarse = try_case!(
                        cases,
                        mu_two_variable(&c1, &BigInt::from(b1), n1, other, &BigInt::from(b2), n2),
                        "two-variable value"
                    );
                    let mut sum: Option<TwoVarValue> = None;
                    for j in 0..3 {
                        let part = try_case!(
                            cases,
                            mu_two_variable(
                                &c1,
                                &BigInt::from(b1),
                                n1,
                                other,
                                &BigInt::from(b2 + j * pn2),
                                n2 + 1
                            ),
                            "refined value"
                        );
                        sum = Some(match sum {
                            None => part,
                            Some(s) => try_case!(cases, s.checked_add(&part), "tensor sum"),
                        });
                    }
                    if sum.as_ref() != Some(&coarse) {
                        return (
                            cases,
                            Some(format!(
                                "second-variable additivity fails at b1={b1} n1={n1}, b2={b2} n2={n2} (ap2={})",
                                other.ap()
                            )),
                        );
                    }
                }
            }
        }
    }
    (cases, None)
}

fn conjugation_covariance(cell: &GridCell) -> (u64, Option<String>) {
    let mut cases = 0;
    for b in cell.cosets() {
        cases += 1;
        let m = try_case!(cases, mu_matrix(&cell.ctx, &b, cell.n), "digit product");
        if m.conj_entrywise() != m.swap_columns() {
            return (
                cases,
                Some(format!(
                    "b={b}: entrywise conjugate of {} is not its column swap",
                    fmt_mat(&m)
                )),
            );
        }
    }
    (cases, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 158);
        assert_eq!(g.total_cosets(), 14_336);
    }

    #[test]
    fn spec_expansion_and_defaults() {
        let spec: GridSpec =
            serde_json::from_str(r#"{"p": [3], "ap": [1], "n_max": 2}"#).unwrap();
        assert_eq!(spec.eps, vec![1, -1]);
        assert_eq!(spec.n_min, 1);
        let g = spec.expand().unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.total_cosets(), 2 * (3 + 9));
    }

    #[test]
    fn spec_validation() {
        let empty: GridSpec =
            serde_json::from_str(r#"{"p": [], "ap": [1], "n_max": 2}"#).unwrap();
        assert!(matches!(empty.expand(), Err(Error::InvalidGrid(_))));

        let zero_min: GridSpec =
            serde_json::from_str(r#"{"p": [3], "ap": [1], "n_min": 0, "n_max": 2}"#).unwrap();
        assert!(matches!(zero_min.expand(), Err(Error::InvalidGrid(_))));

        let composite: GridSpec =
            serde_json::from_str(r#"{"p": [6], "ap": [1], "n_max": 2}"#).unwrap();
        assert!(matches!(composite.expand(), Err(Error::NonPrime(6))));

        let capped: GridSpec =
            serde_json::from_str(r#"{"p": [3], "ap": [1], "n_max": 5, "cap": 100}"#).unwrap();
        assert!(matches!(capped.expand(), Err(Error::GridTooLarge { .. })));

        let bad_b: GridSpec =
            serde_json::from_str(r#"{"p": [3], "ap": [1], "n_max": 2, "b": "12x"}"#).unwrap();
        assert!(matches!(bad_b.expand(), Err(Error::Parse(_))));
    }

    #[test]
    fn fixed_residue_counts_once() {
        let spec: GridSpec = serde_json::from_str(
            r#"{"p": [3], "ap": [0], "eps": [1], "n_max": 3, "b": "123456789012345678901234567890"}"#,
        )
        .unwrap();
        let g = spec.expand().unwrap();
        assert_eq!(g.total_cosets(), 3);
        assert!(g.cells().iter().all(|c| c.b.is_some()));
    }

    #[test]
    fn task_list_is_deterministic_and_gated() {
        let g = default_grid();
        let t1 = build_tasks(&g, 7);
        let t2 = build_tasks(&g, 7);
        assert_eq!(t1, t2);
        // the averaging oracle is only scheduled below its gate
        for t in &t1 {
            if let Task::RootsAgreement(cell) = t {
                assert!(cell.pn() <= DEFAULT_ROOTS_GATE);
            }
        }
        assert!(t1
            .iter()
            .any(|t| matches!(t, Task::RootsAgreement(c) if c.pn() == 243)));
        assert!(!t1.is_empty());
    }

    #[test]
    fn small_grid_passes_in_both_modes() {
        let spec: GridSpec =
            serde_json::from_str(r#"{"p": [3], "ap": [0], "eps": [1], "n_max": 2}"#).unwrap();
        let g = spec.expand().unwrap();
        let seq = run_checks(&g, 0, ExecMode::Sequential);
        let par = run_checks(&g, 0, ExecMode::Parallel);
        assert!(seq.passed(), "sequential failures:\n{seq}");
        assert_eq!(seq, par, "execution mode must not change the report");
        let names: BTreeSet<&str> = seq.checks.iter().map(|c| c.check.as_str()).collect();
        for expected in [
            "oracle-agreement",
            "roots-of-unity-agreement",
            "additivity",
            "matrix-identities",
            "vanishing-adjacent",
            "digit-parity",
            "eval-lemma",
            "valuation-supersingular",
            "window-lemma",
            "kronecker",
            "conjugation-covariance",
        ] {
            assert!(names.contains(expected), "missing {expected}");
        }
        // no ordinary context in this grid, so no ordinary-only checks
        assert!(!names.contains("valuation-ordinary"));
        assert!(!names.contains("hensel"));
    }

    #[test]
    fn ordinary_grid_schedules_unit_root_checks() {
        let spec: GridSpec =
            serde_json::from_str(r#"{"p": [3], "ap": [1], "eps": [-1], "n_max": 2}"#).unwrap();
        let g = spec.expand().unwrap();
        let report = run_checks(&g, 1, ExecMode::Sequential);
        assert!(report.passed(), "failures:\n{report}");
        let names: BTreeSet<&str> = report.checks.iter().map(|c| c.check.as_str()).collect();
        assert!(names.contains("valuation-ordinary"));
        assert!(names.contains("hensel"));
        assert!(!names.contains("valuation-supersingular"));
        assert!(!names.contains("digit-parity"));
    }

    #[test]
    fn report_aggregation_and_rendering() {
        let outcomes = vec![
            CheckOutcome {
                check: "additivity".into(),
                params: "p=3".into(),
                cases: 5,
                pass: true,
                witness: None,
            },
            CheckOutcome {
                check: "additivity".into(),
                params: "p=5".into(),
                cases: 2,
                pass: false,
                witness: Some("b=1: sums differ".into()),
            },
        ];
        let report = Report::from_outcomes(outcomes);
        assert!(!report.passed());
        assert_eq!(report.summary.total, 2);
        assert_eq!(report.summary.passed, 1);
        assert_eq!(report.summary.failed, 1);
        assert_eq!(report.summary.cases, 7);
        let text = report.to_string();
        assert!(text.contains("FAIL"));
        assert!(text.contains("b=1: sums differ"));
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["summary"]["failed"], 1);
        assert_eq!(json["checks"][0]["pass"], true);
        assert!(json["checks"][0].get("witness").is_none());
    }

    #[test]
    fn seed_changes_window_tasks_only() {
        let g = default_grid();
        let a = build_tasks(&g, 0);
        let b = build_tasks(&g, 1);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            match (x, y) {
                (Task::WindowLemma { seed: sx, .. }, Task::WindowLemma { seed: sy, .. }) => {
                    assert_ne!(sx, sy);
                }
                _ => assert_eq!(x, y),
            }
        }
    }
}
