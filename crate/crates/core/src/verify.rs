//! The cross-module verification grids: every formula is checked against an
//! independent route (closed form vs. exhaustive enumeration, certificate vs.
//! invariant), one result row per criterion. Shared by the `verify` CLI
//! command and the acceptance test suite.

use crate::edim;
use crate::error::{Error, Result};
use crate::exact::{FieldDescriptor, FieldElem};
use crate::fdalg;
use crate::insep;
use crate::lambda::{self, EType};
use crate::Limits;

/// One verification row.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(id: &str, name: &str, detail: String) -> Self {
        CheckResult {
            id: id.into(),
            name: name.into(),
            passed: true,
            detail,
        }
    }

    fn fail(id: &str, name: &str, detail: String) -> Self {
        CheckResult {
            id: id.into(),
            name: name.into(),
            passed: false,
            detail,
        }
    }
}

/// Restrictions applied to every grid, from the `--grid` flag.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub p_exact: Option<u64>,
    pub p_max: u64,
    pub n_max: u64,
    pub r_max: usize,
    pub e1_max: u32,
    pub q_max: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            p_exact: None,
            p_max: u64::MAX,
            n_max: u64::MAX,
            r_max: usize::MAX,
            e1_max: u32::MAX,
            q_max: u64::MAX,
        }
    }
}

impl GridSpec {
    /// Parse constraints like `r<=2,p=2,q<=4,n<=3,e1<=2`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut spec = GridSpec::default();
        for part in src.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, op, value) = if let Some((k, v)) = part.split_once("<=") {
                (k.trim(), "<=", v.trim())
            } else if let Some((k, v)) = part.split_once('=') {
                (k.trim(), "=", v.trim())
            } else {
                return Err(Error::Invalid(format!("bad grid constraint {part:?}")));
            };
            let value: u64 = value
                .parse()
                .map_err(|_| Error::Invalid(format!("bad grid value {part:?}")))?;
            match (key, op) {
                ("p", "=") => spec.p_exact = Some(value),
                ("p", "<=") => spec.p_max = value,
                ("n", _) => spec.n_max = value,
                ("r", _) => spec.r_max = value as usize,
                ("e1", _) => spec.e1_max = value as u32,
                ("q", _) => spec.q_max = value,
                _ => return Err(Error::Invalid(format!("unknown grid key {key:?}"))),
            }
        }
        Ok(spec)
    }

    fn primes(&self, base: &[u64]) -> Vec<u64> {
        base.iter()
            .copied()
            .filter(|&p| p <= self.p_max && self.p_exact.map_or(true, |x| x == p))
            .collect()
    }
}

/// All nonincreasing exponent vectors with r <= r_max and e_1 <= e1_max.
fn etypes(r_max: usize, e1_max: u32) -> Vec<EType> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u32>> = (1..=e1_max).map(|e| vec![e]).collect();
    while let Some(e) = stack.pop() {
        if e.len() <= r_max {
            out.push(EType::new(e.clone()).unwrap());
            if e.len() < r_max {
                let last = *e.last().unwrap();
                for next in 1..=last {
                    let mut bigger = e.clone();
                    bigger.push(next);
                    stack.push(bigger);
                }
            }
        }
    }
    out.sort_by_key(|e| (e.r(), e.exps().to_vec()));
    out
}

/// Sanity of the finite-field tables: the canary that trips under the
/// fault-injection test hook.
fn check_field_tables() -> CheckResult {
    let id = "C0";
    let name = "field-tables";
    let run = || -> Result<String> {
        for (p, k) in [(2u64, 2u32), (3, 2)] {
            let f = FieldDescriptor::finite(p, k)?;
            let elems = f.enumerate_elements()?;
            let order = elems.len() as u128;
            for x in &elems {
                // multiplicative order divides q − 1; Frobenius order divides k
                if !x.is_zero() && !x.pow(order - 1)?.is_one() {
                    return Err(Error::Internal(format!(
                        "x^(q−1) != 1 in F_{{{p}^{k}}}"
                    )));
                }
                if &x.frobenius(k)? != x {
                    return Err(Error::Internal(format!(
                        "Frobenius^{k} is not the identity on F_{{{p}^{k}}}"
                    )));
                }
                for y in &elems {
                    let lhs = x.add(y).frobenius(1)?;
                    let rhs = x.frobenius(1)?.add(&y.frobenius(1)?);
                    if lhs != rhs {
                        return Err(Error::Internal("Frobenius is not additive".into()));
                    }
                }
            }
        }
        Ok("F_4 and F_9 pass order, Frobenius and additivity checks".into())
    };
    match run() {
        Ok(detail) => CheckResult::pass(id, name, detail),
        Err(e) => CheckResult::fail(id, name, e.to_string()),
    }
}

/// Criterion 1: τ = upper = Lie lower bound on the full parameter grid.
fn check_formula_sandwich(grid: &GridSpec) -> CheckResult {
    let id = "C1";
    let name = "formula-sandwich";
    let mut points = 0usize;
    for p in grid.primes(&[2, 3, 5]) {
        for e in etypes(4.min(grid.r_max), 4.min(grid.e1_max)) {
            for n in 1..=4.min(grid.n_max) {
                match edim::ed_report(n, &e, p) {
                    Ok(rep) => {
                        if !rep.ratio_bound_ok {
                            return CheckResult::fail(
                                id,
                                name,
                                format!("ratio bound failed at p={p} n={n} e={e}"),
                            );
                        }
                        points += 1;
                    }
                    Err(err) => {
                        return CheckResult::fail(
                            id,
                            name,
                            format!("p={p} n={n} e={e}: {err}"),
                        )
                    }
                }
            }
        }
    }
    CheckResult::pass(id, name, format!("{points} grid points agree three ways"))
}

/// Criterion 2: enumerated α and End point counts match the closed forms.
fn check_point_counts(grid: &GridSpec, limits: &Limits) -> CheckResult {
    let id = "C2";
    let name = "point-counts";
    let mut checks = 0usize;
    let mut guarded = 0usize;
    for p in grid.primes(&[2, 3]) {
        for e in etypes(usize::MAX.min(grid.r_max), u32::MAX.min(grid.e1_max)) {
            let dim = match e.lambda_dim(p) {
                Ok(d) => d,
                Err(_) => continue,
            };
            if dim > 8 {
                continue;
            }
            for qk in 1..=2u32 {
                let q = p.pow(qk);
                if q > grid.q_max {
                    continue;
                }
                let q_desc = match FieldDescriptor::finite(p, qk) {
                    Ok(d) => d,
                    Err(err) => return CheckResult::fail(id, name, err.to_string()),
                };
                let mut factor_counts: Vec<u128> = Vec::new();
                let mut all_ok = true;
                for l in 1..=e.r() {
                    match lambda::alpha_points(&e, l, &q_desc, limits) {
                        Ok(rep) => {
                            if rep.matches != Some(true) {
                                return CheckResult::fail(
                                    id,
                                    name,
                                    format!(
                                        "alpha count mismatch at p={p} q={q} e={e} l={l}: {:?} vs {:?}",
                                        rep.count, rep.closed_form
                                    ),
                                );
                            }
                            factor_counts.push(rep.count.unwrap());
                            checks += 1;
                        }
                        Err(Error::ResourceGuard(_)) => {
                            guarded += 1;
                            all_ok = false;
                        }
                        Err(err) => return CheckResult::fail(id, name, err.to_string()),
                    }
                }
                if !all_ok {
                    continue;
                }
                match lambda::end_points(&e, &q_desc, limits) {
                    Ok(rep) => {
                        let product: u128 = factor_counts.iter().product();
                        if rep.count != Some(product) || rep.matches != Some(true) {
                            return CheckResult::fail(
                                id,
                                name,
                                format!(
                                    "End count mismatch at p={p} q={q} e={e}: {:?} vs product {product}",
                                    rep.count
                                ),
                            );
                        }
                        checks += 1;
                    }
                    Err(Error::ResourceGuard(_)) => guarded += 1,
                    Err(err) => return CheckResult::fail(id, name, err.to_string()),
                }
            }
        }
    }
    CheckResult::pass(
        id,
        name,
        format!("{checks} enumerations match closed forms ({guarded} guarded)"),
    )
}

/// Criterion 3: wreath-product automorphism counts at the three pinned
/// parameter points.
fn check_wreath_counts(grid: &GridSpec, limits: &Limits) -> CheckResult {
    let id = "C3";
    let name = "wreath-counts";
    let cases: [(u64, &[u32], u64, u32, u128); 3] = [
        (2, &[1], 2, 1, 2),
        (2, &[1], 3, 1, 72),
        (1, &[1, 1], 2, 1, 24),
    ];
    let mut done = 0usize;
    for (n, e, p, qk, expected) in cases {
        if grid.p_exact.map_or(false, |x| x != p) || p > grid.p_max {
            continue;
        }
        let e = EType::new(e.to_vec()).unwrap();
        let q_desc = match FieldDescriptor::finite(p, qk) {
            Ok(d) => d,
            Err(err) => return CheckResult::fail(id, name, err.to_string()),
        };
        match lambda::aut_wreath_count(n, &e, &q_desc, limits) {
            Ok(rep) => {
                if rep.count != Some(expected) {
                    return CheckResult::fail(
                        id,
                        name,
                        format!(
                            "n={n} e={e} p={p}: got {:?}, expected {expected}",
                            rep.count
                        ),
                    );
                }
                done += 1;
            }
            Err(err) => {
                return CheckResult::fail(id, name, format!("n={n} e={e} p={p}: {err}"))
            }
        }
    }
    CheckResult::pass(id, name, format!("{done} wreath counts exact"))
}

/// Shared driver for criteria 4 and 5 over the tower grid (criterion-1 grid
/// restricted to n = 1): returns per-point outcomes.
struct TowerRun {
    ran: usize,
    guarded: usize,
}

fn for_each_tower<F>(grid: &GridSpec, limits: &Limits, mut body: F) -> Result<TowerRun>
where
    F: FnMut(u64, &EType, Option<u64>, &insep::Tower) -> Result<bool>,
{
    let mut run = TowerRun { ran: 0, guarded: 0 };
    for p in grid.primes(&[2, 3, 5]) {
        for e in etypes(4.min(grid.r_max), 4.min(grid.e1_max)) {
            for seed in [None, Some(0), Some(1), Some(7)] {
                let pres = insep::construct_example(&e, p, seed);
                let tower = insep::build_tower(&pres, limits)?;
                match body(p, &e, seed, &tower) {
                    Ok(true) => run.ran += 1,
                    Ok(false) => run.guarded += 1,
                    Err(err) => return Err(err),
                }
            }
        }
    }
    Ok(run)
}

/// Criterion 4: the construct → build → greedy roundtrip recovers the type,
/// with scrambled towers and obfuscated candidate sets, and the certificate
/// size is Σ p^{s_i − i e_i}.
fn check_pickert_roundtrip(grid: &GridSpec, limits: &Limits) -> CheckResult {
    let id = "C4";
    let name = "pickert-roundtrip";
    let result = for_each_tower(grid, limits, |p, e, seed, tower| {
        if tower.dim() > limits.tower_guard as u128 {
            return Ok(false);
        }
        for candidates in [
            insep::default_candidates(tower),
            insep::obfuscated_candidates(tower),
        ] {
            let tr = insep::normal_generating_sequence(tower, &candidates, limits)?;
            if &tr.e != e {
                return Err(Error::Internal(format!(
                    "type {e} not recovered at p={p} seed={seed:?}: got {}",
                    tr.e
                )));
            }
            let cert = insep::descent_certificate(tower, &tr, limits)?;
            let expected = edim::tau(1, e, p)?;
            if cert.bound != expected {
                return Err(Error::Internal(format!(
                    "certificate bound {} differs from τ = {expected} at p={p} e={e}",
                    cert.bound
                )));
            }
        }
        Ok(true)
    });
    match result {
        Ok(run) => CheckResult::pass(
            id,
            name,
            format!(
                "{} tower variants recovered their type ({} beyond the tower guard)",
                run.ran * 2,
                run.guarded
            ),
        ),
        Err(err) => CheckResult::fail(id, name, err.to_string()),
    }
}

/// Criterion 5: [L : K(L^p)] = p^r on the tower grid; in-guard towers use the
/// basis closure, all towers additionally use the derivation route.
fn check_k_lp_index(grid: &GridSpec, limits: &Limits) -> CheckResult {
    let id = "C5";
    let name = "k-lp-index";
    let mut closure_checked = 0usize;
    let result = for_each_tower(grid, limits, |p, e, seed, tower| {
        let expected = (p as u128).pow(e.r() as u32);
        let via_der = insep::k_lp_index_via_derivations(tower)?;
        if via_der != expected {
            return Err(Error::Internal(format!(
                "derivation index {via_der} != p^r = {expected} at p={p} e={e} seed={seed:?}"
            )));
        }
        if tower.dim() <= limits.tower_guard as u128 {
            let via_closure = insep::k_lp_index(tower, limits)?;
            if via_closure != expected {
                return Err(Error::Internal(format!(
                    "closure index {via_closure} != p^r = {expected} at p={p} e={e} seed={seed:?}"
                )));
            }
            closure_checked += 1;
            Ok(true)
        } else {
            Ok(false)
        }
    });
    match result {
        Ok(run) => CheckResult::pass(
            id,
            name,
            format!(
                "derivation route on {} towers, closure route on {closure_checked}",
                run.ran + run.guarded
            ),
        ),
        Err(err) => CheckResult::fail(id, name, err.to_string()),
    }
}

/// Criterion 6: idempotents of Λ_e ⊗ R lie in R·1 for R in {F_2, F_4, F_3}
/// and for the dual numbers over F_2.
fn check_idempotent_rigidity(grid: &GridSpec, limits: &Limits) -> CheckResult {
    let id = "C6";
    let name = "idempotent-rigidity";
    let mut checks = 0usize;
    let mut run = || -> Result<usize> {
        for (p, k) in [(2u64, 1u32), (2, 2), (3, 1)] {
            if grid.p_exact.map_or(false, |x| x != p) || p > grid.p_max {
                continue;
            }
            let q_desc = FieldDescriptor::finite(p, k)?;
            for e in etypes(grid.r_max.min(usize::MAX), grid.e1_max.min(u32::MAX)) {
                let dim = e.lambda_dim(p)?;
                if dim > 8 || (q_desc.order().unwrap()).pow(dim as u32) > limits.enum_guard as u128
                {
                    continue;
                }
                let alg = lambda::lambda_algebra(1, &e, &q_desc, limits)?;
                let idem = fdalg::idempotents(&alg, limits)?;
                if idem.all.len() != 2 {
                    return Err(Error::Internal(format!(
                        "Λ_{e} ⊗ F_{} has {} idempotents, expected 0 and 1 only",
                        q_desc.order().unwrap(),
                        idem.all.len()
                    )));
                }
                for x in &idem.all {
                    if !(x.is_zero() || x == &alg.one()) {
                        return Err(Error::Internal(format!(
                            "idempotent outside R·1 in Λ_{e} ⊗ F_{}",
                            q_desc.order().unwrap()
                        )));
                    }
                }
                checks += 1;
            }
        }
        // R = F_2[u]/(u^2), encoded as an algebra over F_2
        if grid.p_exact.map_or(true, |x| x == 2) && 2 <= grid.p_max {
            let f2 = FieldDescriptor::prime(2)?;
            let e1 = FieldElem::one(&f2);
            let e0 = FieldElem::zero(&f2);
            let dual = fdalg::StructureConstants::new(
                f2.clone(),
                2,
                vec![
                    e1.clone(),
                    e0.clone(),
                    e0.clone(),
                    e1.clone(),
                    e0.clone(),
                    e1.clone(),
                    e0.clone(),
                    e0.clone(),
                ],
                vec![e1, e0],
            )?;
            for e in etypes(grid.r_max.min(usize::MAX), grid.e1_max.min(u32::MAX)) {
                let dim = e.lambda_dim(2)?;
                if dim > 8 {
                    continue;
                }
                let lam = lambda::lambda_algebra(1, &e, &f2, limits)?;
                let tensored = fdalg::tensor_product(&lam, &dual)?;
                if (2u128).pow(tensored.dim() as u32) > limits.enum_guard as u128 {
                    continue;
                }
                let idem = fdalg::idempotents(&tensored, limits)?;
                if idem.all.len() != 2 {
                    return Err(Error::Internal(format!(
                        "Λ_{e} ⊗ F_2[u]/(u²) has {} idempotents, expected 2",
                        idem.all.len()
                    )));
                }
                checks += 1;
            }
        }
        Ok(checks)
    };
    match run() {
        Ok(c) => CheckResult::pass(id, name, format!("{c} tensor algebras are rigid")),
        Err(err) => CheckResult::fail(id, name, err.to_string()),
    }
}

/// Criterion 7: field-ness detection on the two pinned towers.
fn check_fieldness(limits: &Limits) -> CheckResult {
    let id = "C7";
    let name = "fieldness-detection";
    let make = |rhs: &str| insep::TowerPresentation {
        base_vars: vec!["t".into()],
        levels: vec![insep::TowerLevel {
            exp: 1,
            rhs: rhs.into(),
        }],
        p: 2,
    };
    let rejected = matches!(
        insep::build_tower(&make("t^2"), limits),
        Err(Error::NotAField { level: 1, .. })
    );
    let accepted = insep::build_tower(&make("t"), limits).is_ok();
    if rejected && accepted {
        CheckResult::pass(
            id,
            name,
            "y² = t² rejected, y² = t accepted".into(),
        )
    } else {
        CheckResult::fail(
            id,
            name,
            format!("rejected={rejected} accepted={accepted}"),
        )
    }
}

/// Criterion 8: the p-power filtration separates Λ_(2) from Λ_(1,1) and
/// recovers e across the criterion-2 grid.
fn check_filtration(grid: &GridSpec, limits: &Limits) -> CheckResult {
    let id = "C8";
    let name = "filtration-invariant";
    let run = || -> Result<usize> {
        let f2 = FieldDescriptor::prime(2)?;
        let a = lambda::lambda_algebra(1, &EType::new(vec![2])?, &f2, limits)?;
        let b = lambda::lambda_algebra(1, &EType::new(vec![1, 1])?, &f2, limits)?;
        let fa = fdalg::ppower_filtration(&a)?;
        let fb = fdalg::ppower_filtration(&b)?;
        if fa.dims != vec![4, 2, 1] || fb.dims != vec![4, 1] {
            return Err(Error::Internal(format!(
                "expected dims (4,2,1) and (4,1), got {:?} and {:?}",
                fa.dims, fb.dims
            )));
        }
        if fa.etype == fb.etype {
            return Err(Error::Internal("filtration failed to separate".into()));
        }
        let mut recovered = 0usize;
        for p in grid.primes(&[2, 3]) {
            let desc = FieldDescriptor::prime(p)?;
            for e in etypes(grid.r_max.min(usize::MAX), grid.e1_max.min(u32::MAX)) {
                if e.lambda_dim(p)? > 8 {
                    continue;
                }
                let alg = lambda::lambda_algebra(1, &e, &desc, limits)?;
                let filt = fdalg::ppower_filtration(&alg)?;
                if filt.etype != e.exps() {
                    return Err(Error::Internal(format!(
                        "filtration of Λ_{e} over F_{p} returned {:?}",
                        filt.etype
                    )));
                }
                recovered += 1;
            }
        }
        Ok(recovered)
    };
    match run() {
        Ok(c) => CheckResult::pass(
            id,
            name,
            format!("separates (2) from (1,1); recovers e at {c} grid points"),
        ),
        Err(err) => CheckResult::fail(id, name, err.to_string()),
    }
}

/// Criterion 9: τ(1, (e,..,e)) = r, the certificate bound equals r on those
/// towers, and the degree ratio bound r/p^r <= 1/p holds.
fn check_constant_type(grid: &GridSpec, limits: &Limits) -> CheckResult {
    let id = "C9";
    let name = "constant-type";
    let mut formula_points = 0usize;
    let mut towers = 0usize;
    let mut guarded = 0usize;
    let mut run = || -> Result<(usize, usize, usize)> {
        for p in grid.primes(&[2, 3]) {
            for r in 1..=4.min(grid.r_max) {
                for e in 1..=3.min(grid.e1_max) {
                    let et = EType::new(vec![e; r])?;
                    if edim::tau(1, &et, p)? != r as u128 {
                        return Err(Error::Internal(format!(
                            "τ(1, {et}) != {r} at p={p}"
                        )));
                    }
                    // r·p <= p^r exactly
                    if (r as u128) * (p as u128) > (p as u128).pow(r as u32) {
                        return Err(Error::Internal(format!(
                            "ratio bound fails at p={p} r={r}"
                        )));
                    }
                    formula_points += 1;
                    let pres = insep::construct_example(&et, p, None);
                    let tower = insep::build_tower(&pres, limits)?;
                    if tower.dim() > limits.tower_guard as u128 {
                        guarded += 1;
                        continue;
                    }
                    let tr = insep::normal_generating_sequence(
                        &tower,
                        &insep::default_candidates(&tower),
                        limits,
                    )?;
                    let cert = insep::descent_certificate(&tower, &tr, limits)?;
                    if cert.bound != r as u128 {
                        return Err(Error::Internal(format!(
                            "certificate bound {} != {r} at p={p} e={et}",
                            cert.bound
                        )));
                    }
                    towers += 1;
                }
            }
        }
        Ok((formula_points, towers, guarded))
    };
    match run() {
        Ok(_) => CheckResult::pass(
            id,
            name,
            format!(
                "{formula_points} formula points; certificate bound = r on {towers} towers ({guarded} guarded)"
            ),
        ),
        Err(err) => CheckResult::fail(id, name, err.to_string()),
    }
}

/// Run every criterion; rows come back in order C0..C9.
pub fn run_all(grid: &GridSpec, limits: &Limits) -> Vec<CheckResult> {
    vec![
        check_field_tables(),
        check_formula_sandwich(grid),
        check_point_counts(grid, limits),
        check_wreath_counts(grid, limits),
        check_pickert_roundtrip(grid, limits),
        check_k_lp_index(grid, limits),
        check_idempotent_rigidity(grid, limits),
        check_fieldness(limits),
        check_filtration(grid, limits),
        check_constant_type(grid, limits),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parse() {
        let g = GridSpec::parse("r<=2,p=2,q<=4").unwrap();
        assert_eq!(g.r_max, 2);
        assert_eq!(g.p_exact, Some(2));
        assert_eq!(g.q_max, 4);
        assert!(GridSpec::parse("bogus").is_err());
    }

    #[test]
    fn etype_enumeration() {
        let es = etypes(2, 2);
        // (1), (2), (1,1), (2,1), (2,2)
        assert_eq!(es.len(), 5);
        let es = etypes(4, 4);
        assert_eq!(es.len(), 4 + 10 + 20 + 35);
    }

    #[test]
    fn small_subset_passes() {
        let grid = GridSpec::parse("r<=2,p=2,q<=2,e1<=2,n<=2").unwrap();
        let limits = Limits::default();
        for check in run_all(&grid, &limits) {
            assert!(check.passed, "{}: {}", check.id, check.detail);
        }
    }
}
