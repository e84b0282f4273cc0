//! The computations behind each subcommand.

use parity_qht::linalg::{support_basis, trace_norm, ComplexMatrix, DEFAULT_DIM_CAP};
use parity_qht::parity::{
    classify_with_tol, critical_n_exact, restricted_beta, restricted_beta_dense, theorem3_beta,
    theorem3_critical_n, theorem3_critical_n_search, CaseTag, CriticalFormula, Hypothesis,
};
use parity_qht::states::{twirl_dense, twirl_pure_analytic, DenseState, PureQubit};
use parity_qht::testing::{beta_min, chernoff, symmetric_min_error, ExtendedReal};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::args::{AltArgs, Common, EpsGrid, NGrid, NullArgs};
use crate::record::{Header, Record};
use crate::CliError;

/// Environment variable overriding the dense oracle's dimension cap.
pub const DENSE_CAP_ENV: &str = "PARITY_QHT_DENSE_CAP";

pub fn dense_cap() -> Result<usize, CliError> {
    match std::env::var(DENSE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{DENSE_CAP_ENV}={v} is not a dimension"))),
        Err(_) => Ok(DEFAULT_DIM_CAP),
    }
}

fn within_cap(n: u32, cap: usize) -> bool {
    n < usize::BITS && (1usize << n) <= cap
}

pub fn header(common: &Common, cap: usize) -> Header {
    vec![
        ("classify_tol", format!("{:e}", common.classify_tol)),
        ("oracle_tol", format!("{:e}", common.oracle_tol)),
        (
            "primal_feas_tol",
            format!("{:e}", parity_qht::testing::PRIMAL_FEAS_TOL),
        ),
        (
            "duality_gap_tol",
            format!("{:e}", parity_qht::testing::DUALITY_GAP_TOL),
        ),
        ("dense_cap", cap.to_string()),
    ]
}

pub fn n_values(g: &NGrid, default: Option<u32>) -> Result<Vec<u32>, CliError> {
    match (g.n, g.n_range, default) {
        (Some(n), _, _) => Ok(vec![n]),
        (None, Some((a, b)), _) => Ok((a..=b).collect()),
        (None, None, Some(d)) => Ok(vec![d]),
        _ => Err(CliError::Usage("give --n or --n-range".into())),
    }
}

pub fn eps_values(g: &EpsGrid) -> Result<Vec<f64>, CliError> {
    let v = match (&g.eps, &g.eps_list) {
        (Some(e), _) => vec![*e],
        (None, Some(l)) if !l.is_empty() => l.clone(),
        _ => return Err(CliError::Usage("give --eps or --eps-list".into())),
    };
    if let Some(e) = v.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(CliError::Usage(format!("eps = {e} is outside (0, 1)")));
    }
    Ok(v)
}

fn pure(p: f64, phi: f64) -> Result<PureQubit, CliError> {
    PureQubit::new(p, phi).map_err(|e| CliError::Usage(e.to_string()))
}

fn basis(bit: u8) -> PureQubit {
    PureQubit::basis(bit)
}

pub fn null_hypothesis(a: &NullArgs) -> Result<Hypothesis, CliError> {
    match (a.p, a.null_basis, a.maxmixed_null) {
        (Some(p), None, false) => Ok(Hypothesis::Pure(pure(p, 0.0)?)),
        (None, Some(b), false) => Ok(Hypothesis::Pure(basis(b))),
        (None, None, true) => Ok(Hypothesis::MaxMixed),
        _ => Err(CliError::Usage(
            "give exactly one of --p/--null-p, --null-basis, --maxmixed-null".into(),
        )),
    }
}

pub fn alt_hypothesis(a: &AltArgs) -> Result<Hypothesis, CliError> {
    let phi = a.phi.unwrap_or(0.0);
    match (a.q, a.alt_basis, a.maxmixed_alt) {
        (Some(q), None, false) => Ok(Hypothesis::Pure(pure(q, phi)?)),
        (None, Some(b), false) if a.phi.is_none() => Ok(Hypothesis::Pure(basis(b))),
        (None, None, true) if a.phi.is_none() => Ok(Hypothesis::MaxMixed),
        (None, Some(_), false) | (None, None, true) => {
            Err(CliError::Usage("--phi needs --q/--alt-q".into()))
        }
        _ => Err(CliError::Usage(
            "give exactly one of --q/--alt-q, --alt-basis, --maxmixed-alt".into(),
        )),
    }
}

/// Critical copy number and, where a closed form exists, its distance from it.
type Critical = (u64, Option<f64>);

/// A hypothesis pair with pure states snapped onto the special cases.
#[derive(Debug, Clone, Copy)]
pub struct Pair {
    pub h0: Hypothesis,
    pub h1: Hypothesis,
    pub tag: Option<CaseTag>,
    pub phi: Option<f64>,
}

impl Pair {
    pub fn new(h0: Hypothesis, h1: Hypothesis, tol: f64) -> Self {
        match (h0, h1) {
            (Hypothesis::Pure(a), Hypothesis::Pure(b)) => {
                let c = classify_with_tol(&a, &b, tol);
                Pair {
                    h0: Hypothesis::Pure(c.null_state()),
                    h1: Hypothesis::Pure(c.alt_state()),
                    tag: Some(c.tag),
                    phi: Some(c.phi),
                }
            }
            _ => Pair {
                h0,
                h1,
                tag: None,
                phi: match h1 {
                    Hypothesis::Pure(b) => Some(b.phi()),
                    Hypothesis::MaxMixed => None,
                },
            },
        }
    }

    fn base(&self, command: &'static str) -> Record {
        let p_of = |h: &Hypothesis| match h {
            Hypothesis::Pure(s) => Some(s.p()),
            Hypothesis::MaxMixed => None,
        };
        Record {
            command,
            p: p_of(&self.h0),
            q: p_of(&self.h1),
            phi: self.phi,
            null_kind: self.h0.kind(),
            alt_kind: self.h1.kind(),
            case_tag: self.tag.map(|t| t.as_str()),
            ..Record::default()
        }
    }

    /// Copies from which the zero type-II error test keeps its type-I error
    /// at or below `eps`, where such a test exists.
    fn critical_n(&self, eps: f64) -> Result<Option<Critical>, CliError> {
        match (self.h0, self.h1) {
            (Hypothesis::Pure(a), Hypothesis::Pure(b)) => {
                if self.tag == Some(CaseTag::IdenticalTwirl) {
                    return Ok(None);
                }
                let r = critical_n_exact(&a, &b, eps)?;
                let diff = match r.formula.value {
                    CriticalFormula::Exact(k) => Some((k as f64 - r.n_exact as f64).abs()),
                    CriticalFormula::Asymptotic { .. } => None,
                };
                Ok(Some((r.n_exact, diff)))
            }
            (Hypothesis::MaxMixed, Hypothesis::Pure(b)) if b.basis_bit().is_none() => {
                let f = theorem3_critical_n(eps)?;
                let s = theorem3_critical_n_search(eps)?;
                Ok(Some((
                    u64::from(f),
                    Some((f64::from(f) - f64::from(s)).abs()),
                )))
            }
            _ => Ok(None),
        }
    }
}

fn raw_dense(h: &Hypothesis, n: u32, cap: usize) -> Result<DenseState, CliError> {
    Ok(match h {
        Hypothesis::Pure(q) => DenseState::pure_power(q, n, cap)?,
        Hypothesis::MaxMixed => DenseState::maximally_mixed(n, cap)?,
    })
}

fn fill_beta(r: &mut Record, beta: f64, dhe: ExtendedReal, n: u32) {
    r.beta = Some(beta);
    r.dhe = Some(dhe.to_f64());
    r.dhe_over_n = Some(dhe.to_f64() / f64::from(n));
}

fn fill_oracle(r: &mut Record, oracle: f64) {
    r.oracle_beta = Some(oracle);
    r.abs_diff = r.beta.map(|b| (b - oracle).abs());
}

#[derive(Debug, Clone, Copy)]
pub struct GridOptions {
    pub command: &'static str,
    pub unrestricted: bool,
    pub with_critical: bool,
    pub oracle: bool,
    pub cap: usize,
}

/// One record per (pair, n, eps), computed in parallel and sorted by
/// `(n, eps)`, then by pair.
pub fn grid(
    pairs: &[Pair],
    ns: &[u32],
    epss: &[f64],
    opt: GridOptions,
) -> Result<Vec<Record>, CliError> {
    // Copy numbers only depend on (pair, eps).
    let crit: Vec<Vec<Option<Critical>>> = if opt.with_critical {
        pairs
            .par_iter()
            .map(|pair| {
                epss.iter()
                    .map(|&e| pair.critical_n(e))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?
    } else {
        vec![vec![None; epss.len()]; pairs.len()]
    };
    let mut points = Vec::with_capacity(pairs.len() * ns.len() * epss.len());
    for (ip, _) in pairs.iter().enumerate() {
        for &n in ns {
            for (ie, _) in epss.iter().enumerate() {
                points.push((ip, n, ie));
            }
        }
    }
    let mut rows: Vec<((u32, f64, usize), Record)> = points
        .par_iter()
        .map(|&(ip, n, ie)| -> Result<_, CliError> {
            let (pair, eps) = (&pairs[ip], epss[ie]);
            let mut r = pair.base(opt.command);
            r.n = Some(n);
            r.eps = Some(eps);
            if opt.unrestricted {
                let res = beta_min(
                    &raw_dense(&pair.h0, n, opt.cap)?,
                    &raw_dense(&pair.h1, n, opt.cap)?,
                    eps,
                )?;
                fill_beta(&mut r, res.beta_min, res.dhe, n);
            } else {
                let res = restricted_beta(&pair.h0, &pair.h1, n, eps)?;
                fill_beta(&mut r, res.beta_min, res.dhe, n);
                if opt.oracle && within_cap(n, opt.cap) {
                    let o = restricted_beta_dense(&pair.h0, &pair.h1, n, eps, opt.cap)?;
                    fill_oracle(&mut r, o.beta_min);
                }
            }
            if let Some((k, _)) = crit[ip][ie] {
                r.n_eps = Some(k);
            }
            Ok(((n, eps, ip), r))
        })
        .collect::<Result<_, _>>()?;
    rows.sort_by(|(a, _), (b, _)| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn random_pairs(k: usize, seed: u64, tol: f64) -> Vec<Pair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| {
            let a = PureQubit::new(rng.gen_range(0.0..=1.0), 0.0).expect("p in range");
            let b = PureQubit::new(
                rng.gen_range(0.0..=1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
            .expect("q in range");
            Pair::new(Hypothesis::Pure(a), Hypothesis::Pure(b), tol)
        })
        .collect()
}

pub fn critical(pair: &Pair, epss: &[f64]) -> Result<Vec<Record>, CliError> {
    if pair.tag == Some(CaseTag::IdenticalTwirl) {
        return Err(CliError::Usage(
            "the two states have the same twirl for every n; no critical copy number exists".into(),
        ));
    }
    let mut out = Vec::new();
    for &eps in epss {
        let Some((k, diff)) = pair.critical_n(eps)? else {
            return Err(CliError::Usage(
                "no zero type-II error test exists for this pair; critical-n needs two pure states \
                 or a maximally mixed null against a non-basis pure alternative"
                    .into(),
            ));
        };
        let mut r = pair.base("critical-n");
        r.eps = Some(eps);
        r.n_eps = Some(k);
        r.abs_diff = diff;
        out.push(r);
    }
    Ok(out)
}

pub fn theorem3(
    p: f64,
    ns: &[u32],
    epss: &[f64],
    oracle: bool,
    cap: usize,
) -> Result<Vec<Record>, CliError> {
    let psi = pure(p, 0.0)?;
    let pair = Pair::new(Hypothesis::Pure(psi), Hypothesis::MaxMixed, 0.0);
    let mut rows = Vec::new();
    for &n in ns {
        for &eps in epss {
            let v = theorem3_beta(p, n, eps)?;
            let mut r = pair.base("theorem3");
            r.n = Some(n);
            r.eps = Some(eps);
            fill_beta(&mut r, v.beta, v.dhe, n);
            r.n_eps = Some(theorem3_critical_n(eps)?.into());
            if oracle && within_cap(n, cap) {
                let o = restricted_beta_dense(&pair.h0, &pair.h1, n, eps, cap)?;
                fill_oracle(&mut r, o.beta_min);
            }
            rows.push(r);
        }
    }
    Ok(rows)
}

// Trace norm of a - b on the joint support, plus sqrt(d) times the
// Frobenius norm of the remainder; halved, an upper bound on the trace
// distance that avoids a full eigendecomposition of near-zero differences.
fn trace_distance_bound(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, CliError> {
    let q = support_basis(&(a + b), 1e-14)?;
    let d = a - b;
    let inner = d.compress(&q);
    let rest = (&d - &inner.lift(&q)).frobenius_norm();
    Ok(0.5 * (trace_norm(&inner)? + (a.rows() as f64).sqrt() * rest))
}

pub fn twirl(
    p: f64,
    phi: f64,
    ns: &[u32],
    oracle: bool,
    cap: usize,
) -> Result<Vec<Record>, CliError> {
    let psi = pure(p, phi)?;
    ns.par_iter()
        .map(|&n| {
            let t = twirl_pure_analytic(&psi, n)?;
            let mut r = Record {
                command: "twirl",
                p: Some(psi.p()),
                phi: Some(psi.phi()),
                null_kind: "pure",
                n: Some(n),
                ..Record::default()
            };
            if oracle && within_cap(n, cap) {
                let analytic = t.to_dense(cap)?;
                let dense = twirl_dense(&DenseState::pure_power(&psi, n, cap)?);
                r.abs_diff = Some(trace_distance_bound(analytic.rho(), dense.rho())?);
            }
            Ok(r)
        })
        .collect()
}

pub fn chernoff_rows(
    pair: &Pair,
    ns: &[u32],
    cap: usize,
) -> Result<(Vec<Record>, Header), CliError> {
    let c = chernoff(&raw_dense(&pair.h0, 1, cap)?, &raw_dense(&pair.h1, 1, cap)?)?;
    let mut rows = Vec::new();
    for &n in ns {
        let pe = symmetric_min_error(
            &raw_dense(&pair.h0, n, cap)?,
            &raw_dense(&pair.h1, n, cap)?,
            0.5,
        )?;
        let mut r = pair.base("chernoff");
        r.n = Some(n);
        fill_beta(&mut r, pe, ExtendedReal::neg_log2(pe), n);
        rows.push(r);
    }
    let extra = vec![
        (
            "chernoff_exponent",
            crate::record::format_float(c.exponent.to_f64()),
        ),
        ("s_star", crate::record::format_float(c.s_star)),
    ];
    Ok((rows, extra))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alt(q: Option<f64>, phi: Option<f64>, bit: Option<u8>, mm: bool) -> AltArgs {
        AltArgs {
            q,
            phi,
            alt_basis: bit,
            maxmixed_alt: mm,
        }
    }

    #[test]
    fn hypotheses_need_exactly_one_spec() {
        assert!(alt_hypothesis(&alt(None, None, None, false)).is_err());
        assert!(alt_hypothesis(&alt(Some(0.3), None, None, true)).is_err());
        assert!(alt_hypothesis(&alt(None, Some(1.0), None, true)).is_err());
        assert!(matches!(
            alt_hypothesis(&alt(None, None, None, true)),
            Ok(Hypothesis::MaxMixed)
        ));
        let Ok(Hypothesis::Pure(s)) = alt_hypothesis(&alt(None, None, Some(1), false)) else {
            panic!()
        };
        assert_eq!(s.p(), 0.0);
        let null = NullArgs {
            p: Some(0.4),
            null_basis: Some(0),
            maxmixed_null: false,
        };
        assert!(null_hypothesis(&null).is_err());
    }

    #[test]
    fn pairs_snap_onto_special_cases() {
        let a = Hypothesis::Pure(PureQubit::new(0.3, 0.0).unwrap());
        let b = Hypothesis::Pure(PureQubit::new(0.3 + 1e-14, std::f64::consts::PI).unwrap());
        let pair = Pair::new(a, b, 1e-12);
        assert_eq!(pair.tag, Some(CaseTag::IdenticalTwirl));
        assert!(Pair::new(a, b, 0.0).tag != Some(CaseTag::IdenticalTwirl));
        assert_eq!(Pair::new(a, Hypothesis::MaxMixed, 1e-12).tag, None);
    }

    #[test]
    fn cap_check() {
        assert!(within_cap(10, 1024));
        assert!(!within_cap(11, 1024));
        assert!(!within_cap(200, usize::MAX));
    }

    #[test]
    fn random_pairs_are_seeded() {
        let a = random_pairs(5, 3, CLASSIFY);
        let b = random_pairs(5, 3, CLASSIFY);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    const CLASSIFY: f64 = parity_qht::parity::CLASSIFY_TOL;
}
