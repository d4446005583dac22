//! Seeded self-check suites behind `verify-all`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{int, rat, QSeries, Rational};
use crate::dmf::{basis, hecke, hecke_composition_check, reconstruct_with, DmfElement};
use crate::eisenstein::{
    discriminant_series, eisenstein_series, g_values, generators, j_series, sigma,
};
use crate::foliation::{
    alt_field_check, eta_contractions, flow, invariant_monitors, leaf_uniformization,
    tangency_check, FlowOptions,
};
use crate::gaussmanin::{
    connection_fd_check, discriminant_monodromy, picard_fuchs_transport, verify_basis_change,
    verify_det_identities, verify_ra_discriminant, TransportOptions,
};
use crate::numeric::C64;
use crate::periods::{eisenstein_point, period_matrix, roundtrip_check, CurvePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub det: f64,
    pub roundtrip: f64,
    pub roundtrip_boundary: f64,
    pub b_values: f64,
    pub b3_unit: f64,
    pub connection_fd: f64,
    pub transport: f64,
    pub monodromy: f64,
    pub closed_orbit: f64,
    pub flow_match: f64,
    pub b2_drift: f64,
    pub tangency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            det: 1e-9,
            roundtrip: 1e-8,
            roundtrip_boundary: 1e-7,
            b_values: 1e-9,
            b3_unit: 1e-8,
            connection_fd: 1e-5,
            transport: 1e-6,
            monodromy: 1e-6,
            closed_orbit: 1e-7,
            flow_match: 1e-6,
            b2_drift: 1e-6,
            tangency: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Order of the exact q-series checks.
    pub series_order: i64,
    /// Order used when evaluating q-expansions numerically.
    pub eval_order: i64,
    pub random_periods: usize,
    pub random_reconstructions: usize,
    pub tol: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 7,
            series_order: 200,
            eval_order: 80,
            random_periods: 20,
            random_reconstructions: 24,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    /// Informational checks are reported but never fail the run.
    pub informational: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.passed && !c.informational)
            .count()
    }

    pub fn failed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| !c.passed && !c.informational)
            .count()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }
}

pub const SUITES: [&str; 8] = [
    "series",
    "ramanujan",
    "hecke",
    "gauss-manin",
    "periods",
    "connection",
    "foliation",
    "reconstruction",
];

struct Sink<'a> {
    suite: &'a str,
    out: Vec<CheckResult>,
}

impl Sink<'_> {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.out.push(CheckResult {
            suite: self.suite.to_string(),
            name: name.into(),
            passed,
            informational: false,
            detail: detail.into(),
        });
    }

    fn info(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.push(name, passed, detail);
        if let Some(last) = self.out.last_mut() {
            last.informational = true;
        }
    }

    fn result<T>(
        &mut self,
        name: &str,
        r: crate::Result<T>,
        ok: impl FnOnce(&T) -> (bool, String),
    ) {
        match r {
            Ok(v) => {
                let (p, d) = ok(&v);
                self.push(name, p, d);
            }
            Err(e) => self.push(name, false, format!("error: {e}")),
        }
    }
}

/// Runs the named suites (all when `only` is empty).
pub fn verify_all(cfg: &VerifyConfig, only: &[String]) -> VerifyReport {
    let mut checks = Vec::new();
    for suite in SUITES {
        if !only.is_empty() && !only.iter().any(|s| s == suite) {
            continue;
        }
        let mut sink = Sink {
            suite,
            out: Vec::new(),
        };
        // each suite gets its own stream so that subsets reproduce the full run
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv(suite));
        match suite {
            "series" => series_suite(cfg, &mut sink),
            "ramanujan" => ramanujan_suite(cfg, &mut sink),
            "hecke" => hecke_suite(&mut sink),
            "gauss-manin" => gauss_manin_suite(&mut sink),
            "periods" => periods_suite(cfg, &mut rng, &mut sink),
            "connection" => connection_suite(cfg, &mut rng, &mut sink),
            "foliation" => foliation_suite(cfg, &mut sink),
            "reconstruction" => reconstruction_suite(cfg, &mut rng, &mut sink),
            _ => unreachable!(),
        }
        checks.extend(sink.out);
    }
    VerifyReport {
        seed: cfg.seed,
        checks,
    }
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100000001b3)
    })
}

fn series_suite(cfg: &VerifyConfig, sink: &mut Sink) {
    let n = cfg.series_order;
    for (k, c) in [(1u32, -24i64), (2, 240), (3, -504)] {
        let e = eisenstein_series(k, n + 1).series;
        let ok = e.coeff(0) == Rational::one()
            && (1..=n).all(|i| e.coeff(i) == int(c) * Rational::from(sigma(2 * k - 1, i as u64)));
        sink.push(
            format!("E{} coefficients to q^{n}", 2 * k),
            ok,
            "1 + c sigma_(2k-1)(n)",
        );
    }
    // q prod (1 - q^n)^24
    let mut prod = QSeries::one(n + 1);
    for i in 1..=n {
        let factor = &QSeries::one(n + 1) - &QSeries::monomial(Rational::one(), i, n + 1);
        for _ in 0..24 {
            prod = &prod * &factor;
        }
    }
    let product = prod.shift(1).truncate(n + 1);
    sink.push(
        "Delta equals q prod (1 - q^n)^24",
        discriminant_series(n + 1) == product,
        format!("to q^{n}"),
    );
    let j = j_series(4);
    let ok = j.valuation() == -1
        && j.coeff(-1) == int(1)
        && j.coeff(0) == int(744)
        && j.coeff(1) == int(196884);
    sink.push("j = q^-1 + 744 + 196884 q + ...", ok, j.render_upto(1));
}

fn ramanujan_suite(cfg: &VerifyConfig, sink: &mut Sink) {
    let [e2, e4, e6] = generators(cfg.series_order + 1);
    sink.push(
        "12 theta E2 = E2^2 - E4",
        e2.theta().scale(&int(12)) == &(&e2 * &e2) - &e4,
        "",
    );
    sink.push(
        "3 theta E4 = E2 E4 - E6",
        e4.theta().scale(&int(3)) == &(&e2 * &e4) - &e6,
        "",
    );
    sink.push(
        "2 theta E6 = E2 E6 - E4^2",
        e6.theta().scale(&int(2)) == &(&e2 * &e6) - &(&e4 * &e4),
        "",
    );
    let g = |k| DmfElement::g(k);
    let expected = [
        &g(1).pow(2) - &g(2).scale(&rat(1, 12)),
        &(&g(1) * &g(2)).scale(&int(4)) - &g(3).scale(&int(6)),
        &(&g(1) * &g(3)).scale(&int(6)) - &g(2).pow(2).scale(&rat(1, 3)),
    ];
    for (k, want) in (1..=3).zip(expected) {
        let got = g(k).diff_op();
        sink.push(format!("D(g{k})"), got == want, got.to_string());
    }
}

fn hecke_suite(sink: &mut Sink) {
    let g = |k| DmfElement::g(k);
    for (f, p, name, ev) in [
        (g(1), 2, "T2 g1", rat(3, 2)),
        (g(1), 3, "T3 g1", rat(4, 3)),
        (g(2), 2, "T2 g2", int(9)),
        (g(3), 2, "T2 g3", int(33)),
    ] {
        sink.result(name, hecke(&f, p), |h| (*h == f.scale(&ev), h.to_string()));
    }
    for f in [g(1), g(2), &g(1) * &g(2)] {
        match hecke_composition_check(2, 2, &f, 40) {
            Ok(r) => {
                sink.push(
                    format!("T2 T2 on {f} (d^(m-2n-1))"),
                    r.corrected_law_holds,
                    r.summary(),
                );
                sink.info(
                    format!("T2 T2 on {f} (d^(m-n-1))"),
                    r.stated_law_holds,
                    r.summary(),
                );
            }
            Err(e) => sink.push(format!("T2 T2 on {f}"), false, format!("error: {e}")),
        }
    }
}

fn gauss_manin_suite(sink: &mut Sink) {
    for r in [
        verify_det_identities(),
        verify_basis_change(),
        verify_ra_discriminant(),
    ] {
        for c in r.checks {
            sink.push(c.name, c.holds, c.detail);
        }
    }
}

fn random_t(rng: &mut ChaCha8Rng) -> CurvePoint {
    loop {
        let mut z = || {
            // uniform in the disc of radius 5
            let r = 5.0 * rng.gen::<f64>().sqrt();
            C64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
        };
        let t = CurvePoint::new(z(), z(), z());
        if t.discriminant().norm() > 0.1 {
            return t;
        }
    }
}

fn periods_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, sink: &mut Sink) {
    let mut worst: f64 = 0.0;
    let mut err = None;
    for _ in 0..cfg.random_periods {
        let t = random_t(rng);
        match period_matrix(&t) {
            Ok(pm) => worst = worst.max((pm.det() - 1.0).norm()),
            Err(e) => err = Some(e),
        }
    }
    let ok = err.is_none() && worst < cfg.tol.det;
    sink.push(
        format!("|det pm - 1| at {} random t", cfg.random_periods),
        ok,
        format!("max {worst:.3e}"),
    );
    for (z, tol) in [
        (C64::new(0.0, 2.0), cfg.tol.roundtrip),
        (C64::new(0.5, 2.0), cfg.tol.roundtrip),
        (C64::new(0.5, 0.9), cfg.tol.roundtrip_boundary),
    ] {
        sink.result(
            &format!("roundtrip at {z}"),
            roundtrip_check(z, cfg.eval_order),
            |r| (r.distance < tol, format!("distance {:.3e}", r.distance)),
        );
    }
    for z in [
        C64::new(0.0, 2.0),
        C64::new(0.3, 1.2),
        C64::new(-0.45, 0.95),
    ] {
        let r = eisenstein_point(z, cfg.eval_order).and_then(|t| period_matrix(&t));
        sink.result(&format!("B-values at g({z})"), r, |pm| {
            let b = pm.b_values();
            let e = (b.b1 - z.im).abs().max(b.b2.abs()).max((b.b3 - 1.0).norm());
            (e < cfg.tol.b_values, format!("max error {e:.3e}"))
        });
    }
    // B2 = 0 off the Eisenstein locus: leaves with c2 conj(c4) real
    let mut worst: f64 = 0.0;
    let mut failed = None;
    for (i, (c2, c4)) in [
        (1.0, 0.5),
        (-0.3, 1.2),
        (2.0, -0.7),
        (0.4, 0.4),
        (-1.5, -0.2),
    ]
    .iter()
    .enumerate()
    {
        let z = C64::new(0.1 * i as f64 - 0.2, 1.1 + 0.2 * i as f64);
        match leaf_uniformization(z, C64::new(*c2, 0.0), C64::new(*c4, 0.0), cfg.eval_order)
            .and_then(|t| invariant_monitors(&t))
        {
            Ok(m) => worst = worst.max((m.b3_abs - 1.0).abs()),
            Err(e) => failed = Some(e),
        }
    }
    sink.push(
        "|B3| = 1 at 5 points with B2 = 0",
        failed.is_none() && worst < cfg.tol.b3_unit,
        format!("max {worst:.3e}"),
    );
}

fn connection_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, sink: &mut Sink) {
    let mut worst: f64 = 0.0;
    let mut err = None;
    let mut done = 0;
    while done < 5 {
        let t = random_t(rng);
        if t.discriminant().norm() < 1.0 {
            continue;
        }
        match connection_fd_check(&t, 1e-5) {
            Ok(e) => worst = worst.max(e),
            Err(e) => err = Some(e),
        }
        done += 1;
    }
    sink.push(
        "d pm / dt_i = pm A_i^T / Delta at 5 points",
        err.is_none() && worst < cfg.tol.connection_fd,
        format!("max {worst:.3e}"),
    );
    let mut opts = TransportOptions::default();
    opts.ode.rtol = 1e-12;
    opts.ode.atol = 1e-14;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let a = [one, zero, zero, one];
    let b = [one, zero, zero, C64::new(2.0, 0.0)];
    let r = period_matrix(&CurvePoint::new(zero, zero, one))
        .and_then(|pm| picard_fuchs_transport(&pm, &[a, b], &opts))
        .and_then(|tr| Ok((tr, period_matrix(&CurvePoint::new(zero, zero, b[3]))?)));
    sink.result(
        "transport (1,0,0,1) -> (1,0,0,2) vs AGM",
        r,
        |(tr, direct)| {
            let (aligned, _, off) = tr.pm.align_to(direct);
            let e = off.max(aligned.max_abs_diff(direct));
            (e < cfg.tol.transport, format!("max {e:.3e}"))
        },
    );
    sink.result(
        "monodromy around Delta = 0",
        discriminant_monodromy(C64::new(3.0, 0.0), 0.5, &opts),
        |(m, off)| {
            let det = m[0] * m[3] - m[1] * m[2];
            (
                *off < cfg.tol.monodromy && det == 1.0,
                format!("{m:?}, off {off:.3e}"),
            )
        },
    );
}

fn foliation_suite(cfg: &VerifyConfig, sink: &mut Sink) {
    let z0 = C64::new(0.0, 2.0);
    let opts = FlowOptions::default();
    let start = g_values(z0, cfg.eval_order);
    sink.result(
        "closed orbit through g(2i)",
        start
            .clone()
            .and_then(|s| flow(s, 1.0, &opts).map(|f| (s, f))),
        |(s, f)| {
            let end = f.samples.last().map(|x| x.t).unwrap_or(*s);
            let e = (0..3).map(|i| (end[i] - s[i]).norm()).fold(0.0, f64::max);
            (e < cfg.tol.closed_orbit, format!("{e:.3e}"))
        },
    );
    let mut o = opts;
    o.samples = 10;
    let z1 = C64::new(0.1, 1.2);
    let r = g_values(z1, cfg.eval_order).and_then(|s| flow(s, 1.0, &o));
    sink.result("flow = g(z0 + s) at 10 samples", r, |f| {
        let mut e: f64 = 0.0;
        for smp in &f.samples {
            if let Ok(g) = g_values(z1 + smp.s, cfg.eval_order) {
                e = e.max((0..3).map(|i| (smp.t[i] - g[i]).norm()).fold(0.0, f64::max));
            } else {
                e = f64::INFINITY;
            }
        }
        (e < cfg.tol.flow_match, format!("{e:.3e}"))
    });
    let r = leaf_uniformization(
        C64::new(0.0, 1.3),
        C64::new(0.4, 0.2),
        C64::new(1.0, 0.5),
        cfg.eval_order,
    )
    .and_then(|s| flow(s, 1.0, &opts));
    sink.result("B2 drift along a leaf", r, |f| {
        let b: Vec<f64> = f.samples.iter().filter_map(|s| s.b2).collect();
        let drift = b.iter().map(|x| (x - b[0]).abs()).fold(0.0, f64::max);
        (
            b.len() == f.samples.len() && drift < cfg.tol.b2_drift,
            format!("{drift:.3e}"),
        )
    });
    sink.push(
        "eta_i(Ra) = 0",
        eta_contractions().iter().all(|p| p.is_zero()),
        "",
    );
    sink.result(
        "tangency of u(2i, 1, 1)",
        tangency_check(
            C64::new(0.0, 2.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            cfg.eval_order,
        ),
        |r| {
            (
                r.relative_deviation < cfg.tol.tangency,
                format!("{:.3e}", r.relative_deviation),
            )
        },
    );
    let alt = alt_field_check();
    sink.push(
        "alternate chart pushforward",
        alt.holds,
        alt.residuals.join(", "),
    );
}

/// Random nonzero rational in `[-20, 20]` with denominator at most 6.
fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = rat(rng.gen_range(-20..=20), rng.gen_range(1..=6));
        if !r.is_zero() {
            return r;
        }
    }
}

fn reconstruction_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, sink: &mut Sink) {
    let mut fails = Vec::new();
    let mut count = 0;
    for i in 0..cfg.random_reconstructions {
        let m = 2 * rng.gen_range(1..=10) as i64;
        let n = rng.gen_range(0..=(m / 2) as u32);
        let mono = match basis(n, m) {
            Ok(b) => b,
            Err(e) => {
                fails.push(format!("#{i}: {e}"));
                continue;
            }
        };
        if mono.is_empty() {
            continue;
        }
        let f = DmfElement::from_terms(mono.iter().map(|e| (*e, random_rational(rng))));
        match reconstruct_with(n, m, |order| f.to_qseries(order)) {
            Ok(r) if r.element == f && r.surplus_checked >= 8 => count += 1,
            Ok(r) => fails.push(format!("#{i}: M^{n}_{m} got {}", r.element)),
            Err(e) => fails.push(format!("#{i}: M^{n}_{m} {e}")),
        }
    }
    let detail = if fails.is_empty() {
        format!("{count} elements")
    } else {
        fails.join("; ")
    };
    sink.push(
        "unique reconstruction with surplus check",
        fails.is_empty(),
        detail,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass_and_are_reproducible() {
        let cfg = VerifyConfig {
            series_order: 30,
            ..VerifyConfig::default()
        };
        let only: Vec<String> = ["series", "ramanujan", "gauss-manin", "reconstruction"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let a = verify_all(&cfg, &only);
        assert!(a.all_pass(), "{a:#?}");
        let b = verify_all(&cfg, &only);
        assert_eq!(a, b);
    }
}
