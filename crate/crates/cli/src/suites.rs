//! Property suites behind `tropcount verify`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use tropcount_core::arith::{
    check_multiplicativity, check_p_pn_identity, check_sigma_identity, sigma, IdentityReport,
};
use tropcount_core::count::{
    default_embedding, random_pd_form, random_polarized_torus, total_count_enumerated, CountOptions,
};
use tropcount_core::oracle::{subgroups_by_closure, types_of_order};
use tropcount_core::theta::{selling_reduce, skeleton};
use tropcount_core::tori::{polarization_type, Polarization};
use tropcount_core::{
    enumerate_subgroups, hom_sym_bruteforce, hom_sym_count, nu_dagger, FieldMatrix, FieldScalar,
    IntMatrix, Result,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Oracles,
    Roundtrip,
    Pipeline,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Oracles => "oracles",
            Suite::Roundtrip => "roundtrip",
            Suite::Pipeline => "pipeline",
        }
    }
}

/// One property checked over a family of cases.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_counterexample: Option<Value>,
}

impl Check {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            failures: 0,
            first_counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(detail());
            }
        }
    }

    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

impl From<&IdentityReport> for Check {
    fn from(r: &IdentityReport) -> Self {
        Self {
            name: format!("{} ({})", r.name, r.range),
            cases: r.cases.len(),
            failures: r.failures(),
            first_counterexample: r.first_failure().map(|c| json!(c)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SuiteReport {
    /// Plain-text table, one line per check.
    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass() { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{status}  {:<width$}  {} cases, {} failures\n",
                c.name, c.cases, c.failures
            ));
        }
        out
    }
}

pub fn run_suite(suite: Suite, seed: u64, budget: u128) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Identities => identities(seed, budget)?,
        Suite::Oracles => oracles(budget)?,
        Suite::Roundtrip => roundtrip(seed)?,
        Suite::Pipeline => pipeline(seed, budget)?,
    };
    let pass = checks.iter().all(Check::pass);
    Ok(SuiteReport {
        suite: suite.name().into(),
        seed,
        checks,
        pass,
    })
}

fn identities(seed: u64, budget: u128) -> Result<Vec<Check>> {
    Ok(vec![
        (&check_sigma_identity(500, budget)?).into(),
        (&check_p_pn_identity(&[2, 3, 5, 7, 11], 60, budget)?).into(),
        (&check_multiplicativity(seed, 200, budget)?).into(),
    ])
}

fn oracles(budget: u128) -> Result<Vec<Check>> {
    let mut hom = Check::new("hom_sym closed form = brute force, |H| <= 64");
    for n in 1..=64 {
        for t in types_of_order(n) {
            let (a, b) = (hom_sym_count(&t), hom_sym_bruteforce(&t, budget)?);
            hom.record(
                a == b,
                || json!({"type": t, "closed": a.to_string(), "brute": b.to_string()}),
            );
        }
    }
    let mut subs = Check::new("subgroups by HNF = closure oracle, |G| <= 200");
    for n in 1..=200 {
        for t in types_of_order(n) {
            let fast = enumerate_subgroups(&t, budget)?;
            let slow = subgroups_by_closure(&t)?;
            let mut histogram: BTreeMap<u64, usize> = BTreeMap::new();
            for s in &fast {
                let o = u64::try_from(s.order()).expect("order fits u64");
                *histogram.entry(o).or_default() += 1;
            }
            let ok = fast.len() == slow.count() && histogram == slow.order_histogram();
            subs.record(
                ok,
                || json!({"type": t, "hnf": fast.len(), "closure": slow.count()}),
            );
        }
    }
    Ok(vec![hom, subs])
}

fn random_unimodular(rng: &mut ChaCha8Rng, g: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(g);
    for _ in 0..4 {
        let (i, j) = (rng.gen_range(0..g), rng.gen_range(0..g));
        if i != j {
            let mut e = IntMatrix::identity(g);
            e[(i, j)] = rng.gen_range(-2i64..=2).into();
            m = m.checked_mul(&e).expect("square");
        }
    }
    m
}

/// Seeded PD form with rational entries, moved off reduced position.
pub fn random_rational_form(rng: &mut ChaCha8Rng, g: usize) -> FieldMatrix {
    let base = random_pd_form(rng, g, 0);
    let w = random_unimodular(rng, g);
    let scale = BigRational::new(1.into(), rng.gen_range(1i64..=6).into());
    base.congruence(&w).expect("square").scale_rational(&scale)
}

fn sorted(mut v: Vec<FieldScalar>) -> Vec<FieldScalar> {
    v.sort_by(|a, b| a.cmp_exact(b).expect("same field"));
    v
}

fn roundtrip(seed: u64) -> Result<Vec<Check>> {
    let mut congruent = Check::new("jacobian_gram(skeleton(Q)) has the Selling parameters of Q");
    let mut det = Check::new("determinant preserved");
    let mut shape = Check::new("non-degenerate skeletons: genus g, 3-edge-connected");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for g in [2usize, 3] {
        for _ in 0..50 {
            let q = random_rational_form(&mut rng, g);
            let sk = skeleton(&q)?;
            let back = sk.graph.jacobian_gram()?;
            let a = sorted(selling_reduce(&q)?.params);
            let b = sorted(selling_reduce(&back)?.params);
            congruent.record(a == b, || json!({"Q": q, "back": back}));
            det.record(q.det()? == back.det()?, || json!({"Q": q}));
            if !sk.degenerate {
                let ok = sk.graph.genus()? == g && sk.graph.is_m_edge_connected(3)?;
                shape.record(ok, || json!({"Q": q}));
            }
        }
    }
    Ok(vec![congruent, det, shape])
}

fn pipeline(seed: u64, budget: u128) -> Result<Vec<Check>> {
    let mut closed = Check::new("enumerated total = n^2 nu_dagger(type)");
    let mut primitive = Check::new("type (1, n) on surfaces: total = n^2 sigma_1(n)");
    let mut mult = Check::new("multiplicity = n hom_sym(G)");
    let mut shape = Check::new("non-degenerate skeletons: genus g, 3-edge-connected");
    let mut lattice = Check::new("total independent of the lattice");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = CountOptions {
        skeletons: true,
        budget,
        ..Default::default()
    };
    for g in [2usize, 3] {
        for _ in 0..20 {
            let (torus, c) = random_polarized_torus(&mut rng, g, 60, 2);
            let report = total_count_enumerated(&torus, &c, opts)?;
            let pt = polarization_type(&Polarization::new(c.clone())?)?;
            let n = pt.degree.clone();
            let expected = &n * &n * nu_dagger(&pt.ty, budget)?;
            closed.record(report.enumerated_total == expected, || {
                json!({"C": c, "enumerated": report.enumerated_total.to_string(), "closed": expected.to_string()})
            });
            if g == 2 && pt.ty.factors()[0] == 1 {
                let n64 = u64::try_from(&n).expect("degree fits u64");
                let rhs = &n * &n * sigma(1, n64);
                primitive.record(report.enumerated_total == rhs, || json!({"C": c}));
            }
            for e in &report.entries {
                mult.record(
                    e.multiplicity == &n * hom_sym_count(&e.g_invariants),
                    || json!({"C": c, "f2": e.f2}),
                );
                if let Some(sk) = e.skeleton.as_ref().filter(|s| !s.degenerate) {
                    shape.record(
                        sk.genus == g && sk.three_edge_connected,
                        || json!({"C": c, "f2": e.f2}),
                    );
                }
            }
            let other = total_count_enumerated(
                &default_embedding(&c)?,
                &c,
                CountOptions {
                    budget,
                    ..Default::default()
                },
            )?;
            lattice.record(
                other.enumerated_total == report.enumerated_total,
                || json!({"C": c}),
            );
        }
    }
    Ok(vec![closed, primitive, mult, shape, lattice])
}
