//! Quick end-to-end checks on the bundled fixtures.

use orbit_core::dynsys::SemigroupSpec;
use orbit_core::generic::{exceptional_generators, generic_rank, ExactRank, GenericAnalysis, SpecializedRank};
use orbit_core::invariants::{density_evidence, poly_invariants, verify_rational_invariant, DensityVerdict};
use orbit_core::separator::{check_phi_invariance, fiber_check, phi_proxy, separate, Outcome, ProxyParams};
use orbit_core::{Point, Poly};
use serde::Serialize;

use crate::fixtures::{self, ADDITIVE, SCALING, SQUARING};
use crate::parse::SystemFile;

pub const CHECK_PRIME: u64 = 1_000_003;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, f: impl FnOnce() -> Result<String, String>) -> Check {
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check { name: name.to_string(), passed, detail }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn setup(text: &str) -> (SystemFile, SemigroupSpec) {
    let sys = fixtures::load(text);
    let spec = sys.spec().expect("fixture generators are valid");
    (sys, spec)
}

fn pt(sys: &SystemFile, coords: &[i64]) -> Point {
    coords.iter().map(|&c| sys.field.from_i64(c)).collect()
}

fn shown(ps: &[Poly], sys: &SystemFile) -> Vec<String> {
    ps.iter().map(|p| p.display(&sys.vars).to_string()).collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run_all(seed: u64) -> Vec<Check> {
    let (add_sys, add) = setup(ADDITIVE);
    let (sq_sys, sq) = setup(SQUARING);
    let (sc_sys, sc) = setup(SCALING);
    let p1 = ProxyParams::new(1);
    let mut out = Vec::new();

    out.push(check("additive generic rank", || {
        for strategy in [&ExactRank as &dyn orbit_core::generic::RankStrategy, &SpecializedRank::default()] {
            let c = generic_rank(&add, 1, 2, strategy, seed).map_err(err)?;
            ensure(c.r == 2 && c.hd == 1, format!("{}: r = {}, h = {}", strategy.name(), c.r, c.hd))?;
        }
        Ok("r = 2, h(1) = 1".into())
    }));

    out.push(check("additive exceptional generators", || {
        let a = GenericAnalysis::new(&add, 1, 2, &ExactRank, seed).map_err(err)?;
        let g = exceptional_generators(&a, 64).map_err(err)?;
        let x = Poly::var(add_sys.field, 2, 0);
        let hit = g.gens.iter().find(|p| p.div_exact(&x).is_some());
        ensure(hit.is_some(), "no generator divisible by x")?;
        Ok(format!("generators {:?}", shown(&g.gens, &add_sys)))
    }));

    out.push(check("additive separation", || {
        let v = separate(&add, &pt(&add_sys, &[2, 0]), &pt(&add_sys, &[2, 7]), &p1).map_err(err)?;
        ensure(v.outcome == Outcome::Equal, format!("(2,0) vs (2,7): {:?}", v.outcome))?;
        let v = separate(&add, &pt(&add_sys, &[2, 0]), &pt(&add_sys, &[3, 0]), &p1).map_err(err)?;
        let w = v.witness.as_ref().map(|w| w.poly.display(&add_sys.vars).to_string());
        ensure(v.outcome == Outcome::Distinct && w.as_deref() == Some("x - 2"), format!("(2,0) vs (3,0): {:?} {w:?}", v.outcome))?;
        Ok("Equal; Distinct with witness x - 2".into())
    }));

    out.push(check("additive invariants", || {
        let b = shown(&poly_invariants(&add, 3).basis, &add_sys);
        ensure(b == ["1", "x", "x^2", "x^3"], format!("{b:?}"))?;
        Ok(format!("{b:?}"))
    }));

    out.push(check("squaring exceptional points", || {
        let a = GenericAnalysis::new(&sq, 2, 4, &SpecializedRank::default(), seed).map_err(err)?;
        for v in [0, 1, -1] {
            ensure(a.is_exceptional(&sq, &pt(&sq_sys, &[v])).is_exceptional(), format!("{v} not exceptional"))?;
        }
        ensure(!a.is_exceptional(&sq, &pt(&sq_sys, &[3])).is_exceptional(), "3 flagged exceptional")?;
        Ok("0, 1, -1 exceptional; 3 generic".into())
    }));

    out.push(check("squaring orbit ideal of 3", || {
        for d in 1..=5 {
            let st = phi_proxy(&sq, &pt(&sq_sys, &[3]), &ProxyParams::new(d)).map_err(err)?;
            ensure(st.stabilized && st.ideal.is_zero(), format!("d = {d}: h = {}", st.ideal.hd))?;
            ensure(st.sample.len() > d as usize, format!("d = {d}: only {} points", st.sample.len()))?;
        }
        Ok("zero ideal for d <= 5".into())
    }));

    out.push(check("squaring invariants and density", || {
        let b = poly_invariants(&sq, 8);
        ensure(b.dim == 1, format!("dim {}", b.dim))?;
        let r = density_evidence(&sq, &pt(&sq_sys, &[3]), 3, 6, &ProxyParams::new(3), 4, seed).map_err(err)?;
        ensure(r.verdict == DensityVerdict::EvidenceForDense, format!("{:?}", r.verdict))?;
        Ok("only constants; evidence-for-dense at 3".into())
    }));

    out.push(check("scaling invariant and proxy", || {
        let (x, y) = (Poly::var(sc_sys.field, 2, 0), Poly::var(sc_sys.field, 2, 1));
        ensure(verify_rational_invariant(&sc, &x, &y).map_err(err)?.holds, "x/y rejected")?;
        let diag = &x - &y;
        for p in [[1, 1], [2, 2]] {
            let st = phi_proxy(&sc, &pt(&sc_sys, &p), &p1).map_err(err)?;
            ensure(st.ideal.hd == 1 && st.ideal.contains(&diag), format!("{p:?}: {:?}", shown(&st.ideal.basis, &sc_sys)))?;
        }
        let v = separate(&sc, &pt(&sc_sys, &[1, 1]), &pt(&sc_sys, &[1, 2]), &p1).map_err(err)?;
        ensure(v.outcome == Outcome::Distinct, format!("(1,1) vs (1,2): {:?}", v.outcome))?;
        Ok("x/y invariant; (1,1) ~ (2,2); (1,1) vs (1,2) distinct".into())
    }));

    out.push(check("rank modes and fields agree", || {
        let mut lines = Vec::new();
        for (name, text) in fixtures::ALL {
            let (_, spec) = setup(text);
            let fp = spec.reduce_mod(CHECK_PRIME).ok_or("fixture does not reduce mod p")?;
            for d in 1..=2 {
                let e = generic_rank(&spec, d, 4, &ExactRank, seed).map_err(err)?;
                let s = generic_rank(&spec, d, 4, &SpecializedRank::default(), seed).map_err(err)?;
                let f = generic_rank(&fp, d, 4, &SpecializedRank::default(), seed).map_err(err)?;
                ensure(e.r == s.r && e.hd == f.hd, format!("{name} d={d}: exact {} specialized {} Fp h {}", e.r, s.r, f.hd))?;
                lines.push(format!("{name} d={d}: r={}", e.r));
            }
        }
        Ok(lines.join("; "))
    }));

    out.push(check("orbit ideal constant along orbits", || {
        for (sys, spec) in [(&add_sys, &add), (&sq_sys, &sq), (&sc_sys, &sc)] {
            for d in 1..=2 {
                let a = GenericAnalysis::new(spec, d, 4, &SpecializedRank::default(), seed).map_err(err)?;
                let params = ProxyParams::new(d);
                let points: Vec<Point> = sys.points.iter().map(|(_, p)| p.clone()).collect();
                for (n, p) in &sys.points {
                    let rep = check_phi_invariance(spec, p, &params, Some(&a)).map_err(err)?;
                    ensure(rep.passed(), format!("point {n}, d = {d}: generators {:?} change the ideal", rep.violations))?;
                    let f = fiber_check(spec, p, &points, &params).map_err(err)?;
                    ensure(f.passed(), format!("point {n}, d = {d}: fiber failures {:?}", f.failures))?;
                }
            }
        }
        Ok("no violations".into())
    }));

    out
}
