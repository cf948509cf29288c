use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use orbit_core::dynsys::orbit_sample;
use orbit_core::generic::{
    check_forward_invariance, exceptional_generators, generic_rank, GenericAnalysis, PointStatus,
};
use orbit_core::invariants::{
    density_evidence, poly_invariants, spot_check_words, verify_rational_invariant, DensityVerdict,
};
use orbit_core::poly::monomials_up_to;
use orbit_core::separator::{check_phi_invariance, fiber_check, separate, Outcome, ProxyParams, Side};
use orbit_core::vanish::{hilbert_profile, stabilized_ideal, TruncatedIdeal};
use orbit_core::{Point, Poly};
use serde_json::{json, Value};

use crate::app::{fmt_point, tag, CliError, Command, CommandRegistry, Ctx, Flags, Report};
use crate::parse::parse_poly;
use crate::selftest;
/// Random words evaluated against each computed invariant basis.
const WORD_TRIALS: usize = 16;


pub fn registry() -> CommandRegistry {
    let mut reg = CommandRegistry::empty();
    let all: [Arc<dyn Command>; 10] = [
        Arc::new(OrbitCmd),
        Arc::new(IdealCmd),
        Arc::new(HilbertCmd),
        Arc::new(GenericRankCmd),
        Arc::new(ExceptionalCmd),
        Arc::new(SeparateCmd),
        Arc::new(PhiCheckCmd),
        Arc::new(InvariantsCmd),
        Arc::new(DensityCmd),
        Arc::new(SelftestCmd),
    ];
    for c in all {
        reg.register(c);
    }
    reg
}

fn polys(ps: &[Poly], names: &[String]) -> Vec<String> {
    ps.iter().map(|p| p.display(names).to_string()).collect()
}

fn ideal_json(ideal: &TruncatedIdeal, names: &[String]) -> Value {
    json!({ "degree": ideal.d, "basis": polys(&ideal.basis, names), "hd": ideal.hd, "rank": ideal.rank })
}

fn proxy_params(ctx: &Ctx) -> ProxyParams {
    let o = ctx.opts;
    ProxyParams { d: o.degree(), window: o.window, len_limit: o.len_limit, cap: o.cap }
}

fn basis_text(basis: &[String]) -> String {
    if basis.is_empty() {
        "{} (zero ideal)".to_string()
    } else {
        format!("{{{}}}", basis.join(", "))
    }
}

struct OrbitCmd;

impl Command for OrbitCmd {
    fn name(&self) -> &'static str {
        "orbit"
    }

    fn about(&self) -> &'static str {
        "distinct orbit points up to the word length"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (_, spec) = ctx.system()?;
        let mut flags = Flags::default();
        let mut text = String::new();
        let mut out = Vec::new();
        for (name, base) in ctx.points_required()? {
            let s = orbit_sample(spec, &base, ctx.opts.max_len(), ctx.opts.cap);
            flags.skip(s.skipped.iter().map(ToString::to_string));
            let _ = writeln!(text, "orbit of {}: {} points, depth {}", tag(&name, &base), s.len(), s.depth);
            for (w, p) in &s.entries {
                let _ = writeln!(text, "  {w:<16} {}", fmt_point(p));
            }
            let entries: Vec<Value> =
                s.entries.iter().map(|(w, p)| json!({ "word": w.to_string(), "point": p })).collect();
            out.push(json!({
                "name": name,
                "base": base,
                "depth": s.depth,
                "exhausted": s.exhausted,
                "capped": s.capped,
                "points": entries,
                "skipped": s.skipped.iter().map(ToString::to_string).collect::<Vec<_>>(),
            }));
        }
        Ok(Report { result: Value::Array(out), text, flags })
    }
}

struct IdealCmd;

impl Command for IdealCmd {
    fn name(&self) -> &'static str {
        "ideal"
    }

    fn about(&self) -> &'static str {
        "stabilized truncated ideal of each orbit"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (_, spec) = ctx.system()?;
        let names = ctx.names();
        let o = ctx.opts;
        let mut flags = Flags::default();
        let mut text = String::new();
        let mut out = Vec::new();
        for (name, base) in ctx.points_required()? {
            let st = stabilized_ideal(spec, &base, o.degree(), o.window, o.len_limit, o.cap)?;
            flags.skip(st.skipped().iter().map(ToString::to_string));
            flags.unstable |= !st.stabilized;
            let basis = polys(&st.ideal.basis, &names);
            let _ = writeln!(
                text,
                "{}: I_{} = {}  (h = {}, {} points, length {}{})",
                tag(&name, &base),
                o.degree(),
                basis_text(&basis),
                st.ideal.hd,
                st.sample.len(),
                st.used_len,
                if st.stabilized { "" } else { ", unstable" },
            );
            let mut v = ideal_json(&st.ideal, &names);
            v["name"] = json!(name);
            v["base"] = json!(base);
            v["stabilized"] = json!(st.stabilized);
            v["used_len"] = json!(st.used_len);
            v["sample_size"] = json!(st.sample.len());
            out.push(v);
        }
        Ok(Report { result: Value::Array(out), text, flags })
    }
}

struct HilbertCmd;

impl Command for HilbertCmd {
    fn name(&self) -> &'static str {
        "hilbert"
    }

    fn about(&self) -> &'static str {
        "h(0..degree) of each orbit sample"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (sys, spec) = ctx.system()?;
        let o = ctx.opts;
        let mut flags = Flags::default();
        let mut text = String::new();
        let mut out = Vec::new();
        for (name, base) in ctx.points_required()? {
            let st = stabilized_ideal(spec, &base, o.degree(), o.window, o.len_limit, o.cap)?;
            flags.skip(st.skipped().iter().map(ToString::to_string));
            flags.unstable |= !st.stabilized;
            let prof = hilbert_profile(sys.field, &st.sample.points(), sys.vars.len(), o.degree());
            let _ = writeln!(text, "{} ({} points)", tag(&name, &base), st.sample.len());
            for (d, h) in &prof.values {
                let _ = writeln!(text, "  h({d}) = {h}");
            }
            let values: BTreeMap<String, usize> = prof.values.iter().map(|(d, h)| (d.to_string(), *h)).collect();
            out.push(json!({
                "name": name,
                "base": base,
                "values": values,
                "stabilized": st.stabilized,
                "sample_size": st.sample.len(),
            }));
        }
        Ok(Report { result: Value::Array(out), text, flags })
    }
}

struct GenericRankCmd;

impl Command for GenericRankCmd {
    fn name(&self) -> &'static str {
        "generic-rank"
    }

    fn about(&self) -> &'static str {
        "rank r of the generic matrix and h(d) = l - r"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (sys, spec) = ctx.system()?;
        let o = ctx.opts;
        let strategy = ctx.strategy()?;
        let cert = generic_rank(spec, o.degree(), o.max_len(), strategy.as_ref(), o.seed)?;
        let monos = monomials_up_to(sys.vars.len(), o.degree());
        let mono_names: Vec<String> = cert
            .pivot_cols
            .iter()
            .map(|&j| Poly::monomial(sys.vars.len(), monos[j].clone(), sys.field.one()).display(&sys.vars).to_string())
            .collect();
        let words: Vec<String> = cert.pivot_words.iter().map(ToString::to_string).collect();
        let flags = Flags { unstable: !cert.stable_in_len, ..Flags::default() };
        let text = format!(
            "d = {}, max_len = {}: r = {}, h({}) = {} (l = {}, {} rows, {} method)\n\
             pivot words: {}\npivot monomials: {}\nrank at length {}: {}\n",
            cert.d,
            cert.max_len,
            cert.r,
            cert.d,
            cert.hd,
            cert.l,
            cert.rows,
            cert.method,
            words.join(", "),
            mono_names.join(", "),
            cert.max_len + 1,
            cert.r_next_len,
        );
        let mut result = serde_json::to_value(&cert).expect("certificate serializes");
        result["pivot_words"] = json!(words);
        result["pivot_monomials"] = json!(mono_names);
        Ok(Report { result, text, flags })
    }
}

struct ExceptionalCmd;

impl Command for ExceptionalCmd {
    fn name(&self) -> &'static str {
        "exceptional"
    }

    fn about(&self) -> &'static str {
        "minor generators of the exceptional locus and point membership"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (_, spec) = ctx.system()?;
        let names = ctx.names();
        let o = ctx.opts;
        let strategy = ctx.strategy()?;
        let analysis = GenericAnalysis::new(spec, o.degree(), o.max_len(), strategy.as_ref(), o.seed)?;
        let gens = exceptional_generators(&analysis, o.budget)?;
        let pts = ctx.points()?;
        let mut flags = Flags::default();
        let gen_strs = polys(&gens.gens, &names);
        let mut text = format!(
            "d = {}, r = {}: {} generators from {} minors{}\n",
            gens.d,
            gens.r,
            gens.gens.len(),
            gens.minors_examined,
            if gens.complete { " (all minors)" } else { " (budget reached)" },
        );
        for g in &gen_strs {
            let _ = writeln!(text, "  {g}");
        }
        let mut members = Vec::new();
        for (name, p) in &pts {
            let c = analysis.is_exceptional(spec, p);
            flags.outside_domain |= c.status == PointStatus::OutsideDomain;
            let rank = c.rank_at_point.map_or("-".to_string(), |r| r.to_string());
            let status = serde_json::to_value(c.status).expect("status serializes");
            let _ = writeln!(text, "{}: {} (rank {rank} of {})", tag(name, p), status.as_str().unwrap_or(""), c.r);
            members.push(json!({ "name": name, "point": p, "status": c.status, "rank_at_point": c.rank_at_point }));
        }
        let sample: Vec<Point> = pts.iter().map(|(_, p)| p.clone()).collect();
        let inv = check_forward_invariance(spec, &analysis, &gens, &sample);
        flags.failed_checks = inv.violations.len();
        if !sample.is_empty() {
            let _ = writeln!(
                text,
                "forward invariance: {} exceptional points, {} images checked, {} violations",
                inv.exceptional_points,
                inv.images_checked,
                inv.violations.len()
            );
        }
        let result = json!({
            "degree": gens.d,
            "r": gens.r,
            "hd": analysis.cert.hd,
            "generators": gen_strs,
            "minors_examined": gens.minors_examined,
            "complete": gens.complete,
            "points": members,
            "invariance": inv,
        });
        Ok(Report { result, text, flags })
    }
}

struct SeparateCmd;

impl Command for SeparateCmd {
    fn name(&self) -> &'static str {
        "separate"
    }

    fn about(&self) -> &'static str {
        "compare the orbit closures of two points"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (_, spec) = ctx.system()?;
        let names = ctx.names();
        let pts = ctx.points()?;
        let [(xn, x), (yn, y)] = pts.as_slice() else {
            return Err(CliError::Usage(format!("separate needs exactly two points, got {}", pts.len())));
        };
        let v = separate(spec, x, y, &proxy_params(ctx))?;
        let mut flags = Flags::default();
        flags.skip(v.x_detail.skipped.iter().chain(&v.y_detail.skipped).map(ToString::to_string));
        flags.unstable = v.outcome == Outcome::Unstable;
        let outcome = serde_json::to_value(v.outcome).expect("outcome serializes");
        let mut text = format!(
            "{} vs {}: {} at degree {}\n",
            tag(xn, x),
            tag(yn, y),
            outcome.as_str().unwrap_or(""),
            v.d
        );
        let witness = v.witness.as_ref().map(|w| {
            let poly = w.poly.display(&names).to_string();
            let from = match w.side {
                Side::X => xn,
                Side::Y => yn,
            };
            let _ = writeln!(text, "witness: {poly} (vanishes on the orbit of {from}; value {} at {})", w.value, fmt_point(&w.at));
            json!({ "poly": poly, "side": w.side, "at": w.at, "value": w.value })
        });
        let xb = polys(&v.x_ideal.basis, &names);
        let yb = polys(&v.y_ideal.basis, &names);
        let _ = writeln!(text, "  ideal of {xn}: {}\n  ideal of {yn}: {}", basis_text(&xb), basis_text(&yb));
        let result = json!({
            "outcome": v.outcome,
            "degree": v.d,
            "witness": witness,
            "x": { "name": xn, "point": x, "ideal": ideal_json(&v.x_ideal, &names), "detail": v.x_detail },
            "y": { "name": yn, "point": y, "ideal": ideal_json(&v.y_ideal, &names), "detail": v.y_detail },
        });
        Ok(Report { result, text, flags })
    }
}

struct PhiCheckCmd;

impl Command for PhiCheckCmd {
    fn name(&self) -> &'static str {
        "phi-check"
    }

    fn about(&self) -> &'static str {
        "orbit-ideal constancy along generator images, and the fiber containment check"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (_, spec) = ctx.system()?;
        let names = ctx.names();
        let o = ctx.opts;
        let params = proxy_params(ctx);
        let strategy = ctx.strategy()?;
        let analysis = GenericAnalysis::new(spec, o.degree(), o.max_len(), strategy.as_ref(), o.seed)?;
        let pts = ctx.points_required()?;
        let probes = if o.probe.is_empty() { pts.clone() } else { ctx.probes()? };
        let probe_pts: Vec<Point> = probes.iter().map(|(_, p)| p.clone()).collect();
        let mut flags = Flags::default();
        let mut text = String::new();
        let mut out = Vec::new();
        for (name, base) in &pts {
            let rep = check_phi_invariance(spec, base, &params, Some(&analysis))?;
            flags.failed_checks += rep.violations.len();
            flags.unstable |= !rep.undetermined.is_empty();
            let _ = writeln!(
                text,
                "{}: I = {}; {} images, {} violations, {} excused, {} undetermined",
                tag(name, base),
                basis_text(&polys(&rep.base_ideal.basis, &names)),
                rep.images.len(),
                rep.violations.len(),
                rep.excused.len(),
                rep.undetermined.len(),
            );
            let fiber = if spec.is_monoid() {
                let f = fiber_check(spec, base, &probe_pts, &params)?;
                flags.failed_checks += f.failures.len();
                for (pr, (pn, _)) in f.probes.iter().zip(&probes) {
                    let _ = writeln!(text, "  probe {}: equal {}, member {}", tag(pn, &pr.probe), pr.equal, pr.member);
                }
                json!({ "probes": f.probes, "failures": f.failures })
            } else {
                let _ = writeln!(text, "  fiber check skipped (not a monoid)");
                Value::Null
            };
            out.push(json!({
                "name": name,
                "base": base,
                "ideal": ideal_json(&rep.base_ideal, &names),
                "base_status": rep.base_status,
                "images": rep.images,
                "violations": rep.violations,
                "excused": rep.excused,
                "undetermined": rep.undetermined,
                "fiber": fiber,
            }));
        }
        Ok(Report { result: Value::Array(out), text, flags })
    }
}

struct InvariantsCmd;

impl Command for InvariantsCmd {
    fn name(&self) -> &'static str {
        "invariants"
    }

    fn about(&self) -> &'static str {
        "polynomial invariants up to the degree; --p/--q verify a rational invariant"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (sys, spec) = ctx.system()?;
        let names = ctx.names();
        let d = ctx.opts.degree();
        let inv = poly_invariants(spec, d);
        let basis = polys(&inv.basis, &names);
        let mut text = format!("invariants of degree <= {d} (dim {}): {}\n", inv.dim, basis.join(", "));
        let words = spot_check_words(spec, &inv, WORD_TRIALS, ctx.opts.max_len(), ctx.opts.seed);
        let flags = Flags { failed_checks: words.failures.len(), ..Flags::default() };
        let _ = writeln!(
            text,
            "random words: {} tested, {} undefined, {} failures",
            words.words_tested,
            words.undefined,
            words.failures.len()
        );
        let verify = match (&ctx.opts.p, &ctx.opts.q) {
            (None, None) => Value::Null,
            (None, Some(_)) => return Err(CliError::Usage("--q needs --p".into())),
            (Some(p), q) => {
                let p = parse_poly(p, &sys.vars, sys.field)?;
                let q = match q {
                    Some(q) => parse_poly(q, &sys.vars, sys.field)?,
                    None => Poly::one(sys.field, sys.vars.len()),
                };
                let check = verify_rational_invariant(spec, &p, &q)?;
                let (ps, qs) = (p.display(&names).to_string(), q.display(&names).to_string());
                let _ = writeln!(text, "({ps})/({qs}) invariant: {}", check.holds);
                let residues: Vec<Value> = check
                    .residues
                    .iter()
                    .map(|(i, r)| {
                        let r = r.display(&names).to_string();
                        let _ = writeln!(text, "  generator {i}: residue {r}");
                        json!({ "generator": i, "residue": r })
                    })
                    .collect();
                json!({ "p": ps, "q": qs, "holds": check.holds, "residues": residues })
            }
        };
        let result = json!({ "degree": d, "dim": inv.dim, "basis": basis, "verify": verify, "word_check": words });
        Ok(Report { result, text, flags })
    }
}

struct DensityCmd;

impl Command for DensityCmd {
    fn name(&self) -> &'static str {
        "density"
    }

    fn about(&self) -> &'static str {
        "evidence that an orbit is dense"
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let (_, spec) = ctx.system()?;
        let o = ctx.opts;
        let d = o.degree();
        let d_inv = o.d_inv.unwrap_or(2 * d);
        let params = proxy_params(ctx);
        let mut flags = Flags::default();
        let mut text = String::new();
        let mut out = Vec::new();
        for (name, base) in ctx.points_required()? {
            let r = density_evidence(spec, &base, d, d_inv, &params, o.max_len(), o.seed)?;
            flags.outside_domain |= r.outside_domain;
            flags.unstable |= !r.orbit_stabilized;
            let verdict = match r.verdict {
                DensityVerdict::EvidenceForDense => "evidence-for-dense",
                DensityVerdict::Inconclusive => "inconclusive",
            };
            let _ = writeln!(
                text,
                "{}: {verdict} (orbit ideal zero: {}, only constant invariants: {}, exceptional: {})",
                tag(&name, &base),
                r.orbit_ideal_zero,
                r.invariants_trivial,
                r.exceptional_flag,
            );
            let mut v = serde_json::to_value(&r).expect("report serializes");
            v["name"] = json!(name);
            out.push(v);
        }
        Ok(Report { result: Value::Array(out), text, flags })
    }
}

struct SelftestCmd;

impl Command for SelftestCmd {
    fn name(&self) -> &'static str {
        "selftest"
    }

    fn about(&self) -> &'static str {
        "run the built-in fixture checks"
    }

    fn needs_system(&self) -> bool {
        false
    }

    fn run(&self, ctx: &Ctx) -> Result<Report, CliError> {
        let checks = selftest::run_all(ctx.opts.seed);
        let mut text = String::new();
        for c in &checks {
            let _ = writeln!(text, "[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
        }
        let failed = checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(text, "{} of {} checks passed", checks.len() - failed, checks.len());
        let flags = Flags { failed_checks: failed, ..Flags::default() };
        Ok(Report { result: json!(checks), text, flags })
    }
}
