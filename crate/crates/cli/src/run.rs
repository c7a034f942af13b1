//! Scenario execution: build the instance, dispatch the command, assemble
//! the report.

use crate::report::Report;
use crate::scenario::{build_scenario, parse_scenario, BuiltScenario, Command};
use qduo_core::analyzer::{
    enumerate_max_ideals, quasi_duo, radical_report, two_sided_check, NoWitness, RadicalReport,
    Verdict,
};
use qduo_core::multivar::{corner_closure_report, multivar_quasi_duo, MultiContext, MultivarVerdict};
use qduo_core::multivar::ComplementConvention;
use qduo_core::ore::OreContext;
use qduo_core::ring::{FiniteRing, Ideal};
use qduo_core::verify::{verify_instance, Status};
use qduo_core::Error;
use std::sync::Arc;
use std::time::Instant;

/// Outer defaults; scenario-level options take precedence.
pub struct Flags {
    pub dmax: usize,
    pub order_cap: usize,
    pub verify: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Flags { dmax: 3, order_cap: 4096, verify: false }
    }
}

/// Input errors exit with code 1, internal invariant failures with code 2.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

fn core_err(e: Error) -> CliError {
    if e.is_internal() {
        return CliError::Internal(e.to_string());
    }
    let hint = match &e {
        Error::OrderCapExceeded { .. } => {
            " (override with --order-cap or a 'bounds order_cap=N' line)"
        }
        Error::EnumerationCapExceeded { .. } => " (the enumeration caps keep runs at desk scale)",
        Error::DegreeCapExceeded { .. } => " (lower dmax on the command line or in the scenario)",
        Error::ClosureNotStabilized { .. } => " (raise dmax)",
        _ => "",
    };
    CliError::Input(format!("{e}{hint}"))
}

/// Runs one scenario document and renders its report.
pub fn run_scenario_text(text: &str, flags: &Flags) -> Result<Report, CliError> {
    let started = Instant::now();
    let spec = parse_scenario(text).map_err(|e| CliError::Input(e.to_string()))?;
    let built =
        build_scenario(spec, flags.dmax, flags.order_cap).map_err(CliError::Input)?;

    let mut report = Report::new();
    report.push("qduo.version", env!("CARGO_PKG_VERSION"));
    report.push("scenario.ring", built.ring.recipe());
    if let Some(m) = built.spec.vars {
        report.push("scenario.vars", m);
    }
    if built.spec.derivations.len() == 1 {
        report.push("scenario.derivation", &built.spec.derivations[0]);
    } else {
        for (i, d) in built.spec.derivations.iter().enumerate() {
            report.push(format!("scenario.derivation.{i}"), d);
        }
    }
    report.push("scenario.command", &built.spec.command);
    report.push("bounds.dmax", built.dmax);
    report.push("bounds.order_cap", built.limits.order_cap);
    report.push("ring.order", built.ring.order());
    report.push("ring.characteristic", built.ring.characteristic());
    report.push("ring.commutative", yes_no(built.ring.is_commutative()));

    match built.spec.command {
        Command::Analyze => {
            let ctx = ore_context(&built)?;
            let v = quasi_duo(&ctx, &built.limits).map_err(core_err)?;
            push_verdict(&mut report, &built.ring, &v);
            push_radical(&mut report, &built.ring, &v.report);
            if flags.verify {
                push_verify(&mut report, &ctx, &built);
            }
        }
        Command::Radical => {
            let ctx = ore_context(&built)?;
            let r = radical_report(&ctx, &built.limits).map_err(core_err)?;
            push_radical(&mut report, &built.ring, &r);
            if flags.verify {
                push_verify(&mut report, &ctx, &built);
            }
        }
        Command::MaxIdeals => {
            let ctx = ore_context(&built)?;
            let v = quasi_duo(&ctx, &built.limits).map_err(core_err)?;
            push_verdict(&mut report, &built.ring, &v);
            let handles = enumerate_max_ideals(&ctx, built.dmax, &built.limits).map_err(core_err)?;
            report.push("maxideal.count", handles.len());
            for (i, h) in handles.iter().enumerate() {
                let field = h.field();
                report.push(format!("maxideal.{i}.ideal"), h.ideal().labels().join(","));
                let poly_labels: Vec<&str> =
                    h.poly().coeffs().iter().map(|&c| field.label(c)).collect();
                report.push(format!("maxideal.{i}.poly"), poly_labels.join(","));
                let lift_labels: Vec<&str> =
                    h.lift().coeffs().iter().map(|&c| built.ring.label(c)).collect();
                report.push(format!("maxideal.{i}.lift"), lift_labels.join(","));
                report.push(
                    format!("maxideal.{i}.quotient_order"),
                    h.quotient_order(&built.limits).map_err(core_err)?,
                );
                let outcome = two_sided_check(h, built.dmax + 1).map_err(core_err)?;
                report.push(
                    format!("maxideal.{i}.two_sided"),
                    if outcome.pass { "pass" } else { "fail" },
                );
                if let Some(w) = outcome.witness {
                    report.push(format!("maxideal.{i}.two_sided_witness"), w);
                }
            }
            if flags.verify {
                push_verify(&mut report, &ctx, &built);
            }
        }
        Command::Verify => {
            let ctx = ore_context(&built)?;
            let v = quasi_duo(&ctx, &built.limits).map_err(core_err)?;
            push_verdict(&mut report, &built.ring, &v);
            push_verify(&mut report, &ctx, &built);
        }
        Command::Multivar => {
            run_multivar(&mut report, &built, flags)?;
        }
    }

    report.push("timing_ms", format!("{:.3}", started.elapsed().as_secs_f64() * 1e3));
    Ok(report)
}

fn ore_context(built: &BuiltScenario) -> Result<Arc<OreContext>, CliError> {
    OreContext::new(built.ring.clone(), built.derivations[0].clone()).map_err(core_err)
}

fn run_multivar(report: &mut Report, built: &BuiltScenario, flags: &Flags) -> Result<(), CliError> {
    let vars = built.spec.vars.unwrap_or(1);
    let ctx = MultiContext::new(built.ring.clone(), built.derivations.clone()).map_err(core_err)?;
    report.push("multivar.vars", vars);
    let verdict = multivar_quasi_duo(&ctx, &built.limits).map_err(core_err)?;
    match &verdict {
        MultivarVerdict::SeveralIndeterminates { vars } => {
            report.push("multivar.quasi_duo", "no");
            report.push("multivar.reason", "several-indeterminates");
            report.push("multivar.indeterminates", vars);
            if flags.verify {
                return Err(CliError::Input(
                    "--verify requires a single-indeterminate scenario".into(),
                ));
            }
        }
        MultivarVerdict::Single(v) => {
            report.push("multivar.quasi_duo", yes_no(v.quasi_duo));
            report.push("multivar.reason", "delegated");
            push_verdict(report, &built.ring, v);
            push_radical(report, &built.ring, &v.report);
            if flags.verify {
                let ctx = ore_context(built)?;
                push_verify(report, &ctx, built);
            }
        }
    }

    if let Some(corner) = &built.spec.corner {
        let convention = built.spec.convention;
        // scenario indices are 1-based (naming x1, x2, ...)
        let zero_based: Vec<usize> = corner.iter().map(|&i| i - 1).collect();
        let echo: Vec<String> = corner.iter().map(|i| i.to_string()).collect();
        report.push("multivar.corner", echo.join(","));
        report.push(
            "multivar.convention",
            match convention {
                ComplementConvention::ConstantsInSubring => "corrected",
                ComplementConvention::Literal => "literal",
            },
        );
        let cr = corner_closure_report(&ctx, &zero_based, built.dmax, convention, &built.limits)
            .map_err(core_err)?;
        report.push(
            "multivar.corner_sj_c",
            if cr.subring_times_complement.pass { "pass" } else { "fail" },
        );
        if let Some(w) = &cr.subring_times_complement.witness {
            report.push("multivar.corner_sj_c_witness", w);
        }
        report.push(
            "multivar.corner_c_sj",
            if cr.complement_times_subring.pass { "pass" } else { "fail" },
        );
        if let Some(w) = &cr.complement_times_subring.witness {
            report.push("multivar.corner_c_sj_witness", w);
        }
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn push_verdict(report: &mut Report, ring: &Arc<FiniteRing>, v: &Verdict) {
    report.push("verdict.quasi_duo", yes_no(v.quasi_duo));
    match &v.witness {
        None => report.push("verdict.witness_kind", "none"),
        Some(NoWitness::Commutator { a, b }) => {
            report.push("verdict.witness_kind", "commutator-escape");
            report.push(
                "verdict.witness_elements",
                format!("{},{}", ring.label(*a), ring.label(*b)),
            );
        }
        Some(NoWitness::DerivationImage { r }) => {
            report.push("verdict.witness_kind", "derivation-escape");
            report.push("verdict.witness_elements", ring.label(*r));
        }
    }
}

fn push_radical(report: &mut Report, _ring: &Arc<FiniteRing>, r: &RadicalReport) {
    let idl = |i: &Ideal| i.labels().join(",");
    report.push("radical.j_size", r.jacobson.len());
    report.push("radical.j_elements", idl(&r.jacobson));
    report.push("radical.t_core_size", r.core.len());
    report.push("radical.t_core_elements", idl(&r.core));
    report.push("radical.m_r_count", r.field_ideals.len());
    report.push("radical.k_size", r.intersection.len());
    report.push("radical.k_elements", idl(&r.intersection));
    report.push("radical.k_equals_core", yes_no(r.k_equals_core));
}

fn push_verify(report: &mut Report, ctx: &Arc<OreContext>, built: &BuiltScenario) {
    let results = verify_instance(ctx, built.dmax, &built.limits);
    report.push("verify.count", results.len());
    for (i, r) in results.iter().enumerate() {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        };
        let line = if r.detail.is_empty() {
            format!("{} {status}", r.name)
        } else {
            format!("{} {status} {}", r.name, r.detail)
        };
        report.push(format!("verify.{i}"), line);
    }
}

/// Exit code for a finished report: 2 when an invariant or closure check
/// failed (internal inconsistency), otherwise 0 regardless of verdicts.
pub fn exit_code_for(report: &Report) -> i32 {
    for (k, v) in report.fields() {
        if k.starts_with("verify.") && k != "verify.count" && v.split(' ').nth(1) == Some("fail") {
            return 2;
        }
        if k.ends_with(".two_sided") && v == "fail" {
            return 2;
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_triangular_inner() {
        let text = "ring triangular 2 (gf 2)\nderivation inner e12\ncommand analyze";
        let r = run_scenario_text(text, &Flags::default()).unwrap();
        assert_eq!(r.get("verdict.quasi_duo"), Some("yes"));
        assert_eq!(r.get("radical.k_size"), Some("2"));
        assert_eq!(r.get("radical.k_equals_core"), Some("yes"));
        assert_eq!(exit_code_for(&r), 0);
    }

    #[test]
    fn maxideals_dmax_one_has_four_entries() {
        let text = "ring triangular 2 (gf 2)\nderivation inner e12\ncommand maxideals dmax=1";
        let r = run_scenario_text(text, &Flags::default()).unwrap();
        assert_eq!(r.get("maxideal.count"), Some("4"));
        for i in 0..4 {
            assert_eq!(r.get(&format!("maxideal.{i}.two_sided")), Some("pass"));
            assert_eq!(r.get(&format!("maxideal.{i}.quotient_order")), Some("2"));
        }
    }

    #[test]
    fn analyze_matrix_ring_reports_commutator_escape() {
        let text = "ring matrix 2 (gf 2)\nderivation zero\ncommand analyze";
        let r = run_scenario_text(text, &Flags::default()).unwrap();
        assert_eq!(r.get("verdict.quasi_duo"), Some("no"));
        assert_eq!(r.get("verdict.witness_kind"), Some("commutator-escape"));
        assert_eq!(r.get("radical.m_r_count"), Some("0"));
        // empty intersection convention: K is the whole ring
        assert_eq!(r.get("radical.k_size"), Some("16"));
    }

    #[test]
    fn derivation_escape_case() {
        let text = "ring gf 2 2 [0,0,1]\nderivation table (t -> 1, t+1 -> 1)\ncommand analyze";
        let r = run_scenario_text(text, &Flags::default()).unwrap();
        assert_eq!(r.get("verdict.quasi_duo"), Some("no"));
        assert_eq!(r.get("verdict.witness_kind"), Some("derivation-escape"));
        assert_eq!(r.get("verdict.witness_elements"), Some("t"));
    }

    #[test]
    fn multivar_two_vars_is_refused_by_the_gate() {
        let text = "ring gf 2\nvars 2\nderivation zero\ncommand multivar corner=1 dmax=3";
        let r = run_scenario_text(text, &Flags::default()).unwrap();
        assert_eq!(r.get("multivar.quasi_duo"), Some("no"));
        assert_eq!(r.get("multivar.reason"), Some("several-indeterminates"));
        assert_eq!(r.get("multivar.corner_sj_c"), Some("pass"));
        assert_eq!(r.get("multivar.corner_c_sj"), Some("pass"));
    }

    #[test]
    fn verify_command_is_green_on_gf2() {
        let text = "ring gf 2\nderivation zero\ncommand verify dmax=2";
        let r = run_scenario_text(text, &Flags::default()).unwrap();
        assert_eq!(exit_code_for(&r), 0);
        let count: usize = r.get("verify.count").unwrap().parse().unwrap();
        assert!(count >= 10);
        for i in 0..count {
            let line = r.get(&format!("verify.{i}")).unwrap();
            assert!(!line.contains(" fail"), "{line}");
        }
    }

    #[test]
    fn input_errors_are_reported() {
        let err = run_scenario_text("ring zmod 0\nderivation zero\ncommand analyze", &Flags::default())
            .unwrap_err();
        assert_eq!(err.exit_code(), 1);

        let err =
            run_scenario_text("ring zmod 4\nderivation zero\ncommand", &Flags::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.message().contains("line 3"));
    }

    #[test]
    fn determinism_modulo_timing() {
        let text = "ring triangular 2 (gf 3)\nderivation inner e12\ncommand maxideals dmax=2";
        let a = run_scenario_text(text, &Flags::default()).unwrap();
        let b = run_scenario_text(text, &Flags::default()).unwrap();
        assert_eq!(a.emit_machine_without_timing(), b.emit_machine_without_timing());
    }
}
