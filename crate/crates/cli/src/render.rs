//! Report rendering: aligned text tables or JSON records.

use quiver_odl::odl::{odl_invariants, ODLConfig, ODLReport, Quantity};
use quiver_odl::orbit::{
    enumerate_orbits, invariants_to_decomposition, orbit_codim, rep_space_dim, Decomposition,
};
use quiver_odl::quiver::{DimVector, Quiver};
use quiver_odl::resolution::{
    canonical_base, closed_form_crepant, det_w, is_crepant, total_space_dim, BundleExpr,
    PicardVector, ResolutionSpec,
};
use quiver_odl::OrbitInvariants;
use serde_json::json;

pub fn roots(quiver: &Quiver, roots: &[DimVector], json_out: bool) {
    if json_out {
        let v: Vec<Vec<u32>> = roots.iter().map(|r| r.0.clone()).collect();
        println!(
            "{}",
            json!({ "case": format!("{:?}", quiver.case_tag), "count": roots.len(), "roots": v })
        );
    } else {
        println!("{} positive roots:", roots.len());
        for r in roots {
            println!("  {r}");
        }
    }
}

pub fn orbits(
    quiver: &Quiver,
    d: &DimVector,
    orbits: &[Decomposition],
    json_out: bool,
) -> anyhow::Result<()> {
    if json_out {
        let rows: Vec<serde_json::Value> = orbits
            .iter()
            .map(|o| {
                let codim = orbit_codim(quiver, d, o).unwrap_or(-1);
                json!({
                    "decomposition": format!("{o}"),
                    "codim": codim,
                })
            })
            .collect();
        println!(
            "{}",
            json!({ "d": d.0, "orbit_count": orbits.len(), "orbits": rows })
        );
    } else {
        println!("{} orbits in R_{d}:", orbits.len());
        let mut rows: Vec<(i64, String)> = orbits
            .iter()
            .map(|o| (orbit_codim(quiver, d, o).unwrap_or(-1), format!("{o}")))
            .collect();
        rows.sort();
        println!("  {:<8} decomposition", "codim");
        for (c, dec) in rows {
            println!("  {c:<8} {dec}");
        }
    }
    Ok(())
}

pub fn orbit_info(
    quiver: &Quiver,
    d: &DimVector,
    inv: &OrbitInvariants,
    json_out: bool,
) -> anyhow::Result<()> {
    let dec = invariants_to_decomposition(quiver, d, inv)?;
    let codim = orbit_codim(quiver, d, &dec)?;
    let rep = rep_space_dim(quiver, d);
    let all = enumerate_orbits(quiver, d)?;
    let mut below = 0usize;
    let mut above = 0usize;
    for other in &all {
        if other == &dec {
            continue;
        }
        if quiver_odl::orbit::degeneration_leq(quiver, other, &dec)? {
            below += 1;
        }
        if quiver_odl::orbit::degeneration_leq(quiver, &dec, other)? {
            above += 1;
        }
    }
    if json_out {
        println!(
            "{}",
            json!({
                "d": d.0,
                "invariants": inv,
                "decomposition": format!("{dec}"),
                "codim": codim,
                "orbit_dim": rep - codim,
                "rep_space_dim": rep,
                "orbits_in_closure": below,
                "orbits_above": above,
            })
        );
    } else {
        println!("orbit of {dec} in R_{d}");
        println!("  codimension      {codim}");
        println!("  orbit dimension  {}", rep - codim);
        println!("  ambient dim      {rep}");
        println!("  strictly below   {below} orbits (in this orbit's closure)");
        println!("  strictly above   {above} orbits (closures containing it)");
    }
    Ok(())
}

fn picard_to_json(p: &PicardVector) -> serde_json::Value {
    json!({ "flag_steps": p.flag, "ambient": p.ambient, "base_o1": p.base_o1 })
}

fn bundle_to_text(spec: &ResolutionSpec, b: &BundleExpr) -> String {
    let step_name = |factor: usize, idx: usize| -> String {
        let f = &spec.base[factor];
        let v = f.vertex + 1;
        if idx == 0 {
            "0".into()
        } else if idx <= f.steps.len() {
            format!("U(V{v};{})", f.steps[idx - 1])
        } else {
            format!("V{v}")
        }
    };
    match b {
        BundleExpr::Taut { factor, step } => step_name(*factor, *step),
        BundleExpr::Quot { factor, lo, hi } => {
            if *lo == 0 {
                step_name(*factor, *hi)
            } else {
                format!("{}/{}", step_name(*factor, *hi), step_name(*factor, *lo))
            }
        }
        BundleExpr::Trivial(r) => format!("triv({r})"),
        BundleExpr::Ambient(n) => n.clone(),
        BundleExpr::BaseU => "U".into(),
        BundleExpr::BaseQ => "Q".into(),
        BundleExpr::BaseO(m) => format!("O({m})"),
        BundleExpr::Dual(a) => format!("dual({})", bundle_to_text(spec, a)),
        BundleExpr::Sum(items) => format!(
            "sum({})",
            items
                .iter()
                .map(|x| bundle_to_text(spec, x))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        BundleExpr::Tensor(a, b) => format!(
            "tensor({}, {})",
            bundle_to_text(spec, a),
            bundle_to_text(spec, b)
        ),
        BundleExpr::Wedge2(a) => format!("wedge2({})", bundle_to_text(spec, a)),
        BundleExpr::Sym2(a) => format!("sym2({})", bundle_to_text(spec, a)),
        BundleExpr::Det(a) => format!("det({})", bundle_to_text(spec, a)),
    }
}

pub fn resolve(
    quiver: &Quiver,
    d: &DimVector,
    inv: &OrbitInvariants,
    spec: &ResolutionSpec,
    json_out: bool,
) -> anyhow::Result<()> {
    let crepant = is_crepant(spec)?;
    let rt = spec.case.map(|(_, rt)| rt).unwrap();
    let closed = closed_form_crepant(quiver, d, inv, rt).ok();
    let dec = invariants_to_decomposition(quiver, d, inv)?;
    let codim = orbit_codim(quiver, d, &dec)?;
    let total = total_space_dim(spec)?;
    let det = det_w(spec)?;
    let k = canonical_base(&spec.base)?;
    let criterion = format!("{:?} display ({rt}) closed-form crepancy criterion", quiver.case_tag);
    if json_out {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "case": format!("{:?}", quiver.case_tag),
                "res_type": format!("{rt}"),
                "d": d.0,
                "invariants": inv,
                "base": spec.base,
                "bundle": spec.bundle,
                "bundle_text": bundle_to_text(spec, &spec.bundle),
                "degenerate_display": spec.degenerate,
                "total_space_dim": total,
                "orbit_codim": codim,
                "ambient_rep_dim": spec.ambient_rep_dim,
                "det_w": picard_to_json(&det),
                "canonical_base": picard_to_json(&k),
                "crepant": crepant,
                "closed_form_crepant": closed,
                "criterion": criterion,
                "contraction_advisory": spec.contraction_advisory,
            }))?
        );
    } else {
        println!("resolution display ({rt}) for orbit {inv:?} in R_{d}");
        for f in &spec.base {
            println!(
                "  flag factor at vertex {}: steps {:?} in rank {}",
                f.vertex + 1,
                f.steps,
                f.ambient_rank
            );
        }
        println!("  bundle           {}", bundle_to_text(spec, &spec.bundle));
        println!("  total space dim  {total}   (ambient {} - codim {codim})", spec.ambient_rep_dim);
        println!("  det(W) flags     {:?}", det.flag);
        println!("  K_F flags        {:?}", k.flag);
        println!(
            "  crepant          {crepant}   (closed form: {})",
            closed.map(|c| c.to_string()).unwrap_or_else(|| "n/a".into())
        );
        println!("  criterion        {criterion}");
        if spec.degenerate {
            println!("  note: some printed flag steps degenerated and were dropped");
        }
        for note in &spec.contraction_advisory {
            println!(
                "  contraction advisory: vertex {} step {} contracts in codim {} (hom rank {})",
                note.vertex + 1,
                note.step_dim,
                note.contracted_codim,
                note.hom_rank
            );
        }
    }
    Ok(())
}

pub fn odl_with_progress(
    config: &ODLConfig,
    quantities: &[Quantity],
    json_out: bool,
) -> anyhow::Result<ODLReport> {
    if !json_out {
        eprintln!(
            "computing {} quantities over the localization tower...",
            quantities.len()
        );
    }
    let report = odl_invariants(config, quantities)?;
    if !json_out {
        eprintln!(
            "done: {} fixed points per sum, {} ms",
            report.fixed_point_count, report.wall_time_ms
        );
    }
    Ok(report)
}

pub fn odl_report(report: &ODLReport, json_out: bool) -> anyhow::Result<()> {
    if json_out {
        println!("{}", serde_json::to_string_pretty(report)?);
        return Ok(());
    }
    println!("degeneracy locus report (display {})", report.res_type);
    println!("  crepant             {}", report.crepant);
    println!("  codim in X          {}", report.codim_x);
    println!("  dim X               {}", report.dim_x);
    println!("  dim D               {}", report.dim_d);
    if let Some(exps) = &report.canonical_rel {
        let text: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != 0)
            .map(|(i, e)| format!("det(E{})^{}", i + 1, e))
            .collect();
        println!(
            "  K_(D/X)             {}",
            if text.is_empty() { "trivial".into() } else { text.join(" ⊗ ") }
        );
    }
    if let Some(u) = report.k_units {
        println!("  K_D in O(1) units   {u}");
    }
    if let Some(t) = report.canonical_total_trivial {
        println!("  K_D trivial         {t}");
    }
    println!(
        "  sing codim bound    >= {}{}",
        report.sing_codim_bound,
        if report.generically_smooth {
            "  (exceeds dim D: generically smooth)"
        } else {
            ""
        }
    );
    println!("  fixed points        {}", report.fixed_point_count);
    for (k, v) in &report.numeric {
        println!("  {k:<18}  {v}");
    }
    println!("  note: values are invariants of the resolved locus Z(s~)");
    println!("  note: global generation of the Hom bundle is assumed, not verified");
    Ok(())
}
