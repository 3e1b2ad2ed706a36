//! Exhaustive verification sweeps: proposition-equivalence, codimension
//! agreement, closure order, and birationality identities over bounded
//! dimension ranges. Shared by the acceptance suite and `verify` in the
//! command line tool.

use crate::error::Result;
use crate::odl::odl_codim;
use crate::oracle::{degeneration_path_check, orbit_dim_numeric, resolution_fiber_check};
use crate::orbit::{
    canonical_representative, degeneration_leq_with, enumerate_orbits, in_closure,
    invariants_to_decomposition, orbit_codim_with, rep_space_dim, Decomposition, HomTable,
    OrbitInvariants, ProfileTable,
};
use crate::quiver::{CaseTag, DimVector, Quiver};
use crate::resolution::{
    build_resolution, closed_form_crepant, is_crepant, select_res_type, total_space_dim, ResType,
};
use crate::Error;

/// Result of one sweep: how many configurations ran and every mismatch.
#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub label: String,
    pub checked: u64,
    pub mismatches: Vec<String>,
}

impl SweepOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "[{}] {}: {} configurations, {} mismatches",
            if self.passed() { "pass" } else { "FAIL" },
            self.label,
            self.checked,
            self.mismatches.len()
        )
    }
}

fn all_dim_vectors(len: usize, max: u32) -> Vec<DimVector> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    loop {
        out.push(DimVector(cur.clone()));
        let mut i = 0;
        loop {
            if i == len {
                return out;
            }
            cur[i] += 1;
            if cur[i] <= max {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Every decomposition with all vertex dimensions bounded by `max`.
fn all_decompositions(quiver: &Quiver, max: u32) -> Result<Vec<Decomposition>> {
    let roots = quiver.positive_roots()?;
    let mut out = Vec::new();
    let mut mults: Vec<(usize, u32)> = Vec::new();
    fn rec(
        roots: &[DimVector],
        idx: usize,
        used: &mut Vec<u32>,
        max: u32,
        mults: &mut Vec<(usize, u32)>,
        out: &mut Vec<Decomposition>,
    ) {
        if idx == roots.len() {
            let pairs: Vec<(Vec<u32>, u32)> = mults
                .iter()
                .map(|&(i, m)| (roots[i].0.clone(), m))
                .collect();
            out.push(Decomposition::from_pairs(&pairs));
            return;
        }
        let cap = (0..used.len())
            .filter(|&v| roots[idx].0[v] > 0)
            .map(|v| (max - used[v]) / roots[idx].0[v])
            .min()
            .unwrap_or(0);
        for m in 0..=cap {
            if m > 0 {
                for v in 0..used.len() {
                    used[v] += roots[idx].0[v];
                }
                if m == 1 {
                    mults.push((idx, 1));
                } else {
                    mults.last_mut().unwrap().1 = m;
                }
            }
            rec(roots, idx + 1, used, max, mults, out);
        }
        // undo
        if cap > 0 {
            if let Some(&(i, m)) = mults.last() {
                if i == idx {
                    for v in 0..used.len() {
                        used[v] -= roots[idx].0[v] * m;
                    }
                    mults.pop();
                }
            }
        }
    }
    let mut used = vec![0u32; quiver.vertex_count];
    rec(&roots, 0, &mut used, max, &mut mults, &mut out);
    Ok(out)
}

/// One display check: proposition-equivalence (nondegenerate displays)
/// plus the birational dimension identity.
#[allow(clippy::too_many_arguments)]
fn check_display(
    quiver: &Quiver,
    table: &HomTable,
    d: &DimVector,
    inv: &OrbitInvariants,
    dec: &Decomposition,
    rt: ResType,
    dim_identity_even_degenerate: bool,
    outcome: &mut SweepOutcome,
) {
    let spec = match build_resolution(quiver, d, inv, rt) {
        Ok(s) => s,
        Err(e) => {
            outcome
                .mismatches
                .push(format!("{:?} d={d} inv={inv:?} ({rt}): build failed: {e}", quiver.case_tag));
            return;
        }
    };
    outcome.checked += 1;
    let symbolic = match is_crepant(&spec) {
        Ok(v) => v,
        Err(e) => {
            outcome
                .mismatches
                .push(format!("is_crepant error at d={d} inv={inv:?}: {e}"));
            return;
        }
    };
    if !spec.degenerate {
        match closed_form_crepant(quiver, d, inv, rt) {
            Ok(closed) => {
                if closed != symbolic {
                    outcome.mismatches.push(format!(
                        "{:?} d={d} inv={inv:?} ({rt}): closed-form {closed} vs det(W)=K {symbolic}",
                        quiver.case_tag
                    ));
                }
            }
            Err(e) => outcome
                .mismatches
                .push(format!("closed-form error at d={d} inv={inv:?}: {e}")),
        }
    }
    // birational dimension identity; for the A_n families the display
    // resolves the stated orbit only when every printed step is proper
    if spec.degenerate && !dim_identity_even_degenerate {
        return;
    }
    let codim = orbit_codim_with(table, quiver, d, dec);
    let total = total_space_dim(&spec).unwrap_or(-1);
    if total != rep_space_dim(quiver, d) - codim {
        outcome.mismatches.push(format!(
            "{:?} d={d} inv={inv:?} ({rt}): total space {total} vs dim R - codim = {}",
            quiver.case_tag,
            rep_space_dim(quiver, d) - codim
        ));
    }
}

/// Crepancy proposition-equivalence and dimension identity for the three
/// A3 orientations.
pub fn sweep_a3(case: CaseTag, d_max: u32) -> Result<SweepOutcome> {
    let quiver = match case {
        CaseTag::A3SinkCenter => Quiver::a3_sink_center(),
        CaseTag::A3SourceCenter => Quiver::a3_source_center(),
        CaseTag::A3OneWay => Quiver::a3_one_way(),
        _ => return Err(Error::UnsupportedCase("not an A3 case".into())),
    };
    let table = HomTable::new(&quiver)?;
    let profiles = ProfileTable::new(&quiver)?;
    let mut outcome = SweepOutcome {
        label: format!("{case:?} proposition-equivalence, d <= {d_max}"),
        ..Default::default()
    };
    for d in all_dim_vectors(3, d_max) {
        for dec in enumerate_orbits(&quiver, &d)? {
            let inv = profiles.profile(&dec)?;
            let Ok(rt) = select_res_type(&quiver, &d, &inv) else {
                continue;
            };
            check_display(&quiver, &table, &d, &inv, &dec, rt, true, &mut outcome);
        }
    }
    Ok(outcome)
}

/// The same for D4: the complete orbit sweep, all applicable displays.
/// Also asserts the paper's "type (i) is never crepant" in this range.
pub fn sweep_d4(d_max: u32) -> Result<SweepOutcome> {
    let quiver = Quiver::d4_sink_center();
    let table = HomTable::new(&quiver)?;
    let profiles = ProfileTable::new(&quiver)?;
    let mut outcome = SweepOutcome {
        label: format!("D4 proposition-equivalence, d <= {d_max}"),
        ..Default::default()
    };
    for dec in all_decompositions(&quiver, d_max)? {
        let d = dec.dim_vector(4);
        let inv = profiles.profile(&dec)?;
        let Ok(rt) = select_res_type(&quiver, &d, &inv) else {
            continue;
        };
        if rt == ResType::I {
            let spec = build_resolution(&quiver, &d, &inv, rt)?;
            if !spec.degenerate && is_crepant(&spec)? {
                outcome.mismatches.push(format!(
                    "D4 type (i) crepant at d={d} inv={inv:?}, contradicting the never-crepant claim"
                ));
            }
            check_display(&quiver, &table, &d, &inv, &dec, rt, true, &mut outcome);
        } else {
            for t in [ResType::II, ResType::III] {
                check_display(&quiver, &table, &d, &inv, &dec, t, true, &mut outcome);
            }
        }
    }
    Ok(outcome)
}

/// A_n families: one-way chains and the three source-sink shapes.
pub fn sweep_an(case: CaseTag, n: usize, d_max: u32) -> Result<SweepOutcome> {
    let quiver = match case {
        CaseTag::AnOneWay | CaseTag::A2 => Quiver::a_n_one_way(n),
        CaseTag::A2mSourceSink => Quiver::a_n_source_sink_odd_sources(n),
        CaseTag::A2mp1TypeI => Quiver::a_n_source_sink_odd_sources(n),
        CaseTag::A2mp1TypeII => Quiver::a_2mp1_type_ii(n),
        _ => return Err(Error::UnsupportedCase("not an A_n family".into())),
    };
    let table = HomTable::new(&quiver)?;
    let profiles = ProfileTable::new(&quiver)?;
    let mut outcome = SweepOutcome {
        label: format!("{:?} n={n} proposition-equivalence, d <= {d_max}", quiver.case_tag),
        ..Default::default()
    };
    match quiver.case_tag {
        CaseTag::A2 | CaseTag::AnOneWay => {
            for dec in all_decompositions(&quiver, d_max)? {
                // the (k,t) family: interval supports of length <= 3
                let Ok(inv) = profiles.profile(&dec) else {
                    continue;
                };
                let d = dec.dim_vector(n);
                let Ok(rt) = select_res_type(&quiver, &d, &inv) else {
                    continue;
                };
                check_display(&quiver, &table, &d, &inv, &dec, rt, false, &mut outcome);
            }
        }
        _ => {
            // group orbits by profile; the family member is the dense one
            use std::collections::BTreeMap;
            let mut groups: BTreeMap<(DimVector, OrbitInvariants), (i64, Decomposition, OrbitInvariants, bool)> =
                BTreeMap::new();
            for dec in all_decompositions(&quiver, d_max)? {
                let d = dec.dim_vector(n);
                let inv = profiles.profile(&dec)?;
                let key = (d.clone(), inv.clone());
                let dim = -orbit_codim_with(&table, &quiver, &d, &dec);
                match groups.get_mut(&key) {
                    Some(entry) => {
                        if dim > entry.0 {
                            *entry = (dim, dec, inv, false);
                        } else if dim == entry.0 {
                            entry.3 = true;
                        }
                    }
                    None => {
                        groups.insert(key, (dim, dec, inv, false));
                    }
                }
            }
            for (_, (_, dec, inv, tie)) in groups {
                if tie {
                    continue;
                }
                let d = dec.dim_vector(n);
                let Ok(rt) = select_res_type(&quiver, &d, &inv) else {
                    continue;
                };
                check_display(&quiver, &table, &d, &inv, &dec, rt, false, &mut outcome);
            }
        }
    }
    Ok(outcome)
}

/// Criterion: table codimension == Ext codimension == numeric tangent
/// rank, over the crepant configurations of the case sweep.
pub fn sweep_codim_triple(case: CaseTag, d_max: u32) -> Result<SweepOutcome> {
    let quiver = match case {
        CaseTag::A3SinkCenter => Quiver::a3_sink_center(),
        CaseTag::A3SourceCenter => Quiver::a3_source_center(),
        CaseTag::A3OneWay => Quiver::a3_one_way(),
        CaseTag::D4SinkCenter => Quiver::d4_sink_center(),
        _ => return Err(Error::UnsupportedCase("no codimension table".into())),
    };
    let table = HomTable::new(&quiver)?;
    let profiles = ProfileTable::new(&quiver)?;
    let mut outcome = SweepOutcome {
        label: format!("{case:?} codim triple agreement (crepant configs), d <= {d_max}"),
        ..Default::default()
    };
    for dec in all_decompositions(&quiver, d_max)? {
        let d = dec.dim_vector(quiver.vertex_count);
        let inv = profiles.profile(&dec)?;
        let Ok(rt) = select_res_type(&quiver, &d, &inv) else {
            continue;
        };
        let spec = match build_resolution(&quiver, &d, &inv, rt) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if spec.degenerate || !closed_form_crepant(&quiver, &d, &inv, rt)? {
            continue;
        }
        let Ok(table_codim) = odl_codim(&quiver, &d, &inv, rt) else {
            continue;
        };
        outcome.checked += 1;
        let ext = orbit_codim_with(&table, &quiver, &d, &dec);
        let m = canonical_representative(&quiver, &dec);
        let numeric = rep_space_dim(&quiver, &d) - orbit_dim_numeric(&quiver, &m);
        if table_codim != ext || ext != numeric {
            outcome.mismatches.push(format!(
                "{case:?} d={d} inv={inv:?} ({rt}): table {table_codim}, ext {ext}, numeric {numeric}"
            ));
        }
    }
    Ok(outcome)
}

/// Lemma-based closure inequalities against the hom order, exhaustively.
pub fn sweep_closure_a3(case: CaseTag, d_max: u32) -> Result<SweepOutcome> {
    let quiver = match case {
        CaseTag::A3SinkCenter => Quiver::a3_sink_center(),
        CaseTag::A3SourceCenter => Quiver::a3_source_center(),
        CaseTag::A3OneWay => Quiver::a3_one_way(),
        _ => return Err(Error::UnsupportedCase("not an A3 case".into())),
    };
    let table = HomTable::new(&quiver)?;
    let mut outcome = SweepOutcome {
        label: format!("{case:?} closure lemma vs hom order, d <= {d_max}"),
        ..Default::default()
    };
    let profiles = ProfileTable::new(&quiver)?;
    for d in all_dim_vectors(3, d_max) {
        let orbits = enumerate_orbits(&quiver, &d)?;
        let invs: Vec<OrbitInvariants> = orbits
            .iter()
            .map(|o| profiles.profile(o))
            .collect::<Result<_>>()?;
        for (i, m) in orbits.iter().enumerate() {
            for (j, nn) in orbits.iter().enumerate() {
                outcome.checked += 1;
                let lemma = in_closure(&quiver, &d, &invs[i], &invs[j])?;
                let hom = degeneration_leq_with(&table, m, nn);
                if lemma != hom {
                    outcome.mismatches.push(format!(
                        "{case:?} d={d}: lemma {lemma} vs hom {hom} for {:?} <= {:?}",
                        invs[i], invs[j]
                    ));
                }
            }
        }
    }
    Ok(outcome)
}

/// Monte-Carlo degeneration paths: limits of one-parameter families must
/// stay in the predicted closure.
pub fn sweep_degeneration_paths(trials: u32, seed: u64) -> Result<SweepOutcome> {
    let mut outcome = SweepOutcome {
        label: format!("degeneration paths, {trials} trials per case"),
        ..Default::default()
    };
    let cases: Vec<(Quiver, DimVector)> = vec![
        (Quiver::a3_sink_center(), DimVector(vec![2, 2, 2])),
        (Quiver::a3_source_center(), DimVector(vec![2, 3, 2])),
        (Quiver::a3_one_way(), DimVector(vec![2, 2, 2])),
        (Quiver::d4_sink_center(), DimVector(vec![2, 3, 2, 2])),
    ];
    for (quiver, d) in cases {
        for dec in enumerate_orbits(&quiver, &d)? {
            outcome.checked += 1;
            if let Some(limit) = degeneration_path_check(&quiver, &dec, trials, seed)? {
                outcome.mismatches.push(format!(
                    "{:?} d={d}: family from {dec} left the closure at {:?}",
                    quiver.case_tag, limit
                ));
            }
        }
    }
    Ok(outcome)
}

/// Singleton fibers over dense-orbit representatives, one configuration
/// per display family.
pub fn sweep_fibers() -> Result<SweepOutcome> {
    let mut outcome = SweepOutcome {
        label: "resolution fibers over dense-orbit points".into(),
        ..Default::default()
    };
    let mut run = |quiver: &Quiver, d: Vec<u32>, inv: OrbitInvariants, rt: Option<ResType>| {
        let d = DimVector(d);
        let rt = match rt {
            Some(rt) => rt,
            None => match select_res_type(quiver, &d, &inv) {
                Ok(rt) => rt,
                Err(e) => {
                    outcome
                        .mismatches
                        .push(format!("{:?} {inv:?}: selection failed: {e}", quiver.case_tag));
                    return;
                }
            },
        };
        outcome.checked += 1;
        let spec = match build_resolution(quiver, &d, &inv, rt) {
            Ok(s) => s,
            Err(e) => {
                outcome
                    .mismatches
                    .push(format!("{:?} ({rt}): build failed: {e}", quiver.case_tag));
                return;
            }
        };
        let dec = match invariants_to_decomposition(quiver, &d, &inv) {
            Ok(x) => x,
            Err(e) => {
                outcome
                    .mismatches
                    .push(format!("{:?}: no orbit: {e}", quiver.case_tag));
                return;
            }
        };
        let m = canonical_representative(quiver, &dec);
        match resolution_fiber_check(quiver, &spec, &m) {
            Ok(0) => {}
            Ok(dim) => outcome.mismatches.push(format!(
                "{:?} d={d} inv={inv:?} ({rt}): fiber dimension {dim} over a dense-orbit point",
                quiver.case_tag
            )),
            Err(e) => outcome
                .mismatches
                .push(format!("{:?} ({rt}): fiber check failed: {e}", quiver.case_tag)),
        }
    };
    run(
        &Quiver::a2(),
        vec![3, 2],
        OrbitInvariants::AnOneWay {
            k: vec![1],
            t: vec![],
        },
        None,
    );
    run(
        &Quiver::a3_sink_center(),
        vec![3, 4, 3],
        OrbitInvariants::A3SinkCenter {
            r1: 2,
            r2: 2,
            p1: 3,
        },
        None,
    );
    run(
        &Quiver::a3_sink_center(),
        vec![4, 5, 3],
        OrbitInvariants::A3SinkCenter {
            r1: 3,
            r2: 1,
            p1: 3,
        },
        None,
    );
    run(
        &Quiver::a3_source_center(),
        vec![3, 4, 3],
        OrbitInvariants::A3SourceCenter {
            k1: 2,
            k2: 2,
            q1: 1,
        },
        None,
    );
    run(
        &Quiver::a3_one_way(),
        vec![2, 3, 2],
        OrbitInvariants::A3OneWay {
            r1: 2,
            k2: 1,
            u1: 2,
        },
        None,
    );
    run(
        &Quiver::a_n_one_way(4),
        vec![1, 3, 3, 1],
        OrbitInvariants::AnOneWay {
            k: vec![0, 1, 2],
            t: vec![0, 1],
        },
        None,
    );
    run(
        &Quiver::a_n_source_sink_odd_sources(4),
        vec![2, 2, 2, 2],
        OrbitInvariants::SourceSink {
            r: vec![1, 1, 1],
            p: vec![2],
            q: vec![0],
        },
        None,
    );
    run(
        &Quiver::a_n_source_sink_odd_sources(5),
        vec![1, 2, 2, 2, 1],
        OrbitInvariants::SourceSink {
            r: vec![1, 1, 1, 1],
            p: vec![2, 2],
            q: vec![0],
        },
        None,
    );
    run(
        &Quiver::a_2mp1_type_ii(5),
        vec![2, 2, 2, 2, 2],
        OrbitInvariants::SourceSink {
            r: vec![1, 1, 1, 1],
            p: vec![2],
            q: vec![0, 0],
        },
        None,
    );
    for rt in [ResType::II, ResType::III] {
        run(
            &Quiver::d4_sink_center(),
            vec![2, 3, 2, 2],
            OrbitInvariants::D4SinkCenter {
                r: [1, 1, 1],
                rij: [0, 0, 0],
                r123: 0,
                s123: 2,
            },
            Some(rt),
        );
    }
    run(
        &Quiver::d4_sink_center(),
        vec![4, 5, 3, 3],
        OrbitInvariants::D4SinkCenter {
            r: [3, 2, 2],
            rij: [1, 1, 1],
            r123: 0,
            s123: 4,
        },
        Some(ResType::I),
    );
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_a3_sweep() {
        let o = sweep_a3(CaseTag::A3SinkCenter, 3).unwrap();
        assert!(o.passed(), "{:?}", o.mismatches);
        assert!(o.checked > 50);
    }

    #[test]
    fn quick_oneway_sweep() {
        let o = sweep_a3(CaseTag::A3OneWay, 3).unwrap();
        assert!(o.passed(), "{:?}", o.mismatches);
    }

    #[test]
    fn quick_source_sweep() {
        let o = sweep_a3(CaseTag::A3SourceCenter, 3).unwrap();
        assert!(o.passed(), "{:?}", o.mismatches);
    }

    #[test]
    fn quick_d4_sweep() {
        let o = sweep_d4(3).unwrap();
        assert!(o.passed(), "{:?}", o.mismatches.iter().take(5).collect::<Vec<_>>());
        assert!(o.checked > 100);
    }

    #[test]
    fn quick_an_sweeps() {
        for (case, n) in [
            (CaseTag::AnOneWay, 4),
            (CaseTag::A2mSourceSink, 4),
            (CaseTag::A2mp1TypeI, 5),
            (CaseTag::A2mp1TypeII, 5),
        ] {
            let o = sweep_an(case, n, 2).unwrap();
            assert!(o.passed(), "{case:?}: {:?}", o.mismatches.iter().take(5).collect::<Vec<_>>());
            assert!(o.checked > 0, "{case:?} checked nothing");
        }
    }

    #[test]
    fn quick_closure_sweep() {
        for case in [
            CaseTag::A3SinkCenter,
            CaseTag::A3SourceCenter,
            CaseTag::A3OneWay,
        ] {
            let o = sweep_closure_a3(case, 2).unwrap();
            assert!(o.passed(), "{case:?}: {:?}", o.mismatches);
        }
    }

    #[test]
    fn fibers_are_singletons() {
        let o = sweep_fibers().unwrap();
        assert!(o.passed(), "{:?}", o.mismatches);
    }
}
