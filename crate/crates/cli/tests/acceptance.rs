//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};
use unital_core::figueroa::{build_figueroa, verify_figueroa_theorems, FigueroaBuild};
use unital_core::groups::predicates::generalized_dihedral_check;
use unital_core::incidence::{
    affine_plane_order3, is_onan_configuration, isomorphism_search, onan_search, unital_text,
    validate_unital, IsoOutcome, OnanOutcome,
};
use unital_core::plane::hermitian_unital;
use unital_core::structure::{
    classify_with_atlas, subunital_analysis, two_point_profile, Conclusion,
};
use unital_core::translation::{
    build_atlas, check_lemma_trs_omega_p, orbit_congruence_check, translation_axioms,
    TranslationAtlas,
};
use unital_core::Unital;

struct Case {
    name: &'static str,
    unital: Unital,
    atlas: OnceLock<TranslationAtlas>,
}

impl Case {
    fn new(name: &'static str, unital: Unital) -> Self {
        Case {
            name,
            unital,
            atlas: OnceLock::new(),
        }
    }

    fn atlas(&self) -> &TranslationAtlas {
        self.atlas.get_or_init(|| build_atlas(&self.unital))
    }
}

#[derive(Default)]
struct Fixtures {
    hermitian: [OnceLock<Case>; 4],
    figueroa: OnceLock<FigueroaBuild>,
    figueroa_case: OnceLock<Case>,
}

impl Fixtures {
    fn hermitian(&self, q: u32) -> &Case {
        self.hermitian[q as usize - 2].get_or_init(|| {
            let name = [
                "hermitian q=2",
                "hermitian q=3",
                "hermitian q=4",
                "hermitian q=5",
            ];
            Case::new(name[q as usize - 2], hermitian_unital(q).unwrap())
        })
    }

    fn figueroa(&self) -> &FigueroaBuild {
        self.figueroa.get_or_init(|| build_figueroa(2).unwrap())
    }

    fn figueroa_case(&self) -> &Case {
        self.figueroa_case
            .get_or_init(|| Case::new("figueroa q=2", self.figueroa().unital.unital.clone()))
    }

    /// Hermitian q=2,3,4 and the Figueroa unital.
    fn translation_cases(&self) -> [&Case; 4] {
        [
            self.hermitian(2),
            self.hermitian(3),
            self.hermitian(4),
            self.figueroa_case(),
        ]
    }
}

type Check = Result<(), String>;
type Criterion = (&'static str, Duration, fn(&Fixtures) -> Check);

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn criterion_1(fx: &Fixtures) -> Check {
    let expected = [
        (2, 9, 12, 3),
        (3, 28, 63, 4),
        (4, 65, 208, 5),
        (5, 126, 525, 6),
    ];
    for (q, v, b, k) in expected {
        let u = &fx.hermitian(q).unital;
        let got = (u.v(), u.blocks().len(), u.incidence().constant_block_size());
        ensure(got == (v, b, Some(k)), || format!("q={q}: got {got:?}"))?;
        ensure(validate_unital(u.incidence(), q as usize).valid, || {
            format!("q={q}: validation failed")
        })?;
    }
    Ok(())
}

fn criterion_2(fx: &Fixtures) -> Check {
    let case = fx.hermitian(2);
    let ag = affine_plane_order3();
    let IsoOutcome::Found(map) = isomorphism_search(case.unital.incidence(), &ag, 0) else {
        return Err("no isomorphism with AG(2,3)".into());
    };
    ensure(case.unital.incidence().relabel(&map) == ag, || {
        "bad isomorphism".into()
    })?;
    let t2 = case.atlas().tgroup(2);
    let all: Vec<u32> = (0..9).collect();
    ensure(t2.order() == 18, || format!("|T[2]| = {}", t2.order()))?;
    ensure(t2.is_transitive_on(&all) == Ok(true), || {
        "not transitive".into()
    })?;
    ensure(t2.is_two_transitive_on(&all) == Ok(false), || {
        "two-transitive".into()
    })?;
    let orbits = t2
        .orbits_on_sets(case.unital.blocks())
        .ok_or("blocks not invariant")?;
    ensure(orbits.len() == 4, || {
        format!("{} block orbits", orbits.len())
    })?;
    let tau = &case.atlas().translations(0)[1];
    let d = generalized_dihedral_check(&t2, tau).map_err(|e| e.to_string())?;
    ensure(
        d.generalized_dihedral && d.m_regular && d.m_order == 9,
        || format!("{d:?}"),
    )
}

fn criterion_3(fx: &Fixtures) -> Check {
    for case in fx.translation_cases() {
        let r = translation_axioms(&case.unital, case.atlas());
        ensure(r.verified && r.translations > 0, || {
            format!("{}: {r:?}", case.name)
        })?;
    }
    Ok(())
}

fn criterion_4(fx: &Fixtures) -> Check {
    for (case, p) in fx.translation_cases().into_iter().zip([2, 3, 2, 2]) {
        let r = check_lemma_trs_omega_p(&case.unital, case.atlas(), p)
            .ok_or_else(|| format!("{}: Ω_{p} empty", case.name))?;
        ensure(r.holds, || format!("{}: {r:?}", case.name))?;
    }
    Ok(())
}

fn criterion_5(fx: &Fixtures) -> Check {
    for case in fx.translation_cases() {
        let atlas = case.atlas();
        ensure(!atlas.orders().is_empty(), || {
            format!("{}: no translations", case.name)
        })?;
        for n in atlas.orders() {
            let r = orbit_congruence_check(atlas, n).expect("order occurs");
            ensure(r.holds, || format!("{}: {r:?}", case.name))?;
        }
    }
    let fig = orbit_congruence_check(fx.figueroa_case().atlas(), 2).unwrap();
    let p = &fig.profiles;
    ensure(
        p.len() == 1 && p[0].inside == 4 && p[0].outside == 252,
        || format!("figueroa cycle profile {p:?}"),
    )
}

fn criterion_6(fx: &Fixtures) -> Check {
    let oracles: [(u32, u64, &[usize]); 2] = [
        (3, 3, &[1, 1, 2, 8, 8, 8]),
        (4, 2, &[1, 1, 3, 15, 15, 15, 15]),
    ];
    for (q, n, lengths) in oracles {
        let case = fx.hermitian(q);
        let group = case.atlas().tgroup(n);
        let r = two_point_profile(&case.unital, &group, 0, 1).map_err(|e| e.to_string())?;
        ensure(r.lengths == lengths && r.block_is_orbit, || {
            format!("q={q}: {r:?}")
        })?;
    }
    Ok(())
}

fn criterion_7(fx: &Fixtures) -> Check {
    let t3 = fx.hermitian(3).atlas().tgroup(3).order();
    let t2 = fx.hermitian(4).atlas().tgroup(2).order();
    ensure(t3 == 6048 && t2 == 62400, || {
        format!("|T[3]| = {t3}, |T[2]| = {t2}")
    })
}

fn criterion_8(fx: &Fixtures) -> Check {
    for q in [2, 3] {
        let out = onan_search(&fx.hermitian(q).unital, 0);
        ensure(out == OnanOutcome::Absent, || format!("q={q}: {out:?}"))?;
    }
    let u = &fx.figueroa().unital.unital;
    match onan_search(u, 0) {
        OnanOutcome::Found(c) if is_onan_configuration(u.incidence(), &c) => Ok(()),
        other => Err(format!("figueroa: {other:?}")),
    }
}

fn criterion_9(fx: &Fixtures) -> Check {
    let build = fx.figueroa();
    let case = fx.figueroa_case();
    let r = verify_figueroa_theorems(build, case.atlas());
    ensure(r.holds, || format!("{r:?}"))?;
    ensure((r.v, r.b, r.k) == (513, 3648, Some(9)), || {
        format!("parameters {:?}", (r.v, r.b, r.k))
    })?;
    ensure(r.polarity.pairs_checked == 4161 * 4161, || {
        "polarity check not exhaustive".into()
    })?;
    ensure(r.h.len() == 9 && r.omega2_is_h, || format!("H = {:?}", r.h))?;
    ensure(r.alpha_trivial_on_omega2 && !r.faithful_with_alpha, || {
        "α".into()
    })?;
    let sub = subunital_analysis(&case.unital, case.atlas(), 2).map_err(|e| e.to_string())?;
    ensure(sub.hermitian_isomorphism.is_some(), || {
        "U_2 not hermitian".into()
    })?;
    ensure(
        !sub.embedding.ideal && sub.embedding.witness.is_some(),
        || "U_2 ideally embedded".into(),
    )
}

fn criterion_10(fx: &Fixtures) -> Check {
    for q in [2, 4] {
        let case = fx.hermitian(q);
        let r = classify_with_atlas(&case.unital, case.atlas());
        ensure(r.conclusion == Conclusion::VerifiedHermitian, || {
            format!("q={q}: {r:?}")
        })?;
        let map = r.isomorphism.ok_or("no isomorphism")?;
        let h = hermitian_unital(q).unwrap();
        ensure(
            case.unital.incidence().relabel(&map) == *h.incidence(),
            || format!("q={q}: bad isomorphism"),
        )?;
    }
    let case = fx.hermitian(3);
    let r = classify_with_atlas(&case.unital, case.atlas());
    let witness = r.witness.as_ref().map(|w| w.hypothesis.as_str());
    ensure(
        r.conclusion == Conclusion::HypothesisFailed
            && witness == Some("exists_involutory_translation"),
        || format!("q=3: {r:?}"),
    )?;
    let case = fx.figueroa_case();
    let r = classify_with_atlas(&case.unital, case.atlas());
    let h = &fx.figueroa().unital.hermitian_points;
    let ok = r.conclusion == Conclusion::HypothesisFailed
        && r.witness.as_ref().is_some_and(|w| {
            w.hypothesis == "every_point_a_center" && w.point.is_some_and(|x| !h.contains(&x))
        });
    ensure(ok, || format!("figueroa: {r:?}"))
}

fn run_cli(dir: &Path, threads: usize, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_unitals"))
        .current_dir(dir)
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn criterion_11(fx: &Fixtures) -> Check {
    let dir = std::env::temp_dir().join(format!("unitals-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    for q in [2, 3, 4] {
        let text = unital_text(fx.hermitian(q).unital.incidence());
        std::fs::write(dir.join(format!("h{q}.unital")), text).map_err(|e| e.to_string())?;
    }
    let commands: [&[&str]; 12] = [
        &["build-figueroa", "--q", "2", "--out", "fig8.unital"],
        &["validate", "--in", "fig8.unital"],
        &["translations", "--in", "h3.unital"],
        &["translations", "--in", "fig8.unital", "--center", "0"],
        &["omega", "--in", "h4.unital"],
        &["omega", "--in", "fig8.unital"],
        &["classify", "--in", "h2.unital"],
        &["classify", "--in", "fig8.unital"],
        &["subunital", "--in", "fig8.unital", "--p", "2"],
        &["onan", "--in", "fig8.unital"],
        &["isomorphic", "--in", "h4.unital", "--in", "h4.unital"],
        &["check-lemmas", "--in", "fig8.unital"],
    ];
    let mut runs: Vec<Vec<Vec<u8>>> = Vec::new();
    for threads in [1, 4] {
        let mut outputs = Vec::new();
        for args in commands {
            outputs.push(run_cli(&dir, threads, args)?);
        }
        for file in ["fig8.unital", "fig8.unital.points.json"] {
            outputs.push(std::fs::read(dir.join(file)).map_err(|e| e.to_string())?);
        }
        runs.push(outputs);
    }
    let _ = std::fs::remove_dir_all(&dir);
    for (i, (a, b)) in runs[0].iter().zip(&runs[1]).enumerate() {
        ensure(a == b, || {
            format!("output {i} differs between thread counts")
        })?;
    }
    Ok(())
}

fn main() {
    let fx = Fixtures::default();
    let criteria: [Criterion; 11] = [
        (
            "hermitian construction counts",
            Duration::from_secs(5),
            criterion_1,
        ),
        ("q=2 structure", Duration::from_secs(5), criterion_2),
        ("translation axioms", Duration::from_secs(600), criterion_3),
        ("transitivity on Ω_p", Duration::from_secs(600), criterion_4),
        ("orbit congruences", Duration::from_secs(600), criterion_5),
        (
            "two-point stabilizer orbits",
            Duration::from_secs(60),
            criterion_6,
        ),
        (
            "translation group orders",
            Duration::from_secs(120),
            criterion_7,
        ),
        ("O'Nan dichotomy", Duration::from_secs(600), criterion_8),
        (
            "Figueroa end-to-end",
            Duration::from_secs(1800),
            criterion_9,
        ),
        (
            "classification harness",
            Duration::from_secs(2100),
            criterion_10,
        ),
        (
            "determinism across thread counts",
            Duration::from_secs(600),
            criterion_11,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut result = check(&fx);
        let elapsed = start.elapsed();
        if result.is_ok() && elapsed > limit {
            result = Err(format!("took {elapsed:.1?}"));
        }
        let secs = elapsed.as_secs_f64();
        let limit = limit.as_secs();
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2} s, limit {limit} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!(
                    "FAIL {:>2} {name} ({secs:.2} s, limit {limit} s): {msg}",
                    i + 1
                );
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
