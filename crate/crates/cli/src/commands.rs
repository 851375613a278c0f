use std::collections::BTreeMap;

use phin_core::drinfeld::{self, LatticeClass, SimplexType, SpaceSpec};
use phin_core::monodromy::kernel_image_check;
use phin_core::gamma_quotient::{gamma_quotient_check, Clause};
use phin_core::phin::{OrdinaryVerdict, Verdict};
use phin_core::schema::{parse, ComplexInput, NerveInput, PhiNInput, SteenbrinkInput};
use phin_core::spectral::{cech_complex, cech_vs_total_check, monodromy_endomorphism, steenbrink_double_complex, Degeneration, FilteredComplex, SteenbrinkDatum};
use phin_core::{AdmissibilityOptions, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub struct Outcome {
    pub result: Value,
    pub clauses: Vec<Clause>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn phin_analyze(text: &str, opts: &AdmissibilityOptions) -> Result<Outcome> {
    let m = parse::<PhiNInput>(text)?.build()?;
    let (t_n, t_h) = m.t_numbers()?;
    let adm = m.is_weakly_admissible(opts)?;
    let ord = m.is_ordinary(opts)?;
    let mw = m.monodromy_weight_check()?;
    let slopes: Vec<Value> = m
        .slope_decomposition()?
        .iter()
        .map(|c| json!({"slope": c.slope.to_string(), "dim": c.space.dim()}))
        .collect();
    let result = json!({
        "dim": m.dim(),
        "p": m.p,
        "a": m.a,
        "d": m.d,
        "hodge_numbers": to_value(&m.hodge_numbers()),
        "newton_numbers": to_value(&m.newton_numbers()?),
        "t_n": t_n.to_string(),
        "t_h": t_h.to_string(),
        "slopes": slopes,
        "admissible": adm.verdict == Verdict::Admissible,
        "admissibility": to_value(&adm),
        "ordinary": to_value(&ord),
        "monodromy_weight": to_value(&mw),
        "kernel_filtration": to_value(&m.kernel_filtration()),
        "image_filtration": to_value(&m.image_filtration()),
    });
    let clauses = vec![
        Clause::new("t_equal", "t_N(D) = t_H(D)", t_n == t_h),
        Clause::new(
            "weakly_admissible",
            "t_N(D') >= t_H(D') for every (phi,N)-stable subspace, certified by exact enumeration",
            adm.verdict == Verdict::Admissible,
        ),
        Clause::new("ordinary", "weakly admissible with integral slopes and Newton numbers equal to Hodge numbers", ord.verdict == OrdinaryVerdict::Ordinary),
        Clause::new("monodromy_weight", "monodromy filtration equals weight filtration", mw.holds),
    ];
    Ok(Outcome { result, clauses })
}

pub fn phin_check_mw(text: &str) -> Result<Outcome> {
    let m = parse::<PhiNInput>(text)?.build()?;
    let mw = m.monodromy_weight_check()?;
    let ki = kernel_image_check(&m.n, m.d)?;
    let result = json!({
        "monodromy_weight": to_value(&mw),
        "kernel_image": to_value(&ki),
    });
    let mut clauses = vec![Clause::new("monodromy_weight", "M_r = P_r for all r", mw.holds)];
    if let Some(c) = ki.conclusion {
        clauses.push(Clause::new("kernel_image", "ker(N^(d+1-j)) = im(N^j) = F^j for all j", c));
    }
    Ok(Outcome { result, clauses })
}

pub fn phin_gamma_quotient(text: &str) -> Result<Outcome> {
    let m = parse::<PhiNInput>(text)?.build()?;
    let r = gamma_quotient_check(&m)?;
    let clauses = r.clauses.clone();
    Ok(Outcome { result: to_value(&r), clauses })
}

fn spectral_summary(fc: &FilteredComplex, max_page: Option<usize>) -> Result<(Value, Option<Degeneration>)> {
    let stable = fc.stable_page();
    let last = max_page.unwrap_or(stable).max(1);
    let pages = (1..=last).map(|r| fc.e_page(r).map(|p| to_value(&p))).collect::<Result<Vec<_>>>()?;
    let degeneration = fc.degeneration_page(stable)?;
    let mut abutment = Vec::new();
    for n in fc.complex().degrees() {
        let f = fc.abutment_filtration(n)?;
        abutment.push(json!({"degree": n, "dim": f.ambient_dim(), "graded_dims": to_value(&f.graded_dims())}));
    }
    let value = json!({
        "stable_page": stable,
        "pages": pages,
        "degeneration": to_value(&degeneration),
        "cohomology_dims": to_value(&fc.complex().cohomology_dims()),
        "abutment": abutment,
    });
    Ok((value, Some(degeneration)))
}

fn label_summary(fc: &FilteredComplex) -> Result<(Value, Vec<Clause>)> {
    let eq = fc.equivariant_degeneration_check()?;
    let mut dims = Vec::new();
    for n in fc.complex().degrees() {
        let entries: Vec<Value> = fc
            .abutment_label_dims(n)?
            .into_iter()
            .map(|((p, l), k)| json!({"p": p, "label": l, "dim": k}))
            .collect();
        dims.push(json!({"degree": n, "pieces": entries}));
    }
    let early = matches!(fc.degeneration_page(fc.stable_page())?, Degeneration::Page(r) if r <= 2);
    let clauses = vec![
        Clause::new("label_separation", "no differential d_r, r >= 2, joins two nonzero terms of equal label", eq.holds),
        Clause::new("degenerates_at_e2", "all differentials d_r with r >= 2 vanish", early),
    ];
    Ok((json!({"equivariant": to_value(&eq), "abutment_labels": dims}), clauses))
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

pub fn ss_pages(text: &str, max_page: Option<usize>) -> Result<Outcome> {
    let fc = parse::<ComplexInput>(text)?.build()?;
    let (mut result, _) = spectral_summary(&fc, max_page)?;
    let mut clauses = Vec::new();
    if fc.labels().is_some() {
        let (extra, c) = label_summary(&fc)?;
        result = merge(result, extra);
        clauses = c;
    }
    Ok(Outcome { result, clauses })
}

pub fn ss_cech(text: &str, max_page: Option<usize>) -> Result<Outcome> {
    let nd = parse::<NerveInput>(text)?.build()?;
    let fc = cech_complex(&nd)?;
    let cmp = cech_vs_total_check(&nd)?;
    let (summary, _) = spectral_summary(&fc, max_page)?;
    let (labels, mut clauses) = label_summary(&fc)?;
    let result = merge(merge(json!({"components": nd.components(), "comparison": to_value(&cmp)}), summary), labels);
    clauses.insert(0, Clause::new("cech_equals_flags", "Cech cohomology equals the cohomology of the flag-indexed complex", cmp.equal));
    Ok(Outcome { result, clauses })
}

pub fn ss_steenbrink(sd: &SteenbrinkDatum) -> Result<Outcome> {
    let fc = steenbrink_double_complex(sd)?;
    let report = monodromy_endomorphism(sd)?;
    let e1 = fc.e_page(1)?;
    let degeneration = fc.degeneration_page(fc.stable_page())?;
    let mut clauses = Vec::new();
    for deg in &report.degrees {
        let n = deg.degree;
        clauses.push(Clause::new(&format!("H{n}.lowers_weight"), "N maps P_k into P_(k-2)", deg.lowers_weight));
        clauses.push(Clause::new(&format!("H{n}.monodromy_weight"), "monodromy filtration of N equals P", deg.monodromy_is_weight));
    }
    let result = json!({
        "components": sd.components(),
        "e1": to_value(&e1),
        "degeneration": to_value(&degeneration),
        "report": to_value(&report),
    });
    Ok(Outcome { result, clauses })
}

pub fn steenbrink_input(text: &str) -> Result<SteenbrinkDatum> {
    parse::<SteenbrinkInput>(text)?.build()
}

pub fn drinfeld_ball(d: usize, p: u32, n: usize, budget: usize) -> Result<Outcome> {
    let b = drinfeld::ball(&LatticeClass::standard(d), n, p, budget)?;
    let expected: u128 = (1..=d as u32).map(|s| drinfeld::gaussian_binomial(d as u32 + 1, s, p as u64)).sum::<Result<u128>>()?;
    let mut degree = vec![0usize; b.len()];
    for &(i, j) in &b.edges {
        degree[i] += 1;
        degree[j] += 1;
    }
    let interior_ok = b.distances.iter().zip(&degree).filter(|(&dist, _)| dist < n).all(|(_, &k)| k as u128 == expected);
    let vertices: Vec<Value> = b
        .vertices
        .iter()
        .zip(&b.distances)
        .map(|(v, dist)| json!({"hnf": v.hnf(), "distance": dist}))
        .collect();
    let mut clauses = vec![Clause::new("neighbor_count", "every vertex at distance < n has sum_s [d+1, s]_p neighbors", interior_ok)];
    if d == 1 {
        let pp = p as u128;
        let tree = 1 + (pp + 1) * (pp.pow(n as u32) - 1) / (pp - 1);
        clauses.push(Clause::new("tree_growth", "|V_n| = 1 + (p+1)(p^n - 1)/(p - 1)", tree == b.len() as u128));
    }
    let result = json!({
        "d": d,
        "p": p,
        "radius": n,
        "size": b.len(),
        "layer_sizes": b.layer_sizes(),
        "neighbors_per_vertex": expected.to_string(),
        "vertices": vertices,
        "edges": b.edges,
    });
    Ok(Outcome { result, clauses })
}

pub fn drinfeld_counts(d: usize, q: u64, i: usize) -> Result<Outcome> {
    let total = drinfeld::simplices_through_vertex(d, q, i)?;
    let mut signatures = Vec::new();
    let mut sum = 0u128;
    for sig in SimplexType::all(d, i) {
        let count = drinfeld::counting::flags_with_signature(d, q, &sig.flag_signature)?;
        sum += count;
        let factors = drinfeld::stratum_type(&sig, d)?;
        let poincare = drinfeld::stratum_poincare(&sig, d, q)?;
        signatures.push(json!({
            "signature": sig.flag_signature,
            "count": count.to_string(),
            "factors": factors,
            "poincare": to_value(&poincare),
        }));
    }
    let gaussian: Vec<Value> = (0..=d as u32 + 1)
        .map(|k| drinfeld::gaussian_binomial(d as u32 + 1, k, q).map(|g| json!({"k": k, "count": g.to_string()})))
        .collect::<Result<_>>()?;
    let neighbors = drinfeld::simplices_through_vertex(d, q, 2.min(d + 1))?;
    let result = json!({
        "d": d,
        "q": q,
        "i": i,
        "subspaces": gaussian,
        "neighbors_per_vertex": neighbors.to_string(),
        "simplices_through_vertex": total.to_string(),
        "signatures": signatures,
    });
    let clauses = vec![Clause::new("signature_sum", "counts by flag signature add up to the simplex count", sum == total)];
    Ok(Outcome { result, clauses })
}

fn counts_by_s(f: impl Fn(u32) -> Result<(String, String)>) -> Result<(Vec<Value>, bool)> {
    let mut rows = Vec::new();
    let mut ok = true;
    for s in 1..=3 {
        let (a, b) = f(s)?;
        ok &= a == b;
        rows.push(json!({"s": s, "from_betti": a, "direct": b}));
    }
    Ok((rows, ok))
}

pub fn drinfeld_arrangement(r: usize, q: u64) -> Result<Outcome> {
    let poly = drinfeld::rational_arrangement_poincare(r, q)?;
    let gysin = drinfeld::arrangement_poincare_gysin(r, q)?;
    let mobius = drinfeld::arrangement_poincare_mobius(r, q)?;
    let closed = drinfeld::arrangement_closed_form(r, q)?;
    let (counts, counts_ok) = counts_by_s(|s| {
        let a = drinfeld::counting::arrangement_count_from_betti(&poly, r, q, s).to_string();
        let b = drinfeld::point_count_oracle(SpaceSpec::ArrangementComplement(r), q, s)?.to_string();
        Ok((a, b))
    })?;
    let frobenius: BTreeMap<String, String> = (0..poly.0.len()).map(|m| (m.to_string(), format!("q^{m}"))).collect();
    let result = json!({
        "r": r,
        "q": q,
        "poincare": to_value(&poly),
        "gysin": to_value(&gysin),
        "mobius": to_value(&mobius),
        "closed_form": to_value(&closed),
        "frobenius": frobenius,
        "cross_check": "pass",
        "point_counts": counts,
    });
    let clauses = vec![
        Clause::new("methods_agree", "Gysin recursion and Mobius function give the same Betti numbers", gysin == mobius),
        Clause::new("closed_form", "Betti numbers equal the coefficients of prod_i (1 + q^i t)", poly == closed),
        Clause::new("point_count", "Lefschetz trace formula matches the direct point count for s = 1, 2, 3", counts_ok),
    ];
    Ok(Outcome { result, clauses })
}

pub fn drinfeld_blowup(r: usize, q: u64) -> Result<Outcome> {
    let poly = drinfeld::blowup_poincare(r, q)?;
    let (counts, ok) = counts_by_s(|s| {
        let a = drinfeld::counting::blowup_count_from_betti(&poly, q, s).to_string();
        let b = drinfeld::point_count_oracle(SpaceSpec::IteratedBlowup(r), q, s)?.to_string();
        Ok((a, b))
    })?;
    let result = json!({
        "r": r,
        "q": q,
        "poincare": to_value(&poly),
        "point_counts": counts,
    });
    let clauses = vec![Clause::new("point_count", "sum_k b_2k Q^k equals the direct count over F_Q, Q = q^s, s = 1, 2, 3", ok)];
    Ok(Outcome { result, clauses })
}
