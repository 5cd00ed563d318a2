//! The verification suites. Every check is exact unless its claim names a
//! tolerance; samples are deterministic so reports are reproducible.

use ayrel::ay::{self, alpha_pow, build_x0, build_xr, circumference, window_samples};
use ayrel::cylinders::{check_geometry, vertical_decomposition, CylinderError};
use ayrel::homology;
use ayrel::iet::{first_return_iet, iet_periodicity, saf, segment_family, Verdict, TRACE_BUDGET};
use ayrel::iso::iso_check;
use ayrel::rel::rel_h_slit;
use ayrel::trace::DEFAULT_BUDGET;
use ayrel::twist::{conjugacy_check, dominant_eigenvector_check, extract_chart, orbit_closure, reciprocal_rank, TwistError};
use ayrel::NfElem;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{Check, Report, Status};

type K = NfElem;

pub const SUITES: [&str; 5] = ["holonomies", "cylinders", "renorm", "torus", "iet"];

/// Orbit budget for periodicity of return maps.
pub const ORBIT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct Options {
    /// Windows `r ∈ α⁻ᵏ·[1, α⁻¹)` for `k` in this range.
    pub k_min: i64,
    pub k_max: i64,
    /// Samples per window for the cylinder checks.
    pub samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { k_min: -3, k_max: 6, samples: 50 }
    }
}

/// Run one suite by name, or all of them for `"all"`.
pub fn run(name: &str, opts: &Options) -> Option<Report> {
    let checks = match name {
        "holonomies" => holonomies(),
        "cylinders" => cylinders(opts),
        "renorm" => renorm(),
        "torus" => torus(),
        "iet" => iet(),
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run(s, opts)?.checks);
            }
            all
        }
        _ => return None,
    };
    Some(Report { suite: name.into(), checks })
}

fn strs(v: &[K]) -> Vec<String> {
    v.iter().map(K::to_string).collect()
}

// ---------------------------------------------------------------------------
// holonomies: field kernel, x₀, closed forms

pub fn holonomies() -> Vec<Check> {
    vec![field_axioms(1000), alpha_powers(60), x0_structure(), closed_forms(8, 20)]
}

fn random_elem(rng: &mut ChaCha8Rng) -> K {
    let mut c = || K::ratio(rng.gen_range(-60..=60), rng.gen_range(1..=24));
    let (a, b, d) = (c(), c(), c());
    a + b * alpha_pow(1) + d * alpha_pow(2)
}

/// Field axioms and inverse round trips on seeded random elements.
pub fn field_axioms(samples: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bad = Vec::new();
    for i in 0..samples {
        let (a, b, c) = (random_elem(&mut rng), random_elem(&mut rng), random_elem(&mut rng));
        let ok = (a.clone() + &b) + &c == a.clone() + (b.clone() + &c)
            && (a.clone() * &b) * &c == a.clone() * (b.clone() * &c)
            && a.clone() * &b == b.clone() * &a
            && a.clone() * (b.clone() + &c) == a.clone() * &b + a.clone() * &c
            && a.clone() + K::zero() == a
            && a.clone() * K::one() == a
            && a.clone() - &a == K::zero()
            && (a.is_zero() || a.inv().is_ok_and(|x| x * &a == K::one() && a.inv().and_then(|y| y.inv()).is_ok_and(|z| z == a)))
            && (a.sign() as f64) * a.to_f64() >= 0.0;
        if !ok {
            bad.push(i);
        }
    }
    Check::new("field.axioms", "ring axioms, inverses and signs hold on seeded samples", bad.is_empty(), json!({ "samples": samples, "failures": bad }))
}

/// `αᵏ·α⁻ᵏ = 1`, `α^{k+1} = α·αᵏ` and `α^{k+3} = αᵏ − α^{k+1} − α^{k+2}`.
pub fn alpha_powers(range: i64) -> Check {
    let a = alpha_pow(1);
    let bad: Vec<i64> = (-range..=range)
        .filter(|&k| {
            let p = alpha_pow(k);
            !(p.clone() * alpha_pow(-k) == K::one()
                && alpha_pow(k + 1) == a.clone() * &p
                && alpha_pow(k + 3) == p.clone() - alpha_pow(k + 1) - alpha_pow(k + 2)
                && (k < 0 || a.pow(k as u64) == p))
        })
        .collect();
    Check::new("field.alpha_powers", "power identities of α for |k| ≤ range", bad.is_empty(), json!({ "range": range, "failures": bad }))
}

pub fn x0_structure() -> Check {
    let claim = "x₀: genus 3, orders (2,2), cone angles 6π, holonomy rank 6, no horizontal saddle connection between distinct singularities";
    match ay::x0_report(DEFAULT_BUDGET) {
        Ok(r) => Check::new(
            "x0.structure",
            claim,
            r.passed(),
            json!({
                "genus": r.genus,
                "orders": r.orders,
                "cone_angles_pi": r.cone_angles,
                "holonomy_rank": r.holonomy_rank,
                "horizontal_between_distinct": r.horizontal.between_distinct,
                "horizontal_loops": r.horizontal.loops,
                "horizontal_unresolved": r.horizontal.unresolved,
                "trace_budget": DEFAULT_BUDGET,
            }),
        ),
        Err(e) => Check::error("x0.structure", claim, e),
    }
}

/// Times `r ∈ (0, α⁻⁴)`: `per` samples in each window `αᵏ·[1, α⁻¹)`,
/// `k = -3..=6`.
pub fn holonomy_times(per: usize) -> Vec<K> {
    (-3..=6).flat_map(|k| window_samples(k, per)).collect()
}

/// Path holonomies of `β_k, γ_k`, `|k| ≤ range`, against the closed forms.
pub fn closed_forms(range: i64, per: usize) -> Check {
    let claim = "path holonomies of β_k, γ_k equal the closed forms for |k| ≤ 8 on 200 sampled r ∈ (0, α⁻⁴)";
    let times = holonomy_times(per);
    let mut bad = Vec::new();
    for r in &times {
        let x = match build_xr(r) {
            Ok(x) => x,
            Err(e) => return Check::error("holonomy.closed_forms", claim, format!("r = {r}: {e}")),
        };
        for k in -range..=range {
            let ok = (|| {
                let (b, g) = homology::extend_family(k).ok()?;
                let (hb, hg) = homology::hol_closed_form(k, r).ok()?;
                Some(homology::hol_class(&x.surface, &b).ok()? == hb && homology::hol_class(&x.surface, &g).ok()? == hg)
            })();
            if ok != Some(true) {
                bad.push(format!("r = {r}, k = {k}"));
            }
        }
    }
    Check::new(
        "holonomy.closed_forms",
        claim,
        bad.is_empty(),
        json!({ "samples": times.len(), "range": range, "failures": bad }),
    )
}

// ---------------------------------------------------------------------------
// cylinders: geometry across windows, circumference decay

pub fn cylinders(opts: &Options) -> Vec<Check> {
    vec![cylinder_geometry(opts), divergence(30)]
}

pub fn cylinder_geometry(opts: &Options) -> Check {
    let claim = "vertical cylinders: 4 per window sample, 3 at powers of α; cores β_j+γ_j, circumferences, widths and total area exact";
    let mut bad = Vec::new();
    let mut counts = Vec::new();
    let mut budget = false;
    let mut n = 0;
    for k in opts.k_min..=opts.k_max {
        let mut times = window_samples(-k, opts.samples);
        times.push(alpha_pow(-k));
        for r in times {
            n += 1;
            let want = if r == alpha_pow(-k) { 3 } else { 4 };
            let res = build_xr(&r).map_err(|e| e.to_string()).and_then(|x| match vertical_decomposition(&x.surface, DEFAULT_BUDGET) {
                Err(CylinderError::NotPeriodicWithinBudget(_)) => {
                    budget = true;
                    Err("budget".into())
                }
                other => other.map_err(|e| e.to_string()),
            });
            match res {
                Ok(d) => {
                    let g = check_geometry(&d, &r);
                    if !g.passed() || d.cylinders.len() != want {
                        bad.push(format!("r = {r}: {:?} ({} cylinders)", g.failures(), d.cylinders.len()));
                    }
                    if k == opts.k_min {
                        counts.push(d.cylinders.len());
                    }
                }
                Err(e) => bad.push(format!("r = {r}: {e}")),
            }
        }
    }
    let mut c = Check::new(
        "cylinders.geometry",
        claim,
        bad.is_empty(),
        json!({ "k_min": opts.k_min, "k_max": opts.k_max, "per_window": opts.samples, "surfaces": n, "first_window_counts": counts, "failures": bad }),
    );
    if budget && c.status == Status::Fail {
        c.status = Status::Budget;
    }
    c
}

/// Largest circumference at `α⁻ᵏ·3/2` shrinks by exactly `α` per step.
pub fn divergence(k_max: i64) -> Check {
    let claim = "max circumference at r = α⁻ᵏ·3/2 equals 2αᵏ(1+α²), successive ratio α, below 1e-7 at k = 30";
    match ay::verify_divergence(&K::ratio(3, 2), k_max) {
        Ok(rows) => {
            let exact = rows.iter().all(|r| r.ratio_is_alpha && r.max_circumference == circumference(r.k));
            let last = rows.last().map(|r| r.value).unwrap_or(f64::NAN);
            Check::new(
                "cylinders.divergence",
                claim,
                exact && last < 1e-7,
                json!({
                    "k_max": k_max,
                    "max_at_0": rows[0].max_circumference.to_string(),
                    "max_at_k_max": rows.last().map(|r| r.max_circumference.to_string()),
                    "value_at_k_max": format!("{last:.6e}"),
                    "exact": exact,
                }),
            )
        }
        Err(e) => Check::error("cylinders.divergence", claim, e),
    }
}

// ---------------------------------------------------------------------------
// renorm: pseudo-Anosov, symmetry, eigen relations, routes

pub fn renorm() -> Vec<Check> {
    vec![pseudo_anosov(), hyperelliptic(10), eigenvector(30), non_return(), routes()]
}

pub fn pseudo_anosov() -> Check {
    let claim = "g̃·x₁ ≅ x_{α⁻¹}, g̃·x₀ ≅ x₀, g̃⁻¹·x₀ ≅ x₀, and the automorphism acts on the basis as φ_*";
    match ay::pseudo_anosov_check() {
        Ok(r) => Check::new(
            "renorm.pseudo_anosov",
            claim,
            r.passed(),
            json!({
                "g_x1_is_x_inv_alpha": r.gx1_is_x_inv_alpha,
                "g_x0_is_x0": r.gx0_is_x0,
                "g_inv_x0_is_x0": r.ginv_x0_is_x0,
                "pushes_basis": r.pushes_basis,
            }),
        ),
        Err(e) => Check::error("renorm.pseudo_anosov", claim, e),
    }
}

pub fn symmetry_times(n: usize) -> Vec<K> {
    let mut t: Vec<K> = window_samples(0, n.div_ceil(2));
    t.extend(window_samples(2, n / 2));
    t.truncate(n);
    t
}

pub fn hyperelliptic(n: usize) -> Check {
    let claim = "−I·x_r ≅ x_{−r} on sampled r";
    let times = symmetry_times(n);
    let mut bad = Vec::new();
    for r in &times {
        match ay::hyperelliptic_check(r) {
            Ok(true) => {}
            Ok(false) => bad.push(r.to_string()),
            Err(e) => bad.push(format!("{r}: {e}")),
        }
    }
    Check::new("renorm.hyperelliptic", claim, bad.is_empty(), json!({ "times": strs(&times), "failures": bad }))
}

pub fn eigenvector(range: i64) -> Check {
    let claim = "hol_x(β_{k+1}) = α⁻¹·hol_x(β_k) (and for γ) on x₀ for |k| ≤ 30; φ_* scales hol_x by α⁻¹";
    match dominant_eigenvector_check(range) {
        Ok(r) => Check::new(
            "renorm.eigenvector",
            claim,
            r.passed(),
            json!({ "range": r.range, "basis_ok": r.basis_ok, "family_ok": r.family_ok, "eigenvalue_cubic": r.eigenvalue_cubic, "failures": r.failures }),
        ),
        Err(e) => Check::error("renorm.eigenvector", claim, e),
    }
}

pub fn non_return() -> Check {
    let claim = "x_r is not isomorphic to x₀ for sampled r > 0";
    let times = symmetry_times(6);
    let returned: Vec<String> =
        times.iter().filter(|r| !matches!(ay::returns_to_x0(r), Ok(false))).map(K::to_string).collect();
    Check::new("renorm.non_return", claim, returned.is_empty(), json!({ "times": strs(&times), "returned": returned }))
}

pub fn routes() -> Check {
    let claim = "rel straight from x₀, renormalized construction and slit surgery agree";
    let times = [K::ratio(1, 2), K::ratio(5, 2), alpha_pow(1) * K::ratio(5, 4)];
    let mut bad: Vec<String> = times.iter().filter(|r| !matches!(ay::route_check(r), Ok(true))).map(K::to_string).collect();
    let slit = (|| {
        let x = build_xr(&alpha_pow(3)).ok()?;
        let y = rel_h_slit(&x.surface, &(alpha_pow(1) + alpha_pow(2))).ok()?;
        Some(iso_check(&y, &build_xr(&K::one()).ok()?.surface).is_some())
    })();
    if slit != Some(true) {
        bad.push("slit from α³ by α+α²".into());
    }
    Check::new("renorm.routes", claim, bad.is_empty(), json!({ "times": strs(&times), "slit": slit, "failures": bad }))
}

// ---------------------------------------------------------------------------
// torus: twist chart

pub fn torus() -> Vec<Check> {
    vec![chart_round_trip(), conjugacy(20), dimension()]
}

fn chart_times() -> Vec<K> {
    [-1, 0, 1, 3].into_iter().flat_map(|k| window_samples(k, 5)).collect()
}

pub fn chart_round_trip() -> Check {
    let claim = "twist chart rebuild is the identity, and multi-twist lattice shifts give isomorphic surfaces";
    let times = [K::ratio(3, 2), K::ratio(1, 3), alpha_pow(-2) * K::ratio(6, 5)];
    let lattice: [[i64; 4]; 3] = [[1, 0, 0, 0], [0, -1, 2, 0], [3, 1, -1, 2]];
    let mut bad = Vec::new();
    for r in &times {
        let res = (|| {
            let x = build_xr(r).ok()?;
            let d = vertical_decomposition(&x.surface, DEFAULT_BUDGET).ok()?;
            let c = extract_chart(&d);
            let mut ok = iso_check(&c.rebuild(&c.twists).ok()?, &x.surface).is_some();
            for n in &lattice {
                ok &= iso_check(&c.rebuild(&c.dehn(&n[..c.len()])).ok()?, &x.surface).is_some();
            }
            Some(ok)
        })();
        if res != Some(true) {
            bad.push(r.to_string());
        }
    }
    Check::new("torus.round_trip", claim, bad.is_empty(), json!({ "times": strs(&times), "failures": bad }))
}

/// `(r, t)` pairs: rel times from four windows, vertical times of both signs.
pub fn conjugacy_pairs(n: usize) -> Vec<(K, K)> {
    chart_times()
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(i, r)| {
            let i = i as i64;
            let t = K::ratio((2 * i + 1) * if i % 2 == 0 { 1 } else { -1 }, 13) + alpha_pow(1) * K::ratio(i % 4, 17);
            (r, t)
        })
        .collect()
}

pub fn conjugacy(n: usize) -> Check {
    let claim = "chart flow moves class holonomies by (0, t·bc) and matches vertical rel on 20 (r, t) samples";
    let pairs = conjugacy_pairs(n);
    let mut bad = Vec::new();
    for (r, t) in &pairs {
        let ok = (|| {
            let x = build_xr(r).ok()?;
            let d = vertical_decomposition(&x.surface, DEFAULT_BUDGET).ok()?;
            conjugacy_check(&x.surface, &extract_chart(&d), t).ok()
        })();
        if ok != Some(true) {
            bad.push(format!("r = {r}, t = {t}"));
        }
    }
    Check::new("torus.conjugacy", claim, bad.is_empty(), json!({ "samples": pairs.len(), "failures": bad }))
}

pub fn dimension() -> Check {
    let claim = "orbit closure of the twist flow has dimension 3 at sampled r; at r = 1 the reciprocal circumferences span 3 dimensions";
    let mut dims = Vec::new();
    let mut bad = Vec::new();
    for r in chart_times() {
        let d = build_xr(&r)
            .map_err(|e| e.to_string())
            .and_then(|x| vertical_decomposition(&x.surface, DEFAULT_BUDGET).map_err(|e| e.to_string()))
            .and_then(|d| orbit_closure(&extract_chart(&d)).map_err(|e| e.to_string()));
        match d {
            Ok(o) if o.dimension == 3 => dims.push(3),
            Ok(o) => {
                dims.push(o.dimension);
                bad.push(format!("r = {r}: d = {}", o.dimension));
            }
            Err(e) => bad.push(format!("r = {r}: {e}")),
        }
    }
    let at_one = build_xr(&K::one())
        .ok()
        .and_then(|x| vertical_decomposition(&x.surface, DEFAULT_BUDGET).ok())
        .map(|d| {
            let c = extract_chart(&d);
            (reciprocal_rank(&c), matches!(orbit_closure(&c), Err(TwistError::MixedBoundary(_))))
        });
    if at_one.map(|(k, _)| k) != Some(3) {
        bad.push("r = 1".into());
    }
    Check::new(
        "torus.dimension",
        claim,
        bad.is_empty(),
        json!({
            "dimensions": dims,
            "r1_reciprocal_rank": at_one.map(|(k, _)| k),
            "r1_mixed_boundary": at_one.map(|(_, m)| m),
            "failures": bad,
        }),
    )
}

// ---------------------------------------------------------------------------
// iet: return maps, SAF, segment table

pub fn iet() -> Vec<Check> {
    vec![periodic_maps(20), x0_map(), segment()]
}

pub fn iet_times(n: usize) -> Vec<K> {
    let per = n.div_ceil(5);
    let mut t: Vec<K> = (-2..=2).flat_map(|k| window_samples(k, per)).collect();
    t.truncate(n);
    t
}

pub fn periodic_maps(n: usize) -> Check {
    let claim = "vertical return maps of sampled x_r are periodic within 10⁶ steps and have SAF = 0";
    let times = iet_times(n);
    let mut bad = Vec::new();
    let mut budget = false;
    let mut sizes = Vec::new();
    for r in &times {
        let res = build_xr(r).map_err(|e| e.to_string()).and_then(|x| first_return_iet(&x.surface, TRACE_BUDGET).map_err(|e| e.to_string()));
        match res {
            Ok(m) => {
                sizes.push(m.iet.len());
                let v = iet_periodicity(&m.iet, ORBIT_BUDGET);
                if !v.is_periodic() {
                    budget = true;
                    bad.push(format!("r = {r}: {}", v.name()));
                } else if !saf(&m.iet).is_zero() || !m.iet.is_consistent() {
                    bad.push(format!("r = {r}: SAF or consistency"));
                }
            }
            Err(e) => bad.push(format!("r = {r}: {e}")),
        }
    }
    let mut c = Check::new("iet.periodic", claim, bad.is_empty(), json!({ "samples": times.len(), "intervals": sizes, "failures": bad }));
    if budget && c.status == Status::Fail {
        c.status = Status::Budget;
    }
    c
}

pub fn x0_map() -> Check {
    let claim = "the vertical return map of x₀ is unresolved at 10⁶ steps and has SAF = 0";
    let res = build_x0().map_err(|e| e.to_string()).and_then(|x| first_return_iet(&x.surface, TRACE_BUDGET).map_err(|e| e.to_string()));
    match res {
        Ok(m) => {
            let v = iet_periodicity(&m.iet, ORBIT_BUDGET);
            let s = saf(&m.iet);
            let unresolved = matches!(v, Verdict::Unresolved { .. });
            Check::new(
                "iet.x0",
                claim,
                unresolved && s.is_zero() && s.is_antisymmetric(),
                json!({
                    "verdict": v.name(),
                    "intervals": m.iet.len(),
                    "permutation": m.iet.permutation(),
                    "transversal_length": m.transversal_length.to_string(),
                    "saf": s.to_json(),
                }),
            )
        }
        Err(e) => Check::error("iet.x0", claim, e),
    }
}

/// Times for the segment table: the sampled times, their negatives, and 0.
pub fn segment_times() -> Vec<K> {
    let mut t: Vec<K> = iet_times(8);
    t.extend(iet_times(8).into_iter().map(|r| -r));
    t.push(K::zero());
    t.sort();
    t
}

pub fn segment() -> Check {
    let claim = "along the rel leaf the only non-periodic return map in the table is at r = 0";
    match segment_family(&segment_times(), ORBIT_BUDGET) {
        Ok(rows) => {
            let odd: Vec<String> = rows.iter().filter(|row| !row.verdict.is_periodic()).map(|row| row.r.to_string()).collect();
            let saf_all = rows.iter().all(|row| row.saf_zero);
            Check::new(
                "iet.segment",
                claim,
                odd == ["0"] && saf_all,
                json!({ "rows": rows.len(), "non_periodic": odd, "saf_all_zero": saf_all }),
            )
        }
        Err(e) => Check::error("iet.segment", claim, e),
    }
}

/// The segment table as TSV, for the `report` subcommand.
pub fn segment_table() -> Result<String, String> {
    segment_family(&segment_times(), ORBIT_BUDGET).map(|rows| ayrel::iet::segment_tsv(&rows))
}
