//! The fourteen acceptance criteria as runnable checks.
//!
//! Each check returns a [`CriterionReport`]; a numerical failure inside a
//! check is reported as a failed criterion with the error text.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::convolution::series_engine::{bifree_moments_series, free_convolution_moments_series};
use crate::convolution::{
    bifree_convolve, haar_table, haar_test, moment_table, opposite_convolve, poisson_positivity_check,
    word_moment, DEFAULT_GRID, DEFAULT_RADIUS,
};
use crate::error::Result;
use crate::limits::{
    accompany, h_function, haar_limit_check, id_from_levy_poisson_approx, id_law, id_root, limit_sweep,
    normal_row, p3_bound, poisson_row, richardson_ratio, InfinitesimalArray, LevyData, DEFAULT_CUTOFF,
};
use crate::measure::{product_measure, AtomicMeasure1D, AtomicMeasure2D, MomentTable2D};
use crate::sampling::MeasureSampler;
use crate::transforms::{
    eta, eta_inv_pointwise, h2, psi1, psi2, reflect_point, sigma_op_pointwise, sigma_pointwise, DomainWindow,
    TransformLaw,
};

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn report<F>(id: u8, name: &'static str, body: F) -> CriterionReport
where
    F: FnOnce() -> Result<(bool, String)>,
{
    match body() {
        Ok((passed, detail)) => CriterionReport { id, name, passed, detail },
        Err(e) => CriterionReport {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest `|a − b|` scaled by `1 + |b|`.
fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn table(law: &TransformLaw, order: usize) -> Result<MomentTable2D> {
    Ok(moment_table(law, order, DEFAULT_GRID, DEFAULT_RADIUS)?.table)
}

pub fn transform_identities() -> CriterionReport {
    report(1, "transform identities", || {
        let mut s = MeasureSampler::new(1001);
        let mut worst = [0.0f64; 6];
        let mut limits = 0.0f64;
        let mut contraction_ok = true;
        for _ in 0..20 {
            let mu = s.px_measure_2d(5);
            let (nu1, nu2) = (mu.marginal(1), mu.marginal(2));
            let window = TransformLaw::from_atomic(&mu)?.window();
            for _ in 0..100 {
                let (z, w) = (s.off_torus_point(), s.off_torus_point());
                let h = h2(&mu, z, w)?;
                let parts = psi2(&mu, z, w)? + psi1(&nu1, z)? + psi1(&nu2, w)? + 1.0;
                worst[0] = worst[0].max(rel(h, parts));
                let mirrored = psi2(&mu, reflect_point(z), reflect_point(w))?.conj();
                worst[1] = worst[1].max(rel(parts, mirrored));
                worst[2] = worst[2].max(rel(psi1(&nu1, z)? + 1.0, -psi1(&nu1, reflect_point(z))?.conj()));
                if let (Ok(e), Ok(e_out)) = (eta(&nu1, z), eta(&nu1, reflect_point(z))) {
                    worst[3] = worst[3].max(rel(e, 1.0 / e_out.conj()));
                    let inside = z.norm() < 1.0;
                    contraction_ok &= if inside {
                        e.norm() <= z.norm() * (1.0 + 1e-12)
                    } else {
                        e.norm() >= z.norm() * (1.0 - 1e-12)
                    };
                }
                // η⁻¹ on Δ_r checked by the forward map
                let a = s.disk_point(window.r * 0.95);
                if a.norm() > 1e-3 {
                    let far = reflect_point(a);
                    let y = eta_inv_pointwise(&nu2, far, &window)?;
                    worst[4] = worst[4].max(rel(eta(&nu2, y)?, far));
                    // mixed components through independent kernel forms
                    let b = s.disk_point(window.r * 0.95);
                    let du = sigma_pointwise(&mu, b, far, &window)?;
                    let ud = sigma_pointwise(&mu, reflect_point(b), a, &window)?;
                    worst[5] = worst[5].max(rel(du, 1.0 / ud.conj()));
                }
            }
            let big = 1e6;
            let z = s.disk_point(0.9);
            let far = Complex64::from_polar(big, s.uniform(-PI, PI));
            let far2 = Complex64::from_polar(big, s.uniform(-PI, PI));
            limits = limits
                .max((psi1(&nu1, far)? + 1.0).norm())
                .max((psi2(&mu, far, far2)? - 1.0).norm())
                .max((psi2(&mu, z, far)? + psi1(&nu1, z)?).norm())
                .max((sigma_pointwise(&mu, c(1e-6, 0.0), far, &window)? - 1.0).norm());
        }
        let passed = worst.iter().all(|&r| r <= 1e-10) && limits <= 1e-5 && contraction_ok;
        Ok((
            passed,
            format!(
                "H-split {:.1e}, psi2 sym {:.1e}, psi1 sym {:.1e}, eta sym {:.1e}, eta_inv sym {:.1e}, sigma sym {:.1e}, limits {:.1e}, contraction {}",
                worst[0], worst[1], worst[2], worst[3], worst[4], worst[5], limits, contraction_ok
            ),
        ))
    })
}

pub fn point_mass_laws() -> CriterionReport {
    report(2, "point-mass laws", || {
        let mut s = MeasureSampler::new(1002);
        let mut moment_err = 0.0f64;
        let mut sigma_err = 0.0f64;
        for _ in 0..4 {
            let (alpha, beta) = (s.uniform(-PI, PI), s.uniform(-PI, PI));
            let delta = AtomicMeasure2D::point_mass(alpha, beta);
            let mu = s.px_measure_2d(4);
            let t = table(&bifree_convolve(&delta, &mu)?, 6)?;
            for (p, q, v) in t.iter() {
                let expected = Complex64::from_polar(1.0, p as f64 * alpha + q as f64 * beta) * mu.moment(p, q);
                moment_err = moment_err.max((v - expected).norm());
            }
            let window = DomainWindow::default();
            for k in 0..16 {
                for l in 0..16 {
                    let z = Complex64::from_polar(0.3 + 0.01 * k as f64, 2.0 * PI * k as f64 / 16.0);
                    let w = Complex64::from_polar(0.35, 2.0 * PI * l as f64 / 16.0);
                    for (a, b) in [(z, w), (z, reflect_point(w)), (reflect_point(z), w), (reflect_point(z), reflect_point(w))] {
                        sigma_err = sigma_err.max((sigma_pointwise(&delta, a, b, &window)? - 1.0).norm());
                    }
                }
            }
        }
        Ok((
            moment_err <= 1e-9 && sigma_err <= 1e-12,
            format!("moment error {moment_err:.2e} (≤ 1e-9), |Σ_δ − 1| {sigma_err:.2e} (≤ 1e-12)"),
        ))
    })
}

fn one_dimensional_table(first: &[Complex64], second: &[Complex64], order: usize) -> MomentTable2D {
    let moment = |m: &[Complex64], p: i32| {
        if p >= 0 {
            m[p as usize]
        } else {
            m[(-p) as usize].conj()
        }
    };
    let mut t = MomentTable2D::zeros(order);
    let n = order as i32;
    for p in -n..=n {
        for q in -n..=n {
            t.set(p, q, moment(first, p) * moment(second, q));
        }
    }
    t
}

pub fn product_factorization() -> CriterionReport {
    report(3, "product-measure factorization", || {
        let mut s = MeasureSampler::new(1003);
        let order = 6;
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let (a1, b1, a2, b2) = (s.px_measure_1d(3), s.px_measure_1d(3), s.px_measure_1d(2), s.px_measure_1d(3));
            let law = bifree_convolve(&product_measure(&a1, &b1), &product_measure(&a2, &b2))?;
            let t = table(&law, order)?;
            let first = free_convolution_moments_series(&[(a1, 1), (a2, 1)], order)?;
            let second = free_convolution_moments_series(&[(b1, 1), (b2, 1)], order)?;
            worst = worst.max(t.max_abs_diff(&one_dimensional_table(&first, &second, order), order));
        }
        Ok((worst <= 1e-8, format!("max deviation {worst:.2e} over 10 quadruples (≤ 1e-8)")))
    })
}

pub fn engine_agreement() -> CriterionReport {
    report(4, "engine cross-agreement", || {
        let mut s = MeasureSampler::new(1004);
        let order = 6;
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let (mu1, mu2) = (s.px_measure_2d(3), s.px_measure_2d(4));
            let t = table(&bifree_convolve(&mu1, &mu2)?, order)?;
            let series = bifree_moments_series(&[(mu1, 1), (mu2, 1)], order)?;
            for p in 0..=order {
                for q in 0..=order {
                    worst = worst.max((t.get(p as i32, q as i32) - series.get(p, q)).norm());
                }
            }
        }
        Ok((worst <= 1e-8, format!("max |pointwise − series| {worst:.2e} over 10 pairs (≤ 1e-8)")))
    })
}

pub fn algebraic_laws() -> CriterionReport {
    report(5, "commutativity and associativity", || {
        let mut s = MeasureSampler::new(1005);
        let order = 4;
        let (mut comm, mut assoc) = (0.0f64, 0.0f64);
        for _ in 0..4 {
            let (m1, m2, m3) = (s.px_measure_2d(3), s.px_measure_2d(3), s.px_measure_2d(2));
            let ab = table(&bifree_convolve(&m1, &m2)?, order)?;
            let ba = table(&bifree_convolve(&m2, &m1)?, order)?;
            comm = comm.max(ab.max_abs_diff(&ba, order));
            let left = bifree_convolve(&bifree_convolve(&m1, &m2)?, &m3)?;
            let right = bifree_convolve(&m1, &bifree_convolve(&m2, &m3)?)?;
            assoc = assoc.max(table(&left, order)?.max_abs_diff(&table(&right, order)?, order));
        }
        Ok((
            comm <= 1e-8 && assoc <= 1e-8,
            format!("commutativity {comm:.2e}, associativity {assoc:.2e} (≤ 1e-8)"),
        ))
    })
}

pub fn output_validity() -> CriterionReport {
    report(6, "measure-validity of outputs", || {
        let mut s = MeasureSampler::new(1006);
        let mut laws = Vec::new();
        for _ in 0..3 {
            laws.push(bifree_convolve(&s.px_measure_2d(4), &s.px_measure_2d(3))?);
        }
        laws.push(bifree_convolve(&s.px_measure_2d(3), &s.px_measure_2d(3))?.power(3));
        laws.push(id_law(&LevyData::normal(1.0))?);
        let (mut herm, mut modulus, mut eig, mut positivity) = (0.0f64, 0.0f64, f64::INFINITY, f64::INFINITY);
        for law in &laws {
            let check = table(law, 6)?.check();
            herm = herm.max(check.hermitian_residual);
            modulus = modulus.max(check.max_modulus);
            eig = eig.min(check.min_eigenvalue);
            positivity = positivity.min(poisson_positivity_check(law, 64, 0.8)?);
        }
        let passed = herm <= 1e-8 && modulus <= 1.0 + 1e-8 && eig >= -1e-7 && positivity >= -1e-7;
        Ok((
            passed,
            format!(
                "{} laws: Hermitian {herm:.1e}, max |m| {modulus:.6}, min eigenvalue {eig:.2e}, Poisson minimum {positivity:.2e}",
                laws.len()
            ),
        ))
    })
}

pub fn opposite_suite() -> CriterionReport {
    report(7, "opposite-transform suite", || {
        let mut s = MeasureSampler::new(1007);
        let (mu1, mu2) = (s.px_measure_2d(3), s.px_measure_2d(3));
        let forward = bifree_convolve(&mu1, &mu2)?;
        let (r1, r2) = (mu1.reflect(), mu2.reflect());
        let opposite = opposite_convolve(&r1, &r2)?;
        let window = TransformLaw::from_atomic(&mu1)?.window();
        let r = window.r.min(opposite.window().r).min(forward.window().r) * 0.9;
        let (mut single, mut product) = (0.0f64, 0.0f64);
        for _ in 0..100 {
            let z = s.disk_point(r);
            let w = Complex64::from_polar(s.uniform(0.2 * r, r), s.uniform(-PI, PI));
            let op = sigma_op_pointwise(&r1, z, w, &window)?;
            single = single.max((op - sigma_pointwise(&mu1, z, 1.0 / w, &window)?).norm());
            product = product.max((opposite.sigma_op(z, w)? - forward.sigma(z, 1.0 / w)?).norm());
        }
        Ok((
            single <= 1e-9 && product <= 1e-9,
            format!("reflection identity {single:.2e}, (μ₁⊠⊠μ₂)* consistency {product:.2e} at 100 points (≤ 1e-9)"),
        ))
    })
}

/// Four-atom centered measures with prescribed `m_{1,1}`.
fn centered(weight_diag: f64, t_shift: f64) -> Result<AtomicMeasure2D> {
    let off = 0.5 - weight_diag;
    AtomicMeasure2D::probability([
        (0.0, t_shift, weight_diag),
        (PI, PI + t_shift, weight_diag),
        (0.0, PI + t_shift, off),
        (PI, t_shift, off),
    ])
}

pub fn haar_oracle() -> CriterionReport {
    report(8, "centered-pair oracle", || {
        let mut s = MeasureSampler::new(1008);
        let order = 4;
        let mut cases = vec![(centered(0.375, FRAC_PI_2)?, centered(0.375, 0.0)?)];
        for _ in 0..6 {
            let (a, b) = (s.uniform(0.0, 0.5), s.uniform(0.0, 0.5));
            cases.push((centered(a, s.uniform(-PI, PI))?, centered(b, s.uniform(-PI, PI))?));
        }
        let mut worst = 0.0f64;
        for (mu1, mu2) in &cases {
            let r = haar_test(mu1, mu2, order)?;
            for p in -(order as i32)..=order as i32 {
                for q in -(order as i32)..=order as i32 {
                    worst = worst.max((word_moment(mu1, mu2, p, q)? - r.table.get(p, q)).norm());
                }
            }
        }
        let example = haar_test(&cases[0].0, &cases[0].1, order)?;
        let example_ok = (example.table.get(1, 1) - c(0.0, 0.25)).norm() < 1e-15
            && (example.table.get(2, 2) - c(-1.0 / 16.0, 0.0)).norm() < 1e-15;
        let flat = centered(0.25, 0.7)?;
        let absorbed = haar_test(&flat, &cases[0].0, order)?;
        let absorbed_ok = absorbed.is_haar && absorbed.table == haar_table(order);
        let reversed = haar_test(&cases[1].0, &flat, order)?;
        let absorbed_ok = absorbed_ok && reversed.is_haar;
        Ok((
            worst <= 1e-15 && example_ok && absorbed_ok,
            format!(
                "word formula vs closed form {worst:.1e} on {} pairs; m₁,₁ = i/4, m₂,₂ = −1/16: {example_ok}; absorption: {absorbed_ok}",
                cases.len()
            ),
        ))
    })
}

const LEVELS: [usize; 4] = [8, 16, 32, 64];

fn sweep_detail(errors: &[f64], ratios: &[f64], gap: f64) -> String {
    let e: Vec<String> = errors.iter().map(|x| format!("{x:.3e}")).collect();
    let r: Vec<String> = ratios.iter().map(|x| format!("{x:.2}")).collect();
    format!("errors [{}], Richardson [{}], pairwise gap {gap:.1e}", e.join(", "), r.join(", "))
}

pub fn normal_sweep() -> CriterionReport {
    report(9, "normal-array limit sweep", || {
        let rows = LEVELS.iter().map(|&n| normal_row(1.0, n)).collect::<Result<Vec<_>>>()?;
        let array = InfinitesimalArray::new(rows, DEFAULT_CUTOFF)?;
        let sweep = limit_sweep(&array, &LevyData::normal(1.0), 4)?;
        let errors = sweep.errors();
        let ratios = richardson_ratio(&errors);
        let last = *errors.last().unwrap_or(&f64::INFINITY);
        let rate_ok = ratios.iter().all(|r| (1.6..=2.4).contains(r));
        Ok((
            sweep.is_monotone() && last <= 5e-2 && rate_ok && sweep.pairwise_gap <= 1e-8,
            sweep_detail(&errors, &ratios, sweep.pairwise_gap),
        ))
    })
}

/// `½δ_(i,−1) + ½δ_(−i,−1)`.
pub fn two_atom_jumps() -> AtomicMeasure2D {
    AtomicMeasure2D::probability([(FRAC_PI_2, PI, 0.5), (-FRAC_PI_2, PI, 0.5)]).expect("valid jump measure")
}

pub fn poisson_sweep() -> CriterionReport {
    report(10, "compound-Poisson limit sweep", || {
        let mu = two_atom_jumps();
        let rows = LEVELS.iter().map(|&n| poisson_row(1.0, &mu, n)).collect::<Result<Vec<_>>>()?;
        let array = InfinitesimalArray::new(rows, DEFAULT_CUTOFF)?;
        let sweep = limit_sweep(&array, &LevyData::poisson(1.0, &mu)?, 4)?;
        let errors = sweep.errors();
        let last = *errors.last().unwrap_or(&f64::INFINITY);
        Ok((
            sweep.is_monotone() && last <= 5e-2 && sweep.pairwise_gap <= 1e-8,
            sweep_detail(&errors, &richardson_ratio(&errors), sweep.pairwise_gap),
        ))
    })
}

/// A compatible Lévy triple with atoms off the `{1}`-slices.
pub fn generic_levy() -> Result<LevyData> {
    let rho = [(0.8, -0.5, 0.1), (-1.2, 2.0, 0.2), (0.3, 0.9, 0.01)];
    let rho1 = AtomicMeasure2D::finite(rho.iter().map(|&(s, t, w)| (s, t, w / (1.0 - f64::cos(t)))))?;
    let rho2 = AtomicMeasure2D::finite(rho.iter().map(|&(s, t, w)| (s, t, w / (1.0 - f64::cos(s)))))?;
    LevyData::new(rho1, rho2, 0.4, Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, -1.1))
}

pub fn infinite_divisibility() -> CriterionReport {
    report(11, "infinite divisibility", || {
        let order = 4;
        let normal = table(&id_law(&LevyData::normal(1.0))?, order)?;
        let half = id_law(&LevyData::normal(0.5))?;
        let normal_gap = normal.max_abs_diff(&table(&bifree_convolve(&half, &half)?, order)?, order);
        let mu = AtomicMeasure2D::probability([(0.7, -0.4, 0.6), (-1.9, 2.3, 0.4)])?;
        let poi2 = table(&id_law(&LevyData::poisson(2.0, &mu)?)?, order)?;
        let poi1 = id_law(&LevyData::poisson(1.0, &mu)?)?;
        let poisson_gap = poi2.max_abs_diff(&table(&bifree_convolve(&poi1, &poi1)?, order)?, order);
        let ld = generic_levy()?;
        let whole = table(&id_law(&ld)?, order)?;
        let mut root_gap = 0.0f64;
        for n in [2u32, 3] {
            let piece = id_law(&id_root(&ld, n)?)?;
            let mut law = piece.clone();
            for _ in 1..n {
                law = bifree_convolve(&law, &piece)?;
            }
            root_gap = root_gap.max(whole.max_abs_diff(&table(&law, order)?, order));
        }
        Ok((
            normal_gap <= 1e-8 && poisson_gap <= 1e-8 && root_gap <= 1e-8,
            format!("N(1) vs N(1/2)² {normal_gap:.2e}, Poi(2,μ) vs Poi(1,μ)² {poisson_gap:.2e}, root round trip {root_gap:.2e}"),
        ))
    })
}

pub fn poisson_construction() -> CriterionReport {
    report(12, "Poisson-approximation construction", || {
        let ld = generic_levy()?;
        let approx = id_from_levy_poisson_approx(&ld, 4)?;
        let r = approx.law.window().r * 0.9;
        let mut s = MeasureSampler::new(1012);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let (a, b) = (s.disk_point(r), s.disk_point(r));
            for (z, w) in [(a, b), (a, reflect_point(b)), (reflect_point(a), b), (reflect_point(a), reflect_point(b))] {
                worst = worst.max(rel(approx.sigma(z, w)?, ld.sigma(z, w)?));
            }
        }
        let zero = id_from_levy_poisson_approx(&LevyData::normal(0.6), 5)?;
        let exact_normal = zero.mu_m.is_none() && zero.law == id_law(&LevyData::normal(0.6))?;
        let origin = approx.law.sigma_at_origin()?;
        let origin_ok = (origin - ld.sigma(c(0.0, 0.0), c(0.0, 0.0))?).norm() <= 1e-10 && origin.norm() > 0.0;
        Ok((
            worst <= 1e-10 && exact_normal && origin_ok,
            format!("Σ vs exp(f·F) {worst:.2e} (≤ 1e-10) at 200 points; ρ = 0 gives N(a): {exact_normal}; Σ(0,0) = exp(F(0,0)) ≠ 0: {origin_ok}"),
        ))
    })
}

/// `0.925δ_(1,1) + 0.025` on each of the other three sign corners:
/// `m(μ⁽¹⁾) = m(μ⁽²⁾) = m₁,₁ = 0.9`.
pub fn contracting_measure() -> AtomicMeasure2D {
    AtomicMeasure2D::probability([(0.0, 0.0, 0.925), (PI, PI, 0.025), (0.0, PI, 0.025), (PI, 0.0, 0.025)])
        .expect("valid measure")
}

pub fn haar_limit() -> CriterionReport {
    report(13, "Haar limit criterion", || {
        let mu = contracting_measure();
        let levels: Vec<(AtomicMeasure2D, u32)> = [1u32, 2, 4, 8, 16, 32, 64, 128].iter().map(|&k| (mu.clone(), k)).collect();
        let check = haar_limit_check(&levels, 4, 32)?;
        let mut envelope_ok = true;
        let mut ratios = Vec::new();
        for level in &check.levels {
            if let Some(m) = level.max_moment {
                envelope_ok &= m <= 10.0 * level.envelope();
                ratios.push(format!("{}:{:.2}", level.k, m / level.envelope()));
            }
        }
        let point = AtomicMeasure2D::point_mass(0.3, -0.2);
        let stuck = haar_limit_check(&[(point.clone(), 4), (point, 8)], 4, 0)?;
        Ok((
            check.tends_to_zero && envelope_ok && !stuck.tends_to_zero,
            format!(
                "powers → 0: {}; max moment / envelope [{}] (≤ 10); point masses rejected: {}",
                check.tends_to_zero,
                ratios.join(", "),
                !stuck.tends_to_zero
            ),
        ))
    })
}

pub fn h_function_suite() -> CriterionReport {
    report(14, "h-function properties", || {
        let mut s = MeasureSampler::new(1014);
        let bound = p3_bound(0.5, DEFAULT_CUTOFF);
        let (mut positive, mut symmetry, mut ratio) = (true, 0.0f64, 0.0f64);
        for _ in 0..20 {
            let jumps = s.measure_2d_in_arc(3, 0.4);
            let mu = AtomicMeasure2D::point_mass(0.0, 0.0).scaled(0.8).add(&jumps.scaled(0.2));
            let row = accompany(&crate::limits::ArrayRow::new(1, vec![(mu, 1)]), DEFAULT_CUTOFF);
            let nu = &row.factors[0].0;
            for j in [1, 2] {
                let marginal: AtomicMeasure1D = nu.marginal(j);
                for _ in 0..100 {
                    let z = s.disk_point(0.999);
                    let h = h_function(&marginal, z);
                    positive &= h.re > 0.0;
                    let mirrored = -h_function(&marginal, reflect_point(z)).conj();
                    symmetry = symmetry.max(rel(h, mirrored));
                    let inner = s.disk_point(0.5);
                    let hi = h_function(&marginal, inner);
                    ratio = ratio.max(hi.im.abs() / hi.re.abs());
                }
            }
        }
        Ok((
            positive && symmetry <= 1e-12 && ratio <= bound,
            format!("Re h > 0: {positive}; symmetry {symmetry:.1e} (≤ 1e-12); max |Im h|/|Re h| on D_0.5 {ratio:.3} ≤ M = {bound:.3}"),
        ))
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        transform_identities(),
        point_mass_laws(),
        product_factorization(),
        engine_agreement(),
        algebraic_laws(),
        output_validity(),
        opposite_suite(),
        haar_oracle(),
        normal_sweep(),
        poisson_sweep(),
        infinite_divisibility(),
        poisson_construction(),
        haar_limit(),
        h_function_suite(),
    ]
}
