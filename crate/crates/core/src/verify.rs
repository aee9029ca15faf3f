//! Experiment harness: residual rows, error-exponent fits, expansion and
//! reciprocity probes, and deterministic report serialization.
//!
//! Everything here composes the brute-force sums from [`crate::moments`]
//! with the closed forms from [`crate::mainterms`] and reduces the outcome
//! to flat, reproducible records. Reports are plain data: rows are sorted by
//! modulus, floats are serialized at fixed precision, and nothing
//! nondeterministic (timings, thread counts) enters the serialized form.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{divisor_count, divisors};
use crate::kernels::{
    kernel_k_on_contour, script_k, script_k_quadrature, x_plus,
};
use crate::mainterms::{
    allprim_main, allprim_secondary, default_cut, error_budget, even_secondary, hb_main,
    main_even, main_even_limit, odd_main, odd_secondary, reciprocity_error_scale,
    reciprocity_rhs, secondary_even,
};
use crate::moments::{
    divisor_component, moment_all_primitive, moment_even, moment_odd, twisted_moment,
    ParityClass,
};
use crate::tolerances::{ERROR_BUDGET_EPSILON, OSC_QUAD_TOL};

/// Seed recorded in every report so randomized suites that consumed the
/// report can be replayed.
pub const REPORT_SEED: u64 = 0x5EED;

/// Version stamp recorded in reports: the library version, which is what
/// governs the numeric behavior.
pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("need at least {needed} usable points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Serialize(#[from] serde_json::Error),
}

// ---------------------------------------------------------------------------
// Residual rows and reports
// ---------------------------------------------------------------------------

/// One moment-vs-expansion comparison, flattened for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub q: u64,
    pub parity: String,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub main_re: f64,
    pub main_im: f64,
    pub secondary_re: f64,
    pub secondary_im: f64,
    pub residual_re: f64,
    pub residual_im: f64,
    /// `|residual| / q^{1/4}` — the prime-sweep normalization.
    pub residual_norm: f64,
    /// `|residual| / (q^{1/4} d(q))` — the divisor-aware normalization for
    /// composite sweeps.
    pub residual_norm_divisors: f64,
    pub divisor_count: u64,
    /// `#{d | q : q^{0.45} < d < q^{0.55}}` — how many near-balanced
    /// splittings inflate the secondary/error scale (diagnostic only).
    pub balanced_divisors: u64,
    pub error_budget: f64,
    pub d_cut: u64,
}

impl ReportRow {
    fn build(
        q: u64,
        parity: &str,
        alpha: Complex64,
        beta: Complex64,
        lhs: Complex64,
        main: Complex64,
        secondary: Complex64,
    ) -> Self {
        let residual = lhs - main - secondary;
        let qf = q as f64;
        let d_cut = default_cut(q);
        ReportRow {
            q,
            parity: parity.to_owned(),
            alpha_re: alpha.re,
            alpha_im: alpha.im,
            beta_re: beta.re,
            beta_im: beta.im,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            main_re: main.re,
            main_im: main.im,
            secondary_re: secondary.re,
            secondary_im: secondary.im,
            residual_re: residual.re,
            residual_im: residual.im,
            residual_norm: residual.norm() / qf.powf(0.25),
            residual_norm_divisors: residual.norm()
                / (qf.powf(0.25) * divisor_count(q) as f64),
            divisor_count: divisor_count(q),
            balanced_divisors: balanced_divisor_count(q),
            error_budget: error_budget(q, d_cut, ERROR_BUDGET_EPSILON),
            d_cut,
        }
    }

    /// Residual magnitude, recomputable from the stored columns.
    pub fn residual_abs(&self) -> f64 {
        Complex64::new(self.residual_re, self.residual_im).norm()
    }

    /// Replace the default divisor cut and recompute the error budget that
    /// depends on it. The moment and closed-form columns are unaffected.
    pub fn with_cut(mut self, d_cut: u64) -> Self {
        self.d_cut = d_cut;
        self.error_budget = error_budget(self.q, d_cut, ERROR_BUDGET_EPSILON);
        self
    }
}

/// `#{d | q : q^{0.45} < d < q^{0.55}}`.
pub fn balanced_divisor_count(q: u64) -> u64 {
    let qf = q as f64;
    let (lo, hi) = (qf.powf(0.45), qf.powf(0.55));
    divisors(q)
        .into_iter()
        .filter(|&d| {
            let df = d as f64;
            df > lo && df < hi
        })
        .count() as u64
}

/// Shifted even-family comparison row: brute-force moment minus the leading
/// and secondary closed forms.
pub fn residual_even(q: u64, alpha: Complex64, beta: Complex64) -> ReportRow {
    let lhs = moment_even(q, alpha, beta).value;
    let main = main_even(q, alpha, beta);
    let secondary = secondary_even(q, alpha, beta);
    ReportRow::build(q, "even", alpha, beta, lhs, main, secondary)
}

/// Zero-shift comparison row for any primitive parity class, using the
/// zero-shift closed forms.
pub fn residual_zero_shift(q: u64, parity: ParityClass) -> ReportRow {
    let zero = Complex64::new(0.0, 0.0);
    let (label, lhs, main, secondary) = match parity {
        ParityClass::Even => (
            "even",
            moment_even(q, zero, zero).value,
            main_even_limit(q, zero, zero),
            Complex64::new(even_secondary(q), 0.0),
        ),
        ParityClass::Odd => (
            "odd",
            moment_odd(q, zero, zero).value,
            Complex64::new(odd_main(q), 0.0),
            Complex64::new(odd_secondary(q), 0.0),
        ),
        ParityClass::AllPrimitive => (
            "all-primitive",
            moment_all_primitive(q, zero, zero).value,
            Complex64::new(allprim_main(q), 0.0),
            Complex64::new(allprim_secondary(q), 0.0),
        ),
        ParityClass::AllCharacters => {
            panic!("the all-characters family has no splitting expansion here")
        }
    };
    ReportRow::build(q, label, zero, zero, lhs, main, secondary)
}

/// Report metadata: enough to replay the run that produced the rows.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub version: String,
    pub seed: u64,
    pub settings: BTreeMap<String, String>,
}

/// A produced report: meta plus rows sorted by modulus. The runtime is kept
/// for console display but deliberately excluded from serialization so that
/// equal inputs produce byte-identical files.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl MomentReport {
    pub fn new(mut rows: Vec<ReportRow>, settings: BTreeMap<String, String>) -> Self {
        rows.sort_by(|a, b| (a.q, &a.parity).cmp(&(b.q, &b.parity)));
        MomentReport {
            meta: ReportMeta {
                version: REPORT_VERSION.to_owned(),
                seed: REPORT_SEED,
                settings,
            },
            rows,
            runtime_ms: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = seed;
        self
    }

    /// Fixed-header CSV with floats at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "q,parity,alpha_re,alpha_im,beta_re,beta_im,lhs_re,lhs_im,main_re,main_im,\
             secondary_re,secondary_im,residual_re,residual_im,residual_norm,\
             residual_norm_divisors,divisor_count,balanced_divisors,error_budget,d_cut\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},\
                 {:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{}",
                r.q,
                r.parity,
                r.alpha_re,
                r.alpha_im,
                r.beta_re,
                r.beta_im,
                r.lhs_re,
                r.lhs_im,
                r.main_re,
                r.main_im,
                r.secondary_re,
                r.secondary_im,
                r.residual_re,
                r.residual_im,
                r.residual_norm,
                r.residual_norm_divisors,
                r.divisor_count,
                r.balanced_divisors,
                r.error_budget,
                r.d_cut,
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), VerifyError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<(), VerifyError> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Least-squares fits
// ---------------------------------------------------------------------------

/// Log-log least-squares outcome.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least squares of `ln y` against `ln x` over positive pairs; at least 5
/// points required.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult, VerifyError> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 5 {
        return Err(VerifyError::InsufficientData { needed: 5, got: logs.len() });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(FitResult {
        slope,
        intercept: my - slope * mx,
        r_squared,
        n_points: logs.len(),
    })
}

/// Fit `ln |residual|` against `ln q` over the report rows with `q ≥ q_min`;
/// for prime sweeps the slope estimates the residual's growth exponent.
pub fn fit_error_exponent(rows: &[ReportRow], q_min: u64) -> Result<FitResult, VerifyError> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.q >= q_min)
        .map(|r| (r.q as f64, r.residual_abs()))
        .collect();
    fit_power_law(&pts)
}

// ---------------------------------------------------------------------------
// Divisor-component expansion probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct HbProbeRow {
    pub k: u64,
    /// Exact component, recovered from character moments.
    pub component: f64,
    /// Smooth expansion `k ln k + A k + B √k`.
    pub expansion: f64,
    /// `component − expansion` — the unexplained remainder `R(k)`.
    pub deviation: f64,
}

/// Outcome of probing the remainder `R(k)` for its limiting constant and
/// decay power.
#[derive(Debug, Clone, Serialize)]
pub struct HbProbe {
    pub rows: Vec<HbProbeRow>,
    /// Pairwise extrapolations of `lim R(k)` assuming `R = c₀ + c k^{-1/2}`.
    pub c0_half: Vec<f64>,
    /// Same assuming `R = c₀ + c k^{-1}`.
    pub c0_one: Vec<f64>,
    /// `0.5` or `1.0` — whichever model's extrapolations cluster tighter.
    pub detected_power: f64,
    /// Median extrapolated constant under the detected model.
    pub c0_estimate: f64,
    /// Max−min spread of the extrapolations under the detected model.
    pub c0_spread: f64,
}

/// Measure `R(k) = component(k) − expansion(k)` over `k_list` (ascending,
/// at least 3 entries) and extrapolate its limit under the two candidate
/// decay powers `k^{-1/2}` and `k^{-1}`.
pub fn hb_expansion_probe(k_list: &[u64]) -> HbProbe {
    assert!(k_list.len() >= 3, "need at least 3 moduli to extrapolate");
    assert!(k_list.windows(2).all(|w| w[0] < w[1]), "k_list must be ascending");
    let rows: Vec<HbProbeRow> = k_list
        .iter()
        .map(|&k| {
            let component = divisor_component(k);
            let expansion = hb_main(k);
            HbProbeRow { k, component, expansion, deviation: component - expansion }
        })
        .collect();
    // Two-point elimination of c·k^{-θ} on consecutive grid points:
    // c₀ = (R_j x_i − R_i x_j)/(x_i − x_j) with x = k^{-θ}.
    let extrapolate = |theta: f64| -> Vec<f64> {
        rows.windows(2)
            .map(|w| {
                let (xi, xj) = ((w[0].k as f64).powf(-theta), (w[1].k as f64).powf(-theta));
                (w[1].deviation * xi - w[0].deviation * xj) / (xi - xj)
            })
            .collect()
    };
    let c0_half = extrapolate(0.5);
    let c0_one = extrapolate(1.0);
    let spread = |v: &[f64]| -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &x in v {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        hi - lo
    };
    let (detected_power, best) = if spread(&c0_half) <= spread(&c0_one) {
        (0.5, &c0_half)
    } else {
        (1.0, &c0_one)
    };
    let c0_estimate = median(best);
    let c0_spread = spread(best);
    HbProbe { rows, c0_half, c0_one, detected_power, c0_estimate, c0_spread }
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite estimates"));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

// ---------------------------------------------------------------------------
// Reciprocity probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ReciprocityRow {
    pub h: u64,
    pub p: u64,
    /// Direct twisted moment `S(p,h)`.
    pub s_ph: f64,
    /// Companion twisted moment `S(h,−p)`.
    pub s_h_neg_p: f64,
    /// Closed-form right side built from the companion.
    pub rhs: f64,
    pub residual: f64,
    /// Envelope `h + ln p + √(p/h) ln p` of the dropped terms.
    pub bound_scale: f64,
    /// `|residual| / bound_scale`.
    pub ratio: f64,
    /// `h ≥ p^{2/3}`: past this point the comparison stops being sharp.
    pub beyond_two_thirds: bool,
}

/// Compare `S(p,h)` against its reciprocity right side for each `(h, p)`
/// pair (`h < p`, both prime).
pub fn reciprocity_probe(pairs: &[(u64, u64)]) -> Vec<ReciprocityRow> {
    pairs
        .iter()
        .map(|&(h, p)| {
            let s_ph = twisted_moment(p, h as i64);
            let s_h_neg_p = twisted_moment(h, -(p as i64));
            let rhs = reciprocity_rhs(p, h, s_h_neg_p);
            let residual = s_ph - rhs;
            let bound_scale = reciprocity_error_scale(p, h);
            ReciprocityRow {
                h,
                p,
                s_ph,
                s_h_neg_p,
                rhs,
                residual,
                bound_scale,
                ratio: residual.abs() / bound_scale,
                beyond_two_thirds: (h as f64) >= (p as f64).powf(2.0 / 3.0),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Kernel probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct KernelProbeCell {
    pub label: String,
    /// Measured discrepancy.
    pub delta: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Empty on success; the failure reason otherwise.
    pub note: String,
}

/// The fixed shift matrix used by the kernel cross-validations: one real
/// pair, one imaginary pair, one pair with a vanishing component.
pub fn standard_shift_pairs() -> [(Complex64, Complex64); 3] {
    [
        (Complex64::new(0.01, 0.0), Complex64::new(0.02, 0.0)),
        (Complex64::new(0.0, 0.01), Complex64::new(0.0, -0.005)),
        (Complex64::new(0.02, 0.0), Complex64::new(0.0, 0.0)),
    ]
}

/// Cross-validate the closed-form kernel transform values against direct
/// oscillatory quadrature over the standard shift matrix, plus cheap
/// structural cells (the `δ=0` value `π`, contour independence, and the
/// degenerate reflection factor).
///
/// The quadrature cells integrate the kernel pair sum to the certified-tail
/// tolerance and take a few seconds each.
pub fn kernel_probe() -> Vec<KernelProbeCell> {
    kernel_probe_with(true)
}

/// [`kernel_probe`] with the slow quadrature cells optional; with
/// `include_quadrature = false` only the structural cells run (milliseconds).
pub fn kernel_probe_with(include_quadrature: bool) -> Vec<KernelProbeCell> {
    let mut cells = Vec::new();

    // δ=0 closed form equals π for every shift pair.
    let mut worst = 0.0f64;
    for &(a, b) in &standard_shift_pairs() {
        worst = worst.max((script_k(Complex64::new(0.0, 0.0), a, b) - PI).norm());
    }
    cells.push(KernelProbeCell {
        label: "closed form at delta=0 equals pi (all shift pairs)".into(),
        delta: worst,
        tolerance: 1e-12,
        pass: worst < 1e-12,
        note: String::new(),
    });

    // Contour independence of the kernel inverse transform.
    let mut worst = 0.0f64;
    for &x in &[2.0, 10.0] {
        let a = Complex64::new(0.01, 0.0);
        let b = Complex64::new(0.02, 0.0);
        let k1 = kernel_k_on_contour(x, a, b, 1.0);
        let k2 = kernel_k_on_contour(x, a, b, 2.0);
        worst = worst.max((k1 - k2).norm() / k1.norm());
    }
    cells.push(KernelProbeCell {
        label: "kernel value independent of contour line".into(),
        delta: worst,
        tolerance: 1e-10,
        pass: worst < 1e-10,
        note: String::new(),
    });

    // Quadrature vs closed form at the two identities.
    if include_quadrature {
        for &(a, b) in &standard_shift_pairs() {
            for (tag, delta_shift) in [
                ("delta=0", Complex64::new(0.0, 0.0)),
                ("delta=-alpha-beta", -a - b),
            ] {
                let closed = script_k(delta_shift, a, b);
                let label =
                    format!("quadrature vs closed form, alpha={a}, beta={b}, {tag}");
                match script_k_quadrature(delta_shift, a, b, OSC_QUAD_TOL) {
                    Ok(quad) => {
                        let delta = (quad - closed).norm();
                        cells.push(KernelProbeCell {
                            label,
                            delta,
                            tolerance: OSC_QUAD_TOL,
                            pass: delta < OSC_QUAD_TOL,
                            note: String::new(),
                        });
                    }
                    Err(e) => cells.push(KernelProbeCell {
                        label,
                        delta: f64::NAN,
                        tolerance: OSC_QUAD_TOL,
                        pass: false,
                        note: e.to_string(),
                    }),
                }
            }
        }
    }

    // The reflection factor degenerates to 1 on the diagonal β = −α.
    let a = Complex64::new(0.013, 0.004);
    let delta = (x_plus(101, a, -a) - 1.0).norm();
    cells.push(KernelProbeCell {
        label: "reflection factor equals 1 at beta=-alpha".into(),
        delta,
        tolerance: 1e-12,
        pass: delta < 1e-12,
        note: String::new(),
    });

    cells
}
