//! Empirical fidelity model and its calibration.
//!
//! `F(n, m) = 2^{−λ·m(3n − √n)/2 − γ·n}`. The model is log-linear in
//! `(λ, γ)`, so fitting is ordinary (optionally weighted) least squares of
//! `−log₂ f_xeb` on the columns `[m(3n − √n)/2, n]`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::circuits::GateCounts;

/// Two-qubit gate error of the reference device at `ε = 1`.
pub const REFERENCE_TWO_QUBIT_ERROR: f64 = 0.0036;

/// Year-over-year error decay factor of the reference trend.
pub const REFERENCE_DECAY_PER_YEAR: f64 = 0.77;

#[derive(Debug, thiserror::Error)]
pub enum FidError {
    #[error("error rate {0} is not in [0, 1)")]
    BadRate(f64),
    #[error("need at least {need} records for a rank-2 design matrix, got {got}")]
    TooFewRecords { need: usize, got: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("record {index}: f_xeb = {value} is not in (0, 1]")]
    BadFidelity { index: usize, value: f64 },
    #[error("record {index}: weight {value} is not positive")]
    BadWeight { index: usize, value: f64 },
    #[error("record {index}: n must be at least 1")]
    BadWidth { index: usize },
    #[error("scale factor must be non-negative, got {0}")]
    BadEpsilon(f64),
    #[error("trend record {index}: error {value} is not positive")]
    BadTrendValue { index: usize, value: f64 },
    #[error("trend years must be finite and not all equal")]
    DegenerateYears,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityParams {
    pub lambda: f64,
    pub gamma: f64,
    /// Covariance of `(λ, γ)`, row-major.
    pub covariance: [[f64; 2]; 2],
}

impl FidelityParams {
    pub fn new(lambda: f64, gamma: f64) -> Self {
        FidelityParams { lambda, gamma, covariance: [[0.0; 2]; 2] }
    }

    /// Reference calibration: `λ = 0.0043 ± 0.0008`, `γ = 0.042 ± 0.017` at
    /// two standard deviations, taken as uncorrelated.
    pub fn sycamore() -> Self {
        let (sl, sg) = (0.0008 / 2.0, 0.017 / 2.0);
        FidelityParams { lambda: 0.0043, gamma: 0.042, covariance: [[sl * sl, 0.0], [0.0, sg * sg]] }
    }

    pub fn lambda_std(&self) -> f64 {
        self.covariance[0][0].max(0.0).sqrt()
    }

    pub fn gamma_std(&self) -> f64 {
        self.covariance[1][1].max(0.0).sqrt()
    }
}

/// Coefficient of `λ` in the exponent: `m(3n − √n)/2`.
pub fn cycle_term(n: f64, m: f64) -> f64 {
    m * (3.0 * n - n.sqrt()) / 2.0
}

/// `−log₂ F`.
pub fn log2_inverse_fidelity(params: &FidelityParams, n: f64, m: f64) -> f64 {
    params.lambda * cycle_term(n, m) + params.gamma * n
}

pub fn predict_fidelity(params: &FidelityParams, n: usize, m: usize) -> f64 {
    2f64.powf(-log2_inverse_fidelity(params, n as f64, m as f64))
}

/// Gate-class error rates for the product-of-survivals estimate.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GateLevelErrors {
    pub single_qubit: f64,
    pub two_qubit: f64,
    /// Per-qubit preparation and readout error.
    pub qubit: f64,
}

impl GateLevelErrors {
    fn check(&self) -> Result<(), FidError> {
        for r in [self.single_qubit, self.two_qubit, self.qubit] {
            if !(0.0..1.0).contains(&r) {
                return Err(FidError::BadRate(r));
            }
        }
        Ok(())
    }
}

/// `∏_gates (1 − e_g) · ∏_qubits (1 − e_q)`.
pub fn predict_fidelity_gatewise(errors: &GateLevelErrors, counts: GateCounts, n: usize) -> Result<f64, FidError> {
    errors.check()?;
    let ln = counts.single as f64 * (-errors.single_qubit).ln_1p()
        + counts.two_qubit as f64 * (-errors.two_qubit).ln_1p()
        + n as f64 * (-errors.qubit).ln_1p();
    Ok(ln.exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub n: usize,
    pub m: usize,
    pub f_xeb: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FidelityDataset {
    pub records: Vec<FidelityRecord>,
}

impl FidelityDataset {
    pub fn validate(&self) -> Result<(), FidError> {
        for (index, r) in self.records.iter().enumerate() {
            if r.n == 0 {
                return Err(FidError::BadWidth { index });
            }
            if !(r.f_xeb > 0.0 && r.f_xeb <= 1.0) {
                return Err(FidError::BadFidelity { index, value: r.f_xeb });
            }
            if let Some(w) = r.weight {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(FidError::BadWeight { index, value: w });
                }
            }
        }
        Ok(())
    }
}

pub fn read_dataset_csv<R: Read>(input: R) -> Result<FidelityDataset, FidError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let records = r.deserialize().collect::<Result<Vec<FidelityRecord>, _>>()?;
    let ds = FidelityDataset { records };
    ds.validate()?;
    Ok(ds)
}

pub fn write_dataset_csv<W: Write>(ds: &FidelityDataset, out: W) -> Result<(), FidError> {
    let weighted = ds.records.iter().any(|r| r.weight.is_some());
    let mut w = csv::Writer::from_writer(out);
    if weighted {
        w.write_record(["n", "m", "f_xeb", "weight"])?;
    } else {
        w.write_record(["n", "m", "f_xeb"])?;
    }
    for r in &ds.records {
        let mut row = vec![r.n.to_string(), r.m.to_string(), r.f_xeb.to_string()];
        if weighted {
            row.push(r.weight.unwrap_or(1.0).to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub lambda: f64,
    pub gamma: f64,
    pub covariance: [[f64; 2]; 2],
    /// `−log₂ f_xeb − model` per record, in input order.
    pub residuals: Vec<f64>,
    pub residual_rms: f64,
    pub n_records: usize,
}

impl FitReport {
    pub fn params(&self) -> FidelityParams {
        FidelityParams { lambda: self.lambda, gamma: self.gamma, covariance: self.covariance }
    }

    pub fn to_json(&self) -> Result<String, FidError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Weighted least squares of `−log₂ f_xeb` on `[m(3n − √n)/2, n]`.
///
/// Covariance is `s²(XᵀWX)⁻¹` with `s²` the weighted residual variance on
/// `N − 2` degrees of freedom; with exactly two records it is zero.
pub fn fit(ds: &FidelityDataset) -> Result<FitReport, FidError> {
    ds.validate()?;
    let len = ds.records.len();
    if len < 2 {
        return Err(FidError::TooFewRecords { need: 2, got: len });
    }
    let mut x = DMatrix::<f64>::zeros(len, 2);
    let mut y = DVector::<f64>::zeros(len);
    let mut sw = DVector::<f64>::zeros(len);
    for (i, r) in ds.records.iter().enumerate() {
        let w = r.weight.unwrap_or(1.0).sqrt();
        sw[i] = w;
        x[(i, 0)] = w * cycle_term(r.n as f64, r.m as f64);
        x[(i, 1)] = w * r.n as f64;
        y[i] = w * -r.f_xeb.log2();
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.rank(smax * 1e-10) < 2 {
        return Err(FidError::RankDeficient);
    }
    let beta = svd.solve(&y, smax * 1e-12).map_err(|_| FidError::RankDeficient)?;
    let weighted_res = &y - &x * &beta;
    let residuals: Vec<f64> = weighted_res.iter().zip(sw.iter()).map(|(r, w)| r / w).collect();
    let residual_rms = (residuals.iter().map(|r| r * r).sum::<f64>() / len as f64).sqrt();

    let dof = len - 2;
    let covariance = if dof == 0 {
        [[0.0; 2]; 2]
    } else {
        let s2 = weighted_res.norm_squared() / dof as f64;
        let xtx: Matrix2<f64> = (x.transpose() * &x).fixed_view::<2, 2>(0, 0).into_owned();
        let inv = xtx.try_inverse().ok_or(FidError::RankDeficient)?;
        [[s2 * inv[(0, 0)], s2 * inv[(0, 1)]], [s2 * inv[(1, 0)], s2 * inv[(1, 1)]]]
    };
    Ok(FitReport { lambda: beta[0], gamma: beta[1], covariance, residuals, residual_rms, n_records: len })
}

/// `(λ, γ) → (ελ, εγ)`, covariance scaled by `ε²`.
pub fn scale_error(params: &FidelityParams, epsilon: f64) -> Result<FidelityParams, FidError> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(FidError::BadEpsilon(epsilon));
    }
    let e2 = epsilon * epsilon;
    let c = params.covariance;
    Ok(FidelityParams {
        lambda: params.lambda * epsilon,
        gamma: params.gamma * epsilon,
        covariance: [[c[0][0] * e2, c[0][1] * e2], [c[1][0] * e2, c[1][1] * e2]],
    })
}

/// A device obtained by scaling every reference error rate by `epsilon`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub epsilon: f64,
    pub params: FidelityParams,
    pub two_qubit_error: f64,
}

impl ErrorProfile {
    pub fn scaled(base: &FidelityParams, epsilon: f64) -> Result<Self, FidError> {
        Ok(ErrorProfile {
            epsilon,
            params: scale_error(base, epsilon)?,
            two_qubit_error: epsilon * REFERENCE_TWO_QUBIT_ERROR,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendRecord {
    pub year: f64,
    pub two_qubit_error: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorTrend {
    pub records: Vec<TrendRecord>,
}

pub fn read_trend_csv<R: Read>(input: R) -> Result<ErrorTrend, FidError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let records = r.deserialize().collect::<Result<Vec<TrendRecord>, _>>()?;
    Ok(ErrorTrend { records })
}

pub fn write_trend_csv<W: Write>(trend: &ErrorTrend, out: W) -> Result<(), FidError> {
    let mut w = csv::Writer::from_writer(out);
    for r in &trend.records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    /// Fitted multiplicative change in error per year.
    pub decay_per_year: f64,
    pub reference_year: f64,
    pub target_year: f64,
    /// Error at `target_year` relative to the fitted error at `reference_year`.
    pub epsilon: f64,
}

/// Least squares of `ln(error)` against year. The reference year defaults
/// to the latest year in the data.
pub fn extrapolate_error(trend: &ErrorTrend, target_year: f64, reference_year: Option<f64>) -> Result<Extrapolation, FidError> {
    let recs = &trend.records;
    if recs.len() < 2 {
        return Err(FidError::TooFewRecords { need: 2, got: recs.len() });
    }
    for (index, r) in recs.iter().enumerate() {
        if !(r.two_qubit_error > 0.0 && r.two_qubit_error.is_finite()) {
            return Err(FidError::BadTrendValue { index, value: r.two_qubit_error });
        }
        if !r.year.is_finite() {
            return Err(FidError::DegenerateYears);
        }
    }
    let years: BTreeMap<u64, ()> = recs.iter().map(|r| (r.year.to_bits(), ())).collect();
    if years.len() < 2 {
        return Err(FidError::DegenerateYears);
    }
    let count = recs.len() as f64;
    let my = recs.iter().map(|r| r.year).sum::<f64>() / count;
    let ml = recs.iter().map(|r| r.two_qubit_error.ln()).sum::<f64>() / count;
    let sxy: f64 = recs.iter().map(|r| (r.year - my) * (r.two_qubit_error.ln() - ml)).sum();
    let sxx: f64 = recs.iter().map(|r| (r.year - my).powi(2)).sum();
    let slope = sxy / sxx;
    let reference_year = reference_year.unwrap_or_else(|| recs.iter().map(|r| r.year).fold(f64::MIN, f64::max));
    let decay_per_year = slope.exp();
    Ok(Extrapolation {
        decay_per_year,
        reference_year,
        target_year,
        epsilon: (slope * (target_year - reference_year)).exp(),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand::Rng;

    use super::*;
    use crate::circuits::{count_gates, generate_circuit, GateSetConfig, QubitGrid};

    fn synthetic(lambda: f64, gamma: f64) -> FidelityDataset {
        let mut records = Vec::new();
        for n in [12, 20, 30, 40, 53] {
            for m in [12, 14, 16, 18, 20] {
                let f = predict_fidelity(&FidelityParams::new(lambda, gamma), n, m);
                records.push(FidelityRecord { n, m, f_xeb: f, weight: None });
            }
        }
        FidelityDataset { records }
    }

    #[test]
    fn reference_predictions() {
        let p = FidelityParams::sycamore();
        let e20 = log2_inverse_fidelity(&p, 53.0, 20.0);
        assert!((e20 - 8.75).abs() < 0.01, "{e20}");
        assert!((predict_fidelity(&p, 53, 20) - 2.32e-3).abs() < 0.02e-3);
        let e14 = log2_inverse_fidelity(&p, 53.0, 14.0);
        assert!((e14 - 6.79).abs() < 0.01, "{e14}");
        assert!((predict_fidelity(&p, 53, 14) - 9.0e-3).abs() < 0.1e-3);
        assert!((p.lambda_std() * 2.0 - 0.0008).abs() < 1e-15);
        assert!((p.gamma_std() * 2.0 - 0.017).abs() < 1e-15);
    }

    #[test]
    fn zero_depth_zero_gamma_is_perfect() {
        let p = FidelityParams::new(0.01, 0.0);
        for n in [1, 7, 53, 1000] {
            assert_eq!(predict_fidelity(&p, n, 0), 1.0);
        }
    }

    #[test]
    fn gatewise_products() {
        let zero = GateLevelErrors::default();
        let c = GateCounts { single: 10, two_qubit: 5 };
        assert_eq!(predict_fidelity_gatewise(&zero, c, 4).unwrap(), 1.0);
        let half = GateLevelErrors { single_qubit: 0.5, ..Default::default() };
        let f = predict_fidelity_gatewise(&half, GateCounts { single: 2, two_qubit: 0 }, 0).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
        assert!(predict_fidelity_gatewise(&GateLevelErrors { two_qubit: 1.0, ..Default::default() }, c, 1).is_err());
        assert!(predict_fidelity_gatewise(&GateLevelErrors { qubit: -0.1, ..Default::default() }, c, 1).is_err());
    }

    #[test]
    fn gatewise_from_circuit_counts() {
        let circuit = generate_circuit(QubitGrid::new(6, 9).unwrap(), 14, &GateSetConfig::default(), 0).unwrap();
        let counts = count_gates(&circuit);
        let e = GateLevelErrors { two_qubit: REFERENCE_TWO_QUBIT_ERROR, ..Default::default() };
        let f = predict_fidelity_gatewise(&e, counts, 54).unwrap();
        let expect = (1.0 - REFERENCE_TWO_QUBIT_ERROR).powi(counts.two_qubit as i32);
        assert!((f - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn gatewise_first_order_matches_exponent() {
        let e = GateLevelErrors { single_qubit: 0.001, two_qubit: 0.005, qubit: 0.003 };
        let c = GateCounts { single: 700, two_qubit: 300 };
        let n = 53;
        let exact = -predict_fidelity_gatewise(&e, c, n).unwrap().log2();
        let linear = (700.0 * 0.001 + 300.0 * 0.005 + 53.0 * 0.003) / std::f64::consts::LN_2;
        assert!((exact - linear).abs() / linear < 0.05);
    }

    #[test]
    fn noiseless_fit_is_exact() {
        let r = fit(&synthetic(0.004, 0.04)).unwrap();
        assert!((r.lambda - 0.004).abs() < 1e-12);
        assert!((r.gamma - 0.04).abs() < 1e-12);
        assert!(r.residual_rms < 1e-12);
        assert_eq!(r.residuals.len(), 25);
    }

    #[test]
    fn two_record_fit_has_zero_covariance() {
        let mut ds = synthetic(0.005, 0.03);
        ds.records.truncate(2);
        ds.records[1].n = 30;
        ds.records[1].f_xeb = predict_fidelity(&FidelityParams::new(0.005, 0.03), 30, ds.records[1].m);
        let r = fit(&ds).unwrap();
        assert_eq!(r.covariance, [[0.0; 2]; 2]);
        assert!((r.lambda - 0.005).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit(&FidelityDataset::default()), Err(FidError::TooFewRecords { .. })));
        let dup = FidelityDataset {
            records: vec![
                FidelityRecord { n: 20, m: 14, f_xeb: 0.1, weight: None },
                FidelityRecord { n: 20, m: 14, f_xeb: 0.12, weight: None },
                FidelityRecord { n: 20, m: 14, f_xeb: 0.11, weight: None },
            ],
        };
        // A single distinct (n, m) gives a rank-1 design.
        assert!(matches!(fit(&dup), Err(FidError::RankDeficient)));
        let bad = FidelityDataset { records: vec![FidelityRecord { n: 20, m: 14, f_xeb: 0.0, weight: None }; 3] };
        assert!(matches!(fit(&bad), Err(FidError::BadFidelity { .. })));
        let badw = FidelityDataset { records: vec![FidelityRecord { n: 20, m: 14, f_xeb: 0.5, weight: Some(-1.0) }; 3] };
        assert!(matches!(fit(&badw), Err(FidError::BadWeight { .. })));
    }

    #[test]
    fn weights_change_the_fit() {
        let mut ds = synthetic(0.004, 0.04);
        ds.records[0].f_xeb *= 0.5;
        let plain = fit(&ds).unwrap();
        ds.records[0].weight = Some(1e-6);
        for r in ds.records.iter_mut().skip(1) {
            r.weight = Some(1.0);
        }
        let weighted = fit(&ds).unwrap();
        assert!((weighted.lambda - 0.004).abs() < (plain.lambda - 0.004).abs());
    }

    #[test]
    fn noisy_fit_covariance_is_calibrated() {
        // Across trials the spread of λ̂ should match the reported σ.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let truth = FidelityParams::new(0.004, 0.04);
        let mut z2 = 0.0;
        let trials = 200;
        for _ in 0..trials {
            let mut ds = synthetic(truth.lambda, truth.gamma);
            for r in &mut ds.records {
                let g: f64 = (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0;
                r.f_xeb *= (0.05 * g).exp();
            }
            let rep = fit(&ds).unwrap();
            z2 += ((rep.lambda - truth.lambda) / rep.params().lambda_std()).powi(2);
        }
        let mean_z2 = z2 / trials as f64;
        assert!((0.7..1.4).contains(&mean_z2), "{mean_z2}");
    }

    #[test]
    fn dataset_csv_round_trip() {
        let text = "n,m,f_xeb\n12,14,0.5\n20,16,0.25\n";
        let ds = read_dataset_csv(text.as_bytes()).unwrap();
        assert_eq!(ds.records.len(), 2);
        let mut out = Vec::new();
        write_dataset_csv(&ds, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);

        let weighted = "n,m,f_xeb,weight\n12,14,0.5,2\n20,16,0.25,1\n";
        let ds = read_dataset_csv(weighted.as_bytes()).unwrap();
        assert_eq!(ds.records[0].weight, Some(2.0));
        let mut out = Vec::new();
        write_dataset_csv(&ds, &mut out).unwrap();
        assert_eq!(read_dataset_csv(&out[..]).unwrap(), ds);

        assert!(read_dataset_csv("n,m,f_xeb\n12,14,1.5\n".as_bytes()).is_err());
        assert!(read_dataset_csv("n,m,f_xeb\n12,x,0.5\n".as_bytes()).is_err());
    }

    #[test]
    fn report_json_fields() {
        let r = fit(&synthetic(0.004, 0.04)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        for key in ["lambda", "gamma", "covariance", "residual_rms"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn scaling() {
        let p = FidelityParams::sycamore();
        assert_eq!(scale_error(&p, 1.0).unwrap(), p);
        let s = scale_error(&p, 2.0).unwrap();
        assert_eq!(s.lambda, 2.0 * p.lambda);
        assert_eq!(s.covariance[1][1], 4.0 * p.covariance[1][1]);
        assert_eq!(scale_error(&p, 0.0).unwrap().lambda, 0.0);
        assert!(scale_error(&p, -1.0).is_err());
        assert!(scale_error(&p, f64::NAN).is_err());
        let hi = ErrorProfile::scaled(&p, 2.8).unwrap();
        assert!((hi.two_qubit_error - 0.01).abs() < 2e-4);
        let lo = ErrorProfile::scaled(&p, 0.28).unwrap();
        assert!((lo.two_qubit_error - 0.001).abs() < 2e-5);
    }

    #[test]
    fn extrapolation() {
        let halving = ErrorTrend {
            records: vec![
                TrendRecord { year: 2019.0, two_qubit_error: 0.01 },
                TrendRecord { year: 2020.0, two_qubit_error: 0.005 },
            ],
        };
        let e = extrapolate_error(&halving, 2021.0, None).unwrap();
        assert!((e.decay_per_year - 0.5).abs() < 1e-12);
        assert_eq!(e.reference_year, 2020.0);
        assert!((e.epsilon - 0.5).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let recs = (0..12)
            .map(|i| {
                let year = 2008.0 + i as f64;
                let noise = 1.0 + 0.02 * (rng.random::<f64>() - 0.5);
                TrendRecord { year, two_qubit_error: 0.05 * 0.77f64.powf(year - 2008.0) * noise }
            })
            .collect();
        let e = extrapolate_error(&ErrorTrend { records: recs }, 2024.0, Some(2019.0)).unwrap();
        assert!((e.decay_per_year - 0.77).abs() < 0.01);
        assert!((e.epsilon - 0.77f64.powi(5)).abs() < 0.02);
        assert!((0.77f64.powi(5) - 0.27).abs() < 0.005);

        let one = ErrorTrend { records: vec![TrendRecord { year: 2019.0, two_qubit_error: 0.01 }] };
        assert!(extrapolate_error(&one, 2020.0, None).is_err());
        let same = ErrorTrend { records: vec![TrendRecord { year: 2019.0, two_qubit_error: 0.01 }; 2] };
        assert!(matches!(extrapolate_error(&same, 2020.0, None), Err(FidError::DegenerateYears)));
        let neg = ErrorTrend {
            records: vec![
                TrendRecord { year: 2019.0, two_qubit_error: 0.01 },
                TrendRecord { year: 2020.0, two_qubit_error: 0.0 },
            ],
        };
        assert!(matches!(extrapolate_error(&neg, 2020.0, None), Err(FidError::BadTrendValue { .. })));
    }

    #[test]
    fn trend_csv_round_trip() {
        let text = "year,two_qubit_error\n2019.0,0.0036\n2020.5,0.003\n";
        let t = read_trend_csv(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_trend_csv(&t, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    proptest! {
        #[test]
        fn fit_recovers_any_positive_params(l in 1e-4f64..0.05, g in 1e-4f64..0.2) {
            let r = fit(&synthetic(l, g)).unwrap();
            prop_assert!((r.lambda - l).abs() < 1e-10 * l.max(1e-3));
            prop_assert!((r.gamma - g).abs() < 1e-10 * g.max(1e-3));
        }

        #[test]
        fn fidelity_decreases_in_n_and_m(l in 1e-4f64..0.05, g in 1e-4f64..0.2, n in 1usize..500, m in 0usize..500) {
            let p = FidelityParams::new(l, g);
            let f = predict_fidelity(&p, n, m);
            prop_assert!(f > 0.0 || f == 0.0 && log2_inverse_fidelity(&p, n as f64, m as f64) > 1000.0);
            prop_assert!(f <= 1.0);
            prop_assert!(log2_inverse_fidelity(&p, (n + 1) as f64, m as f64) > log2_inverse_fidelity(&p, n as f64, m as f64));
            prop_assert!(log2_inverse_fidelity(&p, n as f64, (m + 1) as f64) > log2_inverse_fidelity(&p, n as f64, m as f64));
        }
    }
}
