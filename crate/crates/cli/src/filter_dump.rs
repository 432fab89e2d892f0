use cheblanczos::{build_filter, DegreeRule, Error, SpectralBounds};
use serde::{Deserialize, Serialize};

/// Coefficients and samples of a filter over its spectral bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterDump {
    pub interval: [f64; 2],
    pub bounds: [f64; 2],
    pub degree: usize,
    pub degree_clamped: bool,
    pub coefficients: Vec<f64>,
    /// `(x, p(x))` on an even grid over the bounds.
    pub samples: Vec<[f64; 2]>,
}

pub fn dump_filter(
    lo: f64,
    hi: f64,
    bounds: (f64, f64),
    rule: DegreeRule,
    samples: usize,
) -> Result<FilterDump, Error> {
    let b = SpectralBounds::new(bounds.0, bounds.1)?;
    let f = build_filter(&b, lo, hi, rule)?;
    let points = samples.max(2);
    let samples = (0..points)
        .map(|k| {
            let x = bounds.0 + (bounds.1 - bounds.0) * k as f64 / (points - 1) as f64;
            [x, f.evaluate_scalar(x)]
        })
        .collect();
    Ok(FilterDump {
        interval: [lo, hi],
        bounds: [bounds.0, bounds.1],
        degree: f.degree(),
        degree_clamped: f.degree_clamped(),
        coefficients: f.coefficients().to_vec(),
        samples,
    })
}

impl FilterDump {
    /// `x,p` lines after a commented header carrying the degree.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "p"])?;
        for [x, p] in &self.samples {
            w.write_record([x.to_string(), p.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        let body = String::from_utf8(bytes).expect("csv output is utf-8");
        Ok(format!("# degree {}\n{body}", self.degree))
    }
}
