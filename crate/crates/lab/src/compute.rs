//! Threaded versions of the core scans and samplers.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use qmf_core::dist::{
    collect_pushforward, ecdf, EmpiricalSample, Normalization, Pushforward, PushforwardConfig, PushforwardEvaluator,
    Scanner,
};
use qmf_core::forms::Form;
use qmf_core::Result;

use crate::io::{Table, ECDF_SCHEMA};
use crate::parallel::par_map;

/// [`qmf_core::dist::scan_form`], with the residues split across threads.
pub fn scan(form: &Form, q: u64, norm: Normalization) -> Result<EmpiricalSample> {
    let scanner = Scanner::new(form, q, norm)?;
    let residues = scanner.residues();
    let values = par_map(&residues, |&a| scanner.value(a)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalSample { values, meta: scanner.meta() })
}

/// [`qmf_core::dist::sample_pushforward`], with the streams split across
/// threads. Streams are seeded by index, so the result does not depend on
/// the thread count.
pub fn pushforward(form: &Form, cfg: &PushforwardConfig) -> Result<Pushforward> {
    let eval = PushforwardEvaluator::new(form)?;
    let capped = Arc::new(AtomicUsize::new(0));
    let indices: Vec<u64> = (0..cfg.n as u64).collect();
    let results = par_map(&indices, |&i| eval.eval_index(cfg, i, capped.clone()));
    collect_pushforward(form, cfg, results, capped.load(Ordering::Relaxed))
}

/// The jumps `(t, F(t))` of the empirical CDF of the projection at `angle`.
pub fn ecdf_table(sample: &EmpiricalSample, angle: f64) -> Result<Table> {
    let f = ecdf(sample, angle)?;
    let pts = f.points();
    let n = pts.len() as f64;
    let mut t = Table::new(ECDF_SCHEMA, &["t", "F"]);
    for (i, &x) in pts.iter().enumerate() {
        if pts.get(i + 1) != Some(&x) {
            t.push(vec![x, (i + 1) as f64 / n]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmf_core::dist::{sample_pushforward, scan_form};

    #[test]
    fn parallel_matches_serial() {
        let form = Form::from_id("cotangent", &[("a", "-2")]).unwrap();
        let a = scan(&form, 101, Normalization::Raw).unwrap();
        let b = scan_form(&form, 101, Normalization::Raw).unwrap();
        assert_eq!(a.values, b.values);
        let cfg = PushforwardConfig { n: 40, ..Default::default() };
        let p = pushforward(&form, &cfg).unwrap();
        let s = sample_pushforward(&form, &cfg).unwrap();
        assert_eq!(p.sample.values, s.sample.values);
        assert_eq!(p.failures, s.failures);
    }

    #[test]
    fn ecdf_jumps() {
        let form = Form::from_id("cotangent", &[("a", "3")]).unwrap();
        let s = scan(&form, 7, Normalization::Raw).unwrap();
        let t = ecdf_table(&s, 0.0).unwrap();
        assert_eq!(t.rows, vec![vec![0.0, 1.0]]);
    }
}
