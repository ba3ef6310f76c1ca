use crate::error::SwingError;

/// Scale-invariant tracking ratio: sqrt(Σ err²) / sqrt(Σ ref²) over two
/// equally long scalar series.
pub fn l2_ratio(err: &[f64], reference: &[f64]) -> Result<f64, SwingError> {
    if err.is_empty() || err.len() != reference.len() {
        return Err(SwingError::Parameter(format!(
            "series lengths {} vs {} (need equal, >= 1)",
            err.len(),
            reference.len()
        )));
    }
    let ref_norm_sq: f64 = reference.iter().map(|v| v * v).sum();
    if ref_norm_sq == 0.0 {
        return Err(SwingError::UndefinedMetric(
            "reference series is identically zero".into(),
        ));
    }
    let err_norm_sq: f64 = err.iter().map(|v| v * v).sum();
    Ok((err_norm_sq / ref_norm_sq).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error_gives_zero() {
        assert_eq!(l2_ratio(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn err_equal_ref_gives_one() {
        let r = [0.3, -1.2, 0.7];
        assert!((l2_ratio(&r, &r).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn joint_scaling_leaves_ratio_unchanged() {
        let err = [0.1, -0.2, 0.05, 0.4];
        let reference = [1.0, 0.5, -0.3, 2.0];
        let base = l2_ratio(&err, &reference).unwrap();
        for c in [2.0, -7.5, 1e-6, 1e9] {
            let se: Vec<f64> = err.iter().map(|v| v * c).collect();
            let sr: Vec<f64> = reference.iter().map(|v| v * c).collect();
            let scaled = l2_ratio(&se, &sr).unwrap();
            assert!((scaled - base).abs() <= 1e-12 * base.max(1.0));
        }
    }

    #[test]
    fn zero_reference_is_an_error() {
        assert!(matches!(
            l2_ratio(&[1.0], &[0.0]),
            Err(SwingError::UndefinedMetric(_))
        ));
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(l2_ratio(&[1.0], &[1.0, 2.0]).is_err());
        assert!(l2_ratio(&[], &[]).is_err());
    }
}
