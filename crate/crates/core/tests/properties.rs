use proptest::prelude::*;

use artindex::domain::{validate_dataset, Dataset, SaleObservation};
use artindex::indexes::{hpm_timedummy_index, npgm_index};
use artindex::regression::{build_design, fit, student_t_two_sided_p, ModelSpec};

fn sale() -> impl Strategy<Value = (bool, f64, f64, f64)> {
    (any::<bool>(), 1e3..1e7f64, 50.0..8000.0f64, 0.3..3.0f64)
}

/// Two-period datasets large enough for the area + ratio model.
fn dataset() -> impl Strategy<Value = Dataset> {
    prop::collection::vec(sale(), 4..18).prop_map(|rows| {
        let obs = rows
            .into_iter()
            .enumerate()
            .map(|(i, (late, price, area, ratio))| {
                // Pin the first two rows to each period so neither is empty.
                let period = match i {
                    0 | 2 => "A",
                    1 | 3 => "B",
                    _ if late => "B",
                    _ => "A",
                };
                SaleObservation::new(i.to_string(), period, price, area, ratio)
            })
            .collect();
        validate_dataset(obs, None).unwrap()
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn residuals_are_orthogonal_to_design(ds in dataset().prop_filter("df", |d| d.len() > 5)) {
        let spec = ModelSpec::area_and_ratio("A");
        let r = fit(&ds, &spec).unwrap();
        let sys = build_design(&ds, &spec).unwrap();
        for j in 0..sys.cols() {
            let col = sys.column(j);
            let dot: f64 = col.iter().zip(&r.residuals).map(|(x, e)| x * e).sum();
            let scale: f64 = col.iter().map(|x| x.abs()).sum::<f64>() * r.residuals.iter().map(|e| e.abs()).fold(0.0, f64::max);
            prop_assert!(dot.abs() <= 1e-9 * scale.max(1.0), "column {j}: {dot}");
        }
    }

    #[test]
    fn common_price_scale_moves_only_the_intercept(ds in dataset().prop_filter("df", |d| d.len() > 5), c in 0.1..50.0f64) {
        let spec = ModelSpec::area_and_ratio("A");
        let base = fit(&ds, &spec).unwrap();
        let mut scaled = ds.clone();
        for id in ds.observations().iter().map(|o| o.id.clone()).collect::<Vec<_>>() {
            scaled = scaled.with_scaled_price(&id, c).unwrap();
        }
        let moved = fit(&scaled, &spec).unwrap();
        prop_assert!(close(moved.coefficients[0], base.coefficients[0] + c.ln(), 1e-9));
        for j in 1..base.coefficients.len() {
            prop_assert!(close(moved.coefficients[j], base.coefficients[j], 1e-8));
            prop_assert!(close(moved.standard_errors[j], base.standard_errors[j], 1e-7));
        }
        prop_assert!(close(moved.r_squared, base.r_squared, 1e-8));
    }

    #[test]
    fn period_price_scale_scales_both_indexes(ds in dataset().prop_filter("df", |d| d.len() > 5), c in 0.2..20.0f64) {
        let spec = ModelSpec::area_and_ratio("A");
        let mut scaled = ds.clone();
        for o in ds.in_period("B") {
            scaled = scaled.with_scaled_price(&o.id, c).unwrap();
        }
        let npgm = (npgm_index(&ds, "A", 100.0).unwrap(), npgm_index(&scaled, "A", 100.0).unwrap());
        prop_assert!(close(npgm.1.levels["B"], c * npgm.0.levels["B"], 1e-10));
        let hpm = (
            hpm_timedummy_index(&ds, &spec, 100.0).unwrap().series,
            hpm_timedummy_index(&scaled, &spec, 100.0).unwrap().series,
        );
        prop_assert!(close(hpm.1.levels["B"], c * hpm.0.levels["B"], 1e-8));
    }

    #[test]
    fn p_value_falls_as_t_grows(t in 0.0..30.0f64, dt in 1e-3..5.0f64, df in 1u32..400) {
        let (near, far) = (student_t_two_sided_p(t, df), student_t_two_sided_p(t + dt, df));
        prop_assert!(far <= near);
        prop_assert_eq!(student_t_two_sided_p(-t, df), near);
        prop_assert!((0.0..=1.0).contains(&near));
    }
}
