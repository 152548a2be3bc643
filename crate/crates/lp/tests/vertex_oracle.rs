//! Random bounded LPs checked against brute-force vertex enumeration.

use expsearch_lp::{LpModel, Row, Sense, Simplex, Status};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Case {
    upper: Vec<f64>,
    cost: Vec<f64>,
    rows: Vec<(Vec<f64>, Sense, f64)>,
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-9 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in 0..n {
            if i != k {
                let f = a[i][k] / a[k][k];
                for c in k..n {
                    a[i][c] -= f * a[k][c];
                }
                b[i] -= f * b[k];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum over all vertices of the feasible box-and-rows polytope.
fn vertex_oracle(case: &Case) -> Option<f64> {
    let n = case.cost.len();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), 0.0));
        planes.push((e, case.upper[j]));
    }
    for (a, _, rhs) in &case.rows {
        planes.push((a.clone(), *rhs));
    }
    let feasible = |x: &[f64]| {
        x.iter().zip(&case.upper).all(|(&v, &u)| v >= -1e-7 && v <= u + 1e-7)
            && case.rows.iter().all(|(a, s, rhs)| {
                let act: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                match s {
                    Sense::Le => act <= rhs + 1e-7,
                    Sense::Ge => act >= rhs - 1e-7,
                    Sense::Eq => (act - rhs).abs() <= 1e-7,
                }
            })
    };
    let mut best: Option<f64> = None;
    let k = planes.len();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if feasible(&x) {
                let obj: f64 = x.iter().zip(&case.cost).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(obj, |v: f64| v.min(obj)));
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for t in i + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn build(case: &Case, rows: usize) -> LpModel {
    let mut m = LpModel::new();
    for (u, c) in case.upper.iter().zip(&case.cost) {
        m.add_column(0.0, *u, *c);
    }
    for (a, s, rhs) in case.rows.iter().take(rows) {
        let coeffs = a.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect();
        m.add_row(Row::new(coeffs, *s, *rhs)).unwrap();
    }
    m
}

fn case_strategy() -> impl Strategy<Value = Case> {
    (2usize..=3).prop_flat_map(|n| {
        let upper = prop::collection::vec(1i32..=6, n);
        let cost = prop::collection::vec(-5i32..=5, n);
        let row = (
            prop::collection::vec(-3i32..=3, n),
            prop::sample::select(vec![Sense::Le, Sense::Ge, Sense::Eq]),
            -4i32..=8,
        );
        let rows = prop::collection::vec(row, 1..=4);
        (upper, cost, rows).prop_map(|(u, c, r)| Case {
            upper: u.into_iter().map(f64::from).collect(),
            cost: c.into_iter().map(f64::from).collect(),
            rows: r
                .into_iter()
                .map(|(a, s, b)| (a.into_iter().map(f64::from).collect(), s, f64::from(b)))
                .collect(),
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn matches_vertex_enumeration(case in case_strategy()) {
        let sol = build(&case, case.rows.len()).solve(None).unwrap();
        match vertex_oracle(&case) {
            Some(opt) => {
                prop_assert_eq!(sol.status, Status::Optimal);
                prop_assert!((sol.objective - opt).abs() < 1e-6, "simplex {} oracle {}", sol.objective, opt);
                prop_assert!(build(&case, case.rows.len()).max_violation(&sol.values) < 1e-7);
            }
            None => prop_assert_eq!(sol.status, Status::Infeasible),
        }
    }

    #[test]
    fn warm_row_addition_matches_cold_solve(case in case_strategy()) {
        let mut warm = Simplex::new(build(&case, 1));
        let mut last = f64::NEG_INFINITY;
        for k in 1..case.rows.len() {
            let first = warm.solve();
            if first.status != Status::Optimal {
                break;
            }
            prop_assert!(first.objective >= last - 1e-9);
            last = first.objective;
            let (a, s, rhs) = &case.rows[k];
            let coeffs = a.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect();
            warm.add_rows(vec![Row::new(coeffs, *s, *rhs)]).unwrap();
            let cold = build(&case, k + 1).solve(None).unwrap();
            let hot = warm.solve();
            prop_assert_eq!(hot.status, cold.status);
            if cold.status == Status::Optimal {
                prop_assert!((hot.objective - cold.objective).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn warm_bound_changes_match_cold_solve(case in case_strategy(), pick in 0usize..3, level in 0i32..=6) {
        let full = build(&case, case.rows.len());
        let mut warm = Simplex::new(full.clone());
        warm.solve();
        let col = pick % case.upper.len();
        let v = f64::from(level).min(case.upper[col]);
        warm.set_col_bounds(col, v, v).unwrap();
        let mut fixed = full.clone();
        fixed.set_bounds(col, v, v).unwrap();
        let hot = warm.solve();
        let cold = fixed.solve(None).unwrap();
        prop_assert_eq!(hot.status, cold.status);
        if cold.status == Status::Optimal {
            prop_assert!((hot.objective - cold.objective).abs() < 1e-6);
            prop_assert!(fixed.max_violation(&hot.values) < 1e-7);
        }
        warm.set_col_bounds(col, 0.0, case.upper[col]).unwrap();
        let back = warm.solve();
        let again = full.solve(None).unwrap();
        prop_assert_eq!(back.status, again.status);
        if again.status == Status::Optimal {
            prop_assert!((back.objective - again.objective).abs() < 1e-6);
        }
    }
}
