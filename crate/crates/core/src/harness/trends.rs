//! Qualitative checks on a finished sweep of a real book corpus: whether the
//! curves move in the expected directions rather than hitting exact values.

use super::aggregate::SummaryRow;
use crate::distortion::{ModeKind, OrderKind};

#[derive(Debug, Clone, PartialEq)]
pub struct TrendCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Relative tolerance of the complexity monotonicity check.
pub const COMPLEXITY_SLACK: f64 = 0.01;

fn curve(summary: &[SummaryRow], order: OrderKind, mode: ModeKind) -> Vec<&SummaryRow> {
    let mut c: Vec<&SummaryRow> = summary
        .iter()
        .filter(|s| s.order == order && s.mode == mode)
        .collect();
    c.sort_by(|a, b| a.p.total_cmp(&b.p));
    c
}

fn check(name: &'static str, failures: Vec<String>, empty: bool) -> TrendCheck {
    let detail = if empty {
        "no data".to_string()
    } else if failures.is_empty() {
        "ok".to_string()
    } else {
        failures.join("; ")
    };
    TrendCheck {
        name,
        passed: !empty && failures.is_empty(),
        detail,
    }
}

/// Asterisk with most-frequent-first never does worse than the undistorted
/// baseline for `0 < p <= 0.9`.
pub fn asterisk_most_beats_baseline(summary: &[SummaryRow]) -> TrendCheck {
    let c = curve(summary, OrderKind::Most, ModeKind::Asterisk);
    let base = c.iter().find(|s| s.p == 0.0).and_then(|s| s.error_mean);
    let points: Vec<_> = c
        .iter()
        .filter(|s| s.p > 0.0 && s.p <= 0.9 + 1e-9)
        .collect();
    let Some(base) = base else {
        return check("asterisk/most error <= baseline", vec![], true);
    };
    let failures = points
        .iter()
        .filter_map(|s| match s.error_mean {
            Some(e) if e <= base => None,
            Some(e) => Some(format!("p={}: {e} > {base}", s.p)),
            None => Some(format!("p={}: no successful trial", s.p)),
        })
        .collect();
    check(
        "asterisk/most error <= baseline",
        failures,
        points.is_empty(),
    )
}

/// At every (order, p) present for both modes, the asterisk error mean is at
/// most the random-character one.
pub fn asterisk_beats_random_chars(summary: &[SummaryRow]) -> TrendCheck {
    let mut failures = Vec::new();
    let mut compared = 0;
    for order in OrderKind::ALL {
        let ast = curve(summary, order, ModeKind::Asterisk);
        let rnd = curve(summary, order, ModeKind::RandomChars);
        for a in &ast {
            let Some(r) = rnd.iter().find(|r| r.p == a.p) else {
                continue;
            };
            compared += 1;
            match (a.error_mean, r.error_mean) {
                (Some(x), Some(y)) if x <= y => {}
                (x, y) => failures.push(format!("{order} p={}: {x:?} > {y:?}", a.p)),
            }
        }
    }
    check(
        "asterisk error <= random-chars error",
        failures,
        compared == 0,
    )
}

/// Complexity falls (within slack) as p grows under asterisk and rises under
/// random characters.
pub fn complexity_monotone(summary: &[SummaryRow]) -> TrendCheck {
    let mut failures = Vec::new();
    let mut steps = 0;
    for order in OrderKind::ALL {
        for mode in ModeKind::ALL {
            let c = curve(summary, order, mode);
            for w in c.windows(2) {
                let (Some(prev), Some(next)) = (w[0].complexity_mean, w[1].complexity_mean) else {
                    failures.push(format!("{order}/{mode} p={}: missing", w[1].p));
                    continue;
                };
                steps += 1;
                let ok = match mode {
                    ModeKind::Asterisk => next <= prev * (1.0 + COMPLEXITY_SLACK),
                    ModeKind::RandomChars => next >= prev * (1.0 - COMPLEXITY_SLACK),
                };
                if !ok {
                    failures.push(format!("{order}/{mode} p={}: {prev} -> {next}", w[1].p));
                }
            }
        }
    }
    check("complexity monotone in p", failures, steps == 0)
}

/// Pearson correlation; `None` for fewer than two points or zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Over all asterisk points, mean complexity and mean error are negatively
/// correlated.
pub fn complexity_error_anticorrelated(summary: &[SummaryRow]) -> TrendCheck {
    let (xs, ys): (Vec<f64>, Vec<f64>) = summary
        .iter()
        .filter(|s| s.mode == ModeKind::Asterisk)
        .filter_map(|s| Some((s.complexity_mean?, s.error_mean?)))
        .unzip();
    let name = "complexity/error correlation < 0";
    match pearson(&xs, &ys) {
        Some(r) => TrendCheck {
            name,
            passed: r < 0.0,
            detail: format!("r = {r:.4} over {} points", xs.len()),
        },
        None => check(name, vec![], true),
    }
}

pub fn all_trends(summary: &[SummaryRow]) -> Vec<TrendCheck> {
    vec![
        asterisk_most_beats_baseline(summary),
        asterisk_beats_random_chars(summary),
        complexity_monotone(summary),
        complexity_error_anticorrelated(summary),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(order: OrderKind, mode: ModeKind, p: f64, err: f64, cx: f64) -> SummaryRow {
        SummaryRow {
            order,
            mode,
            p,
            trials: 1,
            failed: 0,
            error_mean: Some(err),
            error_std: Some(0.0),
            complexity_mean: Some(cx),
            complexity_std: Some(0.0),
        }
    }

    /// Curves shaped the expected way: asterisk error dips then recovers,
    /// complexity falls under asterisk and rises under random characters.
    fn good() -> Vec<SummaryRow> {
        let mut out = Vec::new();
        for order in OrderKind::ALL {
            for i in 0..=10 {
                let p = i as f64 / 10.0;
                let ast_err = if i == 0 {
                    18.0
                } else if i < 10 {
                    16.0 + p
                } else {
                    30.0
                };
                out.push(s(order, ModeKind::Asterisk, p, ast_err, 1000.0 - 900.0 * p));
                out.push(s(
                    order,
                    ModeKind::RandomChars,
                    p,
                    18.0 + 20.0 * p,
                    1000.0 + 200.0 * p,
                ));
            }
        }
        out
    }

    #[test]
    fn well_shaped_curves_pass() {
        for t in all_trends(&good()) {
            assert!(t.passed, "{t:?}");
        }
    }

    #[test]
    fn each_check_detects_its_violation() {
        let mut g = good();
        g.iter_mut()
            .filter(|r| r.order == OrderKind::Most && r.mode == ModeKind::Asterisk && r.p == 0.5)
            .for_each(|r| r.error_mean = Some(19.0));
        assert!(!asterisk_most_beats_baseline(&g).passed);
        assert!(asterisk_beats_random_chars(&g).passed);

        let mut g = good();
        g.iter_mut()
            .filter(|r| r.mode == ModeKind::RandomChars && r.p == 0.2)
            .for_each(|r| r.error_mean = Some(10.0));
        assert!(!asterisk_beats_random_chars(&g).passed);

        let mut g = good();
        g.iter_mut()
            .filter(|r| r.mode == ModeKind::Asterisk && r.p == 0.4)
            .for_each(|r| r.complexity_mean = Some(2000.0));
        assert!(!complexity_monotone(&g).passed);

        let mut g = good();
        g.iter_mut()
            .filter(|r| r.mode == ModeKind::Asterisk)
            .for_each(|r| r.error_mean = Some(r.complexity_mean.unwrap() / 100.0));
        assert!(!complexity_error_anticorrelated(&g).passed);
    }

    #[test]
    fn complexity_slack_is_one_percent() {
        let rows = vec![
            s(OrderKind::Most, ModeKind::Asterisk, 0.0, 1.0, 1000.0),
            s(OrderKind::Most, ModeKind::Asterisk, 0.1, 1.0, 1009.0),
        ];
        assert!(complexity_monotone(&rows).passed);
        let rows = vec![
            s(OrderKind::Most, ModeKind::Asterisk, 0.0, 1.0, 1000.0),
            s(OrderKind::Most, ModeKind::Asterisk, 0.1, 1.0, 1011.0),
        ];
        assert!(!complexity_monotone(&rows).passed);
    }

    #[test]
    fn pearson_known_values() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]), Some(1.0));
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12, "{r}");
        assert_eq!(pearson(&[1.0, 1.0], &[2.0, 3.0]), None);
    }

    #[test]
    fn empty_summary_fails_every_check() {
        assert!(all_trends(&[])
            .iter()
            .all(|t| !t.passed && t.detail == "no data"));
    }
}
