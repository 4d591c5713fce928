//! Plain-text report tables.

use std::fmt::Write;

use crate::verifier::{IdentityReport, MmsStudy, PoincareStats, SuiteReport, SweepReport};

fn rule(width: usize) -> String {
    "-".repeat(width)
}

/// One line per check: name, both sides, residual, tolerance, verdict.
pub fn identity_table(reports: &[IdentityReport]) -> String {
    let head = format!(
        "{:<32} {:>13} {:>13} {:>11} {:>11} {}",
        "check", "lhs", "rhs", "residual", "tolerance", "pass"
    );
    let mut s = String::new();
    writeln!(s, "{head}").unwrap();
    writeln!(s, "{}", rule(head.len())).unwrap();
    for r in reports {
        writeln!(s, "{r}").unwrap();
    }
    s
}

pub fn suite_table(suite: &SuiteReport) -> String {
    let mut s = format!(
        "static identity suite: {} basis elements, {} random fields\n",
        suite.basis_elements, suite.random_fields
    );
    s.push_str(&identity_table(&suite.reports));
    s.push_str(&poincare_table(&suite.poincare));
    s
}

pub fn poincare_table(p: &PoincareStats) -> String {
    let mut s = String::new();
    writeln!(s, "empirical constants over {} x-mean-free fields", p.samples).unwrap();
    writeln!(s, "  max |u_x|/|u_xx|                 {:.15e}  (bound 1/(2pi) = {:.15e})", p.ratio_x, 0.5 / std::f64::consts::PI).unwrap();
    writeln!(s, "  max |u_xy|^2/[u]_2^2             {:.15e}  (bound 1)", p.ratio_mixed).unwrap();
    writeln!(s, "  max |u|_H2^2/([u]_2^2+|u|^2)     {:.15e}", p.ratio_h2).unwrap();
    writeln!(s, "  max |u|_L3/(|u||grad u|)^(1/2)   {:.15e}  ({} fields)", p.ratio_l3, p.l3_samples).unwrap();
    s
}

pub fn sweep_table(r: &SweepReport) -> String {
    let head = format!(
        "{:>11} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "epsilon", "sup|u|^2", "sup|grad u|^2", "eps*int[u]2^2", "eps*int[gu]2^2", "gap to next"
    );
    let mut s = String::new();
    writeln!(s, "{head}").unwrap();
    writeln!(s, "{}", rule(head.len())).unwrap();
    for (i, row) in r.bound_table.iter().enumerate() {
        let gap = r
            .pairwise_gaps
            .get(i)
            .map_or_else(|| format!("{:>14}", "-"), |g| format!("{g:>14.6e}"));
        writeln!(
            s,
            "{:>11.4e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {gap}",
            row.epsilon, row.sup_l2_sq, row.sup_grad_sq, row.eps_int_semi2, row.eps_int_grad_semi2
        )
        .unwrap();
    }
    writeln!(
        s,
        "spread sup|u|^2 {:.3e}  spread sup|grad u|^2 {:.3e}  gaps strictly decreasing: {}",
        r.spread(|b| b.sup_l2_sq),
        r.spread(|b| b.sup_grad_sq),
        r.gaps_strictly_decreasing()
    )
    .unwrap();
    if let Some((eps, reason)) = &r.aborted {
        writeln!(s, "ABORTED at epsilon = {eps:e}: {reason}").unwrap();
    }
    s
}

pub fn mms_table(m: &MmsStudy) -> String {
    let head = format!("{:>11} {:>8} {:>14} {:>8}", "dt", "steps", "sup error", "order");
    let mut s = format!("manufactured case {}\n{head}\n{}\n", m.case, rule(head.len()));
    for r in &m.rows {
        let order = r.order.map_or_else(|| "-".to_string(), |o| format!("{o:.3}"));
        writeln!(s, "{:>11.4e} {:>8} {:>14.6e} {:>8}", r.dt, r.steps, r.error, order).unwrap();
    }
    writeln!(s, "fitted order {:.3}", m.fitted_order()).unwrap();
    writeln!(s, "spatial consistency residual {:.3e}", m.spatial_residual).unwrap();
    writeln!(s, "span truncation error {:.3e}", m.truncation_error).unwrap();
    s
}
