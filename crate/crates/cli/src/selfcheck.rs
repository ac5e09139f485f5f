//! The logistic period-2 walkthrough at `μ = 3.2`, `x̄ = (0.51, 0.79)`.

use orbcert::certify::{certify_orbit, Stability};
use orbcert::interval::{Bound, Interval};
use orbcert::maps::{MapDef, Param};
use orbcert::zerofind::Candidate;

use crate::{CliError, Report};

struct Row {
    quantity: &'static str,
    computed: String,
    reference: &'static str,
    ok: bool,
}

fn show(x: Interval) -> String {
    format!("[{:.9e}, {:.9e}]", x.lo(), x.hi())
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    lo <= x && x <= hi
}

pub fn run() -> Result<Report, CliError> {
    let mu = Param::parse("mu", "3.2").map_err(CliError::usage)?;
    let m = MapDef::from_params("logistic", &[mu]).map_err(CliError::usage)?;
    let c = Candidate::from_orbit(&m, vec![0.51, 0.79]).map_err(CliError::usage)?;
    let cert = certify_orbit(&m, &c, Bound::Unbounded);
    let Some(b) = cert.bounds else {
        return Ok(Report::unverified(
            String::new(),
            "bounds could not be evaluated",
        ));
    };

    let mut rows = vec![
        Row {
            quantity: "Y",
            computed: show(b.y),
            reference: "[0.012775, 0.0127751]",
            ok: within(b.y.hi(), 0.012775, 0.012776),
        },
        Row {
            quantity: "Z1",
            computed: show(b.z1),
            reference: "[0, 6.66134e-16]",
            ok: b.z1.hi() <= 1e-15,
        },
        Row {
            quantity: "Z2",
            computed: show(b.z2),
            reference: "[20.7422, 20.7423]",
            ok: b
                .z2
                .subset_of(&Interval::new(20.742, 20.743).expect("ordered")),
        },
        Row {
            quantity: "r_star",
            computed: cert.r_star().map_or("none".into(), |r| format!("{r}")),
            reference: "0.015625",
            ok: cert.verified && cert.r_star() == Some(2f64.powi(-6)),
        },
    ];
    let lambda = cert.eigenvalue;
    rows.push(Row {
        quantity: "lambda",
        computed: lambda.map_or("none".into(), show),
        reference: "[-0.0644712, 0.314457]",
        ok: lambda.is_some_and(|l| {
            l.subset_of(&Interval::new(-0.065, 0.315).expect("ordered")) && l.contains(0.16)
        }),
    });
    rows.push(Row {
        quantity: "stability",
        computed: cert
            .stability
            .map_or("none".into(), |v| format!("{v:?}").to_lowercase()),
        reference: "stable",
        ok: cert.stability == Some(Stability::Stable),
    });

    let mut table = format!(
        "{:<10} {:<34} {:<24} {}\n",
        "quantity", "computed", "reference", "ok"
    );
    for r in &rows {
        table.push_str(&format!(
            "{:<10} {:<34} {:<24} {}\n",
            r.quantity, r.computed, r.reference, r.ok
        ));
    }
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(Report::check(
        table.trim_end().to_string(),
        all_ok,
        "walkthrough does not match the reference values",
    ))
}
