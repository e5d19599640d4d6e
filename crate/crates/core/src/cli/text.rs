//! Text rendering. Lossy: JSON stays the canonical output.

use std::fmt::Write;

use quatspec::battery::{Provenance, VerifyReport};
use quatspec::browder::PerturbTable;
use quatspec::spectral::SpectrumReport;
use quatspec::QMatrix;

use super::{BrowderReport, ResolventReport, RieszReport};

/// Right-aligned columns sized to the widest cell.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let padded: Vec<String> = cells
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&mut header.iter().copied());
    out += &line(
        &mut widths
            .iter()
            .map(|&w| "-".repeat(w))
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str),
    );
    for row in rows {
        out += &line(&mut row.iter().map(String::as_str));
    }
    out
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn matrix(name: &str, m: &QMatrix) -> String {
    let mut out = format!("{name}:\n");
    for r in 0..m.n() {
        let row: Vec<String> = (0..m.n()).map(|c| m.get(r, c).to_string()).collect();
        let _ = writeln!(out, "  {}", row.join("  "));
    }
    out
}

pub fn spectrum(rep: &SpectrumReport) -> String {
    let rows: Vec<Vec<String>> = rep
        .spheres
        .iter()
        .zip(&rep.gaps)
        .map(|(s, &g)| {
            let gap = if g.is_finite() {
                format!("{g:.6}")
            } else {
                "-".into()
            };
            vec![
                format!("{:.9}", s.point.u),
                format!("{:.9}", s.point.v),
                s.mult.to_string(),
                gap,
            ]
        })
        .collect();
    let mut out = table(&["u", "v", "mult", "gap"], &rows);
    let _ = writeln!(
        out,
        "eigen residual {}, cluster tolerance {}",
        sci(rep.eig_residual),
        sci(rep.cluster_tol)
    );
    out
}

pub fn riesz(r: &RieszReport) -> String {
    let mut out = format!(
        "sphere {} mult {}\nrank {}  nodes {}  radius {:.6}\n‖P²−P‖ {}  ‖PT−TP‖ {}\n",
        r.sphere,
        r.mult,
        r.rank,
        r.nodes,
        r.radius,
        sci(r.idempotency),
        sci(r.commutation)
    );
    out += &matrix("P", &r.projector);
    out
}

pub fn resolvent(r: &ResolventReport) -> String {
    let mut out = format!(
        "q = {}\nleft equation residual {}  right equation residual {}\n",
        r.q,
        sci(r.left_equation),
        sci(r.right_equation)
    );
    out += &matrix("S_L", &r.left);
    out += &matrix("S_R", &r.right);
    out
}

pub fn browder(r: &BrowderReport) -> String {
    let status = match r.sphere {
        Some(s) => format!("finite type on sphere {s}, projector rank {}", r.proj_rank),
        None => "resolvent".to_string(),
    };
    let mut out = format!(
        "q = {}  ({status})\nequation residuals: left {}  right {}\n",
        r.q,
        sci(r.equation_left),
        sci(r.equation_right)
    );
    if let (Some(p), Some(prod)) = (r.p, r.product) {
        let _ = writeln!(
            out,
            "product with p = {p}: displayed {}  normalized {}",
            sci(prod.displayed),
            sci(prod.normalized)
        );
    }
    out += &matrix("S_L,B", &r.left);
    out += &matrix("S_R,B", &r.right);
    out
}

pub fn verify(rep: &VerifyReport) -> String {
    let mut out = match &rep.provenance {
        Provenance::Seeded {
            seed,
            n,
            count,
            similarity,
        } => {
            format!("{count} random {n}x{n} cases, seed {seed}, {similarity} similarity\n")
        }
        Provenance::File { sha256, seed } => format!("file sha256 {sha256}, seed {seed}\n"),
    };
    let rows: Vec<Vec<String>> = rep
        .identities
        .iter()
        .map(|r| {
            vec![
                r.name.to_string(),
                r.count.to_string(),
                sci(r.max_residual),
                sci(r.tolerance),
                r.scale.to_string(),
                if r.pass { "ok" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    out += &table(&["identity", "samples", "max", "tol", "scale", ""], &rows);
    for e in &rep.errors {
        let _ = writeln!(out, "case {}: {}", e.case, e.message);
    }
    out += match rep.first_failure {
        None => "all identities pass\n".to_string(),
        Some(name) => format!("first failure: {name}\n"),
    }
    .as_str();
    out
}

pub fn perturb(t: &PerturbTable) -> String {
    let mut out = format!(
        "target sphere {} mult {}, contour radius {:.6}, rank {}\n",
        t.target.point, t.target.mult, t.radius, t.rank
    );
    let opt = |x: Option<f64>| x.map_or("-".to_string(), sci);
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let spheres: Vec<String> = r
                .spheres
                .iter()
                .map(|s| format!("{}x{}", s.point, s.mult))
                .collect();
            vec![
                r.k.to_string(),
                sci(r.delta),
                r.proj_rank.map_or("-".to_string(), |x| x.to_string()),
                opt(r.proj_distance),
                if r.localized { "yes" } else { "no" }.to_string(),
                if r.rank_stable { "yes" } else { "no" }.to_string(),
                spheres.join(" "),
            ]
        })
        .collect();
    out += &table(
        &[
            "k",
            "delta",
            "rank",
            "‖P−P_k‖",
            "local",
            "stable",
            "spheres",
        ],
        &rows,
    );
    let _ = match t.settled_from {
        Some(k) => writeln!(out, "settled from k = {k}"),
        None => writeln!(out, "not settled by k = {}", t.rows.len()),
    };
    out
}
