//! Wide-form panel data for the standard figures.
//!
//! Every panel becomes one CSV, `step` followed by one column per series.
//! File names:
//!
//! | figure | files |
//! |--------|-------|
//! | `fig3` | `fig3a_mean_r0.2`, `fig3b_variance_r0.2`, `fig3c_mean_r0.8`, `fig3d_variance_r0.8` |
//! | `fig4` | `fig4_mean_r0.8`, `fig4_variance_r0.8` |
//! | `fig5` | `fig5_mean_r0.2`, `fig5_variance_r0.2` |
//! | `fig6` | `fig6_mean_m2`, `fig6_variance_m2` |
//! | `fig7` | `fig7_mean_m6`, `fig7_variance_m6` |
//! | `figA` | `figAa_mean_m2` .. `figAh_variance_m7` |
//!
//! Input-mode series are named `m<k>`, regime series `rsq<r>`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use super::{format_sig12, r_sq_label, HarnessError, RunArtifact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    FigA,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::FigA,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.to_string() == s)
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::FigA => "figA",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Mean,
    Variance,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Mean => "mean",
            Quantity::Variance => "variance",
        }
    }
}

/// One plotted panel: a quantity and the `(r_sq, input)` series it shows.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub file_stem: String,
    pub quantity: Quantity,
    pub series: Vec<(f64, usize)>,
    pub columns: Vec<String>,
}

const EDGE_AND_INNER: [usize; 4] = [2, 3, 6, 7];
const REGIMES: [f64; 3] = [0.0, 0.2, 0.8];
const ALL_REGIMES: [f64; 4] = [0.0, 0.2, 0.8, 1.0];

fn by_input(stem: String, quantity: Quantity, r_sq: f64, inputs: &[usize]) -> Panel {
    Panel {
        file_stem: stem,
        quantity,
        series: inputs.iter().map(|&m| (r_sq, m)).collect(),
        columns: inputs.iter().map(|m| format!("m{m}")).collect(),
    }
}

fn by_regime(stem: String, quantity: Quantity, input: usize, regimes: &[f64]) -> Panel {
    Panel {
        file_stem: stem,
        quantity,
        series: regimes.iter().map(|&r| (r, input)).collect(),
        columns: regimes
            .iter()
            .map(|&r| format!("rsq{}", r_sq_label(r)))
            .collect(),
    }
}

fn pair(fig: &str, by: impl Fn(String, Quantity) -> Panel, suffix: &str) -> Vec<Panel> {
    [Quantity::Mean, Quantity::Variance]
        .into_iter()
        .map(|q| by(format!("{fig}_{}_{suffix}", q.name()), q))
        .collect()
}

pub fn figure_panels(figure: FigureId) -> Vec<Panel> {
    use Quantity::{Mean, Variance};
    match figure {
        FigureId::Fig3 => [
            ("a", Mean, 0.2),
            ("b", Variance, 0.2),
            ("c", Mean, 0.8),
            ("d", Variance, 0.8),
        ]
        .into_iter()
        .map(|(letter, q, r)| {
            let stem = format!("fig3{letter}_{}_r{}", q.name(), r_sq_label(r));
            by_input(stem, q, r, &EDGE_AND_INNER)
        })
        .collect(),
        FigureId::Fig4 => pair("fig4", |s, q| by_input(s, q, 0.8, &EDGE_AND_INNER), "r0.8"),
        FigureId::Fig5 => pair("fig5", |s, q| by_input(s, q, 0.2, &[2, 6]), "r0.2"),
        FigureId::Fig6 => pair("fig6", |s, q| by_regime(s, q, 2, &REGIMES), "m2"),
        FigureId::Fig7 => pair("fig7", |s, q| by_regime(s, q, 6, &REGIMES), "m6"),
        FigureId::FigA => {
            let mut letters = 'a'..='h';
            EDGE_AND_INNER
                .iter()
                .flat_map(|&m| [(m, Mean), (m, Variance)])
                .map(|(m, q)| {
                    let letter = letters.next().expect("eight panels");
                    by_regime(
                        format!("figA{letter}_{}_m{m}", q.name()),
                        q,
                        m,
                        &ALL_REGIMES,
                    )
                })
                .collect()
        }
    }
}

/// The longest run for each `(r_sq, input)` pair a panel needs.
fn select<'a>(
    figure: FigureId,
    panel: &Panel,
    artifacts: &'a [RunArtifact],
) -> Result<Vec<&'a RunArtifact>, HarnessError> {
    let found: Vec<Option<&RunArtifact>> = panel
        .series
        .iter()
        .map(|&(r, m)| {
            artifacts
                .iter()
                .filter(|a| a.config.input_mode == m && (a.config.r_sq - r).abs() < 1e-12)
                .max_by_key(|a| a.horizon())
        })
        .collect();
    if found.iter().all(Option::is_some) {
        return Ok(found.into_iter().flatten().collect());
    }
    let required: Vec<String> = figure_panels(figure)
        .iter()
        .flat_map(|p| p.series.clone())
        .fold(Vec::new(), |mut acc, s| {
            if !acc.contains(&s) {
                acc.push(s);
            }
            acc
        })
        .into_iter()
        .map(|(r, m)| format!("({}, {m})", r_sq_label(r)))
        .collect();
    Err(HarnessError::MissingSeries {
        figure: figure.to_string(),
        missing: required.join(", "),
    })
}

fn panel_csv(panel: &Panel, runs: &[&RunArtifact]) -> String {
    let rows = runs.iter().map(|a| a.rows.len()).min().unwrap_or(0);
    let mut out = String::from("step");
    for c in &panel.columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for n in 0..rows {
        out.push_str(&n.to_string());
        for a in runs {
            let row = &a.rows[n];
            let v = match panel.quantity {
                Quantity::Mean => row.mean,
                Quantity::Variance => row.variance,
            };
            out.push(',');
            out.push_str(&v.map(format_sig12).unwrap_or_default());
        }
        out.push('\n');
    }
    out
}

/// Writes one CSV per panel of `figure` into `dir`; `None` writes nothing.
pub fn emit_figure_data(
    figure: Option<FigureId>,
    artifacts: &[RunArtifact],
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    let Some(figure) = figure else {
        return Ok(Vec::new());
    };
    let panels = figure_panels(figure);
    let bodies = panels
        .iter()
        .map(|p| Ok((p, panel_csv(p, &select(figure, p, artifacts)?))))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::with_capacity(bodies.len());
    for (panel, body) in bodies {
        let path = dir.join(format!("{}.csv", panel.file_stem));
        fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
