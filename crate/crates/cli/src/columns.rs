//! Output schema: one table of sweep rows and one of Stark ratios.
//!
//! CSV and JSON rows carry the same fields under the same names. Column
//! names end in their unit (`_ghz`, `_mhz`); names without a suffix are
//! dimensionless, counts, flags or text.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::CliError;

pub const SCHEMA_VERSION: &str = "lambshift-sweep/1";

/// Optional column groups selected by `observables` in a config.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Levels,
    Lamb,
    Resonator,
    Nonlinearity,
    Coupling,
    Dephasing,
}

pub const GROUPS: [Group; 6] = [
    Group::Levels,
    Group::Lamb,
    Group::Resonator,
    Group::Nonlinearity,
    Group::Coupling,
    Group::Dephasing,
];

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Levels => "levels",
            Group::Lamb => "lamb",
            Group::Resonator => "resonator",
            Group::Nonlinearity => "nonlinearity",
            Group::Coupling => "coupling",
            Group::Dephasing => "dephasing",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        GROUPS.into_iter().find(|g| g.name() == s).ok_or_else(|| {
            let known: Vec<&str> = GROUPS.iter().map(|g| g.name()).collect();
            CliError::config(format!(
                "unknown observable group '{s}' (known: {})",
                known.join(", ")
            ))
        })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Column {
    pub name: &'static str,
    /// `None` for columns that are always written.
    pub group: Option<Group>,
    pub doc: &'static str,
}

const fn col(name: &'static str, group: Option<Group>, doc: &'static str) -> Column {
    Column { name, group, doc }
}

use Group::*;

pub const SWEEP_COLUMNS: &[Column] = &[
    col("omega_d_ghz", None, "drive frequency f_d"),
    col("amplitude_ghz", None, "drive amplitude Ω_d/2π"),
    col(
        "variant",
        None,
        "Hamiltonian variant (see `lambshift variants`)",
    ),
    col(
        "status",
        None,
        "ok | broken (an observable is missing because its branch broke) | failed (solver error)",
    ),
    col(
        "level_g_ghz",
        Some(Levels),
        "transmon-only dressed quasi-energy of g, unfolded from zero drive",
    ),
    col(
        "level_e_ghz",
        Some(Levels),
        "transmon-only dressed quasi-energy of e",
    ),
    col(
        "level_f_ghz",
        Some(Levels),
        "transmon-only dressed quasi-energy of f",
    ),
    col(
        "level_d_ghz",
        Some(Levels),
        "transmon-only dressed quasi-energy of d",
    ),
    col(
        "level0_g_ghz",
        Some(Levels),
        "joint quasi-energy of (g, 0 photons)",
    ),
    col("level0_e_ghz", Some(Levels), "joint quasi-energy of (e, 0)"),
    col("level0_f_ghz", Some(Levels), "joint quasi-energy of (f, 0)"),
    col("level0_d_ghz", Some(Levels), "joint quasi-energy of (d, 0)"),
    col(
        "omega_ge_ghz",
        Some(Levels),
        "transmon-only ge transition ω̃_ge",
    ),
    col(
        "omega0_ge_ghz",
        Some(Levels),
        "ge transition with the resonator in vacuum ω̃⁰_ge",
    ),
    col("lamb_ge_ghz", Some(Lamb), "Lamb shift L̃_ge = ω̃⁰_ge - ω̃_ge"),
    col("lamb_gf_ghz", Some(Lamb), "Lamb shift L̃_gf"),
    col("lamb_gd_ghz", Some(Lamb), "Lamb shift L̃_gd"),
    col("lamb_ef_ghz", Some(Lamb), "Lamb shift L̃_ef"),
    col(
        "resonator_g_ghz",
        Some(Resonator),
        "resonator frequency with the transmon in g, ω̃_r^g",
    ),
    col(
        "pull_ghz",
        Some(Resonator),
        "resonator pull P̃ = ω̃_r^g - ω_r",
    ),
    col(
        "chi_ghz",
        Some(Resonator),
        "cross-nonlinearity χ̃ = ω̃_r^g - ω̃_r^e",
    ),
    col(
        "anharm_ghz",
        Some(Nonlinearity),
        "renormalized anharmonicity Ã = ω̃⁰_ge - ω̃⁰_ef",
    ),
    col("zeta", Some(Nonlinearity), "ζ = Ã / (ω̃_ge - ω_r - Ã)"),
    col("zeta_ratio", Some(Nonlinearity), "ζ / ζ at zero drive"),
    col(
        "chi_scaled_ghz",
        Some(Nonlinearity),
        "constant-coupling estimate χ⁰ ζ/ζ₀",
    ),
    col(
        "g_gg_ghz",
        Some(Coupling),
        "|g̃_gg|, sum of the dominant harmonic classes",
    ),
    col("g_ee_ghz", Some(Coupling), "|g̃_ee|"),
    col("g_ge_ghz", Some(Coupling), "|g̃_ge|"),
    col(
        "coupling_residual_ghz",
        Some(Coupling),
        "largest non-dominant harmonic of g̃",
    ),
    col(
        "did_rate_mhz",
        Some(Dephasing),
        "drive-induced dephasing rate Γ_DID (μs⁻¹)",
    ),
    col("linewidth_mhz", Some(Dephasing), "qubit linewidth (FWHM)"),
    col(
        "resonator_warning",
        Some(Dephasing),
        "drive within ten resonator linewidths of ω̃_r^g",
    ),
    col("dispersive", None, "every |ω_transition - f_d| ≥ 10 Ω_d"),
    col(
        "broken_branches",
        None,
        "branches broken at or below this amplitude, ';'-separated",
    ),
    col(
        "min_overlap",
        None,
        "smallest step-to-step overlap of any tracked branch in the sweep",
    ),
    col(
        "ties",
        None,
        "overlap ties resolved by energy continuity in the sweep",
    ),
    col(
        "ambiguous_start",
        None,
        "a zero-drive branch was assigned with a tie",
    ),
    col("steps", None, "Magnus steps per period"),
    col("refinements", None, "amplitude bisections during tracking"),
    col("tol", None, "propagator tolerance"),
    col("n_q", None, "transmon truncation"),
    col("n_r", None, "resonator truncation"),
    col("k_max", None, "Fourier harmonics kept per side"),
    col("version", None, "lambshift version"),
    col(
        "note",
        None,
        "error message or reason a derived quantity is absent",
    ),
];

pub const ETA_COLUMNS: &[Column] = &[
    col("omega_d_ghz", None, "drive frequency f_d"),
    col(
        "variant",
        None,
        "Hamiltonian variant; no_resonator gives η, the others η⁰",
    ),
    col("status", None, "ok | failed"),
    col("eta_ef", None, "δω_gf / (2 δω_ge) in the quadratic regime"),
    col("eta_ed", None, "δω_gd / (3 δω_ge) in the quadratic regime"),
    col(
        "quadratic_residual",
        None,
        "residual of δω_ge = c Ω_d² relative to the largest shift",
    ),
    col("points", None, "nonzero amplitudes in the fit"),
    col("max_amplitude_ghz", None, "largest amplitude in the fit"),
    col("max_shift_ge_ghz", None, "largest |δω_ge| in the fit"),
    col("tol", None, "propagator tolerance"),
    col("n_q", None, "transmon truncation"),
    col("n_r", None, "resonator truncation"),
    col("version", None, "lambshift version"),
    col("note", None, "error message"),
];

/// Sweep columns kept for the given groups.
pub fn sweep_columns(groups: &[Group]) -> Vec<&'static Column> {
    SWEEP_COLUMNS
        .iter()
        .filter(|c| c.group.is_none_or(|g| groups.contains(&g)))
        .collect()
}

/// One cell. Missing values are empty in CSV and `null` in JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Value {
    pub fn num(v: Option<f64>) -> Value {
        match v {
            Some(x) if x.is_finite() => Value::Num(x),
            _ => Value::Missing,
        }
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn csv(&self) -> String {
        match self {
            Value::Num(x) => format!("{x:?}"),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Num(x) => s.serialize_f64(*x),
            Value::Int(n) => s.serialize_u64(*n),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Text(t) => s.serialize_str(t),
            Value::Missing => s.serialize_none(),
        }
    }
}

/// Human-readable schema description for `lambshift schema`.
pub fn describe() -> String {
    let mut out = format!("schema {SCHEMA_VERSION}\n\n");
    out.push_str(
        "Frequencies in GHz, rates in MHz. Missing values are empty in CSV and null in JSON.\n",
    );
    out.push_str("CSV files start with a '# schema=...' comment line, then a header row.\n");
    out.push_str(
        "JSON files hold {schema_version, generator, config, columns, rows, eta}; rows are\n",
    );
    out.push_str("objects keyed by the column names below.\n\n");
    let table = |out: &mut String, title: &str, cols: &[Column]| {
        out.push_str(title);
        out.push('\n');
        let width = cols.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in cols {
            let group = c.group.map_or("always".to_string(), |g| g.to_string());
            out.push_str(&format!("  {:width$}  {:13}  {}\n", c.name, group, c.doc));
        }
        out.push('\n');
    };
    table(
        &mut out,
        "<stem>.csv, rows[] (one per f_d, amplitude, variant):",
        SWEEP_COLUMNS,
    );
    table(
        &mut out,
        "<stem>_eta.csv, eta[] (one per f_d, variant):",
        ETA_COLUMNS,
    );
    out
}
