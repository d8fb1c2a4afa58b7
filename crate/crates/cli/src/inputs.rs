//! Resolving state and code arguments: built-in fixtures, state files, and
//! directories of state files.

use std::fs;
use std::path::Path;

use qindel::codes::{
    collision_pair_x2, default_collision_param, example_psi, example_rho, four_qubit_codeword, x1_codeword,
    x1_sample, x2_sample, CodewordParam, X1_GRID, X2_GRID,
};
use qindel::distance::CodeSample;
use qindel::state::parse_state;
use qindel::{DensityMatrix, Error, Result, Tolerance, C64};

pub const BUILTIN_PREFIX: &str = "builtin:";

/// A resolved argument plus the bytes that identify it for the digest.
pub struct Loaded<T> {
    pub value: T,
    pub fingerprint: Vec<u8>,
}

fn parse_param(text: &str, tol: &Tolerance) -> Result<CodewordParam> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(Error::Parse(format!("expected 'alpha,beta', got '{text}'")));
    };
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("bad amplitude '{s}': {e}")))
    };
    CodewordParam::new(C64::new(num(a)?, 0.0), C64::new(num(b)?, 0.0), tol)
}

fn builtin_state(spec: &str, tol: &Tolerance) -> Result<DensityMatrix> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let param = |default: (f64, f64)| match arg {
        Some(a) => parse_param(a, tol),
        None => CodewordParam::new(C64::new(default.0, 0.0), C64::new(default.1, 0.0), tol),
    };
    let no_arg = || match arg {
        Some(a) => Err(Error::Parse(format!("builtin '{name}' takes no parameter (got '{a}')"))),
        None => Ok(()),
    };
    match name {
        "rho" => no_arg().and_then(|_| example_rho(0.5, 0.5, tol)),
        "psi" => no_arg().and_then(|_| example_psi(0.5, 0.5, tol)),
        "x1" => x1_codeword(param((half, half))?, tol),
        "x2" => four_qubit_codeword(param((1.0, 0.0))?, tol),
        "collision-x2" => {
            let (a, b) = collision_pair_x2(default_collision_param(), tol)?;
            match arg {
                None | Some("1") => Ok(a),
                Some("2") => Ok(b),
                Some(other) => Err(Error::Parse(format!("collision-x2 member must be 1 or 2, got '{other}'"))),
            }
        }
        _ => Err(Error::Parse(format!("unknown builtin state '{name}'"))),
    }
}

/// A state argument: `builtin:NAME[:PARAM]` or a path to a state file.
pub fn load_state(arg: &str, tol: &Tolerance) -> Result<Loaded<DensityMatrix>> {
    if let Some(spec) = arg.strip_prefix(BUILTIN_PREFIX) {
        return Ok(Loaded {
            value: builtin_state(spec, tol)?,
            fingerprint: arg.as_bytes().to_vec(),
        });
    }
    let text = fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read '{arg}': {e}")))?;
    Ok(Loaded {
        value: parse_state(&text, tol).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{arg}: {m}")),
            other => other,
        })?,
        fingerprint: text.into_bytes(),
    })
}

/// A code argument:
///
/// * `builtin:x1` / `builtin:x2` — grid samples of the continuous codes,
/// * `builtin:collision-x2` — the two-codeword collision pair,
/// * `builtin:rho,psi` (or `builtin:{rho,psi}`) — a list of builtin states,
/// * a directory, whose `*.json` files are read in name order.
pub fn load_code(arg: &str, grid: Option<(usize, usize)>, tol: &Tolerance) -> Result<Loaded<CodeSample>> {
    let mut fingerprint = arg.as_bytes().to_vec();
    if let Some(spec) = arg.strip_prefix(BUILTIN_PREFIX) {
        if let Some((t, p)) = grid {
            fingerprint.extend(format!("|grid={t},{p}").bytes());
        }
        let spec = spec.trim_start_matches('{').trim_end_matches('}');
        let code = match spec {
            "x1" => {
                let (t, p) = grid.unwrap_or(X1_GRID);
                x1_sample(t, p, tol)?
            }
            "x2" => {
                let (t, p) = grid.unwrap_or(X2_GRID);
                x2_sample(t, p, tol)?
            }
            "collision-x2" => {
                let (a, b) = collision_pair_x2(default_collision_param(), tol)?;
                CodeSample::new(vec![a, b], vec!["collision:psi1".into(), "collision:psi2".into()], tol)?
            }
            list => {
                let names: Vec<&str> = list.split(',').map(str::trim).collect();
                let states = names
                    .iter()
                    .map(|n| builtin_state(n, tol))
                    .collect::<Result<Vec<_>>>()?;
                CodeSample::new(states, names.iter().map(|s| s.to_string()).collect(), tol)?
            }
        };
        return Ok(Loaded { value: code, fingerprint });
    }

    let dir = Path::new(arg);
    if !dir.is_dir() {
        return Err(Error::Parse(format!("'{arg}' is neither a builtin code nor a directory")));
    }
    let mut files: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::Parse(format!("cannot list '{arg}': {e}")))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut states = Vec::with_capacity(files.len());
    let mut labels = Vec::with_capacity(files.len());
    for path in &files {
        let shown = path.display().to_string();
        let loaded = load_state(&shown, tol)?;
        fingerprint.extend(&loaded.fingerprint);
        states.push(loaded.value);
        labels.push(path.file_name().map_or(shown.clone(), |n| n.to_string_lossy().into_owned()));
    }
    if states.is_empty() {
        return Err(Error::TooFewStates(0));
    }
    Ok(Loaded {
        value: CodeSample::new(states, labels, tol)?,
        fingerprint,
    })
}
