use std::path::Path;

use boolcomp::{named_fn, BoolFn, Error, Result};

/// A loaded function and where it came from.
pub struct Loaded {
    pub source: String,
    pub function: BoolFn,
}

/// Load a function from a `.btt` file or `named:<NAME>`; an existing file
/// wins over the named syntax.
pub fn load_fn(spec: &str, n: Option<usize>, max_arity: usize) -> Result<Loaded> {
    let function = if Path::new(spec).is_file() {
        let text =
            std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
        let f = BoolFn::parse_btt(&text)?;
        match Path::new(spec).file_stem().and_then(|s| s.to_str()) {
            Some(stem) => f.with_name(stem),
            None => f,
        }
    } else if let Some(name) = spec.strip_prefix("named:") {
        named_fn(name, n)?
    } else {
        return Err(Error::Parse(format!(
            "{spec}: not a file and not named:<NAME>"
        )));
    };
    if function.arity() > max_arity {
        return Err(Error::ArityTooLarge {
            arity: function.arity(),
            cap: max_arity,
        });
    }
    Ok(Loaded {
        source: spec.to_string(),
        function,
    })
}
