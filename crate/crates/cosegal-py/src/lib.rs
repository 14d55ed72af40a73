//! Python bindings; populated as the engine modules land.

use pyo3::prelude::*;

#[pymodule]
fn cosegal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let _ = m;
    Ok(())
}
