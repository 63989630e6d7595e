//! The extension module driven from an embedded interpreter.

use pyo3::prelude::*;
use pyo3::types::PyDict;

#[test]
fn module_reproduces_pairings_and_integrals() {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "wittlab").unwrap();
        wittlab_py::wittlab_module(&m).unwrap();
        let locals = PyDict::new(py);
        locals.set_item("w", m).unwrap();
        let code = c"
X, Xt = w.WittChain.x(), w.WittChain.x_tilde()
c13, c12 = w.calibrated_chern_pair()
out = (c13.pair(X), c12.pair(X), c13.pair(Xt), c12.pair(Xt), w.cycle_integral(4), w.homology_dim('L1', 3, 2))
";
        py.run(code, None, Some(&locals)).unwrap();
        let out: (String, String, String, String, String, usize) =
            locals.get_item("out").unwrap().unwrap().extract().unwrap();
        assert_eq!(out, ("-12".into(), "12".into(), "-4".into(), "12".into(), "1/720".into(), 18));
    });
}

#[test]
fn bad_inputs_raise_python_errors() {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "wittlab").unwrap();
        wittlab_py::wittlab_module(&m).unwrap();
        assert!(m.getattr("cycle_integral").unwrap().call1((1,)).is_err());
        assert!(m.getattr("homology_dim").unwrap().call1(("Q", 0, 0)).is_err());
        assert!(m.getattr("run_suites").unwrap().call1((vec!["nope"],)).is_err());
    });
}
