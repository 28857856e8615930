//! Central-difference verification of reverse-mode gradients.

use crate::{bind_params, collect_gradients, Graph, ParamBinding, ParamStore, Result, VarId};

#[derive(Debug, Clone, Copy)]
pub struct GradCheckConfig {
    pub epsilon: f64,
    pub tolerance: f64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            epsilon: 1e-5,
            tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParamGradReport {
    pub name: String,
    pub max_rel_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub params: Vec<ParamGradReport>,
    pub passed: bool,
}

impl GradCheckReport {
    pub fn max_rel_error(&self) -> f64 {
        self.params
            .iter()
            .map(|p| p.max_rel_error)
            .fold(0.0, f64::max)
    }
}

/// Compare the reverse-mode gradient of a scalar computation against
/// central differences `(f(w + eps e) - f(w - eps e)) / 2 eps`,
/// element-wise for every parameter. Relative error uses the denominator
/// `max(|analytic|, |numeric|, 1e-8)`.
///
/// `build` must deterministically reconstruct the same computation from
/// any parameter values.
pub fn grad_check<F>(store: &ParamStore, build: F, cfg: &GradCheckConfig) -> Result<GradCheckReport>
where
    F: Fn(&mut Graph, &ParamBinding) -> Result<VarId>,
{
    let analytic = {
        let mut graph = Graph::new();
        let binding = bind_params(&mut graph, store)?;
        let loss = build(&mut graph, &binding)?;
        graph.backward(loss)?;
        collect_gradients(&graph, &binding)
    };

    let eval = |s: &ParamStore| -> Result<f64> {
        let mut graph = Graph::new();
        let binding = bind_params(&mut graph, s)?;
        let loss = build(&mut graph, &binding)?;
        Ok(graph.value(loss).item())
    };

    let mut work = store.clone();
    let mut params = Vec::with_capacity(store.len());
    let mut passed = true;
    for (name, value) in store.iter() {
        let grad = &analytic[name];
        let mut max_rel = 0.0f64;
        for flat in 0..value.len() {
            work.perturb(name, flat, cfg.epsilon)?;
            let plus = eval(&work)?;
            work.perturb(name, flat, -2.0 * cfg.epsilon)?;
            let minus = eval(&work)?;
            work.perturb(name, flat, cfg.epsilon)?;

            let numeric = (plus - minus) / (2.0 * cfg.epsilon);
            let a = grad.data()[flat];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            max_rel = max_rel.max(rel);
        }
        let ok = max_rel <= cfg.tolerance;
        passed &= ok;
        params.push(ParamGradReport {
            name: name.to_string(),
            max_rel_error: max_rel,
            passed: ok,
        });
    }
    Ok(GradCheckReport { params, passed })
}
