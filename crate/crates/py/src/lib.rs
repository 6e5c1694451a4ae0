//! Python bindings: `import samplus`.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use samplus_core::learner::{self, LearnedModel, LearnerConfig, Mode};
use samplus_core::{fixtures, model, syntax, trajectory, EffectCounts, PointEstimate};

create_exception!(samplus, SamplusError, PyValueError, "Raised for malformed input or invalid arguments.");

fn err(e: impl std::fmt::Display) -> PyErr {
    SamplusError::new_err(e.to_string())
}

/// Accepts `f`, `(f)`, `not f`, `(not (f))` and `-f`.
fn literal(text: &str) -> PyResult<model::Literal> {
    let cleaned = text.replace(['(', ')'], " ");
    let words: Vec<&str> = cleaned.split_whitespace().collect();
    let (positive, name) = match words.as_slice() {
        [name] => match name.strip_prefix('-') {
            Some(n) => (false, n),
            None => (true, *name),
        },
        [not, name] if not.eq_ignore_ascii_case("not") => (false, *name),
        _ => return Err(err(format!("cannot read literal `{text}`"))),
    };
    let f = model::Fluent::new(name).map_err(err)?;
    Ok(if positive { model::Literal::pos(f) } else { model::Literal::neg(f) })
}

#[pyclass(module = "samplus", frozen)]
struct Domain(model::Domain);

#[pymethods]
impl Domain {
    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn fluents(&self) -> Vec<String> {
        self.0.vocabulary.fluents().iter().map(|f| f.name().to_string()).collect()
    }

    #[getter]
    fn actions(&self) -> Vec<String> {
        self.0.actions.iter().map(|a| a.name.clone()).collect()
    }

    fn preconditions(&self, action: &str) -> PyResult<Vec<String>> {
        let a = self.0.action(action).ok_or_else(|| PyKeyError::new_err(action.to_string()))?;
        Ok(self.0.vocabulary.sorted(&a.precondition).into_iter().map(|l| l.to_string()).collect())
    }

    #[pyo3(signature = (precision = 6))]
    fn emit(&self, precision: u32) -> String {
        syntax::emit_domain(&self.0, precision)
    }

    fn __repr__(&self) -> String {
        format!("<Domain {} ({} fluents, {} actions)>", self.0.name, self.0.fluent_count(), self.0.action_count())
    }
}

#[pyclass(module = "samplus", frozen)]
struct Problem(model::Problem);

#[pymethods]
impl Problem {
    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn init(&self) -> Vec<String> {
        self.0.init.true_fluents().map(|f| f.name().to_string()).collect()
    }

    #[getter]
    fn goal(&self) -> Vec<String> {
        self.0.goal.iter().map(|l| l.to_string()).collect()
    }
}

#[pyclass(module = "samplus", frozen)]
struct TrajectorySet(trajectory::TrajectorySet);

#[pymethods]
impl TrajectorySet {
    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn total_weight(&self) -> u64 {
        self.0.entries().iter().map(|(_, w)| w).sum()
    }

    #[getter]
    fn triplet_weight(&self) -> u64 {
        self.0.total_triplet_weight()
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.0.entries().iter().map(|(t, _)| t.id().to_string()).collect()
    }

    fn action_names(&self) -> Vec<String> {
        self.0.action_names()
    }

    /// `[(pre, action, post, weight)]`, states given as their true fluents.
    fn triplets(&self, action: &str) -> Vec<(Vec<String>, String, Vec<String>, u64)> {
        let names = |s: &model::State| s.true_fluents().map(|f| f.name().to_string()).collect();
        self.0
            .triplets_for(action)
            .iter()
            .map(|t| (names(t.pre), t.action.to_string(), names(t.post), t.weight))
            .collect()
    }

    fn to_text(&self) -> String {
        trajectory::emit_trajectories(&self.0)
    }
}

#[pyclass(module = "samplus", name = "LearnedModel", frozen)]
struct Learned(LearnedModel);

impl Learned {
    fn estimate(&self, action: &str, lit: &str) -> PyResult<&learner::EffectEstimate> {
        let a = self.0.action(action).ok_or_else(|| PyKeyError::new_err(action.to_string()))?;
        let l = literal(lit)?;
        a.effect(&l).ok_or_else(|| PyKeyError::new_err(lit.to_string()))
    }
}

#[pymethods]
impl Learned {
    #[getter]
    fn actions(&self) -> Vec<String> {
        self.0.actions.iter().map(|a| a.name.clone()).collect()
    }

    #[getter]
    fn unobserved_actions(&self) -> Vec<String> {
        self.0.unobserved_actions.clone()
    }

    #[getter]
    fn mode(&self) -> String {
        self.0.config.mode.to_string()
    }

    fn preconditions(&self, action: &str) -> PyResult<Vec<String>> {
        let a = self.0.action(action).ok_or_else(|| PyKeyError::new_err(action.to_string()))?;
        Ok(self.0.vocabulary.sorted(&a.preconditions).into_iter().map(|l| l.to_string()).collect())
    }

    /// `(added, eligible)` weights for `literal` under `action`.
    fn counts(&self, action: &str, literal: &str) -> PyResult<(u64, u64)> {
        let c = self.estimate(action, literal)?.counts;
        Ok((c.added, c.eligible))
    }

    fn interval(&self, action: &str, literal: &str) -> PyResult<(f64, f64)> {
        let k = self.estimate(action, literal)?.interval;
        Ok((k.low(), k.high()))
    }

    /// The point estimate as a float, or `None` when the literal was never eligible.
    fn point(&self, action: &str, literal: &str) -> PyResult<Option<f64>> {
        Ok(self.estimate(action, literal)?.point.value())
    }

    /// The exact estimate as a `fractions.Fraction`, or `None` when it is not rational.
    fn exact_point<'py>(&self, py: Python<'py>, action: &str, literal: &str) -> PyResult<Option<Bound<'py, PyAny>>> {
        match &self.estimate(action, literal)?.point {
            PointEstimate::Exact(r) => Ok(Some(py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))?)),
            _ => Ok(None),
        }
    }

    #[pyo3(signature = (precision = 6))]
    fn to_domain(&self, precision: u32) -> Domain {
        Domain(learner::emit_learned(&self.0, precision))
    }

    #[pyo3(signature = (precision = 6))]
    fn render(&self, precision: u32) -> String {
        learner::render_learned(&self.0, precision)
    }
}

#[pyclass(module = "samplus", frozen)]
struct EvalReport(samplus_core::EvalReport);

#[pymethods]
impl EvalReport {
    #[getter]
    fn contained(&self) -> usize {
        self.0.contained
    }

    #[getter]
    fn total(&self) -> usize {
        self.0.total
    }

    #[getter]
    fn extra_actions(&self) -> Vec<String> {
        self.0.extra_actions.clone()
    }

    #[getter]
    fn unlearned_actions(&self) -> Vec<String> {
        self.0.unlearned_actions.clone()
    }

    /// `[(action, literal, truth, low, high, contained)]`.
    fn literals(&self) -> Vec<(String, String, f64, f64, f64, bool)> {
        self.0
            .actions
            .iter()
            .flat_map(|a| {
                a.literals.iter().map(|l| (a.action.clone(), l.literal.clone(), l.truth, l.low, l.high, l.contained))
            })
            .collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyfunction]
fn parse_domain(text: &str) -> PyResult<Domain> {
    syntax::parse_domain(text).map(Domain).map_err(err)
}

#[pyfunction]
fn parse_problem(text: &str, domain: &Domain) -> PyResult<Problem> {
    syntax::parse_problem(text, &domain.0).map(Problem).map_err(err)
}

/// Reads `.traj` text; without a domain the fluents are inferred from the text.
#[pyfunction]
#[pyo3(signature = (text, domain = None))]
fn parse_trajectories(text: &str, domain: Option<&Domain>) -> PyResult<TrajectorySet> {
    let vocab: Option<&Arc<model::Vocabulary>> = domain.map(|d| &d.0.vocabulary);
    trajectory::parse_trajectories(text, vocab).map(TrajectorySet).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (trajectories, delta, mode = "interval", domain = None, fluent_count = None, action_count = None))]
fn learn(
    py: Python<'_>,
    trajectories: &TrajectorySet,
    delta: f64,
    mode: &str,
    domain: Option<&Domain>,
    fluent_count: Option<usize>,
    action_count: Option<usize>,
) -> PyResult<Learned> {
    let mode: Mode = mode.parse().map_err(err)?;
    let cfg = LearnerConfig::new(delta, mode).map_err(err)?.with_counts(fluent_count, action_count);
    let domain = domain.map(|d| &d.0);
    py.detach(|| learner::learn(&trajectories.0, &cfg, domain)).map(Learned).map_err(err)
}

/// `policy` is `"random"` or a list of action names to execute in order.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (domain, problem, seed, episodes, policy, max_steps = 100, stop_on_goal = false))]
fn sample(
    py: Python<'_>,
    domain: &Domain,
    problem: &Problem,
    seed: u64,
    episodes: usize,
    policy: &Bound<'_, PyAny>,
    max_steps: usize,
    stop_on_goal: bool,
) -> PyResult<TrajectorySet> {
    let policy = match policy.extract::<String>() {
        Ok(s) if s.eq_ignore_ascii_case("random") => trajectory::Policy::Random,
        Ok(s) => return Err(err(format!("unknown policy `{s}`"))),
        Err(_) => trajectory::Policy::Script(policy.extract::<Vec<String>>()?),
    };
    let cfg = trajectory::SampleConfig::new(seed, episodes, max_steps, policy).map_err(err)?.stop_on_goal(stop_on_goal);
    py.detach(|| trajectory::sample(&domain.0, &problem.0, &cfg)).map(TrajectorySet).map_err(err)
}

/// Returns `{"trajectories", "triplets", "violations"}`; violations are strings.
#[pyfunction]
fn validate<'py>(py: Python<'py>, trajectories: &TrajectorySet, domain: &Domain) -> PyResult<Bound<'py, PyDict>> {
    let report = trajectory::validate(&trajectories.0, &domain.0).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("trajectories", report.trajectories)?;
    out.set_item("triplets", report.triplets)?;
    out.set_item("violations", report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>())?;
    Ok(out)
}

#[pyfunction]
fn evaluate(learned: &Domain, truth: &Domain) -> PyResult<EvalReport> {
    samplus_core::evaluate(&learned.0, &truth.0).map(EvalReport).map_err(err)
}

#[pyfunction]
fn credal_interval(added: u64, eligible: u64, delta: f64) -> PyResult<(f64, f64)> {
    if added > eligible {
        return Err(err("added exceeds eligible"));
    }
    let k = learner::credal_interval(EffectCounts { added, eligible }, delta);
    Ok((k.low(), k.high()))
}

#[pyfunction]
fn point_estimate(
    added: u64,
    eligible: u64,
    delta: f64,
    fluent_count: usize,
    action_count: usize,
) -> PyResult<Option<f64>> {
    if added > eligible {
        return Err(err("added exceeds eligible"));
    }
    Ok(learner::point_estimate(EffectCounts { added, eligible }, delta, fluent_count, action_count).value())
}

#[pymodule]
fn samplus(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SamplusError", m.py().get_type::<SamplusError>())?;
    m.add_class::<Domain>()?;
    m.add_class::<Problem>()?;
    m.add_class::<TrajectorySet>()?;
    m.add_class::<Learned>()?;
    m.add_class::<EvalReport>()?;
    for f in [
        wrap_pyfunction!(parse_domain, m)?,
        wrap_pyfunction!(parse_problem, m)?,
        wrap_pyfunction!(parse_trajectories, m)?,
        wrap_pyfunction!(learn, m)?,
        wrap_pyfunction!(sample, m)?,
        wrap_pyfunction!(validate, m)?,
        wrap_pyfunction!(evaluate, m)?,
        wrap_pyfunction!(credal_interval, m)?,
        wrap_pyfunction!(point_estimate, m)?,
    ] {
        m.add_function(f)?;
    }
    m.add("COFFEE_DOMAIN", fixtures::COFFEE_DOMAIN)?;
    m.add("COFFEE_PROBLEM", fixtures::COFFEE_PROBLEM)?;
    m.add("COFFEE_TRACES", fixtures::TRACES)?;
    m.add("COFFEE_TRACES_X100", fixtures::TRACES_X100)?;
    m.add("COFFEE_TRACES_SKEWED", fixtures::TRACES_SKEWED)?;
    Ok(())
}
