//! Logical systems `x(k+1) = f(x(k), u(k))` described as JSON documents.
//!
//! ```json
//! {
//!   "name": "toggle",
//!   "vars": [
//!     {"name": "x", "role": "state", "dim": 2, "init": ["00"]},
//!     {"name": "u", "role": "input", "dim": 2, "inputs": ["01", "10"]}
//!   ],
//!   "updates": {"x": "!x ^ u"}
//! }
//! ```
//!
//! Inputs are either one set used at every step or a list of per-step sets.
//! Updates run in `order` (default: declaration order of the state
//! variables); `x'` reads the value an earlier update produced this step.

mod eval;
mod expr;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::binvec::{BinaryVector, Gate};
use crate::error::{Error, Result};

pub use eval::{eval_expr, Algebra, Env, Mode, SetValue};
pub(crate) use eval::{check_mode, eval_node, GateOps, LogicalOps, PolyOps};
pub use expr::{parse_expr, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    State,
    Input,
}

/// Serialized form of a variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarDoc {
    pub name: String,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<Vec<BinaryVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<InputSchedule>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputSchedule {
    /// One set per step; step `k` uses entry `k`.
    PerStep(Vec<Vec<BinaryVector>>),
    /// The same set at every step.
    Constant(Vec<BinaryVector>),
}

/// Serialized form of a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vars: Vec<VarDoc>,
    pub updates: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VarKind {
    State { init: Vec<BinaryVector> },
    Input(InputSchedule),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub dim: usize,
    pub kind: VarKind,
}

/// Expression with names resolved to variable indices.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Cur(usize),
    Next(usize),
    Const(BinaryVector),
    Not(Box<Node>),
    Gate(Gate, Box<Node>, Box<Node>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Update {
    pub target: usize,
    pub expr: Expr,
    pub(crate) compiled: Node,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    name: Option<String>,
    vars: Vec<VarDecl>,
    state: Vec<usize>,
    inputs: Vec<usize>,
    updates: Vec<Update>,
}

fn model_err(msg: impl Into<String>) -> Error {
    Error::Model(msg.into())
}

impl Model {
    pub fn from_json(text: &str) -> Result<Model> {
        let doc: ModelDoc = serde_json::from_str(text)?;
        Model::from_document(doc)
    }

    pub fn from_document(doc: ModelDoc) -> Result<Model> {
        let mut vars = Vec::with_capacity(doc.vars.len());
        let mut index: HashMap<String, usize> = HashMap::new();
        for v in doc.vars {
            if index.insert(v.name.clone(), vars.len()).is_some() {
                return Err(model_err(format!("variable '{}' declared twice", v.name)));
            }
            vars.push(validate_var(v)?);
        }
        let state: Vec<usize> = (0..vars.len())
            .filter(|&i| matches!(vars[i].kind, VarKind::State { .. }))
            .collect();
        let inputs: Vec<usize> = (0..vars.len())
            .filter(|&i| matches!(vars[i].kind, VarKind::Input(_)))
            .collect();
        if state.is_empty() {
            return Err(model_err("model has no state variables"));
        }

        for name in doc.updates.keys() {
            match index.get(name) {
                None => return Err(model_err(format!("update for undeclared variable '{name}'"))),
                Some(&i) if !state.contains(&i) => {
                    return Err(model_err(format!("update for input variable '{name}'")))
                }
                _ => {}
            }
        }
        let order: Vec<usize> = match &doc.order {
            None => state.clone(),
            Some(names) => {
                let mut order = Vec::with_capacity(names.len());
                for n in names {
                    let i = *index
                        .get(n)
                        .filter(|i| state.contains(i))
                        .ok_or_else(|| model_err(format!("order names unknown state variable '{n}'")))?;
                    if order.contains(&i) {
                        return Err(model_err(format!("order lists '{n}' twice")));
                    }
                    order.push(i);
                }
                if order.len() != state.len() {
                    let missing = state.iter().find(|i| !order.contains(i)).unwrap();
                    return Err(model_err(format!(
                        "order does not list state variable '{}'",
                        vars[*missing].name
                    )));
                }
                order
            }
        };

        let mut updates = Vec::with_capacity(order.len());
        let mut done = vec![false; vars.len()];
        for &target in &order {
            let name = &vars[target].name;
            let text = doc
                .updates
                .get(name)
                .ok_or_else(|| model_err(format!("missing update for state variable '{name}'")))?;
            let expr = parse_expr(text)
                .map_err(|e| model_err(format!("update for '{name}': {e}")))?;
            let compiled = compile(&expr, &|n, next| {
                let i = *index
                    .get(n)
                    .ok_or_else(|| model_err(format!("update for '{name}' uses unknown identifier '{n}'")))?;
                if !next {
                    return Ok(Node::Cur(i));
                }
                if !state.contains(&i) {
                    return Err(model_err(format!(
                        "update for '{name}' uses {n}', but '{n}' is an input"
                    )));
                }
                if !done[i] {
                    return Err(model_err(format!(
                        "update for '{name}' uses {n}', which is not computed before it"
                    )));
                }
                Ok(Node::Next(i))
            })?;
            let d = node_dim(&compiled, &vars)
                .map_err(|e| model_err(format!("update for '{name}': {e}")))?;
            if d != vars[target].dim {
                return Err(model_err(format!(
                    "update for '{name}' has dimension {d}, variable has {}",
                    vars[target].dim
                )));
            }
            done[target] = true;
            updates.push(Update {
                target,
                expr,
                compiled,
            });
        }

        Ok(Model {
            name: doc.name,
            vars,
            state,
            inputs,
            updates,
        })
    }

    pub fn to_document(&self) -> ModelDoc {
        let vars = self
            .vars
            .iter()
            .map(|v| match &v.kind {
                VarKind::State { init } => VarDoc {
                    name: v.name.clone(),
                    role: Role::State,
                    dim: Some(v.dim),
                    init: Some(init.clone()),
                    inputs: None,
                },
                VarKind::Input(schedule) => VarDoc {
                    name: v.name.clone(),
                    role: Role::Input,
                    dim: Some(v.dim),
                    init: None,
                    inputs: Some(schedule.clone()),
                },
            })
            .collect();
        let updates = self
            .updates
            .iter()
            .map(|u| (self.vars[u.target].name.clone(), u.expr.to_string()))
            .collect();
        let default_order = self.updates.iter().map(|u| u.target).eq(self.state.iter().copied());
        ModelDoc {
            name: self.name.clone(),
            vars,
            updates,
            order: (!default_order)
                .then(|| self.updates.iter().map(|u| self.vars[u.target].name.clone()).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model document serializes")
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn var(&self, index: usize) -> &VarDecl {
        &self.vars[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// State variables in declaration order.
    pub fn state_indices(&self) -> &[usize] {
        &self.state
    }

    pub fn input_indices(&self) -> &[usize] {
        &self.inputs
    }

    /// Updates in evaluation order.
    pub fn updates(&self) -> &[Update] {
        &self.updates
    }

    /// Total bits of the joint state vector.
    pub fn state_bits(&self) -> usize {
        self.state.iter().map(|&v| self.vars[v].dim).sum()
    }

    pub fn initial_points(&self, var: usize) -> &[BinaryVector] {
        match &self.vars[var].kind {
            VarKind::State { init } => init,
            VarKind::Input(_) => panic!("'{}' is an input", self.vars[var].name),
        }
    }

    /// Input set of `var` at `step`.
    pub fn input_points(&self, var: usize, step: usize) -> Result<&[BinaryVector]> {
        match &self.vars[var].kind {
            VarKind::Input(InputSchedule::Constant(s)) => Ok(s),
            VarKind::Input(InputSchedule::PerStep(steps)) => {
                steps.get(step).map(Vec::as_slice).ok_or_else(|| {
                    model_err(format!(
                        "input '{}' has sets for {} steps, step {step} requested",
                        self.vars[var].name,
                        steps.len()
                    ))
                })
            }
            VarKind::State { .. } => panic!("'{}' is a state variable", self.vars[var].name),
        }
    }
}

fn validate_var(v: VarDoc) -> Result<VarDecl> {
    let name = v.name;
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        || name.starts_with(|c: char| c.is_ascii_digit())
    {
        return Err(model_err(format!("invalid variable name {name:?}")));
    }
    let check = |set: &[BinaryVector], dim: &mut Option<usize>, what: &str| -> Result<()> {
        if set.is_empty() {
            return Err(model_err(format!("{what} set of '{name}' is empty")));
        }
        for p in set {
            match *dim {
                None => *dim = Some(p.dim()),
                Some(d) if d != p.dim() => {
                    return Err(model_err(format!(
                        "{what} point {p} of '{name}' has {} bits, expected {d}",
                        p.dim()
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    };
    let mut dim = v.dim;
    if dim == Some(0) {
        return Err(model_err(format!("'{name}' has dimension 0")));
    }
    let kind = match v.role {
        Role::State => {
            if v.inputs.is_some() {
                return Err(model_err(format!("state variable '{name}' has an input schedule")));
            }
            let init = v
                .init
                .ok_or_else(|| model_err(format!("state variable '{name}' has no init set")))?;
            check(&init, &mut dim, "initial")?;
            VarKind::State { init }
        }
        Role::Input => {
            if v.init.is_some() {
                return Err(model_err(format!("input variable '{name}' has an init set")));
            }
            let schedule = v
                .inputs
                .ok_or_else(|| model_err(format!("input variable '{name}' has no inputs")))?;
            match &schedule {
                InputSchedule::Constant(s) => check(s, &mut dim, "input")?,
                InputSchedule::PerStep(steps) => {
                    if steps.is_empty() {
                        return Err(model_err(format!("input schedule of '{name}' is empty")));
                    }
                    for s in steps {
                        check(s, &mut dim, "input")?;
                    }
                }
            }
            VarKind::Input(schedule)
        }
    };
    Ok(VarDecl {
        name,
        dim: dim.expect("non-empty set fixes the dimension"),
        kind,
    })
}

pub(crate) fn compile(expr: &Expr, resolve: &dyn Fn(&str, bool) -> Result<Node>) -> Result<Node> {
    Ok(match expr {
        Expr::Var { name, next } => resolve(name, *next)?,
        Expr::Const(v) => Node::Const(v.clone()),
        Expr::Not(e) => Node::Not(Box::new(compile(e, resolve)?)),
        Expr::Gate { gate, lhs, rhs } => Node::Gate(
            *gate,
            Box::new(compile(lhs, resolve)?),
            Box::new(compile(rhs, resolve)?),
        ),
    })
}

fn node_dim(node: &Node, vars: &[VarDecl]) -> Result<usize> {
    match node {
        Node::Cur(v) | Node::Next(v) => Ok(vars[*v].dim),
        Node::Const(c) => Ok(c.dim()),
        Node::Not(e) => node_dim(e, vars),
        Node::Gate(g, l, r) => {
            let (a, b) = (node_dim(l, vars)?, node_dim(r, vars)?);
            if a != b {
                return Err(model_err(format!("{g} of {a}-bit and {b}-bit operands")));
            }
            Ok(a)
        }
    }
}
