use std::fmt;

use serde::{Deserialize, Serialize};

use super::JetError;

/// Variable groups, in the order they appear inside a [`VarSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Corner variable `x_j`, restricted to `x_j >= 0`.
    Corner,
    /// Fiber variable `y_j`.
    Fiber,
    /// The distinguished time parameter `t`.
    Time,
    /// Front parameter `q_j`.
    Param,
    /// Unfolding parameter `u_ij`.
    Unfold,
    /// Height variable `z`.
    Height,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var {
    /// Canonical indexed name (`x1`, `y2`, `t`, `q1`, `u21`, `z`).
    pub name: String,
    pub role: Role,
}

/// Ordered variable list: corner, fiber, then parameters grouped by role.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarSpec {
    vars: Vec<Var>,
}

fn role_of(name: &str) -> Option<Role> {
    let (head, tail) = name.split_at(1);
    let digits = tail.chars().all(|c| ('1'..='9').contains(&c));
    match (head, tail.len()) {
        ("t", 0) => Some(Role::Time),
        ("z", 0) => Some(Role::Height),
        ("x", 1) if digits => Some(Role::Corner),
        ("y", 1) if digits => Some(Role::Fiber),
        ("q", 1) if digits => Some(Role::Param),
        ("u", 2) if digits => Some(Role::Unfold),
        _ => None,
    }
}

impl VarSpec {
    /// `x1..xr`, `y1..yk`, followed by the named parameters.
    pub fn new(r: usize, k: usize, params: &[&str]) -> Result<Self, JetError> {
        if r > 9 || k > 9 {
            return Err(JetError::Spec(format!("at most 9 corner and 9 fiber variables (got r={r}, k={k})")));
        }
        let mut vars: Vec<Var> = (1..=r)
            .map(|j| Var { name: format!("x{j}"), role: Role::Corner })
            .chain((1..=k).map(|j| Var { name: format!("y{j}"), role: Role::Fiber }))
            .collect();
        for p in params {
            let role = role_of(p)
                .filter(|r| !matches!(r, Role::Corner | Role::Fiber))
                .ok_or_else(|| JetError::Spec(format!("`{p}` is not a parameter name")))?;
            vars.push(Var { name: p.to_string(), role });
        }
        Self::from_vars(vars)
    }

    pub fn from_vars(mut vars: Vec<Var>) -> Result<Self, JetError> {
        vars.sort_by(|a, b| a.role.cmp(&b.role).then_with(|| a.name.cmp(&b.name)));
        for w in vars.windows(2) {
            if w[0].name == w[1].name {
                return Err(JetError::Spec(format!("duplicate variable `{}`", w[0].name)));
            }
        }
        for v in &vars {
            if role_of(&v.name) != Some(v.role) {
                return Err(JetError::Spec(format!("`{}` cannot carry role {:?}", v.name, v.role)));
            }
        }
        Ok(VarSpec { vars })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &Var {
        &self.vars[i]
    }

    pub fn count(&self, role: Role) -> usize {
        self.vars.iter().filter(|v| v.role == role).count()
    }

    pub fn r(&self) -> usize {
        self.count(Role::Corner)
    }

    pub fn k(&self) -> usize {
        self.count(Role::Fiber)
    }

    pub fn indices(&self, role: Role) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.vars[i].role == role).collect()
    }

    pub fn time(&self) -> Option<usize> {
        self.indices(Role::Time).first().copied()
    }

    pub fn height(&self) -> Option<usize> {
        self.indices(Role::Height).first().copied()
    }

    /// Resolves a name, accepting the one-letter alias of a singleton group.
    pub fn index(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.vars.iter().position(|v| v.name == name) {
            return Some(i);
        }
        let role = match name {
            "x" => Role::Corner,
            "y" => Role::Fiber,
            "q" => Role::Param,
            "u" => Role::Unfold,
            _ => return None,
        };
        let idx = self.indices(role);
        (idx.len() == 1).then(|| idx[0])
    }

    /// Name used when printing: the alias if the group is a singleton.
    pub fn display_name(&self, i: usize) -> &str {
        let v = &self.vars[i];
        let alias = match v.role {
            Role::Corner => "x",
            Role::Fiber => "y",
            Role::Param => "q",
            Role::Unfold => "u",
            Role::Time | Role::Height => return &v.name,
        };
        if self.count(v.role) == 1 {
            alias
        } else {
            &v.name
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    /// Names of all non-(x, y) variables.
    pub fn param_names(&self) -> Vec<String> {
        self.vars.iter().filter(|v| !matches!(v.role, Role::Corner | Role::Fiber)).map(|v| v.name.clone()).collect()
    }

    /// Same (x, y) block, new parameter list.
    pub fn with_params(&self, params: &[String]) -> Result<Self, JetError> {
        let p: Vec<&str> = params.iter().map(String::as_str).collect();
        VarSpec::new(self.r(), self.k(), &p)
    }

    /// Copy with the named variables removed.
    pub fn without(&self, names: &[&str]) -> Self {
        VarSpec { vars: self.vars.iter().filter(|v| !names.contains(&v.name.as_str())).cloned().collect() }
    }
}

impl fmt::Display for VarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = (0..self.len()).map(|i| self.display_name(i)).collect();
        write!(f, "({})", names.join(", "))
    }
}
