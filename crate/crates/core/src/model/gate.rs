use crate::error::{QvfError, Result};
use crate::linalg::{self, Mat2, Mat4};

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Su4(Box<Mat4>),
    Sx,
    /// Virtual Z rotation diag(1, e^{iθ}); zero duration.
    Phase(f64),
    /// π pulse about +x, used by dynamical decoupling.
    Xp,
    /// π pulse about −x.
    Xm,
    Cx,
    Ecr,
    Swap,
    Measure { clbit: usize },
    Barrier,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Su4(_) => "su4",
            GateKind::Sx => "sx",
            GateKind::Phase(_) => "phase",
            GateKind::Xp => "xp",
            GateKind::Xm => "xm",
            GateKind::Cx => "cx",
            GateKind::Ecr => "ecr",
            GateKind::Swap => "swap",
            GateKind::Measure { .. } => "measure",
            GateKind::Barrier => "barrier",
        }
    }

    /// Required qubit count; `None` for barriers.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Su4(_) | GateKind::Cx | GateKind::Ecr | GateKind::Swap => Some(2),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Gate { kind, qubits }
    }
    pub fn su4(u: Mat4, q0: usize, q1: usize) -> Self {
        Gate::new(GateKind::Su4(Box::new(u)), vec![q0, q1])
    }
    pub fn sx(q: usize) -> Self {
        Gate::new(GateKind::Sx, vec![q])
    }
    pub fn phase(q: usize, theta: f64) -> Self {
        Gate::new(GateKind::Phase(theta), vec![q])
    }
    pub fn xp(q: usize) -> Self {
        Gate::new(GateKind::Xp, vec![q])
    }
    pub fn xm(q: usize) -> Self {
        Gate::new(GateKind::Xm, vec![q])
    }
    pub fn cx(c: usize, t: usize) -> Self {
        Gate::new(GateKind::Cx, vec![c, t])
    }
    pub fn ecr(c: usize, t: usize) -> Self {
        Gate::new(GateKind::Ecr, vec![c, t])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, vec![a, b])
    }
    pub fn measure(q: usize, clbit: usize) -> Self {
        Gate::new(GateKind::Measure { clbit }, vec![q])
    }
    pub fn barrier(qubits: Vec<usize>) -> Self {
        Gate::new(GateKind::Barrier, qubits)
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == Some(2)
    }

    pub fn is_entangler(&self) -> bool {
        matches!(self.kind, GateKind::Cx | GateKind::Ecr)
    }

    /// Unitary gates acting on one qubit.
    pub fn matrix1(&self) -> Option<Mat2> {
        match &self.kind {
            GateKind::Sx => Some(linalg::sx()),
            GateKind::Phase(t) => Some(linalg::phase(*t)),
            GateKind::Xp => Some(linalg::xp()),
            GateKind::Xm => Some(linalg::xm()),
            _ => None,
        }
    }

    pub fn matrix2(&self) -> Option<Mat4> {
        match &self.kind {
            GateKind::Su4(u) => Some(**u),
            GateKind::Cx => Some(linalg::cx()),
            GateKind::Ecr => Some(linalg::ecr()),
            GateKind::Swap => Some(linalg::swap()),
            _ => None,
        }
    }

    /// Structural checks independent of any device.
    pub fn check(&self) -> Result<()> {
        if let Some(a) = self.kind.arity() {
            if self.qubits.len() != a {
                return Err(QvfError::invariant(
                    format!("gate {}", self.name()),
                    format!("expects {} qubits, got {}", a, self.qubits.len()),
                ));
            }
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(QvfError::invariant(
                    format!("gate {}", self.name()),
                    format!("duplicate qubit {}", q),
                ));
            }
        }
        if let GateKind::Su4(u) = &self.kind {
            let e = linalg::unitarity_error4(u);
            if e > 1e-12 {
                return Err(QvfError::NonUnitary(e));
            }
        }
        Ok(())
    }
}
