//! Instruction opcodes and the name registry.
//!
//! Every named instruction the interpreter understands is listed here.
//! Names are case-sensitive and match the conventional Push spelling
//! (`float.%`, `exec.do*times`, `vector.dim+`, ...). The registry maps
//! names to opcodes for the parser and back for the printer; it also
//! serves as the sampling universe for random program generation.

use std::collections::HashMap;
use std::sync::OnceLock;

/// The typed stacks a generic stack instruction can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StackId {
    Bool,
    Float,
    Int,
    Vector,
    Exec,
    Input,
}

impl StackId {
    pub fn prefix(self) -> &'static str {
        match self {
            StackId::Bool => "boolean",
            StackId::Float => "float",
            StackId::Int => "integer",
            StackId::Vector => "vector",
            StackId::Exec => "exec",
            StackId::Input => "input",
        }
    }
}

/// Generic stack-manipulation instructions available on several stacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StackOp {
    Dup,
    Flush,
    Pop,
    Rand,
    Rot,
    Shove,
    StackDepth,
    Swap,
    Yank,
    YankDup,
}

impl StackOp {
    pub const ALL: [StackOp; 10] = [
        StackOp::Dup,
        StackOp::Flush,
        StackOp::Pop,
        StackOp::Rand,
        StackOp::Rot,
        StackOp::Shove,
        StackOp::StackDepth,
        StackOp::Swap,
        StackOp::Yank,
        StackOp::YankDup,
    ];

    pub fn suffix(self) -> &'static str {
        match self {
            StackOp::Dup => "dup",
            StackOp::Flush => "flush",
            StackOp::Pop => "pop",
            StackOp::Rand => "rand",
            StackOp::Rot => "rot",
            StackOp::Shove => "shove",
            StackOp::StackDepth => "stackdepth",
            StackOp::Swap => "swap",
            StackOp::Yank => "yank",
            StackOp::YankDup => "yankdup",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    Eq,
    And,
    FromFloat,
    FromInteger,
    Not,
    Or,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloatOp {
    Mod,
    Mul,
    Add,
    Sub,
    Div,
    Lt,
    Eq,
    Gt,
    Abs,
    Cos,
    Erc,
    Exp,
    FromBoolean,
    FromInteger,
    Ln,
    Log,
    Max,
    Min,
    Neg,
    Pow,
    Sin,
    Tan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntOp {
    Mod,
    Mul,
    Add,
    Sub,
    Div,
    Lt,
    Eq,
    Gt,
    Abs,
    Erc,
    FromBoolean,
    FromFloat,
    Ln,
    Log,
    Max,
    Min,
    Neg,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VectorOp {
    Mul,
    Div,
    Add,
    Sub,
    Apply,
    Between,
    DimAdd,
    DimMul,
    Dprod,
    Mag,
    Scale,
    Urand,
    Wrand,
    Zip,
    Current,
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecOp {
    Eq,
    DoCount,
    DoRange,
    DoTimes,
    If,
    IfLt,
    Noop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputOp {
    InAll,
    InAllRev,
    Index,
}

/// A named interpreter instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Stack(StackId, StackOp),
    Bool(BoolOp),
    Float(FloatOp),
    Int(IntOp),
    Vector(VectorOp),
    Exec(ExecOp),
    Input(InputOp),
}

fn typed_op_entries() -> Vec<(Op, String)> {
    use BoolOp as B;
    use ExecOp as E;
    use FloatOp as F;
    use InputOp as P;
    use IntOp as I;
    use VectorOp as V;

    let bools = [
        (B::Eq, "="),
        (B::And, "and"),
        (B::FromFloat, "fromfloat"),
        (B::FromInteger, "frominteger"),
        (B::Not, "not"),
        (B::Or, "or"),
        (B::Xor, "xor"),
    ];
    let floats = [
        (F::Mod, "%"),
        (F::Mul, "*"),
        (F::Add, "+"),
        (F::Sub, "-"),
        (F::Div, "/"),
        (F::Lt, "<"),
        (F::Eq, "="),
        (F::Gt, ">"),
        (F::Abs, "abs"),
        (F::Cos, "cos"),
        (F::Erc, "erc"),
        (F::Exp, "exp"),
        (F::FromBoolean, "fromboolean"),
        (F::FromInteger, "frominteger"),
        (F::Ln, "ln"),
        (F::Log, "log"),
        (F::Max, "max"),
        (F::Min, "min"),
        (F::Neg, "neg"),
        (F::Pow, "pow"),
        (F::Sin, "sin"),
        (F::Tan, "tan"),
    ];
    let ints = [
        (I::Mod, "%"),
        (I::Mul, "*"),
        (I::Add, "+"),
        (I::Sub, "-"),
        (I::Div, "/"),
        (I::Lt, "<"),
        (I::Eq, "="),
        (I::Gt, ">"),
        (I::Abs, "abs"),
        (I::Erc, "erc"),
        (I::FromBoolean, "fromboolean"),
        (I::FromFloat, "fromfloat"),
        (I::Ln, "ln"),
        (I::Log, "log"),
        (I::Max, "max"),
        (I::Min, "min"),
        (I::Neg, "neg"),
        (I::Pow, "pow"),
    ];
    let vectors = [
        (V::Mul, "*"),
        (V::Div, "/"),
        (V::Add, "+"),
        (V::Sub, "-"),
        (V::Apply, "apply"),
        (V::Between, "between"),
        (V::DimAdd, "dim+"),
        (V::DimMul, "dim*"),
        (V::Dprod, "dprod"),
        (V::Mag, "mag"),
        (V::Scale, "scale"),
        (V::Urand, "urand"),
        (V::Wrand, "wrand"),
        (V::Zip, "zip"),
        (V::Current, "current"),
        (V::Best, "best"),
    ];
    let execs = [
        (E::Eq, "="),
        (E::DoCount, "do*count"),
        (E::DoRange, "do*range"),
        (E::DoTimes, "do*times"),
        (E::If, "if"),
        (E::IfLt, "iflt"),
        (E::Noop, "noop"),
    ];
    let inputs = [
        (P::InAll, "inall"),
        (P::InAllRev, "inallrev"),
        (P::Index, "index"),
    ];

    let mut out = Vec::new();
    for (op, s) in bools {
        out.push((Op::Bool(op), format!("boolean.{s}")));
    }
    for (op, s) in floats {
        out.push((Op::Float(op), format!("float.{s}")));
    }
    for (op, s) in ints {
        out.push((Op::Int(op), format!("integer.{s}")));
    }
    for (op, s) in vectors {
        out.push((Op::Vector(op), format!("vector.{s}")));
    }
    for (op, s) in execs {
        out.push((Op::Exec(op), format!("exec.{s}")));
    }
    for (op, s) in inputs {
        out.push((Op::Input(op), format!("input.{s}")));
    }
    out
}

fn build_entries() -> Vec<(Op, String)> {
    let mut out = Vec::new();
    // Generic stack ops: the data stacks get the full set, the exec stack
    // gets everything except rand, the input stack is read-only so it only
    // gets stackdepth.
    for stack in [StackId::Bool, StackId::Float, StackId::Int, StackId::Vector] {
        for op in StackOp::ALL {
            out.push((
                Op::Stack(stack, op),
                format!("{}.{}", stack.prefix(), op.suffix()),
            ));
        }
    }
    for op in StackOp::ALL {
        if op != StackOp::Rand {
            out.push((
                Op::Stack(StackId::Exec, op),
                format!("exec.{}", op.suffix()),
            ));
        }
    }
    out.push((
        Op::Stack(StackId::Input, StackOp::StackDepth),
        "input.stackdepth".to_string(),
    ));
    out.extend(typed_op_entries());
    out
}

/// Lookup tables between instruction names and opcodes.
pub struct Registry {
    by_name: HashMap<String, Op>,
    by_op: HashMap<Op, String>,
    ops: Vec<Op>,
}

impl Registry {
    pub fn lookup(&self, name: &str) -> Option<Op> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, op: Op) -> &str {
        &self.by_op[&op]
    }

    /// All registered opcodes, in a fixed order.
    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// The global instruction registry.
pub fn registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let entries = build_entries();
        let mut by_name = HashMap::new();
        let mut by_op = HashMap::new();
        let mut ops = Vec::new();
        for (op, name) in entries {
            let prev = by_name.insert(name.clone(), op);
            assert!(prev.is_none(), "duplicate instruction name {name}");
            by_op.insert(op, name);
            ops.push(op);
        }
        Registry {
            by_name,
            by_op,
            ops,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trips_names() {
        let reg = registry();
        for &op in reg.ops() {
            let name = reg.name(op);
            assert_eq!(reg.lookup(name), Some(op), "{name}");
        }
    }

    #[test]
    fn expected_instruction_count() {
        // 10 generic ops on 4 data stacks, 9 on exec, 1 on input,
        // plus 7 boolean, 22 float, 18 integer, 16 vector, 7 exec control,
        // 3 input instructions.
        assert_eq!(registry().len(), 40 + 9 + 1 + 7 + 22 + 18 + 16 + 3 + 7);
    }

    #[test]
    fn spot_check_names() {
        let reg = registry();
        for name in [
            "boolean.dup",
            "float.%",
            "float.erc",
            "integer.yankdup",
            "vector.dim+",
            "vector.dim*",
            "vector.best",
            "exec.do*times",
            "exec.dup",
            "input.stackdepth",
            "input.inallrev",
        ] {
            assert!(reg.lookup(name).is_some(), "missing {name}");
        }
        assert!(reg.lookup("float.foo").is_none());
        assert!(reg.lookup("exec.rand").is_none());
        assert!(reg.lookup("input.dup").is_none());
        assert!(reg.lookup("Float.+").is_none());
    }
}
