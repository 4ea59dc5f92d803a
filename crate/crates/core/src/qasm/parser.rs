use std::collections::{BTreeMap, HashMap};

use super::builtin::{self, Builtin};
use super::lexer::{tokenize, Tok, Token};
use super::{QasmError, QasmErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Param(usize),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Expr {
    pub fn eval(&self, params: &[f64]) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Param(i) => params[*i],
            Expr::Neg(e) => -e.eval(params),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(params), b.eval(params));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let x = e.eval(params);
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln(),
                    Func::Sqrt => x.sqrt(),
                }
            }
        }
    }
}

/// Register operand: `q` or `q[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operand {
    pub reg: String,
    pub index: Option<usize>,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Apply {
        callee: Callee,
        params: Vec<Expr>,
        args: Vec<Operand>,
    },
    Measure {
        qubit: Operand,
        bit: Operand,
    },
    Barrier(Vec<Operand>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: usize,
    pub col: usize,
}

/// One call inside a gate body; `args` index the definition's qubit
/// arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyOp {
    pub callee: Callee,
    pub params: Vec<Expr>,
    pub args: Vec<usize>,
}

/// A resolved gate reference: an index into [`QasmProgram::gates`] or a
/// builtin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Callee {
    User(usize),
    Builtin(Builtin),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateDef {
    pub name: String,
    pub num_params: usize,
    pub num_qubits: usize,
    pub body: Vec<BodyOp>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QasmProgram {
    pub qregs: Vec<(String, usize)>,
    pub cregs: Vec<(String, usize)>,
    pub gates: Vec<GateDef>,
    pub statements: Vec<Stmt>,
}

impl QasmProgram {
    pub fn num_qubits(&self) -> usize {
        self.qregs.iter().map(|r| r.1).sum()
    }

    pub fn num_clbits(&self) -> usize {
        self.cregs.iter().map(|r| r.1).sum()
    }

    /// `(num_params, num_qubits)`.
    pub fn signature(&self, callee: Callee) -> (usize, usize) {
        match callee {
            Callee::User(i) => (self.gates[i].num_params, self.gates[i].num_qubits),
            Callee::Builtin(b) => b.signature(),
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    prog: QasmProgram,
    scope: HashMap<String, usize>,
}

fn err(kind: QasmErrorKind, t: &Token, msg: impl Into<String>) -> QasmError {
    QasmError::new(kind, t.line, t.col, msg)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Real(r) => format!("`{r}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, what: &str) -> QasmError {
        let t = self.peek();
        err(
            QasmErrorKind::Syntax,
            t,
            format!("expected {what}, found {}", describe(&t.tok)),
        )
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), QasmError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.syntax(&format!("`{s}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, Token), QasmError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.next()))
            }
            _ => Err(self.syntax("an identifier")),
        }
    }

    fn int(&mut self) -> Result<usize, QasmError> {
        match self.peek().tok {
            Tok::Int(i) => {
                self.next();
                usize::try_from(i).map_err(|_| self.syntax("a smaller integer"))
            }
            _ => Err(self.syntax("an integer")),
        }
    }

    fn program(&mut self) -> Result<(), QasmError> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "OPENQASM") {
            let t = self.next();
            let version = match self.next().tok {
                Tok::Real(v) => v,
                Tok::Int(v) => v as f64,
                _ => return Err(err(QasmErrorKind::Syntax, &t, "malformed OPENQASM header")),
            };
            if version.floor() != 2.0 {
                return Err(err(
                    QasmErrorKind::Unsupported,
                    &t,
                    format!("OpenQASM {version} is not supported; only OpenQASM 2.0 is accepted"),
                ));
            }
            self.expect_sym(";")?;
        }
        while self.peek().tok != Tok::Eof {
            self.statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let (word, t) = self.ident()?;
        match word.as_str() {
            "OPENQASM" => Err(err(QasmErrorKind::Syntax, &t, "OPENQASM header must come first")),
            "include" => {
                let file = match self.next().tok {
                    Tok::Str(s) => s,
                    _ => return Err(err(QasmErrorKind::Syntax, &t, "include expects a file name")),
                };
                if file != "qelib1.inc" {
                    return Err(err(
                        QasmErrorKind::Unsupported,
                        &t,
                        format!("include \"{file}\" is not supported; only qelib1.inc is built in"),
                    ));
                }
                self.expect_sym(";")
            }
            "qreg" | "creg" => {
                let (name, nt) = self.ident()?;
                self.expect_sym("[")?;
                let size = self.int()?;
                self.expect_sym("]")?;
                self.expect_sym(";")?;
                if self.prog.qregs.iter().chain(&self.prog.cregs).any(|r| r.0 == name) {
                    return Err(err(QasmErrorKind::Semantic, &nt, format!("register `{name}` redeclared")));
                }
                if word == "qreg" {
                    self.prog.qregs.push((name, size));
                } else {
                    self.prog.cregs.push((name, size));
                }
                Ok(())
            }
            "gate" => self.gate_def(),
            "opaque" => Err(err(QasmErrorKind::Unsupported, &t, "opaque gates cannot be inlined")),
            "if" | "reset" => Err(err(
                QasmErrorKind::Unsupported,
                &t,
                format!("`{word}` statements are not supported"),
            )),
            "measure" => {
                let qubit = self.operand()?;
                self.expect_sym("->")?;
                let bit = self.operand()?;
                self.expect_sym(";")?;
                self.check_operand(&qubit, true)?;
                self.check_operand(&bit, false)?;
                self.push(StmtKind::Measure { qubit, bit }, &t);
                Ok(())
            }
            "barrier" => {
                let args = self.operands()?;
                self.expect_sym(";")?;
                for a in &args {
                    self.check_operand(a, true)?;
                }
                self.push(StmtKind::Barrier(args), &t);
                Ok(())
            }
            _ => {
                let params = self.call_params(&[])?;
                let args = self.operands()?;
                self.expect_sym(";")?;
                let callee = self.resolve(&word, &t, params.len(), args.len())?;
                for a in &args {
                    self.check_operand(a, true)?;
                }
                self.push(
                    StmtKind::Apply {
                        callee,
                        params,
                        args,
                    },
                    &t,
                );
                Ok(())
            }
        }
    }

    fn push(&mut self, kind: StmtKind, t: &Token) {
        self.prog.statements.push(Stmt {
            kind,
            line: t.line,
            col: t.col,
        });
    }

    fn resolve(&self, name: &str, t: &Token, np: usize, nq: usize) -> Result<Callee, QasmError> {
        let callee = match self.scope.get(name) {
            Some(&i) => Callee::User(i),
            None => Callee::Builtin(
                Builtin::lookup(name)
                    .ok_or_else(|| err(QasmErrorKind::UnknownGate, t, format!("unknown gate `{name}`")))?,
            ),
        };
        let (p, q) = self.prog.signature(callee);
        if p != np || q != nq {
            return Err(err(
                QasmErrorKind::Semantic,
                t,
                format!("gate `{name}` takes {p} parameter(s) and {q} qubit(s), got {np} and {nq}"),
            ));
        }
        Ok(callee)
    }

    fn check_operand(&self, op: &Operand, quantum: bool) -> Result<(), QasmError> {
        let regs = if quantum { &self.prog.qregs } else { &self.prog.cregs };
        let kind = if quantum { "quantum" } else { "classical" };
        let size = regs
            .iter()
            .find(|r| r.0 == op.reg)
            .map(|r| r.1)
            .ok_or_else(|| {
                QasmError::new(
                    QasmErrorKind::Semantic,
                    op.line,
                    op.col,
                    format!("unknown {kind} register `{}`", op.reg),
                )
            })?;
        if let Some(i) = op.index {
            if i >= size {
                return Err(QasmError::new(
                    QasmErrorKind::Semantic,
                    op.line,
                    op.col,
                    format!("index {i} out of range for `{}[{size}]`", op.reg),
                ));
            }
        }
        Ok(())
    }

    fn operand(&mut self) -> Result<Operand, QasmError> {
        let (reg, t) = self.ident()?;
        let index = if self.eat_sym("[") {
            let i = self.int()?;
            self.expect_sym("]")?;
            Some(i)
        } else {
            None
        };
        Ok(Operand {
            reg,
            index,
            line: t.line,
            col: t.col,
        })
    }

    fn operands(&mut self) -> Result<Vec<Operand>, QasmError> {
        let mut v = vec![self.operand()?];
        while self.eat_sym(",") {
            v.push(self.operand()?);
        }
        Ok(v)
    }

    fn call_params(&mut self, names: &[String]) -> Result<Vec<Expr>, QasmError> {
        let mut v = Vec::new();
        if self.eat_sym("(") {
            if !self.eat_sym(")") {
                v.push(self.expr(names)?);
                while self.eat_sym(",") {
                    v.push(self.expr(names)?);
                }
                self.expect_sym(")")?;
            }
        }
        Ok(v)
    }

    fn ident_list(&mut self) -> Result<Vec<String>, QasmError> {
        let mut v = vec![self.ident()?.0];
        while self.eat_sym(",") {
            v.push(self.ident()?.0);
        }
        Ok(v)
    }

    fn gate_def(&mut self) -> Result<(), QasmError> {
        let (name, nt) = self.ident()?;
        let params = if self.eat_sym("(") {
            if self.eat_sym(")") {
                vec![]
            } else {
                let p = self.ident_list()?;
                self.expect_sym(")")?;
                p
            }
        } else {
            vec![]
        };
        let qargs = self.ident_list()?;
        for (i, a) in qargs.iter().enumerate() {
            if qargs[..i].contains(a) || params.contains(a) {
                return Err(err(QasmErrorKind::Semantic, &nt, format!("duplicate argument `{a}`")));
            }
        }
        self.expect_sym("{")?;
        let mut body = Vec::new();
        while !self.eat_sym("}") {
            let (op, t) = self.ident()?;
            let args_tok = self.peek().clone();
            if op == "barrier" {
                self.ident_list()?;
                self.expect_sym(";")?;
                continue;
            }
            let ps = self.call_params(&params)?;
            let names = self.ident_list()?;
            self.expect_sym(";")?;
            let callee = self.resolve(&op, &t, ps.len(), names.len())?;
            let mut args = Vec::with_capacity(names.len());
            for n in &names {
                let i = qargs.iter().position(|a| a == n).ok_or_else(|| {
                    err(QasmErrorKind::Semantic, &args_tok, format!("unknown qubit argument `{n}`"))
                })?;
                if args.contains(&i) {
                    return Err(err(QasmErrorKind::Semantic, &args_tok, format!("qubit `{n}` repeated")));
                }
                args.push(i);
            }
            body.push(BodyOp {
                callee,
                params: ps,
                args,
            });
        }
        self.scope.insert(name.clone(), self.prog.gates.len());
        self.prog.gates.push(GateDef {
            name,
            num_params: params.len(),
            num_qubits: qargs.len(),
            body,
        });
        Ok(())
    }

    fn expr(&mut self, names: &[String]) -> Result<Expr, QasmError> {
        let mut lhs = self.term(names)?;
        loop {
            let op = if self.eat_sym("+") {
                '+'
            } else if self.eat_sym("-") {
                '-'
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term(names)?));
        }
    }

    fn term(&mut self, names: &[String]) -> Result<Expr, QasmError> {
        let mut lhs = self.unary(names)?;
        loop {
            let op = if self.eat_sym("*") {
                '*'
            } else if self.eat_sym("/") {
                '/'
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary(names)?));
        }
    }

    fn unary(&mut self, names: &[String]) -> Result<Expr, QasmError> {
        if self.eat_sym("-") {
            return Ok(Expr::Neg(Box::new(self.unary(names)?)));
        }
        if self.eat_sym("+") {
            return self.unary(names);
        }
        let base = self.atom(names)?;
        if self.eat_sym("^") {
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary(names)?)));
        }
        Ok(base)
    }

    fn atom(&mut self, names: &[String]) -> Result<Expr, QasmError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(i) => {
                self.next();
                Ok(Expr::Num(*i as f64))
            }
            Tok::Real(r) => {
                self.next();
                Ok(Expr::Num(*r))
            }
            Tok::Sym("(") => {
                self.next();
                let e = self.expr(names)?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(s) => {
                self.next();
                let f = match s.as_str() {
                    "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "tan" => Func::Tan,
                    "exp" => Func::Exp,
                    "ln" => Func::Ln,
                    "sqrt" => Func::Sqrt,
                    other => {
                        return names
                            .iter()
                            .position(|n| n == other)
                            .map(Expr::Param)
                            .ok_or_else(|| {
                                err(QasmErrorKind::Semantic, &t, format!("unknown parameter `{other}`"))
                            })
                    }
                };
                self.expect_sym("(")?;
                let e = self.expr(names)?;
                self.expect_sym(")")?;
                Ok(Expr::Call(f, Box::new(e)))
            }
            _ => Err(self.syntax("an expression")),
        }
    }
}

/// Parses OpenQASM 2.0 source into its statement list.
pub fn parse_program(src: &str) -> Result<QasmProgram, QasmError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        prog: QasmProgram::default(),
        scope: HashMap::new(),
    };
    p.program()?;
    Ok(p.prog)
}

pub(super) fn register_offsets(regs: &[(String, usize)]) -> BTreeMap<&str, (usize, usize)> {
    let mut off = 0;
    let mut m = BTreeMap::new();
    for (name, size) in regs {
        m.insert(name.as_str(), (off, *size));
        off += size;
    }
    m
}

pub(super) fn expand(
    prog: &QasmProgram,
    callee: Callee,
    params: &[f64],
    qubits: &[usize],
    out: &mut Vec<crate::circuit::Gate>,
) {
    match callee {
        Callee::User(i) => {
            for op in &prog.gates[i].body {
                let ps: Vec<f64> = op.params.iter().map(|e| e.eval(params)).collect();
                let qs: Vec<usize> = op.args.iter().map(|&i| qubits[i]).collect();
                expand(prog, op.callee, &ps, &qs, out);
            }
        }
        Callee::Builtin(b) => out.push(builtin::gate(b, params, qubits)),
    }
}
