//! OpenQASM 2 subset reader and writer.
//!
//! Accepted statements: `OPENQASM 2.0;`, `include "qelib1.inc";` (ignored),
//! `qreg`, `creg`, `opaque sw a,b;`, `opaque sdel a;`, `measure`, `barrier` and
//! the gates h, x, sx, rx, ry, rz, cx, cz, swap, iswap, ecr (plus sw/sdel once
//! declared). Angles are decimals or small products/quotients involving `pi`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::circuit::{Circuit, GateKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
    Arrow,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |i: &mut usize, n: usize| {
            *i += n;
            col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            advance(&mut i, 1);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, 1);
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[s..i].iter().collect()),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit))
        {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                advance(&mut i, 1);
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    let n = j - i;
                    advance(&mut i, n);
                }
            }
            let lit: String = chars[s..i].iter().collect();
            let v = lit.parse::<f64>().map_err(|_| Error::Parse {
                line: l0,
                column: c0,
                message: format!("bad number `{lit}`"),
            })?;
            out.push(Spanned {
                tok: Tok::Num(v),
                line: l0,
                col: c0,
            });
        } else if c == '"' {
            let s = i + 1;
            let mut j = s;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += 1;
            }
            if chars.get(j) != Some(&'"') {
                return Err(Error::Parse {
                    line: l0,
                    column: c0,
                    message: "unterminated string".into(),
                });
            }
            let n = j + 1 - i;
            out.push(Spanned {
                tok: Tok::Str(chars[s..j].iter().collect()),
                line: l0,
                col: c0,
            });
            advance(&mut i, n);
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Spanned {
                tok: Tok::Arrow,
                line: l0,
                col: c0,
            });
            advance(&mut i, 2);
        } else if ";,[](){}-*/+".contains(c) {
            out.push(Spanned {
                tok: Tok::Sym(c),
                line: l0,
                col: c0,
            });
            advance(&mut i, 1);
        } else {
            return Err(Error::Parse {
                line: l0,
                column: c0,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Register {
    name: String,
    offset: usize,
    size: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<String>,
    opaque_sw: bool,
    opaque_sdel: bool,
    ops: Vec<(GateKind, Vec<usize>, Vec<f64>, usize)>,
}

/// A qubit argument: one element or a whole register.
enum Arg {
    One(usize),
    Reg(usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        match self.peek().or_else(|| self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Result<Spanned> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Spanned { tok: Tok::Sym(s), .. }) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.next()?.tok {
            Tok::Ident(s) => Ok(s),
            _ => {
                self.pos -= 1;
                self.err("expected identifier")
            }
        }
    }

    fn uint(&mut self) -> Result<usize> {
        match self.next()?.tok {
            Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
            _ => {
                self.pos -= 1;
                self.err("expected non-negative integer")
            }
        }
    }

    fn angle(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                let d = self.unary()?;
                if d == 0.0 {
                    return self.err("division by zero in angle");
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        match self.next()?.tok {
            Tok::Num(v) => Ok(v),
            Tok::Ident(s) if s == "pi" => Ok(PI),
            _ => {
                self.pos -= 1;
                self.err("unsupported angle expression")
            }
        }
    }

    fn arg(&mut self) -> Result<Arg> {
        let name = self.ident()?;
        let Some(reg) = self.qregs.iter().find(|r| r.name == name) else {
            self.pos -= 1;
            return self.err(format!("unknown quantum register `{name}`"));
        };
        let (offset, size) = (reg.offset, reg.size);
        if self.eat_sym('[') {
            let i = self.uint()?;
            self.expect_sym(']')?;
            if i >= size {
                return Err(Error::validation(format!(
                    "qubit {name}[{i}] out of range for register of size {size}"
                )));
            }
            Ok(Arg::One(offset + i))
        } else {
            Ok(Arg::Reg(offset, size))
        }
    }

    fn args(&mut self) -> Result<Vec<Arg>> {
        let mut out = vec![self.arg()?];
        while self.eat_sym(',') {
            out.push(self.arg()?);
        }
        Ok(out)
    }

    /// Expands register arguments element-wise (all registers must agree in size).
    fn broadcast(&self, args: &[Arg]) -> Result<Vec<Vec<usize>>> {
        let sizes: Vec<usize> = args
            .iter()
            .filter_map(|a| match a {
                Arg::Reg(_, s) => Some(*s),
                Arg::One(_) => None,
            })
            .collect();
        let Some(&size) = sizes.first() else {
            return Ok(vec![args
                .iter()
                .map(|a| match a {
                    Arg::One(q) => *q,
                    Arg::Reg(..) => unreachable!(),
                })
                .collect()]);
        };
        if sizes.iter().any(|&s| s != size) {
            return self.err("register arguments of different sizes");
        }
        Ok((0..size)
            .map(|i| {
                args.iter()
                    .map(|a| match a {
                        Arg::One(q) => *q,
                        Arg::Reg(o, _) => o + i,
                    })
                    .collect()
            })
            .collect())
    }

    fn statement(&mut self) -> Result<()> {
        let start = self.next()?;
        let line = start.line;
        let word = match start.tok {
            Tok::Ident(s) => s,
            _ => {
                self.pos -= 1;
                return self.err("expected statement");
            }
        };
        match word.as_str() {
            "OPENQASM" => {
                match self.next()?.tok {
                    Tok::Num(v) if v == 2.0 => {}
                    _ => {
                        self.pos -= 1;
                        return self.err("only OPENQASM 2.0 is supported");
                    }
                }
                self.expect_sym(';')
            }
            "include" => {
                match self.next()?.tok {
                    Tok::Str(_) => {}
                    _ => {
                        self.pos -= 1;
                        return self.err("expected file name");
                    }
                }
                self.expect_sym(';')
            }
            "qreg" | "creg" => {
                let name = self.ident()?;
                self.expect_sym('[')?;
                let size = self.uint()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                if self.qregs.iter().any(|r| r.name == name) || self.cregs.contains(&name) {
                    return self.err(format!("register `{name}` declared twice"));
                }
                if word == "qreg" {
                    let offset = self.qregs.last().map_or(0, |r| r.offset + r.size);
                    self.qregs.push(Register { name, offset, size });
                } else {
                    self.cregs.push(name);
                }
                Ok(())
            }
            "opaque" => {
                let name = self.ident()?;
                let mut params = Vec::new();
                params.push(self.ident()?);
                while self.eat_sym(',') {
                    params.push(self.ident()?);
                }
                self.expect_sym(';')?;
                match (name.as_str(), params.len()) {
                    ("sw", 2) => self.opaque_sw = true,
                    ("sdel", 1) => self.opaque_sdel = true,
                    _ => {
                        return Err(Error::Unsupported {
                            token: format!("opaque {name}"),
                            line: Some(line),
                        })
                    }
                }
                Ok(())
            }
            "measure" => {
                let q = self.arg()?;
                if !matches!(self.next()?.tok, Tok::Arrow) {
                    self.pos -= 1;
                    return self.err("expected `->`");
                }
                let c = self.ident()?;
                if !self.cregs.contains(&c) {
                    self.pos -= 1;
                    return self.err(format!("unknown classical register `{c}`"));
                }
                if self.eat_sym('[') {
                    self.uint()?;
                    self.expect_sym(']')?;
                }
                self.expect_sym(';')?;
                for qs in self.broadcast(&[q])? {
                    self.ops.push((GateKind::Measure, qs, vec![], line));
                }
                Ok(())
            }
            "barrier" => {
                let args = self.args()?;
                self.expect_sym(';')?;
                let mut qs = Vec::new();
                for a in args {
                    match a {
                        Arg::One(q) => qs.push(q),
                        Arg::Reg(o, s) => qs.extend(o..o + s),
                    }
                }
                self.ops.push((GateKind::Barrier, qs, vec![], line));
                Ok(())
            }
            _ => {
                let kind = match word.as_str() {
                    "h" => GateKind::H,
                    "x" => GateKind::X,
                    "sx" => GateKind::Sx,
                    "rx" => GateKind::Rx,
                    "ry" => GateKind::Ry,
                    "rz" => GateKind::Rz,
                    "cx" => GateKind::Cx,
                    "cz" => GateKind::Cz,
                    "swap" => GateKind::Swap,
                    "iswap" => GateKind::ISwap,
                    "ecr" => GateKind::Ecr,
                    "sw" if self.opaque_sw => GateKind::Sw,
                    "sdel" if self.opaque_sdel => GateKind::SDel,
                    _ => {
                        return Err(Error::Unsupported {
                            token: word,
                            line: Some(line),
                        })
                    }
                };
                let mut params = Vec::new();
                if self.eat_sym('(') {
                    params.push(self.angle()?);
                    while self.eat_sym(',') {
                        params.push(self.angle()?);
                    }
                    self.expect_sym(')')?;
                }
                if params.len() != kind.num_params() {
                    return self.err(format!(
                        "{word} takes {} parameter(s), got {}",
                        kind.num_params(),
                        params.len()
                    ));
                }
                let args = self.args()?;
                self.expect_sym(';')?;
                for qs in self.broadcast(&args)? {
                    self.ops.push((kind, qs, params.clone(), line));
                }
                Ok(())
            }
        }
    }
}

/// Parses an OpenQASM 2 program; registers are flattened in declaration order.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        qregs: Vec::new(),
        cregs: Vec::new(),
        opaque_sw: false,
        opaque_sdel: false,
        ops: Vec::new(),
    };
    while p.pos < p.toks.len() {
        p.statement()?;
    }
    let n = p.qregs.last().map_or(0, |r| r.offset + r.size);
    let mut circuit = Circuit::new(n);
    for (kind, qs, params, line) in p.ops {
        circuit.push(kind, &qs, &params).map_err(|e| match e {
            Error::Validation(m) => Error::Validation(format!("line {line}: {m}")),
            other => other,
        })?;
    }
    Ok(circuit)
}

/// Writes a single-register program (`q`, plus `c` when measuring).
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if circuit.gates.iter().any(|g| g.kind.is_mux()) {
        s.push_str("// pragma mux gates\nopaque sw a,b;\nopaque sdel a;\n");
    }
    let _ = writeln!(s, "qreg q[{}];", circuit.n);
    if circuit.gates.iter().any(|g| g.kind == GateKind::Measure) {
        let _ = writeln!(s, "creg c[{}];", circuit.n);
    }
    for g in &circuit.gates {
        let args = g
            .qubits
            .iter()
            .map(|q| format!("q[{q}]"))
            .collect::<Vec<_>>()
            .join(",");
        match g.kind {
            GateKind::Measure => {
                let _ = writeln!(s, "measure {args} -> c[{}];", g.qubits[0]);
            }
            kind => {
                let name = kind.name().to_ascii_lowercase();
                if g.params.is_empty() {
                    let _ = writeln!(s, "{name} {args};");
                } else {
                    let ps = g
                        .params
                        .iter()
                        .map(|p| format!("{p:?}"))
                        .collect::<Vec<_>>()
                        .join(",");
                    let _ = writeln!(s, "{name}({ps}) {args};");
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn parses_minimal_program() {
        let c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        assert!(c.same_structure(&Circuit::new(2).h(0).cx(0, 1)));
    }

    #[test]
    fn parses_pi_angles() {
        let c =
            parse_qasm("qreg q[1]; rz(pi/2) q[0]; rx(-pi/4) q[0]; ry(2*pi) q[0]; rz(0.25) q[0];")
                .unwrap();
        let ps: Vec<f64> = c.gates.iter().map(|g| g.params[0]).collect();
        assert_eq!(ps, vec![FRAC_PI_2, -PI / 4.0, 2.0 * PI, 0.25]);
        assert_eq!(c.gates[0].kind, GateKind::Rz);
    }

    #[test]
    fn multi_register_flattening() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg a[2];\nqreg b[3];\ncreg m[5];\ncx a[1],b[0];\nh b;\nmeasure b[2] -> m[4];\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.n, 5);
        assert_eq!(c.gates[0].qubits, vec![1, 2]);
        assert_eq!(c.gates.len(), 1 + 3 + 1);
        assert_eq!(c.gates[4].qubits, vec![4]);
    }

    #[test]
    fn unsupported_gate_names_token_and_line() {
        let err = parse_qasm("qreg q[1];\nh q[0];\nu3(0,0,0) q[0];").unwrap_err();
        match err {
            Error::Unsupported { token, line } => {
                assert_eq!(token, "u3");
                assert_eq!(line, Some(3));
            }
            e => panic!("{e}"),
        }
        // sw without the opaque declaration is just an unknown gate
        assert!(matches!(
            parse_qasm("qreg q[2]; sw q[0],q[1];"),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn syntax_and_range_errors() {
        assert!(matches!(
            parse_qasm("qreg q[2];\nh q[0]"),
            Err(Error::Parse { .. })
        ));
        match parse_qasm("qreg q[2];\ncx q[0] q[1];") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_qasm("qreg q[2]; h q[2];"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_qasm("qreg q[1]; rz(pi+1) q[0];"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn empty_circuit_is_header_only() {
        let s = emit_qasm(&Circuit::new(0));
        assert_eq!(s, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[0];\n");
        assert_eq!(parse_qasm(&s).unwrap(), Circuit::new(0));
    }

    #[test]
    fn mux_gates_get_opaque_header() {
        let c = Circuit::new(1).gate(GateKind::SDel, &[0], &[]);
        let s = emit_qasm(&c);
        assert!(s.contains("// pragma mux gates\nopaque sw a,b;\nopaque sdel a;\n"));
        assert!(s.contains("sdel q[0];"));
        assert!(parse_qasm(&s).unwrap().same_structure(&c));
    }

    #[test]
    fn roundtrip_every_kind() {
        let mut c = Circuit::new(3);
        for kind in GateKind::ALL {
            let qs: Vec<usize> = (0..kind.arity().unwrap_or(3)).collect();
            let ps = vec![0.1234567890123; kind.num_params()];
            c.push(kind, &qs, &ps).unwrap();
        }
        assert!(parse_qasm(&emit_qasm(&c)).unwrap().same_structure(&c));
    }
}
