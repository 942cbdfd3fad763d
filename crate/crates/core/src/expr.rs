//! Closed-form scalar expressions over chart coordinates.
//!
//! Every component function of a metric, complex structure or connection is an
//! [`ExprNode`]. Expressions are parsed from text, evaluated at points, and
//! differentiated exactly; derivatives are again expressions.

use std::fmt;

use thiserror::Error;

/// Elementary functions accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

/// Expression tree. Sums and products are n-ary.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Constant(f64),
    /// Zero-based coordinate index.
    Coord(usize),
    Neg(Box<ExprNode>),
    Sum(Vec<ExprNode>),
    Product(Vec<ExprNode>),
    Quotient(Box<ExprNode>, Box<ExprNode>),
    /// Integer powers only; general powers go through `exp`/`log`.
    Power(Box<ExprNode>, i32),
    Apply(Func, Box<ExprNode>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("arity mismatch at byte {offset}: `{name}` takes {expected} argument(s), found {found}")]
    Arity {
        name: String,
        offset: usize,
        expected: usize,
        found: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in `{expr}`")]
    DivisionByZero { expr: String },
    #[error("log of non-positive value {value} in `{expr}`")]
    LogDomain { expr: String, value: f64 },
    #[error("coordinate x{} out of range for a point of dimension {dim}", .index + 1)]
    CoordinateOutOfRange { index: usize, dim: usize },
    #[error("non-finite value in `{expr}`")]
    NonFinite { expr: String },
}

/// Default coordinate names `x1..x{dim}`.
pub fn default_coordinate_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

pub fn parse_expr<S: AsRef<str>>(text: &str, coordinate_names: &[S]) -> Result<ExprNode, ParseError> {
    let names: Vec<&str> = coordinate_names.iter().map(|s| s.as_ref()).collect();
    let mut parser = Parser {
        src: text,
        bytes: text.as_bytes(),
        pos: 0,
        names: &names,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.bytes.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else if self.pos >= self.bytes.len() {
            Err(self.syntax(&format!("expected `{}`, found end of input", c as char)))
        } else {
            Err(self.syntax(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ExprNode, ParseError> {
        let first = self.term()?;
        let mut terms = vec![first];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    terms.push(ExprNode::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            ExprNode::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<ExprNode, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = match acc {
                        ExprNode::Product(mut fs) => {
                            fs.push(rhs);
                            ExprNode::Product(fs)
                        }
                        other => ExprNode::Product(vec![other, rhs]),
                    };
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = ExprNode::Quotient(Box::new(acc), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<ExprNode, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.integer()?;
            return Ok(ExprNode::Power(Box::new(base), exponent));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.syntax("expected integer exponent"));
        }
        self.src[start..self.pos].parse::<i32>().map_err(|_| ParseError::Syntax {
            offset: start,
            message: "exponent out of range".into(),
        })
    }

    fn number(&mut self) -> Result<ExprNode, ParseError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < b.len() && (b[self.pos] == b'+' || b[self.pos] == b'-') {
                self.pos += 1;
            }
            let exp_digits = self.pos;
            while self.pos < b.len() && b[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == exp_digits {
                // `2e` followed by something else: not an exponent
                self.pos = mark;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(ExprNode::Constant)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })
    }

    fn base(&mut self) -> Result<ExprNode, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(ExprNode::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                if let Some(func) = Func::from_name(name) {
                    if self.peek() != Some(b'(') {
                        return Err(ParseError::Arity {
                            name: name.into(),
                            offset: start,
                            expected: 1,
                            found: 0,
                        });
                    }
                    self.pos += 1;
                    if self.peek() == Some(b')') {
                        return Err(ParseError::Arity {
                            name: name.into(),
                            offset: start,
                            expected: 1,
                            found: 0,
                        });
                    }
                    let arg = self.expr()?;
                    let mut found = 1;
                    while self.peek() == Some(b',') {
                        self.pos += 1;
                        self.expr()?;
                        found += 1;
                    }
                    if found != 1 {
                        return Err(ParseError::Arity {
                            name: name.into(),
                            offset: start,
                            expected: 1,
                            found,
                        });
                    }
                    self.expect(b')')?;
                    return Ok(ExprNode::Apply(func, Box::new(arg)));
                }
                match self.names.iter().position(|n| *n == name) {
                    Some(index) => {
                        if self.peek() == Some(b'(') {
                            return Err(ParseError::Arity {
                                name: name.into(),
                                offset: start,
                                expected: 0,
                                found: 1,
                            });
                        }
                        Ok(ExprNode::Coord(index))
                    }
                    None => Err(ParseError::UnknownIdentifier {
                        name: name.into(),
                        offset: start,
                    }),
                }
            }
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }
}

impl ExprNode {
    pub fn constant(c: f64) -> ExprNode {
        ExprNode::Constant(c)
    }

    pub fn coord(i: usize) -> ExprNode {
        ExprNode::Coord(i)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExprNode::Constant(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, ExprNode::Constant(c) if *c == 1.0)
    }

    /// True when no coordinate appears in the tree.
    pub fn is_constant(&self) -> bool {
        self.max_coord().is_none()
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            ExprNode::Constant(_) => None,
            ExprNode::Coord(i) => Some(*i),
            ExprNode::Neg(a) | ExprNode::Power(a, _) | ExprNode::Apply(_, a) => a.max_coord(),
            ExprNode::Quotient(a, b) => a.max_coord().max(b.max_coord()),
            ExprNode::Sum(xs) | ExprNode::Product(xs) => xs.iter().filter_map(|x| x.max_coord()).max(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            ExprNode::Constant(_) | ExprNode::Coord(_) => 0,
            ExprNode::Neg(a) | ExprNode::Power(a, _) | ExprNode::Apply(_, a) => a.size(),
            ExprNode::Quotient(a, b) => a.size() + b.size(),
            ExprNode::Sum(xs) | ExprNode::Product(xs) => xs.iter().map(ExprNode::size).sum(),
        }
    }

    // Folding constructors used by `differentiate` so derivative trees of
    // polynomials stay small. They only drop neutral elements and fold
    // constants; they never reorder or expand.

    pub fn negate(a: ExprNode) -> ExprNode {
        match a {
            ExprNode::Constant(c) => ExprNode::Constant(-c),
            ExprNode::Neg(inner) => *inner,
            other => ExprNode::Neg(Box::new(other)),
        }
    }

    pub fn sum(terms: Vec<ExprNode>) -> ExprNode {
        let mut out = Vec::with_capacity(terms.len());
        let mut constant = 0.0;
        for t in terms {
            match t {
                ExprNode::Constant(c) => constant += c,
                ExprNode::Sum(inner) => {
                    for u in inner {
                        match u {
                            ExprNode::Constant(c) => constant += c,
                            u => out.push(u),
                        }
                    }
                }
                t => out.push(t),
            }
        }
        if constant != 0.0 {
            out.push(ExprNode::Constant(constant));
        }
        match out.len() {
            0 => ExprNode::Constant(0.0),
            1 => out.pop().unwrap(),
            _ => ExprNode::Sum(out),
        }
    }

    pub fn product(factors: Vec<ExprNode>) -> ExprNode {
        let mut out = Vec::with_capacity(factors.len());
        let mut constant = 1.0;
        for f in factors {
            match f {
                ExprNode::Constant(c) => constant *= c,
                ExprNode::Product(inner) => {
                    for u in inner {
                        match u {
                            ExprNode::Constant(c) => constant *= c,
                            u => out.push(u),
                        }
                    }
                }
                f => out.push(f),
            }
        }
        if constant == 0.0 {
            return ExprNode::Constant(0.0);
        }
        if constant != 1.0 {
            out.insert(0, ExprNode::Constant(constant));
        }
        match out.len() {
            0 => ExprNode::Constant(1.0),
            1 => out.pop().unwrap(),
            _ => ExprNode::Product(out),
        }
    }

    pub fn quotient(a: ExprNode, b: ExprNode) -> ExprNode {
        if a.is_zero() {
            return ExprNode::Constant(0.0);
        }
        if b.is_one() {
            return a;
        }
        ExprNode::Quotient(Box::new(a), Box::new(b))
    }

    pub fn power(a: ExprNode, n: i32) -> ExprNode {
        match n {
            0 => ExprNode::Constant(1.0),
            1 => a,
            _ => match a {
                ExprNode::Constant(c) => ExprNode::Constant(c.powi(n)),
                a => ExprNode::Power(Box::new(a), n),
            },
        }
    }

    pub fn apply(f: Func, a: ExprNode) -> ExprNode {
        ExprNode::Apply(f, Box::new(a))
    }

    /// Exact partial derivative with respect to coordinate `i`.
    pub fn differentiate(&self, i: usize) -> ExprNode {
        match self {
            ExprNode::Constant(_) => ExprNode::Constant(0.0),
            ExprNode::Coord(j) => ExprNode::Constant(if *j == i { 1.0 } else { 0.0 }),
            ExprNode::Neg(a) => ExprNode::negate(a.differentiate(i)),
            ExprNode::Sum(xs) => ExprNode::sum(xs.iter().map(|x| x.differentiate(i)).collect()),
            ExprNode::Product(fs) => {
                let mut terms = Vec::new();
                for (k, f) in fs.iter().enumerate() {
                    let df = f.differentiate(i);
                    if df.is_zero() {
                        continue;
                    }
                    let mut factors = fs.clone();
                    factors[k] = df;
                    terms.push(ExprNode::product(factors));
                }
                ExprNode::sum(terms)
            }
            ExprNode::Quotient(a, b) => {
                let da = a.differentiate(i);
                let db = b.differentiate(i);
                if db.is_zero() {
                    return ExprNode::quotient(da, (**b).clone());
                }
                let numerator = ExprNode::sum(vec![
                    ExprNode::product(vec![da, (**b).clone()]),
                    ExprNode::negate(ExprNode::product(vec![(**a).clone(), db])),
                ]);
                ExprNode::quotient(numerator, ExprNode::power((**b).clone(), 2))
            }
            ExprNode::Power(a, n) => {
                let da = a.differentiate(i);
                if da.is_zero() || *n == 0 {
                    return ExprNode::Constant(0.0);
                }
                ExprNode::product(vec![
                    ExprNode::Constant(*n as f64),
                    ExprNode::power((**a).clone(), n - 1),
                    da,
                ])
            }
            ExprNode::Apply(f, a) => {
                let da = a.differentiate(i);
                if da.is_zero() {
                    return ExprNode::Constant(0.0);
                }
                let a = (**a).clone();
                match f {
                    Func::Sin => ExprNode::product(vec![ExprNode::apply(Func::Cos, a), da]),
                    Func::Cos => ExprNode::negate(ExprNode::product(vec![ExprNode::apply(Func::Sin, a), da])),
                    Func::Exp => ExprNode::product(vec![ExprNode::apply(Func::Exp, a), da]),
                    Func::Log => ExprNode::quotient(da, a),
                }
            }
        }
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            ExprNode::Constant(c) => *c,
            ExprNode::Coord(i) => *point.get(*i).ok_or(EvalError::CoordinateOutOfRange {
                index: *i,
                dim: point.len(),
            })?,
            ExprNode::Neg(a) => -a.eval(point)?,
            ExprNode::Sum(xs) => {
                let mut s = 0.0;
                for x in xs {
                    s += x.eval(point)?;
                }
                s
            }
            ExprNode::Product(fs) => {
                let mut p = 1.0;
                for f in fs {
                    p *= f.eval(point)?;
                }
                p
            }
            ExprNode::Quotient(a, b) => {
                let den = b.eval(point)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero { expr: self.to_string() });
                }
                a.eval(point)? / den
            }
            ExprNode::Power(a, n) => {
                let base = a.eval(point)?;
                if base == 0.0 && *n < 0 {
                    return Err(EvalError::DivisionByZero { expr: self.to_string() });
                }
                base.powi(*n)
            }
            ExprNode::Apply(f, a) => {
                let x = a.eval(point)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(EvalError::LogDomain {
                                expr: self.to_string(),
                                value: x,
                            });
                        }
                        x.ln()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { expr: self.to_string() })
        }
    }

    /// Fully parenthesised rendering that re-parses to an equivalent tree.
    pub fn display_with<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        Rendered { expr: self, names }
    }

    fn render<S: AsRef<str>>(&self, f: &mut fmt::Formatter<'_>, names: &[S]) -> fmt::Result {
        match self {
            ExprNode::Constant(c) => {
                if *c < 0.0 {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            ExprNode::Coord(i) => match names.get(*i) {
                Some(n) => write!(f, "{}", n.as_ref()),
                None => write!(f, "x{}", i + 1),
            },
            ExprNode::Neg(a) => {
                write!(f, "(-(")?;
                a.render(f, names)?;
                write!(f, "))")
            }
            ExprNode::Sum(xs) | ExprNode::Product(xs) => {
                let op = if matches!(self, ExprNode::Sum(_)) { " + " } else { "*" };
                write!(f, "(")?;
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, "{op}")?;
                    }
                    x.render(f, names)?;
                }
                write!(f, ")")
            }
            ExprNode::Quotient(a, b) => {
                write!(f, "(")?;
                a.render(f, names)?;
                write!(f, "/")?;
                b.render(f, names)?;
                write!(f, ")")
            }
            ExprNode::Power(a, n) => {
                write!(f, "(")?;
                a.render(f, names)?;
                write!(f, ")^{n}")
            }
            ExprNode::Apply(func, a) => {
                write!(f, "{}(", func.name())?;
                a.render(f, names)?;
                write!(f, ")")
            }
        }
    }
}

struct Rendered<'a, S> {
    expr: &'a ExprNode,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for Rendered<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.render(f, self.names)
    }
}

impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render::<&str>(f, &[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(d: usize) -> Vec<String> {
        default_coordinate_names(d)
    }

    fn p(s: &str) -> ExprNode {
        parse_expr(s, &names(2)).unwrap()
    }

    #[test]
    fn parses_polynomial_into_nary_sum() {
        let e = p("x1^2 - x2^2 + 1");
        assert_eq!(
            e,
            ExprNode::Sum(vec![
                ExprNode::Power(Box::new(ExprNode::Coord(0)), 2),
                ExprNode::Neg(Box::new(ExprNode::Power(Box::new(ExprNode::Coord(1)), 2))),
                ExprNode::Constant(1.0),
            ])
        );
    }

    #[test]
    fn parses_product_chain() {
        assert_eq!(
            p("2*x1*x2"),
            ExprNode::Product(vec![ExprNode::Constant(2.0), ExprNode::Coord(0), ExprNode::Coord(1)])
        );
    }

    #[test]
    fn unclosed_call_reports_end_offset() {
        let err = parse_expr("sin(", &names(2)).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 4, .. }), "{err:?}");
    }

    #[test]
    fn identifier_and_arity_errors() {
        assert!(matches!(
            parse_expr("x1 + y", &names(2)),
            Err(ParseError::UnknownIdentifier { offset: 5, .. })
        ));
        assert!(matches!(
            parse_expr("sin(x1, x2)", &names(2)),
            Err(ParseError::Arity { found: 2, .. })
        ));
        assert!(matches!(parse_expr("cos + 1", &names(2)), Err(ParseError::Arity { found: 0, .. })));
        assert!(matches!(parse_expr("x1(2)", &names(2)), Err(ParseError::Arity { .. })));
        assert!(matches!(parse_expr("x1 x2", &names(2)), Err(ParseError::Syntax { offset: 3, .. })));
    }

    #[test]
    fn numbers_with_exponents_and_custom_names() {
        let e = parse_expr("1.5e-1*u + .5 - 2E2", &["u", "v"]).unwrap();
        assert!((e.eval(&[2.0, 0.0]).unwrap() - (0.3 + 0.5 - 200.0)).abs() < 1e-12);
        let e = parse_expr("v^-2", &["u", "v"]).unwrap();
        assert_eq!(e.eval(&[0.0, 2.0]).unwrap(), 0.25);
    }

    #[test]
    fn unary_minus_binds_to_base() {
        // grammar: factor := base ("^" integer)?, base := "-" base
        assert_eq!(p("-x1^2").eval(&[3.0, 0.0]).unwrap(), 9.0);
        assert_eq!(p("0 - x1^2").eval(&[3.0, 0.0]).unwrap(), -9.0);
    }

    #[test]
    fn evaluates_examples() {
        assert_eq!(p("x1^2 - x2^2 + 1").eval(&[2.0, 1.0]).unwrap(), 4.0);
        assert_eq!(p("2*x1*x2").eval(&[2.0, 1.0]).unwrap(), 4.0);
    }

    #[test]
    fn eval_errors_name_subexpression() {
        match p("1/x1").eval(&[0.0, 0.0]) {
            Err(EvalError::DivisionByZero { expr }) => assert!(expr.contains("x1"), "{expr}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(p("log(x1 - 1)").eval(&[0.5, 0.0]), Err(EvalError::LogDomain { .. })));
        assert!(matches!(p("x1^-1").eval(&[0.0, 0.0]), Err(EvalError::DivisionByZero { .. })));
    }

    #[test]
    fn derivative_examples() {
        let d = p("x1^2 - x2^2 + 1").differentiate(0);
        for pt in [[0.3, -0.7], [2.0, 5.0]] {
            assert_eq!(d.eval(&pt).unwrap(), 2.0 * pt[0]);
        }
        assert_eq!(p("x1").differentiate(1), ExprNode::Constant(0.0));
        let d = p("sin(x1*x2)").differentiate(0);
        let pt = [0.4, 1.3];
        assert!((d.eval(&pt).unwrap() - pt[1] * (pt[0] * pt[1]).cos()).abs() < 1e-15);
    }

    #[test]
    fn quotient_log_exp_derivatives() {
        let e = p("exp(x1)/x2 + log(x1*x2) - cos(x2)");
        let pt = [0.7, 1.9];
        let d0 = e.differentiate(0).eval(&pt).unwrap();
        let d1 = e.differentiate(1).eval(&pt).unwrap();
        assert!((d0 - (pt[0].exp() / pt[1] + 1.0 / pt[0])).abs() < 1e-13);
        assert!((d1 - (-pt[0].exp() / (pt[1] * pt[1]) + 1.0 / pt[1] + pt[1].sin())).abs() < 1e-13);
    }

    #[test]
    fn display_round_trips() {
        let n = names(2);
        for s in ["x1^2 - x2^2 + 1", "-2.5*x1/(x2 + 3)", "exp(-x1)*sin(x2)^3", "(x1 - 1e-7)^-2"] {
            let e = parse_expr(s, &n).unwrap();
            let back = parse_expr(&e.display_with(&n).to_string(), &n).unwrap();
            let pt = [0.37, -1.21];
            assert_eq!(e.eval(&pt).unwrap(), back.eval(&pt).unwrap(), "{s}");
        }
    }
}
