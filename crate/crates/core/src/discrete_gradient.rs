//! Two-point discrete gradients on a planar state space.
//!
//! A discrete gradient `dg(p1, p2)` of a scalar function `g` satisfies
//! `<dg(p1, p2), p2 - p1> = g(p2) - g(p1)` and `dg(p, p) = grad g(p)`.
//! Fields may be vector valued (`K` outputs sharing one evaluation), which is
//! how the flux evaluates `p/T` and `g/T` together.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn lerp(self, other: Self, s: f64) -> Self {
        Self::new(self.x + s * (other.x - self.x), self.y + s * (other.y - self.y))
    }
}

/// A differentiable map from the plane to `R^K`.
pub trait Field2<const K: usize> {
    type Error;

    fn value(&self, p: Point2) -> Result<[f64; K], Self::Error>;

    /// `[[dg_k/dx, dg_k/dy]; K]`
    fn gradient(&self, p: Point2) -> Result<[[f64; 2]; K], Self::Error>;

    /// `g(b) - g(a)` given both values. Fields whose values are large next
    /// to their jumps can override this with a cancellation-free form.
    #[inline]
    fn jump(&self, _a: Point2, _b: Point2, va: &[f64; K], vb: &[f64; K]) -> Result<[f64; K], Self::Error> {
        Ok(std::array::from_fn(|k| vb[k] - va[k]))
    }
}

/// Scalar field built from two closures.
pub struct FnField<V, G> {
    pub value: V,
    pub gradient: G,
}

impl<V, G> Field2<1> for FnField<V, G>
where
    V: Fn(Point2) -> f64,
    G: Fn(Point2) -> [f64; 2],
{
    type Error = std::convert::Infallible;

    fn value(&self, p: Point2) -> Result<[f64; 1], Self::Error> {
        Ok([(self.value)(p)])
    }

    fn gradient(&self, p: Point2) -> Result<[[f64; 2]; 1], Self::Error> {
        Ok([(self.gradient)(p)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DgKind {
    /// Mean value operator by Gauss-Legendre quadrature.
    MeanValue,
    /// Gonzalez midpoint operator.
    Gonzalez,
    /// Symmetrized Itoh-Abe operator.
    SymmetrizedItohAbe,
}

impl DgKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DgKind::MeanValue => "mvdg",
            DgKind::Gonzalez => "gdg",
            DgKind::SymmetrizedItohAbe => "siadg",
        }
    }
}

impl fmt::Display for DgKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DgKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mvdg" => Ok(DgKind::MeanValue),
            "gdg" | "gonzalez" => Ok(DgKind::Gonzalez),
            "siadg" => Ok(DgKind::SymmetrizedItohAbe),
            other => Err(format!(
                "unknown discrete gradient '{other}'; valid names: mvdg, gdg, siadg"
            )),
        }
    }
}

/// Operator selection and its tuning knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgChoice {
    pub kind: DgKind,
    /// Gauss-Legendre points for the mean value operator.
    pub quadrature_order: usize,
    /// Near-coincident switch of the Itoh-Abe operator. When off, the
    /// analytic branch is only taken for exactly equal coordinates.
    pub switch_enabled: bool,
    /// Multiplies the switch tolerance.
    pub switch_scale: f64,
}

impl Default for DgChoice {
    fn default() -> Self {
        Self {
            kind: DgKind::SymmetrizedItohAbe,
            quadrature_order: 10,
            switch_enabled: true,
            switch_scale: 1.0,
        }
    }
}

impl DgChoice {
    pub fn siadg(switch_enabled: bool) -> Self {
        Self {
            switch_enabled,
            ..Self::default()
        }
    }

    pub fn gonzalez() -> Self {
        Self {
            kind: DgKind::Gonzalez,
            ..Self::default()
        }
    }

    pub fn mvdg(order: usize) -> Self {
        Self {
            kind: DgKind::MeanValue,
            quadrature_order: order,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.kind == DgKind::MeanValue && self.quadrature_order < 2 {
            return Err(format!(
                "quadrature_order must be at least 2, got {}",
                self.quadrature_order
            ));
        }
        if !(self.switch_scale.is_finite() && self.switch_scale >= 0.0) {
            return Err(format!("switch_scale must be non-negative, got {}", self.switch_scale));
        }
        Ok(())
    }
}

/// Gauss-Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A ready-to-apply discrete gradient operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGradient {
    choice: DgChoice,
    rule: Option<GaussLegendre>,
}

impl DiscreteGradient {
    pub fn new(choice: DgChoice) -> Self {
        let rule = (choice.kind == DgKind::MeanValue)
            .then(|| GaussLegendre::new(choice.quadrature_order));
        Self { choice, rule }
    }

    pub fn choice(&self) -> &DgChoice {
        &self.choice
    }

    pub fn apply<F: Field2<K>, const K: usize>(
        &self,
        field: &F,
        p1: Point2,
        p2: Point2,
    ) -> Result<[[f64; 2]; K], F::Error> {
        self.apply_with_values(field, p1, p2, None)
    }

    /// Like [`apply`](Self::apply) but reuses already known endpoint values.
    pub fn apply_with_values<F: Field2<K>, const K: usize>(
        &self,
        field: &F,
        p1: Point2,
        p2: Point2,
        values: Option<([f64; K], [f64; K])>,
    ) -> Result<[[f64; 2]; K], F::Error> {
        match self.choice.kind {
            DgKind::MeanValue => mvdg_with_rule(field, p1, p2, self.rule.as_ref().expect("rule")),
            DgKind::Gonzalez => gonzalez_impl(field, p1, p2, values),
            DgKind::SymmetrizedItohAbe => siadg_impl(
                field,
                p1,
                p2,
                values,
                self.choice.switch_enabled,
                self.choice.switch_scale,
            ),
        }
    }
}

/// Mean value discrete gradient, `int_0^1 grad g(p1 + s (p2 - p1)) ds`.
pub fn mvdg<F: Field2<K>, const K: usize>(
    field: &F,
    p1: Point2,
    p2: Point2,
    order: usize,
) -> Result<[[f64; 2]; K], F::Error> {
    mvdg_with_rule(field, p1, p2, &GaussLegendre::new(order))
}

fn mvdg_with_rule<F: Field2<K>, const K: usize>(
    field: &F,
    p1: Point2,
    p2: Point2,
    rule: &GaussLegendre,
) -> Result<[[f64; 2]; K], F::Error> {
    if p1 == p2 {
        return field.gradient(p1);
    }
    let mut out = [[0.0; 2]; K];
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let g = field.gradient(p1.lerp(p2, s))?;
        for k in 0..K {
            out[k][0] += w * g[k][0];
            out[k][1] += w * g[k][1];
        }
    }
    Ok(out)
}

/// Gonzalez discrete gradient: midpoint gradient plus a rank-one correction
/// along `p2 - p1`.
pub fn gonzalez<F: Field2<K>, const K: usize>(
    field: &F,
    p1: Point2,
    p2: Point2,
) -> Result<[[f64; 2]; K], F::Error> {
    gonzalez_impl(field, p1, p2, None)
}

fn gonzalez_impl<F: Field2<K>, const K: usize>(
    field: &F,
    p1: Point2,
    p2: Point2,
    values: Option<([f64; K], [f64; K])>,
) -> Result<[[f64; 2]; K], F::Error> {
    if p1 == p2 {
        return field.gradient(p1);
    }
    let (g1, g2) = match values {
        Some(v) => v,
        None => (field.value(p1)?, field.value(p2)?),
    };
    let mid = Point2::new(0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y));
    let grad = field.gradient(mid)?;
    let (dx, dy) = (p2.x - p1.x, p2.y - p1.y);
    let norm2 = dx * dx + dy * dy;
    let jump = field.jump(p1, p2, &g1, &g2)?;
    let mut out = grad;
    for k in 0..K {
        let c = (jump[k] - (grad[k][0] * dx + grad[k][1] * dy)) / norm2;
        out[k][0] += c * dx;
        out[k][1] += c * dy;
    }
    Ok(out)
}

/// Switch tolerance of the Itoh-Abe operator for one coordinate.
#[inline]
pub fn switch_tolerance(a: f64, b: f64) -> f64 {
    10.0 * f64::EPSILON + f64::EPSILON.sqrt() * a.abs().max(b.abs())
}

/// Symmetrized Itoh-Abe discrete gradient with the near-coincident switch.
pub fn siadg<F: Field2<K>, const K: usize>(
    field: &F,
    p1: Point2,
    p2: Point2,
    switch_enabled: bool,
) -> Result<[[f64; 2]; K], F::Error> {
    siadg_impl(field, p1, p2, None, switch_enabled, 1.0)
}

fn siadg_impl<F: Field2<K>, const K: usize>(
    field: &F,
    p1: Point2,
    p2: Point2,
    values: Option<([f64; K], [f64; K])>,
    switch_enabled: bool,
    switch_scale: f64,
) -> Result<[[f64; 2]; K], F::Error> {
    let (dx, dy) = (p2.x - p1.x, p2.y - p1.y);
    let degenerate = |delta: f64, a: f64, b: f64| {
        delta == 0.0 || (switch_enabled && delta.abs() <= switch_scale * switch_tolerance(a, b))
    };
    let flat_x = degenerate(dx, p1.x, p2.x);
    let flat_y = degenerate(dy, p1.y, p2.y);
    let mut out = [[0.0; 2]; K];

    if !(flat_x && flat_y) {
        let (g11, g22) = match values {
            Some(v) => v,
            None => (field.value(p1)?, field.value(p2)?),
        };
        let (p21, p12) = (Point2::new(p2.x, p1.y), Point2::new(p1.x, p2.y));
        let g21 = field.value(p21)?;
        let g12 = field.value(p12)?;
        if !flat_x {
            let (low, high) = (field.jump(p1, p21, &g11, &g21)?, field.jump(p12, p2, &g12, &g22)?);
            for k in 0..K {
                out[k][0] = 0.5 * (low[k] + high[k]) / dx;
            }
        }
        if !flat_y {
            let (left, right) = (field.jump(p1, p12, &g11, &g12)?, field.jump(p21, p2, &g21, &g22)?);
            for k in 0..K {
                out[k][1] = 0.5 * (left[k] + right[k]) / dy;
            }
        }
    }
    if flat_x {
        let xm = 0.5 * (p1.x + p2.x);
        let a = field.gradient(Point2::new(xm, p1.y))?;
        let b = if p1.y == p2.y { a } else { field.gradient(Point2::new(xm, p2.y))? };
        for k in 0..K {
            out[k][0] = 0.5 * (a[k][0] + b[k][0]);
        }
    }
    if flat_y {
        let ym = 0.5 * (p1.y + p2.y);
        let a = field.gradient(Point2::new(p1.x, ym))?;
        let b = if p1.x == p2.x { a } else { field.gradient(Point2::new(p2.x, ym))? };
        for k in 0..K {
            out[k][1] = 0.5 * (a[k][1] + b[k][1]);
        }
    }
    Ok(out)
}
