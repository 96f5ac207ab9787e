//! Exact arithmetic in the three supported base fields: prime fields F_p,
//! finite fields F_{p^k}, and multivariate rational function fields
//! F_p(t_1, .., t_m). Everything is immutable and canonical, so equality of
//! values is structural equality.

pub mod finite;
pub mod parser;
pub mod poly;
pub mod ratfun;
pub mod semilinear;

use crate::error::{Error, Result};
use poly::Poly;
use ratfun::RatFun;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub use semilinear::{frobenius_solve, SemilinearSolution, SemilinearSystem};

/// Default degree limit for rational-function arithmetic.
pub const DEFAULT_DEGREE_GUARD: u32 = 512;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn valid_var_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

#[derive(Debug)]
enum DescInner {
    Prime {
        p: u64,
    },
    Finite {
        p: u64,
        k: u32,
        modulus: Vec<u64>,
    },
    RatFun {
        p: u64,
        vars: Vec<String>,
        degree_guard: u32,
    },
}

/// One of the three supported base fields. Cheap to clone and share.
#[derive(Debug, Clone)]
pub struct FieldDescriptor(Arc<DescInner>);

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.0, &*other.0) {
            (DescInner::Prime { p: a }, DescInner::Prime { p: b }) => a == b,
            (
                DescInner::Finite { p: a, k: ka, .. },
                DescInner::Finite { p: b, k: kb, .. },
            ) => a == b && ka == kb,
            (
                DescInner::RatFun { p: a, vars: va, .. },
                DescInner::RatFun { p: b, vars: vb, .. },
            ) => a == b && va == vb,
            _ => false,
        }
    }
}
impl Eq for FieldDescriptor {}

impl std::hash::Hash for FieldDescriptor {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match &*self.0 {
            DescInner::Prime { p } => (0u8, p).hash(state),
            DescInner::Finite { p, k, .. } => (1u8, p, k).hash(state),
            DescInner::RatFun { p, vars, .. } => {
                (2u8, p).hash(state);
                vars.hash(state);
            }
        }
    }
}

/// Which of the three field kinds a descriptor denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Prime,
    Finite,
    RationalFunction,
}

impl FieldDescriptor {
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        Ok(FieldDescriptor(Arc::new(DescInner::Prime { p })))
    }

    pub fn finite(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if k == 1 {
            return Self::prime(p);
        }
        let modulus = finite::modulus(p, k)?;
        Ok(FieldDescriptor(Arc::new(DescInner::Finite { p, k, modulus })))
    }

    /// Finite field of order q = p^k given as the order itself.
    pub fn finite_of_order(q: u64) -> Result<Self> {
        let mut p = 2;
        while p <= q {
            if q % p == 0 {
                let mut k = 0;
                let mut rest = q;
                while rest % p == 0 {
                    rest /= p;
                    k += 1;
                }
                if rest != 1 {
                    return Err(Error::Invalid(format!("{q} is not a prime power")));
                }
                return Self::finite(p, k);
            }
            p += 1;
        }
        Err(Error::Invalid(format!("{q} is not a prime power")))
    }

    pub fn rational_function(p: u64, vars: Vec<String>) -> Result<Self> {
        Self::rational_function_with_guard(p, vars, DEFAULT_DEGREE_GUARD)
    }

    pub fn rational_function_with_guard(p: u64, vars: Vec<String>, guard: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if vars.is_empty() {
            return Err(Error::Invalid("need at least one variable".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if !valid_var_name(v) {
                return Err(Error::Invalid(format!("bad variable name {v:?}")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Invalid(format!("duplicate variable {v:?}")));
            }
        }
        Ok(FieldDescriptor(Arc::new(DescInner::RatFun {
            p,
            vars,
            degree_guard: guard,
        })))
    }

    pub fn p(&self) -> u64 {
        match &*self.0 {
            DescInner::Prime { p } | DescInner::Finite { p, .. } | DescInner::RatFun { p, .. } => *p,
        }
    }

    pub fn kind(&self) -> FieldKind {
        match &*self.0 {
            DescInner::Prime { .. } => FieldKind::Prime,
            DescInner::Finite { .. } => FieldKind::Finite,
            DescInner::RatFun { .. } => FieldKind::RationalFunction,
        }
    }

    pub fn extension_degree(&self) -> u32 {
        match &*self.0 {
            DescInner::Finite { k, .. } => *k,
            _ => 1,
        }
    }

    pub fn vars(&self) -> &[String] {
        match &*self.0 {
            DescInner::RatFun { vars, .. } => vars,
            _ => &[],
        }
    }

    pub fn degree_guard(&self) -> u32 {
        match &*self.0 {
            DescInner::RatFun { degree_guard, .. } => *degree_guard,
            _ => DEFAULT_DEGREE_GUARD,
        }
    }

    /// Number of elements, if finite.
    pub fn order(&self) -> Option<u128> {
        match &*self.0 {
            DescInner::Prime { p } => Some(*p as u128),
            DescInner::Finite { p, k, .. } => (*p as u128).checked_pow(*k),
            DescInner::RatFun { .. } => None,
        }
    }

    fn modulus(&self) -> Option<&[u64]> {
        match &*self.0 {
            DescInner::Finite { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    fn fq(&self) -> Option<finite::Fq<'_>> {
        match &*self.0 {
            DescInner::Finite { p, k, modulus } => Some(finite::Fq {
                p: *p,
                k: *k,
                modulus,
            }),
            _ => None,
        }
    }

    /// All elements, in a fixed order (odometer over coordinates). Only for
    /// finite fields.
    pub fn enumerate_elements(&self) -> Result<Vec<FieldElem>> {
        match &*self.0 {
            DescInner::Prime { p } => Ok((0..*p)
                .map(|v| FieldElem {
                    desc: self.clone(),
                    payload: Payload::Prime(v),
                })
                .collect()),
            DescInner::Finite { p, k, .. } => {
                let order = (*p as u128).pow(*k);
                let mut out = Vec::with_capacity(order as usize);
                for mut n in 0..order {
                    let mut coeffs = Vec::with_capacity(*k as usize);
                    for _ in 0..*k {
                        coeffs.push((n % *p as u128) as u64);
                        n /= *p as u128;
                    }
                    out.push(FieldElem {
                        desc: self.clone(),
                        payload: Payload::Finite(coeffs),
                    });
                }
                Ok(out)
            }
            DescInner::RatFun { .. } => Err(Error::UnsupportedField(
                "cannot enumerate an infinite field".into(),
            )),
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            DescInner::Prime { p } => write!(f, "F_{p}"),
            DescInner::Finite { p, k, .. } => write!(f, "F_{{{p}^{k}}}"),
            DescInner::RatFun { p, vars, .. } => {
                write!(f, "F_{p}({})", vars.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Payload {
    Prime(u64),
    Finite(Vec<u64>),
    Rat(Box<RatFun>),
}

/// An element of one of the supported fields, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    desc: FieldDescriptor,
    payload: Payload,
}

macro_rules! same_field {
    ($a:expr, $b:expr) => {
        assert!(
            $a.desc == $b.desc,
            "field mismatch: {} vs {}",
            $a.desc,
            $b.desc
        );
    };
}

impl FieldElem {
    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn zero(desc: &FieldDescriptor) -> Self {
        Self::from_int(desc, 0)
    }

    pub fn one(desc: &FieldDescriptor) -> Self {
        Self::from_int(desc, 1)
    }

    pub fn from_int(desc: &FieldDescriptor, v: i64) -> Self {
        let p = desc.p();
        let v = v.rem_euclid(p as i64) as u64;
        let payload = match &*desc.0 {
            DescInner::Prime { .. } => Payload::Prime(v),
            DescInner::Finite { k, .. } => {
                let mut c = vec![0; *k as usize];
                c[0] = v;
                Payload::Finite(c)
            }
            DescInner::RatFun { vars, .. } => {
                Payload::Rat(Box::new(RatFun::from_poly(Poly::constant(p, vars.len(), v))))
            }
        };
        FieldElem {
            desc: desc.clone(),
            payload,
        }
    }

    /// The named variable, for rational function fields.
    pub fn var(desc: &FieldDescriptor, name: &str) -> Result<Self> {
        let idx = desc
            .vars()
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Invalid(format!("unknown variable {name:?}")))?;
        Ok(FieldElem {
            desc: desc.clone(),
            payload: Payload::Rat(Box::new(RatFun::from_poly(Poly::var(
                desc.p(),
                desc.vars().len(),
                idx,
            )))),
        })
    }

    /// The class of x in F_{p^k} = F_p[x]/(modulus); written `g` in input and
    /// output.
    pub fn generator(desc: &FieldDescriptor) -> Result<Self> {
        match &*desc.0 {
            DescInner::Finite { k, .. } => {
                let mut c = vec![0; *k as usize];
                c[1] = 1;
                Ok(FieldElem {
                    desc: desc.clone(),
                    payload: Payload::Finite(c),
                })
            }
            _ => Err(Error::UnsupportedField(
                "generator only exists for finite extension fields".into(),
            )),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Prime(v) => *v == 0,
            Payload::Finite(c) => c.iter().all(|&x| x == 0),
            Payload::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.payload {
            Payload::Prime(v) => *v == 1,
            Payload::Finite(c) => c[0] == 1 && c[1..].iter().all(|&x| x == 0),
            Payload::Rat(r) => r.is_one(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        same_field!(self, other);
        let p = self.desc.p();
        let payload = match (&self.payload, &other.payload) {
            (Payload::Prime(a), Payload::Prime(b)) => Payload::Prime((a + b) % p),
            (Payload::Finite(a), Payload::Finite(b)) => {
                Payload::Finite(self.desc.fq().unwrap().add(a, b))
            }
            (Payload::Rat(a), Payload::Rat(b)) => Payload::Rat(Box::new(
                a.add(b, self.desc.degree_guard())
                    .expect("addition cannot grow degrees"),
            )),
            _ => unreachable!(),
        };
        FieldElem {
            desc: self.desc.clone(),
            payload,
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.desc.p();
        let payload = match &self.payload {
            Payload::Prime(a) => Payload::Prime((p - a) % p),
            Payload::Finite(a) => Payload::Finite(self.desc.fq().unwrap().neg(a)),
            Payload::Rat(a) => Payload::Rat(Box::new(a.neg())),
        };
        FieldElem {
            desc: self.desc.clone(),
            payload,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_field!(self, other);
        let p = self.desc.p();
        let payload = match (&self.payload, &other.payload) {
            (Payload::Prime(a), Payload::Prime(b)) => Payload::Prime(a * b % p),
            (Payload::Finite(a), Payload::Finite(b)) => {
                Payload::Finite(self.desc.fq().unwrap().mul(a, b))
            }
            (Payload::Rat(a), Payload::Rat(b)) => {
                Payload::Rat(Box::new(a.mul(b, self.desc.degree_guard())?))
            }
            _ => unreachable!(),
        };
        Ok(FieldElem {
            desc: self.desc.clone(),
            payload,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.desc.p();
        let payload = match &self.payload {
            Payload::Prime(a) => Payload::Prime(finite::inv_mod(*a, p)),
            Payload::Finite(a) => Payload::Finite(self.desc.fq().unwrap().inv(a)?),
            Payload::Rat(a) => Payload::Rat(Box::new(a.inv(self.desc.degree_guard())?)),
        };
        Ok(FieldElem {
            desc: self.desc.clone(),
            payload,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u128) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(&self.desc);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// x ↦ x^{p^e}. Additive and multiplicative in x.
    pub fn frobenius(&self, e: u32) -> Result<Self> {
        let payload = match &self.payload {
            Payload::Prime(a) => Payload::Prime(*a),
            Payload::Finite(a) => Payload::Finite(self.desc.fq().unwrap().frobenius(a, e)),
            Payload::Rat(a) => {
                Payload::Rat(Box::new(a.frobenius(e, self.desc.degree_guard())?))
            }
        };
        Ok(FieldElem {
            desc: self.desc.clone(),
            payload,
        })
    }

    /// Inverse of e-fold Frobenius. Always succeeds over finite fields; over
    /// F_p(t..) succeeds exactly when every exponent of the reduced fraction
    /// is divisible by p^e.
    pub fn pth_root(&self, e: u32) -> Result<Self> {
        let payload = match &self.payload {
            Payload::Prime(a) => Payload::Prime(*a),
            Payload::Finite(a) => Payload::Finite(self.desc.fq().unwrap().pth_root(a, e)),
            Payload::Rat(a) => Payload::Rat(Box::new(a.pth_root(e)?)),
        };
        Ok(FieldElem {
            desc: self.desc.clone(),
            payload,
        })
    }

    /// Parse an expression over this field; see the crate grammar.
    pub fn parse(desc: &FieldDescriptor, src: &str) -> Result<Self> {
        let expr = parser::parse(src)?;
        parser::eval(&expr, &mut FieldExprContext { desc })
    }

    /// Representation-level total order used for deterministic output; it is
    /// not compatible with the field operations.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        match (&self.payload, &other.payload) {
            (Payload::Prime(a), Payload::Prime(b)) => a.cmp(b),
            (Payload::Finite(a), Payload::Finite(b)) => a.cmp(b),
            (Payload::Rat(a), Payload::Rat(b)) => a.cmp(b),
            _ => panic!("comparing elements of different field kinds"),
        }
    }

    pub(crate) fn rat(&self) -> Option<&RatFun> {
        match &self.payload {
            Payload::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub(crate) fn from_rat(desc: &FieldDescriptor, r: RatFun) -> Self {
        FieldElem {
            desc: desc.clone(),
            payload: Payload::Rat(Box::new(r)),
        }
    }

    pub(crate) fn finite_coeffs(&self) -> Option<&[u64]> {
        match &self.payload {
            Payload::Finite(c) => Some(c),
            _ => None,
        }
    }

    pub(crate) fn prime_residue(&self) -> Option<u64> {
        match &self.payload {
            Payload::Prime(v) => Some(*v),
            _ => None,
        }
    }
}

struct FieldExprContext<'a> {
    desc: &'a FieldDescriptor,
}

impl parser::EvalContext for FieldExprContext<'_> {
    type Value = FieldElem;

    fn from_int(&mut self, v: u64) -> Result<FieldElem> {
        Ok(FieldElem::from_int(self.desc, (v % self.desc.p()) as i64))
    }

    fn ident(&mut self, name: &str) -> Result<FieldElem> {
        match self.desc.kind() {
            FieldKind::RationalFunction => FieldElem::var(self.desc, name),
            FieldKind::Finite if name == "g" => FieldElem::generator(self.desc),
            _ => Err(Error::Parse(format!("unknown symbol {name:?}"))),
        }
    }

    fn add(&mut self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(a.add(&b))
    }

    fn sub(&mut self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(a.sub(&b))
    }

    fn neg(&mut self, a: FieldElem) -> Result<FieldElem> {
        Ok(a.neg())
    }

    fn mul(&mut self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        a.mul(&b)
    }

    fn div(&mut self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        a.div(&b)
    }

    fn pow(&mut self, a: FieldElem, e: u32) -> Result<FieldElem> {
        a.pow(e as u128)
    }
}

/// Canonical printing of a polynomial: terms in graded-lex descending order,
/// `coeff*v1^e1*v2^e2` pieces joined by ` + `.
pub(crate) fn format_poly(poly: &Poly, vars: &[String]) -> String {
    if poly.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (m, &c) in poly.terms.iter().rev() {
        let mut factors = Vec::new();
        if c != 1 || m.is_one() {
            factors.push(c.to_string());
        }
        for (v, &e) in m.0.iter().enumerate() {
            if e == 1 {
                factors.push(vars[v].clone());
            } else if e > 1 {
                factors.push(format!("{}^{}", vars[v], e));
            }
        }
        parts.push(factors.join("*"));
    }
    parts.join(" + ")
}

fn format_finite(coeffs: &[u64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "g".into(),
            (1, c) => format!("{c}*g"),
            (i, 1) => format!("g^{i}"),
            (i, c) => format!("{c}*g^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Prime(v) => write!(f, "{v}"),
            Payload::Finite(c) => write!(f, "{}", format_finite(c)),
            Payload::Rat(r) => {
                let vars = self.desc.vars();
                let num = format_poly(&r.num, vars);
                if r.den.is_one() {
                    return write!(f, "{num}");
                }
                let den = format_poly(&r.den, vars);
                let wrap = |s: String, multi: bool| if multi { format!("({s})") } else { s };
                write!(
                    f,
                    "{}/{}",
                    wrap(num, r.num.terms.len() > 1),
                    wrap(den, r.den.terms.len() > 1)
                )
            }
        }
    }
}

/// A field homomorphism from one descriptor into another, given by images of
/// the source generators.
#[derive(Debug, Clone)]
pub struct FieldEmbedding {
    source: FieldDescriptor,
    target: FieldDescriptor,
    kind: EmbedKind,
}

#[derive(Debug, Clone)]
enum EmbedKind {
    Identity,
    PrimeInto,
    FiniteGen { image: FieldElem },
    RatVars { images: Vec<FieldElem> },
}

impl FieldEmbedding {
    pub fn identity(desc: &FieldDescriptor) -> Self {
        FieldEmbedding {
            source: desc.clone(),
            target: desc.clone(),
            kind: EmbedKind::Identity,
        }
    }

    pub fn prime_into(source: &FieldDescriptor, target: &FieldDescriptor) -> Result<Self> {
        if source.kind() != FieldKind::Prime || source.p() != target.p() {
            return Err(Error::BadEmbedding(
                "source must be the prime field of the target".into(),
            ));
        }
        Ok(FieldEmbedding {
            source: source.clone(),
            target: target.clone(),
            kind: EmbedKind::PrimeInto,
        })
    }

    /// F_{p^k} into the field of `image`, sending the generator to `image`.
    /// The image must satisfy the generator's minimal polynomial.
    pub fn finite_gen(
        source: &FieldDescriptor,
        target: &FieldDescriptor,
        image: FieldElem,
    ) -> Result<Self> {
        if source.kind() != FieldKind::Finite || source.p() != target.p() {
            return Err(Error::BadEmbedding("kind or characteristic mismatch".into()));
        }
        if image.descriptor() != target {
            return Err(Error::BadEmbedding("image lies in the wrong field".into()));
        }
        let modulus = source.modulus().unwrap().to_vec();
        let mut acc = FieldElem::zero(target);
        for (i, &c) in modulus.iter().enumerate() {
            let term = image
                .pow(i as u128)?
                .mul(&FieldElem::from_int(target, c as i64))?;
            acc = acc.add(&term);
        }
        if !acc.is_zero() {
            return Err(Error::BadEmbedding(
                "generator image does not satisfy the modulus".into(),
            ));
        }
        Ok(FieldEmbedding {
            source: source.clone(),
            target: target.clone(),
            kind: EmbedKind::FiniteGen { image },
        })
    }

    /// F_p(z_1..z_m) into the field of the images, z_i ↦ images[i].
    pub fn rat_vars(
        source: &FieldDescriptor,
        target: &FieldDescriptor,
        images: Vec<FieldElem>,
    ) -> Result<Self> {
        if source.kind() != FieldKind::RationalFunction || source.p() != target.p() {
            return Err(Error::BadEmbedding("kind or characteristic mismatch".into()));
        }
        if images.len() != source.vars().len() {
            return Err(Error::BadEmbedding(format!(
                "expected {} variable images, got {}",
                source.vars().len(),
                images.len()
            )));
        }
        if images.iter().any(|im| im.descriptor() != target) {
            return Err(Error::BadEmbedding("image lies in the wrong field".into()));
        }
        Ok(FieldEmbedding {
            source: source.clone(),
            target: target.clone(),
            kind: EmbedKind::RatVars { images },
        })
    }

    pub fn source(&self) -> &FieldDescriptor {
        &self.source
    }

    pub fn target(&self) -> &FieldDescriptor {
        &self.target
    }

    fn eval_poly(&self, poly: &Poly, images: &[FieldElem]) -> Result<FieldElem> {
        let mut acc = FieldElem::zero(&self.target);
        for (m, &c) in &poly.terms {
            let mut term = FieldElem::from_int(&self.target, c as i64);
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[v].pow(e as u128)?)?;
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    pub fn apply(&self, x: &FieldElem) -> Result<FieldElem> {
        if x.descriptor() != &self.source {
            return Err(Error::BadEmbedding("element not in the source field".into()));
        }
        match &self.kind {
            EmbedKind::Identity => Ok(x.clone()),
            EmbedKind::PrimeInto => Ok(FieldElem::from_int(
                &self.target,
                x.prime_residue().unwrap() as i64,
            )),
            EmbedKind::FiniteGen { image } => {
                let coeffs = x.finite_coeffs().unwrap();
                let mut acc = FieldElem::zero(&self.target);
                for (i, &c) in coeffs.iter().enumerate() {
                    let term = image
                        .pow(i as u128)?
                        .mul(&FieldElem::from_int(&self.target, c as i64))?;
                    acc = acc.add(&term);
                }
                Ok(acc)
            }
            EmbedKind::RatVars { images } => {
                let r = x.rat().unwrap();
                let num = self.eval_poly(&r.num, images)?;
                let den = self.eval_poly(&r.den, images)?;
                if den.is_zero() {
                    return Err(Error::BadEmbedding(
                        "denominator vanishes under the substitution".into(),
                    ));
                }
                num.div(&den)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_inverse() {
        let f5 = FieldDescriptor::prime(5).unwrap();
        let two = FieldElem::from_int(&f5, 2);
        assert_eq!(two.inv().unwrap(), FieldElem::from_int(&f5, 3));
        assert_eq!(
            FieldElem::zero(&f5).inv(),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn rational_inverse_printing() {
        let k = FieldDescriptor::rational_function(2, vec!["t".into()]).unwrap();
        let f = FieldElem::parse(&k, "(t+1)/t").unwrap();
        assert_eq!(f.inv().unwrap().to_string(), "t/(t + 1)");
    }

    #[test]
    fn frobenius_examples() {
        let k = FieldDescriptor::rational_function(2, vec!["t".into()]).unwrap();
        let x = FieldElem::parse(&k, "t+1").unwrap();
        assert_eq!(x.frobenius(1).unwrap().to_string(), "t^2 + 1");

        let k2 = FieldDescriptor::rational_function(3, vec!["t".into(), "u".into()]).unwrap();
        let y = FieldElem::parse(&k2, "t+u").unwrap();
        assert_eq!(y.frobenius(1).unwrap(), FieldElem::parse(&k2, "t^3+u^3").unwrap());
    }

    #[test]
    fn f4_pth_root_is_square() {
        let f4 = FieldDescriptor::finite(2, 2).unwrap();
        let g = FieldElem::generator(&f4).unwrap();
        let root = g.pth_root(1).unwrap();
        assert_eq!(root, g.pow(2).unwrap());
        assert_eq!(root.frobenius(1).unwrap(), g);
    }

    #[test]
    fn rational_pth_root() {
        let k = FieldDescriptor::rational_function(2, vec!["t".into()]).unwrap();
        let t = FieldElem::var(&k, "t").unwrap();
        let t2 = t.mul(&t).unwrap();
        assert_eq!(t2.pth_root(1).unwrap(), t);
        assert_eq!(t.pth_root(1), Err(Error::NotAPower(1)));
    }

    #[test]
    fn not_prime_rejected() {
        assert!(FieldDescriptor::prime(4).is_err());
        assert!(FieldDescriptor::finite(6, 2).is_err());
    }

    #[test]
    fn parse_print_roundtrip() {
        let k = FieldDescriptor::rational_function(3, vec!["z1".into(), "z2".into()]).unwrap();
        for src in ["z1^2*z2 + 2*z1 + 1", "(z1 + 1)/(z2 + 2)", "0", "2"] {
            let x = FieldElem::parse(&k, src).unwrap();
            assert_eq!(FieldElem::parse(&k, &x.to_string()).unwrap(), x);
        }
    }

    #[test]
    fn embedding_splits_a_form() {
        // z ↦ u^2 realizes F_2(z) inside F_2(u)
        let src = FieldDescriptor::rational_function(2, vec!["z".into()]).unwrap();
        let tgt = FieldDescriptor::rational_function(2, vec!["u".into()]).unwrap();
        let u = FieldElem::var(&tgt, "u").unwrap();
        let emb = FieldEmbedding::rat_vars(&src, &tgt, vec![u.mul(&u).unwrap()]).unwrap();
        let z = FieldElem::var(&src, "z").unwrap();
        assert_eq!(emb.apply(&z).unwrap().to_string(), "u^2");
    }
}
