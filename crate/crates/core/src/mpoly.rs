//! Sparse multivariate polynomials over Q with variables addressed by index.

use crate::rat::{rat_to_string, ri, rsign, Rat};
use crate::upoly::UPoly;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exponent vector without trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn new(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Mono(v)
    }

    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(i: usize, e: u32) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Mono::new(v)
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let n = self.0.len().max(o.0.len());
        Mono::new((0..n).map(|i| self.exp(i) + o.exp(i)).collect())
    }

    pub fn divides(&self, o: &Mono) -> bool {
        (0..self.0.len()).all(|i| self.exp(i) <= o.exp(i))
    }

    pub fn div(&self, o: &Mono) -> Mono {
        Mono::new((0..self.0.len()).map(|i| self.exp(i) - o.exp(i)).collect())
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        let n = self.0.len().max(o.0.len());
        for i in (0..n).rev() {
            match self.exp(i).cmp(&o.exp(i)) {
                Ordering::Equal => {}
                c => return c,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct MPoly {
    pub t: BTreeMap<Mono, Rat>,
}

impl PartialOrd for MPoly {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for MPoly {
    fn cmp(&self, o: &Self) -> Ordering {
        let a = self.t.iter().rev();
        let b = o.t.iter().rev();
        for (x, y) in a.zip(b) {
            match x.0.cmp(y.0).then_with(|| x.1.cmp(y.1)) {
                Ordering::Equal => {}
                c => return c,
            }
        }
        self.t.len().cmp(&o.t.len())
    }
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { t: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(Mono::one(), c);
        }
        MPoly { t }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(ri(n))
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Mono::var(i, 1), ri(1))
    }

    pub fn monomial(m: Mono, c: Rat) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(m, c);
        }
        MPoly { t }
    }

    pub fn is_zero(&self) -> bool {
        self.t.is_empty()
    }

    pub fn is_const(&self) -> bool {
        self.t.keys().all(|m| m.0.is_empty())
    }

    pub fn const_value(&self) -> Option<Rat> {
        if self.is_const() {
            Some(self.t.get(&Mono::one()).cloned().unwrap_or_else(Rat::zero))
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.t.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.t.remove(&m);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.t {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.t {
            r.add_term(m.clone(), -c);
        }
        r
    }

    pub fn neg(&self) -> Self {
        MPoly { t: self.t.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, a: &Rat) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        MPoly { t: self.t.iter().map(|(m, c)| (m.clone(), c * a)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (m1, c1) in &self.t {
            for (m2, c2) in &o.t {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub fn mul_mono(&self, m: &Mono, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MPoly { t: self.t.iter().map(|(m1, c1)| (m1.mul(m), c1 * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::int(1);
        let mut b = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// Number of variable slots touched (max index + 1).
    pub fn nvars(&self) -> usize {
        self.t.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.t.keys().any(|m| m.exp(v) > 0)
    }

    /// Highest variable index present, if any.
    pub fn main_var(&self) -> Option<usize> {
        let n = self.nvars();
        if n == 0 {
            None
        } else {
            Some(n - 1)
        }
    }

    pub fn deg(&self, v: usize) -> u32 {
        self.t.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn total_deg(&self) -> u32 {
        self.t.keys().map(|m| m.total()).max().unwrap_or(0)
    }

    /// Coefficients of v^0, v^1, ..., v^deg as polynomials not involving v.
    pub fn coeffs(&self, v: usize) -> Vec<MPoly> {
        let d = self.deg(v) as usize;
        let mut out = vec![MPoly::zero(); d + 1];
        for (m, c) in &self.t {
            let e = m.exp(v) as usize;
            let mut mm = m.0.clone();
            if v < mm.len() {
                mm[v] = 0;
            }
            out[e].add_term(Mono::new(mm), c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    pub fn from_coeffs(v: usize, cs: &[MPoly]) -> Self {
        let mut r = Self::zero();
        for (e, c) in cs.iter().enumerate() {
            if e == 0 {
                r = r.add(c);
            } else {
                r = r.add(&c.mul_mono(&Mono::var(v, e as u32), &ri(1)));
            }
        }
        r
    }

    /// Leading coefficient with respect to v.
    pub fn lc(&self, v: usize) -> MPoly {
        self.coeffs(v).pop().unwrap_or_else(MPoly::zero)
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut r = Self::zero();
        for (m, c) in &self.t {
            let e = m.exp(v);
            if e > 0 {
                let mut mm = m.0.clone();
                mm[v] -= 1;
                r.add_term(Mono::new(mm), c * ri(e as i64));
            }
        }
        r
    }

    pub fn subst_rat(&self, v: usize, a: &Rat) -> Self {
        if !self.uses_var(v) {
            return self.clone();
        }
        let mut r = Self::zero();
        let mut pw: Vec<Rat> = vec![ri(1)];
        for (m, c) in &self.t {
            let e = m.exp(v) as usize;
            while pw.len() <= e {
                let l = pw.last().unwrap() * a;
                pw.push(l);
            }
            let mut mm = m.0.clone();
            if v < mm.len() {
                mm[v] = 0;
            }
            r.add_term(Mono::new(mm), c * &pw[e]);
        }
        r
    }

    /// Substitute a polynomial for variable v.
    pub fn subst(&self, v: usize, q: &MPoly) -> Self {
        let cs = self.coeffs(v);
        let mut r = Self::zero();
        for c in cs.iter().rev() {
            r = r.mul(q).add(c);
        }
        r
    }

    /// Evaluate with all variables assigned (missing ones are zero).
    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (m, c) in &self.t {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let xi = x.get(i).cloned().unwrap_or_else(Rat::zero);
                    for _ in 0..e {
                        t *= &xi;
                    }
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (m, c) in &self.t {
            let mut t = crate::rat::to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= libm::pow(x.get(i).copied().unwrap_or(0.0), e as f64);
                }
            }
            s += t;
        }
        s
    }

    /// Rename variables by a map on indices.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut r = Self::zero();
        for (m, c) in &self.t {
            let mut v: Vec<u32> = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let j = f(i);
                    if v.len() <= j {
                        v.resize(j + 1, 0);
                    }
                    v[j] += e;
                }
            }
            r.add_term(Mono::new(v), c.clone());
        }
        r
    }

    pub fn to_upoly(&self, v: usize) -> Option<UPoly<Rat>> {
        let cs = self.coeffs(v);
        let mut out = Vec::with_capacity(cs.len());
        for c in cs {
            out.push(c.const_value()?);
        }
        Some(UPoly::new(out))
    }

    pub fn from_upoly(p: &UPoly<Rat>, v: usize) -> Self {
        let mut r = Self::zero();
        for (i, c) in p.c.iter().enumerate() {
            r.add_term(Mono::var(v, i as u32), c.clone());
        }
        r
    }

    /// Leading term in the monomial order.
    pub fn lt(&self) -> Option<(&Mono, &Rat)> {
        self.t.iter().next_back()
    }

    /// Exact division; None if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.const_value() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = d.lt().map(|(a, b)| (a.clone(), b.clone()))?;
        let mut r = self.clone();
        let mut q = MPoly::zero();
        while let Some((m, c)) = r.lt().map(|(a, b)| (a.clone(), b.clone())) {
            if !dm.divides(&m) {
                return None;
            }
            let qm = m.div(&dm);
            let qc = c / &dc;
            r = r.sub(&d.mul_mono(&qm, &qc));
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Integer-coefficient primitive form with positive leading coefficient.
    pub fn normalize(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.t.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let mut s = Rat::new(den, num);
        if self.lt().unwrap().1.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    /// Content with respect to v: gcd of the coefficients, normalized.
    pub fn content(&self, v: usize) -> MPoly {
        let mut g = MPoly::zero();
        for c in self.coeffs(v) {
            if c.is_zero() {
                continue;
            }
            g = if g.is_zero() { c.normalize() } else { gcd(&g, &c) };
            if g.is_const() {
                return MPoly::int(1);
            }
        }
        g
    }

    pub fn primitive(&self, v: usize) -> MPoly {
        let c = self.content(v);
        self.div_exact(&c).expect("content divides").normalize()
    }

    pub fn sign_of_lt(&self) -> i8 {
        self.lt().map(|(_, c)| rsign(c)).unwrap_or(0)
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        for (m, c) in self.t.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let nm = names.get(i).cloned().unwrap_or_else(|| format!("v{}", i));
                parts.push(if e == 1 { nm } else { format!("{}^{}", nm, e) });
            }
            if parts.is_empty() {
                s.push_str(&rat_to_string(&mag));
            } else {
                if !mag.is_one() {
                    s.push_str(&rat_to_string(&mag));
                    s.push('*');
                }
                s.push_str(&parts.join("*"));
            }
        }
        s
    }
}

/// Pseudo-remainder of a by b with respect to v: lc(b)^(da-db+1) a = q b + r.
pub fn prem(a: &MPoly, b: &MPoly, v: usize) -> MPoly {
    let db = b.deg(v);
    let lb = b.lc(v);
    let mut r = a.clone();
    let mut da = r.deg(v);
    if r.is_zero() || da < db {
        return r;
    }
    let mut k = da - db + 1;
    let bc = b.coeffs(v);
    while !r.is_zero() && r.deg(v) >= db {
        da = r.deg(v);
        let lr = r.lc(v);
        let sh = Mono::var(v, da - db);
        let mut bsh = MPoly::zero();
        for (e, c) in bc.iter().enumerate() {
            if e as u32 == db {
                continue;
            }
            bsh = bsh.add(&c.mul_mono(&Mono::var(v, e as u32), &ri(1)));
        }
        // r := lb * (r - lr v^da) - lr * (b - lb v^db) * v^(da-db)
        let rr = r.sub(&lr.mul_mono(&Mono::var(v, da), &ri(1)));
        r = lb.mul(&rr).sub(&lr.mul(&bsh).mul_mono(&sh, &ri(1)));
        k -= 1;
    }
    if k > 0 {
        r = r.mul(&lb.pow(k));
    }
    r
}

/// Normalized gcd of two multivariate polynomials.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.normalize();
    }
    if b.is_zero() {
        return a.normalize();
    }
    if a.is_const() || b.is_const() {
        return MPoly::int(1);
    }
    let v = a.main_var().unwrap().max(b.main_var().unwrap());
    let ca = a.content(v);
    let cb = b.content(v);
    let c = if ca.is_const() || cb.is_const() { MPoly::int(1) } else { gcd(&ca, &cb) };
    let mut p = a.div_exact(&ca).unwrap();
    let mut q = b.div_exact(&cb).unwrap();
    if p.deg(v) < q.deg(v) {
        core::mem::swap(&mut p, &mut q);
    }
    if q.deg(v) == 0 {
        return c.normalize();
    }
    loop {
        let r = prem(&p, &q, v);
        if r.is_zero() {
            break;
        }
        if r.deg(v) == 0 {
            return c.normalize();
        }
        p = q;
        q = r.primitive(v);
    }
    c.mul(&q.primitive(v)).normalize()
}

/// Squarefree factors (pairwise coprime, each squarefree), normalized, non-constant.
pub fn squarefree_factors(p: &MPoly) -> Vec<MPoly> {
    if p.is_const() {
        return Vec::new();
    }
    let v = p.main_var().unwrap();
    let mut out = Vec::new();
    let c = p.content(v);
    if !c.is_const() {
        out.extend(squarefree_factors(&c));
    }
    let pp = p.div_exact(&c).unwrap();
    let g = gcd(&pp, &pp.derivative(v));
    let sf = pp.div_exact(&g).unwrap().normalize();
    if !sf.is_const() {
        out.push(sf);
    }
    out
}

/// Refine a list of polynomials into a pairwise coprime squarefree basis with the same zero set.
pub fn coprime_basis(ps: &[MPoly]) -> Vec<MPoly> {
    let mut basis: Vec<MPoly> = Vec::new();
    for p in ps {
        for f in squarefree_factors(p) {
            let mut todo = vec![f];
            while let Some(mut f) = todo.pop() {
                if f.is_const() {
                    continue;
                }
                let mut i = 0;
                let mut consumed = false;
                while i < basis.len() {
                    let g = gcd(&f, &basis[i]);
                    if g.is_const() {
                        i += 1;
                        continue;
                    }
                    let b = basis.remove(i);
                    let b1 = b.div_exact(&g).unwrap().normalize();
                    let f1 = f.div_exact(&g).unwrap().normalize();
                    todo.push(g.normalize());
                    if !b1.is_const() {
                        todo.push(b1);
                    }
                    f = f1;
                    if f.is_const() {
                        consumed = true;
                        break;
                    }
                }
                if !consumed && !f.is_const() {
                    basis.push(f.normalize());
                }
            }
        }
    }
    basis.sort();
    basis.dedup();
    basis
}
