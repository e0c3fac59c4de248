//! Named groups: cyclic, quaternion, dihedral, S3, the wreath product
//! Z2 wr Z2, unitriangular 3x3 matrices over F_p, and direct products.

use std::fmt;

use super::{from_flat_table, Elem, FiniteGroup, GroupError};

/// Parsed form of a catalog name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogSpec {
    Cyclic(usize),
    Quaternion,
    Dihedral(usize),
    Symmetric3,
    Z2WrZ2,
    Unitriangular(usize),
    Product(Vec<CatalogSpec>),
}

impl fmt::Display for CatalogSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogSpec::Cyclic(m) => write!(f, "Z{m}"),
            CatalogSpec::Quaternion => write!(f, "Q8"),
            CatalogSpec::Dihedral(n) => write!(f, "D({n})"),
            CatalogSpec::Symmetric3 => write!(f, "S3"),
            CatalogSpec::Z2WrZ2 => write!(f, "Z2wrZ2"),
            CatalogSpec::Unitriangular(p) => write!(f, "UT3({p})"),
            CatalogSpec::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|s| s.to_string()).collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

impl CatalogSpec {
    pub fn order(&self) -> usize {
        match self {
            CatalogSpec::Cyclic(m) => *m,
            CatalogSpec::Quaternion | CatalogSpec::Z2WrZ2 => 8,
            CatalogSpec::Dihedral(n) => 2 * n,
            CatalogSpec::Symmetric3 => 6,
            CatalogSpec::Unitriangular(p) => p * p * p,
            CatalogSpec::Product(fs) => fs.iter().map(|s| s.order()).product(),
        }
    }

    pub fn factors(&self) -> Vec<CatalogSpec> {
        match self {
            CatalogSpec::Product(fs) => fs.clone(),
            other => vec![other.clone()],
        }
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn parse_int(s: &str) -> Option<usize> {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
    s.trim().parse().ok()
}

fn parse_factor(raw: &str) -> Result<Vec<CatalogSpec>, GroupError> {
    let unknown = || GroupError::UnknownName(raw.to_string());
    let s = raw.trim();
    // power suffix, e.g. Z2^3
    if let Some((base, exp)) = s.rsplit_once('^') {
        let t = exp.trim().parse::<usize>().map_err(|_| unknown())?;
        if t == 0 {
            return Err(unknown());
        }
        let one = parse_factor(base)?;
        return Ok((0..t).flat_map(|_| one.clone()).collect());
    }
    let spec = match s {
        "Q8" => CatalogSpec::Quaternion,
        "S3" => CatalogSpec::Symmetric3,
        "Z2wrZ2" => CatalogSpec::Z2WrZ2,
        _ => {
            if let Some(rest) = s.strip_prefix("UT3") {
                let p = parse_int(rest).ok_or_else(unknown)?;
                if !is_prime(p) {
                    return Err(unknown());
                }
                CatalogSpec::Unitriangular(p)
            } else if let Some(rest) = s.strip_prefix("Zm") {
                CatalogSpec::Cyclic(parse_int(rest).filter(|&m| m >= 1).ok_or_else(unknown)?)
            } else if let Some(rest) = s.strip_prefix('Z') {
                CatalogSpec::Cyclic(parse_int(rest).filter(|&m| m >= 1).ok_or_else(unknown)?)
            } else if let Some(rest) = s.strip_prefix('D') {
                CatalogSpec::Dihedral(parse_int(rest).filter(|&n| n >= 1).ok_or_else(unknown)?)
            } else {
                return Err(unknown());
            }
        }
    };
    Ok(vec![spec])
}

/// Parse a catalog name such as `Q8`, `Z(4)`, `D(4)`, `UT3(3)`, `Q8xZ2^2`.
pub fn parse_catalog_name(name: &str) -> Result<CatalogSpec, GroupError> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in name.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            'x' | '×' | '*' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    parts.push(cur);
    let mut factors = Vec::new();
    for p in &parts {
        if p.trim().is_empty() {
            return Err(GroupError::UnknownName(name.to_string()));
        }
        factors.extend(parse_factor(p)?);
    }
    Ok(if factors.len() == 1 { factors.pop().unwrap() } else { CatalogSpec::Product(factors) })
}

/// Build a group from the catalog by name.
pub fn catalog_group(name: &str) -> Result<FiniteGroup, GroupError> {
    build_spec(&parse_catalog_name(name)?)
}

pub(crate) fn build_spec(spec: &CatalogSpec) -> Result<FiniteGroup, GroupError> {
    let g = match spec {
        CatalogSpec::Cyclic(m) => cyclic(*m),
        CatalogSpec::Quaternion => quaternion(),
        CatalogSpec::Dihedral(n) => dihedral(*n),
        CatalogSpec::Symmetric3 => symmetric3(),
        CatalogSpec::Z2WrZ2 => z2_wr_z2(),
        CatalogSpec::Unitriangular(p) => unitriangular(*p),
        CatalogSpec::Product(fs) => {
            let mut it = fs.iter();
            let mut acc = build_spec(it.next().expect("nonempty product"))?;
            for f in it {
                acc = direct_product(&acc, &build_spec(f)?);
            }
            acc
        }
    };
    Ok(g.with_name(spec.to_string()))
}

fn from_mul(order: usize, names: Vec<String>, mul: impl Fn(usize, usize) -> usize) -> FiniteGroup {
    let mut table = Vec::with_capacity(order * order);
    for a in 0..order {
        for b in 0..order {
            table.push(mul(a, b));
        }
    }
    from_flat_table(String::new(), order, table, Some(names)).expect("catalog tables are groups")
}

fn cyclic(m: usize) -> FiniteGroup {
    from_mul(m, (0..m).map(|g| g.to_string()).collect(), |a, b| (a + b) % m)
}

/// Index `2u + s` is the unit `u` in (1, i, j, k) with sign `(-1)^s`.
fn quaternion() -> FiniteGroup {
    // unit products: (sign, unit) for u*v
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    let labels = ["1", "i", "j", "k"];
    let names = (0..8)
        .map(|x| {
            let (u, s) = (x / 2, x % 2);
            format!("{}{}", if s == 1 { "-" } else { "" }, labels[u])
        })
        .collect();
    from_mul(8, names, |a, b| {
        let (sa, ua) = (a % 2, a / 2);
        let (sb, ub) = (b % 2, b / 2);
        let (s, u) = UNIT[ua][ub];
        2 * u + (sa + sb + s) % 2
    })
}

/// Index `a + n*e` is `r^a s^e`, with `s r = r^{-1} s`.
fn dihedral(n: usize) -> FiniteGroup {
    let names = (0..2 * n)
        .map(|x| {
            let (a, e) = (x % n, x / n);
            match (a, e) {
                (0, 0) => "1".to_string(),
                (0, 1) => "s".to_string(),
                (1, 0) => "r".to_string(),
                (1, 1) => "rs".to_string(),
                (a, 0) => format!("r^{a}"),
                (a, _) => format!("r^{a}s"),
            }
        })
        .collect();
    from_mul(2 * n, names, |x, y| {
        let (a, e) = (x % n, x / n);
        let (b, f) = (y % n, y / n);
        let b = if e == 1 { (n - b) % n } else { b };
        (a + b) % n + n * ((e + f) % 2)
    })
}

/// S3 laid out like D(3), named by the permutation r^a s^e of {0,1,2}
/// with r = x -> x+1 and s = x -> -x, in cycle notation.
fn symmetric3() -> FiniteGroup {
    let d3 = dihedral(3);
    let names = (0..6)
        .map(|x| {
            let (a, e) = (x % 3, x / 3);
            let perm: Vec<usize> = (0..3)
                .map(|p| {
                    let q = if e == 1 { (3 - p) % 3 } else { p };
                    (q + a) % 3
                })
                .collect();
            cycle_notation(&perm)
        })
        .collect();
    d3.with_names(names).expect("six names")
}

fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut x = perm[start];
        while x != start {
            seen[x] = true;
            cyc.push(x);
            x = perm[x];
        }
        let inner: Vec<String> = cyc.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("({})", inner.join(" ")));
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

/// Elements (a,b;z), index `a + 2b + 4z`.
fn z2_wr_z2() -> FiniteGroup {
    let names = (0..8).map(|x| format!("({},{};{})", x & 1, (x >> 1) & 1, x >> 2)).collect();
    from_mul(8, names, |x, y| {
        let (a, b, z) = (x & 1, (x >> 1) & 1, x >> 2);
        let (a2, b2, z2) = (y & 1, (y >> 1) & 1, y >> 2);
        let (na, nb) = if z == 0 { (a ^ a2, b ^ b2) } else { (a ^ b2, b ^ a2) };
        na | (nb << 1) | ((z ^ z2) << 2)
    })
}

/// Upper unitriangular [[1,a,c],[0,1,b],[0,0,1]] over F_p, index `a + p b + p^2 c`.
fn unitriangular(p: usize) -> FiniteGroup {
    let dec = |x: usize| (x % p, (x / p) % p, x / (p * p));
    let names = (0..p * p * p)
        .map(|x| {
            let (a, b, c) = dec(x);
            format!("[{a},{b},{c}]")
        })
        .collect();
    from_mul(p * p * p, names, |x, y| {
        let (a, b, c) = dec(x);
        let (a2, b2, c2) = dec(y);
        let na = (a + a2) % p;
        let nb = (b + b2) % p;
        let nc = (c + c2 + a * b2) % p;
        na + p * nb + p * p * nc
    })
}

/// G x H with index `g*|H| + h`.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
    let (m, n) = (g.order(), h.order());
    let names = (0..m * n)
        .map(|x| format!("({},{})", g.element_name(x / n), h.element_name(x % n)))
        .collect();
    let split = |x: Elem| (x / n, x % n);
    let prod = from_mul(m * n, names, |x, y| {
        let (a, b) = split(x);
        let (c, d) = split(y);
        g.mul(a, c) * n + h.mul(b, d)
    });
    let name = if g.name().is_empty() || h.name().is_empty() {
        String::new()
    } else {
        format!("{}x{}", g.name(), h.name())
    };
    prod.with_name(name)
}
