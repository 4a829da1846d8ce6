//! Finite groups, their unitary irreps, and the Fourier transform between the
//! group-element basis `|g>` and the representation basis `|j m n>`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{
    c, diag, ensure_finite, identity, two_sided_unitarity_residual, ComplexMatrix, C64,
    ALGEBRAIC_TOL,
};

/// Largest order for which `from_table` checks associativity exhaustively.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 256;

/// Names a built-in group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Trivial,
    Cyclic(usize),
    Dihedral(usize),
    Symmetric3,
    Quaternion,
}

impl FromStr for Builtin {
    type Err = Error;

    /// Accepts `trivial`, `Z<n>`, `cyclic:<n>`, `D<n>`, `dihedral:<n>`,
    /// `S3` and `Q8` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let unknown = || Error::UnknownBuiltin(s.to_string());
        let param = |rest: &str| -> Result<usize> {
            let n: usize = rest.parse().map_err(|_| unknown())?;
            if n == 0 {
                return Err(unknown());
            }
            Ok(n)
        };
        match lower.as_str() {
            "trivial" | "e" => Ok(Builtin::Trivial),
            "s3" | "symmetric:3" => Ok(Builtin::Symmetric3),
            "q8" | "quaternion" => Ok(Builtin::Quaternion),
            _ => {
                if let Some(rest) = lower.strip_prefix("cyclic:") {
                    Ok(Builtin::Cyclic(param(rest)?))
                } else if let Some(rest) = lower.strip_prefix("dihedral:") {
                    Ok(Builtin::Dihedral(param(rest)?))
                } else if let Some(rest) = lower.strip_prefix('z') {
                    Ok(Builtin::Cyclic(param(rest)?))
                } else if let Some(rest) = lower.strip_prefix('d') {
                    Ok(Builtin::Dihedral(param(rest)?))
                } else {
                    Err(unknown())
                }
            }
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Trivial => write!(f, "trivial"),
            Builtin::Cyclic(n) => write!(f, "Z{n}"),
            Builtin::Dihedral(n) => write!(f, "D{n}"),
            Builtin::Symmetric3 => write!(f, "S3"),
            Builtin::Quaternion => write!(f, "Q8"),
        }
    }
}

/// A finite group given by its multiplication table.
///
/// Element `0` is always the identity for built-ins; tables loaded from files
/// may put it anywhere and record it in `identity`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroup {
    name: String,
    mult_table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    elements: Vec<String>,
    builtin: Option<Builtin>,
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[g][h] = g·h`).
    pub fn from_table(
        name: impl Into<String>,
        table: Vec<Vec<usize>>,
        inverse: Option<Vec<usize>>,
        elements: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!("row {g} has {} entries, expected {n}", row.len())));
            }
            if !is_permutation(row.iter().copied(), n) {
                return Err(Error::InvalidTable(format!("row {g} is not a permutation")));
            }
        }
        for h in 0..n {
            if !is_permutation(table.iter().map(|row| row[h]), n) {
                return Err(Error::InvalidTable(format!("column {h} is not a permutation")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        if n <= ASSOCIATIVITY_CHECK_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = table[a][b];
                    for x in 0..n {
                        if table[ab][x] != table[a][table[b][x]] {
                            return Err(Error::InvalidTable(format!(
                                "associativity fails for ({a}, {b}, {x})"
                            )));
                        }
                    }
                }
            }
        }
        let computed: Vec<usize> = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == identity).unwrap())
            .collect();
        if let Some(given) = inverse {
            if given != computed {
                return Err(Error::InvalidTable("inverse list disagrees with the table".into()));
            }
        }
        let elements = match elements {
            Some(names) if names.len() == n => names,
            Some(names) => {
                return Err(Error::InvalidTable(format!(
                    "{} element names for order {n}",
                    names.len()
                )))
            }
            None => (0..n).map(|g| format!("g{g}")).collect(),
        };
        Ok(FiniteGroup {
            name: name.into(),
            mult_table: table,
            identity,
            inverse: computed,
            elements,
            builtin: None,
        })
    }

    pub fn builtin(kind: Builtin) -> Result<Self> {
        match kind {
            Builtin::Trivial => Self::cyclic(1).map(|g| g.tagged("trivial", kind)),
            Builtin::Cyclic(n) => Self::cyclic(n),
            Builtin::Dihedral(n) => Self::dihedral(n),
            Builtin::Symmetric3 => Ok(Self::symmetric3()),
            Builtin::Quaternion => Ok(Self::quaternion()),
        }
    }

    /// `Z_n` with elements `0..n` and `m·k = (m + k) mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnknownBuiltin("cyclic:0".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let names = (0..n).map(|g| g.to_string()).collect();
        Ok(Self::from_table(format!("Z{n}"), table, None, Some(names))?
            .tagged(&format!("Z{n}"), Builtin::Cyclic(n)))
    }

    /// `D_n` of order `2n`: index `k` is `r^k`, index `n + k` is `s r^k`,
    /// with `r s = s r^{-1}`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnknownBuiltin("dihedral:0".into()));
        }
        // (flip, k) stands for s^flip r^k
        let decode = |g: usize| (g / n, g % n);
        let encode = |flip: usize, k: usize| flip * n + k % n;
        let table = (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| {
                        let (fa, ka) = decode(a);
                        let (fb, kb) = decode(b);
                        // r^ka s^fb = s^fb r^{±ka}
                        let k = if fb == 0 { ka + kb } else { n - ka % n + kb };
                        encode((fa + fb) % 2, k)
                    })
                    .collect()
            })
            .collect();
        let names = (0..2 * n)
            .map(|g| {
                let (flip, k) = decode(g);
                let rot = match k {
                    0 => String::new(),
                    1 => "r".to_string(),
                    _ => format!("r^{k}"),
                };
                match (flip, rot.is_empty()) {
                    (0, true) => "e".to_string(),
                    (0, false) => rot,
                    (_, _) => format!("s{rot}"),
                }
            })
            .collect();
        Ok(Self::from_table(format!("D{n}"), table, None, Some(names))?
            .tagged(&format!("D{n}"), Builtin::Dihedral(n)))
    }

    /// `S_3` as permutations of `{0,1,2}` in lexicographic order, composed as
    /// `(g·h)(x) = g(h(x))`.
    pub fn symmetric3() -> Self {
        let perms = s3_permutations();
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| index([g[h[0]], g[h[1]], g[h[2]]]))
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|p| format!("[{}{}{}]", p[0], p[1], p[2]))
            .collect();
        Self::from_table("S3", table, None, Some(names))
            .expect("S3 table is a group")
            .tagged("S3", Builtin::Symmetric3)
    }

    /// `Q_8 = {1, -1, i, -i, j, -j, k, -k}` in that order.
    pub fn quaternion() -> Self {
        let mats = quaternion_matrices();
        let index = |m: &ComplexMatrix| {
            mats.iter()
                .position(|q| (q - m).norm() < 1e-12)
                .expect("Q8 closed under multiplication")
        };
        let table = mats
            .iter()
            .map(|a| mats.iter().map(|b| index(&(a * b))).collect())
            .collect();
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Self::from_table("Q8", table, None, Some(names))
            .expect("Q8 table is a group")
            .tagged("Q8", Builtin::Quaternion)
    }

    fn tagged(mut self, name: &str, kind: Builtin) -> Self {
        self.name = name.to_string();
        self.builtin = Some(kind);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mult_table.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult_table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mult_table(&self) -> &[Vec<usize>] {
        &self.mult_table
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverse
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn builtin_kind(&self) -> Option<Builtin> {
        self.builtin
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// Parses a descriptor and builds the built-in group it names.
pub fn make_group(descriptor: &str) -> Result<FiniteGroup> {
    FiniteGroup::builtin(descriptor.parse()?)
}

/// A unitary irreducible representation: `matrices[g] = D^j(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<ComplexMatrix>,
}

impl Irrep {
    pub fn entry(&self, g: usize, m: usize, n: usize) -> C64 {
        self.matrices[g][(m, n)]
    }
}

/// A group together with a complete set of inequivalent unitary irreps.
#[derive(Clone, Debug)]
pub struct IrrepSet {
    group: FiniteGroup,
    irreps: Vec<Irrep>,
}

impl IrrepSet {
    /// Validates unitarity, the homomorphism property, `Σ dim² = |G|` and
    /// great orthogonality, all within `ALGEBRAIC_TOL` scaled by dimension.
    pub fn new(group: FiniteGroup, irreps: Vec<Irrep>) -> Result<Self> {
        let order = group.order();
        for irrep in &irreps {
            let d = irrep.dim;
            if d == 0 || irrep.matrices.len() != order {
                return Err(Error::IncompleteIrreps(format!(
                    "irrep {} must have dim > 0 and {order} matrices",
                    irrep.label
                )));
            }
            for (g, m) in irrep.matrices.iter().enumerate() {
                if m.shape() != (d, d) {
                    return Err(Error::IncompleteIrreps(format!(
                        "irrep {} matrix {g} is {}x{}, expected {d}x{d}",
                        irrep.label,
                        m.nrows(),
                        m.ncols()
                    )));
                }
                ensure_finite(m)?;
                let residual = two_sided_unitarity_residual(m);
                if residual > ALGEBRAIC_TOL * d as f64 {
                    return Err(Error::IncompleteIrreps(format!(
                        "irrep {} is not unitary at element {g} (residual {residual:.3e})",
                        irrep.label
                    )));
                }
            }
            for a in 0..order {
                for b in 0..order {
                    let lhs = &irrep.matrices[a] * &irrep.matrices[b];
                    let residual = (lhs - &irrep.matrices[group.mul(a, b)]).norm();
                    if residual > ALGEBRAIC_TOL * d as f64 {
                        return Err(Error::IncompleteIrreps(format!(
                            "irrep {} is not a homomorphism at ({a}, {b}) (residual {residual:.3e})",
                            irrep.label
                        )));
                    }
                }
            }
        }
        let total: usize = irreps.iter().map(|i| i.dim * i.dim).sum();
        if total != order {
            return Err(Error::IncompleteIrreps(format!(
                "sum of squared dimensions is {total}, group order is {order}"
            )));
        }
        let report = orthogonality_check(order, &irreps);
        if !report.pass {
            return Err(Error::IncompleteIrreps(format!(
                "great orthogonality residual {:.3e}",
                report.residual
            )));
        }
        Ok(IrrepSet { group, irreps })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn find(&self, label: &str) -> Result<usize> {
        self.irreps
            .iter()
            .position(|i| i.label == label)
            .ok_or_else(|| Error::UnknownIrrep(label.to_string()))
    }

    /// Representation-basis labels `(irrep index, m, n)` in column order of
    /// [`fourier_matrix`](Self::fourier_matrix).
    pub fn rep_basis(&self) -> Vec<(usize, usize, usize)> {
        self.irreps
            .iter()
            .enumerate()
            .flat_map(|(j, irrep)| {
                (0..irrep.dim).flat_map(move |m| (0..irrep.dim).map(move |n| (j, m, n)))
            })
            .collect()
    }

    /// Human-readable names for [`rep_basis`](Self::rep_basis), e.g. `E[0,1]`.
    pub fn rep_basis_labels(&self) -> Vec<String> {
        self.rep_basis()
            .into_iter()
            .map(|(j, m, n)| format!("{}[{m},{n}]", self.irreps[j].label))
            .collect()
    }

    fn check_indices(&self, j: usize, m: usize, n: usize) -> Result<&Irrep> {
        let irrep = self
            .irreps
            .get(j)
            .ok_or_else(|| Error::UnknownIrrep(format!("index {j}")))?;
        if m >= irrep.dim || n >= irrep.dim {
            return Err(Error::IndexOutOfRange(format!(
                "({m}, {n}) for irrep {} of dimension {}",
                irrep.label, irrep.dim
            )));
        }
        Ok(irrep)
    }

    /// `U^j_{mn}`: diagonal in the group-element basis with entries
    /// `D^j_{mn}(g)`.
    pub fn rep_operator(&self, j: usize, m: usize, n: usize) -> Result<ComplexMatrix> {
        let irrep = self.check_indices(j, m, n)?;
        let entries: Vec<C64> = (0..self.order()).map(|g| irrep.entry(g, m, n)).collect();
        Ok(diag(&entries))
    }

    pub fn rep_operator_by_label(&self, label: &str, m: usize, n: usize) -> Result<ComplexMatrix> {
        self.rep_operator(self.find(label)?, m, n)
    }

    /// `F[g, (j,m,n)] = <g|jmn> = sqrt(dim(j)/|G|) D^j_{mn}(g)`.
    pub fn fourier_matrix(&self) -> ComplexMatrix {
        let order = self.order();
        let basis = self.rep_basis();
        ComplexMatrix::from_fn(order, order, |g, col| {
            let (j, m, n) = basis[col];
            let irrep = &self.irreps[j];
            let weight = (irrep.dim as f64 / order as f64).sqrt();
            irrep.entry(g, m, n) * weight
        })
    }

    /// `U^j_{mn}` expressed in the representation basis, `F† U F`.
    pub fn rep_operator_repbasis(&self, j: usize, m: usize, n: usize) -> Result<ComplexMatrix> {
        let u = self.rep_operator(j, m, n)?;
        let f = self.fourier_matrix();
        Ok(f.adjoint() * u * f)
    }

    pub fn orthogonality_check(&self) -> OrthogonalityReport {
        orthogonality_check(self.order(), &self.irreps)
    }
}

/// Builds the hard-coded irreps of a built-in group.
pub fn irreps(group: &FiniteGroup) -> Result<IrrepSet> {
    let kind = group.builtin_kind().ok_or_else(|| {
        Error::IncompleteIrreps(format!(
            "group {} is not a built-in; supply irrep matrices with the table",
            group.name()
        ))
    })?;
    let list = match kind {
        Builtin::Trivial => cyclic_irreps(1),
        Builtin::Cyclic(n) => cyclic_irreps(n),
        Builtin::Dihedral(n) => dihedral_irreps(n),
        Builtin::Symmetric3 => s3_irreps(),
        Builtin::Quaternion => quaternion_irreps(),
    };
    IrrepSet::new(group.clone(), list)
}

/// Builds a built-in group and its irreps in one step.
pub fn builtin_irrep_set(descriptor: &str) -> Result<IrrepSet> {
    irreps(&make_group(descriptor)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalityReport {
    /// `max |(1/|G|) Σ_g conj(D^j_mn(g)) D^k_m'n'(g) − δ_jk δ_mm' δ_nn' / dim(j)|`.
    pub residual: f64,
    pub pass: bool,
}

/// Great-orthogonality residual of an arbitrary list of irreps (which may
/// contain duplicates; those show up as a residual near `1/dim`).
pub fn orthogonality_check(order: usize, irreps: &[Irrep]) -> OrthogonalityReport {
    let entries: Vec<(usize, usize, usize)> = irreps
        .iter()
        .enumerate()
        .flat_map(|(j, irrep)| {
            (0..irrep.dim).flat_map(move |m| (0..irrep.dim).map(move |n| (j, m, n)))
        })
        .collect();
    let mut residual: f64 = 0.0;
    for &(j, m, n) in &entries {
        for &(k, mp, np) in &entries {
            let sum: C64 = (0..order)
                .map(|g| irreps[j].entry(g, m, n).conj() * irreps[k].entry(g, mp, np))
                .sum();
            let overlap = sum / order as f64;
            let expected = if j == k && m == mp && n == np {
                1.0 / irreps[j].dim as f64
            } else {
                0.0
            };
            residual = residual.max((overlap - C64::new(expected, 0.0)).norm());
        }
    }
    OrthogonalityReport {
        residual,
        pass: residual <= ALGEBRAIC_TOL,
    }
}

fn is_permutation(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for v in values {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    seen.iter().all(|&s| s)
}

fn root_of_unity(k: usize, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

fn one_dim(label: impl Into<String>, values: Vec<C64>) -> Irrep {
    Irrep {
        label: label.into(),
        dim: 1,
        matrices: values
            .into_iter()
            .map(|v| ComplexMatrix::from_element(1, 1, v))
            .collect(),
    }
}

/// `D^j(m) = e^{2πi jm/n}`.
fn cyclic_irreps(n: usize) -> Vec<Irrep> {
    (0..n)
        .map(|j| one_dim(j.to_string(), (0..n).map(|m| root_of_unity(j * m, n)).collect()))
        .collect()
}

fn dihedral_irreps(n: usize) -> Vec<Irrep> {
    let order = 2 * n;
    let sign = |flip: bool| if flip { -1.0 } else { 1.0 };
    let mut out = vec![
        one_dim("A1", vec![c(1.0, 0.0); order]),
        one_dim("A2", (0..order).map(|g| c(sign(g >= n), 0.0)).collect()),
    ];
    if n.is_multiple_of(2) {
        // r -> -1 is only consistent with r^n = 1 for even n
        out.push(one_dim(
            "B1",
            (0..order).map(|g| c(sign((g % n) % 2 == 1), 0.0)).collect(),
        ));
        out.push(one_dim(
            "B2",
            (0..order)
                .map(|g| c(sign((g % n) % 2 == 1) * sign(g >= n), 0.0))
                .collect(),
        ));
    }
    let s = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    for h in 1..=(n - 1) / 2 {
        let r = diag(&[root_of_unity(h, n), root_of_unity(n - h, n)]);
        let mut matrices = Vec::with_capacity(order);
        let mut rk = identity(2);
        let mut rotations = Vec::with_capacity(n);
        for _ in 0..n {
            rotations.push(rk.clone());
            rk = &rk * &r;
        }
        matrices.extend(rotations.iter().cloned());
        matrices.extend(rotations.iter().map(|rk| &s * rk));
        out.push(Irrep {
            label: format!("E{h}"),
            dim: 2,
            matrices,
        });
    }
    out
}

fn s3_permutations() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

fn s3_irreps() -> Vec<Irrep> {
    let perms = s3_permutations();
    let parity = |p: &[usize; 3]| {
        let inversions = (0..3)
            .flat_map(|a| (a + 1..3).map(move |b| (a, b)))
            .filter(|&(a, b)| p[a] > p[b])
            .count();
        if inversions % 2 == 0 { 1.0 } else { -1.0 }
    };
    // Orthonormal basis of the complement of (1,1,1).
    let a = 1.0 / 2f64.sqrt();
    let b = 1.0 / 6f64.sqrt();
    let basis = crate::numerics::real_matrix(3, 2, &[a, b, -a, b, 0.0, -2.0 * b]);
    let standard = perms
        .iter()
        .map(|p| {
            // P e_x = e_{p(x)}
            let perm = ComplexMatrix::from_fn(3, 3, |r, k| {
                if p[k] == r { c(1.0, 0.0) } else { c(0.0, 0.0) }
            });
            basis.adjoint() * perm * &basis
        })
        .collect();
    vec![
        one_dim("trivial", vec![c(1.0, 0.0); 6]),
        one_dim("sign", perms.iter().map(|p| c(parity(p), 0.0)).collect()),
        Irrep {
            label: "standard".into(),
            dim: 2,
            matrices: standard,
        },
    ]
}

fn quaternion_matrices() -> Vec<ComplexMatrix> {
    let one = identity(2);
    let i = diag(&[c(0., 1.), c(0., -1.)]);
    let j = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(-1., 0.), c(0., 0.)]);
    let k = &i * &j;
    [one, i, j, k]
        .into_iter()
        .flat_map(|m| {
            let neg = -&m;
            [m, neg]
        })
        .collect()
}

fn quaternion_irreps() -> Vec<Irrep> {
    // 1-dim irreps factor through Q8/{±1}: χ(±i) = a, χ(±j) = b, χ(±k) = ab.
    let chi = |a: f64, b: f64| -> Vec<C64> {
        [1.0, 1.0, a, a, b, b, a * b, a * b]
            .iter()
            .map(|&v| c(v, 0.0))
            .collect()
    };
    vec![
        one_dim("A", chi(1.0, 1.0)),
        one_dim("Bi", chi(1.0, -1.0)),
        one_dim("Bj", chi(-1.0, 1.0)),
        one_dim("Bk", chi(-1.0, -1.0)),
        Irrep {
            label: "E".into(),
            dim: 2,
            matrices: quaternion_matrices(),
        },
    ]
}
