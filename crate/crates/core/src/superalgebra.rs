use crate::matrix::{add_assign_scaled, vec_is_zero, Matrix};
use crate::scalar::{parse_scalar, FieldCtx, Scalar, ScalarParseError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: u8) -> Option<Parity> {
        match b {
            0 => Some(Parity::Even),
            1 => Some(Parity::Odd),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn compose(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// (-1)^{|a||b|}
pub fn parity_sign(a: Parity, b: Parity) -> i64 {
    if a == Parity::Odd && b == Parity::Odd {
        -1
    } else {
        1
    }
}

pub fn signed(s: Scalar, sign: i64) -> Scalar {
    if sign < 0 {
        -&s
    } else {
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("scalar in {context}: {source}")]
    Scalar {
        context: String,
        source: ScalarParseError,
    },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("bracket record ({i},{j}): {reason}")]
    BracketRecord { i: usize, j: usize, reason: String },
    #[error("skew-symmetry violated at basis pair ({i},{j})")]
    Skew { i: usize, j: usize },
    #[error("parity violated at bracket ({i},{j}) target {k}")]
    ParityBracket { i: usize, j: usize, k: usize },
    #[error("super-Jacobi fails at basis triple ({i},{j},{k}): defect {defect}")]
    Jacobi {
        i: usize,
        j: usize,
        k: usize,
        defect: String,
    },
    #[error("d is not even: entry ({r},{c}) mixes parities")]
    DNotEven { r: usize, c: usize },
    #[error("Leibniz fails for d at basis pair ({i},{j})")]
    Leibniz { i: usize, j: usize },
    #[error("1 is an eigenvalue of d")]
    EigenvalueOne,
    #[error("sigma is not even: entry ({r},{c}) mixes parities")]
    SigmaNotEven { r: usize, c: usize },
    #[error("sigma is not an automorphism at basis pair ({i},{j})")]
    SigmaNotAuto { i: usize, j: usize },
    #[error("sigma order mismatch: declared {declared}, but sigma^{actual} = id")]
    SigmaOrderEarly { declared: u32, actual: u32 },
    #[error("sigma^{declared} is not the identity")]
    SigmaOrderWrong { declared: u32 },
    #[error("sigma and d do not commute")]
    SigmaDCommute,
    #[error("field order {field_order} is not a multiple of sigma order {sigma_order}")]
    FieldOrder { field_order: u32, sigma_order: u32 },
    #[error("example constraint violated: {0}")]
    Constraint(String),
}

/// On-disk algebra description.  Bracket records hold each pair once: i<j for
/// pairs that are not odd-odd, i<=j for odd-odd; the other half is derived
/// from super-skew-symmetry.  Records outside canonical position are accepted
/// only when consistent with the derived value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub field_order: u32,
    pub dim: usize,
    pub parity: Vec<u8>,
    #[serde(default)]
    pub bracket: Vec<BracketRecord>,
    pub d: Vec<Vec<String>>,
    pub sigma: Vec<Vec<String>>,
    pub sigma_order: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketRecord {
    pub i: usize,
    pub j: usize,
    pub out: BTreeMap<String, String>,
}

impl AlgebraFile {
    pub fn from_json(text: &str) -> Result<AlgebraFile, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra file serializes")
    }
}

/// Validated finite-dimensional Lie superalgebra with derivation d and
/// automorphism sigma, all structure over Q(w).
#[derive(Clone)]
pub struct SuperAlgebra {
    pub name: String,
    pub ctx: Arc<FieldCtx>,
    pub dim: usize,
    pub parity: Vec<Parity>,
    /// table[i*dim+j] = coordinates of [e_i, e_j], both triangles populated.
    table: Vec<Vec<Scalar>>,
    pub d: Matrix,
    pub sigma: Matrix,
    pub sigma_order: u32,
}

impl SuperAlgebra {
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Scalar] {
        &self.table[i * self.dim + j]
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(&self.ctx); self.dim];
        v[i] = Scalar::one(&self.ctx);
        v
    }

    pub fn bracket_vec(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(&self.ctx); self.dim];
        for i in 0..self.dim {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if v[j].is_zero() {
                    continue;
                }
                let c = &u[i] * &v[j];
                add_assign_scaled(&mut out, &c, self.bracket_basis(i, j));
            }
        }
        out
    }

    /// Parity of a nonzero homogeneous vector; panics on parity-mixed input,
    /// which validated data never produces.
    pub fn parity_of_vec(&self, v: &[Scalar]) -> Option<Parity> {
        let mut found = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match found {
                None => found = Some(self.parity[i]),
                Some(p) => assert_eq!(p, self.parity[i], "parity-mixed vector"),
            }
        }
        found
    }

    pub fn render_vec(&self, v: &[Scalar]) -> String {
        render_vec_with(v, |i| format!("e{}", i + 1))
    }
}

pub fn render_vec_with(v: &[Scalar], name: impl Fn(usize) -> String) -> String {
    let mut parts = Vec::new();
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if c.is_one() {
            parts.push(name(i));
        } else {
            parts.push(format!("({})*{}", c, name(i)));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn parse_matrix(
    ctx: &Arc<FieldCtx>,
    rows: &[Vec<String>],
    dim: usize,
    what: &str,
) -> Result<Matrix, SpecError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(SpecError::Shape(format!(
            "{} must be {}x{}",
            what, dim, dim
        )));
    }
    let mut m = Matrix::zero(ctx, dim, dim);
    for (r, row) in rows.iter().enumerate() {
        for (c, text) in row.iter().enumerate() {
            let s = parse_scalar(ctx, text).map_err(|source| SpecError::Scalar {
                context: format!("{}[{}][{}]", what, r, c),
                source,
            })?;
            m.set(r, c, s);
        }
    }
    Ok(m)
}

/// Loads and fully validates an algebra file: structure constants, parity
/// homogeneity, super-Jacobi, the derivation laws and the automorphism laws.
pub fn build_algebra(file: &AlgebraFile) -> Result<SuperAlgebra, SpecError> {
    if file.field_order < 1 {
        return Err(SpecError::Shape("field_order must be >= 1".into()));
    }
    if file.sigma_order < 1 {
        return Err(SpecError::Shape("sigma_order must be >= 1".into()));
    }
    let ctx = FieldCtx::get(file.field_order);
    let dim = file.dim;
    if file.parity.len() != dim {
        return Err(SpecError::Shape(format!(
            "parity length {} != dim {}",
            file.parity.len(),
            dim
        )));
    }
    let parity: Vec<Parity> = file
        .parity
        .iter()
        .map(|&b| Parity::from_bit(b).ok_or_else(|| SpecError::Shape("parity entries are 0 or 1".into())))
        .collect::<Result<_, _>>()?;

    let d = parse_matrix(&ctx, &file.d, dim, "d")?;
    let sigma = parse_matrix(&ctx, &file.sigma, dim, "sigma")?;

    // Structure constants.  Canonical records define the table; records in
    // anti-canonical position are only cross-checked against the derived half.
    let mut canonical: BTreeMap<(usize, usize), Vec<Scalar>> = BTreeMap::new();
    let mut extra: Vec<(usize, usize, Vec<Scalar>)> = Vec::new();
    for rec in &file.bracket {
        if rec.i < 1 || rec.i > dim || rec.j < 1 || rec.j > dim {
            return Err(SpecError::BracketRecord {
                i: rec.i,
                j: rec.j,
                reason: format!("index out of range 1..={}", dim),
            });
        }
        let (i, j) = (rec.i - 1, rec.j - 1);
        let mut coords = vec![Scalar::zero(&ctx); dim];
        for (key, text) in &rec.out {
            let k: usize = key.parse().map_err(|_| SpecError::BracketRecord {
                i: rec.i,
                j: rec.j,
                reason: format!("bad target index {:?}", key),
            })?;
            if k < 1 || k > dim {
                return Err(SpecError::BracketRecord {
                    i: rec.i,
                    j: rec.j,
                    reason: format!("target index {} out of range", k),
                });
            }
            coords[k - 1] = parse_scalar(&ctx, text).map_err(|source| SpecError::Scalar {
                context: format!("bracket ({},{}) target {}", rec.i, rec.j, k),
                source,
            })?;
        }
        let odd_pair = parity[i] == Parity::Odd && parity[j] == Parity::Odd;
        let is_canonical = if odd_pair { i <= j } else { i < j };
        if is_canonical {
            if canonical.insert((i, j), coords).is_some() {
                return Err(SpecError::BracketRecord {
                    i: rec.i,
                    j: rec.j,
                    reason: "duplicate record".into(),
                });
            }
        } else {
            extra.push((i, j, coords));
        }
    }

    let zero_vec = vec![Scalar::zero(&ctx); dim];
    let mut table = vec![zero_vec.clone(); dim * dim];
    for ((i, j), coords) in &canonical {
        table[i * dim + j] = coords.clone();
        if i != j {
            let sign = parity_sign(parity[*i], parity[*j]);
            table[j * dim + i] = coords.iter().map(|c| signed(-c, sign)).collect();
        }
    }
    for (i, j, coords) in &extra {
        // [e_i, e_i] = 0 for even e_i; otherwise the derived skew half.
        let expected = &table[i * dim + j];
        if coords != expected {
            let (a, b) = (usize::min(*i, *j), usize::max(*i, *j));
            return Err(SpecError::Skew { i: a + 1, j: b + 1 });
        }
    }

    for i in 0..dim {
        for j in 0..dim {
            let target = parity[i].compose(parity[j]);
            for (k, c) in table[i * dim + j].iter().enumerate() {
                if !c.is_zero() && parity[k] != target {
                    return Err(SpecError::ParityBracket {
                        i: i + 1,
                        j: j + 1,
                        k: k + 1,
                    });
                }
            }
        }
    }

    let alg = SuperAlgebra {
        name: file.name.clone(),
        ctx,
        dim,
        parity,
        table,
        d,
        sigma,
        sigma_order: file.sigma_order,
    };
    check_jacobi(&alg)?;
    validate_derivation(&alg)?;
    validate_automorphism(&alg, file.field_order)?;
    Ok(alg)
}

fn check_jacobi(alg: &SuperAlgebra) -> Result<(), SpecError> {
    let dim = alg.dim;
    for i in 0..dim {
        for j in 0..dim {
            let sign = parity_sign(alg.parity[i], alg.parity[j]);
            for k in 0..dim {
                // [e_i,[e_j,e_k]] - [[e_i,e_j],e_k] - (-1)^{|i||j|}[e_j,[e_i,e_k]]
                let lhs = alg.bracket_vec(&alg.basis_vec(i), alg.bracket_basis(j, k));
                let m1 = alg.bracket_vec(alg.bracket_basis(i, j), &alg.basis_vec(k));
                let m2 = alg.bracket_vec(&alg.basis_vec(j), alg.bracket_basis(i, k));
                let defect: Vec<Scalar> = lhs
                    .iter()
                    .zip(m1.iter().zip(&m2))
                    .map(|(l, (a, b))| &(l - a) - &signed(b.clone(), sign))
                    .collect();
                if !vec_is_zero(&defect) {
                    return Err(SpecError::Jacobi {
                        i: i + 1,
                        j: j + 1,
                        k: k + 1,
                        defect: alg.render_vec(&defect),
                    });
                }
            }
        }
    }
    Ok(())
}

fn check_even_map(alg: &SuperAlgebra, m: &Matrix, sigma: bool) -> Result<(), SpecError> {
    for r in 0..alg.dim {
        for c in 0..alg.dim {
            if !m.at(r, c).is_zero() && alg.parity[r] != alg.parity[c] {
                return if sigma {
                    Err(SpecError::SigmaNotEven { r: r + 1, c: c + 1 })
                } else {
                    Err(SpecError::DNotEven { r: r + 1, c: c + 1 })
                };
            }
        }
    }
    Ok(())
}

/// Leibniz law, evenness and the spectral condition det(d - 1) != 0.
pub fn validate_derivation(alg: &SuperAlgebra) -> Result<(), SpecError> {
    check_even_map(alg, &alg.d, false)?;
    for i in 0..alg.dim {
        for j in 0..alg.dim {
            let lhs = alg.d.apply(alg.bracket_basis(i, j));
            let di = alg.d.apply(&alg.basis_vec(i));
            let dj = alg.d.apply(&alg.basis_vec(j));
            let mut rhs = alg.bracket_vec(&di, &alg.basis_vec(j));
            let rhs2 = alg.bracket_vec(&alg.basis_vec(i), &dj);
            for (a, b) in rhs.iter_mut().zip(rhs2) {
                *a = &*a + &b;
            }
            if lhs != rhs {
                return Err(SpecError::Leibniz { i: i + 1, j: j + 1 });
            }
        }
    }
    let one = Scalar::one(&alg.ctx);
    let shifted = alg.d.sub(&Matrix::identity(&alg.ctx, alg.dim).scale(&one));
    if shifted.rank() != alg.dim {
        return Err(SpecError::EigenvalueOne);
    }
    Ok(())
}

/// Automorphism law, exact order n with sigma^k != id below it, commutation
/// with d, and n | field order.
pub fn validate_automorphism(alg: &SuperAlgebra, field_order: u32) -> Result<(), SpecError> {
    check_even_map(alg, &alg.sigma, true)?;
    for i in 0..alg.dim {
        for j in 0..alg.dim {
            let lhs = alg.sigma.apply(alg.bracket_basis(i, j));
            let si = alg.sigma.apply(&alg.basis_vec(i));
            let sj = alg.sigma.apply(&alg.basis_vec(j));
            let rhs = alg.bracket_vec(&si, &sj);
            if lhs != rhs {
                return Err(SpecError::SigmaNotAuto { i: i + 1, j: j + 1 });
            }
        }
    }
    let n = alg.sigma_order;
    let id = Matrix::identity(&alg.ctx, alg.dim);
    let mut power = id.clone();
    for k in 1..=n {
        power = power.mul(&alg.sigma);
        if power == id && k < n {
            return Err(SpecError::SigmaOrderEarly {
                declared: n,
                actual: k,
            });
        }
    }
    if power != id {
        return Err(SpecError::SigmaOrderWrong { declared: n });
    }
    if alg.sigma.mul(&alg.d) != alg.d.mul(&alg.sigma) {
        return Err(SpecError::SigmaDCommute);
    }
    if field_order % n != 0 {
        return Err(SpecError::FieldOrder {
            field_order,
            sigma_order: n,
        });
    }
    Ok(())
}

/// Eigenspace decomposition under sigma, with change of basis between the
/// file basis and the concatenated eigenbasis.
pub struct SigmaGrading {
    pub n: u32,
    /// components[r]: eigenbasis vectors of eigenvalue w_n^r in file coordinates.
    pub components: Vec<Vec<Vec<Scalar>>>,
    /// parity of each eigenbasis vector, indexed like components.
    pub parities: Vec<Vec<Parity>>,
    /// Columns are the concatenated eigenbasis vectors.
    pub to_file: Matrix,
    pub from_file: Matrix,
    /// Residue of each concatenated-eigenbasis position.
    pub residues: Vec<usize>,
}

impl SigmaGrading {
    pub fn component_dim(&self, r: usize) -> usize {
        self.components[r].len()
    }
}

pub fn sigma_components(alg: &SuperAlgebra) -> SigmaGrading {
    let n = alg.sigma_order;
    let ctx = &alg.ctx;
    let step = (ctx.order() / n) as i64;
    let mut components = Vec::new();
    let mut parities = Vec::new();
    let mut columns: Vec<Vec<Scalar>> = Vec::new();
    let mut residues = Vec::new();
    for r in 0..n as i64 {
        let ev = Scalar::root_pow(ctx, step * r);
        let basis = alg.sigma.eigenspace(&ev);
        let pars: Vec<Parity> = basis
            .iter()
            .map(|v| alg.parity_of_vec(v).expect("eigenvector is nonzero"))
            .collect();
        for v in &basis {
            columns.push(v.clone());
            residues.push(r as usize);
        }
        components.push(basis);
        parities.push(pars);
    }
    assert_eq!(columns.len(), alg.dim, "sigma is diagonalizable");
    let to_file = Matrix::from_fn(ctx, alg.dim, alg.dim, |i, j| columns[j][i].clone());
    let from_file = to_file.inverse().expect("eigenbasis is a basis");
    let grading = SigmaGrading {
        n,
        components,
        parities,
        to_file,
        from_file,
        residues,
    };
    // [s_[a], s_[b]] lands in s_[a+b] and d preserves each component; both are
    // consequences of the validated laws, asserted here as cheap invariants.
    for (pos_u, ru) in grading.residues.iter().enumerate() {
        let u = &columns[pos_u];
        let du = grading.from_file.apply(&alg.d.apply(u));
        for (pos, c) in du.iter().enumerate() {
            assert!(
                c.is_zero() || grading.residues[pos] == *ru,
                "d mixes sigma components"
            );
        }
        for (pos_v, rv) in grading.residues.iter().enumerate() {
            let b = alg.bracket_vec(u, &columns[pos_v]);
            let coords = grading.from_file.apply(&b);
            let target = (ru + rv) % n as usize;
            for (pos, c) in coords.iter().enumerate() {
                assert!(
                    c.is_zero() || grading.residues[pos] == target,
                    "bracket leaves its sigma component"
                );
            }
        }
    }
    grading
}

/// The input algebra with the derivation adjoined as a final even generator:
/// [del, x] = d(x), [del, del] = 0, sigma(del) = del, d(del) = 0.
pub struct DerAlgebra {
    pub alg: SuperAlgebra,
    pub s_dim: usize,
}

impl DerAlgebra {
    pub fn del_index(&self) -> usize {
        self.s_dim
    }

    pub fn basis_name(&self, i: usize) -> String {
        if i == self.s_dim {
            "del".to_string()
        } else {
            format!("e{}", i + 1)
        }
    }
}

pub fn adjoin_derivation(g: &SuperAlgebra) -> DerAlgebra {
    let dim = g.dim + 1;
    let ctx = &g.ctx;
    let zero_vec = vec![Scalar::zero(ctx); dim];
    let mut table = vec![zero_vec.clone(); dim * dim];
    let pad = |v: &[Scalar]| -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(ctx); dim];
        out[..g.dim].clone_from_slice(v);
        out
    };
    for i in 0..g.dim {
        for j in 0..g.dim {
            table[i * dim + j] = pad(g.bracket_basis(i, j));
        }
    }
    let del = g.dim;
    for j in 0..g.dim {
        let col = g.d.apply(&g.basis_vec(j));
        table[del * dim + j] = pad(&col);
        table[j * dim + del] = pad(&col).iter().map(|c| -c).collect();
    }
    let mut parity = g.parity.clone();
    parity.push(Parity::Even);
    let embed = |m: &Matrix, corner: Scalar| -> Matrix {
        Matrix::from_fn(ctx, dim, dim, |i, j| {
            if i < g.dim && j < g.dim {
                m.at(i, j).clone()
            } else if i == del && j == del {
                corner.clone()
            } else {
                Scalar::zero(ctx)
            }
        })
    };
    let alg = SuperAlgebra {
        name: format!("{}+del", g.name),
        ctx: ctx.clone(),
        dim,
        parity,
        table,
        d: embed(&g.d, Scalar::zero(ctx)),
        sigma: embed(&g.sigma, Scalar::one(ctx)),
        sigma_order: g.sigma_order,
    };
    debug_assert!(check_jacobi(&alg).is_ok());
    DerAlgebra { alg, s_dim: g.dim }
}

/// Validated bundle carried through the later stages.
pub struct AlgebraData {
    pub s: SuperAlgebra,
    pub grading: SigmaGrading,
    pub der: DerAlgebra,
}

pub fn prepare(file: &AlgebraFile) -> Result<AlgebraData, SpecError> {
    let s = build_algebra(file)?;
    let grading = sigma_components(&s);
    let der = adjoin_derivation(&s);
    Ok(AlgebraData { s, grading, der })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn zero_rows(dim: usize) -> Vec<Vec<String>> {
        vec![vec!["0".to_string(); dim]; dim]
    }

    fn id_rows(dim: usize) -> Vec<Vec<String>> {
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { "1" } else { "0" }.to_string())
                    .collect()
            })
            .collect()
    }

    fn record(i: usize, j: usize, out: &[(usize, &str)]) -> BracketRecord {
        BracketRecord {
            i,
            j,
            out: out
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    fn sl2_file() -> AlgebraFile {
        AlgebraFile {
            name: "sl2".into(),
            field_order: 1,
            dim: 3,
            parity: vec![0, 0, 0],
            bracket: vec![
                record(1, 2, &[(2, "2")]),
                record(1, 3, &[(3, "-2")]),
                record(2, 3, &[(1, "1")]),
            ],
            d: zero_rows(3),
            sigma: id_rows(3),
            sigma_order: 1,
        }
    }

    fn onedim_file(beta: &str) -> AlgebraFile {
        AlgebraFile {
            name: "onedim".into(),
            field_order: 1,
            dim: 1,
            parity: vec![0],
            bracket: vec![],
            d: vec![vec![beta.to_string()]],
            sigma: id_rows(1),
            sigma_order: 1,
        }
    }

    #[test]
    fn accepts_onedim_abelian() {
        let alg = build_algebra(&onedim_file("0")).unwrap();
        assert_eq!(alg.dim, 1);
    }

    #[test]
    fn accepts_sl2() {
        let alg = build_algebra(&sl2_file()).unwrap();
        // [e,f] = h
        assert!(alg.bracket_basis(1, 2)[0].is_one());
        // derived half: [f,e] = -h
        assert_eq!(alg.bracket_basis(2, 1)[0], Scalar::from_i64(&alg.ctx, -1));
    }

    #[test]
    fn rejects_inconsistent_skew_listing() {
        let mut f = sl2_file();
        f.bracket.push(record(2, 1, &[(2, "2")]));
        match build_algebra(&f) {
            Err(SpecError::Skew { i: 1, j: 2 }) => {}
            other => panic!("expected skew witness (1,2), got {:?}", other.err()),
        }
        // consistent anti-canonical listing is allowed
        let mut g = sl2_file();
        g.bracket.push(record(2, 1, &[(2, "-2")]));
        assert!(build_algebra(&g).is_ok());
    }

    #[test]
    fn rejects_identity_derivation() {
        match build_algebra(&onedim_file("1")) {
            Err(SpecError::EigenvalueOne) => {}
            other => panic!("expected eigenvalue rejection, got {:?}", other.err()),
        }
    }

    #[test]
    fn accepts_jordan_block_derivation() {
        let f = AlgebraFile {
            name: "jordan".into(),
            field_order: 1,
            dim: 2,
            parity: vec![0, 0],
            bracket: vec![],
            d: vec![
                vec!["0".into(), "1".into()],
                vec!["0".into(), "0".into()],
            ],
            sigma: id_rows(2),
            sigma_order: 1,
        };
        assert!(build_algebra(&f).is_ok());
    }

    #[test]
    fn rejects_wrong_sigma_order() {
        let mut f = onedim_file("0");
        f.field_order = 2;
        f.sigma_order = 2;
        match build_algebra(&f) {
            Err(SpecError::SigmaOrderEarly {
                declared: 2,
                actual: 1,
            }) => {}
            other => panic!("expected early-order rejection, got {:?}", other.err()),
        }
    }

    #[test]
    fn rejects_field_incompatible_order() {
        let mut f = onedim_file("0");
        f.field_order = 3;
        f.sigma = vec![vec!["w".into()]];
        f.sigma_order = 2;
        match build_algebra(&f) {
            Err(SpecError::SigmaOrderWrong { declared: 2 }) => {}
            other => panic!("expected order rejection, got {:?}", other.err()),
        }
    }

    #[test]
    fn gap3_components() {
        let f = AlgebraFile {
            name: "gap3".into(),
            field_order: 3,
            dim: 2,
            parity: vec![0, 0],
            bracket: vec![],
            d: zero_rows(2),
            sigma: vec![
                vec!["w".into(), "0".into()],
                vec!["0".into(), "w^2".into()],
            ],
            sigma_order: 3,
        };
        let alg = build_algebra(&f).unwrap();
        let grading = sigma_components(&alg);
        assert_eq!(grading.component_dim(0), 0);
        assert_eq!(grading.component_dim(1), 1);
        assert_eq!(grading.component_dim(2), 1);
    }

    #[test]
    fn onedim_twisted_components() {
        let f = AlgebraFile {
            name: "onedim-n2".into(),
            field_order: 2,
            dim: 1,
            parity: vec![0],
            bracket: vec![],
            d: zero_rows(1),
            sigma: vec![vec!["w".into()]],
            sigma_order: 2,
        };
        let alg = build_algebra(&f).unwrap();
        let grading = sigma_components(&alg);
        assert_eq!(grading.component_dim(0), 0);
        assert_eq!(grading.component_dim(1), 1);
    }

    #[test]
    fn trivial_sigma_single_component() {
        let alg = build_algebra(&sl2_file()).unwrap();
        let grading = sigma_components(&alg);
        assert_eq!(grading.component_dim(0), 3);
    }

    #[test]
    fn derivation_generator_on_empty_algebra() {
        let f = AlgebraFile {
            name: "zero".into(),
            field_order: 1,
            dim: 0,
            parity: vec![],
            bracket: vec![],
            d: vec![],
            sigma: vec![],
            sigma_order: 1,
        };
        let alg = build_algebra(&f).unwrap();
        let der = adjoin_derivation(&alg);
        assert_eq!(der.alg.dim, 1);
        assert!(vec_is_zero(der.alg.bracket_basis(0, 0)));
    }

    #[test]
    fn derivation_generator_reproduces_d_columns() {
        let beta = "1/2";
        let alg = build_algebra(&onedim_file(beta)).unwrap();
        let der = adjoin_derivation(&alg);
        let del = der.del_index();
        // [del, e1] = (1/2) e1
        assert_eq!(
            der.alg.bracket_basis(del, 0)[0],
            Scalar::from_rat(&alg.ctx, rat(1, 2))
        );
        // restriction matches the input table bit-exactly
        for i in 0..alg.dim {
            for j in 0..alg.dim {
                assert_eq!(
                    der.alg.bracket_basis(i, j)[..alg.dim],
                    *alg.bracket_basis(i, j)
                );
            }
        }
    }

    #[test]
    fn derivation_generator_central_when_d_zero() {
        let alg = build_algebra(&sl2_file()).unwrap();
        let der = adjoin_derivation(&alg);
        let del = der.del_index();
        for j in 0..der.alg.dim {
            assert!(vec_is_zero(der.alg.bracket_basis(del, j)));
        }
    }

    #[test]
    fn mutating_any_sl2_constant_is_rejected() {
        let base = sl2_file();
        for (pi, pj) in [(1, 2), (1, 3), (2, 3)] {
            for target in 1..=3usize {
                let mut f = base.clone();
                let rec = f
                    .bracket
                    .iter_mut()
                    .find(|r| r.i == pi && r.j == pj)
                    .unwrap();
                let old: i64 = rec
                    .out
                    .get(&target.to_string())
                    .map_or(0, |s| s.parse().unwrap());
                rec.out
                    .insert(target.to_string(), (old + 1).to_string());
                let err = build_algebra(&f).expect_err("mutation must be rejected");
                match err {
                    SpecError::Jacobi { i, j, k, .. } => {
                        assert!((1..=3).contains(&i) && (1..=3).contains(&j) && (1..=3).contains(&k));
                    }
                    other => panic!("expected a Jacobi witness, got {:?}", other),
                }
            }
        }
    }
}
