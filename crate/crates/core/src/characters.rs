//! Irreducible characters of S_d by the Murnaghan–Nakayama rule, plus an
//! independent linear-algebra oracle and the normalized characters φ_λ(Δ).

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{arg_err, Error, Result};
use crate::partitions::{dim_over_dfact, enumerate_partitions, z_of, Partition};
use crate::scalar::Rational;
use crate::symfunc::schur_in_p;

type Memo = RwLock<HashMap<(Partition, Partition), BigInt>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(|| RwLock::new(HashMap::new()))
}

/// χ_λ(Δ), exact.
pub fn character(lambda: &Partition, delta: &Partition) -> Result<Rational> {
    if lambda.weight() != delta.weight() {
        return arg_err(format!("weights differ: |{}| vs |{}|", lambda, delta));
    }
    Ok(Rational::from_integer(mn(lambda, delta.parts())))
}

fn mn(lambda: &Partition, rest: &[usize]) -> BigInt {
    let Some((&k, tail)) = rest.split_first() else {
        return if lambda.is_empty() { BigInt::one() } else { BigInt::zero() };
    };
    let key = (lambda.clone(), Partition::from_unsorted(rest.to_vec()));
    if let Some(v) = memo().read().unwrap().get(&key) {
        return v.clone();
    }
    // Border strips of size k ↔ moves h → h − k on the beta-set.
    let l = lambda.len();
    let beta: Vec<usize> = (1..=l).map(|i| lambda.part(i) + l - i).collect();
    let mut total = BigInt::zero();
    for (idx, &h) in beta.iter().enumerate() {
        if h < k || beta.contains(&(h - k)) {
            continue;
        }
        let target = h - k;
        let crossed = beta.iter().filter(|&&b| b > target && b < h).count();
        let mut nb = beta.clone();
        nb[idx] = target;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let parts: Vec<usize> = nb.iter().enumerate().map(|(i, &b)| b - (l - 1 - i)).collect();
        let mu = Partition::new(parts).expect("beta-set yields a partition");
        let v = mn(&mu, tail);
        if crossed % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    memo().write().unwrap().insert(key, total.clone());
    total
}

/// φ_λ(Δ) = χ_λ(Δ) · d! / (dim λ · z_Δ)
pub fn phi(lambda: &Partition, delta: &Partition) -> Result<Rational> {
    let chi = character(lambda, delta)?;
    Ok(chi / (dim_over_dfact(lambda) * z_of(delta)))
}

/// All χ_λ(Δ) for one weight d.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub d: usize,
    pub partitions: Vec<Partition>,
    entries: HashMap<(Partition, Partition), Rational>,
}

impl CharacterTable {
    pub fn new(d: usize) -> Self {
        let partitions = enumerate_partitions(d);
        let mut entries = HashMap::new();
        for l in &partitions {
            for m in &partitions {
                entries.insert((l.clone(), m.clone()), character(l, m).expect("same weight"));
            }
        }
        CharacterTable { d, partitions, entries }
    }

    pub fn get(&self, lambda: &Partition, delta: &Partition) -> Option<&Rational> {
        self.entries.get(&(lambda.clone(), delta.clone()))
    }

    /// Rows λ, columns Δ, both in reverse-lex order.
    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.partitions
            .iter()
            .map(|l| self.partitions.iter().map(|m| self.entries[&(l.clone(), m.clone())].clone()).collect())
            .collect()
    }
}

pub const ORACLE_MAX_WEIGHT: usize = 6;

/// χ_λ(Δ) read off by solving p_Δ = Σ_μ c_μ s_μ exactly in the monomial basis.
pub fn character_oracle(lambda: &Partition, delta: &Partition) -> Result<Rational> {
    let d = delta.weight();
    if lambda.weight() != d {
        return arg_err(format!("weights differ: |{}| vs |{}|", lambda, delta));
    }
    if d > ORACLE_MAX_WEIGHT {
        return Err(Error::ScaleGuard(format!("oracle limited to d <= {}, got {}", ORACLE_MAX_WEIGHT, d)));
    }
    let basis = enumerate_partitions(d);
    let n = basis.len();
    // a[row = monomial Δ'][col = μ] = coefficient of p_Δ' in s_μ; rhs = e_Δ
    let mut a: Vec<Vec<Rational>> = basis
        .iter()
        .map(|dp| {
            let mut row: Vec<Rational> = basis.iter().map(|mu| schur_in_p(mu).coeff(dp)).collect();
            row.push(if dp == delta { Rational::one() } else { Rational::zero() });
            row
        })
        .collect();
    let sol = solve_augmented(&mut a, n).ok_or_else(|| Error::Numeric("singular Schur basis".into()))?;
    let pos = basis.iter().position(|m| m == lambda).expect("λ in basis");
    Ok(sol[pos].clone())
}

/// Gauss–Jordan on an n×(n+1) augmented system.
fn solve_augmented(a: &mut [Vec<Rational>], n: usize) -> Option<Vec<Rational>> {
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = Rational::one() / a[col][col].clone();
        for v in a[col].iter_mut() {
            *v *= inv.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
    }
    Some(a.iter().map(|row| row[n].clone()).collect())
}

/// dim λ as χ_λ(1^d); the same as d!·dim_over_dfact.
pub fn dim_via_character(lambda: &Partition) -> Rational {
    character(lambda, &Partition::column(lambda.weight())).expect("same weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::factorial_rational;
    use crate::scalar::int;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(character(&p(&[1, 1]), &p(&[2])).unwrap(), int(-1));
        assert_eq!(character(&p(&[2, 1]), &p(&[3])).unwrap(), int(-1));
        for d in 1..=7 {
            for delta in enumerate_partitions(d) {
                assert_eq!(character(&Partition::row(d), &delta).unwrap(), int(1));
            }
        }
        assert!(character(&p(&[2]), &p(&[1])).is_err());
    }

    #[test]
    fn identity_column_gives_dimension() {
        for d in 0..=8 {
            for lambda in enumerate_partitions(d) {
                assert_eq!(dim_via_character(&lambda), dim_over_dfact(&lambda) * factorial_rational(d));
            }
        }
    }

    #[test]
    fn oracle_small_cases() {
        assert_eq!(character_oracle(&p(&[1]), &p(&[1])).unwrap(), int(1));
        assert_eq!(character_oracle(&p(&[2]), &p(&[1, 1])).unwrap(), int(1));
        assert!(matches!(character_oracle(&Partition::row(7), &Partition::row(7)), Err(Error::ScaleGuard(_))));
    }

    #[test]
    fn murnaghan_nakayama_matches_oracle() {
        for d in 0..=5 {
            let parts = enumerate_partitions(d);
            for l in &parts {
                for m in &parts {
                    assert_eq!(character(l, m).unwrap(), character_oracle(l, m).unwrap(), "χ_{:?}({:?})", l, m);
                }
            }
        }
    }

    #[test]
    fn sign_character_is_conjugate_twist() {
        // χ_{λ'}(Δ) = sgn(Δ) χ_λ(Δ)
        for d in 1..=7 {
            for l in enumerate_partitions(d) {
                for m in enumerate_partitions(d) {
                    let sgn = if (d - m.len()) % 2 == 0 { int(1) } else { int(-1) };
                    assert_eq!(character(&l.conjugate(), &m).unwrap(), sgn * character(&l, &m).unwrap());
                }
            }
        }
    }

    #[test]
    fn table_is_square() {
        let t = CharacterTable::new(4);
        assert_eq!(t.rows().len(), 5);
        assert_eq!(t.get(&p(&[4]), &p(&[2, 2])), Some(&int(1)));
    }
}
