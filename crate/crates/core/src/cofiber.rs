//! Homotopy of a two-cell complex `C_α = S⁰ ∪_α e^n` from the exact portion
//!
//! ```text
//! π_{k-n+1}(S) --α--> π_k(S) --> π_k(C_α) --> π_{k-n}(S) --α--> π_{k-1}(S)
//! ```
//!
//! with `n = |α| + 1`.

use std::fmt;

use crate::abelian::{hom_kernel, GroupStructure, Order};
use crate::error::TableError;
use crate::stems::{Element, ProductValue, StemsTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// Forced by exactness: one side vanishes, or `α = 0` and the complex is a wedge.
    Determined(GroupStructure),
    /// Taken from an `extension` record.
    Annotated {
        summands: Vec<(String, u64)>,
        cite: Option<String>,
    },
    OrdersOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CofiberResult {
    pub alpha: Element,
    pub degree: u32,
    pub top_cell: u32,
    /// `π_k(S) / α·π_{k-|α|}(S)`; `None` when a needed product is unknown.
    pub coker: Option<GroupStructure>,
    /// `ker(α·: π_{k-n}(S) → π_{k-1}(S))`.
    pub ker: Option<GroupStructure>,
    pub resolution: Resolution,
}

impl CofiberResult {
    pub fn incomplete(&self) -> bool {
        self.coker.is_none() || self.ker.is_none()
    }

    pub fn orders(&self) -> Option<(Order, Order)> {
        Some((self.coker.as_ref()?.order(), self.ker.as_ref()?.order()))
    }

    pub fn order(&self) -> Option<Order> {
        match self.orders()? {
            (Order::Finite(a), Order::Finite(b)) => Some(Order::Finite(a * b)),
            _ => Some(Order::Infinite),
        }
    }

    pub fn group(&self) -> Option<GroupStructure> {
        match &self.resolution {
            Resolution::Determined(g) => Some(g.clone()),
            Resolution::Annotated { summands, .. } => {
                Some(GroupStructure::new(summands.iter().map(|s| s.1).collect()))
            }
            Resolution::OrdersOnly => None,
        }
    }
}

impl fmt::Display for CofiberResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.resolution {
            Resolution::Determined(g) => write!(f, "{g}"),
            Resolution::Annotated { summands, cite } => {
                let parts: Vec<String> = summands
                    .iter()
                    .map(|(l, o)| if *o == 0 { format!("Z {l}") } else { format!("Z/{o} {l}") })
                    .collect();
                write!(f, "{}", parts.join(" ⊕ "))?;
                if let Some(c) = cite {
                    write!(f, " [{c}]")?;
                }
                Ok(())
            }
            Resolution::OrdersOnly => {
                let show = |g: &Option<GroupStructure>| {
                    g.as_ref().map_or("?".to_string(), |g| g.order().to_string())
                };
                write!(f, "orders only: {} then {}", show(&self.coker), show(&self.ker))
            }
        }
    }
}

fn images(
    table: &StemsTable,
    alpha: &Element,
    source_degree: u32,
) -> Result<Option<Vec<Vec<i64>>>, TableError> {
    let mut out = Vec::new();
    for g in table.sphere.generators(source_degree) {
        match table.product(alpha, &g)? {
            ProductValue::Known(v) => out.push(v.coeffs),
            ProductValue::Unknown => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// `π_k(C_α)` up to extension.
pub fn cofiber_pi(table: &StemsTable, alpha: &Element, k: u32) -> Result<CofiberResult, TableError> {
    table.in_range(k as i64)?;
    let a = alpha.degree;
    let n = a + 1;

    let target = table.sphere.cyclic(k);
    let coker = if k < a {
        Some(target.structure())
    } else {
        images(table, alpha, k - a)?.map(|im| target.subgroup(&im).quotient_structure())
    };

    let ker = if k < n {
        Some(GroupStructure::trivial())
    } else {
        let src = table.sphere.cyclic(k - n);
        let dst = table.sphere.cyclic(k - 1);
        images(table, alpha, k - n)?.map(|im| hom_kernel(&src, &dst, &im).structure())
    };

    let resolution = match (&coker, &ker) {
        (Some(c), Some(kk)) if alpha.is_zero() => Resolution::Determined(c.direct_sum(kk)),
        (Some(c), Some(kk)) if kk.is_trivial() => Resolution::Determined(c.clone()),
        (Some(c), Some(kk)) if c.is_trivial() => Resolution::Determined(kk.clone()),
        _ => match table.extension(alpha, k) {
            Some(ext) => {
                let annotated = GroupStructure::new(ext.summands.iter().map(|s| s.1).collect());
                if let (Some(c), Some(kk)) = (&coker, &ker) {
                    if annotated.order() != c.direct_sum(kk).order() {
                        return Err(TableError::Inconsistent(format!(
                            "extension record for {} in degree {k} has order {} but the exact sequence gives {}",
                            table.display(alpha),
                            annotated.order(),
                            c.direct_sum(kk).order()
                        )));
                    }
                }
                Resolution::Annotated {
                    summands: ext.summands.clone(),
                    cite: ext.cite.clone(),
                }
            }
            None => Resolution::OrdersOnly,
        },
    };

    Ok(CofiberResult {
        alpha: alpha.clone(),
        degree: k,
        top_cell: n,
        coker,
        ker,
        resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_in_degree_three() {
        let t = StemsTable::reference();
        let r = cofiber_pi(&t, &t.element("eta").unwrap(), 3).unwrap();
        assert_eq!(r.to_string(), "Z/4");
        assert_eq!(r.ker, Some(GroupStructure::trivial()));
    }

    #[test]
    fn nu_in_degree_seven() {
        let t = StemsTable::reference();
        let r = cofiber_pi(&t, &t.element("nu").unwrap(), 7).unwrap();
        assert_eq!(r.orders(), Some((Order::Finite(16), Order::Finite(4))));
        assert_eq!(r.group(), Some(GroupStructure::new(vec![16, 4])));
    }

    #[test]
    fn moore_spectrum_bottom() {
        let t = StemsTable::reference();
        for r in 1..=4 {
            let two_r = t.element(&(1i64 << r).to_string()).unwrap();
            let c = cofiber_pi(&t, &two_r, 0).unwrap();
            assert_eq!(c.group(), Some(GroupStructure::new(vec![1 << r])));
        }
    }

    #[test]
    fn beyond_range_is_refused() {
        let t = StemsTable::reference();
        let eta = t.element("eta").unwrap();
        assert!(matches!(cofiber_pi(&t, &eta, 21), Err(TableError::OutOfRange { .. })));
    }
}
