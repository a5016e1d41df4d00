use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::PermGroup;
use crate::limits;
use crate::Result;

/// Isomorphism invariants used to tell groups apart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupFingerprint {
    #[serde(with = "biguint_string")]
    pub order: BigUint,
    pub abelian: bool,
    /// Element order → number of elements, when the closure was enumerated.
    pub element_order_histogram: Option<BTreeMap<u64, u64>>,
    /// Length of the derived series, `None` if not computed or not solvable.
    pub derived_length: Option<u32>,
    /// True when the order exceeded the closure limit and only the order is reliable.
    pub order_only: bool,
}

impl PermGroup {
    /// Order, abelian flag, element-order histogram and derived length.
    pub fn fingerprint(&self) -> Result<GroupFingerprint> {
        let order = self.order()?;
        let abelian = self.is_abelian();
        let bound = limits::max_closure() as u64;
        let small = order.to_u64().is_some_and(|o| o <= bound);
        if !small {
            return Ok(GroupFingerprint {
                order,
                abelian,
                element_order_histogram: None,
                derived_length: None,
                order_only: true,
            });
        }
        let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
        self.for_each_element(&mut |g| *hist.entry(g.order()).or_default() += 1)?;
        Ok(GroupFingerprint {
            order,
            abelian,
            element_order_histogram: Some(hist),
            derived_length: self.derived_length()?,
            order_only: false,
        })
    }

    /// Number of steps of the derived series to reach the trivial group; `None` if not solvable.
    pub fn derived_length(&self) -> Result<Option<u32>> {
        let mut current = self.clone();
        let mut len = 0;
        loop {
            let order = current.order()?;
            if order == BigUint::from(1u32) {
                return Ok(Some(len));
            }
            let next = current.derived_subgroup()?;
            if next.order()? == order {
                return Ok(None);
            }
            current = next;
            len += 1;
        }
    }
}

mod biguint_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match num_traits::ToPrimitive::to_u64(n) {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&n.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(BigUint::from(v)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
