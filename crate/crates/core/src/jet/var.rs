use std::fmt;

/// Largest number of independent variables a single field may depend on.
pub const MAX_DEPS: usize = 8;

/// Index of an independent variable inside a [`Catalog`](super::Catalog).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u16);

/// Index of a field (or constant, or algebraic generator) inside a catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldId(pub u16);

/// A field together with a multi-index of derivative orders.
///
/// The multi-index is stored relative to the field's own dependency list,
/// so `orders[k]` counts derivatives with respect to the `k`-th variable the
/// field depends on. Order zero everywhere is the undifferentiated field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub field: FieldId,
    pub orders: [u8; MAX_DEPS],
}

impl JetVar {
    pub fn base(field: FieldId) -> Self {
        JetVar {
            field,
            orders: [0; MAX_DEPS],
        }
    }

    pub fn with_orders(field: FieldId, orders: &[u8]) -> Self {
        let mut jv = JetVar::base(field);
        jv.orders[..orders.len()].copy_from_slice(orders);
        jv
    }

    pub fn total_order(&self) -> u32 {
        self.orders.iter().map(|&o| o as u32).sum()
    }

    pub fn is_base(&self) -> bool {
        self.orders.iter().all(|&o| o == 0)
    }

    /// Derivative by the `slot`-th dependency of the field.
    pub fn bumped(&self, slot: usize) -> Self {
        let mut jv = *self;
        jv.orders[slot] += 1;
        jv
    }

    /// True when `self` is a (possibly trivial) derivative of `other`.
    pub fn is_derivative_of(&self, other: &JetVar) -> bool {
        self.field == other.field
            && self
                .orders
                .iter()
                .zip(other.orders.iter())
                .all(|(a, b)| a >= b)
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J{}{:?}", self.field.0, &self.orders[..])
    }
}
