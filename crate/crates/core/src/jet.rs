//! Formal jet variables: states, their spatial derivatives, and auxiliary
//! variables with theirs.

/// A single symbolic variable in the jet space.
///
/// `Base { state, order }` stands for the `order`-th spatial derivative of
/// the state with index `state`; `Aux { id, order }` for the `order`-th
/// spatial derivative of the auxiliary variable with index `id`.
///
/// The derived `Ord` sorts every base variable before every auxiliary one,
/// and within a kind by index, then derivative order. All monomial
/// comparisons in the crate bottom out in this variable order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum JetVar {
    /// Spatial jet of a state variable.
    Base {
        /// 0-based index of the state in its system.
        state: u32,
        /// Number of spatial derivatives applied.
        order: u32,
    },
    /// Spatial jet of an auxiliary variable.
    Aux {
        /// 0-based index of the auxiliary variable in its system.
        id: u32,
        /// Number of spatial derivatives applied.
        order: u32,
    },
}

impl JetVar {
    /// Base variable `state` differentiated `order` times.
    pub fn base(state: u32, order: u32) -> Self {
        JetVar::Base { state, order }
    }

    /// Auxiliary variable `id` differentiated `order` times.
    pub fn aux(id: u32, order: u32) -> Self {
        JetVar::Aux { id, order }
    }

    /// Derivative order carried by this symbol.
    pub fn order(self) -> u32 {
        match self {
            JetVar::Base { order, .. } | JetVar::Aux { order, .. } => order,
        }
    }

    /// The same symbol differentiated once more in space.
    pub fn diff(self) -> Self {
        match self {
            JetVar::Base { state, order } => JetVar::Base { state, order: order + 1 },
            JetVar::Aux { id, order } => JetVar::Aux { id, order: order + 1 },
        }
    }

    /// The same symbol with its derivative order replaced.
    pub fn with_order(self, order: u32) -> Self {
        match self {
            JetVar::Base { state, .. } => JetVar::Base { state, order },
            JetVar::Aux { id, .. } => JetVar::Aux { id, order },
        }
    }

    /// True for `Base` symbols.
    pub fn is_base(self) -> bool {
        matches!(self, JetVar::Base { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_sorts_before_aux() {
        assert!(JetVar::base(5, 9) < JetVar::aux(0, 0));
    }

    #[test]
    fn within_kind_by_index_then_order() {
        assert!(JetVar::base(0, 3) < JetVar::base(1, 0));
        assert!(JetVar::base(0, 1) < JetVar::base(0, 2));
        assert!(JetVar::aux(2, 0) < JetVar::aux(2, 1));
        assert!(JetVar::aux(1, 7) < JetVar::aux(2, 0));
    }

    #[test]
    fn diff_bumps_order() {
        assert_eq!(JetVar::base(0, 0).diff(), JetVar::base(0, 1));
        assert_eq!(JetVar::aux(3, 1).diff(), JetVar::aux(3, 2));
    }
}
