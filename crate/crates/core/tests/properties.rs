mod common;

use common::props;
use proptest::prelude::*;

fn run(check: props::Check) -> Result<(), TestCaseError> {
    check.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_identities(seed in any::<u64>()) {
        run(props::field_identities(seed))?;
    }

    #[test]
    fn hnf_canonical(seed in any::<u64>()) {
        run(props::hnf_canonical(seed))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_sum_transversal_invariance(seed in any::<u64>()) {
        run(props::gauss_transversal(seed))?;
    }

    #[test]
    fn gamma_reduction_bound(seed in any::<u64>()) {
        run(props::gamma_monotone(seed))?;
    }

    #[test]
    fn exponential_sum_triangle_inequality(seed in any::<u64>()) {
        run(props::expsum_triangle(seed))?;
    }
}
