//! Fixed irreducible polynomials, one per field, so every build uses the
//! same field representation.

/// `F2_MODULI[m - 1]` holds the low coefficients (bit j = coefficient of x^j)
/// of a monic irreducible polynomial of degree m over F_2, m = 1..=63.
pub(crate) const F2_MODULI: [u64; 63] = [
    0x0, 0x3, 0x3, 0x3, 0x5, 0x3,
    0x3, 0x1b, 0x3, 0x9, 0x5, 0x9,
    0x1b, 0x21, 0x3, 0x2b, 0x9, 0x9,
    0x27, 0x9, 0x5, 0x3, 0x21, 0x1b,
    0x9, 0x1b, 0x27, 0x3, 0x5, 0x3,
    0x9, 0x8d, 0x4b, 0x1b, 0x5, 0x35,
    0x53, 0x63, 0x11, 0x39, 0x9, 0x27,
    0x59, 0x21, 0x1b, 0x3, 0x21, 0x2d,
    0x71, 0x1d, 0x4b, 0x9, 0x47, 0x149,
    0x47, 0x95, 0x11, 0x63, 0x95, 0x3,
    0x27, 0x69, 0x3,
];

/// Per odd prime p, per degree m = 1, 2, ...: the nonzero low coefficients
/// `(power, coefficient)` of a monic irreducible polynomial of degree m over F_p.
pub(crate) const ODD_MODULI: &[(u64, &[&[(usize, u64)]])] = &[
    (3, &[&[], &[(0, 1)], &[(0, 1), (1, 2)], &[(0, 2), (1, 1)], &[(0, 1), (1, 2)], &[(0, 2), (1, 1)], &[(0, 2), (2, 1)], &[(0, 2), (2, 1)], &[(0, 2), (4, 1)], &[(0, 1), (2, 2)], &[(0, 2), (2, 1)], &[(0, 2), (2, 1)], &[(0, 1), (1, 2)], &[(0, 2), (1, 1)], &[(0, 2), (2, 1)], &[(0, 2), (4, 1)], &[(0, 1), (1, 2)], &[(0, 2), (7, 1)], &[(0, 2), (2, 1)], &[(0, 2), (5, 1)], &[(0, 1), (5, 2)], &[(0, 1), (4, 2)], &[(0, 1), (3, 2)], &[(0, 2), (4, 1)], &[(0, 1), (3, 2)], &[(0, 1), (2, 2)], &[(0, 1), (7, 2)], &[(0, 2), (2, 1)], &[(0, 2), (4, 1)], &[(0, 2), (1, 1)], &[(0, 1), (5, 2)], &[(0, 2), (5, 1)]]),
    (5, &[&[], &[(0, 2)], &[(0, 1), (1, 1)], &[(0, 2)], &[(0, 1), (1, 4)], &[(0, 2), (1, 1)], &[(0, 1), (1, 1)], &[(0, 2)], &[(0, 4), (4, 1)], &[(0, 2), (2, 4)], &[(0, 1), (1, 2)], &[(0, 4), (1, 1)], &[(0, 1), (6, 1)], &[(0, 2), (2, 3)], &[(0, 2), (2, 1)], &[(0, 2)], &[(0, 1), (3, 1)], &[(0, 1), (1, 1)], &[(0, 1), (9, 1)], &[(0, 2), (4, 4)], &[(0, 1), (1, 4)], &[(0, 1), (1, 1)], &[(0, 1), (2, 1)], &[(0, 2), (4, 1)], &[(0, 1), (7, 2)], &[(0, 3), (12, 2)], &[(0, 1), (1, 1)]]),
    (7, &[&[], &[(0, 1)], &[(0, 2)], &[(0, 1), (1, 1)], &[(0, 3), (1, 1)], &[(0, 2)], &[(0, 1), (1, 6)], &[(0, 3), (1, 1)], &[(0, 2)], &[(0, 3), (1, 2)], &[(0, 3), (1, 1)], &[(0, 2), (3, 1)], &[(0, 3), (2, 1)], &[(0, 4), (1, 1)], &[(0, 3), (3, 1)], &[(0, 3), (1, 2)], &[(0, 3), (1, 1)], &[(0, 2)], &[(0, 6), (2, 1)], &[(0, 3), (2, 2)], &[(0, 2), (3, 6)], &[(0, 4), (2, 1)]]),
    (11, &[&[], &[(0, 1)], &[(0, 4), (1, 1)], &[(0, 2), (1, 1)], &[(0, 2)], &[(0, 2), (1, 1)], &[(0, 4), (1, 1)], &[(0, 4), (1, 1)], &[(0, 5), (1, 1)], &[(0, 3)], &[(0, 1), (1, 10)], &[(0, 7), (1, 1)], &[(0, 4), (1, 2)], &[(0, 4), (2, 1)], &[(0, 1), (1, 2)], &[(0, 2), (4, 1)], &[(0, 4), (1, 1)], &[(0, 4), (1, 1)]]),
    (13, &[&[], &[(0, 2)], &[(0, 2)], &[(0, 2)], &[(0, 2), (1, 4)], &[(0, 2)], &[(0, 2), (1, 3)], &[(0, 2)], &[(0, 2)], &[(0, 2), (2, 4)], &[(0, 5), (1, 1)], &[(0, 2)], &[(0, 1), (1, 12)], &[(0, 2), (1, 1)], &[(0, 6), (1, 1)], &[(0, 2)], &[(0, 6), (3, 1)]]),
];
