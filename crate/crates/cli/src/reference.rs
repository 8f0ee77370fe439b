//! Published values for the reproducible tables.

/// A row of the elliptic-curve tables: good / multiplicative / additive primes.
#[derive(Clone, Copy, Debug)]
pub struct EllipticRow {
    pub good: &'static [u64],
    pub mult: &'static [u64],
    pub add: &'static [u64],
    pub lambda: f64,
    pub b_r: f64,
    pub b_z: u64,
}

const fn e(
    good: &'static [u64],
    mult: &'static [u64],
    add: &'static [u64],
    lambda: f64,
    b_r: f64,
    b_z: u64,
) -> EllipticRow {
    EllipticRow {
        good,
        mult,
        add,
        lambda,
        b_r,
        b_z,
    }
}

/// Rank 0 elliptic curves over ℚ.
pub const TABLE1: [EllipticRow; 13] = [
    e(&[3], &[2], &[], 1.47, 12.956, 14),
    e(&[2], &[3], &[], 1.49, 10.823, 15),
    e(&[2, 3], &[5], &[], 1.31, 10.394, 35),
    e(&[2, 3], &[7], &[], 1.31, 10.394, 35),
    e(&[3], &[], &[2], 1.68, 17.293, 20),
    e(&[2], &[], &[3], 1.69, 11.552, 27),
    e(&[2, 3], &[], &[5], 1.31, 10.394, 25),
    e(&[], &[2, 3], &[], 1.80, 15.037, 30),
    e(&[3], &[2, 5], &[], 1.47, 12.956, 70),
    e(&[], &[2], &[3], 1.98, 17.444, 18),
    e(&[3], &[2], &[5], 1.47, 12.956, 50),
    e(&[], &[3], &[2], 1.99, 22.525, 24),
    e(&[3], &[5], &[2], 1.69, 17.302, 20),
];

/// Rank 1 elliptic curves over ℚ.
pub const TABLE2: [EllipticRow; 20] = [
    e(&[], &[], &[], 1.68, 34.566, 37),
    e(&[3], &[2], &[], 1.96, 51.571, 58),
    e(&[2, 5], &[3], &[], 1.99, 44.926, 51),
    e(&[2, 3], &[5], &[], 1.69, 34.588, 35),
    e(&[2, 3], &[7], &[], 1.68, 34.566, 35),
    e(&[3], &[], &[2], 2.15, 81.113, 88),
    e(&[2], &[], &[3], 2.15, 54.927, 63),
    e(&[2, 3], &[], &[5], 1.70, 34.598, 175),
    e(&[2, 3], &[], &[7], 1.68, 34.566, 49),
    e(&[], &[2, 3], &[], 2.30, 79.323, 102),
    e(&[3], &[2, 5], &[], 2.24, 55.34, 70),
    e(&[2], &[3, 5], &[], 2.27, 48.76, 75),
    e(&[], &[2], &[3], 2.47, 104.971, 126),
    e(&[3], &[2], &[5], 2.39, 58.434, 350),
    e(&[], &[3], &[2], 2.49, 137.242, 156),
    e(&[2], &[3], &[5], 2.45, 51.797, 75),
    e(&[3], &[5], &[2], 2.48, 95.06, 140),
    e(&[2], &[5], &[3], 2.53, 64.737, 135),
    e(&[2, 3], &[5], &[7], 1.69, 34.588, 245),
    e(&[], &[], &[2, 3], 2.65, 189.709, 216),
];

/// Abelian surface rows: types (g_ab, g_m, g_u) at 2 and at 3.
#[derive(Clone, Copy, Debug)]
pub struct AbelianRow {
    pub at2: [u32; 3],
    pub at3: [u32; 3],
    pub lambda: f64,
    pub b_r: f64,
}

const fn a(at2: [u32; 3], at3: [u32; 3], lambda: f64, b_r: f64) -> AbelianRow {
    AbelianRow {
        at2,
        at3,
        lambda,
        b_r,
    }
}

/// Abelian surfaces of rank 0 with bad reduction at 2 and 3.
pub const TABLE3: [AbelianRow; 6] = [
    a([0, 2, 0], [1, 1, 0], 1.62, 185.9),
    a([0, 2, 0], [1, 0, 1], 1.71, 202.4),
    a([0, 1, 1], [1, 1, 0], 1.73, 258.2),
    a([0, 1, 1], [1, 0, 1], 1.82, 289.8),
    a([0, 0, 2], [1, 1, 0], 1.83, 371.7),
    a([0, 0, 2], [1, 0, 1], 1.92, 428.9),
];

/// Abelian surfaces of rank 1 with bad reduction at 2 and 3.
pub const TABLE4: [AbelianRow; 6] = [
    a([0, 2, 0], [1, 1, 0], 1.87, 768.4),
    a([0, 2, 0], [1, 0, 1], 1.97, 899.3),
    a([0, 1, 1], [1, 1, 0], 1.98, 1160.8),
    a([0, 1, 1], [1, 0, 1], 2.06, 1398.3),
    a([0, 0, 2], [1, 1, 0], 2.07, 1810.0),
    a([0, 0, 2], [1, 0, 1], 2.15, 2232.4),
];

/// Rank 0, dimension g, with the weakest bad type (g−1, 1, 0) at 2 and at `other`;
/// `other = None` is the column without constraints.
#[derive(Clone, Copy, Debug)]
pub struct Table5Cell {
    pub dim: u32,
    pub other: Option<u64>,
    pub b_r: f64,
}

const fn c(dim: u32, other: Option<u64>, b_r: f64) -> Table5Cell {
    Table5Cell { dim, other, b_r }
}

pub const TABLE5: [Table5Cell; 12] = [
    c(2, None, 108.0),
    c(2, Some(3), 140.0),
    c(2, Some(5), 132.4),
    c(2, Some(7), 132.4),
    c(3, None, 1086.3),
    c(3, Some(3), 1426.1),
    c(3, Some(5), 1370.4),
    c(3, Some(7), 1370.4),
    c(4, None, 11168.2),
    c(4, Some(3), 14687.3),
    c(4, Some(5), 14205.7),
    c(4, Some(7), 14205.7),
];

/// Mestre's constant over ℚ as stated in the main theorem and in the later text.
pub const MESTRE_THEOREM: f64 = 10.323;
pub const MESTRE_TEXT: f64 = 10.35;

/// Optimizer example 1: surfaces of rank 1, (0,2,0) at 2 and (1,0,1) at 3, λ = 2.08.
pub const OPT_EXAMPLE1_COEFFS: [f64; 2] = [1.3780, -5.656];
/// Optimizer example 2 values: d = 1, d = 2 and Odlyzko's function.
pub const OPT_EXAMPLE2: [f64; 3] = [2221.7, 2225.6, 2232.4];
pub const OPT_EXAMPLE2_D1_COEFFS: [f64; 2] = [1.3846, -5.791];
