//! chi(z) = ((z/2) / sinh(z/2))^2 and the functions built from it.
//!
//! Every closed form here is a ratio that degenerates to 0/0 at the origin and
//! loses digits well before it gets there, so inside `SERIES_RADIUS` the
//! Taylor expansions are used instead. The series are carried far enough that
//! truncation at the switch point sits below 1e-17.

/// |z| below which the power series replace the closed forms.
pub const SERIES_RADIUS: f64 = 0.5;

// Even coefficients of chi: z^0, z^2, ..., z^20.
const CHI_EVEN: [f64; 11] = [
    1.0,
    -1.0 / 12.0,
    1.0 / 240.0,
    -1.0 / 6048.0,
    1.0 / 172800.0,
    -1.0 / 5322240.0,
    691.0 / 118879488000.0,
    -1.0 / 5748019200.0,
    3617.0 / 711374856192000.0,
    -43867.0 / 300534953951232000.0,
    174611.0 / 42255666457804800000.0,
];

// Even coefficients of chi'': z^0, z^2, ..., z^18.
const CHI_DD_EVEN: [f64; 10] = [
    -1.0 / 6.0,
    1.0 / 20.0,
    -5.0 / 1008.0,
    7.0 / 21600.0,
    -1.0 / 59136.0,
    7601.0 / 9906624000.0,
    -13.0 / 410572800.0,
    3617.0 / 2964061900800.0,
    -745739.0 / 16696386330624000.0,
    3317609.0 / 2112783322890240000.0,
];

// Coefficients of xi = e^z chi'': z^0 .. z^20.
const XI: [f64; 21] = [
    -1.0 / 6.0,
    -1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 45.0,
    11.0 / 840.0,
    1.0 / 504.0,
    -23.0 / 75600.0,
    -1.0 / 8400.0,
    1.0 / 266112.0,
    313.0 / 59875200.0,
    727.0 / 6054048000.0,
    -313.0 / 1556755200.0,
    -7919.0 / 653837184000.0,
    1559.0 / 217945728000.0,
    2867.0 / 4446092851200.0,
    -80537.0 / 333456963840000.0,
    -6635971.0 / 236532139683840000.0,
    5571847.0 / 709596419051520000.0,
    9074833.0 / 8264711233658880000.0,
    -893611.0 / 3602566435184640000.0,
    -370991641.0 / 9232863121030348800000.0,
];

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn chi(z: f64) -> f64 {
    let x = z.abs();
    if x < SERIES_RADIUS {
        return horner(&CHI_EVEN, x * x);
    }
    let t = (-x).exp();
    let d = -(-x).exp_m1();
    x * x * t / (d * d)
}

pub fn chi_dd(z: f64) -> f64 {
    let x = z.abs();
    if x < SERIES_RADIUS {
        return horner(&CHI_DD_EVEN, x * x);
    }
    let t = (-x).exp();
    let d = -(-x).exp_m1();
    let s = 1.0 + t;
    t * (2.0 / (d * d) - 4.0 * x * s / (d * d * d)
        + x * x * (3.0 * s * s - d * d) / (2.0 * d * d * d * d))
}

pub fn xi(z: f64) -> f64 {
    if z.abs() < SERIES_RADIUS {
        return horner(&XI, z);
    }
    z.exp() * chi_dd(z)
}

/// Q(z) = (xi(z) - xi(0)) / z, continued to Q(0) = xi'(0) = -1/6.
pub fn q_func(z: f64) -> f64 {
    if z.abs() < SERIES_RADIUS {
        return horner(&XI[1..], z);
    }
    (xi(z) - XI[0]) / z
}
