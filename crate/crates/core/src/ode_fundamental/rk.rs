//! Dormand–Prince 5(4) pair for two-dimensional systems.

pub(crate) type State = [f64; 2];

pub(crate) const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

pub(crate) const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order weights (equal to the last row of `A`, so the pair is FSAL).
pub(crate) const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

pub(crate) const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub(crate) struct StepResult {
    pub y: State,
    pub err: State,
    /// Derivative at the new point; reused as the next step's first stage.
    pub k_last: State,
}

/// One step from `(x, y)` with size `h`, given `k1 = f(x, y)`.
pub(crate) fn step<E>(
    f: &mut impl FnMut(f64, &State) -> Result<State, E>,
    x: f64,
    y: &State,
    h: f64,
    k1: State,
) -> Result<StepResult, E> {
    let mut k = [[0.0; 2]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                ys[0] += h * a * kj[0];
                ys[1] += h * a * kj[1];
            }
        }
        k[s] = f(x + C[s] * h, &ys)?;
    }
    let mut y_new = *y;
    let mut err = [0.0; 2];
    for (s, ks) in k.iter().enumerate() {
        for i in 0..2 {
            y_new[i] += h * B5[s] * ks[i];
            err[i] += h * (B5[s] - B4[s]) * ks[i];
        }
    }
    Ok(StepResult {
        y: y_new,
        err,
        k_last: k[6],
    })
}
