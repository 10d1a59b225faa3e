//! Penalty functions and their exact univariate minimizers.

/// `sgn(z) (|z| − t)₊`.
#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// SCAD penalty of `|t|` with threshold `lambda` and shape `a > 2`.
pub fn scad_penalty(t: f64, lambda: f64, a: f64) -> f64 {
    let t = t.abs();
    if t <= lambda {
        lambda * t
    } else if t <= a * lambda {
        (2.0 * a * lambda * t - t * t - lambda * lambda) / (2.0 * (a - 1.0))
    } else {
        lambda * lambda * (a + 1.0) / 2.0
    }
}

/// MCP penalty of `|t|` with threshold `lambda` and concavity `gamma > 1`.
pub fn mcp_penalty(t: f64, lambda: f64, gamma: f64) -> f64 {
    let t = t.abs();
    if t <= gamma * lambda {
        lambda * t - t * t / (2.0 * gamma)
    } else {
        gamma * lambda * lambda / 2.0
    }
}

/// One piece `c0 + c1 τ + c2 τ²` of a penalty on `τ = |t| ∈ [lo, hi]`.
#[derive(Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    c0: f64,
    c1: f64,
    c2: f64,
}

/// Global minimizer of `½ v (t − z)² + P(|t|)` for piecewise-quadratic `P`.
///
/// The minimizer shares the sign of `z`, so only `τ ≥ 0` is searched. Each
/// piece contributes its endpoints and, when strictly convex there, its
/// clipped stationary point. Exact ties go to the smaller `τ`.
fn piecewise_argmin(v: f64, z: f64, pieces: &[Piece]) -> f64 {
    let za = z.abs();
    let value = |tau: f64, p: &Piece| 0.5 * v * (tau - za) * (tau - za) + p.c0 + p.c1 * tau + p.c2 * tau * tau;
    let mut best_tau = 0.0;
    let mut best = value(0.0, &pieces[0]);
    let mut consider = |tau: f64, p: &Piece| {
        let f = value(tau, p);
        if f < best || (f == best && tau < best_tau) {
            best = f;
            best_tau = tau;
        }
    };
    for p in pieces {
        if p.hi < p.lo {
            continue;
        }
        consider(p.lo, p);
        if p.hi.is_finite() {
            consider(p.hi, p);
        }
        let curv = v + 2.0 * p.c2;
        if curv > 0.0 {
            let tau = ((v * za - p.c1) / curv).clamp(p.lo, p.hi);
            consider(tau, p);
        }
    }
    best_tau.copysign(z)
}

/// Minimizer of `½ v (t − z)² + scad(|t|)`.
pub fn scad_argmin(v: f64, z: f64, lambda: f64, a: f64) -> f64 {
    let pieces = [
        Piece { lo: 0.0, hi: lambda, c0: 0.0, c1: lambda, c2: 0.0 },
        Piece {
            lo: lambda,
            hi: a * lambda,
            c0: -lambda * lambda / (2.0 * (a - 1.0)),
            c1: a * lambda / (a - 1.0),
            c2: -1.0 / (2.0 * (a - 1.0)),
        },
        Piece {
            lo: a * lambda,
            hi: f64::INFINITY,
            c0: lambda * lambda * (a + 1.0) / 2.0,
            c1: 0.0,
            c2: 0.0,
        },
    ];
    piecewise_argmin(v, z, &pieces)
}

/// Minimizer of `½ v (t − z)² + mcp(|t|)`.
pub fn mcp_argmin(v: f64, z: f64, lambda: f64, gamma: f64) -> f64 {
    let pieces = [
        Piece {
            lo: 0.0,
            hi: gamma * lambda,
            c0: 0.0,
            c1: lambda,
            c2: -1.0 / (2.0 * gamma),
        },
        Piece {
            lo: gamma * lambda,
            hi: f64::INFINITY,
            c0: gamma * lambda * lambda / 2.0,
            c1: 0.0,
            c2: 0.0,
        },
    ];
    piecewise_argmin(v, z, &pieces)
}
