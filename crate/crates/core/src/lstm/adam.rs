//! Adam with bias correction, plus global-norm gradient clipping.
//!
//! Parameters and gradients share one container type per model; the container
//! exposes its flat buffers in a fixed order, which is what makes the update
//! generic and the reduction order deterministic.

use crate::error::{Error, Result};

use super::train::TrainConfig;

/// A parameter container that can hand out its underlying buffers in a fixed,
/// stable order. Gradient and moment containers reuse the parameter type, so
/// shapes always match structurally.
pub trait ParamBuffers {
    fn buffers(&self) -> Vec<&[f64]>;
    fn buffers_mut(&mut self) -> Vec<&mut [f64]>;
}

/// Returns a same-shaped container with every entry zeroed.
pub fn zeroed_like<P: ParamBuffers + Clone>(like: &P) -> P {
    let mut z = like.clone();
    for buf in z.buffers_mut() {
        buf.fill(0.0);
    }
    z
}

/// First/second-moment accumulators shaped like the parameters, plus the
/// step counter.
#[derive(Debug, Clone)]
pub struct AdamState<P> {
    pub m: P,
    pub v: P,
    pub t: u64,
}

impl<P: ParamBuffers + Clone> AdamState<P> {
    pub fn new(params: &P) -> Self {
        AdamState {
            m: zeroed_like(params),
            v: zeroed_like(params),
            t: 0,
        }
    }
}

fn check_same_shape(a: &[&[f64]], b: &[&[f64]], what: &str) -> Result<()> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len()) {
        return Err(Error::shape(
            what,
            format!("{} buffers", a.len()),
            format!("{} buffers", b.len()),
        ));
    }
    Ok(())
}

/// One bias-corrected Adam step:
/// `m = b1*m + (1-b1)*g`, `v = b2*v + (1-b2)*g^2`,
/// `w -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)`.
pub fn adam_step<P: ParamBuffers>(
    params: &mut P,
    grads: &P,
    state: &mut AdamState<P>,
    cfg: &TrainConfig,
) -> Result<()> {
    check_same_shape(&params.buffers(), &grads.buffers(), "adam params vs grads")?;
    check_same_shape(&params.buffers(), &state.m.buffers(), "adam params vs moments")?;
    state.t += 1;
    let bc1 = 1.0 - cfg.beta1.powi(state.t as i32);
    let bc2 = 1.0 - cfg.beta2.powi(state.t as i32);
    let gb = grads.buffers();
    let mut pb = params.buffers_mut();
    let mut mb = state.m.buffers_mut();
    let mut vb = state.v.buffers_mut();
    for i in 0..gb.len() {
        let (p, g, m, v) = (&mut pb[i], gb[i], &mut mb[i], &mut vb[i]);
        for k in 0..g.len() {
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            p[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_epsilon);
        }
    }
    Ok(())
}

/// Scales all gradients so their global L2 norm is at most `max_norm`.
/// Returns the pre-clip norm.
pub fn clip_global_norm<P: ParamBuffers>(grads: &mut P, max_norm: f64) -> f64 {
    let mut sq = 0.0;
    for buf in grads.buffers() {
        for v in buf {
            sq += v * v;
        }
    }
    let norm = sq.sqrt();
    if norm > max_norm && norm > 0.0 {
        let scale = max_norm / norm;
        for buf in grads.buffers_mut() {
            for v in buf.iter_mut() {
                *v *= scale;
            }
        }
    }
    norm
}

/// `acc += other`, buffer by buffer. Used for the ordered batch reduction.
pub fn add_assign<P: ParamBuffers>(acc: &mut P, other: &P) {
    let ob = other.buffers();
    let mut ab = acc.buffers_mut();
    debug_assert_eq!(ab.len(), ob.len());
    for i in 0..ob.len() {
        crate::linalg::axpy(1.0, ob[i], ab[i]);
    }
}
