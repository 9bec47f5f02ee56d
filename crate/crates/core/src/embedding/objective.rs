//! PV-DM negative-sampling objective for a single training example.
//!
//! The hidden layer is the mean of the document vector and the context word
//! vectors. The loss is
//!
//! ```text
//! L = -ln s(u_target . h) - sum_k ln s(-u_k . h)
//! ```
//!
//! where `s` is the logistic function and `u_*` are output-layer rows.

/// Logistic argument is clamped to this range before evaluation.
pub const SIGMOID_CLAMP: f64 = 6.0;

pub fn sigmoid(x: f64) -> f64 {
    let x = x.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    1.0 / (1.0 + (-x).exp())
}

/// `-ln s(x)`, computed without overflow.
fn neg_log_sigmoid(x: f64) -> f64 {
    if x > 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One (document, context, target, noise set) example with the noise draws
/// already fixed.
#[derive(Debug, Clone)]
pub struct PvdmExample<'a> {
    pub doc: &'a [f64],
    pub contexts: Vec<&'a [f64]>,
    pub target: &'a [f64],
    pub noise: Vec<&'a [f64]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PvdmGradient {
    pub doc: Vec<f64>,
    /// Same gradient for every context row; stored once.
    pub context: Vec<f64>,
    pub target: Vec<f64>,
    pub noise: Vec<Vec<f64>>,
}

impl PvdmExample<'_> {
    fn inputs(&self) -> usize {
        1 + self.contexts.len()
    }

    pub fn hidden(&self) -> Vec<f64> {
        let mut h = self.doc.to_vec();
        for c in &self.contexts {
            for (hi, ci) in h.iter_mut().zip(c.iter()) {
                *hi += ci;
            }
        }
        let n = self.inputs() as f64;
        h.iter_mut().for_each(|x| *x /= n);
        h
    }

    pub fn loss(&self) -> f64 {
        let h = self.hidden();
        neg_log_sigmoid(dot(self.target, &h))
            + self
                .noise
                .iter()
                .map(|u| neg_log_sigmoid(-dot(u, &h)))
                .sum::<f64>()
    }

    pub fn gradient(&self) -> PvdmGradient {
        let h = self.hidden();
        let dim = h.len();
        let mut grad_h = vec![0.0; dim];

        let err = sigmoid(dot(self.target, &h)) - 1.0;
        let target: Vec<f64> = h.iter().map(|x| err * x).collect();
        for (g, u) in grad_h.iter_mut().zip(self.target) {
            *g += err * u;
        }

        let noise = self
            .noise
            .iter()
            .map(|u| {
                let err = sigmoid(dot(u, &h));
                for (g, ui) in grad_h.iter_mut().zip(u.iter()) {
                    *g += err * ui;
                }
                h.iter().map(|x| err * x).collect()
            })
            .collect();

        let n = self.inputs() as f64;
        let input: Vec<f64> = grad_h.iter().map(|g| g / n).collect();
        PvdmGradient {
            doc: input.clone(),
            context: input,
            target,
            noise,
        }
    }
}
