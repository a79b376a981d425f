//! Process tensors: analytic constructors, forward application, probe
//! synthesis and the Choi test for complete positivity.

mod analytic;
mod hypergeometric;
mod tensor;

pub use analytic::{analytic_tensor, ProcessParams};
pub use hypergeometric::hyp2f1_terminating;
pub use tensor::{ProcessTensor, TWO_MODE_CAP};
