//! Exact symbolic engine for the dg Witt Lie algebra in two complex
//! dimensions: the Jouanolou model, vector fields and differential
//! operators with Jouanolou coefficients, Chevalley–Eilenberg chains and
//! weight-graded Lie homology, cyclic chains and universal Chern cocycles,
//! the Weyl/Moyal calculus, and the one-loop residue trace.

pub mod cechain;
pub mod cyclic;
pub mod diffweyl;
pub mod exactalg;
pub mod grr;
pub mod jouanolou;
pub mod report;
pub mod sample;
pub mod wittlie;
