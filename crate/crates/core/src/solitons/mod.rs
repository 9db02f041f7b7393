//! Soliton solutions dressed onto a diagonal background.

mod closed;
mod config;
mod crest;
mod dressing;
mod kinematics;

pub use closed::{one_soliton, two_soliton};
pub use config::{Soliton, SolitonConfig, SolitonFrame};
pub use crest::{
    analyze_interaction, crest_track, CrestPoint, CrestReport, CrestTrack, Interaction,
    SolitonPassage,
};
pub use dressing::{dressing_terms, n_soliton, DressingTerms};
pub use kinematics::{kinematics, Kinematics};
