//! Direction sets in R^n and the combinatorics of lacunary dissections.

mod certificate;
mod direction;
mod partition;
mod sequence;
mod shadow;

pub use certificate::{
    verify_dominating, verify_lacunary_certificate, CertificateChild, LacunaryCertificate, Verdict, Violation, Witness,
};
pub use direction::{format_rational, parse_rational, Direction, DirectionSet, Mode};
pub use partition::{
    cells, octant_split, partition, segment_index, sigma_pairs, Basis, Dissection, Part, Segment, SegmentIndex,
    SigmaPair, SignPattern,
};
pub use sequence::{LacunarySequence, Scalar, SequenceRule};
pub use shadow::{plane_coordinates, shadow};
