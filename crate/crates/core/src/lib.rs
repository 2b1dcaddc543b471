//! Tomographic description of quantum states on finite-dimensional,
//! truncated-Fock and grid-discretized Hilbert spaces.
//!
//! The core objects are rank-one projector families ("tomographic sets"),
//! the probability tables they induce ("tomograms"), and the dual kernels
//! that invert a tomogram back to the operator it came from. Three concrete
//! schemes are provided on top of the finite machinery: spin tomography over
//! sphere directions, photon-number tomography over displaced Fock states,
//! and symplectic tomography over rotated-and-scaled quadratures.

pub mod error;
pub mod fock;
pub mod io;
pub mod operator;
pub mod report;
pub mod sets;
pub mod special;
pub mod spin;
pub mod symplectic;

pub use error::{Result, TomoError};
pub use fock::{
    displacement_matrix, kernel_position_element, photon_kernel, photon_reconstruct,
    photon_tomogram, photon_tomogram_grid, t_operator, Displacement, FockSpace,
    PhotonReconstruction, PhotonTomogram, PolarGrid,
};
pub use operator::{
    bloch_coordinates, hermitian_basis_decompose, hs_inner, mat_to_vec, projector_from_vector,
    random_density_matrix, vec_to_mat, BlochPoint, GeneratorBasis, OperatorMatrix,
    RankOneProjector,
};
pub use report::{RunReport, RunStatus};
pub use sets::{
    gram_schmidt, identity_check, is_minimal_tomographic_set, povm_check, random_minimal_set,
    reconstruct, select_minimal_subset, set_from_unitary_family, skew_pair_check, tomogram,
    GramKernel, MinimalityReport, SkewReport, Tomogram, TomographicSet,
};
pub use special::{
    gauss_legendre, laguerre_assoc, uniform_periodic, wigner_3j, wigner_d_matrix,
    wigner_d_matrix_element, wigner_small_d, HalfInteger, QuadratureRule,
};
pub use spin::{
    dual_identity_check, spin_half_family, spin_half_kernel, spin_half_projector,
    spin_half_reconstruct, spin_half_reconstruct_fn, spin_j_kernel, spin_j_reconstruct,
    spin_j_tomogram, spin_j_tomogram_at, SphereDirection, SphereNode, SphereQuadrature,
    SpinReconstruction, SpinTomogramGrid,
};
pub use symplectic::{
    default_grids, delta_identity_probe, difference_lattice, even_subspace_rank_probe,
    gaussian_ground_tomogram, pauli_counterexample, squeeze_commutant_check, squeeze_operator,
    squeeze_parameters, symplectic_eigenfunction, symplectic_reconstruct, symplectic_tomogram_psi,
    trapezoid_rule, GridSpec, GridWavefunction, PauliReport, ProbeGrids, SqueezeCommutantReport,
    SymplecticReconstruction, SymplecticTomogram,
};
