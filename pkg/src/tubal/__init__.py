"""Slice-wise tensor algebra and exact tensor completion under third-mode transforms.

Submodules:

* ``tubal.tensor``     dense order-3 complex tensors, t-product algebra, t-SVD, norms
* ``tubal.transforms`` third-mode linear transforms and their diagnostics
* ``tubal.solver``     singular value thresholding and the ADMM completion loop
* ``tubal.generators`` random tensors of prescribed transform-domain tubal rank, masks
* ``tubal.analysis``   subspace projectors, incoherence, sampling bound, phase grids, metrics
* ``tubal.io``         bit-exact binary containers for tensors, masks, matrices
* ``tubal.cli``        the ``tubal`` command-line tool

Imports are lazy so the command-line entry can configure threading
environment variables before numpy loads.
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = ("tensor", "transforms", "solver", "generators", "analysis",
               "io", "cli", "errors")

_EXPORTS = {
    "Tensor3": "tensor",
    "TSvdFactors": "tensor",
    "t_product": "tensor",
    "t_transpose": "tensor",
    "t_conj_transpose": "tensor",
    "identity_tensor": "tensor",
    "is_unitary": "tensor",
    "t_svd": "tensor",
    "tubal_rank": "tensor",
    "spectral_norm": "tensor",
    "nuclear_norm": "tensor",
    "fro_norm": "tensor",
    "inf_norm": "tensor",
    "inf2_norm": "tensor",
    "inner_product": "tensor",
    "mode3_product": "tensor",
    "LinearTransform": "transforms",
    "dft_transform": "transforms",
    "dct_transform": "transforms",
    "dwht_transform": "transforms",
    "slim_columns": "transforms",
    "concat_transforms": "transforms",
    "random_unitary": "transforms",
    "random_conditioned": "transforms",
    "pseudo_inverse": "transforms",
    "SamplingMask": "solver",
    "SolverConfig": "solver",
    "SolverReport": "solver",
    "svt": "solver",
    "mask_project": "solver",
    "admm_complete": "solver",
    "GeneratorConfig": "generators",
    "GeneratorError": "generators",
    "truncated_t_svd_project": "generators",
    "gen_single": "generators",
    "gen_double": "generators",
    "bernoulli_mask": "generators",
    "IncoherenceReport": "analysis",
    "MetricsReport": "analysis",
    "PhaseCell": "analysis",
    "project_S": "analysis",
    "project_S_perp": "analysis",
    "projected_basis_bound_check": "analysis",
    "incoherence": "analysis",
    "sampling_bound": "analysis",
    "phase_experiment": "analysis",
    "psnr": "analysis",
    "ssim": "analysis",
    "mpsnr": "analysis",
    "mssim": "analysis",
    "rel_error": "analysis",
    "metrics_report": "analysis",
    "read_tensor": "io",
    "write_tensor": "io",
    "read_mask": "io",
    "write_mask": "io",
    "read_matrix": "io",
    "write_matrix": "io",
}

__all__ = sorted(set(_EXPORTS) | set(_SUBMODULES) | {"__version__"})


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    if name in _EXPORTS:
        module = importlib.import_module(f".{_EXPORTS[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return __all__
