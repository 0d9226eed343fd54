"""Symplectic normal forms of quadratic Hamiltonians and circuit quantization."""

import json

from ._symq import (
    NormalForm,
    SymqError,
    Tolerance,
    blackbox_netlist,
    canonical_j,
    check_psd,
    classify_dof,
    expm,
    format_netlist,
    landau_xy,
    landau_xy_rescaled,
    landau_z,
    lcc_netlist,
    linear_invariants,
    normal_form,
    quadratic_invariant_basis,
    run_cli,
)
from . import _symq

__all__ = [
    "NormalForm",
    "SymqError",
    "Tolerance",
    "blackbox_netlist",
    "canonical_j",
    "check_psd",
    "classify_dof",
    "expm",
    "format_netlist",
    "hamiltonian",
    "landau_xy",
    "landau_xy_rescaled",
    "landau_z",
    "lcc_netlist",
    "linear_invariants",
    "normal_form",
    "quadratic_invariant_basis",
    "quantize",
    "run_cli",
]


def hamiltonian(netlist, charge_shift=True, rescale=True, tol=None):
    """Hamiltonian of a netlist as a dict (the CLI's JSON layout)."""
    return json.loads(_symq.hamiltonian_json(netlist, charge_shift, rescale, tol or Tolerance()))


def quantize(netlist, mode="both", transmon_override=False, symplectic_w=False, cross_tolerance=1e-6, tol=None):
    """Two-tier and/or black-box models of a netlist as a dict."""
    return json.loads(
        _symq.quantize_json(netlist, mode, transmon_override, symplectic_w, cross_tolerance, tol or Tolerance())
    )
