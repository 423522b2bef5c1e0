"""Exact verification engine for zeta-regularized free-boson operators.

The package builds the bosonic Fock space over exact rationals, the
quadratic (Virasoro-type) operators with zeta-regularized diagonal
modes, and free-boson vertex operators, then checks operator identities
coefficient by coefficient on finite windows with no floating point
anywhere.
"""

from __future__ import annotations

__version__ = "0.1.0"
