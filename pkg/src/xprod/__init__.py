"""Workbench for crossed products of finite-dimensional C*-algebras.

Builds endomorphisms of C(X) from partial maps of a finite point set,
detects and constructs complete transfer operators, enumerates the
reversible extension of the dynamical system, realizes Cuntz-Krieger
coefficient algebras level by level, and does normal-form arithmetic in
the crossed product with a truncated regular representation as a
numerical oracle.
"""

from xprod.errors import ContractError, ResourceGuardError, ValidationError

__all__ = ["ValidationError", "ContractError", "ResourceGuardError"]

__version__ = "0.1.0"
