"""Numerics for the biquaternionic Vekua equation on ball and box domains.

Subpackages: biquat (the algebra), grid (discretization and differential
operators), potentials (volume and boundary integral operators), bergman
(orthonormal solution families, reproducing kernels, projection),
decomposition (transpose/adjoint maps, annihilator pairings, worked
factorization examples), io (snapshot and basis persistence), cli.
"""

from .biquat import Biquaternion, E0, E1, E2, E3

__version__ = "0.1.0"

__all__ = ["Biquaternion", "E0", "E1", "E2", "E3", "__version__"]
