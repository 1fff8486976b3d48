"""
Numerical tolerance profiles for the quantum graph toolkit.

Every identity check in the library (Schur idempotence, adjoint symmetry,
projection certificates, Choi positivity) compares a residual norm against
a threshold taken from the active profile. Profiles are selected with the
QGRAPH_PROFILE environment variable; QGRAPH_TOL overrides the absolute
identity tolerance of whichever profile is active.

The ToleranceConfig class gives the library and the command line script a
single place to read these values, with a fallback to the default profile
for unknown names.
"""

# config/tolerances.py
import os
from typing import Dict


class ToleranceConfig:
    """Manage numerical tolerances per profile"""

    PROFILES = {
        'default': {
            'tol': 1e-9,               # absolute, on spectral norms
            'pd_rtol': 1e-10,          # min eigenvalue / max eigenvalue
            'rank_rtol': 1e-9,         # Choi support, Kraus, null spaces
            'gap_rtol': 1e-7,          # relative to spectral diameter
            'positivity_rtol': 1e-8,
            'bipartite_rtol': 1e-8,
            'certificate_tol': 1e-8
        },
        'strict': {
            'tol': 1e-11,
            'pd_rtol': 1e-12,
            'rank_rtol': 1e-11,
            'gap_rtol': 1e-8,
            'positivity_rtol': 1e-9,
            'bipartite_rtol': 1e-10,
            'certificate_tol': 1e-10
        },
        'loose': {
            'tol': 1e-7,
            'pd_rtol': 1e-8,
            'rank_rtol': 1e-7,
            'gap_rtol': 1e-6,
            'positivity_rtol': 1e-6,
            'bipartite_rtol': 1e-6,
            'certificate_tol': 1e-6
        }
    }

    @classmethod
    def get_config(cls, profile: str = None) -> Dict:
        """
        Get tolerances for a specific profile.

        Args:
            profile (str, optional): Profile name. Defaults to None.
                If None, uses QGRAPH_PROFILE environment variable or 'default'.

        Returns:
            Dict: Copy of the tolerance dictionary for the profile, with
                'tol' replaced by QGRAPH_TOL when that variable is set.
                Falls back to 'default' if the profile is not found.
        """
        profile = profile or os.getenv('QGRAPH_PROFILE', 'default')
        config = dict(cls.PROFILES.get(profile, cls.PROFILES['default']))
        if override := os.getenv('QGRAPH_TOL'):
            config['tol'] = float(override)
        return config

    @classmethod
    def resolve(cls, key: str, value: float = None) -> float:
        """Return value if given, else the active profile's entry for key."""
        return cls.get_config()[key] if value is None else value
