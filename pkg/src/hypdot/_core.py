"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set HYPDOT_PURE=1 to force the Python kernels.
"""

import os

BACKEND = "python"

if os.environ.get("HYPDOT_PURE", "") not in ("", "0"):
    from ._kernels_py import (  # noqa: F401
        bessel_backward,
        cf_function,
        hill_determinant,
        legendre_backward,
        minimal_solution,
    )
else:
    try:
        from ._kernels import (  # noqa: F401
            bessel_backward,
            cf_function,
            hill_determinant,
            legendre_backward,
            minimal_solution,
        )

        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import (  # noqa: F401
            bessel_backward,
            cf_function,
            hill_determinant,
            legendre_backward,
            minimal_solution,
        )
