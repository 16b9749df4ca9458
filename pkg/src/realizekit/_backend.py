"""Backend selection: compiled core when available, pure Python otherwise.

Set ``REALIZEKIT_PURE=1`` to force the pure backend.
"""

import os

from realizekit import _pure

if os.environ.get("REALIZEKIT_PURE"):
    impl = _pure
    COMPILED = False
else:
    try:
        from realizekit import _speed as impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        impl = _pure
        COMPILED = False

BACKEND_NAME = "compiled" if COMPILED else "pure"
