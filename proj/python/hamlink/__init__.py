"""Self-correcting frame protocol: SEC-DED codec, bit-exact frames, lossy
channel, stop-and-wait engine and the closed-form cost model."""

try:
    from ._hamlink import *  # noqa: F401,F403
    from ._hamlink import __version__  # noqa: F401
except ImportError:  # development tree: extension built out of place
    from _hamlink import *  # noqa: F401,F403
    from _hamlink import __version__  # noqa: F401
