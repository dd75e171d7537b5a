"""
Version information for nekscale.

Release builds overwrite these values; source checkouts report a local
development version.
"""

__version__ = "0.1.0.dev0+local"
__version_info__ = (0, 1, 0, "dev0", "local")

# Build metadata
__environment__ = "local"
__build_number__ = "0"
__branch__ = "local"
