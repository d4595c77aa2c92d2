"""
This package reconstructs faces as a hybrid of a grid signed distance field
and explicit eyeball spheres from flash-lit captures, and exports and relights
the result.
"""

import importlib

from .version import __version__

# List of sub-packages to import
sub_packages = [
    "hybrid_inverse_render.appearance",
    "hybrid_inverse_render.data",
    "hybrid_inverse_render.export",
    "hybrid_inverse_render.geometry",
    "hybrid_inverse_render.pipeline",
    "hybrid_inverse_render.relight",
    "hybrid_inverse_render.rendering",
    "hybrid_inverse_render.training",
    "hybrid_inverse_render.utils",
]

# Dynamically import sub-packages and update __all__
__all__ = ["__version__"]
for package in sub_packages:
    module = importlib.import_module(package)
    __all__.extend(module.__all__)
