"""Kernel backends for the leapfrog solver.

``_kernels_c`` is the compiled Cython build of ``_kernels_c.pyx``;
``_kernels_py`` is the numpy reference with the same signatures.
"""
