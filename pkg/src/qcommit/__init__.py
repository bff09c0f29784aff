"""Exact desk-scale simulation of hash-based quantum bit commitments.

Modules: ``qla`` (finite-dimensional quantum linear algebra), ``hashfam``
(k-wise independent hash families), ``efi`` (sparse image distributions and
the protocol states), ``commit`` (the commitment engine), ``attacks`` (the
no-go adversaries), ``zk`` (Hamiltonicity protocol) and ``cli``.
"""
__version__ = "0.1.0"
