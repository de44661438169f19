"""Everything derived from one RunConfig: normalized measure, rescaled grid, both fields."""
from __future__ import annotations

import warnings
from functools import cached_property

import numpy as np

from .basespace import Grid
from .config import RunConfig
from .extfock import ExtSpace
from .fockrep import AField, FockSpace
from .jacobifield import JacobiField
from .measure import JumpMeasure, moments, normalize
from .orthopoly import JacobiMatrix, TruncationWarning, jacobi_matrix


class Instance:
    def __init__(self, config: RunConfig):
        self.config = config
        nt = config.nu_tilde
        if "family" in nt:
            raw = JumpMeasure(family=nt["family"])
        else:
            raw = JumpMeasure.from_atoms(nt["atoms"])
        self.nu_tilde, self.c = normalize(raw)
        # nu -> nu/c is compensated by sigma -> c sigma
        self.grid = Grid(np.asarray(config.grid, dtype=float)).scaled(float(self.c))
        self.letters = [np.asarray(f, dtype=float) for f in config.test_functions]
        tr = config.truncation
        self.N, self.M, self.K = tr.max_degree, tr.ell2_dim, tr.word_length

    @cached_property
    def J(self) -> JacobiMatrix:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            return jacobi_matrix(self.nu_tilde, self.M)

    @cached_property
    def nu_moments(self) -> list:
        return moments(self.nu_tilde, max(2 * self.K, 2 * self.N, 4))

    @cached_property
    def ext_space(self) -> ExtSpace:
        return ExtSpace(self.grid, self.J, self.N)

    @cached_property
    def jfield(self) -> JacobiField:
        return JacobiField(self.ext_space)

    @cached_property
    def fock_space(self) -> FockSpace:
        return FockSpace(self.grid, self.J.size, self.N)

    @cached_property
    def afield(self) -> AField:
        return AField(self.fock_space, self.J)

    def fields_for(self, N: int) -> tuple[JacobiField, AField]:
        """Fields on a smaller truncation degree (cheaper intertwiner builds)."""
        if N == self.N:
            return self.jfield, self.afield
        return JacobiField(ExtSpace(self.grid, self.J, N)), AField(FockSpace(self.grid, self.J.size, N), self.J)
