"""Seeded synthetic mixed tables with a block (group) correlation structure.

Every group has one latent Gaussian factor. A variable's latent value is
sqrt(rho) * factor + sqrt(1 - rho) * noise; numeric variables are affine
transforms of it and categorical ones cut it at rank thresholds, so the
correlation ratio of a categorical variable with its group factor grows
monotonically with rho.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError
from .preprocess import CATEGORICAL, NUMERIC, MixedTable


@dataclass(frozen=True)
class VariableSpec:
    name: str
    kind: str
    levels: int = 0


@dataclass(frozen=True)
class GroupSpec:
    name: str
    variables: tuple[VariableSpec, ...]

    @classmethod
    def from_counts(cls, name, n_numeric=0, n_categorical=0, levels=2):
        if isinstance(levels, int):
            levels = [levels] * n_categorical
        if len(levels) != n_categorical:
            raise SchemaError(f"group {name}: {len(levels)} level counts for {n_categorical} variables")
        vs = [VariableSpec(f"{name}_num{i + 1}", NUMERIC) for i in range(n_numeric)]
        vs += [
            VariableSpec(f"{name}_cat{i + 1}", CATEGORICAL, int(lv))
            for i, lv in enumerate(levels)
        ]
        return cls(name, tuple(vs))


@dataclass(frozen=True)
class SynthSpec:
    n: int
    groups: tuple[GroupSpec, ...]
    strength: float = 0.6
    seed: int = 0

    @property
    def variables(self):
        return [v for g in self.groups for v in g.variables]

    def validate(self):
        if not 0.0 <= self.strength < 1.0:
            raise SchemaError(f"strength must be in [0, 1), got {self.strength}")
        if not self.groups or not self.variables:
            raise SchemaError("spec has no variables")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise SchemaError("variable names must be unique")
        n_levels = 0
        n_num = 0
        for v in self.variables:
            if v.kind == CATEGORICAL:
                if v.levels < 2:
                    raise SchemaError(f"variable {v.name} needs at least 2 levels")
                if v.levels > self.n:
                    raise SchemaError(f"variable {v.name} has more levels than rows")
                n_levels += v.levels
            elif v.kind == NUMERIC:
                n_num += 1
            else:
                raise SchemaError(f"unknown kind {v.kind!r} for {v.name}")
        need = max(10, n_levels + n_num + 2)
        if self.n < need:
            raise SchemaError(f"n={self.n} is too small for this layout, need at least {need}")

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        groups = []
        for g in d["groups"]:
            if "variables" in g:
                vs = []
                for v in g["variables"]:
                    kind = {"num": NUMERIC, "cat": CATEGORICAL}.get(v["kind"], v["kind"])
                    vs.append(VariableSpec(v["name"], kind, int(v.get("levels", 0))))
                groups.append(GroupSpec(g["name"], tuple(vs)))
            else:
                groups.append(
                    GroupSpec.from_counts(
                        g["name"],
                        int(g.get("numeric", 0)),
                        int(g.get("categorical", 0)),
                        g.get("levels", 2),
                    )
                )
        return cls(
            n=int(d["n"]),
            groups=tuple(groups),
            strength=float(d.get("strength", 0.6)),
            seed=int(d.get("seed", 0)),
        )

    @classmethod
    def from_json(cls, path) -> "SynthSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _num(name):
    return VariableSpec(name, NUMERIC)


def _cat(name, levels):
    return VariableSpec(name, CATEGORICAL, levels)


def default_spec(n: int = 542, strength: float = 0.6, seed: int = 0) -> SynthSpec:
    """Four groups of 9/5/9/4 variables; 11 of the 27 variables categorical."""
    employment = GroupSpec(
        "employment",
        tuple(
            _num(v)
            for v in (
                "farmers", "tradesmen", "managers", "workers", "unemployed",
                "middleemp", "retired", "employrate", "income",
            )
        ),
    )
    housing = GroupSpec(
        "housing",
        (_num("density"), _num("primaryres"), _cat("houses", 2), _num("owners"), _cat("council", 2)),
    )
    services = GroupSpec(
        "services",
        tuple(
            _cat(v, 3)
            for v in (
                "butcher", "baker", "postoffice", "dentist", "grocery",
                "nursery", "doctor", "chemist", "restaurant",
            )
        ),
    )
    environment = GroupSpec(
        "environment", tuple(_num(v) for v in ("building", "water", "vegetation", "agricul"))
    )
    return SynthSpec(n, (employment, housing, services, environment), strength, seed)


def _level_counts(rng, n: int, n_levels: int) -> np.ndarray:
    probs = rng.dirichlet(np.full(n_levels, 3.0))
    counts = np.ones(n_levels, dtype=int)
    extra = probs * (n - n_levels)
    base = np.floor(extra).astype(int)
    counts += base
    rest = n - counts.sum()
    # largest remainder, ties by level index
    order = np.argsort(-(extra - base), kind="stable")
    counts[order[:rest]] += 1
    return counts


def generate(spec: SynthSpec | None = None) -> tuple[MixedTable, dict]:
    """Return ``(table, group_map)``; deterministic for a given spec."""
    spec = default_spec() if spec is None else spec
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    rho = spec.strength
    columns, kinds, group_map = {}, {}, {}
    for group in spec.groups:
        factor = rng.standard_normal(n)
        for v in group.variables:
            latent = np.sqrt(rho) * factor + np.sqrt(1.0 - rho) * rng.standard_normal(n)
            if v.kind == NUMERIC:
                loc = rng.uniform(0.0, 100.0)
                scale = rng.uniform(1.0, 10.0)
                columns[v.name] = np.round(loc + scale * latent, 6)
            else:
                counts = _level_counts(rng, n, v.levels)
                codes = np.repeat(np.arange(v.levels), counts)
                labels = np.empty(n, dtype=object)
                labels[np.argsort(latent, kind="stable")] = [f"{v.name}_{c + 1}" for c in codes]
                columns[v.name] = labels
            kinds[v.name] = v.kind
            group_map[v.name] = group.name
    row_ids = [f"obs{i + 1}" for i in range(n)]
    return MixedTable(columns, kinds=kinds, row_ids=row_ids), group_map
