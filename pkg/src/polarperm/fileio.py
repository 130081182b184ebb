"""Readers and writers for the on-disk formats.

code file (JSON)        {"n": 256, "k": 128, "frozen": [0, 1, ...]}   frozen ascending
permutation file (JSON) [[0, 1, 2], [0, 2, 1], ...]                  one layer permutation per entry
LLR file (text)         whitespace-separated decimal reals, n values
sequence file (text)    one index per line, least reliable first
orbit file (JSON)       {"fixed_layers": [...], "orbit_exact": bool,
                         "groups": [{"members": [...], "value": p, "weight": w}, ...]}
manifest (JSON)         written next to every CLI output as <output>.manifest.json
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .core import InvalidInputError, LayerPermutation, PolarCode
from .perm import PermutationSet


def write_code(path, code: PolarCode, **extra) -> None:
    doc = {"n": code.n, "k": code.k, "frozen": sorted(code.frozen)}
    doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from exc


def read_code(path) -> PolarCode:
    doc = _load_json(path)
    try:
        n, k, frozen = int(doc["n"]), int(doc["k"]), [int(i) for i in doc["frozen"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"{path}: malformed code file ({exc})") from exc
    if len(set(frozen)) != len(frozen):
        raise InvalidInputError(f"{path}: duplicate frozen indices")
    return PolarCode(n=n, k=k, frozen=frozenset(frozen))


def write_perms(path, pset: PermutationSet) -> None:
    lines = ",\n".join(" " + json.dumps(list(p.map)) for p in pset.perms)
    Path(path).write_text("[\n" + lines + "\n]\n")


def read_perms(path) -> PermutationSet:
    doc = _load_json(path)
    if isinstance(doc, dict):
        doc = doc.get("perms")
    if not isinstance(doc, list):
        raise InvalidInputError(f"{path}: expected a list of layer permutations")
    return PermutationSet(tuple(LayerPermutation(tuple(int(v) for v in p)) for p in doc))


def read_llrs(path) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in Path(path).read_text().split()])
    except ValueError as exc:
        raise InvalidInputError(f"{path}: not a list of reals ({exc})") from exc


def write_llrs(path, llrs) -> None:
    Path(path).write_text(" ".join(repr(float(v)) for v in llrs) + "\n")


def write_orbits(path, split, profile, orbit_exact: bool, k_prime: int | None = None) -> None:
    groups = sorted(split.groups, key=lambda g: (-max(profile.log_p[i] for i in g), min(g)))
    doc = {
        "fixed_layers": sorted(split.fixed_layers),
        "orbit_exact": orbit_exact,
        "groups": [
            {"members": sorted(g), "value": float(max(profile.p_hat[i] for i in g)), "weight": len(g)}
            for g in groups
        ],
    }
    if k_prime is not None:
        doc["relaxed_from_k"] = k_prime
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def manifest_path(output) -> Path:
    return Path(str(output) + ".manifest.json")


def write_manifest(output, command: str, params: dict, seed=None, inputs=(), outputs=(), argv=None) -> Path:
    doc = {
        "argv": list(argv) if argv is not None else None,
        "command": command,
        "params": params,
        "seed": seed,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "version": __version__,
    }
    path = manifest_path(output)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return path


def read_manifest(path) -> dict:
    doc = _load_json(path)
    if not isinstance(doc, dict) or not isinstance(doc.get("argv"), list):
        raise InvalidInputError(f"{path}: manifest has no argv record")
    return doc
