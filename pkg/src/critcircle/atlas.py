"""Tongue atlases: building, lookup and line-delimited JSON persistence.

An atlas file starts with a header record followed by one record per
tongue, sorted by rational::

    {"format_version": 1, "family": "sine-l", "l": 3, "tol": 1e-13,
     "generator": {...}, "count": 5, "fingerprint": "..."}
    {"num": 0, "den": 1, "t_lo": 0.0, "t_hi": 0.15915494309189535, "center": 0.0}
    ...

Floats are written with ``repr``, the shortest decimal string that reads
back to the same double (at most 17 significant digits).
"""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import (
    CorruptAtlasError,
    MissingCenterError,
    ResolutionError,
    VersionMismatchError,
)
from .family import CriticalFamily
from .farey import (
    UNIT,
    FareyDomain,
    as_rational,
    farey_sequence,
    harmonic_endpoint,
    harmonic_refine,
)
from .rotation import CENTER_TOL, Tongue, tongue

FORMAT_VERSION = 1
JOBS_ENV = "CRITCIRCLE_JOBS"


def default_jobs() -> int:
    """Worker count from the ``CRITCIRCLE_JOBS`` environment variable (default 1)."""
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        jobs = int(raw)
    except ValueError:
        raise ValueError(f"{JOBS_ENV}={raw!r} is not an integer") from None
    return max(1, jobs)


def _record(t: Tongue) -> dict:
    return {
        "num": t.rho.numerator,
        "den": t.rho.denominator,
        "t_lo": t.t_lo,
        "t_hi": t.t_hi,
        "center": t.center,
    }


def _record_line(t: Tongue) -> str:
    return json.dumps(_record(t), separators=(",", ":"))


def _validate(tongues: tuple[Tongue, ...]) -> None:
    for t in tongues:
        if not t.t_lo <= t.center <= t.t_hi:
            raise CorruptAtlasError(f"tongue {t.rho}: center outside its interval")
    for a, b in zip(tongues, tongues[1:]):
        if not a.rho < b.rho:
            raise CorruptAtlasError(f"tongues out of order or repeated at {a.rho}, {b.rho}")
        if a.t_hi > b.t_lo:
            raise CorruptAtlasError(f"tongues {a.rho} and {b.rho} overlap")


@dataclass(frozen=True)
class TongueAtlas:
    """Sorted, disjoint tongues of one family at one tolerance."""

    family: str
    l: int
    tol: float
    generator: dict
    tongues: tuple[Tongue, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tongues = tuple(sorted(self.tongues, key=lambda t: t.rho))
        object.__setattr__(self, "tongues", tongues)
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "tol", float(self.tol))
        _validate(tongues)
        object.__setattr__(self, "_index", {t.rho: t for t in tongues})

    # -- lookup -------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.tongues)

    def __iter__(self) -> Iterator[Tongue]:
        return iter(self.tongues)

    def __contains__(self, r) -> bool:
        return Fraction(r) in self._index

    def get(self, r) -> Tongue:
        r = Fraction(r)
        try:
            return self._index[r]
        except KeyError:
            raise MissingCenterError(f"atlas has no tongue for {r}") from None

    def center(self, r) -> float:
        return self.get(r).center

    @property
    def rationals(self) -> list[Fraction]:
        return [t.rho for t in self.tongues]

    @property
    def family_spec(self) -> tuple[str, int]:
        return self.family, self.l

    def header(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "family": self.family,
            "l": self.l,
            "tol": self.tol,
            "generator": self.generator,
            "count": len(self.tongues),
        }

    @property
    def fingerprint(self) -> str:
        """SHA-256 over the header parameters and every tongue record."""
        h = hashlib.sha256()
        h.update(json.dumps(self.header(), sort_keys=True, separators=(",", ":")).encode())
        for t in self.tongues:
            h.update(b"\n")
            h.update(_record_line(t).encode())
        return h.hexdigest()

    def describe(self) -> dict:
        """Parameters plus fingerprint, for embedding in reports."""
        return {**self.header(), "fingerprint": self.fingerprint}

    def family_object(self) -> CriticalFamily:
        return CriticalFamily.from_spec(self.family, self.l)


# -- building ---------------------------------------------------------------
def depth_rationals(depth: int, cutoff: int, base: FareyDomain = UNIT) -> set[Fraction]:
    """Every endpoint of the cells D(n_1, ..., n_r), r <= depth, |n_i| <= cutoff."""
    if depth < 0 or cutoff < 0:
        raise ValueError("depth and cutoff must be >= 0")
    out = {base.lo, base.hi}
    level = [base]
    for _ in range(depth):
        nxt = []
        for d in level:
            for n in range(-cutoff, cutoff + 2):
                out.add(harmonic_endpoint(d, n))
            nxt.extend(harmonic_refine(d, n) for n in range(-cutoff, cutoff + 1))
        level = nxt
    return out


def _build_chunk(l: int, rationals: list[Fraction], tol: float) -> list[Tongue]:
    fam = CriticalFamily(l)
    centers: dict = {}
    out = []
    for r in rationals:
        try:
            out.append(tongue(fam, r, tol, centers))
        except ResolutionError as exc:
            raise ResolutionError(f"{r}: {exc}") from exc
    return out


def _chunks(items: list, n: int) -> list[list]:
    size = -(-len(items) // n)
    return [items[i:i + size] for i in range(0, len(items), size)]


def build_atlas(fam: CriticalFamily, q_max: Optional[int] = None, *,
                depth: Optional[int] = None, cutoff: Optional[int] = None,
                domain: FareyDomain = UNIT, rationals: Iterable = (),
                tol: float = CENTER_TOL, jobs: Optional[int] = None) -> TongueAtlas:
    """Compute the tongues of a family.

    The rational set is the union of the Farey sequence of order ``q_max``,
    the endpoints needed by a depth/cutoff request over ``domain`` and any
    explicit ``rationals``. The result does not depend on ``jobs``.

    Raises
    ------
    ResolutionError
        Propagated from the tongue computation, prefixed with the rational.
    """
    if not isinstance(fam, CriticalFamily):
        raise TypeError("atlases are built for CriticalFamily instances")
    extra = sorted({as_rational(r) for r in rationals})
    wanted: set[Fraction] = set(extra)
    generator: dict = {}
    if q_max is not None:
        if q_max < 1:
            raise ValueError("q_max must be >= 1")
        wanted.update(farey_sequence(int(q_max)))
        generator["q_max"] = int(q_max)
    if depth is not None or cutoff is not None:
        if depth is None or cutoff is None:
            raise ValueError("depth and cutoff must be given together")
        wanted.update(depth_rationals(int(depth), int(cutoff), domain))
        generator.update(depth=int(depth), cutoff=int(cutoff), domain=str(domain))
    if extra:
        generator["extra"] = [f"{r.numerator}/{r.denominator}" for r in extra]
    if not wanted:
        raise ValueError("nothing to build: give q_max, depth/cutoff or rationals")
    todo = sorted(wanted)
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    if jobs == 1 or len(todo) < 2 * jobs:
        tongues = _build_chunk(fam.critical_exponent, todo, tol)
    else:
        parts = _chunks(todo, 4 * jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_build_chunk, [fam.critical_exponent] * len(parts), parts,
                               [tol] * len(parts))
            tongues = [t for part in results for t in part]
    return TongueAtlas(fam.name, fam.critical_exponent, tol, generator, tuple(tongues))


def extend_atlas(atlas: TongueAtlas, rationals: Iterable, jobs: Optional[int] = None) -> TongueAtlas:
    """A new atlas with the tongues of ``rationals`` added."""
    fam = atlas.family_object()
    new = sorted({as_rational(r) for r in rationals} - set(atlas.rationals))
    if not new:
        return atlas
    extra = build_atlas(fam, rationals=new, tol=atlas.tol, jobs=jobs).tongues
    gen = dict(atlas.generator)
    gen["extra"] = sorted(set(gen.get("extra", [])) | {f"{r.numerator}/{r.denominator}" for r in new},
                          key=Fraction)
    return TongueAtlas(atlas.family, atlas.l, atlas.tol, gen, atlas.tongues + tuple(extra))


def rigid_rotation_atlas(q_max: int) -> TongueAtlas:
    """Degenerate atlas of the rigid rotation x + t: every tongue is the point t = p/q."""
    tongues = tuple(Tongue(r, float(r), float(r), float(r), 0.0) for r in farey_sequence(q_max))
    return TongueAtlas("rigid", 1, 0.0, {"q_max": int(q_max)}, tongues)


def flipped_atlas(atlas: TongueAtlas) -> TongueAtlas:
    """Atlas of the orientation flip: rho -> 1 - rho, t -> 1 - t."""
    tongues = tuple(Tongue(1 - t.rho, 1.0 - t.t_hi, 1.0 - t.t_lo, 1.0 - t.center, t.tol)
                    for t in atlas)
    gen = {**atlas.generator, "flipped": True}
    return TongueAtlas(atlas.family, atlas.l, atlas.tol, gen, tongues)


# -- persistence --------------------------------------------------------------
def dumps_atlas(atlas: TongueAtlas) -> str:
    head = atlas.describe()
    lines = [json.dumps(head, separators=(",", ":"))]
    lines.extend(_record_line(t) for t in atlas.tongues)
    return "\n".join(lines) + "\n"


def save_atlas(atlas: TongueAtlas, path) -> Path:
    path = Path(path)
    path.write_text(dumps_atlas(atlas), encoding="utf-8")
    return path


def _parse_tongue(rec: dict, tol: float) -> Tongue:
    r = Fraction(int(rec["num"]), int(rec["den"]))
    if r.numerator != rec["num"] or r.denominator != rec["den"]:
        raise CorruptAtlasError(f"record {rec} is not in lowest terms")
    return Tongue(as_rational(r), float(rec["t_lo"]), float(rec["t_hi"]), float(rec["center"]), tol)


def loads_atlas(text: str) -> TongueAtlas:
    lines = text.splitlines()
    if not lines:
        raise CorruptAtlasError("empty atlas file")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptAtlasError(f"unreadable header: {exc}") from None
    if not isinstance(head, dict) or "format_version" not in head:
        raise CorruptAtlasError("header record lacks format_version")
    if head["format_version"] != FORMAT_VERSION:
        raise VersionMismatchError(
            f"atlas format {head['format_version']!r}; this library reads {FORMAT_VERSION}"
        )
    try:
        tol = float(head["tol"])
        records = [json.loads(line) for line in lines[1:] if line.strip()]
        tongues = tuple(_parse_tongue(rec, tol) for rec in records)
        count, fingerprint = int(head["count"]), head["fingerprint"]
        atlas = TongueAtlas(head["family"], int(head["l"]), tol, head["generator"], tongues)
    except CorruptAtlasError:
        raise
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise CorruptAtlasError(f"malformed atlas: {exc}") from None
    if len(tongues) != count:
        raise CorruptAtlasError(f"header announces {count} tongues, file has {len(tongues)}")
    if atlas.fingerprint != fingerprint:
        raise CorruptAtlasError("fingerprint mismatch")
    return atlas


def load_atlas(path) -> TongueAtlas:
    """Read and validate an atlas file.

    Raises
    ------
    CorruptAtlasError
        On malformed records, broken invariants or a fingerprint mismatch.
    VersionMismatchError
        If the header declares an unknown format version.
    """
    return loads_atlas(Path(path).read_text(encoding="utf-8"))


def centers_array(atlas: TongueAtlas, rationals: Iterable) -> np.ndarray:
    return np.array([atlas.center(r) for r in rationals])
