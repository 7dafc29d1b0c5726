"""Session service orchestrating skein computations and relation checks."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

from .coeff import HSeries
from .config.models import CacheConfig, CertificateConfig, Settings, TruncationPolicy
from .exceptions import NotEmbeddable, SurfaceMismatch
from .filtration import Wedge3, tau_extract
from .lie import L_of_curve, bch, exp_sigma, working_precision
from .skein import (
    SkeinAlgebra,
    SkeinElement,
    bracket,
    epsilon,
    evaluate_to_disk,
    mul,
    register_algebra,
    sigma_action,
)
from .storage import ProductCache
from .surface.curves import Multicurve, dehn_twist
from .surface.model import LIBRARY_SPECS, Surface, library_surface
from .torelli import LIBRARY_CURVES, RELATIONS, CurveBook, Report, make_generator, relation_ids, verify_relation


class SkeinSession:
    """High-level orchestration of the skein workflow for one surface."""

    def __init__(
        self,
        settings: Settings,
        surface: Optional[Surface] = None,
        curves: Optional[Mapping[str, Multicurve]] = None,
    ) -> None:
        self._settings = settings
        self._policy = settings.truncation_policy()
        self._store = self._open_store(settings.cache)
        self._algebras: Dict[Surface, SkeinAlgebra] = {}
        self.surface = surface
        self._defined: Dict[str, Multicurve] = dict(curves or {})
        self._curves = CurveBook(surface, self._defined) if surface is not None else None

    @staticmethod
    def _open_store(cache: CacheConfig) -> Optional[ProductCache]:
        if not cache.enabled or not cache.directory:
            return None
        return ProductCache(Path(cache.directory).expanduser())

    def startup(self) -> None:
        if self.surface is not None:
            self.algebra(self.surface)

    # ------------------------------------------------------------------
    # Configuration helpers

    @property
    def policy(self) -> TruncationPolicy:
        return self._policy

    @property
    def certificates(self) -> CertificateConfig:
        return self._settings.certificates

    @property
    def store(self) -> Optional[ProductCache]:
        return self._store

    @property
    def prec(self) -> int:
        return working_precision(self._policy)

    def algebra(self, surface: Surface) -> SkeinAlgebra:
        if surface not in self._algebras:
            self._algebras[surface] = register_algebra(
                SkeinAlgebra(
                    surface,
                    self.prec,
                    memory_entries=self._settings.cache.memory_entries,
                    store=self._store,
                )
            )
        return self._algebras[surface]

    def _require_surface(self) -> Surface:
        if self.surface is None:
            raise SurfaceMismatch("no surface is defined for this session")
        return self.surface

    # ------------------------------------------------------------------
    # Curves and elements

    def curve(self, name: str) -> Multicurve:
        self._require_surface()
        assert self._curves is not None
        try:
            return self._curves[name]
        except KeyError as exc:
            raise NotEmbeddable(f"no curve named {name!r} on {self.surface.name}") from exc  # type: ignore[union-attr]

    def define(self, name: str, curve: Multicurve) -> None:
        """Bind ``name`` for expressions and as a relation data override."""

        surface = self._require_surface()
        if curve.surface != surface:
            raise SurfaceMismatch(f"curve {name!r} lives on {curve.surface.name}, not {surface.name}")
        self._defined[name] = curve
        self._curves = CurveBook(surface, self._defined)

    def curve_names(self) -> List[str]:
        return list(self._curves) if self._curves is not None else []

    def element(self, curve: Multicurve) -> SkeinElement:
        self.algebra(curve.surface)
        return SkeinElement.of(curve, self.prec)

    def empty(self) -> SkeinElement:
        return SkeinElement.unit(self._require_surface(), self.prec)

    def scalar(self, value: Fraction) -> SkeinElement:
        return SkeinElement.scalar(self._require_surface(), value, self.prec)

    def log(self, curve: Multicurve) -> SkeinElement:
        self.algebra(curve.surface)
        return L_of_curve(curve, self._policy)

    def twist(self, c: Multicurve, d: Multicurve, power: int = 1) -> Multicurve:
        return dehn_twist(c, d, power)

    # ------------------------------------------------------------------
    # Operations

    def mul(self, x: SkeinElement, y: SkeinElement) -> SkeinElement:
        return mul(x, y)

    def bracket(self, x: SkeinElement, y: SkeinElement) -> SkeinElement:
        return bracket(x, y)

    def sigma(self, x: SkeinElement, z: SkeinElement) -> SkeinElement:
        return sigma_action(x, z)

    def bch(self, args: Sequence[SkeinElement]) -> SkeinElement:
        return bch(args, self._policy, self.certificates)

    def exp_sigma(self, x: SkeinElement, z: SkeinElement) -> SkeinElement:
        return exp_sigma(x, z, self._policy, self.certificates)

    def zeta(self, kind: str, curves: Sequence[Multicurve]) -> SkeinElement:
        return make_generator(kind, curves, self._policy, self.certificates).zeta_value

    def eps(self, x: SkeinElement) -> Fraction:
        return epsilon(x)

    def disk(self, x: SkeinElement) -> HSeries:
        return evaluate_to_disk(x)

    def tau(self, x: SkeinElement) -> Wedge3:
        return tau_extract(x, self.certificates)

    # ------------------------------------------------------------------
    # Verification

    def verify(self, relation_id: str, surface: Optional[str] = None) -> Report:
        if surface is None and self.surface is not None:
            self.algebra(self.surface)
            return verify_relation(
                relation_id, self._defined, self._policy, surface=self.surface, config=self.certificates
            )
        spec = RELATIONS.get(relation_id)
        if surface is None and spec is not None:
            surface = spec.surfaces[0]
        if surface is not None and surface in LIBRARY_SPECS:
            self.algebra(library_surface(surface))
        return verify_relation(relation_id, None, self._policy, surface=surface, config=self.certificates)

    def verify_many(self, ids: Sequence[str], jobs: int = 1) -> List[Dict[str, object]]:
        """Run library relations, in worker processes when ``jobs > 1``; order follows ``ids``."""

        if jobs <= 1 or len(ids) <= 1:
            return [self.verify(rid).to_json() for rid in ids]
        payload = self._settings.model_dump()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_verify_job, [(rid, payload) for rid in ids]))

    # ------------------------------------------------------------------
    # Catalogue and cache

    @staticmethod
    def surfaces() -> List[Dict[str, object]]:
        listing = []
        for name in sorted(LIBRARY_SPECS):
            entry = library_surface(name).describe()
            entry["curves"] = sorted(LIBRARY_CURVES.get(name, {}))
            listing.append(entry)
        return listing

    @staticmethod
    def relations() -> List[str]:
        return relation_ids()

    def cache_summary(self) -> Dict[str, object]:
        if self._store is None:
            return {"directory": None, "records": 0, "bytes": 0}
        return self._store.summary()

    def cache_clear(self) -> int:
        return self._store.clear() if self._store is not None else 0


def _verify_job(job: tuple) -> Dict[str, object]:
    relation_id, payload = job
    session = SkeinSession(Settings(**payload))
    return session.verify(relation_id).to_json()
