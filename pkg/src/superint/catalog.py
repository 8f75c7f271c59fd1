"""Machine-checked catalogue of one-dimensional algebraic pairs.

Each entry stores the solver's (H, K) pair together with the recipe that
verifies it.  Extra checks pin down published forms: literal operators and
conditions (some of which are expected to fail and document a misprint),
parametrisations by special functions, first integrals and Painlevé tests.

The catalogue file is JSON; ``SUPERINT_CATALOG`` overrides its location.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .detsys import PotentialSpec, SolvedPair, ladder_product
from .opalg import AlgebraRelation
from .painleve import painleve_verdict
from .symkernel import Expr, differentiate, from_json, substitute, sym_gen, to_json, to_text

CATALOG_ENV = "SUPERINT_CATALOG"
DEFAULT_PATH = Path(__file__).with_name("data") / "catalog.json"
FORMAT_VERSION = 1

MODES = ("symbolic-closed", "symbolic-mod-ODE", "numeric-jet")
_MECH_ORDER = {"quantum": 0, "classical": 1}


class VerificationFailed(RuntimeError):
    def __init__(self, report: "EntryReport"):
        super().__init__(f"{report.id}: verification failed")
        self.report = report


@dataclass
class Check:
    """One extra claim about an entry.

    ``kind``:
      relation        [H, K] = rhs for ``f``/``potential``/``relation`` in data
                      (missing fields default to the entry's own)
      first_integral  d/dx data["expr"] vanishes on the entry's potential
      condition       data["expr"] vanishes on the entry's potential after
                      ``bindings`` (names -> Expr) are applied
    Both accept ``define`` (function name -> Expr in V), e.g. U = V/hbar**2.
      painleve        painleve_verdict(data["expr"]) passes
    ``expect`` is whether the claim holds; literal forms with misprints are
    stored with ``expect = False`` and a note.
    """

    name: str
    kind: str
    data: dict
    expect: bool = True
    note: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "kind": self.kind, "data": self.data,
                "expect": self.expect, "note": self.note}

    @staticmethod
    def from_json(d: dict) -> "Check":
        return Check(d["name"], d["kind"], d["data"], d.get("expect", True), d.get("note", ""))


@dataclass
class CatalogEntry:
    id: str
    pair: SolvedPair
    mode: str
    ladder: list | None = None
    checks: list = field(default_factory=list)
    annotations: dict = field(default_factory=dict)

    @property
    def mechanics(self) -> str:
        return self.pair.mechanics

    @property
    def kind(self) -> str:
        return self.pair.relation.kind.letter

    @property
    def M(self) -> int:
        return self.pair.M

    @property
    def potential(self) -> PotentialSpec:
        return self.pair.potential

    def to_json(self) -> dict:
        return {"id": self.id, "mode": self.mode, "pair": self.pair.to_json(),
                "ladder": None if self.ladder is None else [to_json(c) for c in self.ladder],
                "checks": [c.to_json() for c in self.checks], "annotations": self.annotations}

    @staticmethod
    def from_json(d: dict) -> "CatalogEntry":
        ladder = d.get("ladder")
        return CatalogEntry(d["id"], SolvedPair.from_json(d["pair"]), d["mode"],
                            None if ladder is None else [from_json(c) for c in ladder],
                            [Check.from_json(c) for c in d.get("checks", [])], d.get("annotations", {}))


@dataclass
class FamilyEntry:
    """Named two-dimensional family and the composition that produces it."""

    id: str
    title: str
    template: Expr
    parameters: list
    construction: dict
    note: str = ""

    def to_json(self) -> dict:
        return {"id": self.id, "title": self.title, "template": to_json(self.template),
                "parameters": self.parameters, "construction": self.construction, "note": self.note}

    @staticmethod
    def from_json(d: dict) -> "FamilyEntry":
        return FamilyEntry(d["id"], d["title"], from_json(d["template"]), d["parameters"],
                           d["construction"], d.get("note", ""))


@dataclass
class Identification:
    """Two entries share a Hamiltonian after renaming parameters of ``b``."""

    a: str
    b: str
    rename: dict  # parameter name -> Expr json

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "rename": self.rename}


@dataclass
class Catalog:
    entries: dict
    families: dict
    identifications: list
    version: int = FORMAT_VERSION

    def to_json(self) -> dict:
        return {"version": self.version,
                "entries": [e.to_json() for e in self.entries.values()],
                "families": [f.to_json() for f in self.families.values()],
                "identifications": [i.to_json() for i in self.identifications]}

    @staticmethod
    def from_json(d: dict) -> "Catalog":
        if d.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported catalog version {d.get('version')}")
        entries = {e["id"]: CatalogEntry.from_json(e) for e in d["entries"]}
        families = {f["id"]: FamilyEntry.from_json(f) for f in d.get("families", [])}
        idents = [Identification(i["a"], i["b"], i["rename"]) for i in d.get("identifications", [])]
        return Catalog(entries, families, idents, d["version"])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1, sort_keys=False) + "\n")


def catalog_path() -> Path:
    return Path(os.environ.get(CATALOG_ENV) or DEFAULT_PATH)


@lru_cache(maxsize=4)
def _load(path: str) -> Catalog:
    return Catalog.from_json(json.loads(Path(path).read_text()))


def load_catalog(path: str | Path | None = None) -> Catalog:
    return _load(str(path or catalog_path()))


def get_entry(entry_id: str, catalog: Catalog | None = None) -> CatalogEntry:
    catalog = catalog or load_catalog()
    try:
        return catalog.entries[entry_id]
    except KeyError:
        raise KeyError(f"unknown catalog entry {entry_id!r}") from None


def _sort_key(e: CatalogEntry):
    return (_MECH_ORDER[e.mechanics], e.kind, e.M, e.id)


def list_entries(mechanics: str | None = None, kind: str | None = None, M: int | None = None,
                 catalog: Catalog | None = None) -> list:
    """Entries matching every given filter, in a fixed order."""
    catalog = catalog or load_catalog()
    out = [e for e in catalog.entries.values()
           if (mechanics is None or e.mechanics == mechanics)
           and (kind is None or e.kind == kind)
           and (M is None or e.M == M)]
    return sorted(out, key=_sort_key)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    expect: bool
    holds: bool
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.expect == self.holds


@dataclass
class EntryReport:
    id: str
    mode: str
    residual: list
    ladder_ok: bool | None
    checks: list

    @property
    def ok(self) -> bool:
        return not self.residual and self.ladder_ok is not False and all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        return {"id": self.id, "mode": self.mode, "ok": self.ok, "residual": self.residual,
                "ladder_ok": self.ladder_ok,
                "checks": [{"name": c.name, "expect": c.expect, "holds": c.holds, "ok": c.ok,
                            "detail": c.detail} for c in self.checks]}


def _nonzero(op) -> list:
    return [to_text(c) for c in op.terms.values() if not c.is_zero()]


def _bind(e: Expr, bindings: dict) -> Expr:
    return substitute(e, {sym_gen(k): from_json(v) for k, v in bindings.items()}) if bindings else e


def _on_potential(spec: PotentialSpec, e: Expr) -> Expr:
    """Reduce e on the potential, substituting closed forms first."""
    if spec.variant == "closed":
        e = substitute(e, {spec.unknown: spec.expr})
    return spec.reduce(e)


def _define(e: Expr, data: dict) -> Expr:
    defs = data.get("define")
    return substitute(e, {k: from_json(v) for k, v in defs.items()}) if defs else e


def _run_check(entry: CatalogEntry, check: Check) -> CheckResult:
    data = check.data
    pair = entry.pair
    if check.kind == "relation":
        spec = PotentialSpec.from_json(data["potential"]) if "potential" in data else pair.potential
        f = [from_json(c) for c in data["f"]] if "f" in data else pair.f
        rel = AlgebraRelation.from_json(data["relation"]) if "relation" in data else pair.relation
        trial = SolvedPair(pair.mechanics, len(f) - 1, rel, f, spec, hbar=pair.hbar)
        res = _nonzero(trial.residual())
        return CheckResult(check.name, check.expect, not res, "; ".join(res)[:500])
    if check.kind == "first_integral":
        spec = pair.potential
        d = _on_potential(spec, differentiate(_define(from_json(data["expr"]), data)))
        return CheckResult(check.name, check.expect, d.is_zero(), to_text(d)[:500])
    if check.kind == "condition":
        spec = pair.potential
        if data.get("entry_bindings"):
            js = spec.to_json()
            js["expr"] = to_json(_bind(spec.expr, data["entry_bindings"]))
            spec = PotentialSpec.from_json(js)
        r = _on_potential(spec, _bind(_define(from_json(data["expr"]), data), data.get("bindings", {})))
        return CheckResult(check.name, check.expect, r.is_zero(), to_text(r)[:500])
    if check.kind == "painleve":
        rep = painleve_verdict(from_json(data["expr"]), data.get("unknown"))
        detail = "; ".join(f"p={b.p} d0={b.d0 and to_text(b.d0)} r={b.resonances}" for b in rep.branches)
        return CheckResult(check.name, check.expect, rep.verdict == "passes", detail)
    raise ValueError(f"unknown check kind {check.kind!r}")


def verify_entry(entry: str | CatalogEntry, catalog: Catalog | None = None,
                 strict: bool = True) -> EntryReport:
    """Run the entry's verification recipe.

    The pair's relation must hold with zero residual (exactly for closed forms,
    modulo the defining condition otherwise), the stored ladder polynomial
    must be reproduced, and each extra check must come out as recorded.
    """
    if isinstance(entry, str):
        entry = get_entry(entry, catalog)
    if entry.mode == "numeric-jet":
        from .numeric import verify_numeric

        return verify_numeric(entry, strict=strict)
    residual = _nonzero(entry.pair.residual())
    ladder_ok = None
    if entry.ladder is not None:
        ladder_ok = ladder_product(entry.pair) == entry.ladder
    report = EntryReport(entry.id, entry.mode, residual, ladder_ok,
                         [_run_check(entry, c) for c in entry.checks])
    if strict and not report.ok:
        raise VerificationFailed(report)
    return report


def _verify_id(args) -> dict:
    entry_id, path = args
    return verify_entry(entry_id, load_catalog(path), strict=False).to_json()


def verify_all(ids: list | None = None, catalog_file: str | Path | None = None,
               workers: int | None = None) -> list:
    """Verify many entries (in parallel when ``workers > 1``); reports keep input order."""
    path = str(catalog_file or catalog_path())
    ids = ids or [e.id for e in list_entries(catalog=load_catalog(path))]
    jobs = [(i, path) for i in ids]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_verify_id, jobs))
    return [_verify_id(j) for j in jobs]


def _equivalent(a: PotentialSpec, b: PotentialSpec) -> bool:
    if a.variant != b.variant or a.unknown != b.unknown:
        return False
    if a.variant == "closed":
        return a.expr == b.expr
    la, lb = a.expr.leading_term(), b.expr.leading_term()
    return a.expr * lb == b.expr * la


def verify_identification(ident: Identification, catalog: Catalog | None = None) -> bool:
    """Potentials of ``a`` and ``b`` agree (up to an overall factor for
    conditions) once ``b``'s parameters are renamed."""
    catalog = catalog or load_catalog()
    pa = get_entry(ident.a, catalog).potential
    pb = get_entry(ident.b, catalog).potential
    js = pb.to_json()
    js["expr"] = to_json(_bind(pb.expr, ident.rename))
    return _equivalent(pa, PotentialSpec.from_json(js))

