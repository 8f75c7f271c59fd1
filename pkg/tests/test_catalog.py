import copy
import json
import time

import pytest

from superint.catalog import (
    CATALOG_ENV, Catalog, CatalogEntry, VerificationFailed, get_entry, list_entries,
    load_catalog, verify_all, verify_entry, verify_identification,
)
from superint.symkernel import I, ONE, from_json, sym, var

x, hbar, a1 = var("x"), sym("hbar"), sym("alpha1")


def ids(entries):
    return [e.id for e in entries]


class TestExamples:
    def test_harmonic_ladder(self):
        entry = get_entry("q-d1")
        assert entry.potential.expr == a1 ** 2 * x ** 2 / (2 * hbar ** 2)
        K = entry.pair.K()
        # p - i alpha x / hbar with p = -i hbar D
        assert K.coeff(1) == -I * hbar and K.coeff(0) == -I * a1 * x / hbar
        rep = verify_entry("q-d1")
        assert rep.residual == [] and rep.ladder_ok is True

    def test_abelian_inverse_square_special_case(self):
        entry = get_entry("q-a3-special")
        assert entry.potential.expr == hbar ** 2 / x ** 2
        assert verify_entry(entry).ok

    def test_classical_square_root_potential(self):
        rep = verify_entry("c-b3")
        assert rep.ok
        assert [c.name for c in rep.checks if c.holds] == ["K = p(2H + V) + 2 beta H"]

    def test_conformal_inverse_square(self):
        assert verify_entry("q-c2").ok


class TestSweep:
    def test_every_entry_verifies(self):
        start = time.perf_counter()
        reports = verify_all()
        elapsed = time.perf_counter() - start
        bad = [r["id"] for r in reports if not r["ok"]]
        assert not bad
        assert elapsed < 60

    def test_parallel_sweep_keeps_order(self):
        some = ["q-d3", "q-a5", "c-d4", "q-b3"]
        assert [r["id"] for r in verify_all(some, workers=2)] == some

    def test_misprints_recorded_as_failing_checks(self):
        expected_false = [(e.id, c.name) for e in list_entries() for c in e.checks if not c.expect]
        assert ("c-d3", "quartic as printed is conserved") in expected_false
        for entry_id, name in expected_false:
            rep = verify_entry(entry_id)
            (check,) = [c for c in rep.checks if c.name == name]
            assert not check.holds

    def test_type_d_entries_store_ladder(self):
        for e in list_entries(kind="d"):
            assert e.ladder is not None, e.id


class TestListing:
    def test_classical_ladders(self):
        assert ids(list_entries(mechanics="classical", kind="d")) == [f"c-d{i}" for i in range(1, 6)]

    def test_quantum_order_five(self):
        assert ids(list_entries(mechanics="quantum", M=5)) == ["q-a5", "q-b5", "q-c5", "q-d5"]

    def test_empty_filter_is_everything(self):
        assert sorted(ids(list_entries())) == sorted(load_catalog().entries)

    def test_order_is_deterministic(self):
        assert ids(list_entries()) == ids(list_entries())
        assert ids(list_entries())[0].startswith("q-")

    def test_unknown_entry(self):
        with pytest.raises(KeyError, match="q-z9"):
            get_entry("q-z9")


class TestIdentifications:
    def test_all_identifications_hold(self):
        cat = load_catalog()
        assert cat.identifications
        for ident in cat.identifications:
            assert verify_identification(ident), (ident.a, ident.b)

    def test_wrong_renaming_is_rejected(self):
        (ident,) = [i for i in load_catalog().identifications if (i.a, i.b) == ("c-b1", "c-b2")]
        wrong = copy.copy(ident)
        wrong.rename = {}
        assert not verify_identification(wrong)


class TestStorage:
    def test_json_round_trip(self):
        cat = load_catalog()
        again = Catalog.from_json(json.loads(json.dumps(cat.to_json())))
        assert again.to_json() == cat.to_json()

    def test_version_checked(self):
        data = load_catalog().to_json()
        data["version"] = 99
        with pytest.raises(ValueError, match="version"):
            Catalog.from_json(data)

    def test_environment_override(self, tmp_path, monkeypatch):
        cat = load_catalog()
        small = Catalog({"q-d1": cat.entries["q-d1"]}, {}, [])
        path = tmp_path / "small.json"
        small.save(path)
        monkeypatch.setenv(CATALOG_ENV, str(path))
        assert ids(list_entries()) == ["q-d1"]

    def test_broken_entry_raises_with_report(self):
        entry = CatalogEntry.from_json(get_entry("q-d1").to_json())
        entry.ladder = [ONE, ONE]
        with pytest.raises(VerificationFailed) as err:
            verify_entry(entry)
        assert err.value.report.ladder_ok is False
        assert not verify_entry(entry, strict=False).ok

    def test_numeric_mode_delegates(self):
        entry = CatalogEntry.from_json(get_entry("q-d3").to_json())
        entry.mode = "numeric-jet"
        entry.annotations["numeric"] = {"via": "V through P4", "params": {"k1": 0, "k2": 0, "eps": 1}}
        rep = verify_entry(entry)
        assert rep.ok and rep.mode == "numeric-jet"

    def test_families_present(self):
        fams = load_catalog().families
        assert set(fams) == {"jauch-hill", "smorodinsky-winternitz", "caged"}
        assert from_json(fams["jauch-hill"].to_json()["template"]) == fams["jauch-hill"].template
