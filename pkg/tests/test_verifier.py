import itertools
import random

import pytest

from vilenkin_wavelets.errors import FamilyArityError
from vilenkin_wavelets.setalg import Cylinder, PSet, theta_ball, unit_cell
from vilenkin_wavelets.verifier import (
    WaveletFamily,
    check_dilation_tiling,
    check_measure_one,
    check_translation_congruence,
    congruence_partition,
    is_wavelet_set,
    search_wavelet_sets,
    shannon_family,
)

from .mutants import CONGRUENCE, MEASURE, TILING, all_mutants
from .oracle import CellSet, oracle_is_wavelet_set

rng = random.Random(90125)

_KEYS = {MEASURE: "measure", TILING: "tiling", CONGRUENCE: "congruence"}


def oracle_verdict(family, lo=-2, hi=3):
    sets = [CellSet.from_pset(s, lo, hi) for s in family.sets]
    return oracle_is_wavelet_set(family.p, sets)


class TestShannonFamilies:
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_all_conditions_pass(self, p):
        report = is_wavelet_set(shannon_family(p))
        assert report.overall
        for record in report.conditions:
            assert record.passed and not record.witnesses

    @pytest.mark.parametrize("p", [2, 3])
    def test_matches_oracle(self, p):
        verdict = oracle_verdict(shannon_family(p), lo=0, hi=2)
        assert verdict["overall"]

    def test_certificate_translates_partition_unit_cell(self, p=3):
        family = shannon_family(p)
        for s in family.sets:
            parts = congruence_partition(s)
            union = parts[0][2]
            for _, _, piece in parts[1:]:
                assert union.intersect(piece).is_empty
                union = union.union(piece)
            assert union == unit_cell(p)

    def test_shannon_partition_is_single_translate(self, p=5):
        family = shannon_family(p)
        for u, s in enumerate(family.sets, start=1):
            parts = congruence_partition(s)
            assert len(parts) == 1
            n, piece, shifted = parts[0]
            from vilenkin_wavelets.group import lambda_encode

            assert lambda_encode(n) == u
            assert shifted == unit_cell(p)


class TestConditionChecks:
    def test_measure_one_reports_each_set(self):
        family = shannon_family(3).replace(1, theta_ball(3, 1))
        record = check_measure_one(family)
        assert not record.passed
        assert record.witnesses[0]["set"] == "omega1"
        assert record.witnesses[0]["measure"] == "1*3^-1"

    def test_unit_cell_in_family_is_degenerate(self):
        family = shannon_family(2).replace(1, unit_cell(2))
        record = check_dilation_tiling(family)
        kinds = {w["kind"] for w in record.witnesses}
        assert "contains-identity-neighborhood" in kinds
        assert "dilate-overlap" in kinds  # the d=1 self-overlap

    def test_unit_cell_is_trivially_congruent(self):
        family = shannon_family(2).replace(1, unit_cell(2))
        record, certificate = check_translation_congruence(family)
        assert record.passed
        assert certificate[0]["partition"][0]["lattice_index"] == 0

    def test_positive_position_digit_cannot_clear(self):
        family = shannon_family(2).replace(
            1, PSet(2, [Cylinder(2, 1, ((1, 1),))], validate=False)
        )
        record, _ = check_translation_congruence(family)
        assert not record.passed
        assert any(w["kind"] == "cover-gap" for w in record.witnesses)

    def test_empty_family_rejected(self):
        with pytest.raises(FamilyArityError):
            WaveletFamily(2, (), ())
        with pytest.raises(FamilyArityError):
            WaveletFamily(3, ("a",), (unit_cell(3),))


class TestMutants:
    @pytest.mark.parametrize("mutant", all_mutants(), ids=lambda m: f"p{m.p}-{m.name}")
    def test_expected_condition_outcomes(self, mutant):
        report = is_wavelet_set(mutant.family)
        assert not report.overall
        for name in mutant.must_fail:
            record = report.condition(name)
            assert not record.passed, f"{name} unexpectedly passed"
            assert record.witnesses, f"{name} failed without a witness"
        for name in mutant.must_pass:
            assert report.condition(name).passed, f"{name} unexpectedly failed"
        assert not report.condition(mutant.intended).passed

    @pytest.mark.parametrize(
        "mutant",
        [m for m in all_mutants((2, 3))],
        ids=lambda m: f"p{m.p}-{m.name}",
    )
    def test_against_oracle(self, mutant):
        report = is_wavelet_set(mutant.family)
        verdict = oracle_verdict(mutant.family)
        for name, key in _KEYS.items():
            assert report.condition(name).passed == verdict[key], name
        assert report.overall == verdict["overall"]

    def test_suite_is_large_enough(self):
        assert len(all_mutants()) >= 20

    def test_witnesses_are_deterministically_ordered(self):
        # Witness cells within one failure kind appear in lexicographic
        # (resolution, digits) order, so reports diff cleanly.
        for mutant in all_mutants((2, 3)):
            report = is_wavelet_set(mutant.family)
            for record in report.conditions:
                by_kind: dict = {}
                for witness in record.witnesses:
                    if "cell" in witness:
                        key = witness.get("kind", ""), witness.get("set", ""), witness.get("d", 0)
                        cell = witness["cell"]
                        cell_key = (
                            cell["resolution"],
                            tuple(sorted((int(k), v) for k, v in cell["digits"].items())),
                        )
                        by_kind.setdefault(key, []).append(cell_key)
                for cells in by_kind.values():
                    assert cells == sorted(cells)


class TestRangeRobustness:
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_widening_never_changes_shannon(self, p):
        base = is_wavelet_set(shannon_family(p))
        wide = is_wavelet_set(shannon_family(p), extra_range=3)
        assert base.overall == wide.overall
        for b, w in zip(base.conditions, wide.conditions):
            assert b.passed == w.passed

    @pytest.mark.parametrize("mutant", all_mutants((2, 3)), ids=lambda m: f"p{m.p}-{m.name}")
    def test_widening_never_changes_mutants(self, mutant):
        base = is_wavelet_set(mutant.family)
        wide = is_wavelet_set(mutant.family, extra_range=3)
        for b, w in zip(base.conditions, wide.conditions):
            assert b.passed == w.passed


class TestSearch:
    def test_contains_shannon(self):
        result = search_wavelet_sets(2, (0, 2))
        assert not result.exhausted
        shannon = shannon_family(2)
        assert any(f.sets == shannon.sets for f in result.families)

    def test_found_families_verify(self):
        result = search_wavelet_sets(2, (0, 2))
        for family in result.families:
            assert is_wavelet_set(family).overall

    def test_budget_zero(self):
        result = search_wavelet_sets(2, (0, 2), budget=0)
        assert result.families == [] and result.exhausted and result.examined == 0

    def test_budget_partial(self):
        full = search_wavelet_sets(2, (0, 2))
        part = search_wavelet_sets(2, (0, 2), budget=10)
        assert part.exhausted and part.examined == 10
        assert full.examined > part.examined

    def test_deterministic(self):
        a = search_wavelet_sets(2, (0, 2))
        b = search_wavelet_sets(2, (0, 2))
        assert [f.sets for f in a.families] == [f.sets for f in b.families]

    def test_full_search_matches_oracle(self):
        # Enumerate every candidate family independently and compare the
        # accepted sets cell-by-cell against the oracle's verdicts.
        p = 2
        atoms = [
            tuple((pos, d) for pos, d in zip(range(0, 3), combo) if d)
            for combo in itertools.product(range(p), repeat=3)
        ]
        accepted = []
        for combo in itertools.combinations(atoms, 4):
            family = WaveletFamily(
                p, ("omega1",), (PSet.from_cells(p, 2, combo),)
            )
            verdict = oracle_verdict(family, lo=0, hi=2)
            library = is_wavelet_set(family)
            assert library.overall == verdict["overall"]
            for name, key in _KEYS.items():
                assert library.condition(name).passed == verdict[key]
            if verdict["overall"]:
                accepted.append(family.sets)
        result = search_wavelet_sets(p, (0, 2))
        assert sorted(map(repr, (f.sets for f in result.families))) == sorted(
            map(repr, accepted)
        )


class TestCongruenceImpliesMeasure:
    def test_every_congruent_candidate_has_measure_one(self):
        # Unit-translate congruence forces measure one; asserted over the
        # whole small-window candidate space rather than assumed.
        p = 2
        atoms = [
            tuple((pos, d) for pos, d in zip(range(0, 3), combo) if d)
            for combo in itertools.product(range(p), repeat=3)
        ]
        seen = 0
        for size in (2, 4, 6):
            for combo in itertools.combinations(atoms, size):
                family = WaveletFamily(
                    p, ("omega1",), (PSet.from_cells(p, 2, combo),)
                )
                record, _ = check_translation_congruence(family)
                if record.passed:
                    seen += 1
                    assert check_measure_one(family).passed
        assert seen > 0


class TestThreeShellFamily:
    def test_verifies_and_matches_oracle(self):
        from .families import three_shell_family

        family = three_shell_family()
        report = is_wavelet_set(family)
        assert report.overall
        verdict = oracle_verdict(family, lo=-1, hi=3)
        assert verdict["overall"]

    def test_range_widening_stable(self):
        from .families import three_shell_family

        family = three_shell_family()
        wide = is_wavelet_set(family, extra_range=3)
        assert wide.overall

    def test_partition_uses_multiple_translates(self):
        from .families import three_shell_family
        from vilenkin_wavelets.group import lambda_encode

        family = three_shell_family()
        parts = congruence_partition(family.sets[0])
        indices = sorted(lambda_encode(n) for n, _, _ in parts)
        assert len(indices) > 1  # genuinely multi-piece congruence


class TestSearchBeyondBaseTwo:
    def test_p3_window_contains_coset_shuffles(self):
        result = search_wavelet_sets(3, (0, 1))
        assert not result.exhausted
        assert len(result.families) == 8
        shannon = shannon_family(3)
        assert any(f.sets == shannon.sets for f in result.families)
        for family in result.families:
            assert is_wavelet_set(family).overall


class TestRandomFamiliesAgainstOracle:
    @pytest.mark.parametrize("p", [2, 3])
    def test_random_candidates(self, p):
        # Random measure-one families, mostly invalid: both deciders must
        # agree on every condition.
        atoms = [
            tuple((pos, d) for pos, d in zip(range(0, 3), combo) if d)
            for combo in itertools.product(range(p), repeat=3)
        ]
        per_set = p**2
        for _ in range(60 if p == 2 else 25):
            pool = list(atoms)
            rng.shuffle(pool)
            sets = []
            ok = True
            for u in range(p - 1):
                chunk = pool[u * per_set : (u + 1) * per_set]
                if len(chunk) < per_set:
                    ok = False
                    break
                sets.append(PSet.from_cells(p, 2, chunk))
            if not ok:
                continue
            family = WaveletFamily(p, tuple(f"omega{u+1}" for u in range(p - 1)), tuple(sets))
            library = is_wavelet_set(family)
            verdict = oracle_verdict(family, lo=0, hi=2)
            for name, key in _KEYS.items():
                assert library.condition(name).passed == verdict[key]
            assert library.overall == verdict["overall"]
