"""
Scheme tables for circle bundles.
"""
import pytest

from backend.core.errors import InvalidPartition
from backend.data.schemes import (
    format_sigma,
    parse_sigma,
    scheme_N,
    scheme_for_sigma,
    scheme_single_cycle,
    scheme_stack,
    scheme_validate,
    scheme_zigzag,
    span_columns,
    transverse_panels,
)


class TestSigma:

    @pytest.mark.parametrize("text,expected", [
        ("(123)", (2, 3, 1)),
        ("(1 2)(3 4 5)", (2, 1, 4, 5, 3)),
        ("(12)(345)", (2, 1, 4, 5, 3)),
        ("(2,3)", (1, 3, 2)),
    ])
    def test_parse(self, text, expected):
        """Cycle notation -> image list"""
        assert parse_sigma(text) == expected

    def test_identity_padded_to_rows(self):
        """'id' with rows=3 -> (1, 2, 3)"""
        assert parse_sigma("id", rows=3) == (1, 2, 3)

    @pytest.mark.parametrize("text", ["12", "(1 1)", "(0 1)", "(12)x"])
    def test_rejects_garbage(self, text):
        """Unreadable or repeating cycles -> InvalidPartition"""
        with pytest.raises(InvalidPartition):
            parse_sigma(text)

    def test_format(self):
        assert format_sigma((2, 3, 1)) == "(123)"
        assert format_sigma((1, 2, 3)) == "id"
        assert format_sigma(parse_sigma("(12)(345)")) == "(12)(345)"


class TestSchemeN:

    @pytest.mark.parametrize("sigma,n,expected", [
        ("(123)", 4, 4),
        ("id", 4, 6),
        ("(12)(345)", 6, 7),
    ])
    def test_column_count(self, sigma, n, expected):
        """Cycles of sigma plus n - 1"""
        assert scheme_N(parse_sigma(sigma, rows=n - 1), n) == expected

    def test_wrong_size(self):
        """sigma on 2 rows for a 4-section -> InvalidPartition"""
        with pytest.raises(InvalidPartition):
            scheme_N((2, 1), 4)


class TestStackScheme:

    def test_three_cycle_cells(self):
        """(123) -> the worked table, one block of four columns"""
        s = scheme_stack([[1, 2, 3]])
        assert s.cells == ((3, 4, 4, 4, 1), (1, 1, 1, 2, 2), (2, 2, 3, 3, 3))
        assert s.sigma == (2, 3, 1)
        assert s.N == 4
        assert s.missing_sequence() == [3, 2, 1, 4]

    def test_columns_match_scheme_n(self):
        """Every stack has scheme_N columns"""
        for text, n in (("(123)", 4), ("id", 4), ("(12)(345)", 6), ("(13)", 4)):
            sigma = parse_sigma(text, rows=n - 1)
            assert scheme_for_sigma(sigma).N == scheme_N(sigma, n)

    @pytest.mark.parametrize("text,n", [("(123)", 4), ("id", 4), ("(12)(345)", 6), ("(1432)", 5), ("(12)", 4)])
    def test_stack_is_valid(self, text, n):
        """Generated stacks pass every scheme rule"""
        report = scheme_validate(scheme_for_sigma(parse_sigma(text, rows=n - 1)))
        assert report.valid, report.failed_rules()
        assert report.rules_evaluated == 8

    def test_single_cycle(self):
        s = scheme_single_cycle(3)
        assert s.name == "cycle-3"
        assert s.sigma == (2, 3, 1)

    def test_bad_partition(self):
        """Cycles skipping a row -> InvalidPartition"""
        with pytest.raises(InvalidPartition):
            scheme_stack([[1, 3]])


class TestZigzagScheme:

    def test_missing_sequence(self):
        """zigzag(4) -> 2 3 4 3 2 1"""
        assert scheme_zigzag(4).missing_sequence() == [2, 3, 4, 3, 2, 1]

    def test_valid(self):
        for n in (3, 4, 5, 6):
            assert scheme_validate(scheme_zigzag(n)).valid

    def test_transverse_panels(self):
        """Panels where a piece is present on both flanking columns"""
        s = scheme_zigzag(4)
        assert transverse_panels(s, 4) == [1, 2, 5, 6]
        assert transverse_panels(s, 3) == [1, 6]

    def test_span_columns(self):
        """Columns whose tube goes to piece 3"""
        assert span_columns(scheme_zigzag(4), 3) == [1, 3]

    def test_zigzag_needs_identity(self):
        """Zigzag layout for a non-trivial sigma -> InvalidPartition"""
        with pytest.raises(InvalidPartition):
            scheme_for_sigma((2, 1), layout="zigzag")

    def test_too_small(self):
        with pytest.raises(InvalidPartition):
            scheme_zigzag(2)


class TestSchemeRules:

    def test_repeated_label_in_column(self):
        """A column with the same piece twice -> SCH-001"""
        s = scheme_stack([[1, 2, 3]]).with_cell(1, 2, 1)
        report = scheme_validate(s)
        assert not report.valid
        assert "SCH-001" in report.failed_rules()

    def test_report_carries_missing_sequence(self):
        report = scheme_validate(scheme_zigzag(4))
        assert report.missing == [2, 3, 4, 3, 2, 1]
        assert (report.n, report.N) == (4, 6)
