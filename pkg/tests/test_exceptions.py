"""Tests for engine errors and their user-facing messages."""
import logging
import pickle

import pytest

from lcy_cones.exceptions import (
    ConfigError,
    DimensionMismatch,
    FamilySuiteError,
    InvalidDepth,
    LcyConesError,
    MaxIterExceeded,
    ModelFormatError,
    NotDisjoint,
    RankLimitExceeded,
    UnknownLabel,
    UnsupportedN,
    YNotInterior,
    handle_engine_error,
)


class TestExceptionMessages:
    """Test that exceptions have helpful user messages."""

    def test_unsupported_n(self):
        error = UnsupportedN(7)
        assert error.n == 7
        assert "n=7" in error.user_message
        assert "1 through 6" in error.help_text

    def test_invalid_depth(self):
        error = InvalidDepth(1, (2,), "every depth must be at least 3")
        assert error.p == (2,)
        assert error.help_text == "every depth must be at least 3"

    def test_unknown_label_lists_known(self):
        error = UnknownLabel("D_9", ["D_1", "D_2"])
        assert "D_9" in error.user_message
        assert "D_1, D_2" in error.help_text

    def test_dimension_mismatch(self):
        error = DimensionMismatch(4, 3)
        assert error.expected == 4 and error.actual == 3
        assert "rank 4" in error.user_message

    def test_rank_limit(self):
        error = RankLimitExceeded(30, 24)
        assert "LCY_CONES_MAX_RANK" in error.help_text

    def test_max_iter_keeps_trace(self):
        error = MaxIterExceeded(5, trace="partial")
        assert error.trace == "partial"
        assert "5" in error.user_message

    def test_not_disjoint(self):
        assert "not disjoint" in NotDisjoint("E_1", "E_2", 1).user_message

    def test_y_not_interior(self):
        assert YNotInterior("y^2 must be positive").user_message == "The reference class y must be ample"

    def test_config_error(self):
        error = ConfigError("workers", 0, "must be >= 1")
        assert error.field == "workers"
        assert "workers" in error.user_message

    def test_model_format_source(self):
        assert "in model.json" in ModelFormatError("bad", "model.json").user_message

    def test_default_user_message(self):
        error = LcyConesError("technical")
        assert error.user_message == "technical"
        assert error.help_text is None

    def test_errors_are_logged(self, caplog):
        with caplog.at_level(logging.DEBUG, logger="lcy_cones.exceptions"):
            UnsupportedN(9)
        assert "No family is defined for n=9" in caplog.text
        assert "unsupported boundary length n=9" in caplog.text


class TestHandleEngineError:
    """Test wrapping errors raised inside a suite."""

    def test_engine_error(self):
        wrapped = handle_engine_error(UnsupportedN(8), "n=3 p=(1,1,1)")
        assert isinstance(wrapped, FamilySuiteError)
        assert wrapped.model_id == "n=3 p=(1,1,1)"
        assert "UnsupportedN" in wrapped.message

    def test_zero_division(self):
        wrapped = handle_engine_error(ZeroDivisionError("x"), "n=1 p=(3)")
        assert "division by zero" in wrapped.help_text

    def test_unexpected(self):
        wrapped = handle_engine_error(KeyError("k"), "n=1 p=(3)")
        assert "unexpected KeyError" in wrapped.message
        assert wrapped.message.startswith("[n=1 p=(3)]")

    def test_suite_error_passes_through(self):
        original = FamilySuiteError("n=2 p=(1,1)", "cause")
        assert handle_engine_error(original, "other") is original

    @pytest.mark.parametrize("error", [ValueError("v"), ArithmeticError("a")])
    def test_always_returns_suite_error(self, error):
        assert isinstance(handle_engine_error(error, "m"), FamilySuiteError)

    def test_suite_error_pickles(self):
        """Grid workers return suite errors through pickle."""
        restored = pickle.loads(pickle.dumps(FamilySuiteError("n=2 p=(1,1)", "cause")))
        assert restored.model_id == "n=2 p=(1,1)"
        assert restored.help_text == "cause"
