"""Tests for ccshell.config – node budget resolution."""

from __future__ import annotations

import pytest

from ccshell import config as cfg


def test_explicit_budget_wins(monkeypatch):
    monkeypatch.setenv(cfg.BUDGET_ENV_VAR, "50")
    assert cfg.resolve_budget(7) == 7


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv(cfg.BUDGET_ENV_VAR, "50")
    assert cfg.resolve_budget() == 50


@pytest.mark.parametrize("raw", ["", "lots", "-3", "0"])
def test_bad_environment_falls_back_to_default(monkeypatch, raw):
    monkeypatch.setenv(cfg.BUDGET_ENV_VAR, raw)
    assert cfg.resolve_budget() == cfg.DEFAULT_NODE_BUDGET


def test_default_budget(monkeypatch):
    monkeypatch.delenv(cfg.BUDGET_ENV_VAR, raising=False)
    assert cfg.resolve_budget() == cfg.DEFAULT_NODE_BUDGET


def test_non_positive_explicit_budget_rejected():
    with pytest.raises(ValueError):
        cfg.resolve_budget(0)
