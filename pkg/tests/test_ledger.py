import pytest

from src.database import ledger_manager
from src.database.ledger_manager import LedgerManager, get_ledger_manager


@pytest.fixture
def ledger(tmp_path):
    return LedgerManager(f"sqlite:///{tmp_path}/runs/ledger.db")


class TestCheckRuns:
    def test_record_and_read_back(self, ledger):
        first = ledger.record_run("validate", "0" * 64, "VALID", 0, "RESULT validate VALID exit=0", 0.01)
        second = ledger.record_run("equiv", "1" * 64, "DIFFERENT", 1, "RESULT equiv DIFFERENT exit=1", 0.2)
        assert second > first
        runs = ledger.recent_runs()
        assert [r["verb"] for r in runs] == ["equiv", "validate"]
        assert runs[0]["exit_code"] == 1

    def test_filter_and_limit(self, ledger):
        for verdict in ("SAT", "UNSAT", "SAT"):
            ledger.record_run("check-sentence", "0" * 64, verdict, 0, f"RESULT check-sentence {verdict}", 0.0)
        ledger.record_run("pg", "0" * 64, "BUILT", 0, "RESULT pg BUILT exit=0", 0.0)
        assert len(ledger.recent_runs(verb="check-sentence")) == 3
        assert len(ledger.recent_runs(limit=2)) == 2


class TestSweeps:
    def test_stats(self, ledger):
        ledger.record_sweep("frame-rank", 50, 0, 7, 1.5)
        ledger.record_sweep("amalgam-dependence", 20, 1, 3, 0.4, first_counterexample="seed 3")
        ledger.record_run("lambda", "0" * 64, "COMPUTED", 0, "RESULT lambda COMPUTED exit=0", 0.0)
        assert ledger.sweep_stats() == {"check_runs": 1, "property_sweeps": 2, "failing_sweeps": 1}


def test_process_wide_manager_is_shared(tmp_path, monkeypatch):
    monkeypatch.setattr(ledger_manager, "_ledger_manager", None)
    url = f"sqlite:///{tmp_path}/shared.db"
    assert get_ledger_manager(url) is get_ledger_manager()
