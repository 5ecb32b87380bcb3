import io

import pytest

from src.backend.cli import execute, run
from src.backend.coloured.systems import ColouredSystem
from src.backend.config_loader import CONFIG
from src.backend.formats import read_complement, read_gaingraph, read_matroid, write_matroid, write_system
from src.backend.matroids.matroid import uniform
from src.database import ledger_manager
from src.database.ledger_manager import LedgerManager

TRIANGLE = """gaingraph
group cyclic 3
vertex a
vertex b
vertex c
edge e1 a b 1
edge e2 b c 1
edge e3 c a 1
"""


def invoke(argv):
    out = io.StringIO()
    code = run(argv, stdout=out)
    return code, out.getvalue().splitlines()


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def system_file(tmp_path, name, colour):
    m = ColouredSystem(["u1"], ("c1", "c2"), [("c1", "c2").index(colour)] * 2)
    return write(tmp_path / name, write_system(m))


class TestCheckSentence:
    def test_sat(self, tmp_path, u12):
        matroid = write(tmp_path / "u12.txt", write_matroid(u12))
        code, lines = invoke(["check-sentence", "--matroid", matroid, "--formula", "exists Z1 (hyp(Z1) & |Z1| = 1 mod 2)"])
        assert code == 0
        assert lines[-2] == "SAT"
        assert lines[-1] == "RESULT check-sentence SAT exit=0"

    def test_unsat_on_empty_family(self, tmp_path):
        h = write(tmp_path / "empty.txt", "hypergraph\nground a\n")
        code, lines = invoke(["check-sentence", "--matroid", h, "--formula", "exists Z1 hyp(Z1)"])
        assert code == 1
        assert lines[-1] == "RESULT check-sentence UNSAT exit=1"

    def test_formula_from_file(self, tmp_path, u23):
        matroid = write(tmp_path / "u23.txt", write_matroid(u23))
        formula = write(tmp_path / "f.txt", "# three elements are dependent\nexists Z1 (~hyp(Z1) & |Z1| = 0 mod 3)\n")
        code, lines = invoke(["check-sentence", "--matroid", matroid, "--formula", formula])
        assert code == 0
        assert lines[0] == "formula: exists Z1 ~hyp(Z1) & |Z1| = 0 mod 3"

    def test_missing_file(self, tmp_path, capsys):
        code, lines = invoke(["check-sentence", "--matroid", str(tmp_path / "nope.txt"), "--formula", "exists Z1 hyp(Z1)"])
        assert code == 2
        assert lines == ["RESULT check-sentence ERROR exit=2"]
        assert "error:" in capsys.readouterr().err

    def test_bad_formula(self, tmp_path, u12):
        matroid = write(tmp_path / "u12.txt", write_matroid(u12))
        code, _ = invoke(["check-sentence", "--matroid", matroid, "--formula", "exists Z1 hyp(Z2)"])
        assert code == 2


class TestMatroidVerbs:
    def test_frame_matroid(self, tmp_path):
        gg = write(tmp_path / "triangle.gg", TRIANGLE)
        out = tmp_path / "frame.txt"
        code, lines = invoke(["frame-matroid", "--gaingraph", gg, "--out", str(out)])
        assert code == 0
        assert lines[0] == "frame matroid on 3 elements, rank 2"
        assert read_matroid(out.read_text(encoding="utf-8")) == uniform(2, ["e1", "e2", "e3"])

    def test_amalgam(self, tmp_path):
        left = write(tmp_path / "left.txt", write_matroid(uniform(2, ["p", "q", "a"])))
        right = write(tmp_path / "right.txt", write_matroid(uniform(2, ["p", "q", "b"])))
        out = tmp_path / "out" / "amalgam.txt"
        code, lines = invoke(["amalgam", "--left", left, "--right", right, "--out", str(out)])
        assert code == 0
        assert lines[-1] == "RESULT amalgam BUILT exit=0"
        assert read_matroid(out.read_text(encoding="utf-8")) == uniform(2, ["p", "q", "a", "b"])

    def test_amalgam_rejects_hypergraphs(self, tmp_path):
        left = write(tmp_path / "left.txt", "hypergraph\nground p q\nindep -\n")
        code, _ = invoke(["amalgam", "--left", left, "--right", left, "--out", str(tmp_path / "x.txt")])
        assert code == 2

    def test_pg_then_validate(self, tmp_path):
        out = tmp_path / "fano.txt"
        code, lines = invoke(["pg", "--p", "2", "--out", str(out)])
        assert code == 0
        assert lines[0] == "projective plane over GF(2): 7 points, 0 lines"
        code, lines = invoke(["validate", "--matroid", str(out)])
        assert code == 0
        assert lines[-1] == "RESULT validate VALID exit=0"

    def test_validate_reports_the_axiom(self, tmp_path):
        bad = write(tmp_path / "bad.txt", "matroid\nground a b\nindep a b\n")
        code, lines = invoke(["validate", "--matroid", bad])
        assert code == 1
        assert lines[0].startswith("empty-set violated")


class TestColouredVerbs:
    def test_registry(self, tmp_path):
        m = system_file(tmp_path, "m.txt", "c1")
        code, lines = invoke(["registry", "--system", m, "--formula", "exists Z1 hyp(Z1)"])
        assert code == 0
        assert "registry: {T2[Z1:c1]}" in lines

    def test_equiv_equal(self, tmp_path):
        m = system_file(tmp_path, "m.txt", "c1")
        code, lines = invoke(["equiv", "--system-a", m, "--system-b", m, "--formula", "exists Z1 hyp(Z1)"])
        assert code == 0
        assert "EQUAL (registry match)" in lines
        assert lines[-1] == "RESULT equiv EQUAL exit=0"

    def test_equiv_different(self, tmp_path):
        a = system_file(tmp_path, "a.txt", "c1")
        b = system_file(tmp_path, "b.txt", "c2")
        code, lines = invoke(["equiv", "--system-a", a, "--system-b", b, "--formula", "exists Z1 hyp(Z1)"])
        assert code == 1
        assert "DIFFERENT (cleft at |V|=0)" in lines
        assert lines[-1] == "RESULT equiv DIFFERENT exit=1"

    def test_cleft_search_writes_the_complement(self, tmp_path):
        a = system_file(tmp_path, "a.txt", "c1")
        b = system_file(tmp_path, "b.txt", "c2")
        out = tmp_path / "cleft.txt"
        code, lines = invoke(["cleft-search", "--system-a", a, "--system-b", b, "--formula", "exists Z1 hyp(Z1)", "--out", str(out)])
        assert code == 0
        assert lines[-1] == "RESULT cleft-search FOUND exit=0"
        assert read_complement(out.read_text(encoding="utf-8")).accepted() == [((), "c2")]

    def test_cleft_search_absent(self, tmp_path):
        a = system_file(tmp_path, "a.txt", "c1")
        code, lines = invoke(["cleft-search", "--system-a", a, "--system-b", a, "--formula", "exists Z1 hyp(Z1)"])
        assert code == 1
        assert lines[0] == "no cleft up to |V|=1"

    def test_classify_with_csv(self, tmp_path):
        a = system_file(tmp_path, "a.txt", "c1")
        b = system_file(tmp_path, "b.txt", "c2")
        csv = tmp_path / "classes.csv"
        code, lines = invoke(["classify", "--systems", a, b, a, "--formula", "exists Z1 hyp(Z1)", "--csv", str(csv)])
        assert code == 0
        assert lines[0] == "3 systems, 2 registry classes, bound 4"
        assert csv.read_text().splitlines()[0] == "system,class,registry_nodes"


class TestLogicVerbs:
    def test_lambda(self):
        code, lines = invoke(["lambda", "--formula", "exists Z1 hyp(Z1)", "--s", "1", "--t", "2"])
        assert code == 0
        assert "bound: 4" in lines

    def test_lint_renames(self):
        code, lines = invoke(["lint", "--formula", "exists Z1 (hyp(Z1) & exists Z1 hyp(Z1))"])
        assert code == 1
        assert "suggestion: exists Z1 hyp(Z1) & (exists Z2 hyp(Z2))" in lines

    def test_lint_clean(self):
        code, lines = invoke(["lint", "--formula", "hyp(Z1)"])
        assert code == 0
        assert lines[-1] == "RESULT lint CLEAN exit=0"


class TestGroupVerbs:
    def test_solve_words(self):
        code, lines = invoke(["solve-words", "--group", "cyclic2", "--eq", "x1x1", "--neq", "x1"])
        assert code == 0
        assert lines[0] == "witness: x1=1"

    def test_solve_words_absent(self):
        code, lines = invoke(["solve-words", "--group", "cyclic3", "--eq", "x1x1", "--neq", "x1"])
        assert code == 1
        assert lines[-1] == "RESULT solve-words ABSENT exit=1"

    def test_unknown_group(self):
        code, _ = invoke(["solve-words", "--group", "quaternion8", "--eq", "x1"])
        assert code == 2

    def test_gadget_falls_back_to_the_star(self, tmp_path):
        out = tmp_path / "h.gg"
        code, lines = invoke(["gadget", "h", "--group", "cyclic20", "--gens", "1,19", "--N", "2", "--auto-params", "--out", str(out)])
        assert code == 0
        assert lines[-1] == "RESULT gadget BUILT-STAR exit=0"
        assert any("built the star part only" in line for line in lines)
        assert read_gaingraph(out.read_text(encoding="utf-8")).group.order == 20

    def test_gadget_needs_parameters(self):
        code, _ = invoke(["gadget", "h", "--group", "cyclic20", "--gens", "1,19", "--N", "2"])
        assert code == 2

    def test_conviviality(self, tmp_path):
        dot = tmp_path / "conv.dot"
        code, lines = invoke(["conviviality", "--group", "cyclic4", "--subgroup", "cyclic2", "--dot", str(dot)])
        assert code == 0
        assert lines[0] == "elementary graph: 2 vertices, 1 edges"
        assert dot.read_text().startswith("// finite restriction")


class TestGlobalOptions:
    def test_config_file_applies_for_one_call(self, tmp_path):
        config = write(tmp_path / "workbench.conf", "matroid_max_ground = 5\n")
        code, _ = invoke(["--config", config, "pg", "--p", "2", "--out", str(tmp_path / "fano.txt")])
        assert code == 2
        assert CONFIG["matroid_max_ground"] == 20

    def test_bad_config_file(self, tmp_path):
        config = write(tmp_path / "workbench.conf", "no_such_key = 1\n")
        result = execute(["--config", config, "lambda", "--formula", "hyp(Z1)", "--s", "1", "--t", "1"])
        assert result.exit_code == 2
        assert "unknown configuration key" in result.error

    def test_parallel_flag(self, tmp_path):
        a = system_file(tmp_path, "a.txt", "c1")
        code, _ = invoke(["--parallel", "2", "classify", "--systems", a, a, "--formula", "exists Z1 hyp(Z1)"])
        assert code == 0

    def test_ledger(self, tmp_path, monkeypatch):
        url = f"sqlite:///{tmp_path}/ledger.db"
        monkeypatch.setitem(CONFIG, "ledger_url", url)
        monkeypatch.setattr(ledger_manager, "_ledger_manager", None)
        code, _ = invoke(["--ledger", "lambda", "--formula", "hyp(Z1)", "--s", "1", "--t", "2"])
        assert code == 0
        runs = LedgerManager(url).recent_runs()
        assert runs[0]["verb"] == "lambda"
        assert runs[0]["summary"] == "RESULT lambda COMPUTED exit=0"

    def test_unknown_verb_exits_through_argparse(self):
        with pytest.raises(SystemExit):
            run(["frobnicate"], stdout=io.StringIO())
