"""
End-to-end runs of the msd command line through main(argv).
"""
import os

import pytest

from backend.api.msd_format import parse, serialize, write_diagram
from backend.core.curves import curve_free_faces
from backend.core.diagram_ops import connected_sum, gen1_sphere_diagram, refine
from backend.main import EXIT_ERROR, EXIT_FAILED, EXIT_OK, main


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Audit logs and rendered files go to the test's tmp dir."""
    monkeypatch.setenv("MSD_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("MSD_OUTPUT_DIR", str(tmp_path / "out"))
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def gen1_file(tmp_path):
    path = tmp_path / "gen1.msd"
    write_diagram(gen1_sphere_diagram(3, 1), str(path))
    return str(path)


def _genus_two():
    d1, d2 = refine(gen1_sphere_diagram(3, 1)), refine(gen1_sphere_diagram(3, 2))
    return connected_sum(d1, d2, curve_free_faces(d1.map, d1.all_curves())[0],
                         curve_free_faces(d2.map, d2.all_curves())[0])


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# generate / invariants
# ---------------------------------------------------------------------------

class TestGenerate:

    def test_sphere_bundle_then_invariants(self, capsys, tmp_path):
        """generate sphere-bundle n=4 -> invariants reports genus 3"""
        out = str(tmp_path / "s4.msd")
        code, stdout, _ = _run(capsys, "generate", "kind=sphere-bundle", "n=4", "g=0", "--out", out)
        assert code == EXIT_OK
        assert stdout == ""
        code, stdout, _ = _run(capsys, "invariants", out)
        assert code == EXIT_OK
        assert "genus: 3" in stdout
        assert "family sizes: 3 3 3 3" in stdout
        assert "intersection matrix:" in stdout

    def test_generate_to_stdout(self, capsys):
        code, stdout, _ = _run(capsys, "generate", "kind=gen1-sphere", "n=3", "k=1")
        assert code == EXIT_OK
        assert parse(stdout).genus == 1

    def test_scheme(self, capsys):
        code, stdout, _ = _run(capsys, "generate", "kind=scheme", "n=4", "sigma=(123)")
        assert code == EXIT_OK
        assert stdout.startswith("scheme n=4 N=4 sigma=(123)")

    def test_goodball_report(self, capsys):
        """S^2×S^1 base -> graph and predicted genera printed"""
        code, stdout, _ = _run(capsys, "generate", "kind=goodball", "base=s2xs1")
        assert code == EXIT_OK
        assert "base graph: v=8 e=16 simple=yes" in stdout
        assert "predicted genus (g=0,1,2): 9 17 25" in stdout

    def test_unknown_kind(self, capsys):
        code, _, err = _run(capsys, "generate", "kind=klein")
        assert code == EXIT_ERROR
        assert "klein" in err


# ---------------------------------------------------------------------------
# validate / batch-validate
# ---------------------------------------------------------------------------

class TestValidate:

    def test_shipped_fixture(self, capsys):
        """cp2.msd resolves against the fixtures directory"""
        code, stdout, _ = _run(capsys, "validate", "cp2.msd", "n=3")
        assert code == EXIT_OK
        assert stdout.startswith("cp2: valid")

    def test_wrong_section_count(self, capsys, gen1_file):
        """n=4 on a 3-section -> exit 2, rule listed"""
        code, stdout, _ = _run(capsys, "validate", gen1_file, "n=4")
        assert code == EXIT_FAILED
        assert "invalid" in stdout
        assert "DGM-002" in stdout

    def test_scheme_file(self, capsys, tmp_path):
        path = tmp_path / "z.scheme"
        _run(capsys, "generate", "kind=scheme", "n=4", "layout=zigzag", "--out", str(path))
        code, stdout, _ = _run(capsys, "validate", str(path))
        assert code == EXIT_OK
        assert "valid" in stdout

    def test_batch_exit_precedence(self, capsys, gen1_file, tmp_path):
        """valid + invalid -> 2; adding an unreadable file -> 1"""
        code, stdout, _ = _run(capsys, "batch-validate", "cp2.msd", gen1_file, "n=3")
        assert code == EXIT_OK
        assert len(stdout.splitlines()) == 2

        broken = tmp_path / "broken.msd"
        broken.write_text("msd 1\nname broken\n", encoding="utf-8")
        code, _, _ = _run(capsys, "batch-validate", gen1_file, "n=4")
        assert code == EXIT_FAILED
        code, stdout, _ = _run(capsys, "batch-validate", gen1_file, str(broken), "n=4")
        assert code == EXIT_ERROR
        assert f"{broken}: error: line 3:" in stdout


# ---------------------------------------------------------------------------
# Moves and isomorphism
# ---------------------------------------------------------------------------

class TestMoves:

    def test_find_destab(self, capsys, gen1_file):
        code, stdout, _ = _run(capsys, "find-destab", gen1_file)
        assert code == EXIT_OK
        assert stdout.startswith("witnesses: 1\n")
        assert "witness 0: k=1" in stdout

    def test_destab(self, capsys, gen1_file):
        code, stdout, _ = _run(capsys, "destab", gen1_file)
        assert code == EXIT_OK
        assert parse(stdout).genus == 0

    def test_destab_witness_out_of_range(self, capsys, gen1_file):
        code, _, _ = _run(capsys, "destab", gen1_file, "witness=3")
        assert code == EXIT_ERROR

    def test_shipped_slide_script(self, capsys, tmp_path):
        """Circle bundle over cp2 -> cp2_slides -> witnesses found -> two destab rounds reach genus 5"""
        bundle = str(tmp_path / "cp2xs1.msd")
        assert _run(capsys, "generate", "kind=circle-bundle", "fiber=cp2", "--out", bundle)[0] == EXIT_OK
        slid = str(tmp_path / "slid.msd")
        assert _run(capsys, "move", bundle, "cp2_slides", "--out", slid)[0] == EXIT_OK
        with open(slid, "r", encoding="utf-8") as f:
            assert parse(f.read()).genus == 7

        code, stdout, _ = _run(capsys, "find-destab", slid)
        assert code == EXIT_OK
        count = int(stdout.splitlines()[0].split(": ")[1])
        assert count >= 1
        assert " k=2 " in stdout

        once = str(tmp_path / "once.msd")
        assert _run(capsys, "destab", slid, "--out", once)[0] == EXIT_OK
        code, stdout, _ = _run(capsys, "destab", once)
        assert code == EXIT_OK
        twice = parse(stdout)
        assert twice.genus == 5
        assert [len(f) for f in twice.families] == [5, 5, 5, 5]

    def test_find_destab_with_slide_search(self, capsys, tmp_path):
        """slides=yes lists single slides after which a witness exists, as slide-script lines"""
        d = _genus_two()
        path = tmp_path / "genus2.msd"
        write_diagram(d, str(path))
        code, stdout, _ = _run(capsys, "find-destab", str(path), "slides=yes", "limit=1")
        assert code == EXIT_OK
        lines = stdout.splitlines()
        at = lines.index("enabling slides: 1")
        hit = lines[at + 1]
        assert hit.startswith("slide ")
        assert int(hit.split("# witnesses=")[1]) >= 1
        # the listed line is a valid slide script for `move`
        script = tmp_path / "hit.txt"
        script.write_text(hit + "\n", encoding="utf-8")
        code, stdout, _ = _run(capsys, "move", str(path), str(script))
        assert code == EXIT_OK
        assert parse(stdout).genus == 2

    def test_slide_search_on_single_curve_families(self, capsys, gen1_file):
        code, stdout, _ = _run(capsys, "find-destab", gen1_file, "slides=yes")
        assert code == EXIT_OK
        assert stdout.endswith("enabling slides: 0\n")
        assert _run(capsys, "find-destab", gen1_file, "slides=yes", "limit=0")[0] == EXIT_ERROR

    def test_iso(self, capsys, gen1_file, tmp_path):
        """File vs its re-serialization -> 0; different family order -> 2 unless unordered"""
        with open(gen1_file, "r", encoding="utf-8") as f:
            copy = tmp_path / "copy.msd"
            copy.write_text(serialize(parse(f.read())), encoding="utf-8")
        assert _run(capsys, "iso", gen1_file, str(copy))[0] == EXIT_OK

        other = tmp_path / "other.msd"
        write_diagram(gen1_sphere_diagram(3, 2), str(other))
        code, stdout, _ = _run(capsys, "iso", gen1_file, str(other))
        assert code == EXIT_FAILED
        assert stdout == "not isomorphic\n"
        assert _run(capsys, "iso", gen1_file, str(other), "unordered=yes")[0] == EXIT_OK


# ---------------------------------------------------------------------------
# render / usage
# ---------------------------------------------------------------------------

class TestRender:

    def test_scheme_svg(self, capsys, tmp_path):
        scheme = tmp_path / "s.scheme"
        _run(capsys, "generate", "kind=scheme", "n=4", "sigma=(123)", "--out", str(scheme))
        svg = tmp_path / "s.svg"
        assert _run(capsys, "render", str(scheme), "--out", str(svg))[0] == EXIT_OK
        assert 'id="cell-1-0"' in svg.read_text(encoding="utf-8")

    def test_diagram_to_output_dir(self, capsys, gen1_file, tmp_path):
        """No --out -> file in MSD_OUTPUT_DIR, path printed"""
        code, stdout, _ = _run(capsys, "render", gen1_file)
        assert code == EXIT_OK
        path = stdout.strip()
        assert path.startswith(str(tmp_path / "out"))
        with open(path, "r", encoding="utf-8") as f:
            assert 'id="panel-1"' in f.read()


class TestUsage:

    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["generate"], ["invariants"],
                                      ["invariants", "missing.msd"], ["validate", "cp2.msd", "n=three"]])
    def test_usage_errors(self, capsys, argv):
        code, _, err = _run(capsys, *argv)
        assert code == EXIT_ERROR
        assert err

    def test_audit_trail_written(self, capsys, gen1_file, tmp_path):
        """Each run logs command_started and its outcome"""
        _run(capsys, "find-destab", gen1_file)
        files = os.listdir(tmp_path / "logs")
        assert len(files) == 1
        text = (tmp_path / "logs" / files[0]).read_text(encoding="utf-8")
        assert '"command_started"' in text
        assert '"command_completed"' in text
