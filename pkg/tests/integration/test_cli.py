"""Command-line entry point tests."""
import json
import math
from pathlib import Path
from typing import List

import pytest

from ccr_forge.cli import EXIT_FAILED, EXIT_INPUT_ERROR, EXIT_OK, main
from tests.fixtures.pairs import spec_path, spec_text


def _shift_operator(step: int) -> List[List[List[float]]]:
    """Z₃ translation by step on C(Z₃), entries as [re, im] pairs."""
    return [
        [[1.0 if row == (col + step) % 3 else 0.0, 0.0] for col in range(3)] for row in range(3)
    ]


def _write(tmp_path: Path, name: str, text: str) -> str:
    target = tmp_path / name
    target.write_text(text, encoding="utf-8")
    return str(target)


class TestMain:
    """Exit codes and output of ccr-forge."""

    def test_check_passes(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = main(["check", str(spec_path("klein-example2.json"))])

        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "multiplier [PASS]" in out
        assert "check: PASSED" in out

    def test_norm_json(self, capsys: pytest.CaptureFixture[str]) -> None:
        path = str(spec_path("klein-example2.json"))

        code = main(["norm", path, "--element", "Wi_plus_Wj", "--json"])

        assert code == EXIT_OK
        result = json.loads(capsys.readouterr().out)
        assert result["results"]["cstar"] == pytest.approx(math.sqrt(2.0), abs=1e-8)

    def test_norm_without_element_is_input_error(self) -> None:
        assert main(["norm", str(spec_path("klein-example2.json"))]) == EXIT_INPUT_ERROR

    def test_roundtrip(self) -> None:
        assert main(["roundtrip", str(spec_path("cyclic3-trivial.json"))]) == EXIT_OK

    def test_build_writes_output(self, tmp_path: Path) -> None:
        target = tmp_path / "structure.json"

        code = main(["build", str(spec_path("example1-alpha.json")), "--out", str(target)])

        assert code == EXIT_OK
        document = json.loads(target.read_text(encoding="utf-8"))
        assert document["format"] == "ccr-forge/structure-constants"

    def test_weyl_extra_word(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = main(
            ["weyl", str(spec_path("z5sq-bicharacter.json")), "--word", "4,4;1,1", "--json"]
        )

        assert code == EXIT_OK
        words = json.loads(capsys.readouterr().out)["results"]["words"]
        assert words[-1]["word"] == "4,4;1,1"

    def test_spacetime(self) -> None:
        assert main(["spacetime", str(spec_path("spacetime-demo.json"))]) == EXIT_OK

    def test_failed_check_exits_one(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        document = json.loads(spec_text("klein-example2.json"))
        document["twisting"]["xi"] = document["twisting"]["xi"][1:]
        path = _write(tmp_path, "mutated.json", json.dumps(document))

        assert main(["check", path]) == EXIT_FAILED
        assert "FAILED (multiplier)" in capsys.readouterr().out

    def test_failed_build_prints_report(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        document = json.loads(spec_text("klein-example2.json"))
        document["twisting"]["xi"] = document["twisting"]["xi"][1:]
        path = _write(tmp_path, "mutated.json", json.dumps(document))

        assert main(["build", path, "--json"]) == EXIT_FAILED
        output = json.loads(capsys.readouterr().out)
        assert output["passed"] is False
        assert output["reports"][0]["title"] == "multiplier"

    def test_syntax_error_is_input_error(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "broken.json", '{"group": {"kind": "klein"},')

        assert main(["check", path]) == EXIT_INPUT_ERROR

    def test_schema_error_is_input_error(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "bad.json", '{"group": {"kind": "klein"}}')

        assert main(["check", path]) == EXIT_INPUT_ERROR

    def test_missing_file_is_input_error(self, tmp_path: Path) -> None:
        assert main(["check", str(tmp_path / "absent.json")]) == EXIT_INPUT_ERROR

    def test_bad_word_is_input_error(self) -> None:
        code = main(["weyl", str(spec_path("z5sq-bicharacter.json")), "--word", "1,x"])

        assert code == EXIT_INPUT_ERROR

    def test_unknown_command_rejected_by_parser(self) -> None:
        with pytest.raises(SystemExit):
            main(["plot", str(spec_path("klein-example2.json"))])

    def test_tolerance_and_seed_flags(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = main(
            ["check", str(spec_path("cyclic3-trivial.json")), "--tol", "1e-8", "--seed", "5"]
            + ["--json"]
        )

        assert code == EXIT_OK
        metadata = json.loads(capsys.readouterr().out)["metadata"]
        assert metadata["random_seed"] == 5
        assert metadata["settings"]["tolerance"] == 1e-8

    @pytest.mark.parametrize("command", ["check", "norm", "build"])
    def test_swapped_operator_table_exits_one(
        self, command: str, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        document = {
            "group": {"kind": "cyclic", "n": 3},
            "algebra": {"blocks": [1]},
            "twisting": {
                "kind": "action",
                "operators": [_shift_operator(0), _shift_operator(2), _shift_operator(1)],
            },
            "elements": {"f": [{"at": 1, "value": [[[[1.0, 0.0]]]]}]},
        }
        path = _write(tmp_path, "swapped.json", json.dumps(document))

        assert main([command, path, "--json"]) == EXIT_FAILED
        output = json.loads(capsys.readouterr().out)
        assert output["passed"] is False
        assert any(r["title"] == "action" and not r["passed"] for r in output["reports"])

    def test_check_spacetime_uses_extra_word(self) -> None:
        path = str(spec_path("spacetime-demo.json"))

        assert main(["check", path, "--word", "1,0,0,0;0,0,1,0"]) == EXIT_OK
        assert main(["check", path, "--word", "1,0"]) == EXIT_INPUT_ERROR
