import json

import numpy as np
import pytest

from kohsurvey import analysis
from kohsurvey.cli import RunConfig, UsageError, main

from conftest import TINY4_CSV

TRAIN_FILES = ("model.json", "assignment.json", "deviations.json", "map.txt", "map.svg")


@pytest.fixture
def tiny4_csv(tmp_path):
    path = tmp_path / "tiny4.csv"
    path.write_text(TINY4_CSV)
    return path


@pytest.fixture
def planted_csv(tmp_path):
    ds = analysis.generate_synthetic(analysis.SyntheticSpec(3, 20, 5, 3, 0.9, seed=2))
    names = [q.name for q in ds.questions]
    lines = [",".join(["id", *names])]
    for i, row in zip(ds.individual_ids, ds.answers):
        lines.append(",".join([i, *(ds.questions[q].modalities[a] for q, a in enumerate(row))]))
    path = tmp_path / "planted.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


def read_all(folder, names):
    return {name: (folder / name).read_bytes() for name in names}


class TestTrain:
    def test_outputs_and_reruns(self, tiny4_csv, tmp_path):
        args = ["train", "--input", str(tiny4_csv), "--has-id", "--topology", "grid:2x2", "--seed", "3"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        a, b = read_all(tmp_path / "a", TRAIN_FILES), read_all(tmp_path / "b", TRAIN_FILES)
        assert a == b
        assignment = json.loads(a["assignment.json"])
        assert sorted(assignment["individuals"]) == ["i1", "i2", "i3", "i4"]
        assert sorted(assignment["modalities"]) == ["A1", "A2", "B1", "B2"]
        assert all(0 <= u < 4 for u in assignment["individuals"].values())

    def test_seed_changes_model(self, tiny4_csv, tmp_path):
        for seed in ("1", "2"):
            main(["train", "--input", str(tiny4_csv), "--has-id", "--seed", seed,
                  "--out", str(tmp_path / seed)])
        assert (tmp_path / "1" / "model.json").read_bytes() != (tmp_path / "2" / "model.json").read_bytes()

    def test_json_is_canonical(self, tiny4_csv, tmp_path):
        main(["train", "--input", str(tiny4_csv), "--has-id", "--out", str(tmp_path)])
        for name in ("model.json", "assignment.json", "deviations.json"):
            text = (tmp_path / name).read_text()
            assert json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n" == text

    def test_svg_has_no_timestamp(self, tiny4_csv, tmp_path):
        main(["train", "--input", str(tiny4_csv), "--has-id", "--out", str(tmp_path)])
        svg = (tmp_path / "map.svg").read_text()
        assert svg.lstrip().startswith("<?xml")
        assert "<dc:date>" not in svg

    def test_map_strip(self, tiny4_csv, tmp_path):
        assert main(["train", "--input", str(tiny4_csv), "--has-id", "--topology", "line:6",
                     "--breakdown", "Q1", "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "map.txt").read_text().splitlines()
        assert lines[0].count("+") == 7 and lines[0] == lines[-1]
        cells = [c.strip() for c in lines[-2].strip("|").split("|")]
        sizes = [int(c.split()[0]) for c in cells]
        assert sum(sizes) == 4
        for c in cells:
            size, rest = c.split(" ", 1)
            a, b = (int(x) for x in rest.strip(" ()").split(","))
            assert a + b == int(size)
        labels = {w for line in lines[1:-2] for w in line.replace("|", " ").split()}
        assert labels == {"A1", "A2", "B1", "B2"}

    def test_star_modality(self, tiny4_csv, tmp_path):
        main(["train", "--input", str(tiny4_csv), "--has-id", "--topology", "line:6",
              "--star-modality", "A1", "--out", str(tmp_path)])
        text = (tmp_path / "map.txt").read_text()
        # A1 is held by half the sample, so starred cells hold only A1 holders
        assignment = json.loads((tmp_path / "assignment.json").read_text())
        units_of_a1 = {assignment["individuals"][i] for i in ("i1", "i2")}
        units_of_a2 = {assignment["individuals"][i] for i in ("i3", "i4")}
        starred = units_of_a1 - units_of_a2
        assert text.count(" *") == len(starred)

    def test_unknown_question(self, tiny4_csv, tmp_path, capsys):
        code = main(["train", "--input", str(tiny4_csv), "--has-id", "--breakdown", "Q9",
                     "--out", str(tmp_path)])
        assert code == 2
        assert "Q9" in capsys.readouterr().err


class TestErrors:
    def test_missing_file(self, tmp_path, capsys):
        missing = tmp_path / "nope.csv"
        assert main(["train", "--input", str(missing), "--out", str(tmp_path)]) == 2
        assert str(missing) in capsys.readouterr().err

    def test_missing_answer(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("Q1,Q2\na,b\na,\n")
        assert main(["mca", "--input", str(path), "--out", str(tmp_path)]) == 2
        err = capsys.readouterr().err
        assert "row 2" in err and "Q2" in err

    def test_bad_topology(self, tiny4_csv, tmp_path):
        assert main(["train", "--input", str(tiny4_csv), "--topology", "hex:3",
                     "--out", str(tmp_path)]) == 2

    def test_bad_schedule(self, tiny4_csv, tmp_path):
        assert main(["train", "--input", str(tiny4_csv), "--eps0", "2",
                     "--out", str(tmp_path)]) == 2

    def test_unused_fail_policy(self, tmp_path):
        # a CSV cannot declare an unused modality, so FAIL never triggers here
        path = tmp_path / "ok.csv"
        path.write_text("Q1,Q2\na,x\nb,y\n")
        assert main(["mca", "--input", str(path), "--unused-policy", "fail", "--out", str(tmp_path)]) == 0

    def test_degenerate_mca(self, tmp_path):
        path = tmp_path / "flat.csv"
        path.write_text("Q1,Q2\nx,y\nx,y\n")
        assert main(["mca", "--input", str(path), "--out", str(tmp_path)]) == 1

    def test_config_validation(self):
        with pytest.raises(UsageError):
            RunConfig(iters_mult=0)


class TestMCA:
    def test_tiny4(self, tiny4_csv, tmp_path):
        assert main(["mca", "--input", str(tiny4_csv), "--has-id", "--out", str(tmp_path)]) == 0
        eig = json.loads((tmp_path / "eigenvalues.json").read_text())
        np.testing.assert_allclose(eig["raw"], [1, 0.5, 0.5, 0], rtol=0, atol=1e-10)
        assert eig["n_axes_kept"] == 2
        assert (tmp_path / "mca.svg").exists() and (tmp_path / "mca.json").exists()


class TestCompare:
    def test_report(self, planted_csv, tmp_path):
        args = ["compare", "--input", str(planted_csv), "--has-id", "--topology", "grid:3x3"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        files = ("report.json", "report.txt", "report.svg")
        assert read_all(tmp_path / "a", files) == read_all(tmp_path / "b", files)
        report = json.loads((tmp_path / "a" / "report.json").read_text())
        assert [r["method"] for r in report["methods"]] == ["KDISJ", "MCA", "MCA+AHC", "MCA+Kohonen"]
        assert report["methods"][1]["negative_deviations"] is None
        assert len((tmp_path / "a" / "report.txt").read_text().splitlines()) == 6


class TestRender:
    def test_matches_train(self, tiny4_csv, tmp_path):
        opts = ["--topology", "line:6", "--breakdown", "Q2", "--star-modality", "B1"]
        main(["train", "--input", str(tiny4_csv), "--has-id", "--out", str(tmp_path / "t"), *opts])
        assert main(["render", str(tmp_path / "t" / "model.json"), "--out", str(tmp_path / "r"),
                     "--breakdown", "Q2", "--star-modality", "B1"]) == 0
        assert (tmp_path / "t" / "map.txt").read_text() == (tmp_path / "r" / "map.txt").read_text()
        assert (tmp_path / "t" / "map.svg").read_bytes() == (tmp_path / "r" / "map.svg").read_bytes()

    def test_missing_model(self, tmp_path):
        assert main(["render", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2
