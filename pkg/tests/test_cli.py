import xml.etree.ElementTree as ET

import numpy as np
import pytest

from bandclust import to_dense
from bandclust.band import write_dense_csv
from bandclust.cli import main
from conftest import random_band

M3_CSV = "1,0.5,0\n0.5,1,0.2\n0,0.2,1\n"


@pytest.fixture
def m3_csv(tmp_path):
    path = tmp_path / "m3.csv"
    path.write_text(M3_CSV)
    return str(path)


def run(argv):
    return main(argv)


class TestCluster:
    def test_m3_dense(self, m3_csv, tmp_path, capsys):
        out = str(tmp_path / "run")
        assert run(["cluster", m3_csv, "--format", "dense", "--band", "2",
                    "--out", out]) == 0
        lines = (tmp_path / "run.merges.txt").read_text().splitlines()
        assert lines[0] == "-1 -2 0.5"
        assert lines[1].startswith("1 -3 1.0333333333")
        manifest = (tmp_path / "run.manifest.txt").read_text()
        assert "p=3" in manifest and "h=2" in manifest
        heights = (tmp_path / "run.heights.txt").read_text().splitlines()
        assert heights[0] == "0.5"

    def test_band_zero_is_usage_error(self, m3_csv, tmp_path):
        assert run(["cluster", m3_csv, "--band", "0",
                    "--out", str(tmp_path / "x")]) == 2

    def test_missing_band_is_usage_error(self, m3_csv, tmp_path):
        assert run(["cluster", m3_csv, "--out", str(tmp_path / "x")]) == 2

    def test_single_sample_genotype_is_bad_input(self, tmp_path):
        geno = tmp_path / "g.csv"
        geno.write_text("0,1,2\n")
        assert run(["cluster", str(geno), "--format", "genotype", "--band", "2",
                    "--out", str(tmp_path / "x")]) == 3

    def test_nan_is_numeric_failure(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,nan\nnan,1\n")
        assert run(["cluster", str(bad), "--band", "2",
                    "--out", str(tmp_path / "x")]) == 4

    def test_missing_file_is_bad_input(self, tmp_path):
        assert run(["cluster", str(tmp_path / "nope.csv"), "--band", "2",
                    "--out", str(tmp_path / "x")]) == 3

    def test_naive_matches_fast(self, tmp_path):
        rng = np.random.default_rng(0)
        m = random_band(30, 6, rng)
        src = tmp_path / "m.csv"
        write_dense_csv(to_dense(m), src)
        assert run(["cluster", str(src), "--band", "6",
                    "--out", str(tmp_path / "fast")]) == 0
        assert run(["cluster", str(src), "--band", "6", "--engine", "naive",
                    "--out", str(tmp_path / "naive")]) == 0
        fast = (tmp_path / "fast.merges.txt").read_text()
        naive = (tmp_path / "naive.merges.txt").read_text()
        assert fast == naive

    def test_coo_and_hic_formats(self, tmp_path):
        coo = tmp_path / "m.coo"
        coo.write_text("1 1 1\n2 2 1\n3 3 1\n1 2 0.5\n2 3 0.2\n")
        assert run(["cluster", str(coo), "--format", "coo", "--band", "2",
                    "--out", str(tmp_path / "coo_run")]) == 0
        hic = tmp_path / "m.hic"
        hic.write_text("1 1 0\n2 2 0\n3 3 0\n1 2 3\n2 3 1\n")
        assert run(["cluster", str(hic), "--format", "hic", "--band", "2",
                    "--out", str(tmp_path / "hic_run")]) == 0

    def test_lambda_shifts_heights(self, m3_csv, tmp_path):
        run(["cluster", m3_csv, "--band", "2", "--out", str(tmp_path / "a")])
        run(["cluster", m3_csv, "--band", "2", "--lambda", "1",
             "--out", str(tmp_path / "b")])
        ha = [float(x.split()[2]) for x in
              (tmp_path / "a.merges.txt").read_text().splitlines()]
        hb = [float(x.split()[2]) for x in
              (tmp_path / "b.merges.txt").read_text().splitlines()]
        assert hb == pytest.approx([x + 1 for x in ha])

    def test_rerun_from_manifest_byte_identical(self, m3_csv, tmp_path):
        out1 = str(tmp_path / "r1")
        run(["cluster", m3_csv, "--band", "2", "--out", out1])
        out2 = str(tmp_path / "r2")
        assert run(["cluster", "--from-manifest", out1 + ".manifest.txt",
                    "--out", out2]) == 0
        assert ((tmp_path / "r1.merges.txt").read_bytes()
                == (tmp_path / "r2.merges.txt").read_bytes())


class TestSelect:
    @pytest.fixture
    def block_run(self, tmp_path):
        a = np.zeros((50, 50))
        for b in range(5):
            a[b * 10:(b + 1) * 10, b * 10:(b + 1) * 10] = 0.9
        np.fill_diagonal(a, 1.0)
        src = tmp_path / "blocks.csv"
        write_dense_csv(a, src)
        out = str(tmp_path / "blocks")
        run(["cluster", str(src), "--band", "50", "--out", out])
        return out + ".merges.txt"

    def test_broken_stick_k5(self, block_run, tmp_path, capsys):
        assert run(["select", block_run, "--method", "broken-stick",
                    "--out", str(tmp_path / "lab.txt")]) == 0
        assert capsys.readouterr().out.strip() == "K=5"
        labels = (tmp_path / "lab.txt").read_text().splitlines()
        assert len(labels) == 50
        assert labels[0] == "1 1" and labels[-1] == "50 5"

    def test_slope_k5(self, block_run, tmp_path, capsys):
        assert run(["select", block_run, "--method", "slope", "--kmax", "20",
                    "--out", str(tmp_path / "lab.txt")]) == 0
        assert capsys.readouterr().out.strip() == "K=5"

    def test_kmax_one_is_usage_error(self, block_run, tmp_path):
        assert run(["select", block_run, "--method", "slope",
                    "--kmax", "1"]) == 2

    def test_p2_dendrogram(self, tmp_path, capsys):
        merges = tmp_path / "two.txt"
        merges.write_text("-1 -2 0.7\n")
        assert run(["select", str(merges), "--method", "broken-stick",
                    "--out", str(tmp_path / "lab.txt")]) == 0
        out = capsys.readouterr().out.strip()
        assert out in ("K=1", "K=2")

    def test_unreadable_merge_table(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a merge table\n")
        assert run(["select", str(bad)]) == 3


class TestCompare:
    def test_same_file_twice(self, m3_csv, tmp_path, capsys):
        out = str(tmp_path / "r")
        run(["cluster", m3_csv, "--band", "2", "--out", out])
        assert run(["compare", out + ".merges.txt", out + ".merges.txt"]) == 0
        stdout = capsys.readouterr().out
        assert "first_diff=1" in stdout and "bakers_gamma=1" in stdout

    def test_bandwidths_compared(self, m3_csv, tmp_path, capsys):
        run(["cluster", m3_csv, "--band", "2", "--out", str(tmp_path / "h2")])
        run(["cluster", m3_csv, "--band", "1", "--out", str(tmp_path / "h1")])
        assert run(["compare", str(tmp_path / "h2.merges.txt"),
                    str(tmp_path / "h1.merges.txt")]) == 0
        fd = float(capsys.readouterr().out.split("first_diff=")[1].split()[0])
        assert 0.0 <= fd <= 1.0

    def test_p_mismatch(self, tmp_path):
        a = tmp_path / "a.txt"
        a.write_text("-1 -2 0.5\n")
        b = tmp_path / "b.txt"
        b.write_text("-1 -2 0.5\n1 -3 0.9\n")
        assert run(["compare", str(a), str(b)]) == 3

    def test_labels_ari(self, tmp_path, capsys):
        a = tmp_path / "a.txt"
        a.write_text("-1 -2 0.5\n1 -3 0.9\n")
        la = tmp_path / "la.txt"
        la.write_text("1 1\n2 1\n3 2\n")
        assert run(["compare", str(a), str(a), "--labels", str(la), str(la),
                    "--raw-rand"]) == 0
        stdout = capsys.readouterr().out
        assert "ari=1" in stdout and "rand=1" in stdout


class TestBench:
    def test_two_cells(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert run(["bench", "--p-list", "64,128", "--h-list", "8",
                    "--reps", "2", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "p,h,engine,backend,wall_time,peak_entries,heap_max"
        assert len(lines) == 3
        p, h, eng, backend, wall, entries, heap_max = lines[1].split(",")
        assert (int(p), int(h)) == (64, 8)
        assert int(entries) == 2 * 64 * 8
        assert int(heap_max) <= 3 * 64

    def test_reps_zero_is_usage_error(self):
        assert run(["bench", "--p-list", "64", "--h-list", "8",
                    "--reps", "0"]) == 2

    def test_empty_list_is_usage_error(self):
        assert run(["bench", "--p-list", "", "--h-list", "8"]) == 2


class TestPlot:
    def test_txt(self, m3_csv, tmp_path, capsys):
        out = str(tmp_path / "r")
        run(["cluster", m3_csv, "--band", "2", "--out", out])
        assert run(["plot", out + ".merges.txt", "--format", "txt"]) == 0
        text = capsys.readouterr().out
        assert text.count("merge") == 2

    def test_svg_with_matrix(self, m3_csv, tmp_path):
        out = str(tmp_path / "r")
        run(["cluster", m3_csv, "--band", "2", "--out", out])
        svg_path = tmp_path / "d.svg"
        assert run(["plot", out + ".merges.txt", "--format", "svg",
                    "--matrix", m3_csv, "--band", "2",
                    "--out", str(svg_path)]) == 0
        root = ET.fromstring(svg_path.read_text())
        assert root.tag.endswith("svg")

    def test_single_leaf(self, tmp_path, capsys):
        merges = tmp_path / "empty.txt"
        merges.write_text("")
        assert run(["plot", str(merges), "--format", "txt"]) == 0
        assert capsys.readouterr().out == "leaf 1\n"

    def test_unreadable(self, tmp_path):
        assert run(["plot", str(tmp_path / "nope.txt")]) == 3
