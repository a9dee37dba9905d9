import numpy as np
import pytest

from secregion import (
    ChannelPair,
    ChannelParseError,
    RunConfig,
    load_channels,
    run,
    solve_wiretap,
    write_channels,
)
from secregion.cli import main


def write_text(path, text):
    path.write_text(text, encoding="utf-8")


@pytest.fixture
def ch22_file(tmp_path):
    path = tmp_path / "ch22.txt"
    write_text(path, "2 2 2\n0.3 2.5\n2.2 1.8\n1.3 1.2\n1.5 3.9\n")
    return str(path)


class TestLoadChannels:
    def test_matrix_file(self, ch22_file):
        ch = load_channels(ch22_file)
        assert np.array_equal(ch.h1, [[0.3, 2.5], [2.2, 1.8]])
        assert np.array_equal(ch.h2, [[1.3, 1.2], [1.5, 3.9]])

    def test_row_vector_file(self, tmp_path):
        path = tmp_path / "vec.txt"
        write_text(path, "1 1 2\n1 0.4\n0.4 1\n")
        ch = load_channels(str(path))
        assert ch.n1 == 1 and ch.n2 == 1 and ch.nt == 2
        assert np.array_equal(ch.h1, [[1.0, 0.4]])

    def test_row_length_mismatch(self, tmp_path):
        path = tmp_path / "bad.txt"
        write_text(path, "1 1 2\n1 0.4 9\n0.4 1\n")
        with pytest.raises(ChannelParseError) as err:
            load_channels(str(path))
        assert err.value.line_no == 2

    def test_non_numeric_token(self, tmp_path):
        path = tmp_path / "bad.txt"
        write_text(path, "1 1 2\n1 x\n0.4 1\n")
        with pytest.raises(ChannelParseError) as err:
            load_channels(str(path))
        assert err.value.line_no == 2

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        write_text(path, "2 2\n1 1\n")
        with pytest.raises(ChannelParseError) as err:
            load_channels(str(path))
        assert err.value.line_no == 1

    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        ch = ChannelPair(rng.standard_normal((2, 3)), rng.standard_normal((1, 3)))
        path = tmp_path / "rt.txt"
        write_channels(ch, str(path))
        back = load_channels(str(path))
        assert np.array_equal(back.h1, ch.h1)
        assert np.array_equal(back.h2, ch.h2)


class TestRun:
    def test_tdma_zero_power(self, ch22_file, tmp_path):
        out = tmp_path / "out.csv"
        cfg = RunConfig(
            channels=ch22_file,
            scenario="A",
            method="tdma",
            power=0.0,
            out=str(out),
        )
        assert run(cfg) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "r0,r1,r2,order,alpha0,alpha1,alpha2"
        assert lines[1].startswith("0,0,0,na,")
        assert (tmp_path / "out.csv.meta").exists()

    def test_wsr_with_common_is_usage_error(self, ch22_file, tmp_path, capsys):
        cfg = RunConfig(
            channels=ch22_file,
            scenario="A",
            method="wsr",
            power=1.0,
            out=str(tmp_path / "o.csv"),
            common=True,
        )
        assert run(cfg) == 2
        assert "common" in capsys.readouterr().err

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        cfg = RunConfig(
            channels=str(tmp_path / "nope.txt"),
            scenario="A",
            method="tdma",
            power=1.0,
            out=str(tmp_path / "o.csv"),
        )
        assert run(cfg) == 1

    def test_ps_endpoint_matches_wiretap(self, ch22_file, tmp_path):
        out = tmp_path / "ps.csv"
        cfg = RunConfig(
            channels=ch22_file,
            scenario="C",
            method="ps",
            power=12.0,
            out=str(out),
            common=False,
            eps1=0.5,
        )
        assert run(cfg) == 0
        rows = out.read_text().strip().splitlines()[1:]
        max_r1 = max(float(r.split(",")[1]) for r in rows)
        ch = load_channels(ch22_file)
        ref = solve_wiretap(ch.h1, ch.h2, 12.0).rate
        assert max_r1 == pytest.approx(ref, abs=1e-6)
        # power-split rows carry their fractions and hold valid rate values
        top = max(rows, key=lambda r: float(r.split(",")[1])).split(",")
        assert top[4] != "" and top[5] != "" and top[6] != ""
        for row in rows:
            r0, r1, r2 = (float(tok) for tok in row.split(",")[:3])
            assert np.isfinite([r0, r1, r2]).all()
            assert min(r0, r1, r2) >= 0.0

    def test_oracle_determinism_byte_identical(self, ch22_file, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            cfg = RunConfig(
                channels=ch22_file,
                scenario="B",
                method="oracle",
                power=5.0,
                out=str(out),
                common=False,
                samples=400,
                seed=11,
            )
            assert run(cfg) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_main_argv(self, ch22_file, tmp_path):
        out = tmp_path / "m.csv"
        code = main(
            [
                "--channels",
                ch22_file,
                "--scenario",
                "A",
                "--common",
                "off",
                "--method",
                "oma",
                "--power",
                "2.0",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert out.exists()
