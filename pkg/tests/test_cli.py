import numpy as np
import pytest

from qalpha.cli import main
from qalpha.imageio import read_image, write_image
from conftest import random_raster


@pytest.fixture
def small_ppm(tmp_path, rng):
    path = tmp_path / "in.ppm"
    write_image(random_raster(rng, 16, 16), path)
    return path


def _manifest(path):
    out = {}
    for line in path.read_text().splitlines():
        key, _, value = line.partition(": ")
        out[key] = value
    return out


def test_enhance_identity(tmp_path, small_ppm):
    out = tmp_path / "out.ppm"
    assert main(["enhance", str(small_ppm), str(out)]) == 0
    np.testing.assert_array_equal(read_image(out).data, read_image(small_ppm).data)
    header = (tmp_path / "out.ppm.metrics.csv").read_text().splitlines()[0]
    assert header == "image,method,alpha,beta,lambda,post,ceme"
    manifest = _manifest(tmp_path / "out.ppm.manifest.txt")
    assert manifest["command"] == "enhance" and "wall_time" in manifest


def test_enhance_channel_mode_with_per_channel_params(tmp_path, small_ppm):
    out = tmp_path / "out.png"
    code = main(["enhance", str(small_ppm), str(out), "--method", "dft-channel",
                 "--alpha", "0.9", "--alpha-g", "0.8", "--post", "log", "--p", "2"])
    assert code == 0
    lines = (tmp_path / "out.png.metrics.csv").read_text().splitlines()
    assert lines[0].endswith("eme_r,eme_g,eme_b")
    assert len(lines) == 2


def test_enhance_save_quaternion_then_metric(tmp_path, small_ppm, capsys):
    out, npy = tmp_path / "out.ppm", tmp_path / "q.npy"
    args = ["enhance", str(small_ppm), str(out), "--alpha", "0.9", "--save-quaternion", str(npy)]
    assert main(args) == 0
    assert npy.exists()
    capsys.readouterr()
    assert main(["metric", str(npy), "--measure", "ceme"]) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header.endswith(",ceme") and float(row.split(",")[-1]) > 0


def test_metric_constant_image_is_zero(tmp_path, capsys):
    path = tmp_path / "flat.ppm"
    from qalpha.color_image import RasterImage

    write_image(RasterImage(np.full((16, 16, 3), 90.0)), path)
    assert main(["metric", str(path)]) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header == "image,method,alpha,beta,lambda,post,eme_r,eme_g,eme_b"
    assert [float(v) for v in row.split(",")[-3:]] == [0.0, 0.0, 0.0]


def test_sweep_writes_surface(tmp_path, small_ppm, capsys):
    out = tmp_path / "surface.csv"
    code = main(["sweep", str(small_ppm), "--fix", "lambda=0.5", "--vary", "alpha:0.8:1:0.1",
                 "--vary", "beta:0:1:0.5", "--blocks", "4x4", "-o", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[:2] == ["# fixed: lambda=0.5", "alpha,beta,metric"]
    assert len(lines) == 11
    assert "argmax metric: alpha=" in capsys.readouterr().out


def test_optimize_is_reproducible(tmp_path, small_ppm):
    out = tmp_path / "ga.csv"
    args = ["optimize", str(small_ppm), "-o", str(out), "--seed", "7", "--population", "8",
            "--generations", "4", "--blocks", "4x4"]
    assert main(args) == 0
    first_log = out.read_text()
    first = _manifest(tmp_path / "ga.csv.manifest.txt")
    assert main(args) == 0
    second = _manifest(tmp_path / "ga.csv.manifest.txt")
    assert out.read_text() == first_log
    for key in ("started", "wall_time"):
        first.pop(key), second.pop(key)
    assert first == second
    assert first["rng_seed"] == "7"


def test_compare_bundle(tmp_path, small_ppm):
    outdir = tmp_path / "bundle"
    assert main(["compare", str(small_ppm), str(outdir), "--alpha", "0.9", "--post", "log"]) == 0
    images = sorted(p.name for p in outdir.glob("*.ppm"))
    assert images == sorted(f"{n}.ppm" for n in ("original", "qdft", "channel", "gamma", "log", "histeq"))
    rows = (outdir / "metrics.csv").read_text().splitlines()
    assert rows[0] == "image,method,alpha,beta,lambda,post,ceme,eme_r,eme_g,eme_b"
    assert len(rows) == 7
    assert (outdir / "manifest.txt").exists()


def test_compare_picks_up_external_images(tmp_path, small_ppm, rng):
    outdir = tmp_path / "bundle"
    outdir.mkdir()
    write_image(random_raster(rng, 16, 16), outdir / "other.ppm")
    assert main(["compare", str(small_ppm), str(outdir)]) == 0
    rows = (outdir / "metrics.csv").read_text().splitlines()
    assert any(r.startswith("other,external,") for r in rows)


def test_histogram(tmp_path, small_ppm):
    out = tmp_path / "h.csv"
    assert main(["histogram", str(small_ppm), "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "bin,ch1,ch2,ch3" and len(lines) == 257


def test_exit_codes(tmp_path, small_ppm):
    out = str(tmp_path / "o.ppm")
    assert main(["enhance", str(tmp_path / "missing.ppm"), out]) == 2
    assert main(["enhance", str(small_ppm), out, "--alpha", "1.5"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["enhance"])
    assert info.value.code == 1
    bad = tmp_path / "bad.ppm"
    bad.write_bytes(b"not an image")
    assert main(["metric", str(bad)]) == 2
    assert main(["sweep", str(small_ppm), "--fix", "lambda=0.5", "--vary", "alpha:0.5:1:0.1", "-o", out]) == 1
    assert main(["metric", str(small_ppm), "--blocks", "32x32"]) == 1
