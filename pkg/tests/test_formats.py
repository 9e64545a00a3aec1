import math

import numpy as np
import pytest

from glovekit import formats
from glovekit.calibration import CalibrationProfile, CouplingMap, default_coupling_map
from glovekit.emulator import ChannelWaveform, EmulatorConfig
from glovekit.errors import FormatError
from glovekit.model import BasisConfig, Demonstration, train_model


@pytest.fixture
def profile():
    return CalibrationProfile(
        (100.0, 110.0, 120.0, 130.0, 140.0),
        (900.0, 910.0, 920.0, 930.0, 940.0),
        (0.0,) * 5,
        (math.pi / 2,) * 5,
    )


def roundtrip_bytes(path):
    return path.read_bytes()


class TestProfileFormat:
    def test_round_trip(self, tmp_path, profile):
        path = tmp_path / "cal.txt"
        formats.save_profile(profile, path)
        assert path.read_text().startswith("calib-v1\n")
        assert formats.load_profile(path) == profile

    def test_write_read_write_identical(self, tmp_path, profile):
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        formats.save_profile(profile, p1)
        formats.save_profile(formats.load_profile(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("channel 1 0 1 0 1\n")
        with pytest.raises(FormatError):
            formats.load_profile(path)

    def test_missing_channel(self, tmp_path, profile):
        path = tmp_path / "cal.txt"
        formats.save_profile(profile, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(FormatError):
            formats.load_profile(path)


class TestCouplingFormat:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "coupling.txt"
        formats.save_coupling(default_coupling_map(), path)
        loaded = formats.load_coupling(path)
        assert np.array_equal(loaded.weights, default_coupling_map().weights)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "coupling.txt"
        path.write_text("coupling-v1\n")
        with pytest.raises(FormatError):
            formats.load_coupling(path)


class TestDemoFormat:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        demo = Demonstration(rng.normal(0.5, 0.2, (40, 3)), 0.005)
        path = tmp_path / "demo.txt"
        formats.save_demo(demo, path)
        loaded, labels = formats.load_demo(path)
        assert np.array_equal(loaded.values, demo.values)
        assert loaded.dt == demo.dt
        assert labels == ["j01", "j02", "j03"]

    def test_write_read_write_identical(self, tmp_path):
        demo = Demonstration(np.random.default_rng(0).normal(size=(25, 2)), 0.01)
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        formats.save_demo(demo, p1)
        formats.save_demo(formats.load_demo(p1)[0], p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_rejects_nonincreasing_time(self, tmp_path):
        path = tmp_path / "demo.txt"
        path.write_text("demo-v1\nD 1\ndt 0.01\njoints j01\n0.0 1.0\n0.0 2.0\n")
        with pytest.raises(FormatError):
            formats.load_demo(path)

    def test_rejects_short_file(self, tmp_path):
        path = tmp_path / "demo.txt"
        path.write_text("demo-v1\nD 1\ndt 0.01\njoints j01\n0.0 1.0\n")
        with pytest.raises(FormatError):
            formats.load_demo(path)

    def test_rejects_wrong_field_count(self, tmp_path):
        path = tmp_path / "demo.txt"
        path.write_text("demo-v1\nD 2\ndt 0.01\njoints j01 j02\n0.0 1.0\n0.01 1.0 2.0\n")
        with pytest.raises(FormatError):
            formats.load_demo(path)


class TestModelFormat:
    @pytest.fixture
    def model(self):
        rng = np.random.default_rng(9)
        t = np.linspace(0, 1, 80)
        demos = [
            Demonstration(
                np.column_stack([np.sin(2 * np.pi * t), np.cos(np.pi * t)])
                + rng.normal(0, 0.02, (80, 2)),
                0.01,
            )
            for _ in range(2)
        ]
        return train_model(demos, BasisConfig(K=7))

    def test_round_trip_exact(self, tmp_path, model):
        path = tmp_path / "model.txt"
        formats.save_model(model, path)
        loaded = formats.load_model(path)
        assert np.array_equal(loaded.mu_w, model.mu_w)
        assert np.array_equal(loaded.sigma_w, model.sigma_w)
        assert np.array_equal(loaded.sigma_y, model.sigma_y)
        assert loaded.basis == model.basis
        assert loaded.eps_reg == model.eps_reg

    def test_write_read_write_identical(self, tmp_path, model):
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        formats.save_model(model, p1)
        formats.save_model(formats.load_model(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_covariance_rejected(self, tmp_path, model):
        path = tmp_path / "model.txt"
        formats.save_model(model, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-2]) + "\n" + lines[-1] + "\n")
        with pytest.raises(FormatError):
            formats.load_model(path)


class TestTactileFormat:
    def test_round_trip(self, tmp_path):
        times = np.array([0.0, 0.1, 0.2])
        forces = np.array([[0.0] * 5, [1.0, 0, 0, 0, 0.5], [2.0] * 5])
        path = tmp_path / "tactile.txt"
        formats.save_tactile(times, forces, path)
        t2, f2 = formats.load_tactile(path)
        assert np.array_equal(t2, times)
        assert np.array_equal(f2, forces)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "tactile.txt"
        path.write_text("tactile-v1\n")
        with pytest.raises(FormatError):
            formats.load_tactile(path)


class TestEmulatorConfigFormat:
    def test_round_trip(self, tmp_path):
        cfg = EmulatorConfig(
            rate=350.0,
            channels=tuple(
                ChannelWaveform(500.0 + i, 100.0, 0.1 * (i + 1), 0.2 * i) for i in range(5)
            ),
            noise_std=4.0,
            seed=77,
        )
        path = tmp_path / "emu.txt"
        formats.save_emulator_config(cfg, path)
        assert formats.load_emulator_config(path) == cfg

    def test_defaults_when_keys_absent(self, tmp_path):
        path = tmp_path / "emu.txt"
        path.write_text("emu-v1\nrate 350\n")
        cfg = formats.load_emulator_config(path)
        assert cfg.rate == 350.0
        assert cfg.channels[0].offset == 512.0

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "emu.txt"
        path.write_text("emu-v1\nbogus 1\n")
        with pytest.raises(FormatError):
            formats.load_emulator_config(path)


class TestResultCsvs:
    def test_tracking_csv_layout(self, tmp_path):
        reference = np.array([[0.0, 1.0], [0.1, 1.1]])
        executed = np.array([[0.0, 1.0], [0.05, 1.2]])
        path = tmp_path / "tracking.csv"
        formats.save_tracking_csv(path, reference, executed, 200.0)
        lines = path.read_text().splitlines()
        assert lines[0] == "time,j01_ref,j01_exec,j01_err,j02_ref,j02_exec,j02_err"
        cells = lines[2].split(",")
        assert float(cells[0]) == pytest.approx(0.005)
        assert float(cells[3]) == pytest.approx(-0.05)

    def test_bands_csv_layout(self, tmp_path):
        times = [0.0, 0.01]
        mean = np.array([[0.5], [0.6]])
        std = np.array([[0.1], [0.1]])
        demos = [np.array([[0.55], [0.62]]), np.array([[0.45], [0.58]])]
        path = tmp_path / "bands.csv"
        formats.save_bands_csv(path, times, mean, std, demos)
        lines = path.read_text().splitlines()
        assert lines[0] == "time,j01_mean,j01_std,j01_demo1,j01_demo2"
        assert len(lines) == 3
