import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinkseg import imgio
from shrinkseg.decompose import IterationTrace, TraceRow
from shrinkseg.synth import Disk, PhantomSpec, Rect


class TestPGM:
    def test_round_half_up_quantization(self, tmp_path):
        path = tmp_path / "q.pgm"
        g = np.array([[0.0, 0.5], [1.0, 127.4999 / 255]])
        imgio.write_image(g, path)
        back = imgio.read_image(path)
        assert (back * 255).astype(int).tolist() == [[0, 128], [255, 127]]

    def test_write_clips_out_of_range(self, tmp_path):
        path = tmp_path / "c.pgm"
        imgio.write_image(np.array([[-0.5, 1.5], [0.0, 1.0]]), path)
        back = imgio.read_image(path)
        assert back.min() == 0.0 and back.max() == 1.0

    def test_binary_round_trip_exact_on_grid(self, tmp_path):
        path = tmp_path / "rt.pgm"
        levels = np.arange(256) / 255.0
        g = np.resize(levels, (16, 16))
        imgio.write_image(g, path)
        np.testing.assert_allclose(imgio.read_image(path), g, atol=1e-12)

    def test_plain_text_with_comments_and_16bit(self, tmp_path):
        path = tmp_path / "p2.pgm"
        path.write_text("P2 # inline\n# banner\n2 2\n65535\n0 32768\n65535 1\n")
        g = imgio.read_image(path)
        assert g[0, 0] == 0.0 and g[0, 1] == pytest.approx(32768 / 65535)
        assert g[1, 0] == 1.0

    def test_rejects_non_square(self, tmp_path):
        path = tmp_path / "ns.pgm"
        path.write_text("P2\n3 2\n255\n0 0 0\n0 0 0\n")
        with pytest.raises(ValueError):
            imgio.read_image(path)

    def test_rejects_sample_above_maxval(self, tmp_path):
        path = tmp_path / "ov.pgm"
        path.write_text("P2\n2 2\n255\n0 0\n0 300\n")
        with pytest.raises(ValueError):
            imgio.read_image(path)

    def test_rejects_unknown_magic(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_text("P7\n2 2\n255\n0 0 0 0\n")
        with pytest.raises(ValueError):
            imgio.read_image(path)

    def test_written_file_is_binary_p5(self, tmp_path):
        path = tmp_path / "b.pgm"
        imgio.write_image(np.zeros((4, 4)), path)
        assert path.read_bytes().startswith(b"P5")


class TestFloatGrid:
    def test_round_trip_preserves_every_bit(self, tmp_path):
        path = tmp_path / "g.csv"
        g = np.array([[1e-308, 1.0 + 2**-52], [math.pi, -0.0]])
        imgio.write_float_grid(g, path)
        back = imgio.read_float_grid(path)
        assert back.tobytes() == g.tobytes()

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_round_trip_random(self, tmp_path_factory, seed):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((5, 5)) * 10.0 ** rng.integers(-12, 12)
        path = tmp_path_factory.mktemp("grids") / "g.csv"
        imgio.write_float_grid(g, path)
        assert np.array_equal(imgio.read_float_grid(path), g)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ValueError):
            imgio.read_float_grid(path)

    def test_parse_error_names_position(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ValueError, match="row 2"):
            imgio.read_float_grid(path)


class TestLabels:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "l.csv"
        labels = np.array([[1, 2], [3, 1]], dtype=np.int64)
        imgio.write_labels(labels, path)
        back = imgio.read_labels(path)
        assert back.dtype == np.int64
        np.testing.assert_array_equal(back, labels)

    def test_label_image_spreads_levels(self):
        labels = np.array([[1, 2], [3, 3]], dtype=np.int64)
        img = imgio.label_image(labels, 3)
        np.testing.assert_allclose(img, [[1 / 3, 2 / 3], [1.0, 1.0]])


class TestTrace:
    def test_round_trip_drops_diagnostic_column(self, tmp_path):
        rows = (
            TraceRow(k=0, energy=1.5, increment=0.25, support_size=9,
                     min_nonzero_grad=0.01, inner_iters=4, max_grad=2.0),
            TraceRow(k=1, energy=1.25, increment=0.0, support_size=7,
                     min_nonzero_grad=0.02, inner_iters=0, max_grad=1.5),
        )
        path = tmp_path / "t.csv"
        imgio.write_trace(IterationTrace(rows=rows), path)
        text = path.read_text()
        assert text.splitlines()[0] == imgio.TRACE_HEADER
        back = imgio.read_trace(path)
        assert len(back) == 2
        assert back[0].energy == 1.5 and back[1].support_size == 7
        # max_grad is in-memory only; reads yield NaN there
        assert math.isnan(back[0].max_grad)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            imgio.read_trace(path)


class TestLogDomain:
    def test_round_trip_within_range(self):
        rng = np.random.default_rng(0)
        f = rng.uniform(imgio.EPS_POS, 1.0, (6, 6))
        np.testing.assert_allclose(imgio.from_log_domain(imgio.to_log_domain(f)), f, rtol=1e-14)

    def test_clamps_before_log(self):
        f = np.array([[0.0, 2.0], [0.5, 1.0]])
        g = imgio.to_log_domain(f)
        assert g[0, 0] == pytest.approx(math.log(imgio.EPS_POS))
        assert g[0, 1] == 0.0
        assert np.all(np.isfinite(g))


class TestRunConfig:
    def test_defaults_match_published_values(self):
        config = imgio.RunConfig(alpha=1.0, beta=100.0)
        assert config.gamma == 1e-8
        assert config.rho == 1e-8
        assert config.p == 0.5
        assert config.r == 10.0
        assert config.tol_in == 1e-4 and config.tol_out == 1e-4
        assert config.maxit_in == 100 and config.maxit_out == 10
        assert config.k == 2 and config.log_domain is False

    def test_dict_round_trip_uses_capital_k(self):
        config = imgio.RunConfig(alpha=0.5, beta=2.0, k=4, log_domain=True)
        payload = imgio.config_to_dict(config)
        assert payload["K"] == 4 and "k" not in payload
        assert imgio.config_from_dict(payload) == config

    @pytest.mark.parametrize(
        "payload,match",
        [
            ({"alpha": 1.0, "beta": 1.0, "zeta": 2}, "unknown"),
            ({"alpha": 1.0}, "missing"),
            ({"alpha": 1.0, "beta": 1.0, "K": 1}, "K"),
            ({"alpha": 1.0, "beta": 1.0, "log_domain": 3}, "boolean"),
            ({"alpha": True, "beta": 1.0}, "number"),
            ({"alpha": -1.0, "beta": 1.0}, "positive"),
        ],
    )
    def test_rejects_bad_payload(self, payload, match):
        with pytest.raises(ValueError, match=match):
            imgio.config_from_dict(payload)

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        config = imgio.RunConfig(alpha=0.5, beta=1000.0, tol_in=1e-8, maxit_in=500)
        imgio.write_run_config(config, path)
        assert imgio.read_run_config(path) == config

    def test_param_factories_consistent(self):
        config = imgio.RunConfig(alpha=0.5, beta=2.0, gamma=0.1, p=0.4,
                                 rho=0.2, r=7.0, tol_in=1e-6, maxit_in=50,
                                 tol_out=1e-5, maxit_out=20)
        model = config.model_params()
        assert model.alpha == 0.5 and model.beta == 2.0 and model.gamma == 0.1
        assert model.potential.p == 0.4
        outer = config.outer_params()
        assert outer.rho == 0.2 and outer.tol_out == 1e-5 and outer.maxit_out == 20
        admm = config.admm_params()
        assert admm.r == 7.0 and admm.tol_in == 1e-6 and admm.maxit_in == 50


class TestPhantomSpecIO:
    def test_file_round_trip(self, tmp_path):
        spec = PhantomSpec(
            n=16,
            phase_values=(0.2, 0.5, 0.9),
            shapes=(
                Disk(row=4, col=4, radius=2, phase=2),
                Rect(row0=8, col0=8, row1=12, col1=14, phase=3),
            ),
            bias_amplitude=0.3,
            bias_kind="gaussian_bump",
            noise_sigma=0.02,
            composition="multiplicative",
            seed=9,
        )
        path = tmp_path / "spec.json"
        imgio.write_phantom_spec(spec, path)
        assert imgio.read_phantom_spec(path) == spec

    def test_dict_round_trip(self):
        spec = PhantomSpec(n=8, phase_values=(0.3, 0.8),
                           shapes=(Disk(row=4, col=4, radius=2, phase=2),))
        assert imgio.phantom_spec_from_dict(imgio.phantom_spec_to_dict(spec)) == spec

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            imgio.phantom_spec_from_dict({"n": 8, "phase_values": [0.5], "blur": 1})

    def test_unknown_shape_type_rejected(self):
        payload = {"n": 8, "phase_values": [0.5],
                   "shapes": [{"type": "triangle", "phase": 1}]}
        with pytest.raises(ValueError, match="shape"):
            imgio.phantom_spec_from_dict(payload)


def test_write_report_emits_stable_json(tmp_path):
    path = tmp_path / "r.json"
    imgio.write_report({"b": 1, "a": [1, 2]}, path)
    payload = json.loads(path.read_text())
    assert payload == {"b": 1, "a": [1, 2]}
    imgio.write_report({"b": 1, "a": [1, 2]}, tmp_path / "r2.json")
    assert path.read_bytes() == (tmp_path / "r2.json").read_bytes()
