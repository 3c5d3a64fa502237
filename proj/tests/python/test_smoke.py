# Copyright 2026 The qdsps Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Smoke tests of the Python bindings."""

import math
import os
import pathlib

import numpy as np
import pytest

import qdsps

SOURCE = pathlib.Path(os.environ.get("QDSPS_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
CONFIGS = SOURCE / "configs"


def test_version_and_errors():
    assert qdsps.__version__
    assert issubclass(qdsps.DomainError, ValueError)
    assert issubclass(qdsps.ConfigError, ValueError)
    assert issubclass(qdsps.CalibrationError, qdsps.NumericalError)
    with pytest.raises(qdsps.DomainError):
        qdsps.gamma_from_linewidth(0.0, 924.8)


def test_config_roundtrip():
    config = qdsps.load_config(str(CONFIGS / "sample_b.ini"))
    assert config.get("laser.pulse_fwhm_tau") == 16.0
    text_hash = config.hash()
    assert len(text_hash) == 16
    config.set("laser.pulse_fwhm_tau", 13.0)
    assert config.hash() != text_hash
    with pytest.raises(qdsps.ConfigError):
        qdsps.parse_config("[qd]\nnonsense = 1\n")
    assert "laser.detuning_delta_lambda" in qdsps.parameter_names()


def test_simulate_short_pulse():
    config = qdsps.load_config(str(CONFIGS / "sample_b.ini"))
    out = qdsps.simulate(config, 10.0)
    assert isinstance(out["p_e"], np.ndarray)
    assert out["p_e"].shape == out["time_ps"].shape
    assert 0.5 < out["photons"] <= 1.0


def test_pulse_area():
    pulse = qdsps.make_gaussian_pulse(16.0, math.pi, 0.0, 6.0 * 16.0)
    assert abs(pulse.area() - math.pi) < 1e-9


def test_identities():
    assert abs(qdsps.ms_from_hom(0.851, 0.030) - 0.9082) < 1e-4
    assert abs(qdsps.degree_of_linear_polarization(0.997, 0.003) - 0.994) < 1e-12
    assert abs(qdsps.expected_brightness(0.65, 0.85) - 0.5525) < 1e-12
    value, inconsistent = qdsps.brightness_from_counts(6.0, 81.0, 0.17)
    assert abs(value - 0.436) < 0.005 and not inconsistent
    model = qdsps.fit_detector([(0.5, 0.75), (6.0, 0.69)])
    assert abs(qdsps.detector_efficiency(model, 6.0) - 0.69) < 1e-9


def test_polar_scan():
    scan = qdsps.polar_scan(72, 10.0, 91.0)
    assert scan["i_perp"].shape == (72,)
    assert scan["i_perp"][0] < 1e-9
    assert np.argmax(scan["i_perp"][:18]) == 9


def test_small_map_is_deterministic():
    config = qdsps.load_config(str(CONFIGS / "map_small.ini"))
    one = qdsps.run_fom_map(config, 1)
    two = qdsps.run_fom_map(config, 2)
    assert list(one["status"]) == list(two["status"])
    for key in ("tau_ps", "delta_lambda_nm", "g2", "ms", "bfl"):
        np.testing.assert_array_equal(one[key], two[key])
