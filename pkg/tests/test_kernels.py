import os
import subprocess
import sys

import numpy as np
import pytest

from starpir import _kernels, codes
from starpir.codes import GrsSpec
from starpir.gf import Field


CASES = [
    (Field(2, 3), 5),
    (Field(3, 2), 4),
    (Field(2, 2), 3),
]


@pytest.mark.parametrize("field,k", CASES, ids=["gf8-k5", "gf9-k4", "gf4-k3"])
def test_numpy_fallback_matches_active_backend(field, k):
    code = codes.grs_code(GrsSpec(field, k, tuple(range(field.order)), (1,) * field.order))
    via_default = _kernels.weight_histogram(
        code.gen, field.add_table, field.mul_table, field.order
    )
    via_numpy = _kernels._weight_histogram_numpy(
        np.ascontiguousarray(code.gen), field.add_table, field.mul_table, field.order
    )
    assert np.array_equal(via_default, via_numpy)
    assert int(via_default.sum()) == field.order**k


def test_zero_row_generator_histogram():
    field = Field(2, 2)
    hist = _kernels.weight_histogram(
        np.zeros((0, 5), dtype=np.int16), field.add_table, field.mul_table, field.order
    )
    assert list(hist) == [1, 0, 0, 0, 0, 0]


@pytest.mark.parametrize("backend", ["numpy", "numba", "auto"])
def test_env_flag_selects_backend(backend):
    env = dict(os.environ, STARPIR_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", "import starpir._kernels as k; print(k.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    expected = "numpy" if backend == "numpy" else "numba"
    assert out.stdout.strip() == expected


def test_env_flag_rejects_unknown():
    env = dict(os.environ, STARPIR_BACKEND="cuda")
    out = subprocess.run(
        [sys.executable, "-c", "import starpir._kernels"],
        capture_output=True, text=True, env=env,
    )
    assert out.returncode != 0
    assert "STARPIR_BACKEND" in out.stderr


def test_full_suite_under_numpy_backend_smoke():
    # one end-to-end scheme derivation under the fallback backend
    env = dict(os.environ, STARPIR_BACKEND="numpy")
    script = (
        "from starpir.gf import Field\n"
        "from starpir import codes, pir\n"
        "f = Field(2, 3)\n"
        "alpha = tuple(range(8)); ones = (1,)*8\n"
        "cfg = pir.SchemeConfig(codes.GrsSpec(f, 1, alpha, ones),"
        " codes.GrsSpec(f, 5, alpha, ones), pir.Variant.SUBFIELD_SUBCODE, 2, 3)\n"
        "d = pir.derive_scheme(cfg)\n"
        "print(d.rate, d.t_protect, d.c)\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", script], capture_output=True, text=True, env=env, check=True
    )
    assert out.stdout.strip() == "3/8 3 3"
