import os
import subprocess
import sys

import numpy as np
import pytest

from lgfkit import _kernels as K


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def test_stencil_apply_paths_identical(rng):
    pad = rng.standard_normal((14, 13, 12))
    offs = np.array([[0, 0, 0], [2, 0, 0], [-2, 0, 0], [0, 1, -1], [1, 1, 1]])
    w = rng.standard_normal(5)
    a = K.stencil_apply(pad, offs, w, (2, 1, 1), (10, 11, 10))
    b = K.stencil_apply_numpy(pad, offs, w, (2, 1, 1), (10, 11, 10))
    assert np.array_equal(a, b)
    assert a[3, 4, 5] == pytest.approx(sum(wi * pad[5 + o[0], 5 + o[1], 6 + o[2]]
                                           for wi, o in zip(w, offs)))


def test_direct_convolve_paths_identical(rng):
    f = rng.standard_normal((4, 5, 3))
    f[1, 2, 0] = 0.0
    ker = rng.standard_normal((7, 9, 5))
    a, b = K.direct_convolve3(f, ker), K.direct_convolve3_numpy(f, ker)
    assert np.array_equal(a, b)
    i = (2, 3, 1)
    ref = sum(f[p, q, r] * ker[i[0] - p + 3, i[1] - q + 4, i[2] - r + 2]
              for p in range(4) for q in range(5) for r in range(3))
    assert a[i] == pytest.approx(ref)


@pytest.mark.parametrize("dim", [2, 3])
def test_expand_symmetric(dim):
    from math import comb
    ext = 5
    vals = np.arange(comb(ext + dim, dim), dtype=float)
    a = K.expand_symmetric(vals, ext, dim)
    b = K.expand_symmetric_numpy(vals, ext, dim)
    assert np.array_equal(a, b)
    if dim == 3:
        assert a[1, 2, 0] == a[0, 1, 2] == a[2, 0, 1]
        assert a[0, 0, 1] == 1.0


def test_env_flag_selects_numpy_and_matches(tmp_path):
    code = ("import numpy as np, sys\n"
            "from lgfkit import _kernels as K\n"
            "from lgfkit.free3d import IEvaluator, build_table\n"
            "sys.stdout.write(str(K.USING_NUMBA) + '\\n')\n"
            "np.save(sys.argv[1], build_table(IEvaluator('lgf2'), 4).dense())\n")
    outs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, LGFKIT_DISABLE_NUMBA=flag)
        path = str(tmp_path / f"dense_{flag}.npy")
        res = subprocess.run([sys.executable, "-c", code, path], env=env, capture_output=True,
                             text=True, check=True)
        outs[flag] = (res.stdout.strip(), np.load(path))
    assert outs["1"][0] == "False"
    assert outs["0"][0] == str(K.USING_NUMBA)
    assert np.array_equal(outs["1"][1], outs["0"][1])
