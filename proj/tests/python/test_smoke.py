import json
import math

import numpy as np
import pytest

import oneshot_ssvep as ss


def test_reference_and_cca():
    y = ss.reference_template(10.0, 0.0, 2, 250.0, 250)
    assert y.shape == (4, 250)
    x = np.random.default_rng(0).normal(size=(3, 4)) @ y
    rho = ss.cca_correlations(x, y, 1)
    assert rho[0] == pytest.approx(1.0, abs=1e-9)


def test_lst_recovers_mixing():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(10, 8))
    x2 = rng.normal(size=(8, 200))
    p = ss.lst_solve(a @ x2, x2)
    assert np.linalg.norm(p - a) / np.linalg.norm(a) < 1e-9


def test_itr_and_fusion():
    assert ss.itr(40, 1.0, 1.0) == pytest.approx(60 * math.log2(40))
    assert ss.itr(4, 0.25, 1.0) == 0.0
    np.testing.assert_allclose(ss.minmax_normalize(np.array([2.0, 4.0, 6.0])), [0, 0.5, 1])
    pred, fused = ss.fuse({"etrca": np.array([1.0, 0.0]), "tdca": np.array([0.0, 1.0])})
    assert pred == 0
    assert fused.shape == (2,)


def test_filterbank_shapes():
    x = np.random.default_rng(2).normal(size=(4, 250))
    bands = ss.filterbank_decompose(x, 250.0, 3)
    assert len(bands) == 3 and bands[0].shape == (4, 250)


def test_synth_and_evaluate():
    spec = {"n_subjects": 3, "n_blocks": 2, "snr": "inf"}
    ds = ss.synth_generate(spec, 4)
    assert len(ds["data"]) == 3 * 8 * 2
    cfg = {"synth": spec, "windows": [0.5], "members": "etrca,tdca", "seed": 4}
    r = ss.evaluate(cfg)
    assert r["n_classes"] == 8
    assert len(r["folds"]) == 3
    assert r["summary"][0]["accuracy_mean"] >= 95.0
    json.dumps(r)


def test_errors_carry_codes():
    with pytest.raises(ss.SsvepError) as e:
        ss.evaluate({"synth": {"n_subjects": 1}, "windows": [0.5], "members": "etrca"})
    assert ss.error_code(e.value) == "insufficient-subjects"
    with pytest.raises(ss.SsvepError) as e:
        ss.ablate({"synth": {"n_subjects": 2}}, "bogus")
    assert ss.error_code(e.value) == "invalid-variant"


def test_dataset_layout_round_trip(tmp_path):
    from oneshot_ssvep import dataset

    spec = {"n_subjects": 2, "n_blocks": 2, "snr": 1.0}
    ss.synth_save(spec, 3, tmp_path / "native")
    manifest, tensors = dataset.read_dataset(tmp_path / "native")
    assert tensors["S01"].shape == (2, 8, 8, 350)
    mem = ss.synth_generate(spec, 3)
    np.testing.assert_array_equal(tensors["S01"][1, 2], np.float32(mem["data"][8 + 2]))

    # a dataset written from Python is accepted by the native loader
    dataset.write_dataset(tmp_path / "py", manifest, tensors)
    a = ss.evaluate({"dataset": str(tmp_path / "native"), "windows": [0.5], "members": "etrca"})
    b = ss.evaluate({"dataset": str(tmp_path / "py"), "windows": [0.5], "members": "etrca"})
    assert a["summary"] == b["summary"]

    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XXXX" + bytes(20))
    with pytest.raises(ValueError):
        dataset.read_tensor(bad)
