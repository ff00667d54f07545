import json
import math

import pytest

import gaitrm


def test_guard_round_trip_and_evaluation():
    g = gaitrm.parse_guard("FL & !FR & !BL & BR")
    assert str(g) == "FL & !FR & !BL & BR"
    trot_a = gaitrm.LabelSet([gaitrm.Prop.FL, gaitrm.Prop.BR])
    assert g.eval(trot_a)
    assert gaitrm.satisfying_sets(g) == [trot_a]
    assert gaitrm.parse_guard(str(g)).truth_table == g.truth_table


def test_guard_parse_error_is_value_error():
    with pytest.raises(ValueError):
        gaitrm.parse_guard("FL & & BR")


@pytest.mark.parametrize("gait", gaitrm.GAITS)
def test_builtin_machine_is_valid_and_cycles(gait):
    rm = gaitrm.build_gait_rm(gait)
    report = rm.validate()
    assert report["valid"] and report["deterministic"] and report["total"]
    assert rm.states == ["q0", "q1"]
    assert rm.num_transitions == 4


def test_rm_document_round_trip_is_byte_identical():
    doc = gaitrm.save_rm(gaitrm.build_gait_rm("pace"))
    rm, params, report = gaitrm.load_rm(doc)
    assert report["valid"]
    assert gaitrm.save_rm(rm, params) == doc
    assert json.loads(doc)["initial"] == "q0"
    with pytest.raises(ValueError):
        gaitrm.load_rm("{}")


def test_rm_step_bonus_then_walk():
    rm = gaitrm.build_gait_rm("trot")
    trot_a = gaitrm.LabelSet([gaitrm.Prop.FL, gaitrm.Prop.BR])
    nxt, reward = rm.step("q0", trot_a)
    assert nxt == "q1" and "10000" in reward
    assert rm.step("q1", trot_a)[0] == "q1"


def test_rewards():
    assert gaitrm.compute_reward("switch_pose_bonus", 0.0) == 0.0
    assert gaitrm.compute_reward("switch_pose_bonus", 0.05) == pytest.approx(10000 * math.tanh(0.05))
    assert gaitrm.compute_reward("walk", 0.1, power=20.0) == pytest.approx(0.08, abs=1e-15)


def test_toy_env_step():
    env = gaitrm.ToyQuadrupedEnv()
    assert env.reset() == 0
    info = env.step(0b1001)
    assert info["delta_x"] == pytest.approx(0.05)
    assert info["power"] == pytest.approx(10.0)
    assert env.step(15)["terminated"]


def test_wrapped_env_first_step_bonus():
    env = gaitrm.WrappedEnv("cross_product", "trot")
    features = env.reset(0)
    assert features[-1] == 0.0  # RM state q0
    features, reward, terminated, truncated, info, label = env.step(0b1001)
    assert reward == pytest.approx(499.58, abs=0.01)
    assert features[-1] == 1.0
    assert label == 0b1001 and not terminated and not truncated


def test_cross_product_requires_gait():
    with pytest.raises(ValueError):
        gaitrm.WrappedEnv("cross_product")


def test_builtin_policies():
    still = gaitrm.evaluate_builtin("stand")
    assert still["mean_pose_transitions"] == 0 and still["mean_distance"] == 0
    assert still["episodes"] == 10 and still["total_steps"] == 1000
    assert gaitrm.evaluate_builtin("pace", tracker_gait="trot", wrapper="no_gait")["mean_pose_transitions"] == 0


def test_short_training_is_reproducible():
    cfg = gaitrm.LearnerConfig()
    cfg.total_steps = 5000
    cfg.eval_every = 2500
    a = gaitrm.train("naive", "bound", cfg)
    b = gaitrm.train("naive", "bound", cfg)
    assert [step for step, _ in a["curve"]] == [2500, 5000]
    assert a == b


def test_cli_from_python(tmp_path):
    code, out, err = gaitrm.run_cli(["rm", "--gait", "trot"])
    assert code == 0 and out == gaitrm.save_rm(gaitrm.build_gait_rm("trot"))
    code, _, err = gaitrm.run_cli(["validate", str(tmp_path / "missing.json")])
    assert code == 1 and "missing.json" in err
    assert gaitrm.run_cli(["train", "--wrapper", "cross_product", "--out", str(tmp_path)])[0] == 2
