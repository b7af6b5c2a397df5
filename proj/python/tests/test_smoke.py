import os

import pytest

import bcsa


def path(*parts):
    return os.path.join(bcsa.data_dir(), *parts)


def test_normalize_cancels_xor():
    assert bcsa.normalize("n (+) m (+) n", ["names n m"]) == "m"
    nf, steps = bcsa.normalize("pi1(<n, m>)", ["names n m"], trace=True)
    assert nf == "n" and len(steps) >= 1


def test_parse_error_is_raised():
    with pytest.raises(bcsa.BcsaError, match="ParseError"):
        bcsa.parse_term("pair(n,", ["names n"])


def test_bundled_proofs_check():
    for name in ("kclp", "lakp"):
        v = bcsa.check(path("goals", f"{name}.bcgoal"), path("proofs", f"{name}.bcproof"))
        assert v["accepted"], v["message"]


def test_mutation_is_rejected_with_a_path():
    mdir = path("proofs", "mutations", "kclp")
    first = sorted(f for f in os.listdir(mdir) if f.endswith(".bcproof"))[0]
    v = bcsa.check(path("goals", "kclp.bcgoal"), os.path.join(mdir, first))
    assert not v["accepted"]
    assert v["failure_path"].startswith("root")


def test_goal_generation_matches_golden_file():
    text = bcsa.generate_goal(path("specs", "kclp.bcspec"), "ReaderInit, TagMsg_A, ReaderInit, TagMsg_A", 0, "kclp")
    with open(path("goals", "kclp.bcgoal")) as f:
        assert text == f.read()


def test_simulation_is_deterministic():
    a = bcsa.simulate("kcl-xor", "prf", "xor", 64, 100, 7)
    b = bcsa.simulate("kcl-xor", "prf", "xor", 64, 100, 7)
    assert a == b
    assert a["advantage"] >= 0.99
    assert "lakp-combine-replay" in bcsa.attack_ids()
