import json

import pytest

from ultraortho.verify import (
    EXIT_FAIL,
    EXIT_PASS,
    FAIL,
    OUT_OF_SCOPE,
    PASS,
    REGISTRY,
    RESULT_MAP,
    Summary,
    UnknownCheck,
    UnknownProfile,
    get_profile,
    list_checks,
    load_profiles,
    run_all,
    run_check,
)

# every stated result, by descriptive name; a new result must be added here
# and mapped to checks (or marked out of scope) in RESULT_MAP
RESULTS = [
    "ultrametric-inequality",
    "weak-orthogonality-extremal-size",
    "weak-orthogonality-asymptotics",
    "feeble-orthogonality-extremal-size",
    "feeble-orthogonality-asymptotics",
    "orthogonal-sets-theta-below-delta",
    "orthogonal-sets-ind-below-theta",
    "orthogonal-sets-scaling-bounds",
    "orthogonal-sets-limsup",
    "orthogonal-sets-diagonal-strict",
    "strongly-orthogonal-sets",
    "ind-stabilization",
    "ind-increasing-in-k",
    "ind-chain-in-l",
    "indpro-stabilization",
    "indpro-increasing-in-k",
    "indpro-chain-in-l",
    "indpro-below-ind",
    "ind-indpro-bounds",
    "ind-q2-three",
    "ind-q2-diagonal-n-plus-one",
    "ind-q2-diagonal-n-plus-two",
    "ind-diagonal-threshold",
    "ind-n-plus-one-general",
    "indpro-n-plus-one",
    "projection-properties",
    "diagonal-independence-pairwise",
    "projection-keeps-independence",
    "pair-orthogonality-residue",
    "lift-subspace-dimension",
    "residue-subspace-dimension",
    "feeble-orthogonality-residue",
    "weak-and-feeble-counting",
    "wedge-norm-minors",
    "hadamard-inequality",
    "orthogonality-minor-criterion",
    "orthogonal-set-residue-dimension",
    "orthogonal-injective-residues",
    "theta-q2-values",
    "theta-diagonal-n-plus-one",
    "delta-theta-pairs",
]

# checks of the solvers themselves rather than of a stated result
SOLVER_CHECKS = {"cap-characterization", "theta-characterization", "solver-determinism"}


def test_every_result_is_covered():
    assert sorted(RESULT_MAP) == sorted(RESULTS)
    for name, target in RESULT_MAP.items():
        if isinstance(target, tuple):
            assert target[0] == OUT_OF_SCOPE and target[1], name
            continue
        assert target, name
        for cid in target:
            assert cid in REGISTRY, f"{name} -> {cid}"


def test_every_check_is_referenced():
    used = {c for t in RESULT_MAP.values() if isinstance(t, list) for c in t}
    assert set(list_checks()) - used == SOLVER_CHECKS


def test_check_metadata():
    for cid, chk in REGISTRY.items():
        assert cid == chk.id and chk.summary
        assert cid == cid.lower() and " " not in cid


def test_profiles():
    profs = load_profiles()
    assert {"tiny", "default", "extended"} <= set(profs)
    assert get_profile("tiny")["name"] == "tiny"
    with pytest.raises(UnknownProfile):
        get_profile("nope")


def test_tiny_profile_passes():
    summary = run_all("tiny")
    bad = [r.record() for r in summary.reports if r.status != PASS]
    assert summary.exit_code == EXIT_PASS, bad
    assert len(summary.reports) == len(REGISTRY)
    for line in summary.records():
        json.loads(line)
    assert "status" in summary.table()


def test_counterexample_replays():
    # every 3 nonzero vectors of F_3^2 span the plane, so Ind = Theta = 8 here
    params = {"q": 3, "n": 2, "k": 3, "l": 2}
    rep = run_check("theta-ind-equality-threshold", grid=[params], profile="tiny")
    assert rep.status == FAIL and rep.failed == 1
    cx = rep.counterexamples[0]
    assert cx["check"] == "theta-ind-equality-threshold" and cx["params"] == params
    again = run_check(cx["check"], grid=[cx["params"]], profile="tiny")
    assert again.counterexamples == rep.counterexamples


def test_passing_grid_replays():
    rep = run_check("delta-pairs-formula", grid=[{"q": 2, "n": 2, "k": 3}], profile="tiny")
    assert rep.status == PASS and rep.passed == 1


def test_results_are_deterministic():
    a = run_check("ind-stabilization", profile="tiny").record()
    b = run_check("ind-stabilization", profile="tiny").record()
    a.pop("elapsed"), b.pop("elapsed")
    assert a == b


def test_unknown_ids():
    with pytest.raises(UnknownCheck):
        run_check("no-such-check")
    with pytest.raises(UnknownCheck):
        run_all("tiny", ids=["no-such-check"])
    with pytest.raises(UnknownProfile):
        run_all("nope")


def test_failure_sets_exit_code():
    ok = run_check("delta-pairs-formula", grid=[{"q": 2, "n": 2, "k": 3}], profile="tiny")
    # k > q is outside the formula's range, so the replay must fail
    bad = run_check("ind-pairs-small-k", grid=[{"q": 3, "n": 2, "k": 4}], profile="tiny")
    assert bad.status == FAIL
    assert Summary("tiny", [ok], 0.0).exit_code == EXIT_PASS
    assert Summary("tiny", [ok, bad], 0.0).exit_code == EXIT_FAIL
