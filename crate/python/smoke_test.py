"""Smoke test for the `samplus` extension module.

Build first with `cargo build -p samplus-py --release`, then run
`python3 python/smoke_test.py [path/to/libsamplus.so]`.
"""

import math
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load(explicit=None):
    candidates = [Path(explicit)] if explicit else [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libsamplus.so", "libsamplus.dylib", "samplus.dll")
    ]
    lib = next((c for c in candidates if c.exists()), None)
    if lib is None:
        sys.exit("build the extension first: cargo build -p samplus-py --release")
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    tmp = Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / f"samplus{suffix}")
    sys.path.insert(0, str(tmp))
    import samplus

    return samplus


def main():
    sp = load(sys.argv[1] if len(sys.argv) > 1 else None)
    lowou = "leave-office-without-umbrella"

    domain = sp.parse_domain(sp.COFFEE_DOMAIN)
    assert len(domain.actions) == 7 and len(domain.fluents) == 5
    problem = sp.parse_problem(sp.COFFEE_PROBLEM, domain)
    assert problem.init == ["in-office"]

    traces = sp.parse_trajectories(sp.COFFEE_TRACES_X100, domain)
    assert len(traces) == 4 and traces.total_weight == 400

    model = sp.learn(traces, 0.1, "point", domain)
    assert model.preconditions(lowou) == [
        "(in-office)", "(not (has-umbrella))", "(not (is-wet))",
        "(not (has-coffee))", "(not (user-has-coffee))",
    ]
    assert model.counts(lowou, "is-wet") == (100, 300)
    assert model.exact_point(lowou, "is-wet") == Fraction(1, 3)
    assert abs(model.point(lowou, "has-umbrella") - math.log(700) / 600) < 1e-12
    assert "(probabilistic 0.010918 (has-umbrella))" in model.render()

    interval = sp.learn(traces, 0.1, "interval", domain)
    low, high = interval.interval(lowou, "(not (in-office))")
    assert high == 1.0 and abs(1 - low - 0.070660) < 1e-6

    assert sp.credal_interval(0, 300, 0.1) == (0.0, math.log(10) / 300)
    assert sp.point_estimate(0, 0, 0.1, 5, 7) is None

    script = ["get-umbrella", "leave-office-with-umbrella", "buy-coffee",
              "move-to-office-with-umbrella", "deliver-coffee"]
    t4 = sp.sample(domain, problem, seed=1, episodes=1, policy=script)
    assert "(user-has-coffee)" in t4.to_text()
    runs = [sp.sample(domain, problem, 7, 40, "random", max_steps=8).to_text() for _ in range(2)]
    assert runs[0] == runs[1]

    report = sp.validate(sp.parse_trajectories(sp.COFFEE_TRACES, domain), domain)
    assert report["triplets"] == 13 and len(report["violations"]) == 1

    ev = sp.evaluate(model.to_domain(), domain)
    assert ev.total > 0 and not ev.extra_actions

    try:
        sp.parse_domain("(define (domain broken)")
    except sp.SamplusError as e:
        assert "1:" in str(e)
    else:
        raise AssertionError("malformed domain accepted")

    print("samplus python smoke test: ok")


if __name__ == "__main__":
    main()
