"""Smoke test for the `predlab` Python extension.

Build and install first:  maturin develop -m crates/python/Cargo.toml
(or `pip install --no-build-isolation ./crates/python`), then run
`python python/smoke_test.py`.
"""

import json
import math
from pathlib import Path

import predlab

CONFIGS = Path(__file__).resolve().parent.parent / "crates" / "cli" / "configs"


def check(name, cond):
    print(f"{'ok  ' if cond else 'FAIL'} {name}")
    assert cond, name


def main():
    check("version", isinstance(predlab.__version__, str))

    # pi: 3.243F6A88...
    check("pi hex digits", predlab.pi_hex_digits(8) == [2, 4, 3, 15, 6, 10, 8, 8])
    check("bbp digit 1", predlab.bbp_hex_digit(1) == 2)
    check("pi bits", predlab.pi_bits(8) == [0, 0, 1, 0, 0, 1, 0, 0])
    check("nth prime", [predlab.nth_prime(j) for j in range(1, 6)] == [2, 3, 5, 7, 11])

    alt = predlab.BitStream.rule("alternating")
    check("alternating prefix", alt.prefix(6) in ([0, 1, 0, 1, 0, 1], [1, 0, 1, 0, 1, 0]))
    raw = predlab.BitStream.from_bytes(b"\xa0", total_bits=4)
    check("bytes are MSB-first", raw.prefix(4) == [1, 0, 1, 0])
    try:
        raw.bit(5)
        check("bounded stream raises", False)
    except predlab.PredlabError as e:
        check("bounded stream raises", bool(e.code))
    noise = predlab.BitStream.noise(42)
    check("noise deterministic", noise.prefix(64) == predlab.BitStream.noise(42).prefix(64))
    check("window", noise.window(3, 5) == noise.prefix(5)[2:])

    m = predlab.MealyAutomaton.canonical()
    check("canonical E_M alternates", m.run_em(6, start="q0") == [1, 0, 1, 0, 1, 0])
    check("canonical round-trips", predlab.MealyAutomaton.parse(m.to_text()).to_text() == m.to_text())
    check("canonical output-stable", m.output_stable()["holds"])
    check("canonical restricted", m.complementary_restricted()["holds"])
    check("canonical not strict", not m.complementary_strict()["holds"])

    counts = predlab.enumerate(1, ["output-stable"])
    check("enumerate q_max=1", counts["totals"][0]["count"] == 4)

    psi = predlab.QubitState.from_angle(0.0)
    value, non_commuting = predlab.overlap(psi, predlab.QubitState.from_angle(math.pi / 3))
    check("overlap", abs(value - 0.5) < 1e-12 and non_commuting)
    value, non_commuting = predlab.overlap(psi, predlab.QubitState(0j, 1 + 0j))
    check("orthogonal commutes", value == 0.0 and not non_commuting)

    check("cycle period 1", predlab.detect_cycle([0] * 50)["period"] == 1)
    check("alternating not normal", not predlab.normality(alt.prefix(1 << 14), 2)["pass"])
    check("csv outcome column", predlab.parse_bits_csv("index,outcome\n1,1\n2,0\n") == [1, 0])

    [dyadic] = predlab.run_config((CONFIGS / "dyadic.json").read_text())
    check("dyadic demo attains k", dyadic["report"]["verdict"] == "ATTAINED_K")
    again = predlab.run_config((CONFIGS / "dyadic.json").read_text())[0]
    dyadic.pop("wall_time_ms"), again.pop("wall_time_ms")
    check("run deterministic", json.dumps(dyadic, sort_keys=True) == json.dumps(again, sort_keys=True))
    try:
        predlab.run_config((CONFIGS / "dyadic.json").read_text().replace('"identity"', '"oracle-x"'))
        check("unknown predictor raises", False)
    except predlab.PredlabError as e:
        check("unknown predictor raises", e.code == "INVALID_CONFIG" and "oracle-x" in str(e))

    print("smoke test passed")


if __name__ == "__main__":
    main()
