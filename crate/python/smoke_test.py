"""Smoke test for the fusionforge Python extension.

Build and install first:
    pip install --no-build-isolation -e crates/py
"""

import json
import sys

import fusionforge as ff


def check(name, cond):
    print(f"{'ok  ' if cond else 'FAIL'} {name}")
    return cond


def main():
    results = []

    names = ff.catalog_names()
    results.append(check("catalog has fibonacci", "fibonacci" in names))

    fib = ff.verlinde("fibonacci")
    tau_tau = fib["N"][1][1]
    results.append(check("τ⊗τ = 𝟙 + τ", tau_tau == [1, 1]))

    results.append(check("genus one, seven τ = 29", ff.genus_coefficient("fibonacci", 1, ["τ"] * 7) == 29))
    results.append(check("ψ in σ⊗σ", ff.genus_coefficient("ising", 0, ["σ", "σ"], ["ψ"]) == 1))

    ring = ff.permutation_fusion("fibonacci", 4)
    lines = ff.product_lines(json.dumps(ring))
    results.append(check("(1,τ)(1,τ) line", "(1,τ)(1,τ) = 3(2,𝟙𝟙)+4(2,𝟙τ)+4(2,τ𝟙)+7(2,ττ)" in lines))
    results.append(check("Fib≀ℤ/4 verifies", ff.verify(json.dumps(ring)) == []))

    run = ff.engine_run("toric-code", n=2, seed=3)
    closed = ff.permutation_fusion("toric-code", 2)
    results.append(check("engine matches closed form", run["ring"]["N"] == closed["N"]))
    results.append(check("raw coefficients present", len(run["c_coefficients"]) > 0))

    duality = {
        "metric": {"hyperbolic": [2]},
        "lagrangian": {"H": [], "b": []},
        "action": {
            "G": {"elements": ["e", "g"], "mult_table": [[0, 1], [1, 0]]},
            "pi": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
        },
    }
    ising = ff.pointed_fusion(json.dumps(duality))
    results.append(check("toric duality gives rank 3", len(ising["labels"]) == 3))

    results.append(check("parity holds for n = 12", ff.parity_check(12)))

    broken = dict(fib)
    broken["N"] = [[[1, 0], [0, 1]], [[0, 1], [1, 1]]]
    broken["dual"] = [0, 0]
    results.append(check("broken ring reported", len(ff.verify(json.dumps(broken))) > 0))

    try:
        ff.verlinde("no-such-category")
        results.append(check("unknown category raises", False))
    except ValueError:
        results.append(check("unknown category raises", True))

    print(f"fusionforge {ff.__version__}: {sum(results)}/{len(results)} checks passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
