"""Freeze acceptance fixtures from pilot runs.

Runs the pilot phantom batch (two families at n=64 across the noise and
bias grid, plus the two n=128 quality targets), checks that every run
converges with a monotone energy trace, and writes the frozen settings
plus per-run gradient-gap floors to tests/fixtures/acceptance.json.

Rerunning this script regenerates the file bit for bit; it only needs
to be rerun when solver internals or pilot geometry change.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from shrinkseg import (
    AdmmParams,
    ModelParams,
    OuterParams,
    decompose,
    generate,
    jaccard,
    segment,
)
from shrinkseg.imgio import (
    from_log_domain,
    phantom_spec_to_dict,
    to_log_domain,
)
from shrinkseg.synth import Disk, PhantomSpec, Rect

# Solver settings shared by every acceptance run. Tighter than the
# library defaults: the energy and gap checks need the inner problem
# solved well past the default tolerance.
SOLVER = {
    "r": 10.0,
    "tol_in": 1e-8,
    "maxit_in": 500,
    "tol_out": 1e-4,
    "maxit_out": 40,
    "tau_supp": 1e-3,
}

GAP_SAFETY = 0.5  # frozen floor = pilot gap times this


def two_phase_spec(n, sigma, bias_amp, bias_kind, seed):
    return PhantomSpec(
        n=n,
        phase_values=(0.3, 0.8),
        shapes=(
            Disk(row=n // 2, col=int(0.34 * n), radius=int(0.23 * n), phase=2),
            Rect(
                row0=int(0.16 * n),
                col0=int(0.69 * n),
                row1=int(0.55 * n),
                col1=int(0.91 * n),
                phase=2,
            ),
        ),
        bias_amplitude=bias_amp,
        bias_kind=bias_kind,
        noise_sigma=sigma,
        composition="multiplicative",
        seed=seed,
    )


def five_phase_spec(n, sigma, bias_amp, bias_kind, seed):
    return PhantomSpec(
        n=n,
        phase_values=(0.2, 0.4, 0.6, 0.8, 1.0),
        shapes=(
            Disk(row=int(0.28 * n), col=int(0.28 * n), radius=int(0.17 * n), phase=2),
            Disk(row=int(0.28 * n), col=int(0.72 * n), radius=int(0.17 * n), phase=3),
            Rect(
                row0=int(0.56 * n),
                col0=int(0.125 * n),
                row1=int(0.875 * n),
                col1=int(0.44 * n),
                phase=4,
            ),
            Rect(
                row0=int(0.56 * n),
                col0=int(0.59 * n),
                row1=int(0.875 * n),
                col1=int(0.875 * n),
                phase=5,
            ),
        ),
        bias_amplitude=bias_amp,
        bias_kind=bias_kind,
        noise_sigma=sigma,
        composition="multiplicative",
        seed=seed,
    )


def suite_runs():
    """The n=64 batch covering the noise/bias/phase-count grid."""
    runs = []
    grid = [
        (0.0, 0.0),
        (0.0, 0.2),
        (0.0, 0.4),
        (0.02, 0.0),
        (0.02, 0.2),
        (0.02, 0.4),
        (0.05, 0.0),
        (0.05, 0.2),
        (0.05, 0.4),
    ]
    for i, (sigma, amp) in enumerate(grid):
        kind = "none" if amp == 0 else ("linear_ramp" if i % 2 else "low_freq_sinusoid")
        name = f"two_phase_s{sigma:g}_b{amp:g}"
        runs.append((name, two_phase_spec(64, sigma, amp, kind, 100 + i), 0.5, 1000.0, 2))
    for i, (sigma, amp) in enumerate([(0.0, 0.0), (0.02, 0.2), (0.05, 0.4)]):
        kind = "none" if amp == 0 else "gaussian_bump"
        name = f"five_phase_s{sigma:g}_b{amp:g}"
        runs.append((name, five_phase_spec(64, sigma, amp, kind, 200 + i), 0.3, 1000.0, 5))
    return runs


def quality_runs():
    """The n=128 runs with frozen quality thresholds."""
    return [
        {
            "name": "two_phase_n128",
            "spec": two_phase_spec(128, 0.05, 0.4, "linear_ramp", 7),
            "alpha": 0.5,
            "beta": 1000.0,
            "k": 2,
            "js_min": 0.98,
            "cv_max": 0.05,
            "time_limit": 60.0,
        },
        {
            "name": "five_phase_n128",
            "spec": five_phase_spec(128, 0.02, 0.3, "gaussian_bump", 23),
            "alpha": 0.15,
            "beta": 1000.0,
            "k": 5,
            "js_min": 0.97,
            "cv_max": 0.05,
            "time_limit": 120.0,
        },
    ]


def pilot(spec, alpha, beta, k):
    """Run one pilot decomposition and summarize the trace."""
    phantom = generate(spec)
    g = to_log_domain(phantom.f / phantom.f.max())
    outer = OuterParams(
        tol_out=SOLVER["tol_out"],
        maxit_out=SOLVER["maxit_out"],
        tau_supp=SOLVER["tau_supp"],
    )
    admm = AdmmParams(r=SOLVER["r"], tol_in=SOLVER["tol_in"], maxit_in=SOLVER["maxit_in"])
    start = time.perf_counter()
    result = decompose(g, ModelParams(alpha=alpha, beta=beta), outer, admm)
    elapsed = time.perf_counter() - start

    energy = result.trace.column("energy")
    support = result.trace.column("support_size")
    mono = bool(np.all(np.diff(energy) <= 1e-8 * energy[0]))
    shrinking = bool(np.all(np.diff(support) <= 0))

    u = from_log_domain(result.u)
    labels = segment(u, k).labels
    js = min(
        jaccard(labels == phase, phantom.truth_labels == phase)
        for phase in range(1, k + 1)
    )
    ratios = result.trace.column("min_nonzero_grad") / result.trace.column("max_grad")
    return {
        "converged": result.converged,
        "monotone": mono,
        "shrinking": shrinking,
        "gap": float(ratios[-1]),
        "js_min": float(js),
        "elapsed": elapsed,
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--out",
        default=os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures", "acceptance.json"),
        help="where to write the fixture file",
    )
    args = parser.parse_args(argv)

    suite_entries = []
    ok = True
    for name, spec, alpha, beta, k in suite_runs():
        summary = pilot(spec, alpha, beta, k)
        ok &= summary["converged"] and summary["monotone"] and summary["shrinking"]
        print(
            f"{name:<24} conv={summary['converged']} mono={summary['monotone']} "
            f"gap={summary['gap']:.4f} js_min={summary['js_min']:.4f} "
            f"{summary['elapsed']:.1f}s"
        )
        suite_entries.append(
            {
                "name": name,
                "spec": phantom_spec_to_dict(spec),
                "alpha": alpha,
                "beta": beta,
                "k": k,
                "gap_floor": round(GAP_SAFETY * summary["gap"], 6),
            }
        )

    quality_entries = []
    for entry in quality_runs():
        summary = pilot(entry["spec"], entry["alpha"], entry["beta"], entry["k"])
        ok &= summary["converged"] and summary["monotone"] and summary["shrinking"]
        ok &= summary["js_min"] >= entry["js_min"]
        print(
            f"{entry['name']:<24} conv={summary['converged']} mono={summary['monotone']} "
            f"gap={summary['gap']:.4f} js_min={summary['js_min']:.4f} "
            f"{summary['elapsed']:.1f}s"
        )
        quality_entries.append(
            {
                "name": entry["name"],
                "spec": phantom_spec_to_dict(entry["spec"]),
                "alpha": entry["alpha"],
                "beta": entry["beta"],
                "k": entry["k"],
                "js_min": entry["js_min"],
                "cv_max": entry["cv_max"],
                "time_limit": entry["time_limit"],
                "gap_floor": round(GAP_SAFETY * summary["gap"], 6),
            }
        )

    if not ok:
        print("pilot failed; fixture file not written", file=sys.stderr)
        return 1

    payload = {"solver": SOLVER, "suite": suite_entries, "quality": quality_entries}
    out = os.path.abspath(args.out)
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
