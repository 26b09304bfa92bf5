"""Smoke test for the fastmix extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python
    python crates/python/python/smoke_test.py
"""

import math

import fastmix


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    topology = fastmix.GraphTopology.grid(4, 4)
    assert (topology.num_nodes, topology.num_edges, topology.max_degree) == (16, 24, 4)
    model = fastmix.IsingModel(topology)
    assert model.dim == 24
    assert close(model.r2, math.sqrt(24), 1e-12)

    cert = fastmix.MixingCertificate.gibbs(topology, 0.2)
    assert close(cert.big_c, 16.0, 1e-12)
    assert 0.0 < cert.alpha < 1.0
    assert fastmix.tau_gibbs(16, 4, 0.2, 0.01) == 561

    box = fastmix.ConstraintSet.boxed(0.2)
    schedule = fastmix.plan(
        "strongly-convex", 10.0, 1.0, model.r2, cert, box.diameter(model), 0.1, 2.0
    )
    assert (schedule["K"], schedule["M"]) == (46, 1533), schedule

    try:
        fastmix.plan("strongly-convex", 10.0, 0.0, model.r2, cert, 1.0, 0.1, 2.0)
    except ValueError as e:
        assert "λ" in str(e)
    else:
        raise AssertionError("λ = 0 must be rejected in strongly-convex mode")

    small = fastmix.IsingModel(fastmix.GraphTopology.grid(2, 2))
    data = fastmix.Dataset.random(small, 4, seed=3)
    assert len(data) == 4
    zero = [0.0] * small.dim
    assert close(small.log_partition(zero), 4 * math.log(2), 1e-12)
    g = small.gradient(zero, data, 1.0)
    assert all(close(gi, -ti, 1e-12) for gi, ti in zip(g, data.empirical_mean))

    projected = box.project(small, [0.5, -0.5, 0.1, 0.0])
    assert projected == [0.2, -0.2, 0.1, 0.0]
    spectral = fastmix.ConstraintSet.spectral(0.3)
    p = spectral.project(small, [0.5, 0.4, -0.3, 0.2])
    assert spectral.contains(small, p, 1e-8)

    batch = fastmix.draw_batch(small, zero, 10, 5, seed=1)
    assert len(batch) == 10 and all(s in (-1, 1) for x in batch for s in x)

    optimum = fastmix.exact_optimum(small, data, box, 1.0, lipschitz=small.lipschitz(1.0))
    trace = fastmix.train(small, data, box, 10, 200, 50, 1.0, small.lipschitz(1.0), 7, reference=optimum)
    assert len(trace) == 10
    assert trace.distances[-1] < trace.distances[0] or trace.distances[-1] < 0.05
    assert trace.to_csv().splitlines()[0].startswith("# K=10")
    again = fastmix.train(small, data, box, 10, 200, 50, 1.0, small.lipschitz(1.0), 7, reference=optimum)
    assert again.to_csv() == trace.to_csv()

    reports = fastmix.run_check("mixing", 1)
    assert reports and all(r["passed"] for r in reports), reports

    print("fastmix smoke test passed")


if __name__ == "__main__":
    main()
