"""Quick end-to-end check of the compiled `discrim` module."""

import json
import math

import discrim


def close(a, b, tol):
    assert abs(a - b) < tol, (a, b)


phi0 = discrim.PureState.phi0(30.0)
phi1 = discrim.PureState.phi1(60.0)
close(phi0.overlap(phi1), 0.0, 1e-12)

rho0, rho1 = phi0.werner(0.956), phi1.werner(0.956)
close(rho0.fidelity(phi0), 0.967, 1e-12)

ff = discrim.FeedForwardProtocol.canonical()
close(ff.success(phi0.density(), phi1.density()), 1.0, 1e-12)
close(ff.success(rho0, rho1), 0.978, 1e-12)
close(discrim.helstrom_bound(phi0.density(), phi1.density()), 1.0, 1e-12)

walgate = discrim.FeedForwardProtocol.walgate(phi0, phi1)
close(walgate.success(phi0.density(), phi1.density()), 1.0, 1e-9)

best = discrim.optimize_local(phi0.density(), phi1.density())
close(best["success"], 0.933, 1e-3)

a, b = discrim.PureState.psi_pair(22.5)
close(a.overlap(b), math.cos(math.radians(45.0)) ** 2, 1e-12)
close(discrim.helstrom_bound(a.density(), b.density()), 0.5 * (1 + math.sqrt(0.5)), 1e-9)

c0 = discrim.sample_counts(rho0, ff, 200_000, 7)
c1 = discrim.sample_counts(rho1, ff, 200_000, 8)
assert c0 == discrim.sample_counts(rho0, ff, 200_000, 7)
p0, p1, p_avg, s0, s1, s_avg = discrim.estimate_success(c0, c1)
assert abs(p_avg - 0.978) < 5 * s_avg, (p_avg, s_avg)

bell = discrim.PureState.bell()
counts = discrim.simulate_tomography(bell.werner(0.98), 100_000, 3)
assert len(counts) == 36
rho, ll, iterations, converged = discrim.mle_reconstruct(counts)
assert converged
close(rho.fidelity(bell), 0.985, 0.01)
close(rho.tangle(), ((3 * 0.98 - 1) / 2) ** 2, 0.02)

try:
    discrim.DensityMatrix([[1, 0], [0, 1]])
except ValueError:
    pass
else:
    raise AssertionError("expected ValueError")

report = json.loads(discrim.run_experiment("pair", '{"n_events": 10000}', seed=5))
assert report["master_seed"] == 5
close(report["data"]["ff_exact"], 1.0, 1e-12)
csv = discrim.run_experiment("pair", '{"n_events": 100}', seed=5, format="csv")
assert csv.startswith("# discrim pair\n# master_seed: 5\n")

print("smoke test passed")
