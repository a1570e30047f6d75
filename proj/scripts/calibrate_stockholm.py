#!/usr/bin/env python3
"""Calibrate the bundled Stockholm scenario adjacency.

The Stockholm scenarios model two competing viruses over 15 city districts
(nodes 1-8 north of Mälaren, 9-15 south) that all share the metro as a
common resource vertex.  Node-to-node spread rates are 0/1 adjacency
entries with unit self-loops; every district couples to the metro with
beta_w = 1 and c = 1/15.  The street-level adjacency is not part of the
published record for this scenario family, so it is reconstructed here by
simulated annealing against the family's reference spectral values:

    fig3 virus 1   delta = 4.6,           delta_w = 4    s = 0.3
    fig3 virus 2   delta = 10,            delta_w = 10   s = -4.2
    fig4 virus 1   delta = 1.5 N / 2 S,   delta_w = 1    s = 2.8
    fig4 virus 2   delta = 2 N / 1.5 S,   delta_w = 1    s = 2.8
    fig4 invasion of virus 1 into virus 2's endemic state  s = 0.2
    fig4 invasion of virus 2 into virus 1's endemic state  s = 0.2
    fig5 virus 1   delta = 3,             delta_w = 3    s = 1.7
    fig5 virus 2   delta = 4,             delta_w = 4    s = 0.9

The eight targets are mutually incompatible at exact precision: with
b = 1 and c = 1/15 fixed, every uniform-delta abscissa is a root of
(delta_w/15) * R(delta + s) = s + delta_w where R(x) = 1' (xI - B)^{-1} 1,
so the fig3 virus-1 and fig5 virus-2 targets pin R(4.9) to two different
values (16.125 vs 18.375) through one and the same function.  No
adjacency, weighted or not, satisfies both; banded at +/-0.05 the joint
system stays infeasible for 15-node 0/1 graphs (see docs/stockholm.md).
The search therefore runs in two stages: (1) anneal on all eight targets
(floor: max deviation ~0.07 with two targets out); (2) release the fig3
virus-1 target and anneal the remaining seven into the +/-0.05 band.
The shipped result FROZEN_EDGES attains seven of eight, with the whole
residual on fig3 virus 1 (0.376 instead of 0.3).

Usage:
    python3 scripts/calibrate_stockholm.py --verify        # check FROZEN_EDGES
    python3 scripts/calibrate_stockholm.py --search [...]  # re-run the search
"""

import argparse
import numpy as np

N_NODES = 15
NORTH = list(range(0, 8))   # nodes 1-8
SOUTH = list(range(8, 15))  # nodes 9-15

# Stage-2 result (1-based node pairs, symmetric, unit weight).
FROZEN_EDGES = [
    (1, 3), (1, 6), (2, 3), (2, 6), (3, 4), (3, 6), (4, 6), (5, 6), (5, 7),
    (7, 14), (8, 15),
    (9, 12), (9, 14), (9, 15), (10, 12), (10, 13), (11, 12), (11, 13),
    (12, 15), (13, 14), (13, 15),
]


def _delta_split(north, south):
    d = np.empty(N_NODES)
    d[NORTH] = north
    d[SOUTH] = south
    return d


UNIFORM_TARGETS = [
    ("fig3 s1", np.full(N_NODES, 4.6), 4.0, 0.3),
    ("fig3 s2", np.full(N_NODES, 10.0), 10.0, -4.2),
    ("fig4 s1", _delta_split(1.5, 2.0), 1.0, 2.8),
    ("fig4 s2", _delta_split(2.0, 1.5), 1.0, 2.8),
    ("fig5 s1", np.full(N_NODES, 3.0), 3.0, 1.7),
    ("fig5 s2", np.full(N_NODES, 4.0), 4.0, 0.9),
]
INVASION_TARGET = 0.2
TOL = 0.05


def frozen_adjacency():
    adj = np.zeros((N_NODES, N_NODES))
    for i, j in FROZEN_EDGES:
        adj[i - 1, j - 1] = adj[j - 1, i - 1] = 1.0
    return adj


def system_matrices(adj, delta, delta_w):
    """B_w and the diagonal of D_w for one virus layer."""
    n = adj.shape[0]
    B = adj + np.eye(n)
    Bw = np.zeros((n + 1, n + 1))
    Bw[:n, :n] = B
    Bw[:n, n] = 1.0                  # beta_w
    Bw[n, :n] = delta_w / n          # delta_w * c, c = 1/n
    dw = np.concatenate([delta, [delta_w]])
    return Bw, dw


def abscissa(M):
    return float(np.max(np.linalg.eigvals(M).real))


def layer_abscissa(adj, delta, delta_w):
    Bw, dw = system_matrices(adj, delta, delta_w)
    return abscissa(Bw - np.diag(dw))


def endemic_fixed_point(adj, delta, delta_w, tol=1e-13, max_iter=200000):
    """Monotone iteration of the endemic map from a scaled Perron vector."""
    Bw, dw = system_matrices(adj, delta, delta_w)
    Q = Bw / dw[:, None]
    lams, vecs = np.linalg.eig(Q)
    i = int(np.argmax(lams.real))
    lam = float(lams[i].real)
    if lam <= 1.0:
        raise ValueError("no endemic equilibrium: rho(Dw^-1 Bw) <= 1")
    v = np.abs(vecs[:, i].real)
    v /= v.max()
    y = 0.5 * (lam - 1.0) / lam * v
    for _ in range(max_iter):
        q = Q @ y
        t = q / (1.0 + q)
        t[-1] = (q[-1] * (1.0 + y[-1])) / (1.0 + q[-1])
        if np.max(np.abs(t - y)) < tol:
            return t
        y = t
    raise RuntimeError("fixed-point iteration did not converge")


def invasion_abscissa(adj, delta_inv, dw_inv, resident_state):
    Bw, dw = system_matrices(adj, delta_inv, dw_inv)
    x = resident_state.copy()
    x[-1] = 0.0                      # X() leaves the resource row alone
    M = (np.eye(len(x)) - np.diag(x)) @ Bw - np.diag(dw)
    return abscissa(M)


def evaluate(adj):
    """All eight calibration values for one adjacency."""
    vals = {}
    for name, delta, dw, _ in UNIFORM_TARGETS:
        vals[name] = layer_abscissa(adj, delta, dw)
    try:
        y1 = endemic_fixed_point(adj, _delta_split(1.5, 2.0), 1.0)
        y2 = endemic_fixed_point(adj, _delta_split(2.0, 1.5), 1.0)
        vals["fig4 inv1"] = invasion_abscissa(adj, _delta_split(1.5, 2.0), 1.0, y2)
        vals["fig4 inv2"] = invasion_abscissa(adj, _delta_split(2.0, 1.5), 1.0, y1)
    except (ValueError, RuntimeError):
        vals["fig4 inv1"] = vals["fig4 inv2"] = float("nan")
    return vals


def deviations(vals):
    devs = []
    for name, _, _, target in UNIFORM_TARGETS:
        devs.append((name, vals[name] - target))
    devs.append(("fig4 inv1", vals["fig4 inv1"] - INVASION_TARGET))
    devs.append(("fig4 inv2", vals["fig4 inv2"] - INVASION_TARGET))
    return devs


def print_table(adj):
    targets = dict([(n, t) for n, _, _, t in UNIFORM_TARGETS])
    all_in = True
    seven_in = True
    for k, (name, dev) in enumerate(deviations(evaluate(adj))):
        t = targets.get(name, INVASION_TARGET)
        inside = abs(dev) <= TOL
        all_in &= inside
        if k != 0:
            seven_in &= inside
        print(f"  {name:10s}  value {t + dev: 9.5f}  target {t: 5.1f}"
              f"  dev {dev:+.5f}  {'ok' if inside else 'OUT'}")
    return all_in, seven_in


def objective(adj, release_first, max_degree=5):
    devs = [d for _, d in deviations(evaluate(adj))]
    if any(np.isnan(d) for d in devs):
        return 1e9
    cost = 0.0
    for k, d in enumerate(devs):
        if release_first and k == 0:
            cost += 0.5 * max(0.0, abs(d) - 0.042) ** 2
        else:
            cost += max(0.0, abs(d) - 0.042) ** 2 * 1e6
        cost += max(0.0, abs(d) - 0.03) ** 2
    deg = adj.sum(axis=1)
    cost += 10.0 * np.sum(np.maximum(deg - max_degree, 0.0))
    cost += 10.0 * np.sum(deg == 0)
    return cost


def rand_graph_with_degrees(rng, degs, tries=200):
    n = len(degs)
    for _ in range(tries):
        stubs = [i for i, d in enumerate(degs) for _ in range(d)]
        rng.shuffle(stubs)
        adj = np.zeros((n, n))
        ok = True
        for a, b in zip(stubs[::2], stubs[1::2]):
            if a == b or adj[a, b]:
                ok = False
                break
            adj[a, b] = adj[b, a] = 1
        if ok:
            return adj
    return None


def seed_adjacency(rng):
    """Near-regular shore blocks; the metro already couples the shores."""
    while True:
        north = rand_graph_with_degrees(rng, [3, 3, 3, 3, 3, 3, 4, 2])
        south = rand_graph_with_degrees(rng, [4, 3, 3, 3, 3, 2, 2])
        if north is not None and south is not None:
            break
    adj = np.zeros((N_NODES, N_NODES))
    adj[:8, :8] = north
    adj[8:, 8:] = south
    return adj


def anneal(rng, iters, release_first, adj=None, report_every=0):
    if adj is None:
        adj = seed_adjacency(rng)
    cost = objective(adj, release_first)
    best = (cost, adj.copy())
    temp0, temp1 = 2.0, 1e-5
    for it in range(iters):
        temp = temp0 * (temp1 / temp0) ** (it / max(1, iters - 1))
        trial = adj.copy()
        r = rng.random()
        if r < 0.80:
            # swap one edge within a region (north, south, or anywhere)
            rr = rng.random()
            if rr < 0.4:
                idx = np.arange(0, 8)
            elif rr < 0.8:
                idx = np.arange(8, 15)
            else:
                idx = np.arange(15)
            sub = trial[np.ix_(idx, idx)]
            edges = np.argwhere(np.triu(sub, 1) > 0)
            holes = np.argwhere(np.triu(sub == 0, 1))
            if len(edges) == 0 or len(holes) == 0:
                continue
            e = edges[rng.integers(len(edges))]
            h = holes[rng.integers(len(holes))]
            trial[idx[e[0]], idx[e[1]]] = trial[idx[e[1]], idx[e[0]]] = 0
            trial[idx[h[0]], idx[h[1]]] = trial[idx[h[1]], idx[h[0]]] = 1
        elif r < 0.92:
            # toggle a cross-river bridge
            i, j = rng.integers(0, 8), rng.integers(8, 15)
            v = 0.0 if trial[i, j] > 0 else 1.0
            trial[i, j] = trial[j, i] = v
        else:
            # grow or shrink the edge set by one
            i, j = rng.integers(0, 15, 2)
            if i == j:
                continue
            v = 0.0 if trial[i, j] > 0 else 1.0
            trial[i, j] = trial[j, i] = v
        tcost = objective(trial, release_first)
        if tcost < cost or rng.random() < np.exp((cost - tcost) / temp):
            adj, cost = trial, tcost
            if cost < best[0]:
                best = (cost, adj.copy())
        if report_every and (it + 1) % report_every == 0:
            print(f"  iter {it + 1:6d}  cost {cost:12.6f}  best {best[0]:12.6f}")
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--verify", action="store_true",
                    help="evaluate the frozen bundled adjacency and exit")
    ap.add_argument("--search", action="store_true", help="re-run the search")
    ap.add_argument("--seed", type=int, default=31)
    ap.add_argument("--iters", type=int, default=20000)
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args()

    if args.search:
        rng = np.random.default_rng(args.seed)
        report = 1000 if args.verbose else 0
        print("stage 1: all eight targets")
        cost1, adj = anneal(rng, args.iters // 2, release_first=False,
                            report_every=report)
        print_table(adj)
        print("stage 2: releasing the fig3 virus-1 target")
        cost2, adj = anneal(rng, args.iters, release_first=True, adj=adj,
                            report_every=report)
        _, seven = print_table(adj)
        print("edge list (1-based):")
        for i, j in np.argwhere(np.triu(adj, 1) > 0):
            print(f"    ({i + 1}, {j + 1}),")
        print("seven of eight within band:", seven)
        return

    adj = frozen_adjacency()
    print(f"frozen adjacency: {len(FROZEN_EDGES)} edges, "
          f"degrees {[int(d) for d in adj.sum(axis=1)]}")
    all_in, seven = print_table(adj)
    print("seven of eight within +/-%.2f: %s (fig3 s1 excluded by design, "
          "see module docstring)" % (TOL, seven))


if __name__ == "__main__":
    main()
