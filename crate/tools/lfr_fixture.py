#!/usr/bin/env python3
"""Generate an overlapping LFR-style benchmark graph.

Follows the Lancichinetti-Fortunato construction for undirected, unweighted
graphs with overlapping communities:

  * node degrees drawn from a power law (exponent t1) with the minimum degree
    tuned so the mean matches the requested average degree;
  * community sizes drawn from a power law (exponent t2) until they absorb all
    membership slots (on nodes with om memberships, the rest with one);
  * each node spends (1 - mu) of its degree inside its communities, split
    evenly across its memberships, and mu outside;
  * internal and external stubs are wired with a configuration model, with
    self-loops, multi-edges and external edges between co-members rewired
    away.

Output is the pair of files the reference tool writes: network.dat (each
undirected edge listed in both directions, 1-indexed) and community.dat
("node<TAB>cid cid ...").

Usage: lfr_fixture.py OUT_DIR --mu 0.1 [--seed 1] [...]
"""

import argparse
import os
import random


def power_law_sample(rng, exponent, lo, hi):
    if exponent == 1.0:
        import math

        return math.exp(rng.uniform(math.log(lo), math.log(hi + 1)))
    a = 1.0 - exponent
    u = rng.random()
    lo_a, hi_a = lo ** a, (hi + 1) ** a
    return (lo_a + u * (hi_a - lo_a)) ** (1.0 / a)


def mean_power_law(exponent, lo, hi):
    num = sum(k ** -exponent * k for k in range(lo, hi + 1))
    den = sum(k ** -exponent for k in range(lo, hi + 1))
    return num / den


def degree_sequence(rng, n, avg_k, max_k, t1):
    kmin = 1
    while kmin < max_k and mean_power_law(t1, kmin + 1, max_k) <= avg_k:
        kmin += 1
    degs = [int(power_law_sample(rng, t1, kmin, max_k)) for _ in range(n)]
    degs = [min(max(d, kmin), max_k) for d in degs]
    if sum(degs) % 2:
        degs[0] += 1
    return degs


def community_sizes(rng, total, minc, maxc, t2):
    sizes = []
    while sum(sizes) < total:
        sizes.append(int(power_law_sample(rng, t2, minc, maxc)))
    excess = sum(sizes) - total
    i = 0
    while excess > 0:
        j = i % len(sizes)
        if sizes[j] > minc:
            sizes[j] -= 1
            excess -= 1
        i += 1
        if i > 100 * len(sizes) * maxc:
            raise RuntimeError("cannot balance community sizes")
    return sizes


def assign_memberships(rng, n, memberships, internal, sizes):
    # Place high-demand nodes first; a node fits a community only if its
    # per-membership internal degree is below the community size.
    order = sorted(range(n), key=lambda v: -internal[v] / memberships[v])
    free = list(sizes)
    member_of = [[] for _ in range(n)]
    for v in order:
        need = internal[v] / memberships[v]
        for _ in range(memberships[v]):
            choices = [
                c
                for c in range(len(sizes))
                if free[c] > 0 and sizes[c] > need and c not in member_of[v]
            ]
            if not choices:
                choices = [c for c in range(len(sizes)) if c not in member_of[v] and sizes[c] > need]
            weights = [max(free[c], 0) + 1e-9 for c in choices]
            c = rng.choices(choices, weights=weights)[0]
            member_of[v].append(c)
            free[c] -= 1
    return member_of


def wire(rng, stubs, forbid, rounds=50):
    """Configuration model with rejection rewiring."""
    rng.shuffle(stubs)
    edges = set()
    leftover = []
    for i in range(0, len(stubs) - 1, 2):
        u, v = stubs[i], stubs[i + 1]
        key = (min(u, v), max(u, v))
        if u == v or key in edges or forbid(u, v):
            leftover.extend([u, v])
        else:
            edges.add(key)
    for _ in range(rounds):
        if len(leftover) < 2:
            break
        rng.shuffle(leftover)
        again = []
        for i in range(0, len(leftover) - 1, 2):
            u, v = leftover[i], leftover[i + 1]
            key = (min(u, v), max(u, v))
            if u == v or key in edges or forbid(u, v):
                again.extend([u, v])
            else:
                edges.add(key)
        leftover = again
    return edges


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--k", type=float, default=20.0)
    ap.add_argument("--maxk", type=int, default=50)
    ap.add_argument("--mu", type=float, required=True)
    ap.add_argument("--t1", type=float, default=2.0)
    ap.add_argument("--t2", type=float, default=1.0)
    ap.add_argument("--minc", type=int, default=20)
    ap.add_argument("--maxc", type=int, default=50)
    ap.add_argument("--on", type=int, default=50)
    ap.add_argument("--om", type=int, default=2)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    n = args.n
    degs = degree_sequence(rng, n, args.k, args.maxk, args.t1)
    memberships = [1] * n
    for v in rng.sample(range(n), args.on):
        memberships[v] = args.om
    internal = [round((1.0 - args.mu) * d) for d in degs]
    external = [d - i for d, i in zip(degs, internal)]
    sizes = community_sizes(rng, sum(memberships), args.minc, args.maxc, args.t2)
    member_of = assign_memberships(rng, n, memberships, internal, sizes)

    members = [[] for _ in sizes]
    for v, cs in enumerate(member_of):
        for c in cs:
            members[c].append(v)

    edges = set()
    for c, vs in enumerate(members):
        stubs = []
        for v in vs:
            share = internal[v] // memberships[v]
            if member_of[v].index(c) < internal[v] % memberships[v]:
                share += 1
            stubs.extend([v] * min(share, len(vs) - 1))
        if len(stubs) % 2:
            stubs.pop()
        edges |= wire(rng, stubs, lambda u, v: False)

    sets = [set(cs) for cs in member_of]
    ext_stubs = [v for v in range(n) for _ in range(external[v])]
    if len(ext_stubs) % 2:
        ext_stubs.pop()
    edges |= wire(
        rng,
        ext_stubs,
        lambda u, v: bool(sets[u] & sets[v]) or (min(u, v), max(u, v)) in edges,
    )

    # Nodes left without any edge would vanish from the edge list.
    touched = {u for e in edges for u in e}
    for v in range(n):
        if v not in touched:
            c = member_of[v][0]
            u = next(x for x in members[c] if x != v)
            edges.add((min(u, v), max(u, v)))

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "network.dat"), "w") as f:
        for u, v in sorted(edges):
            f.write(f"{u + 1}\t{v + 1}\n")
            f.write(f"{v + 1}\t{u + 1}\n")
    with open(os.path.join(args.out, "community.dat"), "w") as f:
        for v in range(n):
            f.write(f"{v + 1}\t" + " ".join(str(c + 1) for c in member_of[v]) + "\n")
    realized_mu = sum(1 for u, v in edges if not (sets[u] & sets[v])) / len(edges)
    print(
        f"n={n} m={len(edges)} communities={len(sizes)} "
        f"overlapping={sum(1 for m in memberships if m > 1)} edge_mu={realized_mu:.3f}"
    )


if __name__ == "__main__":
    main()
