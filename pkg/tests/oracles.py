"""Reference implementations used only as test oracles.

They share no code with the package beyond the formula and LTS data types.
"""
from __future__ import annotations

import itertools

from polymu.formula import And, Box, Diamond, Mu, NegLit, Nu, Or, PosLit, Repl, Var


def ref_evaluate(phi, lts, k, env=None):
    """Set of k-tuples satisfying ``phi``, by direct recursion over sets."""
    env = dict(env or {})
    n = lts.n_states
    every = frozenset(itertools.product(range(n), repeat=k))

    def moved(t, i, u):
        return t[: i - 1] + (u,) + t[i:]

    def go(f, env):
        if isinstance(f, PosLit):
            return frozenset(t for t in every if f.prop in lts.labels[t[f.index - 1]])
        if isinstance(f, NegLit):
            return frozenset(t for t in every if f.prop not in lts.labels[t[f.index - 1]])
        if isinstance(f, Var):
            return env[f.name]
        if isinstance(f, Or):
            return go(f.left, env) | go(f.right, env)
        if isinstance(f, And):
            return go(f.left, env) & go(f.right, env)
        if isinstance(f, (Diamond, Box)):
            inner = go(f.body, env)
            test = any if isinstance(f, Diamond) else all
            succ = {s: [t for (x, a, t) in lts.transitions if x == s and a == f.action] for s in range(n)}
            return frozenset(
                t for t in every if test(moved(t, f.index, u) in inner for u in succ[t[f.index - 1]])
            )
        if isinstance(f, Repl):
            inner = go(f.body, env)
            return frozenset(t for t in every if tuple(t[f.kappa(p) - 1] for p in range(1, k + 1)) in inner)
        if isinstance(f, (Mu, Nu)):
            cur = frozenset() if isinstance(f, Mu) else every
            while True:
                nxt = go(f.body, {**env, f.var: cur})
                if nxt == cur:
                    return cur
                cur = nxt
        raise TypeError(f)

    return go(phi, env)


def syntactic_subformulas(phi):
    out = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if f not in out:
            out.add(f)
            stack.extend(f.children())
    return out


def largest_bisimulation(lts):
    """Pairs of bisimilar states, by deleting pairs from the label-equality relation."""
    rel = {(s, t) for s in lts.states for t in lts.states if lts.labels[s] == lts.labels[t]}
    acts = lts.actions
    changed = True
    while changed:
        changed = False
        for s, t in sorted(rel):
            ok = all(
                any((s2, t2) in rel for t2 in lts.successors(t, a))
                for a in acts
                for s2 in lts.successors(s, a)
            ) and all(
                any((s2, t2) in rel for s2 in lts.successors(s, a))
                for a in acts
                for t2 in lts.successors(t, a)
            )
            if not ok:
                rel.discard((s, t))
                changed = True
    return rel
